#include "trajopt/kernel_checks.hpp"

#include <cmath>
#include <locale>
#include <numbers>
#include <sstream>

#include "trajopt/vision_kernels.hpp"

namespace trajopt::kernels {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(12);
  os << x;
  return os.str();
}

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

FeatureMap scalar_map(double value) { return FeatureMap(1, 1, 1, value); }

}  // namespace

std::vector<KernelCheckResult> run_kernel_checks() {
  std::vector<KernelCheckResult> out;
  const auto add = [&out](std::string name, std::string reported, bool passed) {
    out.push_back({std::move(name), std::move(reported), passed});
  };

  for (auto [channels, expected] : {std::pair<std::size_t, std::size_t>{128, 5}, {512, 7}, {2, 1}}) {
    const std::size_t k = eca_kernel_size(channels);
    add("eca_kernel_size(" + std::to_string(channels) + ") == " + std::to_string(expected), std::to_string(k),
        k == expected);
  }

  {
    const std::vector<double> desc{0.3, -1.2, 2.0, 0.7, -0.1};
    const std::vector<double> zero(3, 0.0);
    const auto w = eca_channel_weights(desc, zero);
    bool ok = true;
    for (double x : w) ok = ok && x == 0.5;
    add("eca_channel_weights zero kernel -> 0.5", fmt(w.front()), ok);
  }
  {
    const std::vector<double> desc{0.0, std::log(3.0), -std::log(3.0)};
    const std::vector<double> one{1.0};
    const auto w = eca_channel_weights(desc, one);
    add("eca_channel_weights [0, ln3, -ln3] -> [0.5, 0.75, 0.25]",
        fmt(w[0]) + " " + fmt(w[1]) + " " + fmt(w[2]),
        close(w[0], 0.5, 1e-12) && close(w[1], 0.75, 1e-12) && close(w[2], 0.25, 1e-12));
  }
  {
    const std::vector<double> desc(8, 0.4);
    const std::vector<double> kern{0.5, -0.25, 1.0};
    const auto w = eca_channel_weights(desc, kern);
    const double expected = sigmoid(0.4 * 1.25);
    bool ok = true;
    for (double x : w) ok = ok && close(x, expected, 1e-12);
    add("eca_channel_weights constant descriptor -> sigmoid(c*s)", fmt(w.front()), ok);
  }

  {
    const auto w = normalize_fusion_weights({1.0, 1.0, 1.0});
    add("fusion weights (1,1,1) -> 1/3.0001", fmt(w[0]),
        close(w[0], 1.0 / 3.0001, 1e-15) && w[0] == w[1] && w[1] == w[2]);
  }
  {
    const std::array<double, 3> raw{0.7, 2.5, 0.05};
    const auto w = normalize_fusion_weights(raw);
    const double sum = w[0] + w[1] + w[2];
    const double expected = 3.25 / (3.25 + kFusionEpsilon);
    add("fusion weights sum == sum(w)/(sum(w)+eps)", fmt(sum),
        close(sum, expected, 1e-12) && w[0] >= 0.0 && w[1] >= 0.0 && w[2] >= 0.0);
  }
  {
    FusionInputs in;
    in.w = {0.5, 1.5, 3.0};
    in.x0 = FeatureMap(2, 2, 2);
    for (std::size_t i = 0; i < in.x0.data.size(); ++i) in.x0.data[i] = 0.25 * static_cast<double>(i) - 0.8;
    in.x1 = in.x0;
    in.x2 = in.x0;
    const auto r = bifpn_fuse(in);
    const double scale = 5.0 / (5.0 + kFusionEpsilon);
    bool ok = true;
    for (std::size_t i = 0; i < in.x0.data.size(); ++i) ok = ok && close(r.fused.data[i], scale * in.x0.data[i], 1e-12);
    add("bifpn_fuse identical inputs -> y = sum(w') x", fmt(scale), ok && scale < 1.0);
  }
  {
    FusionInputs in;
    in.w = {2.0, 1.0, 1.0};
    in.x0 = scalar_map(4.0);
    in.x1 = scalar_map(0.0);
    in.x2 = scalar_map(0.0);
    const auto r = bifpn_fuse(in);
    const double y = 2.0 / 4.0001 * 4.0;
    const double activated = y * sigmoid(y);
    const bool concat_ok = r.concatenated.channels == 2 && r.concatenated.data[0] == 4.0 &&
                           r.concatenated.data[1] == r.activated.data[0];
    const bool out_ok = r.output.data == r.concatenated.data;
    add("bifpn_fuse w=(2,1,1), x=(4,0,0) -> y = 1.99995", fmt(r.fused.data[0]) + " " + fmt(r.activated.data[0]),
        close(r.fused.data[0], y, 1e-12) && close(r.activated.data[0], activated, 1e-12) && concat_ok && out_ok);
  }
  add("silu(0) == 0", fmt(silu(0.0)), silu(0.0) == 0.0);

  {
    const double fl = focal_loss(1.0);
    add("focal_loss(1.0) == 0", fmt(fl), fl == 0.0);
  }
  {
    const FocalLossParams ce{0.25, 0.0};
    const double fl = focal_loss(0.3, ce);
    add("focal_loss gamma=0 -> -alpha log p", fmt(fl), close(fl, -0.25 * std::log(0.3), 1e-15));
  }
  {
    const double fl = focal_loss(0.5);
    const double expected = 0.25 * 0.25 * std::numbers::ln2;
    add("focal_loss(0.5; 0.25, 2) == 0.25*0.25*ln2", fmt(fl), close(fl, expected, 1e-9));
  }
  {
    bool ok = true;
    std::string reported;
    for (double p : {0.1, 0.5, 0.9}) {
      const double h = 1e-6;
      const double fd = (focal_loss(p + h) - focal_loss(p - h)) / (2.0 * h);
      const double g = focal_loss_gradient(p);
      ok = ok && std::abs(g - fd) <= 1e-6 * std::abs(fd);
      reported += fmt(g) + " ";
    }
    add("focal_loss gradient == central difference (rel 1e-6)", reported, ok);
  }
  return out;
}

}  // namespace trajopt::kernels
