#include "trajopt/vision_kernels.hpp"

#include <cmath>
#include <string>

#include "trajopt/errors.hpp"

namespace trajopt::kernels {

namespace {

void check_probability(double p_t) {
  if (!(p_t > 0.0 && p_t <= 1.0)) {
    throw DomainError("focal_loss: p_t must lie in (0, 1], got " + std::to_string(p_t));
  }
}

}  // namespace

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double silu(double x) { return x * sigmoid(x); }

std::size_t eca_kernel_size(std::size_t channels, const ECAParams& params) {
  if (channels < 1) throw DomainError("eca_kernel_size: channel count must be >= 1");
  if (!(params.gamma > 0.0)) throw DomainError("eca_kernel_size: gamma must be > 0");
  const double value =
      std::abs(std::log2(static_cast<double>(channels)) / params.gamma + params.b / params.gamma);
  // 2 floor(v/2) + 1 is the nearest odd integer; an even v is a tie and goes up.
  return 2 * static_cast<std::size_t>(std::floor(value / 2.0)) + 1;
}

std::vector<double> eca_channel_weights(std::span<const double> descriptor, std::span<const double> kernel) {
  const std::size_t C = descriptor.size();
  const std::size_t k = kernel.size();
  if (C == 0 || k == 0 || k % 2 == 0 || k > C) {
    throw ShapeMismatch("eca_channel_weights: kernel length must be odd and no longer than the channel count");
  }
  const std::size_t half = k / 2;
  std::vector<double> out(C);
  for (std::size_t i = 0; i < C; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < k; ++j) acc += kernel[j] * descriptor[(i + C + j - half) % C];
    out[i] = sigmoid(acc);
  }
  return out;
}

std::array<double, 3> normalize_fusion_weights(const std::array<double, 3>& w, double epsilon) {
  for (double wi : w) {
    if (!(wi >= 0.0)) throw DomainError("fusion weights must be nonnegative");
  }
  const double denom = w[0] + w[1] + w[2] + epsilon;
  return {w[0] / denom, w[1] / denom, w[2] / denom};
}

Conv2dKernel Conv2dKernel::identity(std::size_t channels) {
  Conv2dKernel k;
  k.out_channels = channels;
  k.in_channels = channels;
  k.weights.assign(channels * channels, 0.0);
  for (std::size_t c = 0; c < channels; ++c) k.weights[c * channels + c] = 1.0;
  return k;
}

FeatureMap conv2d(const FeatureMap& input, const Conv2dKernel& kernel) {
  if (kernel.in_channels != input.channels || kernel.kernel_h % 2 == 0 || kernel.kernel_w % 2 == 0 ||
      kernel.weights.size() != kernel.out_channels * kernel.in_channels * kernel.kernel_h * kernel.kernel_w ||
      (!kernel.bias.empty() && kernel.bias.size() != kernel.out_channels)) {
    throw ShapeMismatch("conv2d: kernel shape does not match the input");
  }
  const auto H = static_cast<long>(input.height);
  const auto W = static_cast<long>(input.width);
  const auto kh = static_cast<long>(kernel.kernel_h);
  const auto kw = static_cast<long>(kernel.kernel_w);
  FeatureMap out(kernel.out_channels, input.height, input.width);
  for (std::size_t o = 0; o < kernel.out_channels; ++o) {
    const double bias = kernel.bias.empty() ? 0.0 : kernel.bias[o];
    for (long y = 0; y < H; ++y) {
      for (long x = 0; x < W; ++x) {
        double acc = bias;
        for (std::size_t i = 0; i < kernel.in_channels; ++i) {
          for (long dy = 0; dy < kh; ++dy) {
            const long sy = y + dy - kh / 2;
            if (sy < 0 || sy >= H) continue;
            for (long dx = 0; dx < kw; ++dx) {
              const long sx = x + dx - kw / 2;
              if (sx < 0 || sx >= W) continue;
              const std::size_t widx =
                  ((o * kernel.in_channels + i) * kernel.kernel_h + static_cast<std::size_t>(dy)) * kernel.kernel_w +
                  static_cast<std::size_t>(dx);
              acc += kernel.weights[widx] *
                     input.at(i, static_cast<std::size_t>(sy), static_cast<std::size_t>(sx));
            }
          }
        }
        out.at(o, static_cast<std::size_t>(y), static_cast<std::size_t>(x)) = acc;
      }
    }
  }
  return out;
}

FusionResult bifpn_fuse(const FusionInputs& in, const std::optional<Conv2dKernel>& kernel) {
  if (!in.x0.same_shape(in.x1) || !in.x0.same_shape(in.x2) || in.x0.data.size() != in.x1.data.size() ||
      in.x0.data.size() != in.x2.data.size()) {
    throw ShapeMismatch("bifpn_fuse: feature maps must share one shape");
  }
  if (!(in.epsilon > 0.0)) throw DomainError("bifpn_fuse: epsilon must be > 0");

  FusionResult r;
  r.normalized_weights = normalize_fusion_weights(in.w, in.epsilon);
  const auto& w = r.normalized_weights;

  r.fused = FeatureMap(in.x0.channels, in.x0.height, in.x0.width);
  r.activated = r.fused;
  for (std::size_t i = 0; i < in.x0.data.size(); ++i) {
    r.fused.data[i] = w[0] * in.x0.data[i] + w[1] * in.x1.data[i] + w[2] * in.x2.data[i];
    r.activated.data[i] = silu(r.fused.data[i]);
  }

  r.concatenated = FeatureMap(2 * in.x0.channels, in.x0.height, in.x0.width);
  std::copy(in.x0.data.begin(), in.x0.data.end(), r.concatenated.data.begin());
  std::copy(r.activated.data.begin(), r.activated.data.end(),
            r.concatenated.data.begin() + static_cast<std::ptrdiff_t>(in.x0.data.size()));

  r.output = conv2d(r.concatenated, kernel ? *kernel : Conv2dKernel::identity(r.concatenated.channels));
  return r;
}

double focal_loss(double p_t, const FocalLossParams& params) {
  check_probability(p_t);
  return -params.alpha_t * std::pow(1.0 - p_t, params.gamma_f) * std::log(p_t);
}

double focal_loss_gradient(double p_t, const FocalLossParams& params) {
  check_probability(p_t);
  const double g = params.gamma_f;
  const double q = 1.0 - p_t;
  // The gamma term vanishes at gamma == 0, and at p_t == 1 since log(p_t) == 0.
  const double focusing = (g == 0.0 || q == 0.0) ? 0.0 : g * std::pow(q, g - 1.0) * std::log(p_t);
  return params.alpha_t * (focusing - std::pow(q, g) / p_t);
}

}  // namespace trajopt::kernels
