#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

// Framework-free reference versions of the attention, fusion and loss
// formulas used by the perception stack. They check the math only.
namespace trajopt::kernels {

struct ECAParams {
  double gamma = 1.5;
  double b = 1.0;
};

struct FocalLossParams {
  double alpha_t = 0.25;
  double gamma_f = 2.0;
};

inline constexpr double kFusionEpsilon = 1e-4;

// Dense C x H x W feature map, row-major.
struct FeatureMap {
  std::size_t channels = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> data;

  FeatureMap() = default;
  FeatureMap(std::size_t c, std::size_t h, std::size_t w, double fill = 0.0)
      : channels(c), height(h), width(w), data(c * h * w, fill) {}

  double& at(std::size_t c, std::size_t y, std::size_t x) { return data[(c * height + y) * width + x]; }
  double at(std::size_t c, std::size_t y, std::size_t x) const { return data[(c * height + y) * width + x]; }
  bool same_shape(const FeatureMap& o) const {
    return channels == o.channels && height == o.height && width == o.width;
  }
};

// Stride-1 convolution with zero "same" padding; kernel dims must be odd.
struct Conv2dKernel {
  std::size_t out_channels = 0;
  std::size_t in_channels = 0;
  std::size_t kernel_h = 1;
  std::size_t kernel_w = 1;
  std::vector<double> weights;  // [out][in][kh][kw]
  std::vector<double> bias;     // empty or out_channels entries

  static Conv2dKernel identity(std::size_t channels);
};

struct FusionInputs {
  std::array<double, 3> w{1.0, 1.0, 1.0};
  FeatureMap x0;
  FeatureMap x1;
  FeatureMap x2;
  double epsilon = kFusionEpsilon;
};

struct FusionResult {
  std::array<double, 3> normalized_weights{};
  FeatureMap fused;         // weighted sum
  FeatureMap activated;     // SiLU of the weighted sum
  FeatureMap concatenated;  // x0 followed by the activated map, along channels
  FeatureMap output;        // convolution of the concatenation
};

double sigmoid(double x);
double silu(double x);

// Nearest odd integer to |log2(C)/gamma + b/gamma|, ties going up, at least 1.
std::size_t eca_kernel_size(std::size_t channels, const ECAParams& params = {});

// sigmoid of the circular 1-D convolution of the channel descriptor with a
// shared odd-length kernel centred on each channel.
std::vector<double> eca_channel_weights(std::span<const double> descriptor, std::span<const double> kernel);

// w / (sum(w) + epsilon)
std::array<double, 3> normalize_fusion_weights(const std::array<double, 3>& w, double epsilon = kFusionEpsilon);

FeatureMap conv2d(const FeatureMap& input, const Conv2dKernel& kernel);

// Weighted three-way fusion, SiLU, skip concatenation with x0, then conv.
// Without a kernel the final convolution is the identity.
FusionResult bifpn_fuse(const FusionInputs& in, const std::optional<Conv2dKernel>& kernel = std::nullopt);

// -alpha_t (1 - p_t)^gamma log(p_t), defined for p_t in (0, 1].
double focal_loss(double p_t, const FocalLossParams& params = {});

// d/dp_t of focal_loss.
double focal_loss_gradient(double p_t, const FocalLossParams& params = {});

}  // namespace trajopt::kernels
