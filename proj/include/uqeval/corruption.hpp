#pragma once

#include <cstdint>
#include <string_view>

#include "uqeval/image.hpp"

namespace uqeval {

enum class CorruptionKind { kGaussianNoise, kGaussianBlur, kContrast, kBrightness, kJpeg };

CorruptionKind corruption_from_name(std::string_view name);
std::string_view corruption_name(CorruptionKind kind);

// Grid parameter for (kind, severity), severity in {1, 3, 5}: noise sigma,
// blur sigma (pixels), contrast alpha, brightness delta, or JPEG quality.
double severity_params(CorruptionKind kind, int severity);

struct CorruptionSpec {
  CorruptionKind kind = CorruptionKind::kGaussianNoise;
  int severity = 1;
  double parameter = 0.0;

  static CorruptionSpec from_grid(CorruptionKind kind, int severity) {
    return {kind, severity, severity_params(kind, severity)};
  }
};

// Pixel-space transforms on uint8 [0, 255]:
//   noise       x' = clip(x + 255 n), n ~ N(0, sigma^2) from the seeded stream
//   blur        separable Gaussian, radius ceil(3 sigma_b), clamp-to-edge
//   contrast    x' = clip(alpha x + (1 - alpha) mean(x))
//   brightness  x' = clip(x + 255 delta)
//   jpeg        encode at quality Q, decode back
// Real-valued results are rounded half-up before clipping.
GrayImage apply_corruption(const GrayImage& image, const CorruptionSpec& spec,
                           std::uint64_t seed);

}  // namespace uqeval
