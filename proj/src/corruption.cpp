#include "uqeval/corruption.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "uqeval/error.hpp"
#include "uqeval/numeric.hpp"
#include "uqeval/rng.hpp"

namespace uqeval {
namespace {

std::uint8_t quantize(double value) {
  const std::int64_t rounded = round_half_up(value);
  return static_cast<std::uint8_t>(std::clamp<std::int64_t>(rounded, 0, 255));
}

GrayImage gaussian_noise(const GrayImage& image, double sigma, std::uint64_t seed) {
  GrayImage out = image;
  if (sigma == 0.0) return out;
  Rng rng(seed);
  for (std::size_t i = 0; i < out.pixels.size(); ++i) {
    out.pixels[i] = quantize(static_cast<double>(image.pixels[i]) +
                             255.0 * sigma * rng.next_normal());
  }
  return out;
}

GrayImage gaussian_blur(const GrayImage& image, double sigma) {
  if (sigma <= 0.0) return image;
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    const double w = std::exp(-0.5 * (k / sigma) * (k / sigma));
    kernel[static_cast<std::size_t>(k + radius)] = w;
    sum += w;
  }
  for (double& w : kernel) w /= sum;

  const int width = image.width;
  const int height = image.height;
  const auto clamp_x = [&](int x) { return std::clamp(x, 0, width - 1); };
  const auto clamp_y = [&](int y) { return std::clamp(y, 0, height - 1); };

  std::vector<double> horizontal(image.pixels.size());
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        acc += kernel[static_cast<std::size_t>(k + radius)] *
               static_cast<double>(image.at(clamp_x(x + k), y));
      }
      horizontal[static_cast<std::size_t>(y) * width + x] = acc;
    }
  }
  GrayImage out = image;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        acc += kernel[static_cast<std::size_t>(k + radius)] *
               horizontal[static_cast<std::size_t>(clamp_y(y + k)) * width + x];
      }
      out.pixels[static_cast<std::size_t>(y) * width + x] = quantize(acc);
    }
  }
  return out;
}

GrayImage contrast(const GrayImage& image, double alpha) {
  double mean_value = 0.0;
  for (std::uint8_t p : image.pixels) mean_value += static_cast<double>(p);
  mean_value /= static_cast<double>(image.pixels.size());

  GrayImage out = image;
  for (std::size_t i = 0; i < out.pixels.size(); ++i) {
    out.pixels[i] =
        quantize(alpha * static_cast<double>(image.pixels[i]) + (1.0 - alpha) * mean_value);
  }
  return out;
}

GrayImage brightness(const GrayImage& image, double delta) {
  GrayImage out = image;
  for (std::size_t i = 0; i < out.pixels.size(); ++i) {
    out.pixels[i] = quantize(static_cast<double>(image.pixels[i]) + 255.0 * delta);
  }
  return out;
}

}  // namespace

CorruptionKind corruption_from_name(std::string_view name) {
  if (name == "gaussian_noise") return CorruptionKind::kGaussianNoise;
  if (name == "gaussian_blur") return CorruptionKind::kGaussianBlur;
  if (name == "contrast") return CorruptionKind::kContrast;
  if (name == "brightness") return CorruptionKind::kBrightness;
  if (name == "jpeg") return CorruptionKind::kJpeg;
  throw ValidationError("unknown corruption kind: " + std::string(name));
}

std::string_view corruption_name(CorruptionKind kind) {
  switch (kind) {
    case CorruptionKind::kGaussianNoise: return "gaussian_noise";
    case CorruptionKind::kGaussianBlur: return "gaussian_blur";
    case CorruptionKind::kContrast: return "contrast";
    case CorruptionKind::kBrightness: return "brightness";
    case CorruptionKind::kJpeg: return "jpeg";
  }
  return "?";
}

double severity_params(CorruptionKind kind, int severity) {
  int column;
  switch (severity) {
    case 1: column = 0; break;
    case 3: column = 1; break;
    case 5: column = 2; break;
    default:
      throw ValidationError("severity must be 1, 3, or 5, got " + std::to_string(severity));
  }
  switch (kind) {
    case CorruptionKind::kGaussianNoise: {
      constexpr double sigma[] = {0.04, 0.08, 0.12};
      return sigma[column];
    }
    case CorruptionKind::kGaussianBlur: {
      constexpr double sigma_b[] = {1.0, 2.0, 3.0};
      return sigma_b[column];
    }
    case CorruptionKind::kContrast: {
      constexpr double alpha[] = {0.7, 0.5, 0.3};
      return alpha[column];
    }
    case CorruptionKind::kBrightness: {
      constexpr double delta[] = {0.05, 0.10, 0.15};
      return delta[column];
    }
    case CorruptionKind::kJpeg: {
      constexpr double quality[] = {50.0, 30.0, 10.0};
      return quality[column];
    }
  }
  throw ValidationError("unknown corruption kind");
}

GrayImage apply_corruption(const GrayImage& image, const CorruptionSpec& spec,
                           std::uint64_t seed) {
  if (image.empty()) throw ValidationError("apply_corruption: zero-size image");
  if (image.pixels.size() !=
      static_cast<std::size_t>(image.width) * static_cast<std::size_t>(image.height)) {
    throw ValidationError("apply_corruption: pixel buffer does not match dimensions");
  }
  switch (spec.kind) {
    case CorruptionKind::kGaussianNoise:
      return gaussian_noise(image, spec.parameter, seed);
    case CorruptionKind::kGaussianBlur:
      return gaussian_blur(image, spec.parameter);
    case CorruptionKind::kContrast:
      return contrast(image, spec.parameter);
    case CorruptionKind::kBrightness:
      return brightness(image, spec.parameter);
    case CorruptionKind::kJpeg: {
      const int quality = static_cast<int>(spec.parameter);
      return decode_jpeg(encode_jpeg(image, quality));
    }
  }
  throw ValidationError("apply_corruption: unknown kind");
}

}  // namespace uqeval
