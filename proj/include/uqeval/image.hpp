#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace uqeval {

/// 8-bit grayscale image, row-major.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  bool empty() const { return width <= 0 || height <= 0 || pixels.empty(); }

  std::uint8_t at(int x, int y) const {
    return pixels[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                  static_cast<std::size_t>(x)];
  }
};

// PNG container; color inputs are converted to 8-bit grayscale on read.
GrayImage read_png(const std::string& path);
void write_png(const std::string& path, const GrayImage& image);

// Baseline JPEG round-trip through libjpeg at the given quality in [1, 100].
std::vector<std::uint8_t> encode_jpeg(const GrayImage& image, int quality);
GrayImage decode_jpeg(const std::vector<std::uint8_t>& bytes);

}  // namespace uqeval
