#pragma once

#include <cmath>
#include <cstdint>
#include <span>

namespace uqeval {

// Half-up rounding, used everywhere a real count or pixel is quantized so
// that outputs are reproducible across platforms (std::round ties away from
// zero, which differs for negatives).
inline std::int64_t round_half_up(double x) {
  return static_cast<std::int64_t>(std::floor(x + 0.5));
}

inline double mean(std::span<const double> values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return values.empty() ? 0.0 : sum / static_cast<double>(values.size());
}

}  // namespace uqeval
