#pragma once

#include <cmath>
#include <cstdlib>
#include <string>
#include <string_view>
#include <vector>

#include "pcascade/error.hpp"

namespace pcascade::cli {

inline double parse_real(std::string_view s, std::string_view what) {
  const std::string str(s);
  char* end = nullptr;
  const double v = std::strtod(str.c_str(), &end);
  if (str.empty() || end != str.c_str() + str.size() || !std::isfinite(v))
    throw DomainError(std::string(what) + ": not a number: '" + str + "'");
  return v;
}

/// "start:stop:step" -> start, start + step, ... up to stop. A point that
/// overshoots stop by no more than a rounding error (1e-9 step) is kept and
/// snapped to stop. A plain number is a one-point grid.
inline std::vector<double> parse_grid(std::string_view spec, std::string_view what = "grid") {
  const auto c1 = spec.find(':');
  if (c1 == std::string_view::npos) return {parse_real(spec, what)};
  const auto c2 = spec.find(':', c1 + 1);
  if (c2 == std::string_view::npos || spec.find(':', c2 + 1) != std::string_view::npos)
    throw DomainError(std::string(what) + ": expected start:stop:step, got '" + std::string(spec) + "'");
  const double start = parse_real(spec.substr(0, c1), what);
  const double stop = parse_real(spec.substr(c1 + 1, c2 - c1 - 1), what);
  const double step = parse_real(spec.substr(c2 + 1), what);
  if (!(step > 0.0)) throw DomainError(std::string(what) + ": step must be positive");
  if (stop < start) throw DomainError(std::string(what) + ": stop lies below start");
  const double count = std::floor((stop - start) / step + 1e-9);
  if (count > 1e7) throw DomainError(std::string(what) + ": more than 10^7 points");
  std::vector<double> xs;
  const auto n = static_cast<std::size_t>(count);
  xs.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double x = start + static_cast<double>(i) * step;
    xs.push_back(std::fabs(x - stop) <= 1e-9 * step ? stop : x);
  }
  return xs;
}

}  // namespace pcascade::cli
