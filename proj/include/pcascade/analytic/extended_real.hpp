#pragma once

#include <cmath>
#include <limits>
#include <ostream>

#include "pcascade/error.hpp"

namespace pcascade {

/// A real number or +infinity. Biggins-type transforms are genuinely
/// extended-valued, so the infinite case is a tag rather than a float.
class ExtendedReal {
 public:
  constexpr explicit ExtendedReal(double v) : value_(v), infinite_(false) {}

  static constexpr ExtendedReal infinity() { return ExtendedReal(); }

  constexpr bool is_finite() const { return !infinite_; }
  constexpr bool is_infinite() const { return infinite_; }

  double value() const {
    if (infinite_) throw DomainError("ExtendedReal: value() on +infinity");
    return value_;
  }

  // Lossy conversion for output and plotting.
  constexpr double to_double() const {
    return infinite_ ? std::numeric_limits<double>::infinity() : value_;
  }

  friend constexpr bool operator==(const ExtendedReal& a, const ExtendedReal& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }

  friend std::ostream& operator<<(std::ostream& os, const ExtendedReal& x) {
    if (x.infinite_) return os << "+inf";
    return os << x.value_;
  }

 private:
  constexpr ExtendedReal() : value_(0.0), infinite_(true) {}

  double value_;
  bool infinite_;
};

}  // namespace pcascade
