#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <string_view>

#include "pcascade/error.hpp"

namespace pcascade {

enum class Phase { dense, dilute };

inline std::string_view to_string(Phase p) { return p == Phase::dense ? "dense" : "dilute"; }

inline Phase parse_phase(std::string_view s) {
  if (s == "dense") return Phase::dense;
  if (s == "dilute") return Phase::dilute;
  throw DomainError("unknown phase '" + std::string(s) + "' (expected dense or dilute)");
}

/// Model constants of the perimeter cascade. Everything is derived from the
/// stable index alpha in (1,2); alpha = 3/2 is the critical case and is only
/// constructible through for_tabulation().
///
///   loop weight   n     = 2 cos(pi (alpha - 3/2))
///   CLE parameter kappa = 4 / (alpha - 1/2)
///   Malthusian    theta = min(2, 2 alpha - 1)
class CascadeParameters {
 public:
  static CascadeParameters from_alpha(double alpha, double levy_scale = 1.0) {
    check_alpha(alpha, /*allow_critical=*/false);
    return CascadeParameters(alpha, levy_scale);
  }

  /// Inverse of the loop-weight map; the phase selects the branch.
  static CascadeParameters from_loop_weight(double n, Phase phase, double levy_scale = 1.0) {
    if (!(n > 0.0 && n < 2.0)) throw DomainError("loop weight n must lie in (0,2)");
    const double shift = std::acos(n / 2.0) / std::numbers::pi;
    const double alpha = phase == Phase::dense ? 1.5 - shift : 1.5 + shift;
    return from_alpha(alpha, levy_scale);
  }

  static CascadeParameters from_kappa(double kappa_cle, double levy_scale = 1.0) {
    if (!(kappa_cle > 8.0 / 3.0 && kappa_cle < 8.0) || kappa_cle == 4.0)
      throw DomainError("kappa must lie in (8/3,8) minus {4}");
    return from_alpha(0.5 + 4.0 / kappa_cle, levy_scale);
  }

  /// Permits alpha = 3/2, where the closed forms are still defined.
  static CascadeParameters for_tabulation(double alpha, double levy_scale = 1.0) {
    check_alpha(alpha, /*allow_critical=*/true);
    return CascadeParameters(alpha, levy_scale);
  }

  double alpha() const { return alpha_; }
  double levy_scale() const { return levy_scale_; }
  bool is_critical() const { return alpha_ == 1.5; }

  Phase phase() const { return alpha_ < 1.5 ? Phase::dense : Phase::dilute; }

  double loop_weight() const { return 2.0 * std::cos(std::numbers::pi * (alpha_ - 1.5)); }

  double kappa_cle() const { return 4.0 / (alpha_ - 0.5); }

  double malthusian() const { return std::min(2.0, 2.0 * alpha_ - 1.0); }

  /// Order of the Bessel function in psi_{alpha,theta}.
  double bessel_order() const { return alpha_ - 0.5; }

 private:
  CascadeParameters(double alpha, double levy_scale) : alpha_(alpha), levy_scale_(levy_scale) {
    if (!(levy_scale > 0.0) || !std::isfinite(levy_scale))
      throw DomainError("Levy scale C must be a positive real");
  }

  static void check_alpha(double alpha, bool allow_critical) {
    if (!(alpha > 1.0 && alpha < 2.0)) throw DomainError("alpha must lie in (1,2)");
    if (!allow_critical && alpha == 1.5)
      throw DomainError(
          "alpha = 3/2 is the critical case, which is excluded from simulation "
          "(only tabulation of closed forms is allowed there)");
  }

  double alpha_;
  double levy_scale_;
};

}  // namespace pcascade
