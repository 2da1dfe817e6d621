#pragma once

#include <cstddef>
#include <vector>

#include "pcascade/analytic/biggins.hpp"
#include "pcascade/analytic/parameters.hpp"
#include "pcascade/cascade/tree.hpp"
#include "pcascade/error.hpp"

namespace pcascade {

/// How labels that the tree did not expand enter W_k.
enum class MartingaleMode {
  exact,        // refuse unless every label of generation < k was expanded
  lower_bound,  // count only the generation-k labels that are stored
  frozen_line,  // an unexpanded label u of generation j < k contributes its
                // conditional mean (chi(u)/p)^theta phi^{-j} in the limit cascade
};

struct MartingaleRecord {
  double alpha = 0.0;
  double theta = 0.0;
  std::uint64_t p = 0;
  std::vector<double> W;  // W_0 .. W_k
};

/// W_k(alpha, theta) = phi_alpha(theta)^{-k} sum_{|u| = k} (chi(u)/p)^theta.
inline double additive_martingale(const CascadeTree& tree, const CascadeParameters& params, double theta, std::size_t k,
                                  MartingaleMode mode = MartingaleMode::exact) {
  if (k > tree.max_generation()) throw DomainError("additive_martingale: k exceeds the tree's max_generation");
  const ExtendedReal phi = biggins_transform(params, theta);
  if (!phi.is_finite()) throw DomainError("additive_martingale: phi_alpha(theta) is infinite for this theta");
  if (mode == MartingaleMode::exact && !tree.complete_through(k))
    throw DomainError("additive_martingale: tree is truncated below generation k (t_min > 1); "
                      "ask for lower_bound or frozen_line explicitly");
  const double f = phi.value();
  double w = tree.generation_power_sum(k, theta) * std::pow(f, -static_cast<double>(k));
  if (mode == MartingaleMode::frozen_line) w += tree.frozen_power_sum(k, theta, f);
  return w;
}

/// The additive martingale at the Malthusian parameter, where phi = 1.
inline double malthusian_martingale(const CascadeTree& tree, const CascadeParameters& params, std::size_t k,
                                    MartingaleMode mode = MartingaleMode::exact) {
  return additive_martingale(tree, params, params.malthusian(), k, mode);
}

inline MartingaleRecord martingale_record(const CascadeTree& tree, const CascadeParameters& params, double theta,
                                          std::size_t k_max, MartingaleMode mode = MartingaleMode::exact) {
  MartingaleRecord r{params.alpha(), theta, tree.p(), {}};
  for (std::size_t k = 0; k <= k_max; ++k) r.W.push_back(additive_martingale(tree, params, theta, k, mode));
  return r;
}

inline double max_label_beyond(const CascadeTree& tree, std::size_t k) { return tree.max_label_beyond(k); }

}  // namespace pcascade
