// Grows one cascade tree in the dense phase, prints its first two generations
// and the Malthusian martingale W_k along the generations.
#include <cstdio>
#include <iostream>

#include "pcascade/pcascade.hpp"

int main(int argc, char** argv) {
  using namespace pcascade;
  const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 3;
  const auto params = CascadeParameters::from_alpha(1.2);
  const StepLaw step(OffspringLaw::stable_default(params.alpha()));

  GrowOptions opt;
  opt.max_generation = 4;
  opt.t_min = 20;
  const CascadeTree tree = grow_cascade(1000, step, opt, seed);
  std::printf("%zu stored labels, theta_alpha = %.2f\n", tree.size(), params.malthusian());

  for (std::size_t k = 1; k <= 2; ++k) {
    const auto [b, e] = tree.generation_range(k);
    std::printf("generation %zu: %zu labels, largest", k, e - b);
    for (std::size_t i = b; i < std::min(e, b + 5); ++i)
      std::printf(" %s=%llu", tree.label(i).to_string().c_str(), static_cast<unsigned long long>(tree.node(i).value));
    std::printf("\n");
  }
  // Labels under t_min were not expanded; frozen_line lets them carry their
  // own value forward instead of silently dropping their subtrees.
  for (std::size_t k = 0; k <= opt.max_generation; ++k)
    std::printf("W_%zu = %.4f\n", k, malthusian_martingale(tree, params, k, MartingaleMode::frozen_line));
}
