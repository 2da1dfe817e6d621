#pragma once

#include <cstdint>
#include <vector>

#include "pcascade/error.hpp"
#include "pcascade/walk/run.hpp"

namespace pcascade {

/// p rooted plane trees, each as its out-degree sequence in depth-first order.
struct ForestShape {
  std::vector<std::vector<std::uint64_t>> trees;

  std::uint64_t vertex_count() const {
    std::uint64_t n = 0;
    for (const auto& t : trees) n += t.size();
    return n;
  }

  std::uint64_t leaf_count() const {
    std::uint64_t n = 0;
    for (const auto& t : trees)
      for (auto d : t) n += (d == 0);
    return n;
  }
};

/// Cuts the step sequence at the successive first passages to -1, -2, ..., -p;
/// inside each piece the i-th vertex in depth-first order has X_i + 1 children.
inline ForestShape lukasiewicz_decode(const std::vector<std::int64_t>& steps, std::uint64_t p) {
  ForestShape f;
  f.trees.reserve(p);
  std::int64_t s = 0, floor = 0;
  std::vector<std::uint64_t> current;
  for (std::int64_t x : steps) {
    if (x < -1) throw DomainError("lukasiewicz_decode: step below -1");
    current.push_back(static_cast<std::uint64_t>(x + 1));
    s += x;
    if (s < floor) {  // skip-free, so s == floor - 1: the current tree is complete
      floor = s;
      f.trees.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty() || f.trees.size() != p)
    throw DomainError("lukasiewicz_decode: the steps do not end at the first passage to -p");
  return f;
}

inline ForestShape lukasiewicz_decode(const WalkRun& run) {
  if (run.truncated) throw DomainError("lukasiewicz_decode: truncated run");
  if (run.steps.size() != run.T) throw DomainError("lukasiewicz_decode: run was sampled without its step record");
  return lukasiewicz_decode(run.steps, run.p);
}

inline std::vector<std::int64_t> lukasiewicz_encode(const ForestShape& f) {
  std::vector<std::int64_t> steps;
  steps.reserve(f.vertex_count());
  for (const auto& t : f.trees)
    for (auto d : t) steps.push_back(static_cast<std::int64_t>(d) - 1);
  return steps;
}

}  // namespace pcascade
