#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace pcascade {

/// Multiset of positive jump sizes (X_i + 1 for X_i >= 0), stored as
/// (value, multiplicity) runs in strictly decreasing order of value.
///
/// A walk to level -p at p = 10^4 has millions of jumps but only a few
/// thousand distinct values, so the run-length form is what gets passed around.
class JumpMultiset {
 public:
  using Run = std::pair<std::uint64_t, std::uint64_t>;  // value, count

  JumpMultiset() = default;

  /// From runs in any order (merged and sorted here).
  static JumpMultiset from_runs(std::vector<Run> runs) {
    std::sort(runs.begin(), runs.end(), [](const Run& a, const Run& b) { return a.first > b.first; });
    JumpMultiset m;
    for (const auto& r : runs) {
      if (r.second == 0 || r.first == 0) continue;
      if (!m.runs_.empty() && m.runs_.back().first == r.first)
        m.runs_.back().second += r.second;
      else
        m.runs_.push_back(r);
    }
    return m;
  }

  static JumpMultiset from_values(std::vector<std::uint64_t> values) {
    std::vector<Run> runs;
    runs.reserve(values.size());
    for (auto v : values) runs.emplace_back(v, 1);
    return from_runs(std::move(runs));
  }

  const std::vector<Run>& runs() const { return runs_; }
  bool empty() const { return runs_.empty(); }

  std::uint64_t size() const {
    std::uint64_t n = 0;
    for (const auto& r : runs_) n += r.second;
    return n;
  }

  std::uint64_t largest() const { return runs_.empty() ? 0 : runs_.front().first; }

  /// Sum of all values (total positive displacement minus the number of jumps).
  long double total() const {
    long double s = 0;
    for (const auto& r : runs_) s += static_cast<long double>(r.first) * r.second;
    return s;
  }

  /// sum over jumps of (value / scale)^theta, smallest terms first for accuracy.
  double power_sum(double theta, double scale) const {
    long double s = 0;
    for (auto it = runs_.rbegin(); it != runs_.rend(); ++it)
      s += static_cast<long double>(it->second) * std::pow(static_cast<double>(it->first) / scale, theta);
    return static_cast<double>(s);
  }

  std::uint64_t count_at_least(std::uint64_t t) const {
    std::uint64_t n = 0;
    for (const auto& r : runs_) {
      if (r.first < t) break;
      n += r.second;
    }
    return n;
  }

  /// Values >= t, expanded, in non-increasing order.
  std::vector<std::uint64_t> values_at_least(std::uint64_t t) const {
    std::vector<std::uint64_t> out;
    for (const auto& r : runs_) {
      if (r.first < t) break;
      out.insert(out.end(), r.second, r.first);
    }
    return out;
  }

  /// Runs with value < t.
  JumpMultiset below(std::uint64_t t) const {
    JumpMultiset m;
    for (const auto& r : runs_)
      if (r.first < t) m.runs_.push_back(r);
    return m;
  }

  friend bool operator==(const JumpMultiset&, const JumpMultiset&) = default;

 private:
  std::vector<Run> runs_;
};

/// Accumulates jumps: a dense histogram for small values, a list for the rest.
class JumpMultisetBuilder {
 public:
  explicit JumpMultisetBuilder(std::size_t dense_limit = 64) : hist_(dense_limit + 1, 0) {}

  void add(std::uint64_t value, std::uint64_t count = 1) {
    if (value == 0 || count == 0) return;
    if (value < hist_.size())
      hist_[value] += count;
    else if (count == 1)
      large_.push_back(value);
    else
      large_.insert(large_.end(), count, value);
  }

  JumpMultiset build() const {
    std::vector<JumpMultiset::Run> runs;
    runs.reserve(hist_.size() + large_.size());
    for (std::size_t v = 1; v < hist_.size(); ++v)
      if (hist_[v]) runs.emplace_back(v, hist_[v]);
    for (auto v : large_) runs.emplace_back(v, 1);
    return JumpMultiset::from_runs(std::move(runs));
  }

  void clear() {
    std::fill(hist_.begin(), hist_.end(), 0);
    large_.clear();
  }

 private:
  std::vector<std::uint64_t> hist_;
  std::vector<std::uint64_t> large_;
};

}  // namespace pcascade
