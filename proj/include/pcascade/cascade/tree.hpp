#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "pcascade/cascade/children.hpp"
#include "pcascade/cascade/ulam.hpp"
#include "pcascade/error.hpp"
#include "pcascade/rng.hpp"
#include "pcascade/walk/step_law.hpp"

namespace pcascade {

struct GrowOptions {
  std::size_t max_generation = 0;
  // Labels with value < t_min are stored but get no children.
  std::uint64_t t_min = 2;
  // Children with value < store_min are not given a node of their own; each
  // parent keeps them as a run-length multiset ("leftover" children). They are
  // never expanded, so store_min <= t_min is required.
  std::uint64_t store_min = 1;
  std::size_t max_nodes = 5'000'000;
  ChildSamplerOptions sampler{};
};

/// Prefix of the Ulam tree labelled by half-perimeters, stored breadth first.
///
/// The children of a label are drawn from an RNG stream keyed by the label
/// itself (a hash chain from the master seed), so a label's value does not
/// depend on which other labels were expanded. Growing the same seed with a
/// different t_min reproduces every label whose ancestors were expanded in both.
class CascadeTree {
 public:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  struct Node {
    std::uint64_t value = 0;
    std::size_t parent = npos;
    std::uint64_t rank = 0;  // 1-based position among its siblings; 0 for the root
    std::size_t generation = 0;
    std::size_t first_child = 0;
    std::size_t child_count = 0;  // explicit children only
    bool expanded = false;
  };

  std::uint64_t p() const { return nodes_.front().value; }
  std::size_t max_generation() const { return opt_.max_generation; }
  std::uint64_t t_min() const { return opt_.t_min; }
  std::uint64_t store_min() const { return opt_.store_min; }
  const GrowOptions& options() const { return opt_; }

  std::size_t size() const { return nodes_.size(); }
  const Node& node(std::size_t i) const { return nodes_.at(i); }
  const std::vector<Node>& nodes() const { return nodes_; }
  const JumpMultiset& leftover(std::size_t i) const { return leftover_.at(i); }

  /// Index range [begin, end) of the explicit nodes of generation k.
  std::pair<std::size_t, std::size_t> generation_range(std::size_t k) const {
    if (k + 1 >= gen_start_.size()) return {nodes_.size(), nodes_.size()};
    return {gen_start_[k], gen_start_[k + 1]};
  }

  /// Deepest generation holding at least one label (explicit or leftover).
  std::size_t depth() const {
    std::size_t d = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      d = std::max(d, nodes_[i].generation);
      if (!leftover_[i].empty()) d = std::max(d, nodes_[i].generation + 1);
    }
    return d;
  }

  UlamLabel label(std::size_t i) const {
    std::vector<std::uint64_t> e;
    for (std::size_t j = i; nodes_.at(j).parent != npos; j = nodes_[j].parent) e.push_back(nodes_[j].rank);
    std::reverse(e.begin(), e.end());
    return UlamLabel(std::move(e));
  }

  /// Index of an explicit node, if the label is stored as one.
  std::optional<std::size_t> find(const UlamLabel& u) const {
    std::size_t i = 0;
    for (auto r : u.entries()) {
      const Node& n = nodes_[i];
      if (r > n.child_count) return std::nullopt;
      i = n.first_child + (r - 1);
    }
    return i;
  }

  /// chi(u), for explicit and leftover labels alike.
  std::optional<std::uint64_t> value(const UlamLabel& u) const {
    if (u.is_root()) return p();
    const auto parent = find(u.parent());
    if (!parent) return std::nullopt;
    const Node& n = nodes_[*parent];
    const std::uint64_t r = u.entries().back();
    if (r <= n.child_count) return nodes_[n.first_child + (r - 1)].value;
    std::uint64_t rank = n.child_count;
    for (const auto& [v, c] : leftover_[*parent].runs()) {
      if (r <= rank + c) return v;
      rank += c;
    }
    return std::nullopt;
  }

  /// sum over labels u with |u| = k of (chi(u)/p)^theta.
  double generation_power_sum(std::size_t k, double theta) const {
    const double P = static_cast<double>(p());
    long double s = 0.0L;
    const auto [b, e] = generation_range(k);
    for (std::size_t i = b; i < e; ++i) s += std::pow(static_cast<double>(nodes_[i].value) / P, theta);
    if (k > 0) {
      const auto [pb, pe] = generation_range(k - 1);
      for (std::size_t i = pb; i < pe; ++i) s += leftover_[i].power_sum(theta, P);
    }
    return static_cast<double>(s);
  }

  /// sum over labels u with |u| < k that have no children in the tree although
  /// the cascade would give them some, of (chi(u)/p)^theta * phi^{-|u|}.
  double frozen_power_sum(std::size_t k, double theta, double phi) const {
    const double P = static_cast<double>(p());
    long double s = 0.0L;
    for (std::size_t i = 0; i < nodes_.size() && nodes_[i].generation < k; ++i) {
      const Node& n = nodes_[i];
      const long double w = std::pow(phi, -static_cast<double>(n.generation));
      if (!n.expanded) s += w * std::pow(static_cast<double>(n.value) / P, theta);
      if (n.generation + 1 < k && !leftover_[i].empty())
        s += w / phi * leftover_[i].power_sum(theta, P);
    }
    return static_cast<double>(s);
  }

  /// max over stored labels with |u| > k of chi(u)/p (0 if there are none).
  double max_label_beyond(std::size_t k) const {
    std::uint64_t m = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (nodes_[i].generation > k) m = std::max(m, nodes_[i].value);
      if (nodes_[i].generation + 1 > k) m = std::max(m, leftover_[i].largest());
    }
    return static_cast<double>(m) / static_cast<double>(p());
  }

  /// Whether every label of generation < k was expanded, i.e. generation k is complete.
  bool complete_through(std::size_t k) const {
    if (k > opt_.max_generation) return false;
    for (const auto& n : nodes_)
      if (n.generation < k && !n.expanded) return false;
    return true;
  }

  /// Structural problems, empty when the tree is well formed.
  std::vector<std::string> invariant_violations() const {
    std::vector<std::string> bad;
    auto fail = [&](std::size_t i, const std::string& what) {
      if (bad.size() < 32) bad.push_back("label " + label(i).to_string() + ": " + what);
    };
    if (nodes_.empty()) return {"tree has no root"};
    if (nodes_[0].parent != npos || nodes_[0].generation != 0 || nodes_[0].rank != 0)
      bad.push_back("root is not stored first");
    if (opt_.store_min > opt_.t_min) bad.push_back("store_min exceeds t_min");
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const Node& n = nodes_[i];
      if (n.value == 0) fail(i, "zero value");
      if (i > 0) {
        if (n.parent >= i) {
          fail(i, "parent stored after the child");
          continue;
        }
        const Node& par = nodes_[n.parent];
        if (n.generation != par.generation + 1) fail(i, "generation is not parent + 1");
        if (!par.expanded) fail(i, "parent was never expanded");
        if (n.rank < 1 || n.rank > par.child_count || par.first_child + n.rank - 1 != i) fail(i, "rank mismatch");
        if (n.value < opt_.store_min) fail(i, "explicit node below store_min");
      }
      const bool should_expand = n.value >= opt_.t_min && n.generation < opt_.max_generation;
      if (n.expanded != should_expand) fail(i, "expansion flag disagrees with t_min / max_generation");
      if (!n.expanded && (n.child_count || !leftover_[i].empty())) fail(i, "children under an unexpanded label");
      for (std::size_t c = 1; c < n.child_count; ++c)
        if (nodes_[n.first_child + c].value > nodes_[n.first_child + c - 1].value) fail(i, "children not non-increasing");
      if (!leftover_[i].empty()) {
        if (leftover_[i].largest() >= opt_.store_min) fail(i, "leftover child at or above store_min");
        if (n.child_count && leftover_[i].largest() > nodes_[n.first_child + n.child_count - 1].value)
          fail(i, "leftover child larger than an explicit sibling");
      }
    }
    return bad;
  }

  bool valid() const { return invariant_violations().empty(); }

  /// Line format: "label value" for explicit labels in breadth-first order,
  /// children in non-increasing order, root as ".". Leftover children follow
  /// their parent's line as "# rest <parent> from <rank>: v*c v*c ...".
  void write(std::ostream& os) const {
    os << "# cascade p=" << p() << " max_generation=" << opt_.max_generation << " t_min=" << opt_.t_min
       << " store_min=" << opt_.store_min << '\n';
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const auto lab = label(i).to_string();
      os << lab << ' ' << nodes_[i].value << '\n';
      if (!leftover_[i].empty()) {
        os << "# rest " << lab << " from " << nodes_[i].child_count + 1 << ':';
        for (const auto& [v, c] : leftover_[i].runs()) os << ' ' << v << '*' << c;
        os << '\n';
      }
    }
  }

  std::string to_string() const {
    std::ostringstream os;
    write(os);
    return os.str();
  }

  /// Inverse of write(). Needs the header line for the growth options.
  static CascadeTree read(std::istream& is) {
    CascadeTree t;
    std::string line;
    bool header = false;
    std::vector<std::pair<UlamLabel, std::uint64_t>> entries;
    std::vector<std::pair<UlamLabel, JumpMultiset>> rests;
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      std::istringstream ls(line);
      if (line[0] == '#') {
        std::string hash, kind;
        ls >> hash >> kind;
        if (kind == "cascade") {
          std::string kv;
          while (ls >> kv) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) continue;
            const auto key = kv.substr(0, eq);
            const auto val = std::stoull(kv.substr(eq + 1));
            if (key == "max_generation") t.opt_.max_generation = val;
            if (key == "t_min") t.opt_.t_min = val;
            if (key == "store_min") t.opt_.store_min = val;
          }
          header = true;
        } else if (kind == "rest") {
          std::string lab, from, rank;
          ls >> lab >> from >> rank;
          std::vector<JumpMultiset::Run> runs;
          std::string tok;
          while (ls >> tok) {
            const auto star = tok.find('*');
            if (star == std::string::npos) throw DomainError("cascade file: bad leftover run '" + tok + "'");
            runs.emplace_back(std::stoull(tok.substr(0, star)), std::stoull(tok.substr(star + 1)));
          }
          rests.emplace_back(UlamLabel::parse(lab), JumpMultiset::from_runs(std::move(runs)));
        }
        continue;
      }
      std::string lab;
      std::uint64_t v = 0;
      if (!(ls >> lab >> v)) throw DomainError("cascade file: bad line '" + line + "'");
      entries.emplace_back(UlamLabel::parse(lab), v);
    }
    if (!header) throw DomainError("cascade file: missing '# cascade' header");
    if (entries.empty() || !entries.front().first.is_root()) throw DomainError("cascade file: root line must come first");

    // Entries are breadth first with siblings consecutive, so children can be
    // attached by walking the parents in order.
    t.nodes_.reserve(entries.size());
    t.leftover_.assign(entries.size(), JumpMultiset{});
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const auto& [u, v] = entries[i];
      Node n;
      n.value = v;
      n.generation = u.generation();
      if (!u.is_root()) {
        const auto par = t.find(u.parent());
        if (!par) throw DomainError("cascade file: parent of " + u.to_string() + " missing or out of order");
        Node& pn = t.nodes_[*par];
        if (pn.child_count == 0) pn.first_child = i;
        if (u.entries().back() != pn.child_count + 1 || pn.first_child + pn.child_count != i)
          throw DomainError("cascade file: children of " + u.parent().to_string() + " not consecutive");
        ++pn.child_count;
        n.parent = *par;
        n.rank = u.entries().back();
      }
      n.expanded = v >= t.opt_.t_min && n.generation < t.opt_.max_generation;
      t.nodes_.push_back(n);
    }
    for (auto& [u, m] : rests) {
      const auto i = t.find(u);
      if (!i) throw DomainError("cascade file: leftover children of unknown label " + u.to_string());
      t.leftover_[*i] = std::move(m);
    }
    t.index_generations();
    return t;
  }

 private:
  friend CascadeTree grow_cascade(std::uint64_t, const StepLaw&, const GrowOptions&, std::uint64_t);

  void index_generations() {
    gen_start_.assign(1, 0);
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      while (gen_start_.size() <= nodes_[i].generation) gen_start_.push_back(i);
    gen_start_.push_back(nodes_.size());
  }

  GrowOptions opt_;
  std::vector<Node> nodes_;
  std::vector<JumpMultiset> leftover_;
  std::vector<std::size_t> gen_start_;  // gen_start_[k] = first index of generation k; last entry = size()
};

namespace detail {

inline std::uint64_t root_stream_key(std::uint64_t seed) { return splitmix64(seed ^ 0x5851f42d4c957f2dULL); }

inline std::uint64_t child_stream_key(std::uint64_t parent_key, std::uint64_t rank) {
  return splitmix64(parent_key + rank * 0x9e3779b97f4a7c15ULL);
}

}  // namespace detail

/// Breadth-first growth of the discrete cascade from a root of value p.
/// A label u with chi(u) >= t_min in a generation below max_generation gets
/// sample_children(chi(u)) as its children.
inline CascadeTree grow_cascade(std::uint64_t p, const StepLaw& step, const GrowOptions& opt, std::uint64_t seed) {
  if (p == 0) throw DomainError("grow_cascade: p must be positive");
  if (opt.t_min == 0) throw DomainError("grow_cascade: t_min must be at least 1");
  if (opt.store_min == 0 || opt.store_min > opt.t_min)
    throw DomainError("grow_cascade: store_min must lie in [1, t_min]");

  CascadeTree t;
  t.opt_ = opt;
  t.nodes_.push_back(CascadeTree::Node{p, CascadeTree::npos, 0, 0, 0, 0, false});
  t.leftover_.emplace_back();
  std::vector<std::uint64_t> keys{detail::root_stream_key(seed)};

  std::size_t gen_begin = 0;
  for (std::size_t gen = 0; gen < opt.max_generation; ++gen) {
    const std::size_t gen_end = t.nodes_.size();
    if (gen_begin == gen_end) break;
    for (std::size_t i = gen_begin; i < gen_end; ++i) {
      if (t.nodes_[i].value < opt.t_min) continue;
      Rng g(keys[i]);
      ChildSample cs = sample_children(t.nodes_[i].value, step, g, opt.sampler);

      const std::uint64_t n_explicit = cs.children.count_at_least(opt.store_min);
      if (t.nodes_.size() + n_explicit > opt.max_nodes)
        throw CascadeTooLarge(t.nodes_.size(), gen, gen_end - i);

      CascadeTree::Node& par = t.nodes_[i];
      par.expanded = true;
      par.first_child = t.nodes_.size();
      par.child_count = n_explicit;
      std::uint64_t rank = 0;
      for (const auto& [v, c] : cs.children.runs()) {
        if (v < opt.store_min) break;
        for (std::uint64_t j = 0; j < c; ++j) {
          ++rank;
          t.nodes_.push_back(CascadeTree::Node{v, i, rank, gen + 1, 0, 0, false});
          t.leftover_.emplace_back();
          keys.push_back(detail::child_stream_key(keys[i], rank));
        }
      }
      t.leftover_[i] = cs.children.below(opt.store_min);
    }
    gen_begin = gen_end;
  }
  t.index_generations();
  return t;
}

}  // namespace pcascade
