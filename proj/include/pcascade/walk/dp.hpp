#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "pcascade/error.hpp"
#include "pcascade/walk/step_law.hpp"

namespace pcascade {

using StepFunction = std::function<double(std::int64_t)>;

struct KempermanRow {
  std::uint64_t n;
  double lhs;  // P(T_p = n), first-passage DP with an absorbing barrier at -p
  double rhs;  // (p/n) P(S_n = -p), free convolution DP
};

namespace detail {

inline std::vector<double> step_probs(const StepLaw& step) {
  const std::int64_t M = step.max_step();
  std::vector<double> pr(static_cast<std::size_t>(M + 2));
  for (std::int64_t x = -1; x <= M; ++x) pr[static_cast<std::size_t>(x + 1)] = step.prob(x);
  return pr;
}

}  // namespace detail

/// Both sides of Kemperman's formula for n = 1..n_max.
inline std::vector<KempermanRow> kemperman_table(const StepLaw& step, std::uint64_t p, std::uint64_t n_max) {
  if (p == 0) throw DomainError("kemperman: p must be positive");
  const auto pr = detail::step_probs(step);
  const std::int64_t M = static_cast<std::int64_t>(pr.size()) - 2;
  const std::int64_t P = static_cast<std::int64_t>(p);
  const std::int64_t N = static_cast<std::int64_t>(n_max);

  // Level s lives at index s + offset; both DPs share the range [-N, M N].
  const std::int64_t offset = N;
  const std::size_t width = static_cast<std::size_t>((M + 1) * N + 1);
  std::vector<double> alive(width, 0.0), free(width, 0.0), next(width);
  alive[offset] = 1.0;
  free[offset] = 1.0;

  std::vector<KempermanRow> rows;
  rows.reserve(n_max);
  for (std::int64_t n = 1; n <= N; ++n) {
    KempermanRow row{static_cast<std::uint64_t>(n), 0.0, 0.0};
    // Barrier DP: the walk is alive on s > -p; absorption only from s = -p + 1 by a -1 step.
    if (P - 1 <= N) row.lhs = alive[offset - P + 1] * pr[0];
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < width; ++i) {
      const double m = alive[i];
      if (m == 0.0) continue;
      for (std::int64_t x = -1; x <= M; ++x) {
        const std::int64_t j = static_cast<std::int64_t>(i) + x;
        if (j - offset <= -P || j < 0 || j >= static_cast<std::int64_t>(width)) continue;
        next[static_cast<std::size_t>(j)] += m * pr[static_cast<std::size_t>(x + 1)];
      }
    }
    alive.swap(next);

    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < width; ++i) {
      const double m = free[i];
      if (m == 0.0) continue;
      for (std::int64_t x = -1; x <= M; ++x) {
        const std::int64_t j = static_cast<std::int64_t>(i) + x;
        if (j < 0 || j >= static_cast<std::int64_t>(width)) continue;
        next[static_cast<std::size_t>(j)] += m * pr[static_cast<std::size_t>(x + 1)];
      }
    }
    free.swap(next);
    if (P <= N) row.rhs = static_cast<double>(P) / static_cast<double>(n) * free[offset - P];
    rows.push_back(row);
  }
  return rows;
}

inline KempermanRow kemperman_check(const StepLaw& step, std::uint64_t p, std::uint64_t n) {
  if (n == 0) throw DomainError("kemperman: n must be positive");
  return kemperman_table(step, p, n).back();
}

struct OracleValue {
  double value;
  double tail_bound;      // 2 max|f| P(T_p > N_max)
  double survival;        // P(T_p > N_max)
};

/// E[(1/(T_p - 1)) sum_{i <= T_p} f(X_i)] for several f at once, by forward DP on
///   u(n, s) = P(T_p > n, S_n = s),  v(n, s) = E[sum_{i<=n} f(X_i); T_p > n, S_n = s],
/// adding the absorbed contribution A_n / (n - 1) at each n <= N_max.
/// Levels from which -p is out of reach within N_max steps are dropped.
inline std::vector<OracleValue> rw_identity_lhs_oracle(const StepLaw& step, const std::vector<StepFunction>& fs,
                                                       std::uint64_t p, std::uint64_t n_max) {
  if (p < 2) throw DomainError("rw_identity_lhs_oracle: p must be at least 2");
  if (n_max < p) throw DomainError("rw_identity_lhs_oracle: N_max must be at least p");
  const auto pr = detail::step_probs(step);
  const std::int64_t M = static_cast<std::int64_t>(pr.size()) - 2;
  const std::int64_t P = static_cast<std::int64_t>(p);
  const std::int64_t N = static_cast<std::int64_t>(n_max);
  const std::size_t nf = fs.size();

  // fx[k][x+1] = f_k(x); fmax[k] = max |f_k| on the support.
  std::vector<std::vector<double>> fx(nf, std::vector<double>(pr.size()));
  std::vector<double> fmax(nf, 0.0);
  for (std::size_t k = 0; k < nf; ++k)
    for (std::int64_t x = -1; x <= M; ++x) {
      const double v = fs[k](x);
      fx[k][static_cast<std::size_t>(x + 1)] = v;
      if (pr[static_cast<std::size_t>(x + 1)] > 0.0) fmax[k] = std::max(fmax[k], std::fabs(v));
    }

  // Index i = s + p - 1 >= 0 (alive levels are s >= -p + 1).
  const std::size_t cap = static_cast<std::size_t>(N) + 1;
  std::vector<double> u(cap, 0.0), un(cap, 0.0);
  std::vector<std::vector<double>> v(nf, std::vector<double>(cap, 0.0)), vn = v;
  u[static_cast<std::size_t>(P - 1)] = 1.0;
  std::int64_t hi = P - 1;  // highest index that may be non-zero

  std::vector<long double> acc(nf, 0.0L);
  long double absorbed = 0.0L;

  for (std::int64_t n = 1; n <= N; ++n) {
    // Absorption at step n: from s = -p + 1 (index 0) with a -1 step.
    const double a = u[0] * pr[0];
    absorbed += a;
    if (n >= 2)
      for (std::size_t k = 0; k < nf; ++k)
        acc[k] += static_cast<long double>((v[k][0] + u[0] * fx[k][0]) * pr[0]) / static_cast<long double>(n - 1);

    // After step n the walk needs at least s + p more steps, so s + p <= N - n, i.e. index <= N - n - 1.
    const std::int64_t new_hi = std::min(hi + M, N - n - 1);
    if (new_hi < 0) break;
    // un[j] = sum_x pr[x] u[j - x], one contiguous shifted axpy per step value.
    const auto top = static_cast<std::size_t>(std::max(new_hi, hi)) + 1;
    std::fill(un.begin(), un.begin() + static_cast<std::ptrdiff_t>(top), 0.0);
    for (std::size_t k = 0; k < nf; ++k) std::fill(vn[k].begin(), vn[k].begin() + static_cast<std::ptrdiff_t>(top), 0.0);
    for (std::int64_t x = -1; x <= M; ++x) {
      const auto xi = static_cast<std::size_t>(x + 1);
      const double px = pr[xi];
      if (px == 0.0) continue;
      // j = i + x with 0 <= i <= hi and 0 <= j <= new_hi
      const std::int64_t j0 = std::max<std::int64_t>(0, x), j1 = std::min(new_hi, hi + x);
      if (j0 > j1) continue;
      const double* us = u.data() + (j0 - x);
      double* ud = un.data() + j0;
      const std::size_t len = static_cast<std::size_t>(j1 - j0 + 1);
      for (std::size_t t = 0; t < len; ++t) ud[t] += px * us[t];
      for (std::size_t k = 0; k < nf; ++k) {
        const double* vs = v[k].data() + (j0 - x);
        double* vd = vn[k].data() + j0;
        const double fpx = fx[k][xi] * px;
        for (std::size_t t = 0; t < len; ++t) vd[t] += px * vs[t] + fpx * us[t];
      }
    }
    u.swap(un);
    for (std::size_t k = 0; k < nf; ++k) v[k].swap(vn[k]);
    hi = new_hi;
    // Drop the top levels once their mass is negligible (and would soon be
    // denormal, which is slow). Dropped paths count as never absorbed, so they
    // stay inside the survival term of the tail bound.
    while (hi > 0 && u[static_cast<std::size_t>(hi)] < 1e-250) {
      bool tiny = true;
      for (std::size_t k = 0; k < nf; ++k) tiny = tiny && std::fabs(v[k][static_cast<std::size_t>(hi)]) < 1e-200;
      if (!tiny) break;
      u[static_cast<std::size_t>(hi)] = 0.0;
      for (std::size_t k = 0; k < nf; ++k) v[k][static_cast<std::size_t>(hi)] = 0.0;
      --hi;
    }
  }

  const double survival = std::max(0.0, static_cast<double>(1.0L - absorbed));
  std::vector<OracleValue> out(nf);
  for (std::size_t k = 0; k < nf; ++k) out[k] = {static_cast<double>(acc[k]), 2.0 * fmax[k] * survival, survival};
  return out;
}

inline OracleValue rw_identity_lhs_oracle(const StepLaw& step, const StepFunction& f, std::uint64_t p,
                                          std::uint64_t n_max) {
  return rw_identity_lhs_oracle(step, std::vector<StepFunction>{f}, p, n_max).front();
}

/// E[f(X_1) p / (p + X_1)]. Heavy-tailed laws: tabulated part summed exactly,
/// the part beyond the table approximated with f frozen at the table edge.
inline double rw_identity_rhs(const StepLaw& step, const StepFunction& f, std::uint64_t p) {
  if (p < 1) throw DomainError("rw_identity_rhs: p must be positive");
  const auto& law = step.offspring();
  const double P = static_cast<double>(p);
  long double sum = 0.0L;
  const auto& tab = law.table();
  for (std::size_t k = 0; k < tab.size(); ++k) {
    if (tab[k] == 0.0) continue;
    const std::int64_t x = static_cast<std::int64_t>(k) - 1;
    sum += static_cast<long double>(tab[k]) * f(x) * (P / (P + static_cast<double>(x)));
  }
  if (law.has_tail()) {
    const std::int64_t x_edge = static_cast<std::int64_t>(tab.size()) - 1;
    sum += static_cast<long double>(law.tail_mass()) * f(x_edge) * (P / (P + static_cast<double>(x_edge)));
  }
  return static_cast<double>(sum);
}

}  // namespace pcascade
