#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "json.hpp"
#include "pcascade/identities/estimate.hpp"

namespace pcascade {

enum class ToleranceRule {
  absolute,    // |lhs - rhs| <= tol
  relative,    // |lhs - rhs| <= tol |rhs|
  z_score,     // |lhs - rhs| <= tol sqrt(se_l^2 + se_r^2)
  tail_bound,  // |lhs - rhs| <= tol, tol = truncation bound of the oracle + slack
  band,        // |lhs - rhs| <= 3 sqrt(se_l^2 + se_r^2) + tol |rhs|
  at_most,     // lhs <= rhs + tol (trend checks)
};

inline std::string to_string(ToleranceRule r) {
  switch (r) {
    case ToleranceRule::absolute: return "absolute";
    case ToleranceRule::relative: return "relative";
    case ToleranceRule::z_score: return "z_score";
    case ToleranceRule::tail_bound: return "tail_bound";
    case ToleranceRule::band: return "band";
    case ToleranceRule::at_most: return "at_most";
  }
  return "unknown";
}

/// Verdict of `rule` at tolerance `tol` for the pair (lhs, rhs). NaN never passes.
inline bool apply_rule(ToleranceRule rule, double tol, const Estimate& lhs, const Estimate& rhs) {
  const double d = std::fabs(lhs.value - rhs.value);
  const double se = std::hypot(lhs.stderr_, rhs.stderr_);
  if (std::isnan(d)) return false;
  // An infinite side only matches the same infinity; scaled tolerances would
  // otherwise accept inf <= tol * inf.
  if (rule != ToleranceRule::at_most && (std::isinf(lhs.value) || std::isinf(rhs.value)))
    return lhs.value == rhs.value;
  switch (rule) {
    case ToleranceRule::absolute:
    case ToleranceRule::tail_bound: return d <= tol;
    case ToleranceRule::relative: return d <= tol * std::fabs(rhs.value);
    case ToleranceRule::z_score: return se > 0.0 ? d <= tol * se : d == 0.0;
    case ToleranceRule::band: return d <= 3.0 * se + tol * std::fabs(rhs.value);
    case ToleranceRule::at_most: return lhs.value <= rhs.value + tol;
  }
  return false;
}

struct VerificationReport {
  std::string identity;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  Estimate lhs;
  Estimate rhs;
  ToleranceRule rule = ToleranceRule::absolute;
  double tolerance = 0.0;
  bool pass = false;
  std::uint64_t seed = 0;
  double elapsed_ms = 0.0;
  std::string note;

  /// The verdict recomputed from (lhs, rhs, rule); `pass` must always equal it.
  bool consistent() const { return pass == apply_rule(rule, tolerance, lhs, rhs); }

  /// Signed discrepancy in the units of the rule (relative gap, z-score, ...).
  double discrepancy() const {
    const double d = lhs.value - rhs.value;
    switch (rule) {
      case ToleranceRule::relative:
      case ToleranceRule::band: return rhs.value != 0.0 ? d / std::fabs(rhs.value) : d;
      case ToleranceRule::z_score: {
        const double se = std::hypot(lhs.stderr_, rhs.stderr_);
        return se > 0.0 ? d / se : (d == 0.0 ? 0.0 : INFINITY);
      }
      default: return d;
    }
  }
};

inline VerificationReport make_report(std::string identity, nlohmann::ordered_json params, Estimate lhs, Estimate rhs,
                                      ToleranceRule rule, double tolerance, std::uint64_t seed = 0) {
  VerificationReport r;
  r.identity = std::move(identity);
  r.params = std::move(params);
  r.lhs = lhs;
  r.rhs = rhs;
  r.rule = rule;
  r.tolerance = tolerance;
  r.seed = seed;
  r.pass = apply_rule(rule, tolerance, lhs, rhs);
  return r;
}

inline bool all_pass(const std::vector<VerificationReport>& reports) {
  return std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.pass; });
}

// JSON keeps non-finite numbers as strings so that output stays valid JSON.
inline nlohmann::ordered_json json_number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

inline nlohmann::ordered_json to_json(const Estimate& e) {
  nlohmann::ordered_json j;
  j["value"] = json_number(e.value);
  j["stderr"] = json_number(e.stderr_);
  j["method"] = to_string(e.method);
  j["replicates"] = e.replicates;
  if (e.is_mc()) j["seed"] = e.seed;
  return j;
}

inline nlohmann::ordered_json to_json(const VerificationReport& r, bool with_elapsed = true) {
  nlohmann::ordered_json j;
  j["identity"] = r.identity;
  j["params"] = r.params;
  j["lhs"] = to_json(r.lhs);
  j["rhs"] = to_json(r.rhs);
  j["rule"] = to_string(r.rule);
  j["tolerance"] = json_number(r.tolerance);
  j["discrepancy"] = json_number(r.discrepancy());
  j["verdict"] = r.pass ? "pass" : "fail";
  j["seed"] = r.seed;
  if (!r.note.empty()) j["note"] = r.note;
  if (with_elapsed) j["elapsed_ms"] = r.elapsed_ms;
  return j;
}

inline nlohmann::ordered_json to_json(const std::vector<VerificationReport>& reports, bool with_elapsed = true) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& r : reports) j.push_back(to_json(r, with_elapsed));
  return j;
}

/// One CSV row per report (header from csv_header()).
inline std::string csv_header() { return "identity,params,lhs,lhs_stderr,lhs_method,replicates,rhs,rule,tolerance,verdict,seed"; }

inline std::string to_csv_row(const VerificationReport& r) {
  std::string params = r.params.dump();
  std::string quoted = "\"";
  for (char c : params) quoted += (c == '"') ? std::string("\"\"") : std::string(1, c);
  quoted += '"';
  auto num = [](double v) { return json_number(v).dump(); };
  return r.identity + "," + quoted + "," + num(r.lhs.value) + "," + num(r.lhs.stderr_) + "," +
         to_string(r.lhs.method) + "," + std::to_string(r.lhs.replicates) + "," + num(r.rhs.value) + "," +
         to_string(r.rule) + "," + num(r.tolerance) + "," + (r.pass ? "pass" : "fail") + "," + std::to_string(r.seed);
}

}  // namespace pcascade
