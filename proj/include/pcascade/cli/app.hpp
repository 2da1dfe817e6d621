#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pcascade/analytic.hpp"
#include "pcascade/cascade.hpp"
#include "pcascade/cli/grid.hpp"
#include "pcascade/identities.hpp"

namespace pcascade::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitUsage = 2;

inline constexpr const char* kCriticalMessage =
    "alpha = 3/2 is refused for simulation: it is \"the critical case \xCE\xB1 = 3/2\xE2\x80\x94which we do not "
    "consider\". Closed forms can still be tabulated there with the table subcommand.";

enum class Format { json, csv };

struct RunConfig {
  std::string subcommand;  // verify | sample | table
  std::string target;      // suite, sample kind or function name

  std::optional<double> alpha;
  std::optional<double> n_loop;
  std::optional<std::string> phase;
  std::optional<std::string> theta;  // a number, or a grid for table
  std::optional<std::string> x;
  std::optional<std::string> lambda;
  std::optional<std::uint64_t> p;
  std::optional<std::uint64_t> generations;
  std::optional<std::uint64_t> replicates;
  std::optional<std::uint64_t> t_min;
  std::uint64_t seed = 1;
  std::optional<unsigned> workers;
  std::string out;
  std::optional<std::string> format;
  std::optional<std::string> law;
  std::optional<std::string> method;

  SuiteOptions suite_options() const { return {seed, workers.value_or(0)}; }
};

namespace detail {

/// Simulation parameters from --alpha or --n/--phase; nullopt if neither is given.
inline std::optional<CascadeParameters> resolve_params(const RunConfig& c, bool tabulation) {
  if (c.alpha && c.n_loop) throw DomainError("give either --alpha or --n with --phase, not both");
  if (c.phase && !c.n_loop) throw DomainError("--phase only makes sense together with --n");
  if (c.alpha) {
    if (*c.alpha == 1.5 && !tabulation) throw DomainError(kCriticalMessage);
    return tabulation ? CascadeParameters::for_tabulation(*c.alpha) : CascadeParameters::from_alpha(*c.alpha);
  }
  if (c.n_loop) {
    if (!c.phase) throw DomainError("--n needs --phase dense|dilute to pick the branch");
    return CascadeParameters::from_loop_weight(*c.n_loop, parse_phase(*c.phase));
  }
  return std::nullopt;
}

inline CascadeParameters need_params(const RunConfig& c, bool tabulation = false) {
  auto params = resolve_params(c, tabulation);
  if (!params)
    throw DomainError(c.subcommand + " " + c.target + " needs --alpha, or --n with --phase");
  return *params;
}

inline double need_theta(const RunConfig& c) {
  if (!c.theta) throw DomainError(c.subcommand + " " + c.target + " needs --theta");
  return parse_real(*c.theta, "--theta");
}

inline Format output_format(const RunConfig& c, Format fallback) {
  if (!c.format) return fallback;
  if (*c.format == "json") return Format::json;
  if (*c.format == "csv") return Format::csv;
  throw DomainError("--format must be json or csv, got '" + *c.format + "'");
}

inline StepLaw named_law(const std::string& name) {
  if (name == "descent") return StepLaw::descent();
  for (auto& l : finite_battery())
    if (l.name == name) return l.step;
  throw DomainError("unknown --law '" + name + "' (known: pm1, lazy, subcritical, descent)");
}

// Stream tags for the sample subcommand, disjoint from the suites' tags.
inline constexpr std::uint64_t kTagSampleChildren = 101;
inline constexpr std::uint64_t kTagSampleWalk = 102;
inline constexpr std::uint64_t kTagSampleCascade = 103;

}  // namespace detail

// ---------------------------------------------------------------------------
// verify

inline std::vector<VerificationReport> run_suite(const RunConfig& c) {
  const SuiteOptions so = c.suite_options();
  const std::string& s = c.target;
  if (s == "kemperman") return verify_kemperman(finite_battery());
  if (s == "rw-identity") {
    std::optional<HeavyRwOptions> heavy;
    if (c.alpha || c.n_loop) {
      const auto params = detail::need_params(c);
      HeavyRwOptions h;
      h.alpha_theta = {{params.alpha(), detail::need_theta(c)}};
      if (c.p) h.p = *c.p;
      if (c.replicates) h.replicates = *c.replicates;
      heavy = h;
    }
    return verify_rw_identity(finite_battery(), heavy, so);
  }
  if (s == "levy") {
    const auto params = detail::need_params(c);
    std::vector<std::uint64_t> grid = {1000, 10000};
    if (c.p) grid = {*c.p};
    return verify_levy_formula(params, detail::need_theta(c), grid, c.replicates.value_or(10'000), so);
  }
  if (s == "biggins") {
    const auto params = detail::need_params(c);
    BigginsMethod m = BigginsMethod::conditional;
    if (c.method) {
      if (*c.method == "sampler")
        m = BigginsMethod::sampler;
      else if (*c.method != "conditional")
        throw DomainError("--method must be conditional or sampler");
    }
    return verify_biggins(params, detail::need_theta(c), c.p.value_or(10'000), c.generations.value_or(1),
                          c.replicates.value_or(10'000), so, m);
  }
  if (s == "fixed-point") {
    const auto params = detail::need_params(c);
    const double theta = c.theta ? detail::need_theta(c) : 1.0;
    std::vector<double> xs = {0.25, 0.5, 1.0};
    if (c.x) xs = parse_grid(*c.x, "--x");
    return verify_fixed_point_psi(params, theta, xs, c.replicates.value_or(2000), c.p.value_or(10'000), so);
  }
  if (s == "cumulant-root") {
    const auto params = detail::need_params(c);
    std::vector<double> xs = {0.5, 1.0, 2.0};
    if (c.x) xs = parse_grid(*c.x, "--x");
    return verify_cumulant_root(params, xs);
  }
  if (s == "malthusian") {
    const auto params = detail::need_params(c);
    MalthusianOptions mo;
    if (c.p) mo.p = *c.p;
    if (c.generations) mo.depth = *c.generations;
    if (c.replicates) mo.trees = *c.replicates;
    if (c.t_min) mo.t_min = *c.t_min;
    if (c.x) mo.x_grid = parse_grid(*c.x, "--x");
    return verify_malthusian_law(params, mo, so);
  }
  if (s == "tail-index") {
    const auto params = detail::need_params(c);
    return verify_tail_index(params, detail::need_theta(c), c.replicates.value_or(100'000), c.p.value_or(1000), so);
  }
  if (s == "nesting") {
    if (!c.n_loop) throw DomainError("verify nesting needs --n");
    if (c.alpha) throw DomainError("verify nesting takes --n, not --alpha");
    std::vector<double> xs;
    if (c.x) xs = parse_grid(*c.x, "--x");
    return verify_nesting_duality(*c.n_loop, xs);
  }
  if (s == "special-functions") {
    if (c.alpha || c.n_loop) return verify_special_functions({detail::need_params(c).alpha()});
    return verify_special_functions();
  }
  if (s == "structural") {
    StructuralOptions st;
    if (c.replicates) st.trees = *c.replicates;
    if (c.p) st.tree_p = *c.p;
    if (c.generations) st.tree_depth = *c.generations;
    return verify_structural(st, so);
  }
  if (s == "linf") {
    const auto params = detail::need_params(c);
    LinfOptions lo;
    if (c.p) lo.p = *c.p;
    if (c.replicates) lo.trees = *c.replicates;
    if (c.generations) lo.k_max = *c.generations;
    if (c.t_min) lo.t_min = *c.t_min;
    return verify_linf_diagnostic(params, lo, so);
  }
  throw DomainError("unknown suite '" + s +
                    "' (known: kemperman, rw-identity, levy, biggins, fixed-point, cumulant-root, malthusian, "
                    "tail-index, nesting, special-functions, structural, linf)");
}

inline void write_reports(std::ostream& os, const std::vector<VerificationReport>& reports, Format f) {
  if (f == Format::json) {
    os << to_json(reports).dump(2) << '\n';
    return;
  }
  os << csv_header() << '\n';
  for (const auto& r : reports) os << to_csv_row(r) << '\n';
}

// ---------------------------------------------------------------------------
// sample

inline void sample_children_cmd(const RunConfig& c, std::ostream& os, Format f) {
  const auto params = detail::need_params(c);
  const StepLaw step(OffspringLaw::stable_default(params.alpha()));
  const std::uint64_t p = c.p.value_or(1000);
  const std::uint64_t seed = derive_seed(c.seed, detail::kTagSampleChildren);
  const auto draws = parallel_map<ChildSample>(c.replicates.value_or(1), 
                                               c.workers.value_or(default_workers()),
                                               [&](std::size_t i) {
                                                 Rng g = derive_stream(seed, i);
                                                 return sample_children(p, step, g);
                                               });
  if (f == Format::json) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < draws.size(); ++i) {
      const auto& d = draws[i];
      // Run-length pairs [value, count]: a draw at p = 1e4 has ~1e7 children,
      // nearly all equal to 1.
      nlohmann::ordered_json values = nlohmann::ordered_json::array();
      for (const auto& [v, n] : d.children.runs()) values.push_back({v, n});
      arr.push_back({{"replicate", i}, {"p", p}, {"T", d.T}, {"L", d.L}, {"attempts", d.attempts},
                     {"children", std::move(values)}});
    }
    os << arr.dump() << '\n';
    return;
  }
  os << "replicate,p,T,L,attempts,children\n";
  for (std::size_t i = 0; i < draws.size(); ++i) {
    const auto& d = draws[i];
    os << i << ',' << p << ',' << d.T << ',' << d.L << ',' << d.attempts << ',';
    bool first = true;
    for (const auto& [v, n] : d.children.runs()) {
      os << (first ? "" : " ") << v;
      if (n > 1) os << '*' << n;
      first = false;
    }
    os << '\n';
  }
}

inline void sample_walk_cmd(const RunConfig& c, std::ostream& os, Format f) {
  std::optional<StepLaw> step;
  std::string law_name;
  if (c.law) {
    if (c.alpha || c.n_loop) throw DomainError("sample walk takes either --law or --alpha/--n, not both");
    step = detail::named_law(*c.law);
    law_name = *c.law;
  } else {
    const auto params = detail::need_params(c);
    step = StepLaw(OffspringLaw::stable_default(params.alpha()));
    law_name = "stable_" + std::to_string(params.alpha());
  }
  const std::uint64_t p = c.p.value_or(10);
  const std::uint64_t seed = derive_seed(c.seed, detail::kTagSampleWalk);
  const bool heavy = !step->finite_support();
  const auto runs = parallel_map<WalkRun>(c.replicates.value_or(1), c.workers.value_or(default_workers()),
                                          [&](std::size_t i) {
                                            Rng g = derive_stream(seed, i);
                                            // Heavy-tailed walks go generation by generation; same law for
                                            // (T_p, L_p, jumps), far fewer random draws.
                                            if (heavy) return sample_forest(step->offspring(), p, g).run;
                                            return run_to_hitting(*step, p, g);
                                          });
  if (f == Format::json) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const auto& r = runs[i];
      arr.push_back({{"replicate", i}, {"law", law_name}, {"p", p}, {"T", r.T}, {"L", r.L},
                     {"jumps", r.jumps.size()}, {"largest_jump", r.jumps.empty() ? 0 : r.jumps.largest()},
                     {"truncated", r.truncated}});
    }
    os << arr.dump(2) << '\n';
    return;
  }
  os << "replicate,law,p,T,L,jumps,largest_jump,truncated\n";
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& r = runs[i];
    os << i << ',' << law_name << ',' << p << ',' << r.T << ',' << r.L << ',' << r.jumps.size() << ','
       << (r.jumps.empty() ? 0 : r.jumps.largest()) << ',' << (r.truncated ? "true" : "false") << '\n';
  }
}

inline void sample_cascade_cmd(const RunConfig& c, std::ostream& os, Format f) {
  const auto params = detail::need_params(c);
  const StepLaw step(OffspringLaw::stable_default(params.alpha()));
  GrowOptions go;
  go.max_generation = c.generations.value_or(3);
  if (c.t_min) go.t_min = *c.t_min;
  const std::uint64_t p = c.p.value_or(1000);
  const std::uint64_t seed = derive_seed(c.seed, detail::kTagSampleCascade);
  const auto trees = parallel_map<CascadeTree>(c.replicates.value_or(1), c.workers.value_or(default_workers()),
                                               [&](std::size_t i) { return grow_cascade(p, step, go, derive_seed(seed, i)); });
  if (f == Format::json) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < trees.size(); ++i) {
      const auto& t = trees[i];
      nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
      for (std::size_t j = 0; j < t.size(); ++j) nodes.push_back({t.label(j).to_string(), t.node(j).value});
      arr.push_back({{"replicate", i}, {"p", p}, {"max_generation", go.max_generation}, {"t_min", go.t_min},
                     {"nodes", std::move(nodes)}});
    }
    os << arr.dump() << '\n';
    return;
  }
  os << "replicate,label,value\n";
  for (std::size_t i = 0; i < trees.size(); ++i)
    for (std::size_t j = 0; j < trees[i].size(); ++j)
      os << i << ',' << trees[i].label(j).to_string() << ',' << trees[i].node(j).value << '\n';
}

// ---------------------------------------------------------------------------
// table

struct TableRow {
  double input;
  double value;  // +inf where the function is infinite
};

inline std::vector<TableRow> tabulate(const RunConfig& c) {
  auto grid_of = [&](const std::optional<std::string>& g, const char* flag) {
    if (!g) throw DomainError("table " + c.target + " needs the grid " + flag + " start:stop:step");
    return parse_grid(*g, flag);
  };
  std::vector<TableRow> rows;
  auto fill = [&](const std::vector<double>& xs, const std::function<double(double)>& fn) {
    for (double x : xs) rows.push_back({x, fn(x)});
  };
  const std::string& fn = c.target;
  if (fn == "biggins") {
    const auto params = detail::need_params(c, true);
    fill(grid_of(c.theta, "--theta"), [&](double t) { return biggins_transform(params, t).to_double(); });
  } else if (fn == "rate") {
    const auto params = detail::need_params(c, true);
    fill(grid_of(c.x, "--x"), [&](double x) { return rate_function(params, x); });
  } else if (fn == "psi") {
    const auto params = detail::need_params(c, true);
    const double theta = c.theta ? detail::need_theta(c) : params.malthusian();
    fill(grid_of(c.x, "--x"), [&](double x) { return psi(params, theta, x); });
  } else if (fn == "kappa") {
    const auto params = detail::need_params(c, true);
    fill(grid_of(c.lambda, "--lambda"), [&](double l) { return nesting_kappa(params, l).to_double(); });
  } else if (fn == "J") {
    if (!c.n_loop) throw DomainError("table J needs --n");
    const double n = *c.n_loop;
    fill(grid_of(c.x, "--x"), [&](double x) { return nesting_rate_J(n, x); });
  } else if (fn == "psi_kappa") {
    const auto params = detail::need_params(c, true);
    const double kappa = params.kappa_cle();
    fill(grid_of(c.theta, "--theta"), [&](double t) { return cle_psi_kappa(kappa, t); });
  } else {
    throw DomainError("unknown function '" + fn + "' (known: biggins, rate, psi, kappa, J, psi_kappa)");
  }
  return rows;
}

inline void write_table(std::ostream& os, const RunConfig& c, const std::vector<TableRow>& rows, Format f) {
  if (f == Format::json) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) arr.push_back({json_number(r.input), json_number(r.value)});
    nlohmann::ordered_json doc{{"function", c.target}, {"rows", std::move(arr)}};
    os << doc.dump(2) << '\n';
    return;
  }
  os << "input,value\n";
  os.precision(17);
  for (const auto& r : rows) os << r.input << ',' << r.value << '\n';
}

// ---------------------------------------------------------------------------

/// Runs one command line. Data goes to `out` (or the --out file), diagnostics
/// to `err`. Returns 0 if everything passed, 1 if a verification failed and
/// 2 for invalid input.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  RunConfig c;
  CLI::App app{"Perimeter cascades on random planar maps: verification suites, samplers and tables.", "pcascade"};
  app.set_config("--config", "", "File of key=value lines; command-line flags take precedence");
  app.require_subcommand(1, 1);
  app.add_option("--alpha", c.alpha, "Stable index alpha in (1,2)");
  app.add_option("--n", c.n_loop, "Loop weight n in (0,2), with --phase");
  app.add_option("--phase", c.phase, "dense or dilute");
  app.add_option("--theta", c.theta, "Exponent theta (a start:stop:step grid for table)");
  app.add_option("--x", c.x, "Evaluation point(s), number or start:stop:step");
  app.add_option("--lambda", c.lambda, "Grid for table kappa");
  app.add_option("--p", c.p, "Base half-perimeter");
  app.add_option("--generations", c.generations, "Generations (k, tree depth)");
  app.add_option("--replicates", c.replicates, "Replicates, samples or trees");
  app.add_option("--tmin", c.t_min, "Cascade truncation: labels below are not expanded");
  app.add_option("--seed", c.seed, "Master seed");
  app.add_option("--workers", c.workers, std::string("Worker threads (default: $") + kWorkersEnv + ")");
  app.add_option("--out", c.out, "Output file (default: stdout)");
  app.add_option("--format", c.format, "json or csv");
  app.add_option("--law", c.law, "Finite step law for sample walk: pm1, lazy, subcritical, descent");
  app.add_option("--method", c.method, "biggins estimator: conditional or sampler");

  auto* verify = app.add_subcommand("verify", "Run a verification suite");
  verify->add_option("suite", c.target, "Suite name")->required();
  auto* sample = app.add_subcommand("sample", "Sample cascades, first generations or walks");
  sample->add_option("what", c.target, "cascade, children or walk")->required();
  auto* table = app.add_subcommand("table", "Tabulate a closed-form function on a grid");
  table->add_option("function", c.target, "biggins, rate, psi, kappa, J or psi_kappa")->required();
  for (auto* s : {verify, sample, table}) s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  c.subcommand = app.get_subcommands().front()->get_name();

  try {
    if (c.replicates && *c.replicates < 1) throw DomainError("--replicates must be at least 1");
    if (c.workers && *c.workers < 1) throw DomainError("--workers must be at least 1");
    if (c.p && *c.p < 1) throw DomainError("--p must be at least 1");

    std::ostringstream buf;
    int code = kExitOk;
    if (c.subcommand == "verify") {
      const auto reports = run_suite(c);
      write_reports(buf, reports, detail::output_format(c, Format::json));
      std::size_t failed = 0;
      for (const auto& r : reports) failed += !r.pass;
      err << "verify " << c.target << ": " << reports.size() - failed << " of " << reports.size() << " passed\n";
      code = failed ? kExitFailed : kExitOk;
    } else if (c.subcommand == "sample") {
      if (c.method) throw DomainError("--method applies to verify biggins only");
      const Format f = detail::output_format(c, Format::json);
      if (c.target == "children")
        sample_children_cmd(c, buf, f);
      else if (c.target == "walk")
        sample_walk_cmd(c, buf, f);
      else if (c.target == "cascade")
        sample_cascade_cmd(c, buf, f);
      else
        throw DomainError("unknown sample kind '" + c.target + "' (known: cascade, children, walk)");
    } else {
      write_table(buf, c, tabulate(c), detail::output_format(c, Format::csv));
    }

    if (c.out.empty()) {
      out << buf.str();
    } else {
      std::ofstream f(c.out, std::ios::binary);
      if (!f) throw DomainError("cannot open --out file '" + c.out + "'");
      f << buf.str();
    }
    return code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace pcascade::cli
