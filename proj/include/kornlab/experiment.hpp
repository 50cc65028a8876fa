#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kornlab/korn.hpp"
#include "kornlab/nonlocal.hpp"
#include "kornlab/report.hpp"

namespace kornlab::experiment {

using report::json;

// Configuration problems are distinct from computational failures: a bad
// field name or a malformed budget never starts any computation.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string command;
  json params = json::object();
  std::uint64_t seed = 1;
  int threads = 1;
};

struct RunArtifacts {
  json report;
  std::vector<std::pair<std::string, report::CsvTable>> tables;
};

namespace detail {

// Typed accessors over the raw params object; unknown fields and type
// mismatches surface as usage errors naming the offending field.
class Params {
 public:
  Params(const json& p, std::vector<std::string> allowed) : p_(p) {
    if (!p.is_object())
      throw UsageError("config: params must be a JSON object");
    for (auto it = p.begin(); it != p.end(); ++it) {
      bool known = false;
      for (const auto& k : allowed)
        if (it.key() == k) {
          known = true;
          break;
        }
      if (!known)
        throw UsageError("config: unknown field '" + it.key() + "'");
    }
  }

  Params(const json& p, std::initializer_list<const char*> allowed)
      : Params(p, std::vector<std::string>(allowed.begin(), allowed.end())) {}

  double number(const char* key, double fallback) const {
    if (!p_.contains(key)) return fallback;
    const json& v = p_.at(key);
    if (!v.is_number())
      throw UsageError(field(key) + " must be a number");
    return v.get<double>();
  }

  std::uint64_t count(const char* key, std::uint64_t fallback) const {
    if (!p_.contains(key)) return fallback;
    const json& v = p_.at(key);
    double d = v.is_number() ? v.get<double>() : -1.0;
    if (!(d >= 1.0) || d != std::floor(d) || d > 9e15)
      throw UsageError(field(key) + " must be a positive integer");
    return std::uint64_t(d);
  }

  std::uint64_t nonneg(const char* key, std::uint64_t fallback) const {
    if (!p_.contains(key)) return fallback;
    const json& v = p_.at(key);
    double d = v.is_number() ? v.get<double>() : -1.0;
    if (!(d >= 0.0) || d != std::floor(d) || d > 9e15)
      throw UsageError(field(key) + " must be a nonnegative integer");
    return std::uint64_t(d);
  }

  int small_count(const char* key, int fallback) const {
    std::uint64_t v = count(key, std::uint64_t(fallback));
    if (v > 1000000)
      throw UsageError(field(key) + " is out of range");
    return int(v);
  }

  std::string str(const char* key, std::string fallback) const {
    if (!p_.contains(key)) return fallback;
    const json& v = p_.at(key);
    if (!v.is_string())
      throw UsageError(field(key) + " must be a string");
    return v.get<std::string>();
  }

  bool flag(const char* key, bool fallback) const {
    if (!p_.contains(key)) return fallback;
    const json& v = p_.at(key);
    if (!v.is_boolean())
      throw UsageError(field(key) + " must be a boolean");
    return v.get<bool>();
  }

  std::vector<double> numbers(const char* key,
                              std::vector<double> fallback) const {
    if (!p_.contains(key)) return fallback;
    const json& v = p_.at(key);
    if (!v.is_array() || v.empty())
      throw UsageError(field(key) + " must be a non-empty array of numbers");
    std::vector<double> out;
    for (const auto& item : v) {
      if (!item.is_number())
        throw UsageError(field(key) + " must contain only numbers");
      out.push_back(item.get<double>());
    }
    return out;
  }

  Vec<2> point(const char* key, Vec<2> fallback) const {
    if (!p_.contains(key)) return fallback;
    auto v = numbers(key, {});
    if (v.size() != 2)
      throw UsageError(field(key) + " must be an array of two numbers");
    return {v[0], v[1]};
  }

 private:
  static std::string field(const char* key) {
    return std::string("config: field '") + key + "'";
  }

  const json& p_;
};

inline json est_json(const quadrature::Estimate& e) {
  return json{{"value", e.value}, {"std_error", e.std_error}};
}

inline Box<2> square_box(double halfwidth) {
  if (!(halfwidth > 0.0))
    throw UsageError("config: field 'box_halfwidth' must be positive");
  Box<2> b;
  b.lo = {-halfwidth, -halfwidth};
  b.hi = {halfwidth, halfwidth};
  return b;
}

inline geometry::EpigraphDomain<2> domain_from(const Params& P) {
  std::string kind = P.str("profile_kind", "sine");
  double a = P.number("profile_a", 0.3);
  double b = P.number("profile_b", 1.0);
  return geometry::EpigraphDomain<2>{geometry::make_profile<1>(kind, a, b)};
}

inline json run_seminorm(const ExperimentConfig& cfg) {
  Params P(cfg.params,
           {"field", "s", "p", "radius", "center", "pair_budget",
            "lp_budget"});
  seminorms::SeminormParams prm{P.number("s", 0.4), P.number("p", 2.0)};
  prm.validate();
  double radius = P.number("radius", 1.0);
  if (!(radius > 0.0))
    throw UsageError("config: field 'radius' must be positive");
  auto u = fields::make_field<2>(P.str("field", "bump"), cfg.seed);
  auto region =
      quadrature::ball_region<2>({P.point("center", {0.0, 0.0}), radius});
  auto plan = quadrature::make_pair_plan(region.diameter,
                                         P.count("pair_budget", 200000));
  auto xw = seminorms::xw_seminorms_p<2>(
      u, region, prm, plan, seminorms::label_seed(cfg.seed, "cli/seminorm"),
      cfg.threads);
  auto lp = seminorms::lp_norm_p<2>(
      u, region, prm.p, P.count("lp_budget", 100000),
      seminorms::label_seed(cfg.seed, "cli/seminorm-lp"), cfg.threads);

  json results;
  results["x_p"] = est_json(xw[0]);
  results["w_p"] = est_json(xw[1]);
  results["lp_p"] = est_json(lp);
  results["x_norm"] = seminorms::norm_from_powers(xw[0].value, lp.value, prm.p);
  results["w_norm"] = seminorms::norm_from_powers(xw[1].value, lp.value, prm.p);
  results["domination_ratio"] =
      xw[1].value > 0.0 ? xw[0].value / xw[1].value : 0.0;
  results["degenerate"] = !(xw[1].value > 0.0);
  return results;
}

inline json run_korn(const ExperimentConfig& cfg,
                     std::vector<std::pair<std::string, report::CsvTable>>&
                         tables) {
  Params P(cfg.params, {"mode", "field", "s", "p", "pair_budget", "lp_budget",
                        "n_atoms", "n_restarts", "iters"});
  seminorms::SeminormParams prm{P.number("s", 0.4), P.number("p", 2.0)};
  std::string mode = P.str("mode", "ratio");

  json results;
  if (mode == "ratio") {
    auto u = fields::make_field<2>(P.str("field", "two_bumps"), cfg.seed);
    auto region = quadrature::ball_region<2>({{0.0, 0.0}, 1.0});
    auto rep = korn::korn_ratio<2>(
        u, region, prm, P.count("pair_budget", 120000),
        P.count("lp_budget", 80000),
        seminorms::label_seed(cfg.seed, "cli/korn"), cfg.threads);
    results["x_p"] = est_json(rep.x_p);
    results["w_p"] = est_json(rep.w_p);
    results["lp_p"] = est_json(rep.lp_p);
    results["ratio"] = rep.ratio;
  } else if (mode == "search") {
    auto rep = korn::max_ratio_search<2>(
        prm, P.count("pair_budget", 30000), P.count("lp_budget", 20000),
        cfg.seed, P.small_count("n_atoms", 2), P.small_count("n_restarts", 3),
        P.small_count("iters", 100), cfg.threads);
    results["best_ratio"] = rep.best_ratio;
    results["n_evals"] = rep.n_evals;

    report::CsvTable trace;
    trace.header = {"eval", "best_ratio"};
    for (std::size_t i = 0; i < rep.trace.size(); ++i)
      trace.add_row({std::to_string(i), report::canonical_float(rep.trace[i])});
    tables.emplace_back("trace", std::move(trace));
  } else {
    throw UsageError("config: field 'mode' must be 'ratio' or 'search'");
  }
  return results;
}

inline json run_extend_check(const ExperimentConfig& cfg) {
  Params P(cfg.params,
           {"profile_kind", "profile_a", "profile_b", "lambda", "mu", "s", "p",
            "pair_budget", "lp_budget"});
  auto dom = domain_from(P);
  auto c = extension::solve_reflection_constants(P.number("lambda", 1.0),
                                                 P.number("mu", 2.0));
  seminorms::SeminormParams prm{P.number("s", 0.4), P.number("p", 2.0)};

  fields::BumpAtom<2> atom;
  atom.center = {0.0, 0.9};
  atom.radius = 0.45;
  atom.amp = {1.0, 0.4};
  atom.skew[0] = 0.6;
  auto u = fields::bump_field<2>("raised_bump", {atom});

  auto rep = extension::extension_bound_check<2>(
      u, dom, c, prm, P.count("pair_budget", 150000),
      P.count("lp_budget", 120000),
      seminorms::label_seed(cfg.seed, "cli/extend"), cfg.threads);

  json results;
  results["constants"] = {{"lambda", rep.constants.lambda},
                          {"mu", rep.constants.mu},
                          {"k", rep.constants.k},
                          {"l", rep.constants.l},
                          {"m", rep.constants.m},
                          {"n", rep.constants.n},
                          {"residual", rep.constants.residual()}};
  results["lipschitz"] = rep.lipschitz;
  results["lhs_x_p"] = est_json(rep.lhs_x_p);
  results["lhs_lp_p"] = est_json(rep.lhs_lp_p);
  results["rhs_x_p"] = est_json(rep.rhs_x_p);
  results["rhs_w_p"] = est_json(rep.rhs_w_p);
  results["rhs_lp_p"] = est_json(rep.rhs_lp_p);
  results["lhs_norm"] = rep.lhs_norm;
  results["rhs_norm"] = rep.rhs_norm;
  results["c_emp"] = rep.c_emp;
  return results;
}

inline json run_geom_check(const ExperimentConfig& cfg,
                           std::vector<std::pair<std::string,
                                                 report::CsvTable>>& tables) {
  Params P(cfg.params, {"m", "etas", "n_pairs", "grid_points"});
  double m = P.number("m", 0.59);
  if (!(m >= 0.0))
    throw UsageError("config: field 'm' must be nonnegative");
  if (m >= geometry::kMaxUniformLipschitz)
    throw HypothesisUnmet("geom check: Lipschitz bound must be below 3/5");

  auto etas = P.numbers("etas", {0.5, 1.0, 2.0});
  for (double eta : etas)
    if (!(eta > 0.0))
      throw UsageError("config: field 'etas' must contain positive values");

  geometry::EpigraphDomain<2> dom{geometry::tanh_profile<1>(m, 1.0)};
  geometry::EpigraphWindow<2> window{Box<1>{{-2.0}, {2.0}}, 2.0};
  std::uint64_t n_pairs = P.count("n_pairs", 100000);

  report::CsvTable tab;
  tab.header = {"eta", "c_eta", "violations", "worst_ratio",
                "hypothesis_margin"};
  json rows = json::array();
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < etas.size(); ++i) {
    double eta = etas[i];
    double c_eta = geometry::default_comparability_constant(eta);
    auto rep = geometry::geometric_inequality_check<2>(
        dom, eta, c_eta, window, n_pairs,
        seminorms::label_seed(cfg.seed + i, "cli/geom"), cfg.threads);
    total += rep.violations;
    json row;
    row["eta"] = eta;
    row["c_eta"] = rep.c_eta;
    row["violations"] = rep.violations;
    row["worst_ratio"] = rep.worst_ratio;
    row["hypothesis_ok"] = rep.hypothesis_ok;
    row["hypothesis_margin"] = rep.hypothesis_margin;
    rows.push_back(std::move(row));
    tab.add_row({report::canonical_float(eta),
                 report::canonical_float(rep.c_eta),
                 std::to_string(rep.violations),
                 report::canonical_float(rep.worst_ratio),
                 report::canonical_float(rep.hypothesis_margin)});
  }
  auto scan = geometry::comparability_grid_scan(P.small_count("grid_points",
                                                              100));
  json results;
  results["lipschitz"] = m;
  results["n_pairs"] = n_pairs;
  results["etas"] = rows;
  results["total_violations"] = total;
  results["scan"] = {{"min_margin", scan.min_margin},
                     {"min_expression", scan.min_expression},
                     {"n_grid", scan.n_grid}};
  tables.emplace_back("etas", std::move(tab));
  return results;
}

struct SolveSetup {
  nonlocal::NonlocalProblem<2> prob;
  nonlocal::Grid<2> grid;
  double tol = 1e-8;
  int max_iter = 3000;
};

inline std::vector<std::string> solve_keys(bool with_field_dump,
                                           bool with_ball) {
  std::vector<std::string> keys = {
      "p",          "s",     "n",   "box_halfwidth", "omega_radius",
      "coeff_kind", "coeff_lambda", "coeff_cell",    "coeff_seed",
      "force",      "tol",   "max_iter"};
  if (with_field_dump) keys.push_back("write_field");
  if (with_ball) {
    keys.push_back("ball_center");
    keys.push_back("ball_radius");
    keys.push_back("plateau");
  }
  return keys;
}

inline SolveSetup parse_solve(const Params& P, std::uint64_t seed) {
  SolveSetup s;
  s.prob.prm = {P.number("s", 0.4), P.number("p", 2.0)};
  s.prob.omega = {{0.0, 0.0}, P.number("omega_radius", 1.0)};
  std::string kind = P.str("coeff_kind", "checkerboard");
  if (kind == "constant") {
    s.prob.coeff.kind = nonlocal::Coefficient<2>::Kind::kConstant;
  } else if (kind == "checkerboard") {
    s.prob.coeff.kind = nonlocal::Coefficient<2>::Kind::kCheckerboard;
  } else if (kind == "seeded-random") {
    s.prob.coeff.kind = nonlocal::Coefficient<2>::Kind::kSeededRandom;
  } else {
    throw UsageError(
        "config: field 'coeff_kind' must be 'constant', 'checkerboard', or "
        "'seeded-random'");
  }
  s.prob.coeff.lam = P.number("coeff_lambda", 2.0);
  s.prob.coeff.cell = P.number("coeff_cell", 0.25);
  s.prob.coeff.seed = P.nonneg("coeff_seed", 0);
  s.prob.force = fields::make_field<2>(P.str("force", "bump"), seed);
  s.grid = {square_box(P.number("box_halfwidth", 1.5)),
            P.small_count("n", 23)};
  s.tol = P.number("tol", 1e-8);
  s.max_iter = P.small_count("max_iter", 3000);
  return s;
}

inline json solve_summary(const nonlocal::SolveReport& rep,
                          const nonlocal::DiscreteField<2>& df) {
  double worst = 0.0;
  json residuals = json::array(), scales = json::array();
  for (std::size_t k = 0; k < rep.residual_panel.size(); ++k) {
    residuals.push_back(rep.residual_panel[k]);
    scales.push_back(rep.residual_scales[k]);
    if (rep.residual_scales[k] > 0.0)
      worst = std::max(worst, std::abs(rep.residual_panel[k]) /
                                  rep.residual_scales[k]);
  }
  json out;
  out["iterations"] = rep.iterations;
  out["converged"] = rep.converged;
  out["final_energy"] = rep.final_energy;
  out["grad_norm"] = rep.grad_norm_trace.back();
  out["n_free"] = df.n_free;
  out["panel_residuals"] = residuals;
  out["panel_scales"] = scales;
  out["max_scaled_residual"] = worst;
  return out;
}

inline json run_solve(const ExperimentConfig& cfg,
                      std::vector<std::pair<std::string, report::CsvTable>>&
                          tables) {
  Params P(cfg.params, solve_keys(true, false));
  auto setup = parse_solve(P, cfg.seed);
  auto [df, rep] = nonlocal::solve<2>(setup.prob, setup.grid, setup.tol,
                                      setup.max_iter, cfg.seed, cfg.threads);
  json results = solve_summary(rep, df);

  report::CsvTable trace;
  trace.header = {"iteration", "energy", "grad_norm"};
  for (std::size_t k = 0; k < rep.energy_trace.size(); ++k)
    trace.add_row({std::to_string(k),
                   report::canonical_float(rep.energy_trace[k]),
                   report::canonical_float(rep.grad_norm_trace[k])});
  tables.emplace_back("trace", std::move(trace));

  if (P.flag("write_field", false)) {
    report::CsvTable field;
    field.header = {"flat", "x0", "x1", "free", "u0", "u1"};
    for (std::uint64_t i = 0; i < df.grid.total(); ++i) {
      Vec<2> x = df.grid.node(i);
      field.add_row({std::to_string(i), report::canonical_float(x[0]),
                     report::canonical_float(x[1]),
                     df.is_free[i] ? "1" : "0",
                     report::canonical_float(df.values[i][0]),
                     report::canonical_float(df.values[i][1])});
    }
    tables.emplace_back("field", std::move(field));
  }
  return results;
}

inline json run_caccioppoli(const ExperimentConfig& cfg) {
  Params P(cfg.params, solve_keys(false, true));
  auto setup = parse_solve(P, cfg.seed);
  double plateau = P.number("plateau", 0.25);
  if (!(plateau > 0.0) || !(plateau < 1.0))
    throw UsageError("config: field 'plateau' must lie in (0, 1)");
  geometry::BallDomain<2> ball{P.point("ball_center", {0.0, 0.0}),
                               P.number("ball_radius", 0.6)};
  if (!(ball.radius > 0.0))
    throw UsageError("config: field 'ball_radius' must be positive");

  auto [df, rep] = nonlocal::solve<2>(setup.prob, setup.grid, setup.tol,
                                      setup.max_iter, cfg.seed, cfg.threads);
  auto cc = nonlocal::caccioppoli_check<2>(df, setup.prob, ball,
                                           {ball, plateau});
  json results;
  results["solver"] = {{"converged", rep.converged},
                       {"iterations", rep.iterations},
                       {"final_energy", rep.final_energy}};
  results["radius"] = cc.radius;
  results["lhs"] = cc.lhs;
  results["rhs_mass"] = cc.rhs_mass;
  results["rhs_tail"] = cc.rhs_tail;
  results["rhs_force"] = cc.rhs_force;
  results["ratio"] = cc.ratio;
  results["degenerate"] = cc.degenerate;
  results["nodes_in_ball"] = cc.nodes_in_ball;
  return results;
}

inline json run_dual_pair(const ExperimentConfig& cfg,
                          std::vector<std::pair<std::string,
                                                report::CsvTable>>& tables) {
  Params P(cfg.params,
           {"field", "s", "p", "eps", "deltas", "radius", "pair_budget"});
  seminorms::SeminormParams prm{P.number("s", 0.4), P.number("p", 2.0)};
  double radius = P.number("radius", 1.0);
  if (!(radius > 0.0))
    throw UsageError("config: field 'radius' must be positive");
  auto u = fields::make_field<2>(P.str("field", "bump"), cfg.seed);

  auto rep = nonlocal::dual_pair_diagnostic<2>(
      u, {{0.0, 0.0}, radius}, prm, P.number("eps", 0.3),
      P.numbers("deltas", {0.0, 0.05, 0.1, 0.2}),
      P.count("pair_budget", 60000),
      seminorms::label_seed(cfg.seed, "cli/dual"), cfg.threads);

  report::CsvTable tab;
  tab.header = {"delta", "value", "std_error", "value_doubled", "stable"};
  json rows = json::array();
  for (const auto& row : rep.rows) {
    json jr;
    jr["delta"] = row.delta;
    jr["value"] = row.value;
    jr["std_error"] = row.std_error;
    jr["value_doubled"] = row.value_doubled;
    jr["stable"] = row.stable;
    rows.push_back(std::move(jr));
    tab.add_row({report::canonical_float(row.delta),
                 report::canonical_float(row.value),
                 report::canonical_float(row.std_error),
                 report::canonical_float(row.value_doubled),
                 row.stable ? "true" : "false"});
  }
  tables.emplace_back("table", std::move(tab));

  json results;
  results["eps"] = rep.eps;
  results["rows"] = rows;
  results["largest_stable_delta"] = rep.largest_stable_delta;
  results["any_stable"] = rep.any_stable;
  return results;
}

inline json run_jbound(const ExperimentConfig& cfg,
                       std::vector<std::pair<std::string,
                                             report::CsvTable>>& tables) {
  Params P(cfg.params, {"profile_kind", "profile_a", "profile_b", "s", "p",
                        "foot", "distances", "budget_per_point"});
  auto dom = domain_from(P);
  seminorms::SeminormParams prm{P.number("s", 0.4), P.number("p", 2.0)};

  auto rep = korn::j_bound_check<2>(
      dom, prm, Vec<1>{P.number("foot", 0.15)},
      P.numbers("distances", {1e-1, 1e-2, 1e-3}),
      P.count("budget_per_point", 400000),
      seminorms::label_seed(cfg.seed, "cli/jbound"), cfg.threads);

  report::CsvTable tab;
  tab.header = {"distance", "value", "std_error"};
  json rows = json::array();
  for (const auto& row : rep.rows) {
    json jr;
    jr["distance"] = row.distance;
    jr["value"] = row.value;
    jr["std_error"] = row.std_error;
    rows.push_back(std::move(jr));
    tab.add_row({report::canonical_float(row.distance),
                 report::canonical_float(row.value),
                 report::canonical_float(row.std_error)});
  }
  tables.emplace_back("points", std::move(tab));

  json results;
  results["rows"] = rows;
  results["slope"] = rep.slope;
  results["expected_slope"] = rep.expected_slope;
  results["slope_gap"] = std::abs(rep.slope - rep.expected_slope);
  return results;
}

}  // namespace detail

inline std::vector<std::string> command_names() {
  return {"seminorm",    "korn",      "extend-check", "geom-check",
          "solve",       "caccioppoli", "dual-pair",  "jbound"};
}

// Runs one experiment end to end and returns the report envelope plus CSV
// sidecars.  Throws UsageError or DegenerateParameters for configuration
// problems, HypothesisUnmet when the requested regime is out of scope, and
// other exceptions for computational failures; the caller maps these to
// exit codes.
inline RunArtifacts run(const ExperimentConfig& cfg) {
  if (cfg.threads < 1)
    throw UsageError("config: thread count must be at least 1");
  RunArtifacts out;
  json results;
  if (cfg.command == "seminorm") {
    results = detail::run_seminorm(cfg);
  } else if (cfg.command == "korn") {
    results = detail::run_korn(cfg, out.tables);
  } else if (cfg.command == "extend-check") {
    results = detail::run_extend_check(cfg);
  } else if (cfg.command == "geom-check") {
    results = detail::run_geom_check(cfg, out.tables);
  } else if (cfg.command == "solve") {
    results = detail::run_solve(cfg, out.tables);
  } else if (cfg.command == "caccioppoli") {
    results = detail::run_caccioppoli(cfg);
  } else if (cfg.command == "dual-pair") {
    results = detail::run_dual_pair(cfg, out.tables);
  } else if (cfg.command == "jbound") {
    results = detail::run_jbound(cfg, out.tables);
  } else {
    throw UsageError("config: unknown command '" + cfg.command + "'");
  }
  out.report = report::make_report(cfg.command, cfg.params, cfg.seed,
                                   cfg.threads, results);
  return out;
}

}  // namespace kornlab::experiment
