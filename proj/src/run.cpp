#include "dissip/run.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <ostream>

#include "dissip/criteria.hpp"
#include "dissip/fem.hpp"
#include "dissip/forms.hpp"
#include "dissip/lambda_profile.hpp"
#include "dissip/phi.hpp"
#include "dissip/test_fields.hpp"

namespace dissip {

namespace {

using json = nlohmann::json;

constexpr const char* kProv2d = "planar Lame criterion: sup Lambda^2 below 1 - sup ((lambda+mu)/(lambda+3mu))^2 "
                                "with BMO-small commutator weight mu^2/(lambda+3mu)";
constexpr const char* kProvNd = "constant-coefficient Lame sufficient condition in dimension N";
constexpr const char* kProvNec = "necessary algebraic condition for L^Phi dissipativity of constant systems";
constexpr const char* kProvForm = "integral L^Phi dissipativity form on a test-field ensemble (evidence, not proof)";
constexpr const char* kProvFem = "Q1 Galerkin solution of the Dirichlet problem for the Lame system";
constexpr const char* kProvReg = "weighted-energy regularity estimate (ratio boundedness, constant not estimated)";

json config_json(const RunConfig& c) {
  const auto& co = c.coefficients;
  json kappa = c.criteria.kappa ? json(*c.criteria.kappa) : json(nullptr);
  return {
      {"command", c.command},
      {"phi", {{"family", c.phi.family}, {"p", c.phi.p}, {"k", c.phi.k}}},
      {"coefficients",
       {{"source", co.source},
        {"lambda", co.lambda},
        {"mu", co.mu},
        {"preset", co.preset},
        {"amplitude", co.amplitude},
        {"block", co.block},
        {"n1", co.n1},
        {"n2", co.n2},
        {"file", co.file},
        {"domain", {co.domain.x0, co.domain.x1, co.domain.y0, co.domain.y1}}}},
      {"criteria", {{"c0", c.criteria.c0}, {"kappa", kappa}, {"dim", c.criteria.dim}}},
      {"p_sweep", {{"from", c.p_sweep.from}, {"to", c.p_sweep.to}, {"count", c.p_sweep.count}}},
      {"ensemble",
       {{"seed", c.ensemble.seed},
        {"bumps", c.ensemble.bumps},
        {"rotations", c.ensemble.rotations},
        {"oscillatory", c.ensemble.oscillatory},
        {"rho", c.ensemble.rho},
        {"kappa", c.ensemble.kappa},
        {"counterexample", c.ensemble.counterexample},
        {"max_octave", c.ensemble.max_octave}}},
      {"fem",
       {{"dim", c.fem.dim},
        {"cells", c.fem.cells},
        {"forcing", c.fem.forcing},
        {"amplitude", c.fem.amplitude},
        {"p", c.fem.p},
        {"levels", c.fem.levels},
        {"refinements", c.fem.refinements},
        {"scales", c.fem.scales}}},
      {"output", {{"report", c.output.report}, {"plot_dir", c.output.plot_dir}}},
  };
}

json verdict_json(const Verdict& v) {
  json out{{"status", to_string(v.status)},
           {"lambda_inf_sq", v.lambda_inf_sq},
           {"rhs", v.rhs},
           {"margin", v.margin},
           {"notes", v.notes}};
  if (v.bmo_value) out["bmo_value"] = *v.bmo_value;
  if (v.bmo_threshold) out["bmo_threshold"] = *v.bmo_threshold;
  if (v.kappa) out["kappa"] = *v.kappa;
  if (v.c0) out["c0"] = *v.c0;
  return out;
}

PhiSpec make_phi(const PhiConfig& c) {
  if (c.family == "exp_square") return PhiSpec::exp_square();
  if (c.family == "truncated_power") return PhiSpec::truncated_power(c.p, c.k);
  return PhiSpec::power(c.p);
}

CoefficientField make_field(const CoefficientConfig& c) {
  if (c.source == "file") return load_grid_file(c.file);
  if (c.source == "preset") {
    PresetSpec spec;
    spec.name = c.preset;
    spec.lambda = c.lambda;
    spec.mu = c.mu;
    spec.amplitude = c.amplitude;
    spec.block = c.block;
    spec.n1 = c.n1;
    spec.n2 = c.n2;
    spec.domain = c.domain;
    return make_preset(spec);
  }
  return CoefficientField::constant(c.lambda, c.mu, c.domain, std::max(9, std::max(c.n1, c.n2)));
}

class Session {
 public:
  explicit Session(const RunConfig& config) : config_(config) {
    if (!config.output.plot_dir.empty()) std::filesystem::create_directories(config.output.plot_dir);
  }

  void emit(const std::string& name, json body) {
    body["record"] = name;
    outcome_.records.push_back(body.dump());
  }

  void flag(const std::string& name, int code) {
    if (code > outcome_.exit_code) {
      outcome_.exit_code = code;
      outcome_.failing = name;
    }
  }

  /// Opens a plot file, or returns nullptr when plot output is disabled.
  std::unique_ptr<std::ofstream> plot(const std::string& file) {
    if (config_.output.plot_dir.empty()) return nullptr;
    auto out = std::make_unique<std::ofstream>(std::filesystem::path(config_.output.plot_dir) / file);
    out->precision(17);
    return out;
  }

  RunOutcome& outcome() { return outcome_; }

 private:
  const RunConfig& config_;
  RunOutcome outcome_;
};

json limit_json(const PhiSpec& phi, const LambdaLimit& lim) {
  return {{"phi", phi.name()},
          {"lambda_inf", lim.value},
          {"lambda_inf_sq", lim.value_sq()},
          {"sup_lambda_sq", lim.sup_sq},
          {"sup_below_one", lim.sup_below_one},
          {"sq_monotone", lim.sq_monotone},
          {"extended", lim.extended},
          {"tail_variation", lim.tail_variation}};
}

void validation_records(Session& s, const PhiSpec& phi) {
  const ValidationReport report = validate_phi(phi);
  json conditions = json::array();
  for (const auto& c : report.conditions) {
    conditions.push_back({{"name", c.name},
                          {"status", to_string(c.status)},
                          {"margin", c.margin},
                          {"worst_node", c.worst_node},
                          {"note", c.note}});
  }
  json body{{"phi", phi.name()},
            {"regular", report.regular()},
            {"monotone_elasticity", to_string(report.monotone_elasticity().status)},
            {"provenance", "regularity conditions on phi"}};
  body["conditions"] = conditions;
  s.emit("phi_validation", body);
}

void profile_plot(Session& s, const LambdaProfile& profile) {
  auto out = s.plot("lambda_profile.csv");
  if (!out) return;
  *out << "t,lambda,lambda_sq\n";
  for (const auto& [t, l] : profile.limit().samples) *out << t << ',' << l << ',' << l * l << '\n';
}

/// Lambda limit, verdicts and optional p sweep. Returns the primary verdict.
Verdict check_records(Session& s, const RunConfig& c) {
  const PhiSpec phi = make_phi(c.phi);
  const LambdaProfile profile(phi);
  const LambdaLimit& lim = profile.limit();
  s.emit("lambda_limit", limit_json(phi, lim));

  const CoefficientField field = make_field(c.coefficients);
  const Verdict v2 = lame2d_verdict(phi, field, c.criteria.c0, c.criteria.kappa);
  json body = verdict_json(v2);
  body["provenance"] = kProv2d;
  body["phi"] = phi.name();
  s.emit("verdict_2d", body);
  Verdict primary = v2;

  if (c.coefficients.source == "constant") {
    const Verdict vn = lameNd_sufficient(phi, c.coefficients.lambda, c.coefficients.mu);
    json nd = verdict_json(vn);
    nd["provenance"] = kProvNd;
    nd["dim"] = c.criteria.dim;
    nd["threshold"] = lameNd_threshold(c.coefficients.lambda, c.coefficients.mu);
    s.emit("verdict_nd", nd);
    if (c.criteria.dim >= 3) primary = vn;
  }

  if (c.p_sweep.count > 0) {
    auto out = s.plot("p_sweep.csv");
    if (out) *out << "p,lambda_inf_sq,rhs,margin,status\n";
    for (int i = 0; i < c.p_sweep.count; ++i) {
      const double p = c.p_sweep.count == 1
                           ? c.p_sweep.from
                           : c.p_sweep.from + (c.p_sweep.to - c.p_sweep.from) * i / (c.p_sweep.count - 1);
      const Verdict v = lame2d_verdict(PhiSpec::power(p), field, c.criteria.c0, c.criteria.kappa);
      s.emit("p_sweep", {{"p", p}, {"status", to_string(v.status)}, {"margin", v.margin},
                         {"lambda_inf_sq", v.lambda_inf_sq}, {"provenance", kProv2d}});
      if (out) *out << p << ',' << v.lambda_inf_sq << ',' << v.rhs << ',' << v.margin << ',' << to_string(v.status) << '\n';
    }
  }
  return primary;
}

void verdict_exit(Session& s, const Verdict& v, const std::string& name) {
  if (v.status == VerdictStatus::NotDissipative) s.flag(name, kExitNegative);
}

void cmd_check(Session& s, const RunConfig& c) {
  const Verdict v = check_records(s, c);
  verdict_exit(s, v, c.criteria.dim >= 3 && c.coefficients.source == "constant" ? "verdict_nd" : "verdict_2d");
}

void cmd_report(Session& s, const RunConfig& c) {
  const PhiSpec phi = make_phi(c.phi);
  validation_records(s, phi);
  profile_plot(s, LambdaProfile(phi));
  cmd_check(s, c);
}

void cmd_verify_forms(Session& s, const RunConfig& c) {
  const PhiSpec phi = make_phi(c.phi);
  const LambdaProfile profile(phi);
  const LambdaLimit& lim = profile.limit();
  validation_records(s, phi);
  s.emit("lambda_limit", limit_json(phi, lim));
  profile_plot(s, profile);

  const CoefficientField field = make_field(c.coefficients);
  const Verdict v = lame2d_verdict(phi, field, c.criteria.c0, c.criteria.kappa);
  json body = verdict_json(v);
  body["provenance"] = kProv2d;
  body["phi"] = phi.name();
  s.emit("verdict_2d", body);
  verdict_exit(s, v, "verdict_2d");

  if (c.coefficients.source == "constant" && !(std::abs(lim.value) < 1.0)) {
    s.emit("algebraic_condition", {{"lambda_inf", lim.value},
                                   {"holds", false},
                                   {"note", "|Lambda_inf| = 1: the probe form is evaluated only for |Lambda_inf| < 1"},
                                   {"provenance", kProvNec}});
  } else if (c.coefficients.source == "constant") {
    const AlgebraicResult alg =
        algebraic_margin(lame_system(c.coefficients.lambda, c.coefficients.mu), lim.value);
    s.emit("algebraic_condition", {{"lambda_inf", lim.value},
                                   {"min_value", alg.min_value},
                                   {"rounds", alg.rounds},
                                   {"holds", alg.min_value >= -1e-10},
                                   {"provenance", kProvNec}});
  }

  const FormOperator op = FormOperator::lame(field);
  EnsembleSpec spec;
  spec.seed = c.ensemble.seed;
  spec.bumps = c.ensemble.bumps;
  spec.rotations = c.ensemble.rotations;
  spec.oscillatory = c.ensemble.oscillatory;
  spec.rho = c.ensemble.rho;
  spec.domain = field.domain();
  const auto fields = standard_ensemble(spec);
  if (!fields.empty()) {
    const StrictMarginResult res = strict_margin(op, profile, fields, c.ensemble.kappa);
    s.emit("strict_margin", {{"kappa", res.kappa},
                             {"fields", static_cast<int>(res.fields.size())},
                             {"min_residual", res.min_residual},
                             {"worst_family", res.worst >= 0 ? res.fields[res.worst].family : ""},
                             {"worst_index", res.worst},
                             {"provenance", kProvForm}});
    if (auto out = s.plot("fields.csv")) write_field_csv(res, *out);
  }

  if (c.ensemble.counterexample) {
    CounterexampleOptions opts;
    opts.kappa = c.ensemble.kappa;
    opts.max_octave = c.ensemble.max_octave;
    const CounterexampleResult ce = hunt_counterexample(op, profile, field.domain(), opts);
    json sweep = json::array();
    for (const auto& [rho, r] : ce.sweep) sweep.push_back({rho, r});
    s.emit("counterexample", {{"found", ce.found},
                              {"rho", ce.rho},
                              {"residual", ce.residual},
                              {"probe_min", ce.probe.min_value},
                              {"sweep", sweep},
                              {"provenance", kProvForm}});
  }
}

FemProblem make_problem(const RunConfig& c, int cells, double scale) {
  FemProblem prob = FemProblem::unit_box(c.fem.dim, cells);
  prob.p = c.fem.p;
  prob.lambda = c.coefficients.lambda;
  prob.mu = c.coefficients.mu;
  if (c.fem.dim == 2 && c.coefficients.source != "constant") {
    prob.field = make_field(c.coefficients);
    const Rect& r = prob.field->domain();
    prob.domain = {Eigen::Vector2d(r.x0, r.y0), Eigen::Vector2d(r.x1, r.y1)};
  } else if (c.fem.dim == 2) {
    const Rect& r = c.coefficients.domain;
    prob.domain = {Eigen::Vector2d(r.x0, r.y0), Eigen::Vector2d(r.x1, r.y1)};
  }
  const double a = c.fem.amplitude * scale;
  if (c.fem.forcing == "smooth") {
    prob.forcing = smooth_forcing(c.fem.dim, a);
  } else if (c.fem.forcing == "manufactured") {
    prob.forcing = manufactured_forcing(prob.lambda, prob.mu, a);
  }
  return prob;
}

void cmd_solve(Session& s, const RunConfig& c) {
  const FemProblem prob = make_problem(c, c.fem.cells, 1.0);
  const FemSolution sol = assemble_and_solve(prob);
  const double identity_gap = std::abs(2.0 * sol.energy - sol.load);
  json body{{"dim", sol.dim},
            {"cells", sol.cells},
            {"energy", sol.energy},
            {"load", sol.load},
            {"iterations", sol.iterations},
            {"residual", sol.residual},
            {"max_abs_u", sol.u.rowwise().norm().maxCoeff()},
            {"zero_solution", sol.u.isZero(0.0)},
            {"energy_identity_gap", identity_gap},
            {"admissibility", verdict_json(sol.admissibility)},
            {"provenance", kProvFem}};
  if (c.fem.forcing == "manufactured") {
    const double amp = c.fem.amplitude;
    body["l2_error"] = l2_error(sol, [amp](const Eigen::VectorXd& x) {
      return Eigen::VectorXd(manufactured_solution(x.head<2>(), amp));
    });
  }
  s.emit("solution", body);
  if (identity_gap > 1e-6 * std::max(1.0, std::abs(sol.load))) s.flag("solution", kExitInternal);
  verdict_exit(s, sol.admissibility, "solution");

  std::vector<double> levels = c.fem.levels;
  std::sort(levels.begin(), levels.end());
  const WeightedEnergies we = weighted_energy(sol, c.fem.p, levels);
  json by_level = json::array();
  bool monotone = true;
  for (std::size_t i = 0; i < we.by_level.size(); ++i) {
    by_level.push_back({we.by_level[i].first, we.by_level[i].second});
    if (i > 0 && we.by_level[i].second < we.by_level[i - 1].second * (1.0 - 1e-12)) monotone = false;
  }
  s.emit("weighted_energy", {{"p", c.fem.p},
                             {"levels", by_level},
                             {"untruncated", we.untruncated},
                             {"dirichlet", we.dirichlet},
                             {"max_abs_u", we.max_abs_u},
                             {"monotone_in_k", monotone},
                             {"provenance", kProvReg}});
  if (!monotone) s.flag("weighted_energy", kExitInternal);

  if (auto out = s.plot("solution.csv")) write_solution(sol, *out);
}

void cmd_regularity(Session& s, const RunConfig& c) {
  auto refine_out = s.plot("refinement.csv");
  if (refine_out) *refine_out << "cells,lhs,rhs,ratio\n";
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (int n : c.fem.refinements) {
    const FemProblem prob = make_problem(c, n, 1.0);
    const FemSolution sol = assemble_and_solve(prob);
    const RegularityRatio r = regularity_ratio(sol, prob);
    s.emit("regularity_refinement", {{"cells", n}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"ratio", r.ratio},
                                     {"admissibility", to_string(sol.admissibility.status)},
                                     {"provenance", kProvReg}});
    if (refine_out) *refine_out << n << ',' << r.lhs << ',' << r.rhs << ',' << r.ratio << '\n';
    lo = std::min(lo, r.ratio);
    hi = std::max(hi, r.ratio);
    verdict_exit(s, sol.admissibility, "regularity_refinement");
  }
  const double drift = lo > 0.0 ? hi / lo : (hi == 0.0 ? 1.0 : std::numeric_limits<double>::infinity());
  s.emit("regularity_drift", {{"min_ratio", lo}, {"max_ratio", hi}, {"drift", drift}, {"bounded", drift <= 2.0},
                              {"note", "consistency under refinement, not a proof of membership"}});
  if (!(drift <= 2.0)) s.flag("regularity_drift", kExitInternal);

  auto scale_out = s.plot("scaling.csv");
  if (scale_out) *scale_out << "scale,lhs,rhs,ratio\n";
  double reference = -1.0, worst = 0.0;
  for (double scale : c.fem.scales) {
    const FemProblem prob = make_problem(c, c.fem.cells, scale);
    const FemSolution sol = assemble_and_solve(prob);
    const RegularityRatio r = regularity_ratio(sol, prob);
    if (reference < 0.0) reference = r.ratio;
    const double rel = reference > 0.0 ? std::abs(r.ratio / reference - 1.0) : std::abs(r.ratio);
    worst = std::max(worst, rel);
    s.emit("regularity_scaling", {{"scale", scale}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"ratio", r.ratio},
                                  {"relative_change", rel}, {"provenance", kProvReg}});
    if (scale_out) *scale_out << scale << ',' << r.lhs << ',' << r.rhs << ',' << r.ratio << '\n';
  }
  if (worst > 1e-6) s.flag("regularity_scaling", kExitInternal);

  if (c.fem.dim >= 3 && !c.fem.levels.empty()) {
    const FemProblem prob = make_problem(c, c.fem.cells, 1.0);
    const FemSolution sol = assemble_and_solve(prob);
    const HolderSplit h = holder_split_check(sol, prob, c.fem.levels.front());
    s.emit("holder_split", {{"level", c.fem.levels.front()},
                            {"alpha", h.alpha},
                            {"alpha_prime", h.alpha_prime},
                            {"pointwise_slack", h.pointwise_slack},
                            {"lhs", h.lhs},
                            {"rhs", h.rhs},
                            {"slack", h.slack},
                            {"provenance", kProvReg}});
    if (h.pointwise_slack < -1e-12 || h.slack < -1e-10 * std::max(1.0, h.rhs)) s.flag("holder_split", kExitInternal);
  }
}

}  // namespace

RunOutcome run(const RunConfig& config) {
  Session s(config);
  s.emit("config", {{"config", config_json(config)}});
  try {
    if (config.command == "check") {
      cmd_check(s, config);
    } else if (config.command == "report") {
      cmd_report(s, config);
    } else if (config.command == "verify-forms") {
      cmd_verify_forms(s, config);
    } else if (config.command == "solve") {
      cmd_solve(s, config);
    } else if (config.command == "regularity") {
      cmd_regularity(s, config);
    }
  } catch (const Error& e) {
    s.emit("error", {{"kind", std::string(to_string(e.kind()))}, {"message", e.what()}});
    s.flag("error", kExitInternal);
  } catch (const std::exception& e) {
    s.emit("error", {{"kind", "internal"}, {"message", e.what()}});
    s.flag("error", kExitInternal);
  }
  s.emit("summary", {{"exit_code", s.outcome().exit_code}, {"failing", s.outcome().failing},
                     {"records", static_cast<int>(s.outcome().records.size()) + 1}});
  return std::move(s.outcome());
}

int run_and_write(const RunConfig& config, std::ostream& fallback, std::ostream& err) {
  const RunOutcome outcome = run(config);
  std::ofstream file;
  if (!config.output.report.empty()) {
    const auto parent = std::filesystem::path(config.output.report).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    file.open(config.output.report);
    if (!file) {
      err << "cannot write report " << config.output.report << '\n';
      return kExitInternal;
    }
  }
  std::ostream& out = config.output.report.empty() ? fallback : file;
  for (const auto& line : outcome.records) out << line << '\n';
  if (outcome.exit_code != kExitOk) err << "failing record: " << outcome.failing << '\n';
  return outcome.exit_code;
}

}  // namespace dissip
