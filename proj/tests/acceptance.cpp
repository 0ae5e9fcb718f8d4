// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "dissip/coefficients.hpp"
#include "dissip/config.hpp"
#include "dissip/criteria.hpp"
#include "dissip/fem.hpp"
#include "dissip/forms.hpp"
#include "dissip/lambda_profile.hpp"
#include "dissip/orlicz.hpp"
#include "dissip/run.hpp"
#include "dissip/test_fields.hpp"

using namespace dissip;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double time_limit;  // seconds
  std::function<Outcome()> body;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Outcome lambda_calculus() {
  double worst = 0.0;
  for (double p : {2.0, 3.0, 4.0, 8.0, 16.0}) {
    const LambdaProfile profile(PhiSpec::power(p));
    for (int i = 0; i < 200; ++i) {
      const double t = std::pow(10.0, -6.0 + 12.0 * i / 199.0);
      worst = std::max(worst, std::abs(lambda_of(profile, t) + (p - 2.0) / p));
    }
  }
  return {worst <= 1e-10, fmt("max |Lambda + (p-2)/p| = %.3e", worst)};
}

Outcome identity_suite() {
  double h2psi = 0.0, th = 0.0, roundtrip = 0.0, tilde = 0.0;
  for (const PhiSpec& phi : {PhiSpec::power(3.0), PhiSpec::power(6.0), PhiSpec::truncated_power(4.0, 3.0),
                             PhiSpec::exp_square()}) {
    const LambdaProfile profile(phi);
    const LambdaProfile dual(dual_phi(phi));
    for (double t : log_grid(1e-3, 1e3, 10)) {
      const double theta = profile.theta(t);
      const double z = profile.zeta(t);
      h2psi = std::max(h2psi, std::abs(theta * theta * phi.value(z) - 1.0));

      const double h = 1e-5 * t;
      const double dth = (profile.theta(t + h) - profile.theta(t - h)) / (2.0 * h);
      const double a = theta * phi.derivative(z) * (t * dth + theta);
      const double b = dth * phi.value(z);
      const double c = dth / (theta * theta);
      const double scale = std::max({std::abs(a), std::abs(b), std::abs(c), 1.0});
      th = std::max(th, std::abs(a + b + c) / scale);

      tilde = std::max(tilde, std::abs(dual.lambda(t) + profile.lambda(t)));
    }
    for (double s : log_grid(1e-3, 1e1, 10)) {
      const double w = phi.value(s) * s;
      const double lhs = std::sqrt(inverse_s_phi(phi, w).psi) * w;
      const double rhs = std::sqrt(phi.value(s)) * s;
      roundtrip = std::max(roundtrip, std::abs(lhs - rhs) / rhs);
    }
  }
  const bool pass = h2psi <= 1e-6 && th <= 1e-6 && roundtrip <= 1e-8 && tilde <= 1e-8;
  return {pass, fmt("Theta^2 phi(zeta) %.2e, derivative identity %.2e, ", h2psi, th) +
                    fmt("psi roundtrip %.2e, Lambda~ + Lambda %.2e", roundtrip, tilde)};
}

Outcome xy_identities() {
  Rng rng(2024);
  double worst = 0.0;
  int fields = 0;
  for (const AnalyticField& f : analytic_fields()) {
    ++fields;
    for (int n = 0; n < 10000; ++n) {
      const Eigen::Vector2d x(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0));
      Eigen::Vector2d v;
      Eigen::Matrix2d j;
      f.eval(x, v, j);
      if (v.norm() < 1e-8) continue;
      const XY d = xy_decompose(v, j);
      const double s1 = d.x1 + d.y1;
      worst = std::max(worst, std::abs(j.squaredNorm() - (d.x1 * d.x1 + d.x2 * d.x2 + d.y1 * d.y1 + d.y2 * d.y2)));
      worst = std::max(worst, std::abs(j.trace() * j.trace() - s1 * s1));
      worst = std::max(worst, std::abs((j * j).trace() - (s1 * s1 - 2.0 * (d.x1 * d.y1 + d.x2 * d.y2))));
    }
  }
  return {fields == 5 && worst <= 1e-10, fmt("%g fields, max residual %.3e", fields, worst)};
}

Outcome verdict_threshold() {
  const double exact = 2.0 / (1.0 - std::sqrt(3.0) / 2.0);
  const ExponentBracket b = power_threshold(CoefficientField::constant(1.0, 1.0), 2.0, 200.0, 1e-7);
  const double below = std::abs(b.below - exact), above = std::abs(b.above - exact);

  const FormOperator op = FormOperator::lame(CoefficientField::constant(1.0, 1.0));
  CounterexampleOptions options;
  options.max_octave = 10;
  const CounterexampleResult r = hunt_counterexample(op, LambdaProfile(PhiSpec::power(20.0)), Rect{}, options);
  const bool pass = below <= 1e-6 && above <= 1e-6 && b.below < b.above && r.found && r.residual < 0.0;
  return {pass, fmt("flip in [%.9f, %.9f], exact %.9f; ", b.below, b.above, exact) +
                    (r.found ? fmt("p = 20 counterexample at rho = %g, residual %.3e", r.rho, r.residual)
                             : std::string("p = 20 counterexample not found"))};
}

Outcome nd_implies_2d() {
  int checked = 0, violations = 0;
  for (int i = 0; i < 50; ++i) {
    for (int j = 0; j < 50; ++j) {
      const double mu = 0.05 + 4.0 * j / 49.0;
      const double lambda = -mu + 0.01 + 10.0 * i / 49.0;
      const CoefficientField field = CoefficientField::constant(lambda, mu);
      for (int k = 0; k <= 20; ++k) {
        const double l2 = 0.05 * k;
        if (lameNd_sufficient(l2, lambda, mu).status != VerdictStatus::StrictDissipative) continue;
        ++checked;
        if (lame2d_verdict(l2, field).status != VerdictStatus::StrictDissipative) ++violations;
      }
    }
  }
  return {checked > 0 && violations == 0, fmt("%g implications checked, %g violations", checked, violations)};
}

Outcome fem_correctness() {
  const double lambda = 2.0, mu = 0.5;
  std::vector<double> errors, orders;
  for (int n : {8, 16, 32}) {
    FemProblem prob = FemProblem::unit_box(2, n);
    prob.lambda = lambda;
    prob.mu = mu;
    prob.forcing = manufactured_forcing(lambda, mu);
    const FemSolution sol = assemble_and_solve(prob);
    errors.push_back(l2_error(
        sol, [](const Eigen::VectorXd& x) { return Eigen::VectorXd(manufactured_solution(x.head<2>())); }));
    if (errors.size() > 1) orders.push_back(std::log2(errors[errors.size() - 2] / errors.back()));
  }
  bool pass = true;
  for (double o : orders) pass = pass && o >= 1.8 && o <= 2.2;
  const FemSolution zero = assemble_and_solve(FemProblem::unit_box(2, 16));
  const double zero_norm = zero.u.norm();
  pass = pass && zero_norm <= 1e-10;
  return {pass, fmt("orders %.4f, %.4f; |u| for F = 0: %.1e", orders[0], orders[1], zero_norm)};
}

struct RatioStudy {
  double scaling_defect = 0.0;
  double spread = 0.0;  // max/min ratio across refinements
  std::vector<double> ratios;
};

RatioStudy regularity_study(int dim, const std::vector<int>& refinements, int scaling_cells) {
  RatioStudy out;
  auto ratio_at = [&](int n, double c) {
    FemProblem prob = FemProblem::unit_box(dim, n);
    prob.p = 4.0;
    prob.forcing = smooth_forcing(dim, c);
    return regularity_ratio(assemble_and_solve(prob), prob).ratio;
  };
  const double base = ratio_at(scaling_cells, 1.0);
  for (double c : {0.5, 2.0, 4.0}) {
    out.scaling_defect = std::max(out.scaling_defect, std::abs(ratio_at(scaling_cells, c) / base - 1.0));
  }
  for (int n : refinements) out.ratios.push_back(n == scaling_cells ? base : ratio_at(n, 1.0));
  const auto [lo, hi] = std::minmax_element(out.ratios.begin(), out.ratios.end());
  out.spread = *hi / *lo;
  return out;
}

Outcome regularity_estimate() {
  const RatioStudy three = regularity_study(3, {8, 16, 32}, 16);
  const RatioStudy two = regularity_study(2, {16, 32, 64}, 32);
  const bool pass = three.scaling_defect <= 1e-6 && three.spread <= 2.0 && two.scaling_defect <= 1e-6 &&
                    two.spread <= 2.0 && three.ratios.front() > 0.0 && two.ratios.front() > 0.0;
  return {pass, fmt("N=3: scaling %.1e, spread %.4f; ", three.scaling_defect, three.spread) +
                    fmt("N=2: scaling %.1e, spread %.4f", two.scaling_defect, two.spread)};
}

SampledField random_field(Rng& rng, int n, double top) {
  SampledField f;
  for (int i = 0; i < n; ++i) {
    f.values.push_back(rng.uniform(-top, top));
    f.weights.push_back(rng.uniform(0.5, 1.5) / n);
  }
  return f;
}

Outcome orlicz_suite() {
  const YoungFunction power = YoungFunction::power(3.0);
  const YoungFunction exp = YoungFunction::exp_linear();
  const YoungFunction tlog = YoungFunction::log_type(4.0);
  const std::vector<std::pair<YoungFunction, YoungFunction>> pairs{
      {power, power.conjugate()}, {exp, exp.conjugate()}, {tlog, tlog.conjugate()}};

  Rng rng(50);
  int sandwich_failures = 0;
  double min_slack = std::numeric_limits<double>::infinity();
  for (const auto& [m, n] : pairs) {
    for (int i = 0; i < 50; ++i) {
      const SampledField f = random_field(rng, 40, rng.uniform(0.1, 3.0));
      for (const YoungFunction& y : {m, n}) {
        const double lux = luxemburg_norm(f, y);
        const double orl = orlicz_norm(f, y);
        if (lux > orl * (1 + 1e-8) || orl > 2.0 * lux * (1 + 1e-8)) ++sandwich_failures;
      }
      SampledField g = f;
      for (double& x : g.values) x = rng.uniform(-4.0, 4.0);
      const HolderCheck h = holder_orlicz(f, g, m, n);
      min_slack = std::min(min_slack, h.slack / h.rhs);
    }
  }

  // f = c on a set of measure 3: c 3^{1/p} for t^p and 4 pi c / log(1 + 1/3) for e^{4 pi t} - 1.
  const SampledField c{{1.7, -1.7, 1.7}, {0.5, 1.0, 1.5}};
  double closed = 0.0;
  for (double p : {1.5, 2.0, 4.0}) {
    const double exact = 1.7 * std::pow(3.0, 1.0 / p);
    closed = std::max(closed, std::abs(luxemburg_norm(c, YoungFunction::power(p, false)) - exact) / exact);
  }
  const double exact_exp = 4.0 * std::numbers::pi * 1.7 / std::log1p(1.0 / 3.0);
  closed = std::max(closed, std::abs(luxemburg_norm(c, exp) - exact_exp) / exact_exp);

  const bool pass = sandwich_failures == 0 && min_slack >= -1e-8 && closed <= 1e-8;
  return {pass, fmt("sandwich failures %g, min relative Holder slack %.3e, closed form %.1e", sandwich_failures,
                    min_slack, closed)};
}

double brute_force_bmo(const Eigen::ArrayXXd& f) {
  const int rows = static_cast<int>(f.rows()), cols = static_cast<int>(f.cols());
  double best = 0.0;
  for (int side = 2; side <= std::min(rows, cols); side *= 2) {
    for (int i0 = 0; i0 + side <= rows; i0 += side) {
      for (int j0 = 0; j0 + side <= cols; j0 += side) {
        double sum = 0.0;
        for (int i = i0; i < i0 + side; ++i) {
          for (int j = j0; j < j0 + side; ++j) sum += f(i, j);
        }
        const double mean = sum / (side * side);
        double osc = 0.0;
        for (int i = i0; i < i0 + side; ++i) {
          for (int j = j0; j < j0 + side; ++j) osc += std::abs(f(i, j) - mean);
        }
        best = std::max(best, osc / (side * side));
      }
    }
  }
  return best;
}

Outcome bmo_suite() {
  PresetSpec spec;
  spec.n1 = spec.n2 = 65;
  const double constant = bmo_seminorm(commutator_weight(make_preset(spec)));

  double worst = 0.0;
  for (const auto& [name, amplitude, block] :
       {std::tuple{"checkerboard", 0.4, 2}, std::tuple{"checkerboard", 0.3, 4}, std::tuple{"ramp", 2.0, 2}}) {
    spec.name = name;
    spec.amplitude = amplitude;
    spec.block = block;
    const Eigen::ArrayXXd w = commutator_weight(make_preset(spec));
    worst = std::max(worst, std::abs(bmo_seminorm(w) - brute_force_bmo(cell_averages(w))));
  }
  Eigen::ArrayXXd board(32, 32), ramp(32, 32);
  for (int i = 0; i < 32; ++i) {
    for (int j = 0; j < 32; ++j) {
      board(i, j) = ((i / 3 + j / 3) % 2 == 0) ? 1.0 : -1.0;
      ramp(i, j) = 0.37 * i;
    }
  }
  worst = std::max(worst, std::abs(bmo_cells(board) - brute_force_bmo(board)));
  worst = std::max(worst, std::abs(bmo_cells(ramp) - brute_force_bmo(ramp)));
  return {constant == 0.0 && worst <= 1e-12, fmt("constant %g, max deviation from brute force %.1e", constant, worst)};
}

std::string report_bytes(RunConfig config, const std::filesystem::path& path) {
  config.output.report = path.string();
  std::ostringstream sink, err;
  run_and_write(config, sink, err);
  std::ifstream in(path, std::ios::binary);
  std::ostringstream bytes;
  bytes << in.rdbuf();
  return bytes.str();
}

Outcome determinism() {
  const std::filesystem::path dir = std::filesystem::temp_directory_path() / "dissip_acceptance";
  std::filesystem::create_directories(dir);
  const std::vector<std::string> configs{
      "command: check\nphi: {family: power, p: 4}\n",
      "command: check\ncoefficients: {source: preset, preset: checkerboard, amplitude: 0.02, block: 4, n1: 33, "
      "n2: 33}\n",
      "command: verify-forms\nphi: {family: power, p: 6}\nensemble: {seed: 7, bumps: 4, rotations: 4, "
      "oscillatory: 4}\n",
      "command: solve\nfem: {dim: 2, cells: 16, forcing: manufactured}\n",
      "command: regularity\nfem: {dim: 2, refinements: [8, 16], p: 4}\n",
      "command: report\nphi: {family: truncated_power, p: 6, k: 3}\n"};
  int mismatches = 0;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const RunConfig config = parse_config(configs[i]);
    const std::filesystem::path path = dir / ("report_" + std::to_string(i) + ".jsonl");
    const std::string first = report_bytes(config, path);
    const std::string second = report_bytes(config, path);
    if (first.empty() || first != second) ++mismatches;
  }
  std::filesystem::remove_all(dir);
  return {mismatches == 0, fmt("%g configs, %g mismatches", static_cast<double>(configs.size()), mismatches)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "Lambda calculus for power weights", 1.0, lambda_calculus},
      {2, "Theta/zeta/psi identity suite", 5.0, identity_suite},
      {3, "X/Y decomposition identities", 5.0, xy_identities},
      {4, "verdict threshold and counterexample", 60.0, verdict_threshold},
      {5, "N-dimensional condition implies planar condition", 5.0, nd_implies_2d},
      {6, "FEM manufactured convergence and zero forcing", 60.0, fem_correctness},
      {7, "regularity ratio scaling and refinement", 600.0, regularity_estimate},
      {8, "Orlicz norms and Holder inequality", 30.0, orlicz_suite},
      {9, "BMO estimator against brute force", 5.0, bmo_suite},
      {10, "byte-identical reports", 60.0, determinism},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.body();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds <= c.time_limit;
    const bool pass = out.pass && in_time;
    if (!pass) ++failures;
    std::printf("[%s] %2d %-50s %8.2f s (limit %g s%s)  %s\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(), seconds,
                c.time_limit, in_time ? "" : ", exceeded", out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
