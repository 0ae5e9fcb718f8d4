#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "dissip/fem.hpp"
#include "dissip/phi.hpp"
#include "dissip/test_fields.hpp"

using namespace dissip;

namespace {

FemProblem manufactured(int n, double lambda = 1.0, double mu = 1.0) {
  FemProblem prob = FemProblem::unit_box(2, n);
  prob.lambda = lambda;
  prob.mu = mu;
  prob.p = 4.0;
  prob.forcing = manufactured_forcing(lambda, mu);
  return prob;
}

double manufactured_error(const FemSolution& sol) {
  return l2_error(sol, [](const Eigen::VectorXd& x) { return Eigen::VectorXd(manufactured_solution(x.head<2>())); });
}

}  // namespace

TEST(Fem, ZeroForcingGivesZeroSolution) {
  FemProblem prob = FemProblem::unit_box(2, 8);
  const FemSolution sol = assemble_and_solve(prob);
  EXPECT_TRUE(sol.u.isZero(0.0));
  EXPECT_EQ(sol.energy, 0.0);
}

TEST(Fem, ManufacturedConvergesAtSecondOrder) {
  double previous = 0.0;
  for (int n : {8, 16, 32}) {
    const double err = manufactured_error(assemble_and_solve(manufactured(n, 2.0, 0.5)));
    if (previous > 0.0) {
      const double order = std::log2(previous / err);
      EXPECT_GE(order, 1.8);
      EXPECT_LE(order, 2.2);
    }
    previous = err;
  }
}

TEST(Fem, FiberProblemMatchesTwoPointSolution) {
  // F_11 = x1 on a long strip: away from the short sides u_1 solves
  // (lambda + 2 mu) u_1'' = 1 with u_1(0) = u_1(1) = 0.
  const double lambda = 1.5, mu = 0.75;
  FemProblem prob;
  prob.dim = 2;
  prob.domain = {Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(1.0, 10.0)};
  prob.cells = {16, 160};
  prob.lambda = lambda;
  prob.mu = mu;
  prob.forcing = [](const Eigen::VectorXd& x) {
    Eigen::MatrixXd f = Eigen::MatrixXd::Zero(2, 2);
    f(0, 0) = x(0);
    return f;
  };
  const FemSolution sol = assemble_and_solve(prob);
  for (int k = 0; k < sol.node_count(); ++k) {
    const Eigen::VectorXd x = sol.node(k);
    if (std::abs(x(1) - 5.0) > 1e-12) continue;
    const double exact = x(0) * (x(0) - 1.0) / (2.0 * (lambda + 2.0 * mu));
    EXPECT_NEAR(sol.u(k, 0), exact, 1e-6);
    EXPECT_NEAR(sol.u(k, 1), 0.0, 1e-6);
  }
}

TEST(Fem, EnergyIdentity) {
  const FemSolution sol = assemble_and_solve(manufactured(16));
  EXPECT_NEAR(2.0 * sol.energy, sol.load, 1e-8 * std::abs(sol.load));
  EXPECT_LE(sol.residual, 1e-10);
}

TEST(Fem, ThreeDimensionalSolveIsSymmetricUnderAxisSwap) {
  FemProblem prob = FemProblem::unit_box(3, 8);
  prob.forcing = [](const Eigen::VectorXd& x) {
    return Eigen::MatrixXd(Eigen::MatrixXd::Identity(3, 3) * (x(0) + x(1) + x(2)));
  };
  const FemSolution sol = assemble_and_solve(prob);
  // Swapping x1 and x2 maps the problem to itself with u_1 <-> u_2.
  const int n = 9;
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      const int a = k + n * (j + n * 4);
      const int b = j + n * (k + n * 4);
      EXPECT_NEAR(sol.u(a, 0), sol.u(b, 1), 1e-9);
    }
  }
}

TEST(Fem, VariableCoefficientsReduceToConstant) {
  FemProblem a = manufactured(8);
  FemProblem b = a;
  b.field = CoefficientField::constant(1.0, 1.0, Rect{}, 9);
  b.eps = [](const Eigen::VectorXd&) { return 0.0; };
  const FemSolution sa = assemble_and_solve(a);
  const FemSolution sb = assemble_and_solve(b);
  EXPECT_LE((sa.u - sb.u).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Fem, EllipticityViolationIsReported) {
  FemProblem prob = FemProblem::unit_box(2, 8);
  prob.mu = -1.0;
  try {
    assemble_and_solve(prob);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EllipticityViolation);
  }
}

TEST(Fem, AdmissibilityFollowsDimension) {
  FemProblem two = manufactured(8);
  EXPECT_EQ(assemble_and_solve(two).admissibility.status, VerdictStatus::StrictDissipative);
  FemProblem three = FemProblem::unit_box(3, 8);
  three.p = 20.0;
  EXPECT_EQ(assemble_and_solve(three).admissibility.status, VerdictStatus::Inconclusive);
}

TEST(WeightedEnergy, ZeroSolution) {
  const FemSolution sol = assemble_and_solve(FemProblem::unit_box(2, 8));
  const WeightedEnergies we = weighted_energy(sol, 4.0, {2.0, 3.0});
  for (const auto& [k, v] : we.by_level) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(we.untruncated, 0.0);
}

TEST(WeightedEnergy, PEqualTwoIsDirichletEnergy) {
  const FemSolution sol = assemble_and_solve(manufactured(16));
  const WeightedEnergies we = weighted_energy(sol, 2.0, {1.5, 3.0, 10.0});
  for (const auto& [k, v] : we.by_level) EXPECT_DOUBLE_EQ(v, we.dirichlet);
  EXPECT_DOUBLE_EQ(we.untruncated, we.dirichlet);
}

TEST(WeightedEnergy, MonotoneInLevelAndExactBeyondRange) {
  FemProblem prob = manufactured(16);
  prob.forcing = manufactured_forcing(1.0, 1.0, 3.0);
  const FemSolution sol = assemble_and_solve(prob);
  const WeightedEnergies we = weighted_energy(sol, 4.0, {1.5, 2.0, 3.0, 4.0, 6.0, 10.0});
  ASSERT_GT(we.max_abs_u, 1.0);
  for (std::size_t i = 1; i < we.by_level.size(); ++i) {
    EXPECT_GE(we.by_level[i].second, we.by_level[i - 1].second);
  }
  // phi_k(t) = t^{p-2} for t <= k - 1, and the Q1 field attains max |u| at a node.
  for (const auto& [k, v] : we.by_level) {
    if (k - 1.0 > we.max_abs_u) {
      EXPECT_EQ(v, we.untruncated);
    }
  }
}

TEST(WeightedEnergy, PerturbationWithinBudgetKeepsEnergyComparable) {
  // Engineering check: a small admissible perturbation changes the weighted energy mildly.
  FemProblem base = manufactured(16);
  FemProblem pert = base;
  pert.eps = [](const Eigen::VectorXd& x) { return 0.05 * std::sin(3.0 * x(0)); };
  pert.sigma = [](const Eigen::VectorXd& x) { return 0.05 * std::cos(2.0 * x(1)); };
  const double budget = perturbation_budget(PhiSpec::power(4.0), 1.0, 1.0, 0.5);
  ASSERT_GE(budget, 0.1);
  const double e0 = weighted_energy(assemble_and_solve(base), 4.0, {}).untruncated;
  const double e1 = weighted_energy(assemble_and_solve(pert), 4.0, {}).untruncated;
  EXPECT_GE(e1 / e0, 0.5);
  EXPECT_LE(e1 / e0, 2.0);
}

TEST(Regularity, ZeroForcingRatioIsZero) {
  FemProblem prob = FemProblem::unit_box(2, 8);
  prob.p = 4.0;
  EXPECT_EQ(regularity_ratio(assemble_and_solve(prob), prob).ratio, 0.0);
}

TEST(Regularity, ScalingInvarianceInTwoAndThreeDimensions) {
  for (int dim : {2, 3}) {
    FemProblem prob = FemProblem::unit_box(dim, 8);
    prob.p = 4.0;
    prob.forcing = smooth_forcing(dim, 1.0);
    const FemSolution s1 = assemble_and_solve(prob);
    const RegularityRatio r1 = regularity_ratio(s1, prob);
    prob.forcing = smooth_forcing(dim, 2.0);
    const FemSolution s2 = assemble_and_solve(prob);
    const RegularityRatio r2 = regularity_ratio(s2, prob);
    EXPECT_NEAR(r2.lhs / r1.lhs, 16.0, 16.0 * 1e-8);
    EXPECT_NEAR(r2.ratio / r1.ratio, 1.0, 1e-6) << "dim " << dim;
  }
}

TEST(Regularity, LebesgueRightSideByDirectQuadrature) {
  // For constant F the 3-D right side is |F|^2 * measure^{(N+p-2)/N}.
  FemProblem prob = FemProblem::unit_box(3, 8);
  prob.p = 4.0;
  prob.forcing = [](const Eigen::VectorXd&) { return Eigen::MatrixXd(Eigen::MatrixXd::Constant(3, 3, 0.5)); };
  const RegularityRatio r = regularity_ratio(assemble_and_solve(prob), prob);
  const double f = 1.5;  // Frobenius norm of the constant 3x3 matrix with entries 1/2
  EXPECT_NEAR(r.rhs, std::pow(std::pow(f, 12.0 / 5.0), 5.0 / 3.0), 1e-10);
}

TEST(Holder, ExponentsAreConjugate) {
  for (int n = 3; n <= 6; ++n) {
    for (long long a = 2; a <= 40; ++a) {
      for (long long b = 1; b <= 5; ++b) {
        if (a < 2 * b) continue;
        EXPECT_TRUE(holder_conjugate_exact(n, a, b));
        if (a == 2 * b) continue;
        const auto [alpha, alpha_prime] = holder_exponents(n, double(a) / double(b));
        EXPECT_NEAR(1.0 / alpha + 1.0 / alpha_prime, 1.0, 1e-14);
      }
    }
  }
}

TEST(Holder, PointwiseChainOnRandomValues) {
  const double p = 4.0, k = 3.0;
  const PhiSpec phi = truncated_power(p, k);
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    const double t = rng.uniform(0.0, 6.0);
    const double w = phi.value(t);
    const double bound = std::pow(std::sqrt(w) * t, 2.0 * (p - 2.0) / p);
    EXPECT_LE(w, bound * (1.0 + 1e-14) + 1e-300);
    if (t < k - 1.0) {
      EXPECT_NEAR(w, bound, 1e-12 * std::max(1.0, w));
    }
  }
}

TEST(Holder, SplitHoldsOnDeskProblem) {
  FemProblem prob = FemProblem::unit_box(3, 8);
  prob.p = 4.0;
  prob.forcing = smooth_forcing(3, 5.0);
  const FemSolution sol = assemble_and_solve(prob);
  const HolderSplit h = holder_split_check(sol, prob, 2.0);
  EXPECT_GE(h.pointwise_slack, -1e-14);
  EXPECT_GE(h.slack, 0.0);
  prob.p = 2.0;
  const HolderSplit flat = holder_split_check(sol, prob, 2.0);
  EXPECT_TRUE(std::isinf(flat.alpha));
  EXPECT_NEAR(flat.alpha_prime, 1.0, 1e-15);
  EXPECT_NEAR(flat.pointwise_slack, 0.0, 0.0);
}

TEST(Fem, SolutionDumpHasOneRowPerNode) {
  const FemSolution sol = assemble_and_solve(manufactured(8));
  std::ostringstream out;
  write_solution(sol, out);
  const std::string text = out.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), sol.node_count());
}
