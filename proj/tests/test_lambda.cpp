#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "dissip/lambda_profile.hpp"

using namespace dissip;

namespace {

std::vector<PhiSpec> families() {
  PhiEvaluators ev;
  ev.value = [](double s) { return 1.0 + s; };
  return {PhiSpec::power(3.0), PhiSpec::power(6.0), PhiSpec::exp_square(), PhiSpec::truncated_power(4.0, 3.0),
          PhiSpec::custom(ev, {0.0, 1.0, 2.0, 1.0, 3.0}, "one_plus_s")};
}

}  // namespace

TEST(Lambda, PowerIsConstant) {
  for (double p : {2.0, 3.0, 4.0, 8.0, 16.0}) {
    const LambdaProfile profile(PhiSpec::power(p));
    for (double t : log_grid(1e-6, 1e6, 16)) EXPECT_NEAR(lambda_of(profile, t), -(p - 2.0) / p, 1e-10);
  }
}

TEST(Lambda, ExpSquareAtUnitArgument) {
  const LambdaProfile profile(PhiSpec::exp_square());
  // s = 1: t = s sqrt(phi(s)) = e^{1/2} and s phi'/phi = 2 s^2 = 2.
  EXPECT_NEAR(profile.lambda(std::exp(0.5)), -0.5, 1e-9);
  EXPECT_NEAR(profile.lambda_at_s(1.0), -0.5, 1e-15);
}

TEST(Lambda, LimitsOfTheThreeFamilies) {
  const LambdaLimit& power = lambda_infinity(LambdaProfile(PhiSpec::power(4.0)));
  EXPECT_NEAR(power.value, -0.5, 1e-12);
  EXPECT_NEAR(power.sup_sq, 0.25, 1e-12);
  EXPECT_TRUE(power.sup_below_one);

  const LambdaLimit& exp_sq = lambda_infinity(LambdaProfile(PhiSpec::exp_square()));
  EXPECT_NEAR(exp_sq.value_sq(), 1.0, 1e-6);
  EXPECT_FALSE(exp_sq.sup_below_one);

  const LambdaLimit& trunc = lambda_infinity(LambdaProfile(PhiSpec::truncated_power(4.0, 3.0)));
  EXPECT_EQ(trunc.value, 0.0);
  EXPECT_NEAR(trunc.sup_sq, 0.25, 1e-10);
  EXPECT_TRUE(trunc.sup_below_one);
}

TEST(Lambda, AbsoluteValueBelowOneAndMonotoneSquare) {
  for (const PhiSpec& phi : {PhiSpec::power(5.0), PhiSpec::exp_square()}) {
    const LambdaLimit& lim = LambdaProfile(phi).limit();
    for (const auto& [t, l] : lim.samples) EXPECT_LT(std::abs(l), 1.0);
    EXPECT_TRUE(lim.sq_monotone) << phi.name();
  }
}

TEST(Lambda, NonConvergentTail) {
  // s phi'/phi = cos(log s)/2 oscillates forever.
  PhiEvaluators ev;
  ev.value = [](double s) { return std::exp(0.5 * std::sin(std::log(s))); };
  ev.elasticity = [](double s) { return 0.5 * std::cos(std::log(s)); };
  const LambdaProfile profile(PhiSpec::custom(ev, {0.0, 1.0, 2.0, 0.1, 10.0}, "log_periodic"));
  try {
    profile.limit();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonConvergent);
  }
}

TEST(Identities, ThetaSquaredTimesPhiOfZetaIsOne) {
  for (const PhiSpec& phi : families()) {
    const LambdaProfile profile(phi);
    for (double t : log_grid(1e-4, 1e4, 25)) {
      EXPECT_NEAR(profile.theta(t) * t, profile.zeta(t), 1e-14 * profile.zeta(t));
      const double th = profile.theta(t);
      EXPECT_NEAR(th * th * phi.value(profile.zeta(t)), 1.0, 1e-8) << phi.name() << " t=" << t;
    }
  }
}

TEST(Identities, DerivativeIdentityByCentralDifferences) {
  for (const PhiSpec& phi : families()) {
    const LambdaProfile profile(phi);
    for (double t : log_grid(1e-2, 1e2, 5)) {
      const double h = 1e-5 * t;
      const double th = profile.theta(t);
      const double dth = (profile.theta(t + h) - profile.theta(t - h)) / (2.0 * h);
      const double z = profile.zeta(t);
      const double a = th * phi.derivative(z) * (t * dth + th);
      const double b = dth * phi.value(z);
      const double c = dth / (th * th);
      const double scale = std::max({std::abs(a), std::abs(b), std::abs(c), 1.0});
      EXPECT_NEAR((a + b + c) / scale, 0.0, 1e-6) << phi.name() << " t=" << t;
    }
  }
}

TEST(Identities, WeightRoundtripThroughConjugate) {
  for (const PhiSpec& phi : families()) {
    for (double s : log_grid(1e-3, 1e1, 4)) {
      const double w = phi.value(s) * s;
      const double psi = inverse_s_phi(phi, w).psi;
      const double lhs = std::sqrt(psi) * w;
      const double rhs = std::sqrt(phi.value(s)) * s;
      EXPECT_NEAR(lhs, rhs, 1e-8 * rhs) << phi.name() << " s=" << s;
    }
  }
}

TEST(Identities, ConjugateLambdaIsOpposite) {
  for (const PhiSpec& phi : families()) {
    const LambdaProfile profile(phi);
    const LambdaProfile dual(dual_phi(phi));
    for (double t : log_grid(1e-2, 1e2, 3)) {
      EXPECT_NEAR(dual.lambda(t), -profile.lambda(t), 1e-8) << phi.name() << " t=" << t;
    }
  }
}

TEST(Profile, CopiesShareTheCachedLimit) {
  const LambdaProfile a(PhiSpec::power(3.0));
  const LambdaProfile b = a;
  EXPECT_EQ(&a.limit(), &b.limit());
}
