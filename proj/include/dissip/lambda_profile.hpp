#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "dissip/phi.hpp"

namespace dissip {

struct LambdaOptions {
  double t_min = 1e-8;
  double horizon = 1e8;
  int nodes_per_decade = 20;
  double tail_tol = 1e-6;
  /// Margin below 1 required of sup Lambda^2 before it counts as < 1.
  double sup_tol = 1e-6;
};

/// Limit of Lambda(t) as t -> inf together with grid diagnostics.
struct LambdaLimit {
  double value = 0.0;           // Lambda_inf
  double sup_sq = 0.0;          // max(grid sup of Lambda^2, Lambda_inf^2)
  bool sup_below_one = false;   // sup Lambda^2 < 1
  double max_abs = 0.0;         // max |Lambda| over sampled t
  bool sq_monotone = false;     // Lambda^2 nondecreasing along the grid
  double tail_variation = 0.0;  // relative variation of the last three nodes
  double horizon = 0.0;         // last t reached (inf when continued in s)
  bool extended = false;        // tail continued beyond the t-grid
  std::vector<std::pair<double, double>> samples;  // (t, Lambda(t)) on the t-grid

  double value_sq() const { return value * value; }
};

/// zeta, Theta, Lambda derived from phi:
///   zeta inverts s sqrt(phi(s)),  Theta(t) = zeta(t)/t,  Lambda = t Theta'/Theta.
/// Copies share the lazily computed limit.
class LambdaProfile {
 public:
  explicit LambdaProfile(PhiSpec phi, LambdaOptions options = {});

  const PhiSpec& phi() const { return phi_; }
  const LambdaOptions& options() const { return options_; }

  double zeta(double t) const;
  double theta(double t) const;
  /// Lambda at t = s sqrt(phi(s)): -g/(g+2) with g = s phi'(s)/phi(s).
  double lambda(double t) const;
  /// Lambda evaluated through s directly, avoiding the inversion.
  double lambda_at_s(double s) const;

  /// Computed once, thread-safe.
  const LambdaLimit& limit() const;

 private:
  struct Cache;
  PhiSpec phi_;
  LambdaOptions options_;
  std::shared_ptr<Cache> cache_;
};

double lambda_of(const LambdaProfile& profile, double t);
const LambdaLimit& lambda_infinity(const LambdaProfile& profile);

/// Geometric grid of `per_decade` nodes per decade on [lo, hi].
std::vector<double> log_grid(double lo, double hi, int per_decade);

}  // namespace dissip
