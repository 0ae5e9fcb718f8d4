#pragma once

#include <vector>

#include "dissip/phi.hpp"

namespace dissip {

/// Conjugate Young functions built from phi:
///   Phi(s) = int_0^s sigma phi(sigma) dsigma,  Psi(t) = int_0^t sigma psi(sigma) dsigma,
/// where t psi(t) inverts s phi(s).
class YoungPair {
 public:
  explicit YoungPair(PhiSpec phi, double rel_tol = 1e-12);

  const PhiSpec& phi() const { return phi_; }
  double Phi(double s) const;
  double Psi(double t) const;
  /// Phi(s) + Psi(t) - s t, nonnegative by Young's inequality.
  double gap(double s, double t) const { return Phi(s) + Psi(t) - s * t; }

 private:
  PhiSpec phi_;
  double rel_tol_;
};

YoungPair young_pair(const PhiSpec& spec);

struct YoungCheck {
  bool zero_at_zero = false;
  bool nondecreasing = false;
  bool convex = false;
  double min_gap = 0.0;  // min over sampled pairs of Phi(s) + Psi(t) - s t
};

/// Grid checks of convexity, monotonicity and Young's inequality on `nodes` x `nodes`.
YoungCheck check_young(const YoungPair& pair, const std::vector<double>& nodes);

}  // namespace dissip
