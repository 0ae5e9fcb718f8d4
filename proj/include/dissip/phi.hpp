#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "dissip/error.hpp"

namespace dissip {

enum class PhiFamily { Power, ExpSquare, TruncatedPower, Custom };

std::string to_string(PhiFamily family);

/// Regularity metadata of a weight function: near the origin
/// c1 s^r <= (s phi(s))' <= c2 s^r on (0, s0); the sign of phi' is
/// constant beyond s1.
struct PhiMetadata {
  double r = 0.0;
  double s0 = 1.0;
  double s1 = 2.0;
  double c1 = 1.0;
  double c2 = 1.0;
};

/// Evaluators backing a custom weight. Only `value` is mandatory; a missing
/// derivative is replaced by fourth-order central differences.
struct PhiEvaluators {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  std::function<double(double)> log_value;
  std::function<double(double)> elasticity;  // s phi'(s) / phi(s)
};

/// A positive weight phi on (0, inf) together with its regularity metadata.
/// Cheap to copy; immutable after construction and safe to share.
class PhiSpec {
 public:
  static PhiSpec power(double p);
  static PhiSpec exp_square();
  static PhiSpec truncated_power(double p, double k);
  static PhiSpec custom(PhiEvaluators evaluators, PhiMetadata meta, std::string name = "custom");

  double value(double s) const;
  double operator()(double s) const { return value(s); }
  double derivative(double s) const;
  double log_value(double s) const;
  /// s phi'(s) / phi(s).
  double elasticity(double s) const;

  PhiFamily family() const;
  const PhiMetadata& meta() const;
  /// Exponent parameter p for the power-type families (NaN otherwise).
  double p() const;
  /// Truncation level k (NaN unless TruncatedPower).
  double k() const;
  std::string name() const;
  /// True when s phi'/phi is constant, so Lambda needs no inversion.
  bool constant_elasticity() const;

 private:
  struct Impl;
  explicit PhiSpec(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

/// The truncated power weight phi_k: t^{p-2} below k-1, rho_k(t)^{p-2} on
/// [k-1, k] with rho_k(t) = t - (t-k+1)^2/2, and (k-1/2)^{p-2} above k.
PhiSpec truncated_power(double p, double k);

/// Log-spaced sample grid.
struct SampleGrid {
  double lo = 0.0;
  double hi = 0.0;
  int nodes = 0;

  std::vector<double> points() const;
  /// [s0/10, 10 s1] with 1000 nodes.
  static SampleGrid for_spec(const PhiSpec& spec, int nodes = 1000);
};

enum class ConditionStatus { Holds, Fails, NotRequired };

std::string to_string(ConditionStatus status);

struct ConditionCheck {
  std::string name;
  ConditionStatus status = ConditionStatus::Holds;
  double margin = 0.0;      // worst-node slack; negative when violated
  double worst_node = 0.0;  // abscissa where the margin is attained
  std::string note;
};

struct ValidationReport {
  std::vector<ConditionCheck> conditions;  // (i) .. (vi) in order

  bool regular() const;  // (i)-(v) hold
  const ConditionCheck& monotone_elasticity() const { return conditions.back(); }
};

/// Grid certification of the admissibility conditions for phi.
/// Throws NonPositivePhi / NotIncreasing on hard violations.
ValidationReport validate_phi(const PhiSpec& spec, const SampleGrid& grid);
ValidationReport validate_phi(const PhiSpec& spec);

/// Decade range searched by every monotone inversion.
inline constexpr double kInverseMin = 1e-12;
inline constexpr double kInverseMax = 1e12;

/// Solves s * phi(s)^exponent = t for s > 0 by bracketed bisection.
double invert_weighted(const PhiSpec& spec, double t, double exponent);

struct InverseSPhi {
  double s = 0.0;    // s phi(s) = t
  double psi = 0.0;  // psi(t) = s / t
};

/// Inverse of s -> s phi(s); psi(t) = s/t is the conjugate weight.
InverseSPhi inverse_s_phi(const PhiSpec& spec, double t);

/// The conjugate weight psi as a spec: psi(t) = S(t)/t where S inverts s phi(s).
/// Its growth exponent is -r/(r+1).
PhiSpec dual_phi(const PhiSpec& spec);

}  // namespace dissip
