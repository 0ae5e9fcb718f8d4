#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "dissip/error.hpp"

namespace dissip {

enum class YoungKind { Power, LogType, Exp, ExpPower, Conjugate, Custom };

/// A Young function M: [0, inf) -> [0, inf], convex, M(0) = 0.
class YoungFunction {
 public:
  /// t^p/p, or t^p when `normalized` is false.
  static YoungFunction power(double p, bool normalized = true);
  /// t (log(t + e))^{(p-2)/p}.
  static YoungFunction log_type(double p);
  /// e^{4 pi t} - 1.
  static YoungFunction exp_linear();
  /// e^{4 pi t^{p/(p-2)}} - 1.
  static YoungFunction exp_power(double p);
  static YoungFunction custom(std::function<double(double)> m, std::string name);

  double operator()(double t) const { return eval_(t); }
  YoungKind kind() const { return kind_; }
  double parameter() const { return param_; }
  const std::string& name() const { return name_; }

  /// Complementary function N(s) = sup_t (s t - M(t)): closed form for the power and
  /// exp_linear families, numeric Legendre transform otherwise.
  YoungFunction conjugate() const;

 private:
  YoungFunction(YoungKind kind, double param, std::string name, std::function<double(double)> eval);
  YoungKind kind_;
  double param_;
  std::string name_;
  std::function<double(double)> eval_;
  bool normalized_ = true;
};

/// sup_{t >= 0} (s t - M(t)) by a log-grid scan followed by golden-section refinement.
double legendre_conjugate(const YoungFunction& m, double s);

/// Values of a scalar field at quadrature nodes together with the node weights.
struct SampledField {
  std::vector<double> values;
  std::vector<double> weights;

  double measure() const;
  double integrate(const std::function<double(double)>& g) const;
  double max_abs() const;
  SampledField scaled(double c) const;
};

/// inf { l > 0 : int M(|f|/l) <= 1 }.
double luxemburg_norm(const SampledField& f, const YoungFunction& m);

/// Orlicz norm through the Amemiya formula inf_k (1 + int M(k|f|))/k.
double orlicz_norm(const SampledField& f, const YoungFunction& m);

struct HolderCheck {
  double lhs = 0.0;    // int |u v|
  double rhs = 0.0;    // 2 |||u|||_M |||v|||_N
  double slack = 0.0;  // rhs - lhs
};

HolderCheck holder_orlicz(const SampledField& u, const SampledField& v, const YoungFunction& m,
                          const YoungFunction& n);

/// The log-type function together with the data functional int |F|^2 (log(|F| + e))^{(p-2)/p}.
struct LogYoung {
  YoungFunction n_tilde;
  double exponent;
  double hypothesis(const SampledField& abs_f) const;
};

LogYoung log_young(double p);

}  // namespace dissip
