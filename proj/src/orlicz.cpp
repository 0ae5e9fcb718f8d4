#include "dissip/orlicz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace dissip {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

std::string fmt(double x) {
  std::ostringstream s;
  s << x;
  return s.str();
}

template <typename F>
double golden_max(F&& h, double a, double b, double rel_tol) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  double hc = h(c), hd = h(d);
  for (int it = 0; it < 400 && (b - a) > rel_tol * std::max(std::abs(a), std::abs(b)); ++it) {
    if (hc < hd) {
      a = c;
      c = d;
      hc = hd;
      d = a + g * (b - a);
      hd = h(d);
    } else {
      b = d;
      d = c;
      hd = hc;
      c = b - g * (b - a);
      hc = h(c);
    }
  }
  return std::max(hc, hd);
}

}  // namespace

YoungFunction::YoungFunction(YoungKind kind, double param, std::string name, std::function<double(double)> eval)
    : kind_(kind), param_(param), name_(std::move(name)), eval_(std::move(eval)) {}

YoungFunction YoungFunction::power(double p, bool normalized) {
  require(p > 1.0, ErrorKind::InvalidArgument, "power Young function needs p > 1");
  YoungFunction out(YoungKind::Power, p, normalized ? "t^p/p(p=" + fmt(p) + ")" : "t^p(p=" + fmt(p) + ")",
                    [p, normalized](double t) { return normalized ? std::pow(t, p) / p : std::pow(t, p); });
  out.normalized_ = normalized;
  return out;
}

YoungFunction YoungFunction::log_type(double p) {
  require(p >= 2.0, ErrorKind::InvalidArgument, "log-type Young function needs p >= 2");
  const double beta = (p - 2.0) / p;
  return {YoungKind::LogType, p, "tlog(p=" + fmt(p) + ")",
          [beta](double t) { return t * std::pow(std::log(t + std::numbers::e), beta); }};
}

YoungFunction YoungFunction::exp_linear() {
  return {YoungKind::Exp, 0.0, "exp", [](double t) { return std::expm1(kFourPi * t); }};
}

YoungFunction YoungFunction::exp_power(double p) {
  require(p > 2.0, ErrorKind::InvalidArgument, "exp-power Young function needs p > 2");
  const double a = p / (p - 2.0);
  return {YoungKind::ExpPower, p, "exppow(p=" + fmt(p) + ")",
          [a](double t) { return std::expm1(kFourPi * std::pow(t, a)); }};
}

YoungFunction YoungFunction::custom(std::function<double(double)> m, std::string name) {
  return {YoungKind::Custom, 0.0, std::move(name), std::move(m)};
}

YoungFunction YoungFunction::conjugate() const {
  switch (kind_) {
    case YoungKind::Power: {
      const double p = param_;
      const double q = p / (p - 1.0);
      if (normalized_) return power(q, true);
      return {YoungKind::Conjugate, q, "conj(" + name_ + ")", [p](double s) {
                return s * (1.0 - 1.0 / p) * std::pow(s / p, 1.0 / (p - 1.0));
              }};
    }
    case YoungKind::Exp:
      return {YoungKind::Conjugate, 0.0, "conj(exp)", [](double s) {
                if (s <= kFourPi) return 0.0;
                const double u = s / kFourPi;
                return u * std::log(u) - u + 1.0;
              }};
    default: {
      const YoungFunction self = *this;
      return {YoungKind::Conjugate, param_, "conj(" + name_ + ")",
              [self](double s) { return legendre_conjugate(self, s); }};
    }
  }
}

double legendre_conjugate(const YoungFunction& m, double s) {
  if (s <= 0.0) return 0.0;
  auto h = [&](double t) {
    const double v = m(t);
    return std::isfinite(v) ? s * t - v : -std::numeric_limits<double>::infinity();
  };
  constexpr double kPerDecade = 8.0;
  double prev_t = 0.0, best_t = 0.0, best_h = 0.0;
  double next_t = 0.0;
  bool descending = false;
  for (int i = 0;; ++i) {
    const double t = std::pow(10.0, -8.0 + i / kPerDecade);
    if (t > 1e300) break;
    const double v = h(t);
    if (v > best_h) {
      best_h = v;
      best_t = t;
      prev_t = i == 0 ? 0.0 : std::pow(10.0, -8.0 + (i - 1) / kPerDecade);
    } else if (v < best_h || !std::isfinite(v)) {
      next_t = t;
      descending = true;
      break;
    }
  }
  if (!descending) return best_h;
  if (best_t == 0.0) next_t = 1e-8;
  return std::max(0.0, std::max(best_h, golden_max(h, prev_t, next_t, 1e-14)));
}

double SampledField::measure() const {
  double out = 0.0;
  for (double w : weights) out += w;
  return out;
}

double SampledField::integrate(const std::function<double(double)>& g) const {
  double out = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) out += weights[i] * g(values[i]);
  return out;
}

double SampledField::max_abs() const {
  double out = 0.0;
  for (double v : values) out = std::max(out, std::abs(v));
  return out;
}

SampledField SampledField::scaled(double c) const {
  SampledField out = *this;
  for (double& v : out.values) v *= c;
  return out;
}

double luxemburg_norm(const SampledField& f, const YoungFunction& m) {
  require(f.values.size() == f.weights.size(), ErrorKind::InvalidArgument, "values and weights differ in size");
  const double top = f.max_abs();
  if (top == 0.0) return 0.0;
  auto modular = [&](double l) { return f.integrate([&](double v) { return m(std::abs(v) / l); }); };

  double hi = top;
  double ihi = modular(hi);
  while (!(ihi <= 1.0)) {
    hi *= 2.0;
    if (hi > top * 1e12) {
      if (std::isinf(ihi) || std::isnan(ihi)) {
        throw Error(ErrorKind::NotIntegrable, "modular is infinite for every scale in the search range");
      }
      throw Error(ErrorKind::OrliczNormFailure, "no upper bracket for the Luxemburg norm");
    }
    ihi = modular(hi);
  }
  double lo = hi;
  while (modular(lo) <= 1.0) {
    lo /= 2.0;
    if (lo < top * 1e-12) throw Error(ErrorKind::OrliczNormFailure, "no lower bracket for the Luxemburg norm");
  }
  while (hi / lo - 1.0 > 1e-12) {
    const double mid = std::sqrt(lo * hi);
    if (modular(mid) > 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

double orlicz_norm(const SampledField& f, const YoungFunction& m) {
  const double lux = luxemburg_norm(f, m);
  if (lux == 0.0) return 0.0;
  auto g = [&](double log_k) {
    const double k = std::exp(log_k);
    const double v = (1.0 + f.integrate([&](double x) { return m(k * std::abs(x)); })) / k;
    return std::isfinite(v) ? -v : -std::numeric_limits<double>::infinity();
  };
  const double k0 = std::log(1.0 / lux);
  const double best = golden_max(g, k0 - std::log(2.0), k0 + std::log(1e6), 1e-13);
  return std::min(-best, -g(k0));
}

HolderCheck holder_orlicz(const SampledField& u, const SampledField& v, const YoungFunction& m,
                          const YoungFunction& n) {
  require(u.values.size() == v.values.size(), ErrorKind::InvalidArgument, "fields sampled on different nodes");
  HolderCheck out;
  for (std::size_t i = 0; i < u.values.size(); ++i) out.lhs += u.weights[i] * std::abs(u.values[i] * v.values[i]);
  out.rhs = 2.0 * luxemburg_norm(u, m) * luxemburg_norm(v, n);
  out.slack = out.rhs - out.lhs;
  return out;
}

double LogYoung::hypothesis(const SampledField& abs_f) const {
  return abs_f.integrate([&](double f) { return f * f * std::pow(std::log(std::abs(f) + std::numbers::e), exponent); });
}

LogYoung log_young(double p) { return {YoungFunction::log_type(p), (p - 2.0) / p}; }

}  // namespace dissip
