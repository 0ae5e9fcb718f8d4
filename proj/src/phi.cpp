#include "dissip/phi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dissip {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double central_difference(const std::function<double(double)>& f, double s) {
  const double h = std::min(std::max(1e-6, 1e-6 * s), 0.25 * s);
  return (-f(s + 2 * h) + 8 * f(s + h) - 8 * f(s - h) + f(s - 2 * h)) / (12 * h);
}

}  // namespace

std::string to_string(PhiFamily family) {
  switch (family) {
    case PhiFamily::Power: return "power";
    case PhiFamily::ExpSquare: return "exp_square";
    case PhiFamily::TruncatedPower: return "truncated_power";
    case PhiFamily::Custom: return "custom";
  }
  return "unknown";
}

std::string to_string(ConditionStatus status) {
  switch (status) {
    case ConditionStatus::Holds: return "holds";
    case ConditionStatus::Fails: return "fails";
    case ConditionStatus::NotRequired: return "not-required";
  }
  return "unknown";
}

struct PhiSpec::Impl {
  PhiFamily family = PhiFamily::Custom;
  PhiMetadata meta;
  std::string name;
  double p = kNaN;
  double k = kNaN;
  PhiEvaluators ev;

  double rho(double t) const { return t - 0.5 * (t - k + 1) * (t - k + 1); }
  double rho_prime(double t) const { return 1.0 - (t - k + 1); }
};

PhiSpec PhiSpec::power(double p) {
  require(p > 1.0 && std::isfinite(p), ErrorKind::InvalidArgument, "power weight needs p > 1");
  auto impl = std::make_shared<Impl>();
  impl->family = PhiFamily::Power;
  impl->p = p;
  impl->meta = {p - 2.0, 1.0, 2.0, p - 1.0, p - 1.0};
  impl->name = "power(p=" + std::to_string(p) + ")";
  return PhiSpec(std::move(impl));
}

PhiSpec PhiSpec::exp_square() {
  auto impl = std::make_shared<Impl>();
  impl->family = PhiFamily::ExpSquare;
  // (s e^{s^2})' = (1 + 2 s^2) e^{s^2} lies in [1, 3e] on (0, 1).
  impl->meta = {0.0, 1.0, 2.0, 1.0, 3.0 * std::exp(1.0)};
  impl->name = "exp_square";
  return PhiSpec(std::move(impl));
}

PhiSpec PhiSpec::truncated_power(double p, double k) {
  if (!(k > 1.0)) throw Error(ErrorKind::BadTruncation, "truncation level must satisfy k > 1");
  require(p >= 2.0 && std::isfinite(p), ErrorKind::InvalidArgument,
          "truncated power weight needs p >= 2");
  auto impl = std::make_shared<Impl>();
  impl->family = PhiFamily::TruncatedPower;
  impl->p = p;
  impl->k = k;
  impl->meta = {p - 2.0, k - 1.0, k, p - 1.0, p - 1.0};
  impl->name = "truncated_power(p=" + std::to_string(p) + ",k=" + std::to_string(k) + ")";

  // C^1 junctions: rho_k(k-1) = k-1, rho_k'(k-1) = 1, rho_k(k) = k-1/2, rho_k'(k) = 0.
  const double tol = 1e-12 * k;
  require(std::abs(impl->rho(k - 1) - (k - 1)) <= tol && std::abs(impl->rho_prime(k - 1) - 1) <= tol &&
              std::abs(impl->rho(k) - (k - 0.5)) <= tol && std::abs(impl->rho_prime(k)) <= tol,
          ErrorKind::BadTruncation, "truncated weight failed its C^1 junction check");
  return PhiSpec(std::move(impl));
}

PhiSpec PhiSpec::custom(PhiEvaluators evaluators, PhiMetadata meta, std::string name) {
  require(static_cast<bool>(evaluators.value), ErrorKind::InvalidArgument,
          "custom weight needs a value evaluator");
  auto impl = std::make_shared<Impl>();
  impl->family = PhiFamily::Custom;
  impl->meta = meta;
  impl->name = std::move(name);
  impl->ev = std::move(evaluators);
  return PhiSpec(std::move(impl));
}

PhiSpec truncated_power(double p, double k) { return PhiSpec::truncated_power(p, k); }

double PhiSpec::value(double s) const {
  const Impl& m = *impl_;
  switch (m.family) {
    case PhiFamily::Power: return std::pow(s, m.p - 2.0);
    case PhiFamily::ExpSquare: return std::exp(s * s);
    case PhiFamily::TruncatedPower:
      if (s < m.k - 1) return std::pow(s, m.p - 2.0);
      if (s <= m.k) return std::pow(m.rho(s), m.p - 2.0);
      return std::pow(m.k - 0.5, m.p - 2.0);
    case PhiFamily::Custom: return m.ev.value(s);
  }
  return kNaN;
}

double PhiSpec::derivative(double s) const {
  const Impl& m = *impl_;
  switch (m.family) {
    case PhiFamily::Power: return m.p == 2.0 ? 0.0 : (m.p - 2.0) * std::pow(s, m.p - 3.0);
    case PhiFamily::ExpSquare: return 2.0 * s * std::exp(s * s);
    case PhiFamily::TruncatedPower:
      if (m.p == 2.0 || s > m.k) return 0.0;
      if (s < m.k - 1) return (m.p - 2.0) * std::pow(s, m.p - 3.0);
      return (m.p - 2.0) * std::pow(m.rho(s), m.p - 3.0) * m.rho_prime(s);
    case PhiFamily::Custom:
      if (m.ev.derivative) return m.ev.derivative(s);
      if (m.ev.elasticity) return m.ev.elasticity(s) * m.ev.value(s) / s;
      return central_difference(m.ev.value, s);
  }
  return kNaN;
}

double PhiSpec::log_value(double s) const {
  const Impl& m = *impl_;
  switch (m.family) {
    case PhiFamily::Power: return (m.p - 2.0) * std::log(s);
    case PhiFamily::ExpSquare: return s * s;
    case PhiFamily::TruncatedPower:
      if (s < m.k - 1) return (m.p - 2.0) * std::log(s);
      if (s <= m.k) return (m.p - 2.0) * std::log(m.rho(s));
      return (m.p - 2.0) * std::log(m.k - 0.5);
    case PhiFamily::Custom:
      if (m.ev.log_value) return m.ev.log_value(s);
      return std::log(m.ev.value(s));
  }
  return kNaN;
}

double PhiSpec::elasticity(double s) const {
  const Impl& m = *impl_;
  switch (m.family) {
    case PhiFamily::Power: return m.p - 2.0;
    case PhiFamily::ExpSquare: return 2.0 * s * s;
    case PhiFamily::TruncatedPower:
      if (s < m.k - 1) return m.p - 2.0;
      if (s <= m.k) return (m.p - 2.0) * s * m.rho_prime(s) / m.rho(s);
      return 0.0;
    case PhiFamily::Custom:
      if (m.ev.elasticity) return m.ev.elasticity(s);
      return s * derivative(s) / m.ev.value(s);
  }
  return kNaN;
}

PhiFamily PhiSpec::family() const { return impl_->family; }
const PhiMetadata& PhiSpec::meta() const { return impl_->meta; }
double PhiSpec::p() const { return impl_->p; }
double PhiSpec::k() const { return impl_->k; }
std::string PhiSpec::name() const { return impl_->name; }
bool PhiSpec::constant_elasticity() const { return impl_->family == PhiFamily::Power; }

std::vector<double> SampleGrid::points() const {
  require(lo > 0 && hi > lo && nodes >= 2, ErrorKind::InvalidArgument, "malformed sample grid");
  std::vector<double> out(nodes);
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < nodes; ++i) out[i] = std::exp(a + (b - a) * i / (nodes - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

SampleGrid SampleGrid::for_spec(const PhiSpec& spec, int nodes) {
  return {spec.meta().s0 / 10.0, 10.0 * spec.meta().s1, nodes};
}

bool ValidationReport::regular() const {
  for (std::size_t i = 0; i + 1 < conditions.size(); ++i) {
    if (conditions[i].status == ConditionStatus::Fails) return false;
  }
  return true;
}

ValidationReport validate_phi(const PhiSpec& spec) {
  return validate_phi(spec, SampleGrid::for_spec(spec));
}

ValidationReport validate_phi(const PhiSpec& spec, const SampleGrid& grid) {
  const PhiMetadata& meta = spec.meta();
  require(meta.r > -1.0 && meta.s0 > 0 && meta.s1 > meta.s0 && meta.c1 > 0 && meta.c2 >= meta.c1,
          ErrorKind::InvalidArgument, "inconsistent phi metadata");
  require(grid.nodes >= 1000 && grid.lo <= meta.s0 / 10.0 * (1 + 1e-12) &&
              grid.hi >= 10.0 * meta.s1 * (1 - 1e-12),
          ErrorKind::InvalidArgument, "validation grid must cover [s0/10, 10 s1] with >= 1000 nodes");

  const std::vector<double> nodes = grid.points();
  const std::size_t n = nodes.size();
  std::vector<double> phi(n), dphi(n), elast(n);
  for (std::size_t i = 0; i < n; ++i) {
    phi[i] = spec.value(nodes[i]);
    dphi[i] = spec.derivative(nodes[i]);
    elast[i] = spec.elasticity(nodes[i]);
  }

  ValidationReport report;

  // (i) C^1 on (0, inf): finite values and derivatives at every node.
  {
    ConditionCheck c{"(i) phi in C^1", ConditionStatus::Holds, 0.0, nodes.front(), ""};
    for (std::size_t i = 0; i < n; ++i) {
      if (std::isnan(phi[i]) || phi[i] <= 0.0) {
        throw Error(ErrorKind::NonPositivePhi,
                    "phi(" + std::to_string(nodes[i]) + ") = " + std::to_string(phi[i]));
      }
      if (!std::isfinite(phi[i]) || !std::isfinite(dphi[i])) {
        c.status = ConditionStatus::Fails;
        c.margin = -1.0;
        c.worst_node = nodes[i];
        break;
      }
    }
    report.conditions.push_back(c);
  }

  // (ii) (s phi)' = phi (1 + s phi'/phi) > 0; margin is the normalized 1 + elasticity.
  {
    ConditionCheck c{"(ii) (s phi)' > 0", ConditionStatus::Holds,
                     std::numeric_limits<double>::infinity(), nodes.front(), ""};
    for (std::size_t i = 0; i < n; ++i) {
      const double slope = phi[i] + nodes[i] * dphi[i];
      if (!(slope > 0.0)) {
        throw Error(ErrorKind::NotIncreasing,
                    "(s phi(s))' <= 0 at s = " + std::to_string(nodes[i]));
      }
      const double normalized = 1.0 + elast[i];
      if (normalized < c.margin) {
        c.margin = normalized;
        c.worst_node = nodes[i];
      }
    }
    report.conditions.push_back(c);
  }

  // (iii) range of s phi(s) is (0, inf): probed at the ends of the inversion range.
  {
    ConditionCheck c{"(iii) s phi(s) onto (0, inf)", ConditionStatus::Holds, 0.0, kInverseMin, ""};
    const double lo = kInverseMin, hi = kInverseMax;
    const double log_low = std::log(lo) + spec.log_value(lo);
    const double bound = std::log(meta.c2 / (meta.r + 1.0)) + (meta.r + 1.0) * std::log(lo);
    const double low_slack = bound + 1e-9 - log_low;  // s phi(s) <= c2 s^{r+1}/(r+1)
    const double log_high = std::log(hi) + spec.log_value(hi);
    const double log_grid_end = std::log(grid.hi) + spec.log_value(grid.hi);
    const double high_slack = log_high - std::max(0.0, log_grid_end);
    c.margin = std::min(low_slack, high_slack);
    if (!(low_slack >= 0.0)) {
      c.status = ConditionStatus::Fails;
      c.worst_node = lo;
      c.note = "s phi(s) does not vanish at the origin";
    } else if (!(high_slack > 0.0)) {
      c.status = ConditionStatus::Fails;
      c.worst_node = hi;
      c.note = "s phi(s) does not grow without bound";
    }
    c.note += (c.note.empty() ? "" : "; ") + std::string("checked at the inversion range endpoints only");
    report.conditions.push_back(c);
  }

  // (iv) c1 s^r <= (s phi)' <= c2 s^r below s0.
  {
    ConditionCheck c{"(iv) growth near the origin", ConditionStatus::Holds,
                     std::numeric_limits<double>::infinity(), nodes.front(), ""};
    for (std::size_t i = 0; i < n && nodes[i] < meta.s0; ++i) {
      const double ratio = (phi[i] + nodes[i] * dphi[i]) / std::pow(nodes[i], meta.r);
      const double slack = std::min(ratio - meta.c1 * (1 - 1e-9), meta.c2 * (1 + 1e-9) - ratio) / meta.c2;
      if (slack < c.margin) {
        c.margin = slack;
        c.worst_node = nodes[i];
      }
    }
    if (c.margin < 0.0) c.status = ConditionStatus::Fails;
    if (meta.r == 0.0) {
      const double tiny = kInverseMin;
      const double phi0 = spec.value(tiny);
      const double sdphi0 = tiny * spec.derivative(tiny);
      if (!(std::isfinite(phi0) && phi0 > 0.0 && std::abs(sdphi0) <= 1e-6)) {
        c.status = ConditionStatus::Fails;
        c.note = "r = 0 requires a finite positive phi(0+) and s phi'(s) -> 0";
      } else {
        c.note = "r = 0 limits checked at s = 1e-12 only";
      }
    }
    report.conditions.push_back(c);
  }

  // (v) phi' keeps one sign beyond s1.
  {
    ConditionCheck c{"(v) eventual monotonicity", ConditionStatus::Holds, 0.0, meta.s1, ""};
    double max_pos = 0.0, max_neg = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (nodes[i] < meta.s1) continue;
      max_pos = std::max(max_pos, elast[i]);
      max_neg = std::max(max_neg, -elast[i]);
    }
    if (max_pos > 0.0 && max_neg > 0.0) {
      c.status = ConditionStatus::Fails;
      c.margin = -std::min(max_pos, max_neg);
    }
    report.conditions.push_back(c);
  }

  // (vi) |s phi'/phi| nondecreasing.
  {
    ConditionCheck c{"(vi) |s phi'/phi| nondecreasing", ConditionStatus::Holds,
                     std::numeric_limits<double>::infinity(), nodes.front(), ""};
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double a = std::abs(elast[i]), b = std::abs(elast[i + 1]);
      const double step = b - a + 1e-12 * std::max(1.0, a);
      if (step < c.margin) {
        c.margin = step;
        c.worst_node = nodes[i];
      }
    }
    if (c.margin < 0.0) c.status = ConditionStatus::Fails;
    if (spec.family() == PhiFamily::TruncatedPower) {
      c.note = c.margin < 0.0
                   ? "fails as stated (|s phi'/phi| decreases from p-2 to 0); only the sufficiency "
                     "criterion is used, with sup Lambda^2 in place of the limit"
                   : "monotone on the grid; flagged because the family is used via sup Lambda^2";
      c.status = ConditionStatus::NotRequired;
    }
    report.conditions.push_back(c);
  }
  return report;
}

double invert_weighted(const PhiSpec& spec, double t, double exponent) {
  require(t > 0.0 && std::isfinite(t), ErrorKind::InvalidArgument, "inversion needs finite t > 0");
  if (spec.constant_elasticity()) {
    return std::exp(std::log(t) / (1.0 + exponent * (spec.p() - 2.0)));
  }
  const double log_t = std::log(t);
  auto h = [&](double s) {
    const double v = std::log(s) + exponent * spec.log_value(s) - log_t;
    if (std::isnan(v)) throw Error(ErrorKind::BracketFailure, "NaN while inverting the weight");
    return v;
  };

  double lo = 1.0, hi = 1.0;
  if (h(1.0) < 0.0) {
    while (h(hi) < 0.0) {
      lo = hi;
      hi *= 10.0;
      if (hi > kInverseMax) {
        throw Error(ErrorKind::BracketFailure, "no bracket below 1e12 for t = " + std::to_string(t));
      }
    }
  } else {
    while (h(lo) > 0.0) {
      hi = lo;
      lo /= 10.0;
      if (lo < kInverseMin) {
        throw Error(ErrorKind::BracketFailure, "no bracket above 1e-12 for t = " + std::to_string(t));
      }
    }
  }
  double h_lo = h(lo), h_hi = h(hi);
  if (h_lo == 0.0) return lo;
  if (h_hi == 0.0) return hi;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double h_mid = h(mid);
    if (h_mid == 0.0) return mid;
    if (h_mid < 0.0) {
      lo = mid;
      h_lo = h_mid;
    } else {
      hi = mid;
      h_hi = h_mid;
    }
  }
  return -h_lo <= h_hi ? lo : hi;
}

InverseSPhi inverse_s_phi(const PhiSpec& spec, double t) {
  const double s = invert_weighted(spec, t, 1.0);
  return {s, s / t};
}

PhiSpec dual_phi(const PhiSpec& spec) {
  const PhiMetadata& m = spec.meta();
  PhiEvaluators ev;
  ev.value = [spec](double t) { return inverse_s_phi(spec, t).psi; };
  ev.log_value = [spec](double t) { return std::log(inverse_s_phi(spec, t).s) - std::log(t); };
  // With S the inverse of s phi(s): t psi'(t)/psi(t) = -g(S)/(1 + g(S)), g = s phi'/phi.
  ev.elasticity = [spec](double t) {
    const double g = spec.elasticity(inverse_s_phi(spec, t).s);
    return -g / (1.0 + g);
  };
  ev.derivative = [spec](double t) {
    const InverseSPhi inv = inverse_s_phi(spec, t);
    const double g = spec.elasticity(inv.s);
    return inv.psi * (-g / (1.0 + g)) / t;
  };

  PhiMetadata dm;
  dm.r = -m.r / (m.r + 1.0);
  dm.s0 = m.s0 * spec.value(m.s0);
  dm.s1 = m.s1 * spec.value(m.s1);
  // (t psi(t))' = 1 / (s phi)'(S(t)); bound it against t^{r~} below s0~.
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  const int samples = 200;
  for (int i = 0; i <= samples; ++i) {
    const double t = dm.s0 * std::pow(1e-6, 1.0 - double(i) / samples);
    double s = 0.0;
    try {
      s = inverse_s_phi(spec, t).s;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::BracketFailure) throw;
      continue;
    }
    const double slope = 1.0 / (spec.value(s) * (1.0 + spec.elasticity(s)));
    const double ratio = slope / std::pow(t, dm.r);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  require(hi > 0.0, ErrorKind::BracketFailure, "no sample of the conjugate weight inside the inversion range");
  dm.c1 = lo * (1.0 - 1e-6);
  dm.c2 = hi * (1.0 + 1e-6);
  return PhiSpec::custom(std::move(ev), dm, "dual(" + spec.name() + ")");
}

}  // namespace dissip
