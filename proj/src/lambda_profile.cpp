#include "dissip/lambda_profile.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <optional>

namespace dissip {

struct LambdaProfile::Cache {
  std::once_flag once;
  std::optional<LambdaLimit> limit;
};

namespace {

double relative_variation(double a, double b, double c) {
  return std::max(std::abs(c - b), std::abs(b - a)) / std::max(std::abs(c), 1e-6);
}

double aitken(double a, double b, double c) {
  const double denom = c - 2 * b + a;
  if (std::abs(denom) < 1e-300) return c;
  const double extrapolated = c - (c - b) * (c - b) / denom;
  return std::isfinite(extrapolated) ? extrapolated : c;
}

LambdaLimit compute_limit(const LambdaProfile& profile) {
  const LambdaOptions& opt = profile.options();
  LambdaLimit out;
  const std::vector<double> grid = log_grid(opt.t_min, opt.horizon, opt.nodes_per_decade);
  std::vector<double> values;
  values.reserve(grid.size());
  out.sq_monotone = true;
  for (double t : grid) {
    const double l = profile.lambda(t);
    if (!std::isfinite(l)) throw Error(ErrorKind::NonConvergent, "Lambda is not finite on the grid");
    if (!values.empty() && l * l < values.back() * values.back() * (1 - 1e-10) - 1e-14) {
      out.sq_monotone = false;
    }
    values.push_back(l);
    out.samples.emplace_back(t, l);
    out.sup_sq = std::max(out.sup_sq, l * l);
    out.max_abs = std::max(out.max_abs, std::abs(l));
  }
  out.horizon = grid.back();

  const std::size_t n = values.size();
  double a = values[n - 3], b = values[n - 2], c = values[n - 1];
  out.tail_variation = relative_variation(a, b, c);
  if (out.tail_variation < opt.tail_tol) {
    out.value = c;
  } else {
    // Continue the tail in s, where Lambda is explicit, decade by decade.
    out.extended = true;
    double s = profile.zeta(opt.horizon);
    bool converged = false;
    while (s * 10.0 <= kInverseMax) {
      s *= 10.0;
      const double l = profile.lambda_at_s(s);
      if (!std::isfinite(l)) break;
      a = b;
      b = c;
      c = l;
      out.sup_sq = std::max(out.sup_sq, l * l);
      out.max_abs = std::max(out.max_abs, std::abs(l));
      out.tail_variation = relative_variation(a, b, c);
      if (out.tail_variation < opt.tail_tol) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      throw Error(ErrorKind::NonConvergent,
                  "Lambda tail variation " + std::to_string(out.tail_variation) +
                      " exceeds tolerance");
    }
    out.value = std::clamp(aitken(a, b, c), -1.0, 1.0);
    out.horizon = std::numeric_limits<double>::infinity();
  }
  out.value += 0.0;  // normalize -0
  out.sup_sq = std::max(out.sup_sq, out.value * out.value);
  out.sup_below_one = out.sup_sq < 1.0 - opt.sup_tol;
  return out;
}

}  // namespace

std::vector<double> log_grid(double lo, double hi, int per_decade) {
  require(lo > 0 && hi > lo && per_decade >= 1, ErrorKind::InvalidArgument, "malformed log grid");
  const double decades = std::log10(hi / lo);
  const int steps = std::max(2, static_cast<int>(std::ceil(decades * per_decade - 1e-9)));
  std::vector<double> out(steps + 1);
  for (int i = 0; i <= steps; ++i) out[i] = lo * std::pow(10.0, decades * i / steps);
  out.front() = lo;
  out.back() = hi;
  return out;
}

LambdaProfile::LambdaProfile(PhiSpec phi, LambdaOptions options)
    : phi_(std::move(phi)), options_(options), cache_(std::make_shared<Cache>()) {
  require(options_.t_min > 0 && options_.horizon > options_.t_min * 1000 &&
              options_.nodes_per_decade >= 1 && options_.tail_tol > 0,
          ErrorKind::InvalidArgument, "malformed Lambda options");
}

double LambdaProfile::zeta(double t) const { return invert_weighted(phi_, t, 0.5); }

double LambdaProfile::theta(double t) const { return zeta(t) / t; }

double LambdaProfile::lambda_at_s(double s) const {
  const double g = phi_.elasticity(s);
  return -g / (g + 2.0);
}

double LambdaProfile::lambda(double t) const {
  require(t > 0.0, ErrorKind::InvalidArgument, "Lambda needs t > 0");
  if (phi_.constant_elasticity()) return lambda_at_s(1.0);
  try {
    return lambda_at_s(zeta(t));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::BracketFailure || t >= 1.0) throw;
  }
  // Below the inversion range Lambda is frozen at the smallest s where phi can be evaluated.
  for (double s = kInverseMin; s < 1e-6; s *= 10.0) {
    try {
      return lambda_at_s(s);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::BracketFailure) throw;
    }
  }
  throw Error(ErrorKind::BracketFailure, "Lambda is not computable near t = 0");
}

const LambdaLimit& LambdaProfile::limit() const {
  std::call_once(cache_->once, [this] { cache_->limit = compute_limit(*this); });
  return *cache_->limit;
}

double lambda_of(const LambdaProfile& profile, double t) { return profile.lambda(t); }

const LambdaLimit& lambda_infinity(const LambdaProfile& profile) { return profile.limit(); }

}  // namespace dissip
