#include "dissip/young.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dissip/quadrature.hpp"

namespace dissip {

YoungPair::YoungPair(PhiSpec phi, double rel_tol) : phi_(std::move(phi)), rel_tol_(rel_tol) {}

double YoungPair::Phi(double s) const {
  require(s >= 0.0, ErrorKind::InvalidArgument, "Phi needs s >= 0");
  if (s == 0.0) return 0.0;
  auto f = [this](double x) { return x > 0.0 ? x * phi_.value(x) : 0.0; };
  return integrate_adaptive(f, 0.0, s, 1e-12, rel_tol_).value;
}

double YoungPair::Psi(double t) const {
  require(t >= 0.0, ErrorKind::InvalidArgument, "Psi needs t >= 0");
  if (t == 0.0) return 0.0;
  // sigma psi(sigma) is the inverse S(sigma) of s phi(s).
  auto f = [this](double x) { return x > 0.0 ? inverse_s_phi(phi_, x).s : 0.0; };
  return integrate_adaptive(f, 0.0, t, 1e-12, rel_tol_).value;
}

YoungPair young_pair(const PhiSpec& spec) { return YoungPair(spec); }

YoungCheck check_young(const YoungPair& pair, const std::vector<double>& nodes) {
  YoungCheck out;
  out.zero_at_zero = pair.Phi(0.0) == 0.0 && pair.Psi(0.0) == 0.0;

  std::vector<double> x = nodes;
  std::sort(x.begin(), x.end());
  std::vector<double> phi(x.size()), psi(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    phi[i] = pair.Phi(x[i]);
    psi[i] = pair.Psi(x[i]);
  }

  out.nondecreasing = true;
  out.convex = true;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double tol = 1e-10 * std::max({1.0, std::abs(phi[i + 1]), std::abs(psi[i + 1])});
    if (phi[i + 1] < phi[i] - tol || psi[i + 1] < psi[i] - tol) out.nondecreasing = false;
  }
  // Secant slopes of a convex function are nondecreasing.
  for (std::size_t i = 0; i + 2 < x.size(); ++i) {
    auto slope = [&](const std::vector<double>& v, std::size_t j) {
      return (v[j + 1] - v[j]) / (x[j + 1] - x[j]);
    };
    for (const auto* v : {&phi, &psi}) {
      const double a = slope(*v, i), b = slope(*v, i + 1);
      if (b < a - 1e-8 * std::max(1.0, std::abs(a))) out.convex = false;
    }
  }

  out.min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) {
      out.min_gap = std::min(out.min_gap, phi[i] + psi[j] - x[i] * x[j]);
    }
  }
  return out;
}

}  // namespace dissip
