#include "dissip/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dissip {

namespace {

using std::numbers::pi;

// Probe coordinates: theta, then m-1 hyperspherical angles of |omega|, then m-1 phases.
struct ProbeLayout {
  int m;
  bool real_only;

  int angles() const { return m - 1; }
  int phases() const { return real_only ? 0 : m - 1; }
  int size() const { return 1 + angles() + phases(); }
  double upper(int d) const {
    if (d == 0) return pi;
    if (d <= angles()) return real_only ? pi : pi / 2;
    return 2 * pi;
  }
  bool periodic(int d) const { return d == 0 || d > angles() || real_only; }

  Eigen::Vector2d xi(const Eigen::VectorXd& q) const { return {std::cos(q(0)), std::sin(q(0))}; }

  Eigen::VectorXcd omega(const Eigen::VectorXd& q) const {
    Eigen::VectorXcd w(m);
    double carry = 1.0;
    for (int i = 0; i < m - 1; ++i) {
      w(i) = carry * std::cos(q(1 + i));
      carry *= std::sin(q(1 + i));
    }
    w(m - 1) = carry;
    for (int i = 1; i < m && !real_only; ++i) w(i) *= std::polar(1.0, q(angles() + i));
    return w;
  }
};

double quadratic_value(const Eigen::MatrixXcd& s, double lambda_inf, const Eigen::VectorXcd& eta,
                       const Eigen::VectorXcd& omega, std::complex<double> s_omega_omega) {
  auto inner = [](const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) { return b.dot(a); };
  const double re_eo = inner(eta, omega).real();
  const std::complex<double> value = inner(s * eta, eta) -
                                     lambda_inf * lambda_inf * s_omega_omega * re_eo * re_eo +
                                     lambda_inf * (inner(s * omega, eta) - inner(s * eta, omega)) * re_eo;
  return value.real();
}

struct InnerMin {
  double value;
  Eigen::VectorXcd eta;
};

// Minimum over unit eta of the real quadratic form eta -> Q(eta), via polarization.
InnerMin inner_min(const GeneralSystem& sys, double lambda_inf, const Eigen::Vector2d& xi,
                   const Eigen::VectorXcd& omega, bool real_only) {
  const int m = sys.m();
  const int n = real_only ? m : 2 * m;
  const Eigen::MatrixXcd s = sys.symbol(xi);
  const std::complex<double> soo = omega.dot(s * omega);
  auto basis = [&](int k) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(m);
    e(k % m) = k < m ? std::complex<double>(1, 0) : std::complex<double>(0, 1);
    return e;
  };
  std::vector<Eigen::VectorXcd> e(n);
  Eigen::VectorXd diag(n);
  for (int k = 0; k < n; ++k) {
    e[k] = basis(k);
    diag(k) = quadratic_value(s, lambda_inf, e[k], omega, soo);
  }
  Eigen::MatrixXd q(n, n);
  for (int i = 0; i < n; ++i) {
    q(i, i) = diag(i);
    for (int j = i + 1; j < n; ++j) {
      const double both = quadratic_value(s, lambda_inf, e[i] + e[j], omega, soo);
      q(i, j) = q(j, i) = 0.5 * (both - diag(i) - diag(j));
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q);
  const Eigen::VectorXd x = es.eigenvectors().col(0);
  Eigen::VectorXcd eta = Eigen::VectorXcd::Zero(m);
  for (int k = 0; k < n; ++k) eta += x(k) * e[k];
  return {es.eigenvalues()(0), eta};
}

double nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd& x, double step,
                   int max_iter) {
  const int d = static_cast<int>(x.size());
  std::vector<Eigen::VectorXd> pts(d + 1, x);
  std::vector<double> vals(d + 1);
  for (int i = 0; i < d; ++i) pts[i + 1](i) += step;
  for (int i = 0; i <= d; ++i) vals[i] = f(pts[i]);
  std::vector<int> order(d + 1);
  for (int it = 0; it < max_iter; ++it) {
    for (int i = 0; i <= d; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return vals[a] < vals[b]; });
    const int best = order.front(), worst = order.back(), second = order[d - 1];
    if (std::abs(vals[worst] - vals[best]) <= 1e-14 * std::max(1.0, std::abs(vals[best]))) break;
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(d);
    for (int i = 0; i <= d; ++i)
      if (i != worst) centroid += pts[i];
    centroid /= d;
    const Eigen::VectorXd reflected = centroid + (centroid - pts[worst]);
    const double fr = f(reflected);
    if (fr < vals[best]) {
      const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - pts[worst]);
      const double fe = f(expanded);
      if (fe < fr) {
        pts[worst] = expanded;
        vals[worst] = fe;
      } else {
        pts[worst] = reflected;
        vals[worst] = fr;
      }
    } else if (fr < vals[second]) {
      pts[worst] = reflected;
      vals[worst] = fr;
    } else {
      const Eigen::VectorXd contracted = centroid + 0.5 * (pts[worst] - centroid);
      const double fc = f(contracted);
      if (fc < vals[worst]) {
        pts[worst] = contracted;
        vals[worst] = fc;
      } else {
        for (int i = 0; i <= d; ++i) {
          if (i == best) continue;
          pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
          vals[i] = f(pts[i]);
        }
      }
    }
  }
  const int best = static_cast<int>(std::min_element(vals.begin(), vals.end()) - vals.begin());
  x = pts[best];
  return vals[best];
}

bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

}  // namespace

std::string to_string(VerdictStatus status) {
  switch (status) {
    case VerdictStatus::StrictDissipative: return "StrictDissipative";
    case VerdictStatus::DissipativeBoundary: return "DissipativeBoundary";
    case VerdictStatus::NotDissipative: return "NotDissipative";
    case VerdictStatus::Inconclusive: return "Inconclusive";
  }
  return "Unknown";
}

double algebraic_form(const GeneralSystem& sys, double lambda_inf, const AlgebraicProbe& probe) {
  require(sys.dim() == 2, ErrorKind::InvalidArgument, "the algebraic condition is stated for N = 2");
  const Eigen::MatrixXcd s = sys.symbol(probe.xi);
  return quadratic_value(s, lambda_inf, probe.eta, probe.omega, probe.omega.dot(s * probe.omega));
}

AlgebraicResult algebraic_margin(const GeneralSystem& sys, double lambda_inf, const ProbeBudget& budget) {
  require(sys.dim() == 2, ErrorKind::InvalidArgument, "the algebraic condition is stated for N = 2");
  require(lambda_inf > -1.0 && lambda_inf < 1.0, ErrorKind::InvalidArgument, "Lambda_inf must lie in (-1, 1)");
  require(sys.finite(), ErrorKind::InvalidArgument, "system coefficients must be finite");
  require(budget.grid >= 2 && budget.refinements >= 2, ErrorKind::InvalidArgument, "probe budget too small");

  const ProbeLayout layout{sys.m(), budget.real_only};
  const int d = layout.size();
  auto objective = [&](const Eigen::VectorXd& q) {
    return inner_min(sys, lambda_inf, layout.xi(q), layout.omega(q), budget.real_only).value;
  };

  // Coarse scan; the budget grid^3 is spread over d coordinates.
  const int per_dim =
      d <= 3 ? budget.grid : std::max(4, static_cast<int>(std::lround(std::pow(budget.grid, 3.0 / d))));
  std::vector<int> idx(d, 0);
  auto coord = [&](int dim, int i) {
    return layout.periodic(dim) ? layout.upper(dim) * i / per_dim : layout.upper(dim) * i / (per_dim - 1);
  };
  struct Candidate {
    double value;
    Eigen::VectorXd q;
  };
  std::vector<Candidate> best;  // kept sorted, ties broken lexicographically
  const std::size_t keep = 3;
  for (;;) {
    Eigen::VectorXd q(d);
    for (int k = 0; k < d; ++k) q(k) = coord(k, idx[k]);
    const double v = objective(q);
    auto pos = std::find_if(best.begin(), best.end(), [&](const Candidate& c) {
      return v < c.value || (v == c.value && lex_less(q, c.q));
    });
    if (best.size() < keep || pos != best.end()) {
      best.insert(pos, {v, q});
      if (best.size() > keep) best.pop_back();
    }
    int k = d - 1;
    while (k >= 0 && ++idx[k] == per_dim) idx[k--] = 0;
    if (k < 0) break;
  }

  AlgebraicResult result;
  result.min_value = std::numeric_limits<double>::infinity();
  Eigen::VectorXd argmin;
  for (const Candidate& start : best) {
    Eigen::VectorXd q = start.q;
    double value = start.value;
    double step = 0.5 * pi / per_dim;
    bool stable = false;
    int round = 0;
    for (round = 1; round <= budget.refinements; ++round) {
      const double polished = nelder_mead(objective, q, step, 400 * d);
      const double change = std::abs(value - polished);
      value = std::min(value, polished);
      if (round >= 2 && change <= budget.stabilize * std::max(1.0, std::abs(value))) {
        stable = true;
        break;
      }
      step *= 0.5;
    }
    if (!stable) {
      throw Error(ErrorKind::BudgetExhausted,
                  "probe refinement did not stabilize within " + std::to_string(budget.refinements) + " rounds");
    }
    if (value < result.min_value || (value == result.min_value && lex_less(q, argmin))) {
      result.min_value = value;
      result.rounds = round;
      argmin = q;
    }
  }

  result.argmin.xi = layout.xi(argmin);
  result.argmin.omega = layout.omega(argmin);
  result.argmin.eta = inner_min(sys, lambda_inf, result.argmin.xi, result.argmin.omega, budget.real_only).eta;
  return result;
}

Verdict lame2d_verdict(double lambda_inf_sq, const CoefficientField& field, double c0,
                       std::optional<double> kappa_hint) {
  require(c0 > 0.0, ErrorKind::InvalidArgument, "the commutator constant C0 must be positive");
  const EssBounds bounds = ess_bounds(field);
  Verdict v;
  v.lambda_inf_sq = lambda_inf_sq;
  v.rhs = 1.0 - bounds.sup_ratio;
  v.margin = v.rhs - lambda_inf_sq;
  v.c0 = c0;
  const double tol = 1e-10 * std::max(1.0, std::abs(v.rhs));
  if (std::abs(v.margin) <= tol) {
    v.status = VerdictStatus::DissipativeBoundary;
    v.notes.push_back("equality Lambda_inf^2 = 1 - ess sup ((lambda+mu)/(lambda+3mu))^2: the necessary "
                      "condition holds, the strict sufficient condition does not");
    return v;
  }
  if (v.margin < 0.0) {
    v.status = VerdictStatus::NotDissipative;
    v.notes.push_back("necessary condition Lambda_inf^2 <= 1 - ess sup ((lambda+mu)/(lambda+3mu))^2 violated");
    return v;
  }

  const double delta = 0.5 * v.margin;
  const double bound = delta / (2.0 * (1.0 - lambda_inf_sq)) * std::min(bounds.inf_mu, bounds.inf_lam2mu);
  double kappa = 0.9 * bound;
  if (kappa_hint && *kappa_hint > 0.0 && *kappa_hint < bound) kappa = *kappa_hint;
  v.kappa = kappa;
  v.bmo_threshold = kappa * (1.0 - lambda_inf_sq) / (2.0 * c0);
  v.bmo_value = field.is_constant() ? 0.0 : bmo_seminorm(commutator_weight(field));
  v.notes.push_back("sufficient condition: Lambda_inf^2 < 1 - ess sup ((lambda+mu)/(lambda+3mu))^2 with small "
                    "BMO seminorm of mu^2/(lambda+3mu)");
  v.notes.push_back(std::string("BMO value is a ") + kBmoLabel);
  if (*v.bmo_value <= *v.bmo_threshold) {
    v.status = VerdictStatus::StrictDissipative;
  } else {
    v.status = VerdictStatus::Inconclusive;
    v.notes.push_back("BMO seminorm exceeds kappa (1 - Lambda_inf^2)/(2 C0)");
  }
  return v;
}

Verdict lame2d_verdict(const PhiSpec& phi, const CoefficientField& field, double c0,
                       std::optional<double> kappa_hint) {
  const LambdaProfile profile(phi);
  return lame2d_verdict(profile.limit().sup_sq, field, c0, kappa_hint);
}

ExponentBracket power_threshold(const CoefficientField& field, double p_lo, double p_hi, double tol) {
  require(p_lo > 1.0 && p_hi > p_lo && tol > 0.0, ErrorKind::InvalidArgument, "malformed exponent bracket");
  auto holds = [&](double p) {
    return lame2d_verdict(PhiSpec::power(p), field).status != VerdictStatus::NotDissipative;
  };
  require(holds(p_lo) && !holds(p_hi), ErrorKind::BracketFailure, "verdict does not flip inside the exponent bracket");
  ExponentBracket b{p_lo, p_hi, 0};
  while (b.above - b.below > tol) {
    const double mid = 0.5 * (b.below + b.above);
    (holds(mid) ? b.below : b.above) = mid;
    ++b.iterations;
  }
  return b;
}

double lameNd_threshold(double lambda_c, double mu_c) {
  require(mu_c > 0.0 && lambda_c + 2 * mu_c > 0.0, ErrorKind::EllipticityViolation,
          "constant Lame pair needs mu > 0 and lambda + 2 mu > 0");
  return lambda_c + mu_c > 0.0 ? mu_c / (lambda_c + 2 * mu_c) : (lambda_c + 2 * mu_c) / mu_c;
}

double poisson_threshold(double nu) {
  require(nu < 0.5, ErrorKind::InvalidArgument, "Poisson ratio must be below 1/2");
  return (1.0 - 2.0 * nu) / (2.0 * (1.0 - nu));
}

Verdict lameNd_sufficient(double lambda_inf_sq, double lambda_c, double mu_c) {
  Verdict v;
  v.lambda_inf_sq = lambda_inf_sq;
  v.rhs = lameNd_threshold(lambda_c, mu_c);
  v.margin = v.rhs - lambda_inf_sq;
  v.status = v.margin > 0.0 ? VerdictStatus::StrictDissipative : VerdictStatus::Inconclusive;
  v.notes.push_back(lambda_c + mu_c > 0.0 ? "sufficient condition Lambda_inf^2 < mu/(lambda+2mu)"
                                          : "sufficient condition Lambda_inf^2 < (lambda+2mu)/mu");
  if (v.status == VerdictStatus::Inconclusive) v.notes.push_back("the condition is only sufficient");
  return v;
}

Verdict lameNd_sufficient(const PhiSpec& phi, double lambda_c, double mu_c) {
  const LambdaProfile profile(phi);
  return lameNd_sufficient(profile.limit().sup_sq, lambda_c, mu_c);
}

double perturbation_constant(double lambda_inf_sq, int dim) {
  require(dim >= 2, ErrorKind::InvalidArgument, "dimension must be >= 2");
  // sigma multiplies |grad v|^2 + sum d_k v_j d_j v_k - L^2 (|grad|v||^2 + X_1^2): at most (2 + 2L^2)|grad v|^2.
  // eps multiplies (div v)^2 - L^2 X_1^2: at most (N + L^2)|grad v|^2.
  return std::max(2.0 + 2.0 * lambda_inf_sq, dim + lambda_inf_sq);
}

double perturbation_budget(double lambda_inf_sq, double kappa0, int dim) {
  if (kappa0 < 0.0) throw Error(ErrorKind::NotStrict, "kappa0 = " + std::to_string(kappa0) + " < 0");
  return kappa0 / (2.0 * perturbation_constant(lambda_inf_sq, dim));
}

double perturbation_budget(const PhiSpec& phi, double lambda_c, double mu_c, double kappa0, int dim) {
  lameNd_threshold(lambda_c, mu_c);
  const LambdaProfile profile(phi);
  return perturbation_budget(profile.limit().sup_sq, kappa0, dim);
}

}  // namespace dissip
