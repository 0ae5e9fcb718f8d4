#include "dissip/forms.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>

namespace dissip {

namespace {

constexpr double kZeroSet = 1e-14;

int cell_count(double extent, double frequency, const FormOptions& o) {
  const double by_length = std::ceil(o.cells_per_unit * extent - 1e-9);
  const double by_wave = std::ceil(o.cells_per_wavelength * extent * frequency / (2 * std::numbers::pi) - 1e-9);
  return std::max(1, static_cast<int>(std::max(by_length, by_wave)));
}

}  // namespace

FormOperator FormOperator::system(GeneralSystem sys) {
  require(sys.dim() == 2, ErrorKind::InvalidArgument, "form evaluation is implemented for N = 2");
  require(sys.m() <= kMaxComponents, ErrorKind::InvalidArgument, "system size exceeds the supported maximum");
  FormOperator op;
  op.system_ = std::move(sys);
  return op;
}

FormOperator FormOperator::lame(CoefficientField field) {
  ess_bounds(field);
  FormOperator op;
  op.field_ = std::move(field);
  return op;
}

FormOperator FormOperator::shifted(double kappa) const {
  FormOperator op = *this;
  op.shift_ += kappa;
  return op;
}

int FormOperator::m() const { return system_ ? system_->m() : 2; }

void FormOperator::blocks(const Eigen::Vector2d& x, Blocks& a) const {
  const int m = this->m();
  if (system_) {
    for (int h = 0; h < 2; ++h)
      for (int k = 0; k < 2; ++k) a[2 * h + k] = system_->A(h, k);
  } else {
    const CoefficientField::Local c = field_->at(x);
    for (int h = 0; h < 2; ++h) {
      for (int k = 0; k < 2; ++k) {
        Block& b = a[2 * h + k];
        b.setZero(2, 2);
        for (int i = 0; i < 2; ++i) {
          for (int j = 0; j < 2; ++j) {
            double v = 0.0;
            if (i == h && j == k) v += c.lambda;
            if (i == j && h == k) v += c.mu;
            if (i == k && h == j) v += c.mu;
            b(i, j) = v;
          }
        }
      }
    }
  }
  if (shift_ != 0.0) {
    for (int h = 0; h < 2; ++h) a[3 * h].diagonal().array() -= shift_;
  }
  (void)m;
}

void for_each_node(const TestField& field, const FormOptions& options,
                   const std::function<void(const Eigen::Vector2d&, double)>& f) {
  const GaussLegendre<double> rule(options.order);
  for (const Region& region : field.regions()) {
    const Eigen::Vector2d lo = region.box.lo, hi = region.box.hi;
    const int nx = cell_count(hi(0) - lo(0), region.frequency(0), options);
    const int ny = cell_count(hi(1) - lo(1), region.frequency(1), options);
    const double hx = (hi(0) - lo(0)) / nx, hy = (hi(1) - lo(1)) / ny;
    for (int cx = 0; cx < nx; ++cx) {
      for (int cy = 0; cy < ny; ++cy) {
        const double ax = lo(0) + cx * hx, ay = lo(1) + cy * hy;
        for (int i = 0; i < rule.order(); ++i) {
          for (int j = 0; j < rule.order(); ++j) {
            const Eigen::Vector2d x(ax + 0.5 * hx * (rule.nodes(i) + 1), ay + 0.5 * hy * (rule.nodes(j) + 1));
            f(x, 0.25 * hx * hy * rule.weights(i) * rule.weights(j));
          }
        }
      }
    }
  }
}

double form_integrand(const Blocks& a, int m, double lambda, const FieldVector& v, const FieldJacobian& jac,
                      bool drop_cross_term) {
  const double n2 = v.squaredNorm();
  double t1 = 0.0, t2 = 0.0, t3 = 0.0;
  double r[2];
  for (int k = 0; k < 2; ++k) r[k] = jac.col(k).dot(v).real();  // Re <v, d_k v>
  for (int h = 0; h < 2; ++h) {
    for (int k = 0; k < 2; ++k) {
      const Block& ahk = a[2 * h + k];
      t1 += jac.col(h).dot(ahk * jac.col(k)).real();
      if (!drop_cross_term) {
        const Block skew = ahk - a[2 * k + h].adjoint();
        t2 += jac.col(h).dot(skew * v).real() * r[k];
      }
      t3 += v.dot(ahk * v).real() * r[k] * r[h];
    }
  }
  (void)m;
  return t1 + lambda * t2 / n2 - lambda * lambda * t3 / (n2 * n2);
}

double dissipativity_form(const FormOperator& op, const LambdaProfile& profile, const TestField& field,
                          const FormOptions& options) {
  require(field.m() == op.m(), ErrorKind::InvalidArgument, "field and operator sizes differ");
  const double threshold = kZeroSet * field.scale();
  Blocks a;
  FieldVector v;
  FieldJacobian jac;
  double sum = 0.0;
  for_each_node(field, options, [&](const Eigen::Vector2d& x, double w) {
    field.eval(x, v, jac);
    const double n = v.norm();
    if (!(n >= threshold) || n == 0.0) return;
    op.blocks(x, a);
    sum += w * form_integrand(a, op.m(), profile.lambda(n), v, jac, options.drop_cross_term);
  });
  if (!std::isfinite(sum)) throw Error(ErrorKind::QuadratureFailure, "non-finite form value");
  return sum;
}

double gradient_energy(const TestField& field, const FormOptions& options) {
  FieldVector v;
  FieldJacobian jac;
  double sum = 0.0;
  for_each_node(field, options, [&](const Eigen::Vector2d& x, double w) {
    field.eval(x, v, jac);
    sum += w * jac.squaredNorm();
  });
  return sum;
}

StrictMarginResult strict_margin(const FormOperator& op, const LambdaProfile& profile,
                                 const std::vector<TestField>& fields, double kappa, const FormOptions& options) {
  StrictMarginResult out;
  out.kappa = kappa;
  out.min_residual = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < fields.size(); ++i) {
    FieldResult r;
    r.family = fields[i].family();
    r.index = static_cast<int>(i);
    r.form = dissipativity_form(op, profile, fields[i], options);
    r.grad_sq = gradient_energy(fields[i], options);
    r.residual = r.form - kappa * r.grad_sq;
    if (r.residual < out.min_residual) {
      out.min_residual = r.residual;
      out.worst = r.index;
    }
    out.fields.push_back(std::move(r));
  }
  return out;
}

void write_field_csv(const StrictMarginResult& result, std::ostream& out) {
  out << "index,family,form,grad_sq,residual\n" << std::setprecision(17);
  for (const FieldResult& r : result.fields) {
    out << r.index << ',' << r.family << ',' << r.form << ',' << r.grad_sq << ',' << r.residual << '\n';
  }
}

ShiftComparison compare_shifted(const FormOperator& op, const LambdaProfile& profile, const TestField& field,
                                double kappa, const FormOptions& options) {
  ShiftComparison c;
  const double form = dissipativity_form(op, profile, field, options);
  const double grad = gradient_energy(field, options);
  c.strict_residual = form - kappa * grad;
  c.shifted_form = dissipativity_form(op.shifted(kappa), profile, field, options);
  c.relaxed_residual = form - kappa * (1.0 - profile.limit().sup_sq) * grad;
  const double tol = 1e-10 * std::max(1.0, std::abs(kappa) * grad);
  c.forward = !(c.strict_residual >= 0.0) || c.shifted_form >= -tol;
  c.backward = !(c.shifted_form >= 0.0) || c.relaxed_residual >= -tol;
  return c;
}

XY xy_decompose(const TestField& field, const Eigen::Vector2d& x) {
  require(field.m() == 2 && field.real_valued(), ErrorKind::InvalidArgument,
          "the X/Y decomposition needs a real planar field");
  FieldVector v;
  FieldJacobian jac;
  field.eval(x, v, jac);
  if (v.norm() < kZeroSet * field.scale()) return {};
  const Eigen::Vector2d vr = v.real();
  const Eigen::Matrix2d jr = jac.real();
  return xy_decompose<double>(vr, jr);
}

FormBreakdown elasticity_breakdown(const CoefficientField& field, const LambdaProfile& profile,
                                   const TestField& vfield, double kappa, const FormOptions& options) {
  require(vfield.m() == 2 && vfield.real_valued(), ErrorKind::InvalidArgument,
          "the elasticity breakdown needs a real planar field");
  ess_bounds(field);
  FormBreakdown b;
  const double threshold = kZeroSet * vfield.scale();
  FieldVector v;
  FieldJacobian jac;
  for_each_node(vfield, options, [&](const Eigen::Vector2d& x, double w) {
    vfield.eval(x, v, jac);
    const Eigen::Vector2d vr = v.real();
    const Eigen::Matrix2d jr = jac.real();
    const CoefficientField::Local c = field.at(x);
    const double lam = c.lambda, mu = c.mu;
    const double div = jr(0, 0) + jr(1, 1);
    const double mixed = jr(0, 0) * jr(0, 0) + jr(1, 1) * jr(1, 1) + 2 * jr(0, 1) * jr(1, 0);

    // Commutator term and its integrated-by-parts form live on all of the support.
    const double denom = lam + 3 * mu;
    const double f = mu * mu / denom;
    const Eigen::Vector2d grad_f = (-mu * mu / (denom * denom)) * c.grad_lambda +
                                   ((2 * mu * lam + 3 * mu * mu) / (denom * denom)) * c.grad_mu;
    b.commutator_term += w * 2 * f * (mixed - div * div);
    double ibp = 0.0;
    for (int k = 0; k < 2; ++k) ibp += grad_f(k) * (vr(k) * div - (jr(k, 0) * vr(0) + jr(k, 1) * vr(1)));
    b.commutator_ibp += w * 2 * ibp;

    const double n = vr.norm();
    if (!(n >= threshold) || n == 0.0) return;
    const double l = profile.lambda(n);
    const double l2 = l * l;
    const XY xy = xy_decompose<double>(vr, jr);
    const double a1 = lam + 2 * mu - kappa, a2 = mu - kappa;
    b.x1_sq += w * a1 * (1 - l2) * xy.x1 * xy.x1;
    b.y1_sq += w * a1 * xy.y1 * xy.y1;
    b.cross_x1y1 += w * 2 * lam * xy.x1 * xy.y1;
    b.x2_sq += w * a2 * (1 - l2) * xy.x2 * xy.x2;
    b.y2_sq += w * a2 * xy.y2 * xy.y2;
    b.cross_x2y2 += w * -2 * mu * xy.x2 * xy.y2;

    const double gamma = mu * (lam + mu) / denom;
    b.gamma_part1 += w * (a1 * (1 - l2) * xy.x1 * xy.x1 + 2 * (lam + mu - gamma) * xy.x1 * xy.y1 + a1 * xy.y1 * xy.y1);
    b.gamma_part2 += w * (a2 * (1 - l2) * xy.x2 * xy.x2 - 2 * gamma * xy.x2 * xy.y2 + a2 * xy.y2 * xy.y2);

    const Eigen::Vector2d grad_norm = jr.transpose() * vr / n;
    b.direct += w * (a2 * jr.squaredNorm() + lam * div * div + mu * mixed -
                     l2 * (a2 * grad_norm.squaredNorm() + (lam + mu) * xy.x1 * xy.x1));
  });
  b.total = b.sum_of_parts();

  const double l2inf = profile.limit().sup_sq;
  const Eigen::ArrayXXd lam = field.lambda(), mu = field.mu();
  const Eigen::ArrayXXd ratio = ((lam + mu) / (lam + 3 * mu)).square();
  const Eigen::ArrayXXd gamma = mu * (lam + mu) / (lam + 3 * mu);
  b.disgamma_margin = ((mu - kappa).square() * (1 - l2inf) - gamma.square()).minCoeff();
  b.disgamma2_margin = ((lam + 2 * mu - kappa).square() * (1 - l2inf) - (lam + 2 * mu).square() * ratio).minCoeff();
  b.disgamma = b.disgamma_margin > 0.0;
  b.disgamma2 = b.disgamma2_margin > 0.0;
  return b;
}

WeightedGradient weighted_gradient(const PhiSpec& phi, const Eigen::VectorXd& u, const Eigen::MatrixXd& jac) {
  require(jac.rows() == u.size(), ErrorKind::InvalidArgument, "Jacobian rows must match the field size");
  const double s = u.norm();
  if (s == 0.0) return {};
  const double ph = phi.value(s);
  const double root = std::sqrt(ph);
  const Eigen::VectorXd grad_norm = jac.transpose() * u / s;
  const Eigen::MatrixXd g = root * jac + (phi.derivative(s) / (2 * root)) * u * grad_norm.transpose();
  return {g.squaredNorm(), ph * jac.squaredNorm()};
}

CounterexampleResult hunt_counterexample(const FormOperator& op, const LambdaProfile& profile, const Rect& domain,
                                         const CounterexampleOptions& options) {
  const Eigen::Vector2d mid(0.5 * (domain.x0 + domain.x1), 0.5 * (domain.y0 + domain.y1));
  GeneralSystem sys = op.constant_system() ? *op.constant_system() : [&] {
    const CoefficientField::Local c = op.field()->at(mid);
    return lame_system(c.lambda, c.mu);
  }();
  for (int h = 0; h < 2; ++h) sys.A(h, h).diagonal().array() -= op.shift();

  const double lam_inf = std::clamp(profile.limit().value, -1.0 + 1e-9, 1.0 - 1e-9);
  ProbeBudget budget = options.budget;
  budget.real_only = true;
  CounterexampleResult out;
  out.probe = algebraic_margin(sys, lam_inf, budget);

  OscillatorySpec spec;
  spec.center = mid;
  spec.outer_radius = 0.45 * std::min(domain.width(), domain.height());
  spec.inner_radius = 0.5 * spec.outer_radius;
  spec.background = options.background;
  spec.omega = FieldVector(out.probe.argmin.omega.real());
  spec.eta = FieldVector(out.probe.argmin.eta.real().normalized());
  spec.xi = out.probe.argmin.xi;
  for (int j = 0; j <= options.max_octave; ++j) {
    spec.rho = std::ldexp(1.0, j);
    const TestField field = oscillatory_field(spec);
    const double form = dissipativity_form(op, profile, field, options.form);
    const double residual = form - options.kappa * gradient_energy(field, options.form);
    out.sweep.emplace_back(spec.rho, residual);
    if (residual < 0.0) {
      out.found = true;
      out.rho = spec.rho;
      out.residual = residual;
      break;
    }
  }
  return out;
}

}  // namespace dissip
