#include "dissip/test_fields.hpp"

#include <cmath>
#include <numbers>

namespace dissip {

namespace {

double bump1(double t) {
  if (std::abs(t) >= 1.0) return 0.0;
  const double q = 1.0 - t * t;
  return q * q * q;
}

double bump1_prime(double t) {
  if (std::abs(t) >= 1.0) return 0.0;
  const double q = 1.0 - t * t;
  return -6.0 * t * q * q;
}

Box square(const Eigen::Vector2d& c, double r) {
  return {c.array() - r, c.array() + r};
}

Box make_box(double x0, double x1, double y0, double y1) {
  Box b{Eigen::VectorXd(2), Eigen::VectorXd(2)};
  b.lo << x0, y0;
  b.hi << x1, y1;
  return b;
}

}  // namespace

TestField::TestField(std::string family, int m, Evaluator eval, std::vector<Region> regions, double scale)
    : family_(std::move(family)), m_(m), eval_(std::move(eval)), regions_(std::move(regions)), scale_(scale) {
  require(m >= 1 && m <= kMaxComponents, ErrorKind::InvalidArgument, "unsupported number of field components");
  require(!regions_.empty(), ErrorKind::InvalidArgument, "test field needs an integration region");
  require(scale_ > 0.0, ErrorKind::InvalidArgument, "test field scale must be positive");
}

Box TestField::support() const {
  Box out = regions_.front().box;
  for (const Region& r : regions_) {
    out.lo = out.lo.cwiseMin(r.box.lo);
    out.hi = out.hi.cwiseMax(r.box.hi);
  }
  return out;
}

TestField TestField::scaled(double c) const {
  TestField out = *this;
  Evaluator inner = eval_;
  out.eval_ = [inner, c](const Eigen::Vector2d& x, FieldVector& v, FieldJacobian& jac) {
    inner(x, v, jac);
    v *= c;
    jac *= c;
  };
  out.scale_ = scale_ * std::abs(c);
  return out;
}

TestField TestField::with_real(bool real) const {
  TestField out = *this;
  out.real_ = real;
  return out;
}

Box Bump::box() const { return square(center, radius); }

double Bump::value(const Eigen::Vector2d& x) const {
  return bump1((x(0) - center(0)) / radius) * bump1((x(1) - center(1)) / radius);
}

Eigen::Vector2d Bump::gradient(const Eigen::Vector2d& x) const {
  const double a = (x(0) - center(0)) / radius, b = (x(1) - center(1)) / radius;
  return Eigen::Vector2d(bump1_prime(a) * bump1(b), bump1(a) * bump1_prime(b)) / radius;
}

TestField polynomial_bump(const Bump& bump, const Eigen::Matrix<double, 2, 6>& coeffs) {
  auto eval = [bump, coeffs](const Eigen::Vector2d& x, FieldVector& v, FieldJacobian& jac) {
    Eigen::Matrix<double, 6, 1> mono, d1, d2;
    mono << 1, x(0), x(1), x(0) * x(0), x(0) * x(1), x(1) * x(1);
    d1 << 0, 1, 0, 2 * x(0), x(1), 0;
    d2 << 0, 0, 1, 0, x(0), 2 * x(1);
    const double b = bump.value(x);
    const Eigen::Vector2d gb = bump.gradient(x);
    const Eigen::Vector2d p = coeffs * mono;
    const Eigen::Vector2d p1 = coeffs * d1, p2 = coeffs * d2;
    v.resize(2);
    jac.resize(2, 2);
    for (int j = 0; j < 2; ++j) {
      v(j) = p(j) * b;
      jac(j, 0) = p1(j) * b + p(j) * gb(0);
      jac(j, 1) = p2(j) * b + p(j) * gb(1);
    }
  };
  return TestField("polynomial-bump", 2, eval, {{bump.box(), Eigen::Vector2d::Zero()}},
                   std::max(1e-300, coeffs.cwiseAbs().maxCoeff()));
}

TestField linear_field(const Bump& bump, const Eigen::Matrix2d& b, std::string family) {
  auto eval = [bump, b](const Eigen::Vector2d& x, FieldVector& v, FieldJacobian& jac) {
    const Eigen::Vector2d y = x - bump.center;
    const double w = bump.value(x);
    const Eigen::Vector2d gw = bump.gradient(x);
    const Eigen::Vector2d by = b * y;
    v.resize(2);
    jac.resize(2, 2);
    for (int j = 0; j < 2; ++j) {
      v(j) = by(j) * w;
      for (int k = 0; k < 2; ++k) jac(j, k) = b(j, k) * w + by(j) * gw(k);
    }
  };
  return TestField(std::move(family), 2, eval, {{bump.box(), Eigen::Vector2d::Zero()}},
                   std::max(1e-300, b.cwiseAbs().maxCoeff() * bump.radius));
}

TestField radial_field(const Eigen::Vector2d& center, double radius, double amplitude) {
  auto eval = [center, radius, amplitude](const Eigen::Vector2d& x, FieldVector& v, FieldJacobian& jac) {
    const Eigen::Vector2d y = x - center;
    const double t2 = y.squaredNorm() / (radius * radius);
    v.setZero(2);
    jac.setZero(2, 2);
    if (t2 >= 1.0) return;
    const double q = 1.0 - t2;
    const double g = amplitude * q * q * q;
    const double dg = -6.0 * amplitude * q * q / (radius * radius);  // dg/dx_k = dg * y_k
    for (int j = 0; j < 2; ++j) {
      v(j) = y(j) * g;
      for (int k = 0; k < 2; ++k) jac(j, k) = (j == k ? g : 0.0) + y(j) * dg * y(k);
    }
  };
  return TestField("radial", 2, eval, {{square(center, radius), Eigen::Vector2d::Zero()}},
                   std::abs(amplitude) * radius);
}

TestField oscillatory_field(const OscillatorySpec& s) {
  require(s.omega.size() == s.eta.size() && s.omega.size() >= 1, ErrorKind::InvalidArgument,
          "omega and eta must have the same length");
  require(s.inner_radius > 0 && s.inner_radius < s.outer_radius, ErrorKind::InvalidArgument,
          "oscillatory field needs 0 < inner radius < outer radius");
  const Bump outer{s.center, s.outer_radius};
  const Bump inner{s.center, s.inner_radius};
  const int m = static_cast<int>(s.omega.size());
  auto eval = [s, outer, inner, m](const Eigen::Vector2d& x, FieldVector& v, FieldJacobian& jac) {
    const double bo = outer.value(x), bi = inner.value(x);
    const Eigen::Vector2d go = outer.gradient(x), gi = inner.gradient(x);
    const double phase = s.rho * s.xi.dot(x);
    v.resize(m);
    jac.resize(m, 2);
    if (s.complex) {
      const std::complex<double> e = std::polar(1.0, phase);
      for (int j = 0; j < m; ++j) {
        v(j) = s.background * s.omega(j) * bo + s.eta(j) * bi * e;
        for (int k = 0; k < 2; ++k) {
          jac(j, k) = s.background * s.omega(j) * go(k) +
                      s.eta(j) * e * (gi(k) + std::complex<double>(0.0, s.rho * s.xi(k)) * bi);
        }
      }
    } else {
      const double c = std::cos(phase), sn = std::sin(phase);
      for (int j = 0; j < m; ++j) {
        v(j) = s.background * s.omega(j) * bo + s.eta(j) * bi * c;
        for (int k = 0; k < 2; ++k) {
          jac(j, k) = s.background * s.omega(j) * go(k) + s.eta(j) * (gi(k) * c - bi * s.rho * s.xi(k) * sn);
        }
      }
    }
  };

  // The outer square minus the inner one, as four strips, plus the oscillating core.
  const double cx = s.center(0), cy = s.center(1), R = s.outer_radius, r = s.inner_radius;
  const Eigen::Vector2d freq = s.rho * s.xi.cwiseAbs();
  std::vector<Region> regions = {
      {make_box(cx - R, cx + R, cy - R, cy - r), Eigen::Vector2d::Zero()},
      {make_box(cx - R, cx + R, cy + r, cy + R), Eigen::Vector2d::Zero()},
      {make_box(cx - R, cx - r, cy - r, cy + r), Eigen::Vector2d::Zero()},
      {make_box(cx + r, cx + R, cy - r, cy + r), Eigen::Vector2d::Zero()},
      {make_box(cx - r, cx + r, cy - r, cy + r), freq},
  };
  const double scale = std::max(std::abs(s.background) * s.omega.norm(), s.eta.norm());
  TestField field("oscillatory", m, eval, std::move(regions), std::max(scale, 1e-300));
  bool real = !s.complex;
  for (int j = 0; j < m && real; ++j) real = s.omega(j).imag() == 0.0 && s.eta(j).imag() == 0.0;
  return field.with_real(real);
}

std::vector<TestField> standard_ensemble(const EnsembleSpec& spec, const std::optional<TestField>& probe_field) {
  using std::numbers::pi;
  Rng rng(spec.seed);
  const Rect& d = spec.domain;
  const Eigen::Vector2d mid(0.5 * (d.x0 + d.x1), 0.5 * (d.y0 + d.y1));
  const double half = 0.45 * std::min(d.width(), d.height());
  auto random_bump = [&]() {
    const double radius = rng.uniform(0.3, 0.9) * half;
    const double slack = half - radius;
    return Bump{mid + Eigen::Vector2d(rng.uniform(-slack, slack), rng.uniform(-slack, slack)), radius};
  };

  std::vector<TestField> out;
  for (int i = 0; i < spec.bumps; ++i) {
    const Bump bump = random_bump();
    Eigen::Matrix<double, 2, 6> c;
    for (int j = 0; j < 2; ++j)
      for (int a = 0; a < 6; ++a) c(j, a) = rng.uniform(-1.0, 1.0);
    out.push_back(polynomial_bump(bump, c));
  }
  for (int i = 0; i < spec.rotations; ++i) {
    const Bump bump = random_bump();
    Eigen::Matrix2d b;
    if (i % 2 == 0) {
      const double w = rng.uniform(0.5, 2.0);
      b << 0, -w, w, 0;
      out.push_back(linear_field(bump, b, "rotation"));
    } else {
      const double a = rng.uniform(-1, 1), c = rng.uniform(-1, 1), e = rng.uniform(-1, 1);
      b << a, c, c, e;
      out.push_back(linear_field(bump, b, "gradient"));
    }
  }
  for (int i = 0; i < spec.oscillatory; ++i) {
    OscillatorySpec s;
    s.center = mid;
    s.outer_radius = half;
    s.inner_radius = 0.5 * half;
    s.background = rng.uniform(0.5, 3.0);
    const double a = rng.uniform(0, 2 * pi), b = rng.uniform(0, 2 * pi), t = rng.uniform(0, pi);
    s.omega = FieldVector(2);
    s.omega << std::cos(a), std::sin(a);
    s.eta = FieldVector(2);
    s.eta << std::cos(b), std::sin(b);
    s.xi = Eigen::Vector2d(std::cos(t), std::sin(t));
    s.rho = spec.rho;
    out.push_back(oscillatory_field(s));
  }
  if (probe_field) out.push_back(*probe_field);
  return out;
}

std::vector<AnalyticField> analytic_fields() {
  std::vector<AnalyticField> out;
  out.push_back({"identity", [](const Eigen::Vector2d& x, Eigen::Vector2d& v, Eigen::Matrix2d& j) {
                   v = x;
                   j.setIdentity();
                 }});
  out.push_back({"rotation", [](const Eigen::Vector2d& x, Eigen::Vector2d& v, Eigen::Matrix2d& j) {
                   v << -x(1), x(0);
                   j << 0, -1, 1, 0;
                 }});
  out.push_back({"polynomial", [](const Eigen::Vector2d& x, Eigen::Vector2d& v, Eigen::Matrix2d& j) {
                   v << x(0) * x(1) * x(1), x(0) * x(0) * x(0) + x(1);
                   j << x(1) * x(1), 2 * x(0) * x(1), 3 * x(0) * x(0), 1;
                 }});
  out.push_back({"exponential", [](const Eigen::Vector2d& x, Eigen::Vector2d& v, Eigen::Matrix2d& j) {
                   const double e = std::exp(x(0));
                   v << e * std::cos(x(1)), e * std::sin(x(1));
                   j << e * std::cos(x(1)), -e * std::sin(x(1)), e * std::sin(x(1)), e * std::cos(x(1));
                 }});
  out.push_back({"trigonometric", [](const Eigen::Vector2d& x, Eigen::Vector2d& v, Eigen::Matrix2d& j) {
                   v << x(0) * x(0) - x(1), std::sin(x(0)) * std::cos(x(1));
                   j << 2 * x(0), -1, std::cos(x(0)) * std::cos(x(1)), -std::sin(x(0)) * std::sin(x(1));
                 }});
  return out;
}

}  // namespace dissip
