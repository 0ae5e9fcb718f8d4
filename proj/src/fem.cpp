#include "dissip/fem.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>
#include <tuple>

#include "dissip/phi.hpp"

namespace dissip {

namespace {

constexpr double kPi = std::numbers::pi;

int corner_count(int dim) { return 1 << dim; }

/// Values and reference gradients of the 2^dim multilinear shape functions at xi.
void shape(int dim, const Eigen::VectorXd& xi, const Eigen::VectorXd& h, Eigen::VectorXd& n, Eigen::MatrixXd& dn) {
  const int nc = corner_count(dim);
  n.resize(nc);
  dn.resize(nc, dim);
  for (int a = 0; a < nc; ++a) {
    double value = 1.0;
    for (int d = 0; d < dim; ++d) value *= (a >> d & 1) ? xi(d) : 1.0 - xi(d);
    n(a) = value;
    for (int d = 0; d < dim; ++d) {
      double g = (a >> d & 1) ? 1.0 : -1.0;
      for (int e = 0; e < dim; ++e) {
        if (e != d) g *= (a >> e & 1) ? xi(e) : 1.0 - xi(e);
      }
      dn(a, d) = g / h(d);
    }
  }
}

struct Grid {
  int dim;
  std::vector<int> cells;
  std::vector<int> nodes;
  Eigen::VectorXd lo, h;

  explicit Grid(int dim_, const Box& box, const std::vector<int>& cells_)
      : dim(dim_), cells(cells_), nodes(dim_), lo(box.lo), h(dim_) {
    for (int d = 0; d < dim; ++d) {
      nodes[d] = cells[d] + 1;
      h(d) = (box.hi(d) - box.lo(d)) / cells[d];
    }
  }

  int node_index(const std::vector<int>& idx) const {
    int out = 0;
    for (int d = dim - 1; d >= 0; --d) out = out * nodes[d] + idx[d];
    return out;
  }

  int element_count() const {
    return std::accumulate(cells.begin(), cells.end(), 1, std::multiplies<>());
  }

  std::vector<int> element(int e) const {
    std::vector<int> idx(dim);
    for (int d = 0; d < dim; ++d) {
      idx[d] = e % cells[d];
      e /= cells[d];
    }
    return idx;
  }

  int corner_node(const std::vector<int>& element, int a) const {
    std::vector<int> idx(dim);
    for (int d = 0; d < dim; ++d) idx[d] = element[d] + (a >> d & 1);
    return node_index(idx);
  }

  bool on_boundary(int node) const {
    for (int d = 0; d < dim; ++d) {
      const int i = node % nodes[d];
      node /= nodes[d];
      if (i == 0 || i == nodes[d] - 1) return true;
    }
    return false;
  }

  Eigen::VectorXd point(const std::vector<int>& element, const Eigen::VectorXd& xi) const {
    Eigen::VectorXd x(dim);
    for (int d = 0; d < dim; ++d) x(d) = lo(d) + (element[d] + xi(d)) * h(d);
    return x;
  }
};

/// Tensor Gauss rule on [0,1]^dim.
struct ReferenceRule {
  std::vector<Eigen::VectorXd> points;
  std::vector<double> weights;

  ReferenceRule(int dim, int order) {
    const GaussLegendre<double> g(order);
    const int total = static_cast<int>(std::pow(order, dim));
    for (int q = 0; q < total; ++q) {
      Eigen::VectorXd xi(dim);
      double w = 1.0;
      int r = q;
      for (int d = 0; d < dim; ++d) {
        const int i = r % order;
        r /= order;
        xi(d) = 0.5 * (g.nodes(i) + 1.0);
        w *= 0.5 * g.weights(i);
      }
      points.push_back(xi);
      weights.push_back(w);
    }
  }
};

struct LocalCoefficients {
  double lambda, mu;
};

LocalCoefficients coefficients_at(const FemProblem& prob, const Eigen::VectorXd& x) {
  LocalCoefficients c{prob.lambda, prob.mu};
  if (prob.field) {
    const auto local = prob.field->at(x.head<2>());
    c = {local.lambda, local.mu};
  }
  if (prob.eps) c.lambda += prob.eps(x);
  if (prob.sigma) c.mu += prob.sigma(x);
  return c;
}

/// Element stiffness with dofs ordered (corner a, component i) -> dim * a + i.
void add_element_stiffness(int dim, const Eigen::MatrixXd& dn, double lambda, double mu, double w,
                           Eigen::MatrixXd& ke) {
  const int nc = static_cast<int>(dn.rows());
  for (int a = 0; a < nc; ++a) {
    for (int b = 0; b < nc; ++b) {
      const double grad_dot = dn.row(a).dot(dn.row(b));
      for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
          double v = lambda * dn(a, i) * dn(b, j) + mu * dn(a, j) * dn(b, i);
          if (i == j) v += mu * grad_dot;
          ke(dim * a + i, dim * b + j) += w * v;
        }
      }
    }
  }
}

bool is_constant_problem(const FemProblem& prob) {
  return !prob.eps && !prob.sigma && (!prob.field || prob.field->is_constant());
}

Verdict admissibility(const FemProblem& prob) {
  const PhiSpec phi = PhiSpec::power(prob.p);
  if (prob.dim == 2) {
    if (prob.field) return lame2d_verdict(phi, *prob.field);
    const Rect rect{prob.domain.lo(0), prob.domain.hi(0), prob.domain.lo(1), prob.domain.hi(1)};
    return lame2d_verdict(phi, CoefficientField::constant(prob.lambda, prob.mu, rect));
  }
  return lameNd_sufficient(phi, prob.lambda, prob.mu);
}

}  // namespace

FemProblem FemProblem::unit_box(int dim, int cells_per_side) {
  FemProblem prob;
  prob.dim = dim;
  prob.domain = {Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Ones(dim)};
  prob.cells.assign(dim, cells_per_side);
  return prob;
}

int FemSolution::node_count() const {
  int out = 1;
  for (int d = 0; d < dim; ++d) out *= nodes_along(d);
  return out;
}

Eigen::VectorXd FemSolution::cell_size() const {
  Eigen::VectorXd h(dim);
  for (int d = 0; d < dim; ++d) h(d) = (domain.hi(d) - domain.lo(d)) / cells[d];
  return h;
}

Eigen::VectorXd FemSolution::node(int index) const {
  const Eigen::VectorXd h = cell_size();
  Eigen::VectorXd x(dim);
  for (int d = 0; d < dim; ++d) {
    x(d) = domain.lo(d) + (index % nodes_along(d)) * h(d);
    index /= nodes_along(d);
  }
  return x;
}

void FemSolution::evaluate(const std::vector<int>& element, const Eigen::VectorXd& xi, Eigen::VectorXd& value,
                           Eigen::MatrixXd& jac) const {
  const Grid grid(dim, domain, cells);
  Eigen::VectorXd n;
  Eigen::MatrixXd dn;
  shape(dim, xi, grid.h, n, dn);
  value.setZero(dim);
  jac.setZero(dim, dim);
  for (int a = 0; a < corner_count(dim); ++a) {
    const Eigen::VectorXd ua = u.row(grid.corner_node(element, a)).transpose();
    value += n(a) * ua;
    jac += ua * dn.row(a);
  }
}

FemSolution assemble_and_solve(const FemProblem& prob) {
  const int dim = prob.dim;
  require(dim == 2 || dim == 3, ErrorKind::InvalidArgument, "dimension must be 2 or 3");
  require(static_cast<int>(prob.cells.size()) == dim && prob.domain.dim() == dim, ErrorKind::InvalidArgument,
          "grid shape does not match the dimension");
  for (int c : prob.cells) require(c >= 8, ErrorKind::InvalidArgument, "grid needs at least 8 cells per side");
  require(!prob.field || dim == 2, ErrorKind::InvalidArgument, "coefficient fields are two-dimensional");
  require(prob.p >= 2.0, ErrorKind::InvalidArgument, "exponent p must be >= 2");
  if (prob.field) {
    ess_bounds(*prob.field);
  } else {
    require(prob.mu > 0.0 && prob.lambda + 2.0 * prob.mu > 0.0, ErrorKind::EllipticityViolation,
            "Lame parameters need mu > 0 and lambda + 2 mu > 0");
  }

  const Grid grid(dim, prob.domain, prob.cells);
  const int nc = corner_count(dim);
  const int total_nodes = std::accumulate(grid.nodes.begin(), grid.nodes.end(), 1, std::multiplies<>());

  std::vector<int> interior(total_nodes, -1);
  int n_interior = 0;
  for (int k = 0; k < total_nodes; ++k) {
    if (!grid.on_boundary(k)) interior[k] = n_interior++;
  }
  const int n_dofs = dim * n_interior;

  const ReferenceRule rule(dim, 3);
  std::vector<Eigen::VectorXd> shape_n(rule.points.size());
  std::vector<Eigen::MatrixXd> shape_dn(rule.points.size());
  for (std::size_t q = 0; q < rule.points.size(); ++q) shape(dim, rule.points[q], grid.h, shape_n[q], shape_dn[q]);
  const double jacobian = grid.h.prod();

  const bool constant = is_constant_problem(prob);
  Eigen::MatrixXd ke_const = Eigen::MatrixXd::Zero(dim * nc, dim * nc);
  if (constant) {
    const LocalCoefficients c = coefficients_at(prob, grid.point(std::vector<int>(dim, 0), rule.points[0]));
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      add_element_stiffness(dim, shape_dn[q], c.lambda, c.mu, rule.weights[q] * jacobian, ke_const);
    }
  }

  Eigen::SparseMatrix<double> k_mat(n_dofs, n_dofs);
  k_mat.reserve(Eigen::VectorXi::Constant(n_dofs, dim * static_cast<int>(std::pow(3, dim))));
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_dofs);

  Eigen::MatrixXd ke(dim * nc, dim * nc);
  Eigen::VectorXd fe(dim * nc);
  std::vector<int> dof(dim * nc);
  for (int e = 0; e < grid.element_count(); ++e) {
    const std::vector<int> elem = grid.element(e);
    for (int a = 0; a < nc; ++a) {
      const int node = interior[grid.corner_node(elem, a)];
      for (int i = 0; i < dim; ++i) dof[dim * a + i] = node < 0 ? -1 : dim * node + i;
    }
    if (constant) {
      ke = ke_const;
    } else {
      ke.setZero();
    }
    fe.setZero();
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double w = rule.weights[q] * jacobian;
      if (!constant || prob.forcing) {
        const Eigen::VectorXd x = grid.point(elem, rule.points[q]);
        if (!constant) {
          const LocalCoefficients c = coefficients_at(prob, x);
          require(c.mu > 0.0 && c.lambda + 2.0 * c.mu > 0.0, ErrorKind::EllipticityViolation,
                  "perturbed coefficients lose ellipticity");
          add_element_stiffness(dim, shape_dn[q], c.lambda, c.mu, w, ke);
        }
        if (prob.forcing) {
          const Eigen::MatrixXd f = prob.forcing(x);
          require(f.allFinite(), ErrorKind::InvalidArgument, "forcing is not finite");
          for (int a = 0; a < nc; ++a) {
            for (int j = 0; j < dim; ++j) fe(dim * a + j) += w * f.col(j).dot(shape_dn[q].row(a).transpose());
          }
        }
      }
    }
    for (int r = 0; r < dim * nc; ++r) {
      if (dof[r] < 0) continue;
      rhs(dof[r]) += fe(r);
      for (int c = 0; c < dim * nc; ++c) {
        if (dof[c] >= 0) k_mat.coeffRef(dof[r], dof[c]) += ke(r, c);
      }
    }
  }
  k_mat.makeCompressed();

  FemSolution sol;
  sol.dim = dim;
  sol.domain = prob.domain;
  sol.cells = prob.cells;
  sol.admissibility = admissibility(prob);

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n_dofs);
  if (rhs.squaredNorm() > 0.0) {
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                             Eigen::DiagonalPreconditioner<double>>
        cg;
    cg.setTolerance(prob.cg_tolerance);
    cg.setMaxIterations(prob.max_iterations > 0 ? prob.max_iterations : 10 * n_dofs);
    cg.compute(k_mat);
    x = cg.solve(rhs);
    if (cg.info() != Eigen::Success || !x.allFinite()) {
      throw Error(ErrorKind::SolverDiverged, "conjugate gradients did not reach the requested residual");
    }
    sol.iterations = static_cast<int>(cg.iterations());
    sol.residual = (k_mat * x - rhs).norm() / rhs.norm();
  }
  sol.energy = 0.5 * x.dot(k_mat * x);
  sol.load = rhs.dot(x);

  sol.u = Eigen::MatrixXd::Zero(total_nodes, dim);
  for (int k = 0; k < total_nodes; ++k) {
    if (interior[k] >= 0) sol.u.row(k) = x.segment(dim * interior[k], dim).transpose();
  }
  return sol;
}

void for_each_fem_node(const FemSolution& sol, int order,
                       const std::function<void(const Eigen::VectorXd&, double, const Eigen::VectorXd&,
                                                const Eigen::MatrixXd&)>& f) {
  const Grid grid(sol.dim, sol.domain, sol.cells);
  const ReferenceRule rule(sol.dim, order);
  const int nc = corner_count(sol.dim);
  std::vector<Eigen::VectorXd> shape_n(rule.points.size());
  std::vector<Eigen::MatrixXd> shape_dn(rule.points.size());
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    shape(sol.dim, rule.points[q], grid.h, shape_n[q], shape_dn[q]);
  }
  const double jacobian = grid.h.prod();
  Eigen::MatrixXd corners(nc, sol.dim);
  Eigen::VectorXd value(sol.dim);
  Eigen::MatrixXd jac(sol.dim, sol.dim);
  for (int e = 0; e < grid.element_count(); ++e) {
    const std::vector<int> elem = grid.element(e);
    for (int a = 0; a < nc; ++a) corners.row(a) = sol.u.row(grid.corner_node(elem, a));
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      value = corners.transpose() * shape_n[q];
      jac = corners.transpose() * shape_dn[q];
      f(grid.point(elem, rule.points[q]), rule.weights[q] * jacobian, value, jac);
    }
  }
}

void write_solution(const FemSolution& sol, std::ostream& out) {
  out.precision(17);
  for (int k = 0; k < sol.node_count(); ++k) {
    const Eigen::VectorXd x = sol.node(k);
    for (int d = 0; d < sol.dim; ++d) out << x(d) << ',';
    for (int d = 0; d < sol.dim; ++d) out << sol.u(k, d) << (d + 1 < sol.dim ? ',' : '\n');
  }
}

WeightedEnergies weighted_energy(const FemSolution& sol, double p, const std::vector<double>& levels) {
  require(p >= 2.0, ErrorKind::InvalidArgument, "exponent p must be >= 2");
  WeightedEnergies out;
  std::vector<PhiSpec> weights;
  for (double k : levels) {
    weights.push_back(truncated_power(p, k));
    out.by_level.emplace_back(k, 0.0);
  }
  out.max_abs_u = sol.u.rowwise().norm().maxCoeff();
  for_each_fem_node(sol, 4, [&](const Eigen::VectorXd&, double w, const Eigen::VectorXd& u, const Eigen::MatrixXd& jac) {
    const double grad_sq = jac.squaredNorm();
    const double r = u.norm();
    out.dirichlet += w * grad_sq;
    out.untruncated += w * grad_sq * std::pow(r, p - 2.0);
    for (std::size_t i = 0; i < weights.size(); ++i) out.by_level[i].second += w * grad_sq * weights[i].value(r);
  });
  return out;
}

RegularityRatio regularity_ratio(const FemSolution& sol, const FemProblem& prob) {
  const double p = prob.p;
  const int n = sol.dim;
  RegularityRatio out;
  SampledField f_sq;
  double lebesgue = 0.0;
  const double q = n * p / (n + p - 2.0);
  for_each_fem_node(sol, 4, [&](const Eigen::VectorXd& x, double w, const Eigen::VectorXd& u, const Eigen::MatrixXd& jac) {
    out.lhs += w * jac.squaredNorm() * std::pow(u.norm(), p - 2.0);
    const double f = prob.forcing ? prob.forcing(x).norm() : 0.0;
    if (n == 2) {
      f_sq.values.push_back(f * f);
      f_sq.weights.push_back(w);
    } else {
      lebesgue += w * std::pow(f, q);
    }
  });
  if (n == 2) {
    if (p == 2.0) {
      out.rhs = f_sq.integrate([](double v) { return v; });
    } else {
      out.rhs = std::pow(luxemburg_norm(f_sq, log_young(p).n_tilde), p / 2.0);
    }
  } else {
    out.rhs = std::pow(lebesgue, (n + p - 2.0) / n);
  }
  out.ratio = out.rhs > 0.0 ? out.lhs / out.rhs : 0.0;
  return out;
}

std::pair<double, double> holder_exponents(int dim, double p) {
  require(dim >= 3 && p >= 2.0, ErrorKind::InvalidArgument, "Hoelder split needs N >= 3 and p >= 2");
  const double alpha = p == 2.0 ? std::numeric_limits<double>::infinity() : dim * p / ((dim - 2.0) * (p - 2.0));
  return {alpha, dim * p / (2.0 * (dim + p) - 4.0)};
}

bool holder_conjugate_exact(int dim, long long p_num, long long p_den) {
  require(p_den > 0 && dim >= 3, ErrorKind::InvalidArgument, "bad rational exponent");
  // 1/alpha = (N-2)(a-2b)/(N a), 1/alpha' = (2Nb + 2a - 4b)/(N a) for p = a/b.
  const long long a = p_num, b = p_den;
  const long long n = dim;
  long long num = (n - 2) * (a - 2 * b) + (2 * n * b + 2 * a - 4 * b);
  long long den = n * a;
  const long long g = std::gcd(num, den);
  num /= g;
  den /= g;
  return num == den;
}

HolderSplit holder_split_check(const FemSolution& sol, const FemProblem& prob, double level) {
  const int n = sol.dim;
  const double p = prob.p;
  HolderSplit out;
  std::tie(out.alpha, out.alpha_prime) = holder_exponents(n, p);
  const PhiSpec phi_k = truncated_power(p, level);
  const bool flat = p == 2.0;
  double int_phi_alpha = 0.0, int_f = 0.0, sup_phi = 0.0;
  out.pointwise_slack = std::numeric_limits<double>::infinity();
  for_each_fem_node(sol, 4, [&](const Eigen::VectorXd& x, double w, const Eigen::VectorXd& u, const Eigen::MatrixXd&) {
    const double r = u.norm();
    const double wk = phi_k.value(r);
    const double vk = std::sqrt(wk) * r;
    const double bound = std::pow(vk, 2.0 * (p - 2.0) / p);
    out.pointwise_slack = std::min(out.pointwise_slack, bound - wk);
    const double f = prob.forcing ? prob.forcing(x).norm() : 0.0;
    out.lhs += w * f * f * wk;
    sup_phi = std::max(sup_phi, wk);
    if (!flat) int_phi_alpha += w * std::pow(wk, out.alpha);
    int_f += w * std::pow(f, 2.0 * out.alpha_prime);
  });
  const double first = flat ? sup_phi : std::pow(int_phi_alpha, 1.0 / out.alpha);
  out.rhs = first * std::pow(int_f, 1.0 / out.alpha_prime);
  out.slack = out.rhs - out.lhs;
  return out;
}

Eigen::Vector2d manufactured_solution(const Eigen::Vector2d& x, double c) {
  const double s = std::sin(kPi * x(0)) * std::sin(kPi * x(1));
  return {c * s, c * s};
}

MatrixField manufactured_forcing(double lambda, double mu, double c) {
  return [=](const Eigen::VectorXd& x) {
    const Eigen::Vector2d grad(kPi * std::cos(kPi * x(0)) * std::sin(kPi * x(1)),
                               kPi * std::sin(kPi * x(0)) * std::cos(kPi * x(1)));
    const double div = c * (grad(0) + grad(1));
    Eigen::MatrixXd f(2, 2);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) f(i, j) = (i == j ? lambda * div : 0.0) + mu * c * (grad(i) + grad(j));
    }
    return f;
  };
}

MatrixField smooth_forcing(int dim, double amplitude) {
  return [=](const Eigen::VectorXd& x) {
    Eigen::MatrixXd f(dim, dim);
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) {
        double phase = 0.0;
        for (int d = 0; d < dim; ++d) phase += (1 + (i + 2 * j + d) % 3) * x(d);
        f(i, j) = amplitude * std::cos(kPi * phase);
      }
    }
    return f;
  };
}

double l2_error(const FemSolution& sol, const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& exact) {
  double sum = 0.0;
  for_each_fem_node(sol, 3, [&](const Eigen::VectorXd& x, double w, const Eigen::VectorXd& u, const Eigen::MatrixXd&) {
    sum += w * (u - exact(x)).squaredNorm();
  });
  return std::sqrt(sum);
}

}  // namespace dissip
