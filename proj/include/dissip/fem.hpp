#pragma once

#include <Eigen/Dense>

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "dissip/coefficients.hpp"
#include "dissip/criteria.hpp"
#include "dissip/orlicz.hpp"
#include "dissip/quadrature.hpp"

namespace dissip {

using MatrixField = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;
using ScalarField = std::function<double(const Eigen::VectorXd&)>;

/// Dirichlet problem  d_i(lambda div u d_ij + mu (d_i u_j + d_j u_i)) = d_i F_ij  in a box,
/// u = 0 on the boundary, in weak form
///   int lambda div u div v + mu grad u : grad v + mu (grad u)^T : grad v = int F_ij d_i v_j.
struct FemProblem {
  int dim = 2;
  Box domain;
  std::vector<int> cells;
  double lambda = 1.0;
  double mu = 1.0;
  std::optional<CoefficientField> field;  // 2-D variable coefficients; overrides lambda, mu
  ScalarField eps;                        // optional perturbation of lambda
  ScalarField sigma;                      // optional perturbation of mu
  MatrixField forcing;                    // F(x), dim x dim; empty means F = 0
  double p = 2.0;
  double cg_tolerance = 1e-10;
  int max_iterations = 0;  // 0: ten times the number of unknowns

  static FemProblem unit_box(int dim, int cells_per_side);
};

/// Q1 solution on the structured grid. Nodes are numbered with the x1 index fastest.
struct FemSolution {
  int dim = 2;
  Box domain;
  std::vector<int> cells;
  Eigen::MatrixXd u;  // one row per node
  double energy = 0.0;  // B(u, u)/2
  double load = 0.0;    // int F_ij d_i u_j
  int iterations = 0;
  double residual = 0.0;  // relative residual of the linear system
  Verdict admissibility;

  int nodes_along(int d) const { return cells[d] + 1; }
  int node_count() const;
  Eigen::VectorXd node(int index) const;
  Eigen::VectorXd cell_size() const;

  /// u and its Jacobian (column k = d_k u) at reference point xi in [0,1]^dim of element e.
  void evaluate(const std::vector<int>& element, const Eigen::VectorXd& xi, Eigen::VectorXd& value,
                Eigen::MatrixXd& jac) const;
};

FemSolution assemble_and_solve(const FemProblem& problem);

/// Calls f(x, w, u, grad u) at the Gauss nodes of every element.
void for_each_fem_node(const FemSolution& sol, int order,
                       const std::function<void(const Eigen::VectorXd&, double, const Eigen::VectorXd&,
                                                const Eigen::MatrixXd&)>& f);

/// Nodal dump: one row per node, coordinates then displacement components.
void write_solution(const FemSolution& sol, std::ostream& out);

struct WeightedEnergies {
  std::vector<std::pair<double, double>> by_level;  // (k, int |grad u|^2 phi_k(|u|))
  double untruncated = 0.0;                          // int |grad u|^2 |u|^{p-2}
  double dirichlet = 0.0;                            // int |grad u|^2
  double max_abs_u = 0.0;
};

/// Order-4 Gauss quadrature of |grad u|^2 phi_k(|u|) with phi_k the truncated power.
WeightedEnergies weighted_energy(const FemSolution& sol, double p, const std::vector<double>& levels);

struct RegularityRatio {
  double lhs = 0.0;  // int |grad u|^2 |u|^{p-2}
  double rhs = 0.0;  // (int |F|^{Np/(N+p-2)})^{(N+p-2)/N}, or |||F|^2|||^{p/2} in the log-type norm for N = 2
  double ratio = 0.0;
};

RegularityRatio regularity_ratio(const FemSolution& sol, const FemProblem& problem);

/// Hoelder exponents alpha = Np/((N-2)(p-2)) and alpha' = Np/(2(N+p)-4); alpha = inf for p = 2.
std::pair<double, double> holder_exponents(int dim, double p);

/// 1/alpha + 1/alpha' == 1 evaluated in exact rational arithmetic for p = p_num/p_den.
bool holder_conjugate_exact(int dim, long long p_num, long long p_den);

struct HolderSplit {
  double alpha = 0.0;
  double alpha_prime = 0.0;
  double pointwise_slack = 0.0;  // min over nodes of |v_k|^{2(p-2)/p} - phi_k(|u|)
  double lhs = 0.0;              // int |F|^2 phi_k(|u|)
  double rhs = 0.0;              // (int phi_k^alpha)^{1/alpha} (int |F|^{2 alpha'})^{1/alpha'}
  double slack = 0.0;
};

HolderSplit holder_split_check(const FemSolution& sol, const FemProblem& problem, double level);

/// u* = c (s, s) with s = sin(pi x1) sin(pi x2) on the unit square and F = sigma(u*).
Eigen::Vector2d manufactured_solution(const Eigen::Vector2d& x, double c = 1.0);
MatrixField manufactured_forcing(double lambda, double mu, double c = 1.0);

/// Smooth test forcing F_ij = amplitude cos(pi sum_d w_ijd x_d) with small integer frequencies.
MatrixField smooth_forcing(int dim, double amplitude = 1.0);

/// sqrt(int |u_h - u|^2) over the domain.
double l2_error(const FemSolution& sol, const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& exact);

}  // namespace dissip
