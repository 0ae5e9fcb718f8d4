#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "dissip/error.hpp"

namespace dissip {

struct Rect {
  double x0 = 0.0, x1 = 1.0;
  double y0 = 0.0, y1 = 1.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
};

/// Lame parameters lambda(x), mu(x) sampled on the nodes of a uniform grid over a
/// rectangle, with optional perturbations eps(x), sigma(x) added to lambda and mu.
/// Arrays are indexed (i, j) with i along x1 and j along x2.
class CoefficientField {
 public:
  CoefficientField(Rect domain, Eigen::ArrayXXd lambda, Eigen::ArrayXXd mu);

  static CoefficientField constant(double lambda, double mu, Rect domain = {}, int nodes = 9);

  /// Returns a copy with lambda + eps and mu + sigma as effective coefficients.
  CoefficientField with_perturbation(Eigen::ArrayXXd eps, Eigen::ArrayXXd sigma) const;

  const Rect& domain() const { return domain_; }
  int n1() const { return static_cast<int>(lambda_.rows()); }
  int n2() const { return static_cast<int>(lambda_.cols()); }
  const Eigen::ArrayXXd& lambda_base() const { return lambda_; }
  const Eigen::ArrayXXd& mu_base() const { return mu_; }
  const std::optional<Eigen::ArrayXXd>& eps() const { return eps_; }
  const std::optional<Eigen::ArrayXXd>& sigma() const { return sigma_; }

  /// Effective coefficients (perturbation applied when present).
  Eigen::ArrayXXd lambda() const;
  Eigen::ArrayXXd mu() const;

  Eigen::Vector2d node(int i, int j) const;
  bool is_constant() const;

  /// Bilinear interpolation of the effective coefficients and their gradients.
  struct Local {
    double lambda = 0.0, mu = 0.0;
    Eigen::Vector2d grad_lambda = Eigen::Vector2d::Zero();
    Eigen::Vector2d grad_mu = Eigen::Vector2d::Zero();
  };
  Local at(const Eigen::Vector2d& x) const;

 private:
  Rect domain_;
  Eigen::ArrayXXd lambda_, mu_;
  std::optional<Eigen::ArrayXXd> eps_, sigma_;
  Eigen::ArrayXXd lambda_eff_, mu_eff_;
};

/// Built-in analytic coefficient fields.
struct PresetSpec {
  std::string name = "constant";  // constant | ramp | checkerboard | radial
  double lambda = 1.0;
  double mu = 1.0;
  double amplitude = 0.0;  // ramp increment of lambda; relative mu variation otherwise
  int block = 2;           // checkerboard block size in nodes
  int n1 = 17, n2 = 17;
  Rect domain;
};

CoefficientField make_preset(const PresetSpec& spec);

/// Grid file: `domain,x0,x1,y0,y1`, `shape,n1,n2`, `columns,lambda,mu[,eps,sigma]`,
/// then n1*n2 node rows, x2 index fastest.
CoefficientField load_grid_file(const std::string& path);
void save_grid_file(const CoefficientField& field, const std::string& path);

struct EssBounds {
  double inf_mu = 0.0;
  double inf_lam2mu = 0.0;
  double sup_ratio = 0.0;  // max ((lambda + mu)/(lambda + 3 mu))^2
};

EssBounds ess_bounds(const CoefficientField& field);

/// gamma = mu (lambda + mu)/(lambda + 3 mu).
Eigen::ArrayXXd gamma_field(const CoefficientField& field);
/// gamma - mu = -2 mu^2/(lambda + 3 mu).
Eigen::ArrayXXd gamma_minus_mu(const CoefficientField& field);
/// mu^2/(lambda + 3 mu), the function whose BMO seminorm controls the commutator.
Eigen::ArrayXXd commutator_weight(const CoefficientField& field);

/// Averages of the four corner nodes of each cell.
Eigen::ArrayXXd cell_averages(const Eigen::ArrayXXd& nodes);

/// Maximal mean oscillation of a piecewise-constant cell field over dyadic squares of
/// 2x2, 4x4, ... cells anchored at multiples of their side. A lower estimate of the BMO
/// seminorm of the field.
double bmo_cells(const Eigen::ArrayXXd& cells);

/// Dyadic-BMO lower bound of a node-sampled field (via cell averages). Needs >= 8 nodes per side.
double bmo_seminorm(const Eigen::ArrayXXd& nodes);

inline constexpr const char* kBmoLabel = "dyadic-BMO lower bound";

/// Constant coefficient system A = d_h (A^{hk} d_k) with m x m complex blocks.
class GeneralSystem {
 public:
  GeneralSystem(int dim, int m);

  int dim() const { return dim_; }
  int m() const { return m_; }
  Eigen::MatrixXcd& A(int h, int k) { return blocks_[h * dim_ + k]; }
  const Eigen::MatrixXcd& A(int h, int k) const { return blocks_[h * dim_ + k]; }

  /// Symbol sum_{h,k} A^{hk} xi_h xi_k.
  Eigen::MatrixXcd symbol(const Eigen::VectorXd& xi) const;
  bool finite() const;

 private:
  int dim_, m_;
  std::vector<Eigen::MatrixXcd> blocks_;
};

/// a^{hk}_{ij} = lambda d_ih d_jk + mu (d_ij d_hk + d_ik d_hj).
GeneralSystem lame_system(double lambda, double mu, int dim = 2);

}  // namespace dissip
