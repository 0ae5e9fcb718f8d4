#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "dissip/error.hpp"

namespace dissip {

/// Gauss-Legendre nodes and weights on [-1, 1] (Golub-Welsch).
template <typename Scalar>
struct GaussLegendre {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> nodes;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> weights;

  explicit GaussLegendre(int order) {
    require(order >= 1, ErrorKind::InvalidArgument, "Gauss-Legendre order must be >= 1");
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    Mat jacobi = Mat::Zero(order, order);
    for (int i = 1; i < order; ++i) {
      const Scalar k = Scalar(i);
      const Scalar beta = k / std::sqrt(Scalar(4) * k * k - Scalar(1));
      jacobi(i, i - 1) = beta;
      jacobi(i - 1, i) = beta;
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(jacobi);
    nodes = es.eigenvalues();
    weights = Scalar(2) * es.eigenvectors().row(0).transpose().array().square().matrix();
    // Symmetrize; the eigen solver leaves ~1 ulp asymmetry.
    for (int i = 0; i < order / 2; ++i) {
      const int j = order - 1 - i;
      const Scalar x = (nodes(j) - nodes(i)) / Scalar(2);
      const Scalar w = (weights(i) + weights(j)) / Scalar(2);
      nodes(i) = -x;
      nodes(j) = x;
      weights(i) = w;
      weights(j) = w;
    }
    if (order % 2 == 1) nodes(order / 2) = Scalar(0);
  }

  int order() const { return static_cast<int>(nodes.size()); }

  /// Integrates f over [a, b].
  template <typename F>
  Scalar integrate(F&& f, Scalar a, Scalar b) const {
    const Scalar half = (b - a) / Scalar(2);
    const Scalar mid = (a + b) / Scalar(2);
    Scalar sum(0);
    for (int i = 0; i < order(); ++i) sum += weights(i) * f(mid + half * nodes(i));
    return sum * half;
  }
};

/// Axis-aligned box [lo, hi] in R^dim.
struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  int dim() const { return static_cast<int>(lo.size()); }
  double measure() const { return (hi - lo).prod(); }
  bool contains(const Eigen::VectorXd& x, double slack = 0.0) const {
    return ((x - lo).array() >= -slack).all() && ((hi - x).array() >= -slack).all();
  }
};

/// Quadrature points and weights over a box: tensor Gauss rule on a uniform cell grid.
struct PointSet {
  std::vector<Eigen::VectorXd> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
};

PointSet tensor_gauss(const Box& box, const std::vector<int>& cells_per_dim, int order);

struct AdaptiveResult {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
};

/// Globally adaptive Gauss-Kronrod (7/15) integration of f over [a, b].
/// Converges when the error estimate drops below max(abs_tol, rel_tol * |I|).
AdaptiveResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                  double abs_tol = 1e-12, double rel_tol = 1e-12,
                                  int max_intervals = 4000);

}  // namespace dissip
