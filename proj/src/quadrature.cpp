#include "dissip/quadrature.hpp"

#include <algorithm>
#include <queue>

namespace dissip {

namespace {

constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for the 7-point rule living on the odd Kronrod nodes.
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

Segment gk15(const std::function<double(double)>& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(mid);
  double kronrod = kKronrodWeights[7] * fc;
  double gauss = kGaussWeights[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kKronrodNodes[i];
    const double pair = f(mid - dx) + f(mid + dx);
    kronrod += kKronrodWeights[i] * pair;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * pair;
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace

PointSet tensor_gauss(const Box& box, const std::vector<int>& cells_per_dim, int order) {
  const int dim = box.dim();
  require(static_cast<int>(cells_per_dim.size()) == dim, ErrorKind::InvalidArgument,
          "cell counts must match box dimension");
  const GaussLegendre<double> rule(order);

  // 1-D node/weight lists per axis, then tensor them.
  std::vector<std::vector<double>> axis_x(dim), axis_w(dim);
  for (int d = 0; d < dim; ++d) {
    const int cells = std::max(1, cells_per_dim[d]);
    const double h = (box.hi(d) - box.lo(d)) / cells;
    for (int c = 0; c < cells; ++c) {
      const double a = box.lo(d) + c * h;
      for (int q = 0; q < order; ++q) {
        axis_x[d].push_back(a + 0.5 * h * (rule.nodes(q) + 1.0));
        axis_w[d].push_back(0.5 * h * rule.weights(q));
      }
    }
  }

  PointSet set;
  std::size_t total = 1;
  for (int d = 0; d < dim; ++d) total *= axis_x[d].size();
  set.points.reserve(total);
  set.weights.reserve(total);
  std::vector<std::size_t> idx(dim, 0);
  for (std::size_t n = 0; n < total; ++n) {
    Eigen::VectorXd x(dim);
    double w = 1.0;
    for (int d = 0; d < dim; ++d) {
      x(d) = axis_x[d][idx[d]];
      w *= axis_w[d][idx[d]];
    }
    set.points.push_back(std::move(x));
    set.weights.push_back(w);
    for (int d = dim - 1; d >= 0; --d) {
      if (++idx[d] < axis_x[d].size()) break;
      idx[d] = 0;
    }
  }
  return set;
}

AdaptiveResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                  double abs_tol, double rel_tol, int max_intervals) {
  AdaptiveResult result;
  if (a == b) return result;
  std::priority_queue<Segment> heap;
  Segment first = gk15(f, a, b);
  double total = first.value;
  double error = first.error;
  heap.push(first);
  int intervals = 1;
  while (error > std::max(abs_tol, rel_tol * std::abs(total))) {
    if (intervals >= max_intervals) {
      throw Error(ErrorKind::QuadratureFailure,
                  "adaptive quadrature did not converge (error estimate " +
                      std::to_string(error) + ")");
    }
    Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    Segment left = gk15(f, worst.a, mid);
    Segment right = gk15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++intervals;
    if (!std::isfinite(total)) {
      throw Error(ErrorKind::QuadratureFailure, "non-finite integrand");
    }
  }
  // Re-sum to shed the drift of the running updates.
  double sum = 0.0, err = 0.0;
  while (!heap.empty()) {
    sum += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  result.value = sum;
  result.error = err;
  result.intervals = intervals;
  return result;
}

}  // namespace dissip
