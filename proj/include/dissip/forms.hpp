#pragma once

#include <Eigen/Dense>

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dissip/coefficients.hpp"
#include "dissip/criteria.hpp"
#include "dissip/lambda_profile.hpp"
#include "dissip/test_fields.hpp"

namespace dissip {

using Block = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxComponents, kMaxComponents>;
using Blocks = std::array<Block, 4>;  // A^{hk} at index 2h + k

/// Coefficients A^{hk}(x) of a 2-D operator: a constant system or a Lame field,
/// optionally shifted to A - kappa Delta.
class FormOperator {
 public:
  static FormOperator system(GeneralSystem sys);
  static FormOperator lame(CoefficientField field);

  FormOperator shifted(double kappa) const;

  int m() const;
  double shift() const { return shift_; }
  void blocks(const Eigen::Vector2d& x, Blocks& a) const;
  const CoefficientField* field() const { return field_ ? &*field_ : nullptr; }
  const GeneralSystem* constant_system() const { return system_ ? &*system_ : nullptr; }

 private:
  std::optional<GeneralSystem> system_;
  std::optional<CoefficientField> field_;
  double shift_ = 0.0;
};

struct FormOptions {
  int order = 8;                      // Gauss points per cell and axis
  double cells_per_unit = 8.0;        // cells per unit length off the oscillating core
  double cells_per_wavelength = 10.0;
  bool drop_cross_term = false;       // omit the Lambda (A^{hk} - (A^{kh})^*) term
};

/// Calls f(x, w) at every quadrature node of the field's regions.
void for_each_node(const TestField& field, const FormOptions& options,
                   const std::function<void(const Eigen::Vector2d&, double)>& f);

/// The integrand of the L^Phi dissipativity condition at one point, extended by zero where v vanishes.
double form_integrand(const Blocks& a, int m, double lambda, const FieldVector& v, const FieldJacobian& jac,
                      bool drop_cross_term = false);

/// Re int ( <A^{hk} d_k v, d_h v> + Lambda(|v|)|v|^-2 <(A^{hk} - (A^{kh})^*) v, d_h v> Re<v, d_k v>
///          - Lambda^2(|v|)|v|^-4 <A^{hk} v, v> Re<v, d_k v> Re<v, d_h v> ) dx
double dissipativity_form(const FormOperator& op, const LambdaProfile& profile, const TestField& field,
                          const FormOptions& options = {});

/// int |grad v|^2 dx.
double gradient_energy(const TestField& field, const FormOptions& options = {});

struct FieldResult {
  std::string family;
  int index = 0;
  double form = 0.0;
  double grad_sq = 0.0;
  double residual = 0.0;  // form - kappa * grad_sq
};

struct StrictMarginResult {
  double kappa = 0.0;
  double min_residual = 0.0;
  int worst = -1;
  std::vector<FieldResult> fields;
};

/// Worst residual of form - kappa int |grad v|^2 over the ensemble. Evidence, not proof.
StrictMarginResult strict_margin(const FormOperator& op, const LambdaProfile& profile,
                                 const std::vector<TestField>& fields, double kappa,
                                 const FormOptions& options = {});

void write_field_csv(const StrictMarginResult& result, std::ostream& out);

/// Per-field comparison of strictness with constant kappa and dissipativity of A - kappa Delta.
struct ShiftComparison {
  double strict_residual = 0.0;   // form(A) - kappa int |grad v|^2
  double shifted_form = 0.0;      // form(A - kappa Delta)
  double relaxed_residual = 0.0;  // form(A) - kappa (1 - sup Lambda^2) int |grad v|^2
  bool forward = true;            // strict_residual >= 0 implies shifted_form >= 0
  bool backward = true;           // shifted_form >= 0 implies relaxed_residual >= 0
};

ShiftComparison compare_shifted(const FormOperator& op, const LambdaProfile& profile, const TestField& field,
                                double kappa, const FormOptions& options = {});

/// X_1, X_2, Y_1, Y_2 of a real planar field at a point where v != 0.
struct XY {
  double x1 = 0.0, x2 = 0.0, y1 = 0.0, y2 = 0.0;
};

template <typename Scalar>
XY xy_decompose(const Eigen::Matrix<Scalar, 2, 1>& v, const Eigen::Matrix<Scalar, 2, 2>& jac) {
  const Scalar r = v.norm();
  if (!(r > Scalar(0))) return {};
  const Eigen::Matrix<Scalar, 2, 1> grad_r = jac.transpose() * v / r;  // d_k |v|
  XY out;
  out.x1 = double((v(0) * grad_r(0) + v(1) * grad_r(1)) / r);
  out.x2 = double((v(1) * grad_r(0) - v(0) * grad_r(1)) / r);
  out.y1 = double(jac(0, 0) + jac(1, 1)) - out.x1;
  out.y2 = double(jac(1, 0) - jac(0, 1)) - out.x2;
  return out;
}

XY xy_decompose(const TestField& field, const Eigen::Vector2d& x);

struct FormBreakdown {
  double total = 0.0;
  double x1_sq = 0.0;       // int (lambda+2mu-kappa)(1-Lambda^2) X1^2
  double y1_sq = 0.0;       // int (lambda+2mu-kappa) Y1^2
  double cross_x1y1 = 0.0;  // int 2 lambda X1 Y1
  double x2_sq = 0.0;       // int (mu-kappa)(1-Lambda^2) X2^2
  double y2_sq = 0.0;       // int (mu-kappa) Y2^2
  double cross_x2y2 = 0.0;  // int -2 mu X2 Y2
  double direct = 0.0;      // the same form integrated without the decomposition

  // gamma-shifted rewriting: the two pointwise-nonnegative forms plus the commutator term.
  double gamma_part1 = 0.0;  // (lambda+2mu-kappa)(1-L^2)X1^2 + 2(lambda+mu-gamma)X1Y1 + (lambda+2mu-kappa)Y1^2
  double gamma_part2 = 0.0;  // (mu-kappa)(1-L^2)X2^2 - 2 gamma X2Y2 + (mu-kappa)Y2^2
  double commutator_term = 0.0;  // 2 int mu^2/(lambda+3mu) (sum d_k v_j d_j v_k - (div v)^2)
  double commutator_ibp = 0.0;   // 2 sum int d_k f (v_k d_j v_j - v_j d_j v_k), f = mu^2/(lambda+3mu)

  double disgamma_margin = 0.0;   // min over nodes of (mu-kappa)^2 (1-L^2) - gamma^2
  double disgamma2_margin = 0.0;  // min of (lambda+2mu-kappa)^2 (1-L^2) - (lambda+2mu)^2 ratio
  bool disgamma = false;
  bool disgamma2 = false;

  double sum_of_parts() const { return x1_sq + y1_sq + cross_x1y1 + x2_sq + y2_sq + cross_x2y2; }
};

/// X/Y decomposition of the strict form of a 2-D Lame field with constant kappa.
/// Lambda_inf^2 for the discriminant checks is sup Lambda^2 of the profile.
FormBreakdown elasticity_breakdown(const CoefficientField& field, const LambdaProfile& profile,
                                   const TestField& v, double kappa, const FormOptions& options = {});

/// |grad(sqrt(phi(|u|)) u)|^2 and phi(|u|)|grad u|^2 at a point.
struct WeightedGradient {
  double lhs = 0.0;
  double weighted = 0.0;
};

WeightedGradient weighted_gradient(const PhiSpec& phi, const Eigen::VectorXd& u, const Eigen::MatrixXd& jac);

struct CounterexampleOptions {
  double background = 10.0;
  int max_octave = 10;  // rho = 2^j, j = 0..max_octave
  double kappa = 0.0;
  ProbeBudget budget;
  FormOptions form;
};

struct CounterexampleResult {
  bool found = false;
  double rho = 0.0;       // first frequency with a negative residual
  double residual = 0.0;  // residual at that frequency
  std::vector<std::pair<double, double>> sweep;  // (rho, residual)
  AlgebraicResult probe;
};

/// Oscillatory fields built from the minimizing real probe of the algebraic condition at the
/// domain center; residual = form - kappa int |grad v|^2 along a frequency sweep.
CounterexampleResult hunt_counterexample(const FormOperator& op, const LambdaProfile& profile, const Rect& domain,
                                         const CounterexampleOptions& options = {});

}  // namespace dissip
