#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "dissip/coefficients.hpp"
#include "dissip/lambda_profile.hpp"

namespace dissip {

enum class VerdictStatus { StrictDissipative, DissipativeBoundary, NotDissipative, Inconclusive };

std::string to_string(VerdictStatus status);

struct Verdict {
  VerdictStatus status = VerdictStatus::Inconclusive;
  double lambda_inf_sq = 0.0;  // sup Lambda^2, which equals Lambda_inf^2 when |s phi'/phi| is monotone
  double rhs = 0.0;
  double margin = 0.0;  // rhs - lambda_inf_sq
  std::optional<double> bmo_value;
  std::optional<double> bmo_threshold;
  std::optional<double> kappa;
  std::optional<double> c0;
  std::vector<std::string> notes;
};

/// xi in R^2, eta and omega in C^m with |omega| = 1.
struct AlgebraicProbe {
  Eigen::Vector2d xi = Eigen::Vector2d::UnitX();
  Eigen::VectorXcd eta;
  Eigen::VectorXcd omega;
};

struct ProbeBudget {
  int grid = 32;         // coarse nodes per probe angle
  int refinements = 20;  // Nelder-Mead polishing rounds
  double stabilize = 1e-8;
  bool real_only = false;  // restrict to real eta, omega
};

struct AlgebraicResult {
  double min_value = 0.0;
  AlgebraicProbe argmin;
  int rounds = 0;
};

/// Left side of the necessary algebraic condition at one probe:
/// Re( <S eta, eta> - L^2 <S omega, omega> (Re<eta, omega>)^2
///     + L (<S omega, eta> - <S eta, omega>) Re<eta, omega> ),  S = A^{hk} xi_h xi_k.
double algebraic_form(const GeneralSystem& sys, double lambda_inf, const AlgebraicProbe& probe);

/// Minimizes algebraic_form over |xi| = |eta| = |omega| = 1. For fixed xi, omega the form is a
/// real quadratic form in eta, so the inner minimum is an eigenvalue problem.
AlgebraicResult algebraic_margin(const GeneralSystem& sys, double lambda_inf, const ProbeBudget& budget = {});

/// Decision for the 2-D Lame operator with variable coefficients.
Verdict lame2d_verdict(double lambda_inf_sq, const CoefficientField& field, double c0 = 1.0,
                       std::optional<double> kappa_hint = std::nullopt);
Verdict lame2d_verdict(const PhiSpec& phi, const CoefficientField& field, double c0 = 1.0,
                       std::optional<double> kappa_hint = std::nullopt);

/// Bracket of the exponent where the 2-D verdict for phi(t) = t^{p-2} flips.
struct ExponentBracket {
  double below = 0.0;  // necessary condition holds
  double above = 0.0;  // NotDissipative
  int iterations = 0;
};

/// Bisection over p in [p_lo, p_hi]; needs the condition to hold at p_lo and fail at p_hi.
ExponentBracket power_threshold(const CoefficientField& field, double p_lo, double p_hi, double tol = 1e-7);

/// Sufficient condition in any dimension for constant Lame coefficients.
Verdict lameNd_sufficient(double lambda_inf_sq, double lambda_c, double mu_c);
Verdict lameNd_sufficient(const PhiSpec& phi, double lambda_c, double mu_c);

/// Threshold of the sufficient condition: mu/(lambda+2mu) if lambda+mu > 0, else (lambda+2mu)/mu.
double lameNd_threshold(double lambda_c, double mu_c);

/// The same threshold in terms of Poisson's ratio nu < 1/2: (1-2nu)/(2(1-nu)).
double poisson_threshold(double nu);

/// Coefficient-wise bound C of the perturbation form by |eps| + |sigma| times |grad v|^2.
double perturbation_constant(double lambda_inf_sq, int dim = 2);

/// Admissible L^inf budget kappa0/(2C) for |eps| + |sigma|. Throws NotStrict for kappa0 < 0.
double perturbation_budget(double lambda_inf_sq, double kappa0, int dim = 2);
double perturbation_budget(const PhiSpec& phi, double lambda_c, double mu_c, double kappa0, int dim = 2);

}  // namespace dissip
