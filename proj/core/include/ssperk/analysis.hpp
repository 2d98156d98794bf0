#pragma once

#include <complex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ssperk/tableau.hpp"

namespace ssperk {

// ---------------------------------------------------------------------------
// Order conditions
// ---------------------------------------------------------------------------

/// Rooted tree of order <= 5, identified by its elementary weight written in
/// vector notation (products are componentwise, e.g. "c*Ac").
struct RootedTree {
  std::string_view name;
  int order;
  int density;   ///< gamma(t)
  int symmetry;  ///< sigma(t)
};

/// The 17 rooted trees of order 1..5 (1, 1, 2, 4, 9 per order).
[[nodiscard]] const std::vector<RootedTree>& rooted_trees();

/// Elementary weight vectors Phi(t) for every tree of order <= max_order, in
/// the order of rooted_trees().
[[nodiscard]] std::vector<Eigen::VectorXd> elementary_weights(const Eigen::MatrixXd& A,
                                                              int max_order);

enum class TreeWeighting {
  none,      ///< tau(t) = w^T Phi(t) - 1/gamma(t)
  symmetry,  ///< tau(t) divided by sigma(t)
};

struct TreeResidual {
  const RootedTree* tree;
  double value;
};

/// Residuals w^T Phi(t) - 1/gamma(t) for all trees of order <= max_order (1..5).
[[nodiscard]] std::vector<TreeResidual> order_condition_residuals(
    const Eigen::MatrixXd& A, const Eigen::VectorXd& w, int max_order,
    TreeWeighting weighting = TreeWeighting::none);

/// Largest q such that all tree residuals of order <= q are below tol.
/// Returns 0 when sum(w) != 1.
[[nodiscard]] int classify_order(const Eigen::MatrixXd& A, const Eigen::VectorXd& w,
                                 double tol = 1e-12);

/// A scalar order condition g^T w = rhs. For fixed A every order condition is
/// linear in the weights.
struct LinearCondition {
  std::string name;
  int order;
  Eigen::VectorXd g;
  double rhs;

  [[nodiscard]] double residual(const Eigen::VectorXd& w) const { return g.dot(w) - rhs; }
};

/// Order conditions of exactly the given order. Orders 1..4 use the
/// simplified forms
///   b.e = 1;  b.c = 1/2;  b.c^2 = 1/3,  b.(c^2/2 - Ac) = 0;
///   b.c^3 = 1/4,  b.A(c^2/2 - Ac) = 0,  b.(c^3/6 - Ac^2/2) = 0,
///   b.diag(c)(c^2/2 - Ac) = 0;
/// order 5 uses the nine tree conditions.
[[nodiscard]] std::vector<LinearCondition> order_conditions(const Eigen::MatrixXd& A, int order);

/// All conditions of order 1..max_order.
[[nodiscard]] std::vector<LinearCondition> order_conditions_up_to(const Eigen::MatrixXd& A,
                                                                  int max_order);

/// Names of the order-`order` conditions that every weight vector satisfying
/// all lower-order conditions satisfies as well (e.g. b.(c^3/6 - Ac^2/2) = 0
/// for SSPERK(10,4)). These can never be violated and are exempt from the
/// non-defectiveness test.
[[nodiscard]] std::vector<std::string> forced_conditions(const Eigen::MatrixXd& A, int order,
                                                         double tol = 1e-12);

struct ConditionCheck {
  std::string name;
  double residual;
  bool exempt;
};

struct NonDefectReport {
  bool non_defective = false;
  std::vector<ConditionCheck> conditions;
};

/// True iff b_hat violates every order-p condition not listed in `exempt`
/// (|residual| > tol).
[[nodiscard]] NonDefectReport is_non_defective(const Eigen::MatrixXd& A,
                                               const Eigen::VectorXd& b_hat, int order,
                                               const std::vector<std::string>& exempt = {},
                                               double tol = 1e-10);
[[nodiscard]] NonDefectReport is_non_defective(const EmbeddedTableau& t,
                                               const std::vector<std::string>& exempt = {},
                                               double tol = 1e-10);

// ---------------------------------------------------------------------------
// SSP coefficient
// ---------------------------------------------------------------------------

struct SspTolerances {
  double nonnegativity = 1e-10;
  double bound = 1e-10;
};

/// Checks K (I + rK)^{-1} >= 0 and r K (I + rK)^{-1} e <= e for the bordered
/// matrix K = [[A, 0], [w^T, 0]]. A singular (I + rK) counts as infeasible.
[[nodiscard]] bool ssp_conditions_hold(const Eigen::MatrixXd& A, const Eigen::VectorXd& w,
                                       double r, const SspTolerances& tol = {});

/// Sum of squared violations of the SSP conditions at r; zero when they hold.
[[nodiscard]] double ssp_violation(const Eigen::MatrixXd& A, const Eigen::VectorXd& w, double r);

/// Supremum of r for which the SSP conditions hold, by bisection on
/// [0, 2s] down to width `tol`. Zero when A or w has a negative entry.
[[nodiscard]] double ssp_coefficient(const Eigen::MatrixXd& A, const Eigen::VectorXd& w,
                                     double tol = 1e-8);

enum class Weights { advancing, embedded };

[[nodiscard]] double ssp_coefficient(const EmbeddedTableau& t, Weights which, double tol = 1e-8);

// ---------------------------------------------------------------------------
// Linear stability
// ---------------------------------------------------------------------------

/// psi(z) = sum_k a_k z^k, the stability polynomial of an explicit method.
///
/// When built from a tableau the polynomial keeps the pair (A, w) and
/// evaluates psi through the stage recursion y = e + z A y, psi = 1 + z w^T y,
/// which stays accurate far out on the negative real axis where the monomial
/// sum cancels catastrophically.
class StabilityPolynomial {
 public:
  StabilityPolynomial() : coeffs_{1.0} {}
  explicit StabilityPolynomial(std::vector<double> coeffs);
  StabilityPolynomial(std::vector<double> coeffs, Eigen::MatrixXd A, Eigen::VectorXd w);

  [[nodiscard]] const std::vector<double>& coeffs() const noexcept { return coeffs_; }
  [[nodiscard]] int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  [[nodiscard]] bool has_realization() const noexcept { return A_.size() > 0; }

  [[nodiscard]] std::complex<double> operator()(std::complex<double> z) const;
  [[nodiscard]] double operator()(double x) const;

  /// Coefficients of psi(x0 + h) as a polynomial in h, by synthetic division.
  [[nodiscard]] std::vector<double> shifted(double x0) const;

  /// Taylor coefficients at x0 together with the magnitude of the terms that
  /// were summed to form each one (a rounding scale).
  struct Taylor {
    std::vector<double> coeffs;
    std::vector<double> scale;
  };
  /// Uses the resolvent (I - x0 A)^{-1} when the realization has nonnegative
  /// coefficients, synthetic division otherwise.
  [[nodiscard]] Taylor taylor(double x0) const;

 private:
  std::vector<double> coeffs_;
  Eigen::MatrixXd A_;
  Eigen::VectorXd w_;
};

/// a_0 = 1, a_k = w^T A^{k-1} e; trailing exact zeros dropped.
[[nodiscard]] StabilityPolynomial stability_polynomial(const Eigen::MatrixXd& A,
                                                       const Eigen::VectorXd& w);

struct StabilityRadii {
  double delta_R = 0.0;  ///< negative real axis inclusion
  double delta_I = 0.0;  ///< imaginary axis inclusion
  double delta_C = 0.0;  ///< circle contractivity
  double R_psi = 0.0;    ///< absolute monotonicity
};

/// Default search cap for the radii: 10 * max(degree, 1).
[[nodiscard]] double default_radius_cap(const StabilityPolynomial& psi);

/// Largest gamma with |psi(x)| <= 1 + 1e-12 on [-gamma, 0].
[[nodiscard]] double real_axis_inclusion(const StabilityPolynomial& psi, double cap = 0.0);
/// Largest gamma with |psi(iy)| <= 1 + 1e-12 for |y| <= gamma.
[[nodiscard]] double imag_axis_inclusion(const StabilityPolynomial& psi, double cap = 0.0);
/// Largest r with |psi| <= 1 + 1e-12 on the disk |z + r| <= r (checked on its
/// boundary). Returns the cap when no bound is found.
[[nodiscard]] double circle_contractivity_radius(const StabilityPolynomial& psi,
                                                 double cap = 0.0);
/// Largest r such that every Taylor coefficient of psi at -r is >= -1e-12
/// times the magnitude of the terms it was summed from.
[[nodiscard]] double absolute_monotonicity_radius(const StabilityPolynomial& psi,
                                                  double cap = 0.0);

[[nodiscard]] StabilityRadii stability_radii(const StabilityPolynomial& psi, double cap = 0.0);

/// |psi(x + iy)| on a uniform nx-by-ny lattice, row-major with x fastest.
struct RegionGrid {
  int nx = 0;
  int ny = 0;
  std::vector<double> re;
  std::vector<double> im;
  std::vector<double> abs_psi;

  [[nodiscard]] double at(int i, int j) const {
    return abs_psi[static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) +
                   static_cast<std::size_t>(i)];
  }
};

[[nodiscard]] RegionGrid stability_region_grid(const StabilityPolynomial& psi, double re_min,
                                               double re_max, double im_min, double im_max,
                                               int nx, int ny);

// ---------------------------------------------------------------------------
// Error measures
// ---------------------------------------------------------------------------

enum class BMeasure {
  main_over_embedded,  ///< B = A^(p+1)(b) / A^(p)(b_hat)
  literal,             ///< B = A^(p+1)(b) / A^(p)(b), infinite when b has order > p
};

struct ErrorMeasureOptions {
  TreeWeighting weighting = TreeWeighting::none;
  BMeasure b_measure = BMeasure::main_over_embedded;
};

struct ErrorMeasures {
  double A2_main = 0.0;
  double Ainf_main = 0.0;
  double A2_emb = 0.0;
  double Ainf_emb = 0.0;
  double B2 = 0.0;
  double Binf = 0.0;
  double C2 = 0.0;
  double Cinf = 0.0;
  double D = 0.0;
  TreeWeighting weighting = TreeWeighting::none;
  BMeasure b_measure = BMeasure::main_over_embedded;
};

/// Principal error norms of a pair whose advancing weights have order p <= 4.
[[nodiscard]] ErrorMeasures error_measures(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                           const Eigen::VectorXd& b_hat, int order,
                                           const ErrorMeasureOptions& options = {});
[[nodiscard]] ErrorMeasures error_measures(const EmbeddedTableau& t,
                                           const ErrorMeasureOptions& options = {});

// ---------------------------------------------------------------------------
// Full report
// ---------------------------------------------------------------------------

struct AnalysisReport {
  std::string id;
  int p = 0;
  int p_tilde = 0;
  double ssp_main = 0.0;
  double ssp_embedded = 0.0;
  StabilityRadii radii;
  std::optional<ErrorMeasures> errors;  ///< absent when p > 4
  bool non_defective = false;
  std::vector<std::string> exempt;
};

[[nodiscard]] AnalysisReport analyze(const EmbeddedTableau& t);

}  // namespace ssperk
