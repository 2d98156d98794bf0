#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ssperk/tableau.hpp"

namespace ssperk {

/// Embedded-weight search for a fixed advancing method (A, b).
struct OptimizationSpec {
  EmbeddedTableau tableau;
  int target_order = 0;                  ///< order of the embedded weights, p~ = p - 1 >= 1
  std::optional<double> require_ssp_at;  ///< demand SSP feasibility of w at this r
  int seeds = 100;                       ///< number of multistart local searches
  std::int64_t budget = 200000;          ///< objective evaluations over all starts
  double tol_order = 1e-10;
  std::uint64_t seed = 0;
  int threads = 0;  ///< 0: hardware concurrency
};

/// SSP conditions of the bordered matrix [[A, 0], [w^T, 0]] at r.
[[nodiscard]] bool ssp_feasible(const Eigen::MatrixXd& A, const Eigen::VectorXd& w, double r);

/// ||(A2_emb, Ainf_emb, B2 - 1, Binf - 1, C2 - 1, Cinf - 1)||_inf for the pair
/// (b, w), where b has order p and w must satisfy the order conditions up to
/// p - 1 within tol_order. Returns +inf otherwise or when a term diverges.
[[nodiscard]] double objective(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                               const Eigen::VectorXd& w, int order, double tol_order = 1e-10);

struct OptimizationReport {
  bool found = false;
  Eigen::VectorXd w;
  double objective = 0.0;
  std::vector<std::pair<std::string, double>> residuals;  ///< order conditions up to p~
  std::optional<double> ssp_r;
  bool ssp_feasible = false;
  bool non_defective = false;
  std::int64_t evaluations = 0;
  int starts = 0;
  std::uint64_t seed = 0;
  std::string message;
};

/// Multistart Nelder-Mead over the affine space of weights satisfying the
/// order conditions, with quadratic penalties on w in [0, 1] and on the SSP
/// conditions, followed by an active-set projection onto the feasible set.
/// A result with found == false carries no weights.
[[nodiscard]] OptimizationReport optimize_embedded(const OptimizationSpec& spec);

// ---------------------------------------------------------------------------

struct NelderMeadResult {
  Eigen::VectorXd x;
  double f = 0.0;
  std::int64_t evaluations = 0;
};

/// Adaptive-parameter Nelder-Mead with restarts from the incumbent until the
/// evaluation budget is spent or a restart stops improving.
[[nodiscard]] NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                                           const Eigen::VectorXd& x0, double step,
                                           std::int64_t max_evals, double ftol = 1e-15);

}  // namespace ssperk
