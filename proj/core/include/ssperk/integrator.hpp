#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ssperk/controller.hpp"
#include "ssperk/tableau.hpp"

namespace ssperk {

/// In-place right-hand side: writes f(t, u) into du (already sized).
using RhsFn = std::function<void(double, const Eigen::VectorXd&, Eigen::VectorXd&)>;

/// u' = f(t, u) on [t0, t_end].
struct OdeSystem {
  std::string name;
  RhsFn rhs;
  double t0 = 0.0;
  double t_end = 1.0;
  Eigen::VectorXd u0;
  /// Optional stable step bound for a given state (CFL restriction).
  std::function<double(const Eigen::VectorXd&)> cfl_bound;
  /// Cell width for grid functions; the global error uses sqrt(dx) * ||e||_2
  /// when set, the Euclidean norm otherwise.
  std::optional<double> dx;

  [[nodiscard]] Eigen::Index dim() const noexcept { return u0.size(); }
};

/// Reusable stage storage for rk_step.
struct StepWorkspace {
  Eigen::MatrixXd k;  ///< stage derivatives, one column per stage
  Eigen::VectorXd y;
  Eigen::VectorXd f;
  void resize(Eigen::Index n, Eigen::Index stages);
};

/// One step of the pair: u_next from b, u_hat from b_hat (u_hat is left
/// untouched when the tableau has no embedded weights). Uses s evaluations.
void rk_step(const EmbeddedTableau& tab, const RhsFn& f, double t, const Eigen::VectorXd& u,
             double dt, Eigen::VectorXd& u_next, Eigen::VectorXd& u_hat, StepWorkspace& ws);

/// One step with the advancing weights only.
void rk_step(const Eigen::MatrixXd& A, const Eigen::VectorXd& w, const RhsFn& f, double t,
             const Eigen::VectorXd& u, double dt, Eigen::VectorXd& u_next, StepWorkspace& ws);

/// max_i |u_next_i - u_hat_i| / (atol + max(|u_n_i|, |u_next_i|) * rtol).
[[nodiscard]] double error_norm(const Eigen::VectorXd& u_n, const Eigen::VectorXd& u_next,
                                const Eigen::VectorXd& u_hat, double atol, double rtol);

/// Starting step size (Gladwell, Shampine and Brankin) using root-mean-square
/// norms, capped by cfl_bound when given. Throws Error(startup_failure) when
/// the right-hand side is not finite.
[[nodiscard]] double initial_step(const RhsFn& f, double t0, const Eigen::VectorXd& u0, int p,
                                  double atol, double rtol,
                                  std::optional<double> cfl_bound = std::nullopt);

enum class IntegrationStatus { success, stiffness_failure, budget_failure, startup_failure };

[[nodiscard]] std::string_view to_string(IntegrationStatus s) noexcept;

/// Order used in the controller exponents.
enum class ControlOrder {
  embedded,  ///< p_tilde, the order of the error estimate
  advancing, ///< p
};

struct AdaptiveOptions {
  double atol = 1e-4;
  double rtol = 1e-4;
  ControllerKind controller = ControllerKind::PID;
  std::optional<ControllerGains> gains;
  ControlOrder control_order = ControlOrder::embedded;
  std::int64_t max_steps = 10'000'000;
  /// Overrides the automatic starting step when set.
  std::optional<double> initial_dt;
  bool record_log = true;
  /// Times in [t0, t_end] at which to sample the solution (linear interpolation).
  std::vector<double> output_times;
};

struct StepRecord {
  double t;   ///< start of the attempted step
  double dt;
  double err;
  bool accepted;
};

struct IntegrationResult {
  IntegrationStatus status = IntegrationStatus::success;
  std::string message;
  double t_final = 0.0;
  Eigen::VectorXd final_state;
  std::int64_t n_accepted = 0;
  std::int64_t n_rejected = 0;
  std::int64_t n_fev = 0;
  std::vector<StepRecord> step_log;
  std::vector<std::pair<double, Eigen::VectorXd>> samples;

  [[nodiscard]] std::int64_t total_steps() const noexcept { return n_accepted + n_rejected; }
  [[nodiscard]] bool ok() const noexcept { return status == IntegrationStatus::success; }
};

/// Adaptive integration with local extrapolation. Needs embedded weights.
[[nodiscard]] IntegrationResult integrate_adaptive(const OdeSystem& problem,
                                                   const EmbeddedTableau& tab,
                                                   const AdaptiveOptions& options = {});

using StepObserver = std::function<void(double, const Eigen::VectorXd&)>;

/// Uniform steps of size dt (the last one truncated to land on t_end) with
/// weights w. The observer, if any, sees the initial state and every step.
[[nodiscard]] Eigen::VectorXd integrate_fixed(const OdeSystem& problem, const Eigen::MatrixXd& A,
                                              const Eigen::VectorXd& w, double dt,
                                              const StepObserver& observer = {});
[[nodiscard]] Eigen::VectorXd integrate_fixed(const OdeSystem& problem,
                                              const EmbeddedTableau& tab, double dt,
                                              const StepObserver& observer = {});

/// sqrt(dx) * ||a - b||_2 for grid problems, ||a - b||_2 otherwise.
[[nodiscard]] double global_error(const OdeSystem& problem, const Eigen::VectorXd& a,
                                  const Eigen::VectorXd& b);

/// Reference end state from dp54 at atol = rtol = tol.
[[nodiscard]] Eigen::VectorXd reference_solution(const OdeSystem& problem, double tol = 1e-12);

}  // namespace ssperk
