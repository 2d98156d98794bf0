#include "ssperk/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ssperk/error.hpp"

namespace ssperk {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void StepWorkspace::resize(Eigen::Index n, Eigen::Index stages) {
  if (k.rows() != n || k.cols() != stages) k.resize(n, stages);
  if (y.size() != n) y.resize(n);
  if (f.size() != n) f.resize(n);
}

namespace {

void compute_stages(const MatrixXd& A, const RhsFn& f, double t, const VectorXd& u, double dt,
                    StepWorkspace& ws) {
  const auto s = A.rows();
  ws.resize(u.size(), s);
  for (Eigen::Index i = 0; i < s; ++i) {
    ws.y = u;
    double ci = 0.0;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double a = A(i, j);
      ci += a;
      if (a != 0.0) ws.y.noalias() += (dt * a) * ws.k.col(j);
    }
    f(t + ci * dt, ws.y, ws.f);
    ws.k.col(i) = ws.f;
  }
}

void combine(const VectorXd& u, double dt, const MatrixXd& k, const VectorXd& w, VectorXd& out) {
  out = u;
  out.noalias() += dt * (k * w);
}

}  // namespace

void rk_step(const EmbeddedTableau& tab, const RhsFn& f, double t, const VectorXd& u, double dt,
             VectorXd& u_next, VectorXd& u_hat, StepWorkspace& ws) {
  compute_stages(tab.A, f, t, u, dt, ws);
  combine(u, dt, ws.k, tab.b, u_next);
  if (tab.b_hat) combine(u, dt, ws.k, *tab.b_hat, u_hat);
}

void rk_step(const MatrixXd& A, const VectorXd& w, const RhsFn& f, double t, const VectorXd& u,
             double dt, VectorXd& u_next, StepWorkspace& ws) {
  if (A.rows() != w.size()) throw Error(ErrorCode::dimension_mismatch, "weights vs tableau");
  compute_stages(A, f, t, u, dt, ws);
  combine(u, dt, ws.k, w, u_next);
}

double error_norm(const VectorXd& u_n, const VectorXd& u_next, const VectorXd& u_hat,
                  double atol, double rtol) {
  double err = 0.0;
  for (Eigen::Index i = 0; i < u_n.size(); ++i) {
    const double sc = atol + std::max(std::abs(u_n(i)), std::abs(u_next(i))) * rtol;
    const double r = std::abs(u_next(i) - u_hat(i)) / sc;
    if (std::isnan(r)) return std::numeric_limits<double>::quiet_NaN();
    err = std::max(err, r);
  }
  return err;
}

double initial_step(const RhsFn& f, double t0, const VectorXd& u0, int p, double atol,
                    double rtol, std::optional<double> cfl_bound) {
  const auto n = u0.size();
  const VectorXd sc = (atol + rtol * u0.array().abs()).matrix();
  auto rms = [&](const VectorXd& v) {
    if (n == 0) return 0.0;
    return std::sqrt((v.array() / sc.array()).square().sum() / static_cast<double>(n));
  };
  VectorXd f0(n);
  f(t0, u0, f0);
  if (!f0.allFinite()) throw Error(ErrorCode::startup_failure, "non-finite rhs at t0");
  const double d0 = rms(u0);
  const double d1 = rms(f0);
  const double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  const VectorXd u1 = u0 + h0 * f0;
  VectorXd f1(n);
  f(t0 + h0, u1, f1);
  if (!f1.allFinite()) throw Error(ErrorCode::startup_failure, "non-finite rhs at probe");
  const double d2 = rms(f1 - f0) / h0;
  const double dm = std::max(d1, d2);
  const double h1 =
      dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 1.0 / (p + 1));
  double dt = std::min(100.0 * h0, h1);
  if (cfl_bound) dt = std::min(dt, *cfl_bound);
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw Error(ErrorCode::startup_failure, "starting step is not positive");
  return dt;
}

std::string_view to_string(IntegrationStatus s) noexcept {
  switch (s) {
    case IntegrationStatus::success: return "success";
    case IntegrationStatus::stiffness_failure: return "stiffness-failure";
    case IntegrationStatus::budget_failure: return "budget-failure";
    case IntegrationStatus::startup_failure: return "startup-failure";
  }
  return "?";
}

IntegrationResult integrate_adaptive(const OdeSystem& problem, const EmbeddedTableau& tab,
                                     const AdaptiveOptions& opt) {
  if (!tab.has_embedded())
    throw Error(ErrorCode::invalid_argument, tab.id + " has no embedded weights");
  if (opt.atol < 0.0 || opt.rtol < 0.0 || (opt.atol == 0.0 && opt.rtol == 0.0))
    throw Error(ErrorCode::invalid_argument, "tolerances must be nonnegative and not both 0");
  if (problem.u0.size() == 0) throw Error(ErrorCode::invalid_argument, "empty initial state");

  IntegrationResult res;
  const double T = problem.t_end;
  double t = problem.t0;
  VectorXd u = problem.u0;
  res.final_state = u;
  res.t_final = t;

  const int p_ctrl = std::max(
      1, opt.control_order == ControlOrder::embedded ? tab.embedded_order : tab.order);
  Controller ctrl(opt.controller, opt.gains ? *opt.gains : default_gains(opt.controller));

  std::vector<double> outputs = opt.output_times;
  std::sort(outputs.begin(), outputs.end());
  std::size_t next_out = 0;
  auto emit_until = [&](double t_lo, const VectorXd& u_lo, double t_hi, const VectorXd& u_hi) {
    while (next_out < outputs.size() && outputs[next_out] <= t_hi) {
      const double to = outputs[next_out];
      if (to >= t_lo) {
        const double th = t_hi > t_lo ? (to - t_lo) / (t_hi - t_lo) : 1.0;
        res.samples.emplace_back(to, (1.0 - th) * u_lo + th * u_hi);
      }
      ++next_out;
    }
  };
  emit_until(t, u, t, u);

  double dt = 0.0;
  try {
    std::optional<double> cfl;
    if (problem.cfl_bound) cfl = problem.cfl_bound(u);
    dt = opt.initial_dt ? *opt.initial_dt
                        : initial_step(problem.rhs, t, u, tab.order, opt.atol, opt.rtol, cfl);
  } catch (const Error& e) {
    res.status = IntegrationStatus::startup_failure;
    res.message = e.what();
    return res;
  }

  StepWorkspace ws;
  VectorXd u_next(u.size());
  VectorXd u_hat(u.size());
  const auto s = static_cast<std::int64_t>(tab.stages);
  constexpr double eps = std::numeric_limits<double>::epsilon();

  while (t < T) {
    if (res.total_steps() >= opt.max_steps) {
      res.status = IntegrationStatus::budget_failure;
      res.message = "step budget exhausted at t = " + std::to_string(t);
      break;
    }
    bool last = false;
    double h = dt;
    if (t + h >= T) {
      h = T - t;
      last = true;
    }
    if (!(h > 0.0) || h < 100.0 * eps * std::abs(t) || !std::isfinite(h)) {
      res.status = IntegrationStatus::stiffness_failure;
      res.message = "step size underflow at t = " + std::to_string(t);
      break;
    }

    double err;
    try {
      rk_step(tab, problem.rhs, t, u, h, u_next, u_hat, ws);
      err = error_norm(u, u_next, u_hat, opt.atol, opt.rtol);
      if (!u_next.allFinite()) err = std::numeric_limits<double>::infinity();
    } catch (const InvalidState&) {
      err = std::numeric_limits<double>::infinity();
    }
    res.n_fev += s;

    const bool finite = std::isfinite(err);
    const double beta = finite ? ctrl.propose_factor(err, p_ctrl) : 0.0;
    const double dt_new = ctrl.clamp(h, beta);
    const bool accept = finite && err <= 1.0;
    if (opt.record_log) res.step_log.push_back({t, h, finite ? err : -1.0, accept});

    if (accept) {
      const double t_new = last ? T : t + h;
      emit_until(t, u, t_new, u_next);
      t = t_new;
      u.swap(u_next);
      ++res.n_accepted;
      ctrl.on_accept(err);
    } else {
      ++res.n_rejected;
      ctrl.on_reject();
    }
    dt = dt_new;
  }

  res.final_state = u;
  res.t_final = t;
  return res;
}

VectorXd integrate_fixed(const OdeSystem& problem, const MatrixXd& A, const VectorXd& w,
                         double dt, const StepObserver& observer) {
  if (!(dt > 0.0)) throw Error(ErrorCode::invalid_argument, "dt must be positive");
  const double T = problem.t_end;
  double t = problem.t0;
  VectorXd u = problem.u0;
  VectorXd u_next(u.size());
  StepWorkspace ws;
  if (observer) observer(t, u);
  const auto n_steps = static_cast<std::int64_t>(std::ceil((T - t) / dt * (1.0 - 1e-12)));
  for (std::int64_t k = 0; k < n_steps; ++k) {
    const double t_new = (k + 1 == n_steps) ? T : problem.t0 + static_cast<double>(k + 1) * dt;
    rk_step(A, w, problem.rhs, t, u, t_new - t, u_next, ws);
    u.swap(u_next);
    t = t_new;
    if (observer) observer(t, u);
  }
  return u;
}

VectorXd integrate_fixed(const OdeSystem& problem, const EmbeddedTableau& tab, double dt,
                         const StepObserver& observer) {
  return integrate_fixed(problem, tab.A, tab.b, dt, observer);
}

double global_error(const OdeSystem& problem, const VectorXd& a, const VectorXd& b) {
  const double e = (a - b).norm();
  return problem.dx ? std::sqrt(*problem.dx) * e : e;
}

VectorXd reference_solution(const OdeSystem& problem, double tol) {
  AdaptiveOptions opt;
  opt.atol = tol;
  opt.rtol = tol;
  opt.controller = ControllerKind::PI;
  opt.control_order = ControlOrder::embedded;
  opt.record_log = false;
  const auto r = integrate_adaptive(problem, literature_pair(LiteraturePair::dp54), opt);
  if (!r.ok()) throw Error(ErrorCode::invalid_argument, "reference run failed: " + r.message);
  return r.final_state;
}

}  // namespace ssperk
