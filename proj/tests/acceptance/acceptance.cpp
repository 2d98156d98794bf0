// Acceptance checks: one PASS/FAIL line per criterion with its runtime.
// Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "ssperk/analysis.hpp"
#include "ssperk/catalog.hpp"
#include "ssperk/integrator.hpp"
#include "ssperk/optimizer.hpp"
#include "ssperk/problems.hpp"

using namespace ssperk;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

// Collects failure reasons; the first few end up in the detail text.
struct Checker {
  int failures = 0;
  std::ostringstream notes;

  void expect(bool ok, const std::string& what) {
    if (ok) return;
    if (failures < 4) notes << (failures ? "; " : "") << what;
    ++failures;
  }
  Verdict verdict(const std::string& summary) const {
    std::string d = summary;
    if (failures) d += " | " + std::to_string(failures) + " failed: " + notes.str();
    return {failures == 0, d};
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

bool is_ssperk(const MethodId& id) { return id.family != Family::literature; }

// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

IntegrationResult run_adaptive(const OdeSystem& sys, const EmbeddedTableau& tab, double tol,
                               ControllerKind kind) {
  AdaptiveOptions opt;
  opt.atol = opt.rtol = tol;
  opt.controller = kind;
  opt.record_log = false;
  return integrate_adaptive(sys, tab, opt);
}

// ---------------------------------------------------------------------------

Verdict coefficients() {
  Checker ck;
  int pairs = 0;
  for (const auto& id : catalog_ids()) {
    const auto t = catalog_tableau(id);
    ++pairs;
    const int p = classify_order(t.A, t.b, 1e-12);
    const int pt = classify_order(t.A, t.embedded(), 1e-12);
    ck.expect(p == t.order, t.id + " p=" + std::to_string(p));
    ck.expect(pt == t.embedded_order, t.id + " p~=" + std::to_string(pt));
    for (const auto& r : order_condition_residuals(t.A, t.b, t.order))
      ck.expect(std::abs(r.value) <= 1e-12, t.id + " residual " + std::string(r.tree->name));
    for (const auto& r : order_condition_residuals(t.A, t.embedded(), t.embedded_order))
      ck.expect(std::abs(r.value) <= 1e-12,
                t.id + " embedded residual " + std::string(r.tree->name));
    if (!is_ssperk(id)) continue;
    const auto forced = forced_conditions(t.A, t.embedded_order + 1);
    const bool expect_exempt = id.family == Family::ssp4;
    ck.expect(expect_exempt ? forced == std::vector<std::string>{"b.(c^3/6-Ac^2/2)"} : forced.empty(),
              t.id + " forced conditions");
    ck.expect(is_non_defective(t, forced).non_defective, t.id + " defective");
  }
  return ck.verdict(std::to_string(pairs) + " pairs");
}

Verdict ssp_coefficients() {
  Checker ck;
  double worst = 0.0;
  auto check = [&](const char* name, double expected) {
    const auto t = base_method(parse_method_id(name));
    const double got = ssp_coefficient(t.A, t.b);
    worst = std::max(worst, std::abs(got - expected));
    ck.expect(std::abs(got - expected) <= 1e-5, std::string(name) + " C=" + fmt("%.8g", got));
  };
  for (int s = 2; s <= 10; ++s) check(("ssp" + std::to_string(s) + ",2").c_str(), s - 1.0);
  check("ssp4,3", 2.0);
  check("ssp9,3", 6.0);
  check("ssp10,4", 6.0);
  check("dp54", 0.0);
  return ck.verdict("max deviation " + fmt("%.2e", worst));
}

Verdict stability_radii_check() {
  Checker ck;
  const auto t22 = base_method(parse_method_id("ssp2,2"));
  const auto r22 = stability_radii(stability_polynomial(t22.A, t22.b), 20.0);
  ck.expect(std::abs(r22.delta_R - 2.0) <= 1e-4, "ssp2,2 delta_R " + fmt("%.8g", r22.delta_R));
  ck.expect(r22.delta_I == 0.0, "ssp2,2 delta_I " + fmt("%.3g", r22.delta_I));
  ck.expect(std::abs(r22.R_psi - 1.0) <= 1e-6, "ssp2,2 R " + fmt("%.8g", r22.R_psi));
  int checked = 0;
  for (const auto& id : catalog_ids()) {
    const auto t = catalog_tableau(id);
    const auto r = stability_radii(stability_polynomial(t.A, t.b), 10.0 * t.stages);
    ++checked;
    ck.expect(r.R_psi <= r.delta_C + 1e-6 && r.delta_C <= r.delta_R + 1e-6,
              t.id + " ordering " + fmt("%.6g", r.R_psi) + "/" + fmt("%.6g", r.delta_C) + "/" +
                  fmt("%.6g", r.delta_R));
    if (is_ssperk(id)) {
      const double C = ssp_coefficient(t.A, t.b);
      ck.expect(r.R_psi >= C - 1e-6, t.id + " R < C");
    }
  }
  return ck.verdict(std::to_string(checked) + " methods; ssp2,2 delta_R=" +
                    fmt("%.6f", r22.delta_R) + " R=" + fmt("%.6f", r22.R_psi));
}

// Trajectory maximum of |u_n - u_ref(t_n)| on the 100 coarsest grid points.
double trajectory_error(const OdeSystem& sys, const MatrixXd& A, const VectorXd& w, int n,
                        const std::vector<VectorXd>& ref) {
  const int stride = n / 100;
  double err = 0.0;
  int step = 0;
  (void)integrate_fixed(sys, A, w, (sys.t_end - sys.t0) / n, [&](double, const VectorXd& u) {
    if (step % stride == 0) err = std::max(err, (u - ref[step / stride]).cwiseAbs().maxCoeff());
    ++step;
  });
  return err;
}

double observed_order(const OdeSystem& sys, const MatrixXd& A, const VectorXd& w,
                      const std::vector<VectorXd>& ref) {
  std::vector<double> e;
  for (int n = 100; n <= 3200; n *= 2) e.push_back(trajectory_error(sys, A, w, n, ref));
  double order = std::log2(e[0] / e[1]);
  for (std::size_t k = 1; k < e.size(); ++k)
    if (e[k] >= 1e-12) order = std::log2(e[k - 1] / e[k]);
  return order;
}

Verdict convergence_orders() {
  Checker ck;
  const auto sys = make_vdp();
  const auto dp = catalog_tableau(parse_method_id("dp54"));
  const int n_ref = 3200 * 32;
  std::vector<VectorXd> ref;
  int step = 0;
  (void)integrate_fixed(sys, dp.A, dp.b, (sys.t_end - sys.t0) / n_ref,
                        [&](double, const VectorXd& u) {
                          if (step % (n_ref / 100) == 0) ref.push_back(u);
                          ++step;
                        });
  double worst = 0.0;
  int methods = 0;
  for (const auto& id : catalog_ids()) {
    const auto t = catalog_tableau(id);
    ++methods;
    const double q = observed_order(sys, t.A, t.b, ref);
    const double qe = observed_order(sys, t.A, t.embedded(), ref);
    worst = std::max({worst, std::abs(q - t.order), std::abs(qe - (t.order - 1))});
    ck.expect(std::abs(q - t.order) <= 0.2, t.id + " order " + fmt("%.3f", q));
    ck.expect(std::abs(qe - (t.order - 1)) <= 0.2, t.id + " embedded order " + fmt("%.3f", qe));
  }
  return ck.verdict(std::to_string(methods) + " pairs, max |q - q_expected| = " +
                    fmt("%.3f", worst));
}

Verdict vdp_bands() {
  struct Band {
    ControllerKind kind;
    double steps;
  };
  Checker ck;
  const auto sys = make_vdp_scaled();
  const auto ref = reference_solution(sys);
  const auto tab = resolve_method("ssp2,2-b2");
  std::ostringstream summary;
  for (const auto& b : {Band{ControllerKind::PID, 753}, Band{ControllerKind::I, 1982},
                        Band{ControllerKind::PI, 1270}, Band{ControllerKind::Gustafsson, 795}}) {
    const auto r = run_adaptive(sys, tab, 1e-4, b.kind);
    const double err = global_error(sys, r.final_state, ref);
    const auto total = static_cast<double>(r.total_steps());
    const std::string name(to_string(b.kind));
    summary << name << " " << r.total_steps() << "/" << r.n_rejected << "/" << fmt("%.3g", err)
            << " ";
    ck.expect(r.ok(), name + " failed");
    ck.expect(total >= 0.75 * b.steps && total <= 1.25 * b.steps,
              name + " steps " + std::to_string(r.total_steps()) + " outside [" +
                  fmt("%.0f", 0.75 * b.steps) + ", " + fmt("%.0f", 1.25 * b.steps) + "]");
    if (b.kind == ControllerKind::PID) {
      ck.expect(r.n_rejected <= 60, "PID rejected " + std::to_string(r.n_rejected));
      ck.expect(err >= 5e-5 && err <= 5e-4, "PID error " + fmt("%.3g", err));
    }
  }
  return ck.verdict(summary.str());
}

Verdict brusselator_band() {
  Checker ck;
  const auto sys = make_brusselator();
  const auto ref = reference_solution(sys);
  const auto r = run_adaptive(sys, resolve_method("ssp3,3"), 1e-4, ControllerKind::PID);
  const double err = global_error(sys, r.final_state, ref);
  ck.expect(r.ok(), "integration failed");
  ck.expect(r.total_steps() >= 230 && r.total_steps() <= 380,
            "steps " + std::to_string(r.total_steps()) + " outside [230, 380]");
  ck.expect(err >= 1e-5 && err <= 1e-4, "error " + fmt("%.3g", err) + " outside [1e-5, 1e-4]");
  return ck.verdict("steps " + std::to_string(r.total_steps()) + ", rejected " +
                    std::to_string(r.n_rejected) + ", error " + fmt("%.3g", err));
}

Verdict controller_ordering() {
  Checker ck;
  const auto sys = make_vdp_scaled();
  const auto tab = resolve_method("ssp2,2-b2");
  const auto pid = run_adaptive(sys, tab, 1e-4, ControllerKind::PID).total_steps();
  const auto pi = run_adaptive(sys, tab, 1e-4, ControllerKind::PI).total_steps();
  const auto i = run_adaptive(sys, tab, 1e-4, ControllerKind::I).total_steps();
  ck.expect(pid < pi && pi < i, "ordering violated");
  return ck.verdict("PID " + std::to_string(pid) + " < PI " + std::to_string(pi) + " < I " +
                    std::to_string(i));
}

Verdict tvd_property() {
  Checker ck;
  const int cells = 200;
  const auto sys = make_upwind(cells, 1.0);
  const double dx = sys.dx.value();
  // Summing |u_i - u_{i-1}| over the grid rounds at about cells * eps * TV.
  const double rounding = cells * std::numeric_limits<double>::epsilon() * total_variation(sys.u0);
  double worst = 0.0;
  int steps = 0;
  for (int s : {2, 4, 6}) {
    const auto tab = base_method(parse_method_id("ssp" + std::to_string(s) + ",2"));
    double prev = total_variation(sys.u0);
    bool ok = true;
    (void)integrate_fixed(sys, tab.A, tab.b, (s - 1) * dx, [&](double, const VectorXd& u) {
      const double tv = total_variation(u);
      worst = std::max(worst, tv - prev);
      if (tv > prev + rounding) ok = false;
      prev = tv;
      ++steps;
    });
    ck.expect(ok, "ssp" + std::to_string(s) + ",2 variation increased");
  }
  return ck.verdict(std::to_string(steps) + " states, largest TV change " + fmt("%.2e", worst) +
                    " (rounding bound " + fmt("%.2e", rounding) + ")");
}

Verdict tolerance_proportionality() {
  Checker ck;
  const auto sys = make_vdp_scaled();
  const auto ref = reference_solution(sys);
  const std::vector<double> tols{1e-3, 1e-4, 1e-5, 1e-6};
  double lo = 1e9;
  double hi = -1e9;
  int pairs = 0;
  for (const auto& id : catalog_ids()) {
    if (!is_ssperk(id)) continue;
    const auto tab = catalog_tableau(id);
    std::vector<double> errs;
    bool ok = true;
    for (double tol : tols) {
      const auto r = run_adaptive(sys, tab, tol, ControllerKind::PID);
      ok = ok && r.ok();
      errs.push_back(std::max(global_error(sys, r.final_state, ref), 1e-300));
    }
    ++pairs;
    const double slope = loglog_slope(tols, errs);
    lo = std::min(lo, slope);
    hi = std::max(hi, slope);
    ck.expect(ok, tab.id + " integration failed");
    ck.expect(slope >= 0.7 && slope <= 1.3, tab.id + " slope " + fmt("%.3f", slope));
  }
  return ck.verdict(std::to_string(pairs) + " pairs, slopes in [" + fmt("%.3f", lo) + ", " +
                    fmt("%.3f", hi) + "]");
}

Verdict weno_order() {
  Checker ck;
  const auto tab = resolve_method("ssp10,4-b3");
  const double pi = std::acos(-1.0);
  std::vector<double> errs;
  std::ostringstream summary;
  for (int n = 20; n <= 320; n *= 2) {
    const auto sys = make_advection(n, AdvectionData::sine, 0.2);
    const double dx = sys.dx.value();
    const VectorXd u = integrate_fixed(sys, tab, 0.05 * dx);
    VectorXd exact(n);
    for (int i = 0; i < n; ++i) exact(i) = std::sin(pi * (-1.0 + (i + 0.5) * dx - sys.t_end));
    errs.push_back(global_error(sys, u, exact));
  }
  for (std::size_t k = 1; k < errs.size(); ++k)
    summary << (k > 1 ? ", " : "") << fmt("%.2f", std::log2(errs[k - 1] / errs[k]));
  const double finest = std::log2(errs[errs.size() - 2] / errs.back());
  ck.expect(finest >= 4.5, "finest slope " + fmt("%.3f", finest));
  return ck.verdict("slopes " + summary.str());
}

Verdict pathology() {
  Checker ck;
  const auto sys = make_advection();
  const auto ref = reference_solution(sys);
  const double tol = 1e-4;
  const auto b2 = run_adaptive(sys, resolve_method("ssp10,4-b2"), tol, ControllerKind::PID);
  const auto b3 = run_adaptive(sys, resolve_method("ssp10,4-b3"), tol, ControllerKind::PID);
  const double e2 = global_error(sys, b2.final_state, ref);
  ck.expect(b2.ok() && b3.ok(), "integration failed");
  ck.expect(b2.n_fev >= 3 * b3.n_fev, "nfev ratio " +
                                          fmt("%.2f", double(b2.n_fev) / double(b3.n_fev)) +
                                          " < 3");
  ck.expect(e2 <= tol / 10.0, "b2 error " + fmt("%.3g", e2) + " > tol/10");
  return ck.verdict("nfev b2 " + std::to_string(b2.n_fev) + ", b3 " + std::to_string(b3.n_fev) +
                    ", b2 error " + fmt("%.3g", e2));
}

Verdict optimizer_soundness() {
  Checker ck;
  OptimizationSpec spec = optimization_spec_for(parse_method_id("ssp3,2-w"));
  const auto r = optimize_embedded(spec);
  const auto& A = spec.tableau.A;
  const auto base = catalog_tableau(parse_method_id("ssp3,2-b2"));
  const double baseline = objective(base.A, base.b, base.embedded(), 2);
  ck.expect(r.found, "ssp3,2 no solution");
  if (r.found) {
    ck.expect(std::abs(r.w.sum() - 1.0) <= 1e-10, "sum w != 1");
    ck.expect(r.w.minCoeff() >= -1e-12 && r.w.maxCoeff() <= 1.0 + 1e-12, "w outside [0, 1]");
    ck.expect(classify_order(A, r.w, 1e-10) >= 1, "order");
    ck.expect(r.non_defective, "defective");
    ck.expect(r.objective <= baseline, "objective " + fmt("%.4g", r.objective) + " > baseline");
  }
  OptimizationSpec none = optimization_spec_for(parse_method_id("ssp9,3-w"));
  none.require_ssp_at = 6.0;
  const auto n = optimize_embedded(none);
  ck.expect(!n.found, "ssp9,3 at r = 6 unexpectedly found");
  return ck.verdict("ssp3,2 objective " + fmt("%.4f", r.objective) + " (baseline " +
                    fmt("%.4f", baseline) + "); ssp9,3 r=6: " +
                    (n.found ? "found" : "no-solution"));
}

struct Criterion {
  int number;
  const char* name;
  double budget_s;
  std::function<Verdict()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "coefficient correctness", 1, coefficients},
      {2, "SSP coefficients", 10, ssp_coefficients},
      {3, "stability radii", 30, stability_radii_check},
      {4, "convergence orders", 60, convergence_orders},
      {5, "Van der Pol step bands", 10, vdp_bands},
      {6, "Brusselator step band", 10, brusselator_band},
      {7, "controller ordering", 30, controller_ordering},
      {8, "TVD property", 10, tvd_property},
      {9, "tolerance proportionality", 60, tolerance_proportionality},
      {10, "WENO5 spatial order", 120, weno_order},
      {11, "embedded b2 pathology", 300, pathology},
      {12, "optimizer soundness", 300, optimizer_soundness},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.budget_s) {
      v.pass = false;
      v.detail += " | runtime over " + fmt("%.0f", c.budget_s) + " s";
    }
    if (!v.pass) ++failed;
    std::printf("%s  %2d  %-26s %8.3f s  %s\n", v.pass ? "PASS" : "FAIL", c.number, c.name, secs,
                v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed ? 1 : 0;
}
