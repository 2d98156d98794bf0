#include "ssperk/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include "ssperk/analysis.hpp"
#include "ssperk/error.hpp"

namespace ssperk {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPenalty = 1e6;

double max_order_residual(const MatrixXd& A, const VectorXd& w, int max_order) {
  double m = 0.0;
  for (const auto& r : order_condition_residuals(A, w, max_order))
    m = std::max(m, std::abs(r.value));
  return m;
}

}  // namespace

bool ssp_feasible(const MatrixXd& A, const VectorXd& w, double r) {
  if (r < 0.0) throw Error(ErrorCode::invalid_argument, "r must be nonnegative");
  if (w.size() > 0 && w.minCoeff() < -1e-10) return false;
  return ssp_conditions_hold(A, w, r);
}

double objective(const MatrixXd& A, const VectorXd& b, const VectorXd& w, int order,
                 double tol_order) {
  if (order < 2 || order > 4) return kInf;
  if (A.rows() != w.size()) return kInf;
  if (max_order_residual(A, w, order - 1) > tol_order) return kInf;
  const auto m = error_measures(A, b, w, order);
  const double f = std::max({std::abs(m.A2_emb), std::abs(m.Ainf_emb), std::abs(m.B2 - 1.0),
                             std::abs(m.Binf - 1.0), std::abs(m.C2 - 1.0),
                             std::abs(m.Cinf - 1.0)});
  return std::isfinite(f) ? f : kInf;
}

// ---------------------------------------------------------------------------

NelderMeadResult nelder_mead(const std::function<double(const VectorXd&)>& f, const VectorXd& x0,
                             double step, std::int64_t max_evals, double ftol) {
  const auto n = x0.size();
  NelderMeadResult best{x0, f(x0), 1};
  if (n == 0) return best;

  const double dn = static_cast<double>(n);
  const double alpha = 1.0;
  const double beta = 1.0 + 2.0 / dn;
  const double gamma = 0.75 - 0.5 / dn;
  const double delta = 1.0 - 1.0 / dn;

  std::vector<VectorXd> xs(static_cast<std::size_t>(n + 1));
  std::vector<double> fs(static_cast<std::size_t>(n + 1));
  std::vector<std::size_t> idx(static_cast<std::size_t>(n + 1));
  auto eval = [&](const VectorXd& x) {
    ++best.evaluations;
    return f(x);
  };
  auto budget_left = [&] { return best.evaluations < max_evals; };

  bool first_run = true;
  while (budget_left()) {
    const double start_f = best.f;
    xs[0] = best.x;
    fs[0] = best.f;
    for (Eigen::Index i = 0; i < n && budget_left(); ++i) {
      const auto k = static_cast<std::size_t>(i + 1);
      xs[k] = best.x;
      xs[k](i) += step;
      fs[k] = eval(xs[k]);
    }
    if (!budget_left()) break;

    while (budget_left()) {
      for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
      std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
      const std::size_t lo = idx.front();
      const std::size_t hi = idx.back();
      const std::size_t nh = idx[idx.size() - 2];

      double diam = 0.0;
      for (const auto& x : xs) diam = std::max(diam, (x - xs[lo]).lpNorm<Eigen::Infinity>());
      const double spread = std::abs(fs[hi] - fs[lo]);
      if (std::isfinite(fs[hi]) &&
          (spread <= ftol * std::max(1.0, std::abs(fs[lo])) || diam < 1e-13))
        break;

      VectorXd centroid = VectorXd::Zero(n);
      for (std::size_t k = 0; k < xs.size(); ++k)
        if (k != hi) centroid += xs[k];
      centroid /= dn;

      const VectorXd xr = centroid + alpha * (centroid - xs[hi]);
      const double fr = eval(xr);
      if (fr < fs[lo]) {
        const VectorXd xe = centroid + beta * (xr - centroid);
        const double fe = budget_left() ? eval(xe) : kInf;
        if (fe < fr) {
          xs[hi] = xe;
          fs[hi] = fe;
        } else {
          xs[hi] = xr;
          fs[hi] = fr;
        }
        continue;
      }
      if (fr < fs[nh]) {
        xs[hi] = xr;
        fs[hi] = fr;
        continue;
      }
      const bool outside = fr < fs[hi];
      const VectorXd xc = outside ? VectorXd(centroid + gamma * (xr - centroid))
                                  : VectorXd(centroid - gamma * (centroid - xs[hi]));
      const double fc = budget_left() ? eval(xc) : kInf;
      if (fc < std::min(fr, fs[hi])) {
        xs[hi] = xc;
        fs[hi] = fc;
        continue;
      }
      for (std::size_t k = 0; k < xs.size() && budget_left(); ++k) {
        if (k == lo) continue;
        xs[k] = xs[lo] + delta * (xs[k] - xs[lo]);
        fs[k] = eval(xs[k]);
      }
    }

    for (std::size_t k = 0; k < xs.size(); ++k) {
      if (fs[k] < best.f) {
        best.f = fs[k];
        best.x = xs[k];
      }
    }
    const bool improved = best.f < start_f - 1e-12 * std::max(1.0, std::abs(start_f));
    if (!first_run && !improved) break;
    first_run = false;
  }
  return best;
}

// ---------------------------------------------------------------------------

namespace {

struct Problem {
  MatrixXd A;
  VectorXd b;
  int p = 0;
  int p_tilde = 0;
  double tol_order = 1e-10;
  std::optional<double> r;

  MatrixXd C;   // order conditions, one row each
  VectorXd d;
  VectorXd w0;  // particular solution
  MatrixXd N;   // orthonormal null space basis

  MatrixXd H;  // inequalities H w >= lo
  VectorXd lo;

  std::vector<std::string> exempt;
};

Problem setup(const OptimizationSpec& spec) {
  const auto& t = spec.tableau;
  Problem pr;
  pr.A = t.A;
  pr.b = t.b;
  pr.p = t.order;
  pr.p_tilde = spec.target_order;
  pr.tol_order = spec.tol_order;
  pr.r = spec.require_ssp_at;
  const auto s = t.A.rows();

  const auto conds = order_conditions_up_to(pr.A, pr.p_tilde);
  pr.C.resize(static_cast<Eigen::Index>(conds.size()), s);
  pr.d.resize(static_cast<Eigen::Index>(conds.size()));
  for (std::size_t k = 0; k < conds.size(); ++k) {
    pr.C.row(static_cast<Eigen::Index>(k)) = conds[k].g.transpose();
    pr.d(static_cast<Eigen::Index>(k)) = conds[k].rhs;
  }
  Eigen::JacobiSVD<MatrixXd> svd(pr.C, Eigen::ComputeFullV | Eigen::ComputeThinU);
  svd.setThreshold(1e-12);
  pr.w0 = svd.solve(pr.d);
  const auto rank = svd.rank();
  pr.N = svd.matrixV().rightCols(s - rank);

  const Eigen::Index n_ssp = pr.r ? s + 1 : 0;
  pr.H.resize(2 * s + n_ssp, s);
  pr.lo.resize(2 * s + n_ssp);
  pr.H.topRows(s) = MatrixXd::Identity(s, s);
  pr.lo.head(s).setZero();
  pr.H.middleRows(s, s) = -MatrixXd::Identity(s, s);
  pr.lo.segment(s, s).setConstant(-1.0);
  if (pr.r) {
    // Last row of K (I + rK)^{-1} is w^T P with P = (I + rA)^{-1}.
    const MatrixXd P = (MatrixXd::Identity(s, s) + *pr.r * pr.A).inverse();
    pr.H.middleRows(2 * s, s) = P.transpose();
    pr.lo.segment(2 * s, s).setZero();
    pr.H.row(2 * s + s) = -(*pr.r) * (P * VectorXd::Ones(s)).transpose();
    pr.lo(2 * s + s) = -1.0;
  }
  pr.exempt = forced_conditions(pr.A, pr.p_tilde + 1);
  return pr;
}

double penalty(const Problem& pr, const VectorXd& w) {
  const VectorXd slack = pr.H * w - pr.lo;
  double v = 0.0;
  for (Eigen::Index i = 0; i < slack.size(); ++i)
    if (slack(i) < 0.0) v += slack(i) * slack(i);
  return v;
}

/// Moves w onto {C w = d, H w >= lo} by projecting onto the constraints that
/// are violated, accumulating an active set.
std::optional<VectorXd> polish(const Problem& pr, VectorXd w) {
  std::vector<Eigen::Index> active;
  for (int iter = 0; iter < 4 * static_cast<int>(pr.H.rows()) + 4; ++iter) {
    const Eigen::Index m = pr.C.rows() + static_cast<Eigen::Index>(active.size());
    MatrixXd E(m, w.size());
    VectorXd rhs(m);
    E.topRows(pr.C.rows()) = pr.C;
    rhs.head(pr.C.rows()) = pr.d;
    for (std::size_t k = 0; k < active.size(); ++k) {
      E.row(pr.C.rows() + static_cast<Eigen::Index>(k)) = pr.H.row(active[k]);
      rhs(pr.C.rows() + static_cast<Eigen::Index>(k)) = pr.lo(active[k]);
    }
    const Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(E);
    w -= cod.solve(E * w - rhs);
    if ((E * w - rhs).lpNorm<Eigen::Infinity>() > 1e-12) return std::nullopt;

    const VectorXd slack = pr.H * w - pr.lo;
    bool added = false;
    for (Eigen::Index i = 0; i < slack.size(); ++i) {
      if (slack(i) < -1e-14 && std::find(active.begin(), active.end(), i) == active.end()) {
        active.push_back(i);
        added = true;
      }
    }
    if (!added) break;
  }
  const VectorXd slack = pr.H * w - pr.lo;
  if (slack.size() > 0 && slack.minCoeff() < -1e-12) return std::nullopt;
  w = w.cwiseMax(0.0).cwiseMin(1.0);
  return w;
}

struct Candidate {
  bool ok = false;
  VectorXd w;
  double f = kInf;
  std::int64_t evals = 0;
};

bool lexicographic_less(const VectorXd& a, const VectorXd& b) {
  for (Eigen::Index i = 0; i < std::min(a.size(), b.size()); ++i) {
    if (a(i) < b(i)) return true;
    if (a(i) > b(i)) return false;
  }
  return a.size() < b.size();
}

bool acceptable(const Problem& pr, const VectorXd& w) {
  if (max_order_residual(pr.A, w, pr.p_tilde) > pr.tol_order) return false;
  if (w.minCoeff() < 0.0 || w.maxCoeff() > 1.0) return false;
  if (pr.r && !ssp_feasible(pr.A, w, *pr.r)) return false;
  return is_non_defective(pr.A, w, pr.p_tilde + 1, pr.exempt).non_defective;
}

Candidate evaluate_candidate(const Problem& pr, const VectorXd& raw, std::int64_t evals) {
  Candidate c;
  c.evals = evals;
  const auto w = polish(pr, raw);
  if (!w || !acceptable(pr, *w)) return c;
  const double f = objective(pr.A, pr.b, *w, pr.p, pr.tol_order);
  if (!std::isfinite(f)) return c;
  c.ok = true;
  c.w = *w;
  c.f = f;
  return c;
}

Candidate run_start(const Problem& pr, std::uint64_t seed, int start, std::int64_t budget) {
  const auto s = pr.A.rows();
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32), static_cast<std::uint32_t>(start)};
  std::mt19937_64 rng(seq);
  std::exponential_distribution<double> expo(1.0);
  VectorXd x(s);
  for (Eigen::Index i = 0; i < s; ++i) x(i) = expo(rng);
  x /= x.sum();

  if (pr.N.cols() == 0) return evaluate_candidate(pr, pr.w0, 1);

  const VectorXd z0 = pr.N.transpose() * (x - pr.w0);
  auto f = [&](const VectorXd& z) {
    const VectorXd w = pr.w0 + pr.N * z;
    const double pen = penalty(pr, w);
    const double obj = objective(pr.A, pr.b, w, pr.p, 1e-8);
    return obj + kPenalty * pen;
  };
  const auto nm = nelder_mead(f, z0, 0.5 / static_cast<double>(s), budget);
  return evaluate_candidate(pr, pr.w0 + pr.N * nm.x, nm.evaluations);
}

}  // namespace

OptimizationReport optimize_embedded(const OptimizationSpec& spec) {
  const auto& t = spec.tableau;
  if (spec.target_order < 1)
    throw Error(ErrorCode::invalid_spec, "target order must be at least 1");
  if (spec.target_order != t.order - 1)
    throw Error(ErrorCode::invalid_spec, "target order must be one below the advancing order");
  if (t.order > 4) throw Error(ErrorCode::invalid_spec, "error measures need p <= 4");
  if (spec.seeds < 1 || spec.budget < 1)
    throw Error(ErrorCode::invalid_spec, "seeds and budget must be positive");
  if (spec.require_ssp_at && *spec.require_ssp_at < 0.0)
    throw Error(ErrorCode::invalid_spec, "required SSP coefficient must be nonnegative");
  if (!(spec.tol_order > 0.0)) throw Error(ErrorCode::invalid_spec, "tol_order must be positive");
  if (t.A.rows() != t.b.size() || t.A.rows() < 1)
    throw Error(ErrorCode::invalid_spec, "tableau dimensions");

  OptimizationReport report;
  report.seed = spec.seed;
  report.ssp_r = spec.require_ssp_at;
  report.starts = spec.seeds;

  const Problem pr = setup(spec);

  if (pr.r) {
    // The stage part of K (I + rK)^{-1} does not depend on w.
    const auto s = pr.A.rows();
    const MatrixXd P = (MatrixXd::Identity(s, s) + *pr.r * pr.A).inverse();
    const MatrixXd AP = pr.A * P;
    if (AP.minCoeff() < -1e-10 || (*pr.r * AP.rowwise().sum()).maxCoeff() > 1.0 + 1e-10) {
      report.message = "the advancing method is not SSP at the required coefficient";
      return report;
    }
  }
  if ((pr.C * pr.w0 - pr.d).lpNorm<Eigen::Infinity>() > spec.tol_order) {
    report.message = "the order conditions have no solution";
    return report;
  }

  const std::int64_t per_start = std::max<std::int64_t>(1, spec.budget / spec.seeds);
  std::vector<Candidate> results(static_cast<std::size_t>(spec.seeds));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int k = next++; k < spec.seeds; k = next++)
      results[static_cast<std::size_t>(k)] = run_start(pr, spec.seed, k, per_start);
  };
  unsigned n_threads = spec.threads > 0 ? static_cast<unsigned>(spec.threads)
                                        : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(spec.seeds));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  const Candidate* best = nullptr;
  for (const auto& c : results) {
    report.evaluations += c.evals;
    if (!c.ok) continue;
    if (!best || c.f < best->f || (c.f == best->f && lexicographic_less(c.w, best->w))) best = &c;
  }
  if (!best) {
    report.message = "no feasible non-defective embedded weights found";
    return report;
  }

  report.found = true;
  report.w = best->w;
  report.objective = best->f;
  for (const auto& cond : order_conditions_up_to(pr.A, pr.p_tilde))
    report.residuals.emplace_back(cond.name, cond.residual(best->w));
  report.ssp_feasible = pr.r ? ssp_feasible(pr.A, best->w, *pr.r) : false;
  report.non_defective = is_non_defective(pr.A, best->w, pr.p_tilde + 1, pr.exempt).non_defective;
  return report;
}

}  // namespace ssperk
