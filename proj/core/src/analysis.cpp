#include "ssperk/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ssperk/error.hpp"

namespace ssperk {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void check_dims(const MatrixXd& A, const VectorXd& w) {
  if (A.rows() != A.cols() || A.rows() != w.size())
    throw Error(ErrorCode::dimension_mismatch, "tableau and weight sizes disagree");
}

VectorXd row_sums(const MatrixXd& A) { return A.rowwise().sum(); }

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double norm_inf(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

const std::vector<RootedTree>& rooted_trees() {
  static const std::vector<RootedTree> trees = {
      {"e", 1, 1, 1},
      {"c", 2, 2, 1},
      {"c^2", 3, 3, 2},
      {"Ac", 3, 6, 1},
      {"c^3", 4, 4, 6},
      {"c*Ac", 4, 8, 1},
      {"Ac^2", 4, 12, 2},
      {"A^2c", 4, 24, 1},
      {"c^4", 5, 5, 24},
      {"c^2*Ac", 5, 10, 2},
      {"c*Ac^2", 5, 15, 2},
      {"c*A^2c", 5, 30, 1},
      {"(Ac)^2", 5, 20, 2},
      {"Ac^3", 5, 20, 6},
      {"A(c*Ac)", 5, 40, 1},
      {"A^2c^2", 5, 60, 2},
      {"A^3c", 5, 120, 1},
  };
  return trees;
}

std::vector<VectorXd> elementary_weights(const MatrixXd& A, int max_order) {
  if (max_order < 1 || max_order > 5)
    throw Error(ErrorCode::order_too_high, "trees are tabulated for orders 1..5");
  if (A.rows() != A.cols()) throw Error(ErrorCode::dimension_mismatch, "A must be square");
  const auto n = A.rows();
  const VectorXd e = VectorXd::Ones(n);
  const VectorXd c = row_sums(A);
  const VectorXd c2 = c.cwiseProduct(c);
  const VectorXd c3 = c2.cwiseProduct(c);
  const VectorXd Ac = A * c;
  const VectorXd A2c = A * Ac;
  const VectorXd Ac2 = A * c2;

  std::vector<VectorXd> phi;
  phi.push_back(e);
  if (max_order >= 2) phi.push_back(c);
  if (max_order >= 3) {
    phi.push_back(c2);
    phi.push_back(Ac);
  }
  if (max_order >= 4) {
    phi.push_back(c3);
    phi.push_back(c.cwiseProduct(Ac));
    phi.push_back(Ac2);
    phi.push_back(A2c);
  }
  if (max_order >= 5) {
    phi.push_back(c3.cwiseProduct(c));
    phi.push_back(c2.cwiseProduct(Ac));
    phi.push_back(c.cwiseProduct(Ac2));
    phi.push_back(c.cwiseProduct(A2c));
    phi.push_back(Ac.cwiseProduct(Ac));
    phi.push_back(A * c3);
    phi.push_back(A * c.cwiseProduct(Ac));
    phi.push_back(A * Ac2);
    phi.push_back(A * A2c);
  }
  return phi;
}

std::vector<TreeResidual> order_condition_residuals(const MatrixXd& A, const VectorXd& w,
                                                    int max_order, TreeWeighting weighting) {
  check_dims(A, w);
  const auto phi = elementary_weights(A, max_order);
  const auto& trees = rooted_trees();
  std::vector<TreeResidual> out;
  out.reserve(phi.size());
  for (std::size_t k = 0; k < phi.size(); ++k) {
    double r = w.dot(phi[k]) - 1.0 / trees[k].density;
    if (weighting == TreeWeighting::symmetry) r /= trees[k].symmetry;
    out.push_back({&trees[k], r});
  }
  return out;
}

int classify_order(const MatrixXd& A, const VectorXd& w, double tol) {
  const auto res = order_condition_residuals(A, w, 5);
  int p = 0;
  for (int q = 1; q <= 5; ++q) {
    for (const auto& r : res)
      if (r.tree->order == q && std::abs(r.value) >= tol) return p;
    p = q;
  }
  return p;
}

std::vector<LinearCondition> order_conditions(const MatrixXd& A, int order) {
  if (A.rows() != A.cols()) throw Error(ErrorCode::dimension_mismatch, "A must be square");
  const auto n = A.rows();
  const VectorXd e = VectorXd::Ones(n);
  const VectorXd c = row_sums(A);
  const VectorXd c2 = c.cwiseProduct(c);
  const VectorXd c3 = c2.cwiseProduct(c);
  const VectorXd Ac = A * c;
  const VectorXd d = 0.5 * c2 - Ac;
  switch (order) {
    case 1: return {{"b.e", 1, e, 1.0}};
    case 2: return {{"b.c", 2, c, 0.5}};
    case 3: return {{"b.c^2", 3, c2, 1.0 / 3.0}, {"b.(c^2/2-Ac)", 3, d, 0.0}};
    case 4:
      return {{"b.c^3", 4, c3, 0.25},
              {"b.A(c^2/2-Ac)", 4, A * d, 0.0},
              {"b.(c^3/6-Ac^2/2)", 4, c3 / 6.0 - 0.5 * (A * c2), 0.0},
              {"b.c(c^2/2-Ac)", 4, c.cwiseProduct(d), 0.0}};
    case 5: {
      const auto phi = elementary_weights(A, 5);
      const auto& trees = rooted_trees();
      std::vector<LinearCondition> out;
      for (std::size_t k = 0; k < trees.size(); ++k)
        if (trees[k].order == 5)
          out.push_back({"b." + std::string(trees[k].name), 5, phi[k], 1.0 / trees[k].density});
      return out;
    }
    default: throw Error(ErrorCode::order_too_high, "order conditions exist for orders 1..5");
  }
}

std::vector<LinearCondition> order_conditions_up_to(const MatrixXd& A, int max_order) {
  std::vector<LinearCondition> out;
  for (int q = 1; q <= max_order; ++q) {
    auto cs = order_conditions(A, q);
    out.insert(out.end(), std::make_move_iterator(cs.begin()), std::make_move_iterator(cs.end()));
  }
  return out;
}

std::vector<std::string> forced_conditions(const MatrixXd& A, int order, double tol) {
  std::vector<std::string> out;
  if (order <= 1) return out;
  const auto lower = order_conditions_up_to(A, order - 1);
  const auto n = A.rows();
  const auto m = static_cast<Eigen::Index>(lower.size());
  MatrixXd G(n, m);
  VectorXd rhs(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    G.col(j) = lower[static_cast<std::size_t>(j)].g;
    rhs(j) = lower[static_cast<std::size_t>(j)].rhs;
  }
  const Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(G);
  for (const auto& cond : order_conditions(A, order)) {
    const VectorXd lambda = cod.solve(cond.g);
    const double scale = std::max(1.0, cond.g.norm());
    if ((G * lambda - cond.g).norm() > tol * scale) continue;
    if (std::abs(lambda.dot(rhs) - cond.rhs) > tol * std::max(1.0, lambda.norm())) continue;
    out.push_back(cond.name);
  }
  return out;
}

NonDefectReport is_non_defective(const MatrixXd& A, const VectorXd& b_hat, int order,
                                 const std::vector<std::string>& exempt, double tol) {
  check_dims(A, b_hat);
  NonDefectReport report;
  report.non_defective = true;
  for (const auto& cond : order_conditions(A, order)) {
    const bool ex = std::find(exempt.begin(), exempt.end(), cond.name) != exempt.end();
    const double r = cond.residual(b_hat);
    report.conditions.push_back({cond.name, r, ex});
    if (!ex && !(std::abs(r) > tol)) report.non_defective = false;
  }
  return report;
}

NonDefectReport is_non_defective(const EmbeddedTableau& t, const std::vector<std::string>& exempt,
                                 double tol) {
  return is_non_defective(t.A, t.embedded(), t.order, exempt, tol);
}

// ---------------------------------------------------------------------------

namespace {

struct SspProbe {
  bool invertible = false;
  MatrixXd X;  // K (I + rK)^{-1}
};

SspProbe ssp_probe(const MatrixXd& A, const VectorXd& w, double r) {
  const auto s = A.rows();
  MatrixXd K = MatrixXd::Zero(s + 1, s + 1);
  K.topLeftCorner(s, s) = A;
  K.block(s, 0, 1, s) = w.transpose();
  const MatrixXd M = MatrixXd::Identity(s + 1, s + 1) + r * K;
  const Eigen::PartialPivLU<MatrixXd> lu(M);
  SspProbe p;
  const double det = lu.determinant();
  if (!std::isfinite(det) || std::abs(det) < 1e-300) return p;
  p.X = K * lu.inverse();
  p.invertible = p.X.allFinite();
  return p;
}

}  // namespace

bool ssp_conditions_hold(const MatrixXd& A, const VectorXd& w, double r,
                         const SspTolerances& tol) {
  check_dims(A, w);
  const auto p = ssp_probe(A, w, r);
  if (!p.invertible) return false;
  if (p.X.minCoeff() < -tol.nonnegativity) return false;
  const VectorXd row = r * p.X.rowwise().sum();
  return row.maxCoeff() <= 1.0 + tol.bound;
}

double ssp_violation(const MatrixXd& A, const VectorXd& w, double r) {
  check_dims(A, w);
  const auto p = ssp_probe(A, w, r);
  if (!p.invertible) return std::numeric_limits<double>::infinity();
  double v = 0.0;
  for (Eigen::Index i = 0; i < p.X.rows(); ++i) {
    double rs = 0.0;
    for (Eigen::Index j = 0; j < p.X.cols(); ++j) {
      const double x = p.X(i, j);
      if (x < 0.0) v += x * x;
      rs += x;
    }
    const double over = r * rs - 1.0;
    if (over > 0.0) v += over * over;
  }
  return v;
}

double ssp_coefficient(const MatrixXd& A, const VectorXd& w, double tol) {
  check_dims(A, w);
  if (A.size() > 0 && A.minCoeff() < 0.0) return 0.0;
  if (w.size() > 0 && w.minCoeff() < 0.0) return 0.0;
  double lo = 0.0;
  double hi = 2.0 * static_cast<double>(A.rows());
  if (ssp_conditions_hold(A, w, hi)) return hi;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (ssp_conditions_hold(A, w, mid))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

double ssp_coefficient(const EmbeddedTableau& t, Weights which, double tol) {
  return ssp_coefficient(t.A, which == Weights::advancing ? t.b : t.embedded(), tol);
}

// ---------------------------------------------------------------------------

StabilityPolynomial::StabilityPolynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  while (coeffs_.size() > 1 && coeffs_.back() == 0.0) coeffs_.pop_back();
  if (coeffs_.empty()) coeffs_.push_back(0.0);
}

StabilityPolynomial::StabilityPolynomial(std::vector<double> coeffs, MatrixXd A, VectorXd w)
    : StabilityPolynomial(std::move(coeffs)) {
  check_dims(A, w);
  A_ = std::move(A);
  w_ = std::move(w);
}

std::complex<double> StabilityPolynomial::operator()(std::complex<double> z) const {
  if (has_realization()) {
    const auto s = A_.rows();
    thread_local std::vector<std::complex<double>> y;
    y.resize(static_cast<std::size_t>(s));
    std::complex<double> acc = 0.0;
    for (Eigen::Index i = 0; i < s; ++i) {
      std::complex<double> sum = 0.0;
      for (Eigen::Index j = 0; j < i; ++j)
        if (A_(i, j) != 0.0) sum += A_(i, j) * y[static_cast<std::size_t>(j)];
      y[static_cast<std::size_t>(i)] = 1.0 + z * sum;
      acc += w_(i) * y[static_cast<std::size_t>(i)];
    }
    return 1.0 + z * acc;
  }
  std::complex<double> acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

double StabilityPolynomial::operator()(double x) const {
  if (has_realization()) return (*this)(std::complex<double>(x, 0.0)).real();
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

std::vector<double> StabilityPolynomial::shifted(double x0) const {
  std::vector<double> a = coeffs_;
  const auto n = a.size();
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = n - 1; j > k; --j) a[j - 1] += x0 * a[j];
  return a;
}

StabilityPolynomial::Taylor StabilityPolynomial::taylor(double x0) const {
  Taylor t;
  const bool nonneg = has_realization() && A_.minCoeff() >= 0.0 && w_.minCoeff() >= 0.0;
  if (!nonneg) {
    t.coeffs = shifted(x0);
    std::vector<double> mag(coeffs_.size());
    for (std::size_t k = 0; k < mag.size(); ++k) mag[k] = std::abs(coeffs_[k]);
    t.scale = StabilityPolynomial(mag).shifted(std::abs(x0));
    t.scale.resize(t.coeffs.size(), 0.0);
    return t;
  }
  // psi(x0 + h) = 1 + (x0 + h) sum_j h^j w^T (P A)^j P e with P = (I - x0 A)^{-1}.
  const auto s = A_.rows();
  const MatrixXd M = MatrixXd::Identity(s, s) - x0 * A_;
  const auto L = M.triangularView<Eigen::Lower>();
  std::vector<double> g;
  VectorXd v = L.solve(VectorXd::Ones(s));
  g.push_back(w_.dot(v));
  for (Eigen::Index j = 0; j < s; ++j) {
    v = L.solve(A_ * v);
    g.push_back(w_.dot(v));
  }
  t.coeffs.push_back(1.0 + x0 * g[0]);
  t.scale.push_back(1.0 + std::abs(x0 * g[0]));
  for (std::size_t k = 1; k < g.size(); ++k) {
    t.coeffs.push_back(x0 * g[k] + g[k - 1]);
    t.scale.push_back(std::abs(x0 * g[k]) + std::abs(g[k - 1]));
  }
  return t;
}

StabilityPolynomial stability_polynomial(const MatrixXd& A, const VectorXd& w) {
  check_dims(A, w);
  std::vector<double> a{1.0};
  VectorXd v = VectorXd::Ones(A.rows());
  for (Eigen::Index k = 0; k < A.rows(); ++k) {
    a.push_back(w.dot(v));
    v = A * v;
  }
  const MatrixXd upper = A.triangularView<Eigen::Upper>();
  if (upper.size() > 0 && upper.cwiseAbs().maxCoeff() != 0.0) return StabilityPolynomial(std::move(a));
  return StabilityPolynomial(std::move(a), A, w);
}

double default_radius_cap(const StabilityPolynomial& psi) {
  return 10.0 * std::max(psi.degree(), 1);
}

namespace {

constexpr double kModulusTol = 1e-12;

std::vector<double> poly_mul(const std::vector<double>& p, const std::vector<double>& q) {
  std::vector<double> r(p.size() + q.size() - 1, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j) r[i + j] += p[i] * q[j];
  return r;
}

// Largest t in [0, cap] with |psi(ray(t))| <= 1 + tol on [0, t]. `sq` holds the
// coefficients of |psi(ray(t))|^2 as a polynomial in t.
template <class Modulus>
double ray_inclusion(const std::vector<double>& sq, Modulus modulus, double cap) {
  for (std::size_t k = 1; k < sq.size(); ++k) {
    if (std::abs(sq[k]) <= 1e-13) continue;
    if (sq[k] > 0.0) return 0.0;
    break;
  }
  const int samples = std::max(2048, static_cast<int>(std::ceil(400.0 * cap)));
  const double step = cap / samples;
  double good = 0.0;
  for (int i = 1; i <= samples; ++i) {
    const double t = step * i;
    if (modulus(t) > 1.0 + kModulusTol) {
      double lo = good;
      double hi = t;
      while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        if (modulus(mid) > 1.0 + kModulusTol)
          hi = mid;
        else
          lo = mid;
      }
      return lo;
    }
    good = t;
  }
  return cap;
}

}  // namespace

double real_axis_inclusion(const StabilityPolynomial& psi, double cap) {
  if (cap <= 0.0) cap = default_radius_cap(psi);
  std::vector<double> q = psi.coeffs();
  for (std::size_t k = 1; k < q.size(); k += 2) q[k] = -q[k];
  auto sq = poly_mul(q, q);
  return ray_inclusion(sq, [&](double t) { return std::abs(psi(-t)); }, cap);
}

double imag_axis_inclusion(const StabilityPolynomial& psi, double cap) {
  if (cap <= 0.0) cap = default_radius_cap(psi);
  const auto& a = psi.coeffs();
  std::vector<double> re(a.size(), 0.0);
  std::vector<double> im(a.size(), 0.0);
  for (std::size_t k = 0; k < a.size(); ++k) {
    switch (k % 4) {
      case 0: re[k] = a[k]; break;
      case 1: im[k] = a[k]; break;
      case 2: re[k] = -a[k]; break;
      default: im[k] = -a[k]; break;
    }
  }
  auto sq = poly_mul(re, re);
  const auto sq_im = poly_mul(im, im);
  for (std::size_t k = 0; k < sq.size(); ++k) sq[k] += sq_im[k];
  return ray_inclusion(
      sq, [&](double t) { return std::abs(psi(std::complex<double>(0.0, t))); }, cap);
}

double circle_contractivity_radius(const StabilityPolynomial& psi, double cap) {
  if (cap <= 0.0) cap = default_radius_cap(psi);
  constexpr int kPoints = 4096;
  const double two_pi = 2.0 * std::acos(-1.0);
  std::vector<std::complex<double>> unit(kPoints);
  for (int k = 0; k < kPoints; ++k) unit[k] = std::polar(1.0, two_pi * k / kPoints);
  auto inside = [&](double r) {
    for (const auto& u : unit)
      if (std::abs(psi(r * (u - 1.0))) > 1.0 + kModulusTol) return false;
    return true;
  };
  if (inside(cap)) return cap;
  double lo = 0.0;
  double hi = cap;
  while (hi - lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    if (inside(mid))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

double absolute_monotonicity_radius(const StabilityPolynomial& psi, double cap) {
  if (cap <= 0.0) cap = default_radius_cap(psi);
  auto ok = [&](double r) {
    const auto t = psi.taylor(-r);
    for (std::size_t k = 0; k < t.coeffs.size(); ++k)
      if (t.coeffs[k] < -1e-12 * t.scale[k]) return false;
    return true;
  };
  if (!ok(0.0)) return 0.0;
  if (ok(cap)) return cap;
  double lo = 0.0;
  double hi = cap;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (ok(mid))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

StabilityRadii stability_radii(const StabilityPolynomial& psi, double cap) {
  if (cap <= 0.0) cap = default_radius_cap(psi);
  return {real_axis_inclusion(psi, cap), imag_axis_inclusion(psi, cap),
          circle_contractivity_radius(psi, cap), absolute_monotonicity_radius(psi, cap)};
}

RegionGrid stability_region_grid(const StabilityPolynomial& psi, double re_min, double re_max,
                                 double im_min, double im_max, int nx, int ny) {
  if (nx < 2 || ny < 2) throw Error(ErrorCode::invalid_argument, "grid needs nx, ny >= 2");
  RegionGrid g;
  g.nx = nx;
  g.ny = ny;
  const auto total = static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
  g.re.reserve(total);
  g.im.reserve(total);
  g.abs_psi.reserve(total);
  for (int j = 0; j < ny; ++j) {
    const double y = im_min + (im_max - im_min) * j / (ny - 1);
    for (int i = 0; i < nx; ++i) {
      const double x = re_min + (re_max - re_min) * i / (nx - 1);
      g.re.push_back(x);
      g.im.push_back(y);
      g.abs_psi.push_back(std::abs(psi(std::complex<double>(x, y))));
    }
  }
  return g;
}

// ---------------------------------------------------------------------------

ErrorMeasures error_measures(const MatrixXd& A, const VectorXd& b, const VectorXd& b_hat,
                             int order, const ErrorMeasureOptions& options) {
  check_dims(A, b);
  check_dims(A, b_hat);
  if (order > 4 || order < 1)
    throw Error(ErrorCode::order_too_high, "error measures need 1 <= p <= 4");

  auto residuals_of_order = [&](const VectorXd& w, int q) {
    std::vector<double> out;
    for (const auto& r : order_condition_residuals(A, w, q, options.weighting))
      if (r.tree->order == q) out.push_back(r.value);
    return out;
  };
  const auto tau = residuals_of_order(b, order + 1);
  const auto tau_hat_p = residuals_of_order(b_hat, order);
  const auto tau_hat = residuals_of_order(b_hat, order + 1);
  std::vector<double> diff(tau.size());
  for (std::size_t k = 0; k < tau.size(); ++k) diff[k] = tau_hat[k] - tau[k];

  auto ratio = [](double num, double den) {
    if (den <= 1e-14) return std::numeric_limits<double>::infinity();
    return num / den;
  };

  ErrorMeasures m;
  m.weighting = options.weighting;
  m.b_measure = options.b_measure;
  m.A2_main = norm2(tau);
  m.Ainf_main = norm_inf(tau);
  m.A2_emb = norm2(tau_hat_p);
  m.Ainf_emb = norm_inf(tau_hat_p);
  if (options.b_measure == BMeasure::literal) {
    const auto tau_p = residuals_of_order(b, order);
    m.B2 = ratio(m.A2_main, norm2(tau_p));
    m.Binf = ratio(m.Ainf_main, norm_inf(tau_p));
  } else {
    m.B2 = ratio(m.A2_main, m.A2_emb);
    m.Binf = ratio(m.Ainf_main, m.Ainf_emb);
  }
  m.C2 = ratio(norm2(diff), m.A2_emb);
  m.Cinf = ratio(norm_inf(diff), m.Ainf_emb);
  m.D = std::max({A.cwiseAbs().maxCoeff(), row_sums(A).cwiseAbs().maxCoeff(),
                  b.cwiseAbs().maxCoeff(), b_hat.cwiseAbs().maxCoeff()});
  return m;
}

ErrorMeasures error_measures(const EmbeddedTableau& t, const ErrorMeasureOptions& options) {
  return error_measures(t.A, t.b, t.embedded(), t.order, options);
}

AnalysisReport analyze(const EmbeddedTableau& t) {
  AnalysisReport r;
  r.id = t.id;
  r.p = classify_order(t.A, t.b);
  r.ssp_main = ssp_coefficient(t.A, t.b);
  const auto psi = stability_polynomial(t.A, t.b);
  r.radii = stability_radii(psi, 10.0 * std::max(t.stages, 1));
  if (t.has_embedded()) {
    r.p_tilde = classify_order(t.A, *t.b_hat);
    r.ssp_embedded = ssp_coefficient(t.A, *t.b_hat);
    if (r.p >= 1 && r.p <= 4) r.errors = error_measures(t.A, t.b, *t.b_hat, r.p);
    if (r.p >= 1 && r.p <= 5) {
      r.exempt = forced_conditions(t.A, r.p);
      r.non_defective = is_non_defective(t.A, *t.b_hat, r.p, r.exempt).non_defective;
    }
  }
  return r;
}

}  // namespace ssperk
