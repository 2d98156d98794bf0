#include "ssperk/problems.hpp"

#include <algorithm>
#include <cmath>

#include "ssperk/error.hpp"

namespace ssperk {

using Eigen::VectorXd;

Grid1D::Grid1D(int n, double lo, double hi, Boundary bc)
    : n_cells(n), x_min(lo), x_max(hi), boundary(bc) {
  if (n < 1 || !(hi > lo)) throw Error(ErrorCode::invalid_argument, "bad grid");
}

void vdp_rhs(double, const VectorXd& u, VectorXd& du, double eps) {
  du.resize(2);
  du(0) = u(1);
  du(1) = (1.0 / eps) * (1.0 - u(0) * u(0)) * u(1) - u(0);
}

void vdp_scaled_rhs(double, const VectorXd& u, VectorXd& du, double eps) {
  du.resize(2);
  du(0) = u(1);
  du(1) = ((1.0 - u(0) * u(0)) * u(1) - u(0)) / eps;
}

void brusselator_rhs(double, const VectorXd& u, VectorXd& du) {
  du.resize(2);
  const double u1sq_u2 = u(0) * u(0) * u(1);
  du(0) = 1.0 + u1sq_u2 - 4.0 * u(0);
  du(1) = 3.0 * u(0) - u1sq_u2;
}

OdeSystem make_vdp(double eps) {
  OdeSystem s;
  s.name = "vdp";
  s.rhs = [eps](double t, const VectorXd& u, VectorXd& du) { vdp_rhs(t, u, du, eps); };
  s.t0 = 0.0;
  s.t_end = 2.0;
  s.u0 = (VectorXd(2) << 2.0, -0.6654321).finished();
  return s;
}

OdeSystem make_vdp_scaled(double eps) {
  OdeSystem s = make_vdp(eps);
  s.name = "vdp-scaled";
  s.rhs = [eps](double t, const VectorXd& u, VectorXd& du) { vdp_scaled_rhs(t, u, du, eps); };
  return s;
}

OdeSystem make_brusselator() {
  OdeSystem s;
  s.name = "brusselator";
  s.rhs = brusselator_rhs;
  s.t0 = 0.0;
  s.t_end = 20.0;
  s.u0 = (VectorXd(2) << 1.01, 3.0).finished();
  return s;
}

// ---------------------------------------------------------------------------

std::array<double, 3> weno5_weights(const std::array<double, 5>& v) {
  constexpr double eps = 1e-6;
  const double b0 = 13.0 / 12.0 * std::pow(v[0] - 2 * v[1] + v[2], 2) +
                    0.25 * std::pow(v[0] - 4 * v[1] + 3 * v[2], 2);
  const double b1 =
      13.0 / 12.0 * std::pow(v[1] - 2 * v[2] + v[3], 2) + 0.25 * std::pow(v[1] - v[3], 2);
  const double b2 = 13.0 / 12.0 * std::pow(v[2] - 2 * v[3] + v[4], 2) +
                    0.25 * std::pow(3 * v[2] - 4 * v[3] + v[4], 2);
  const double a0 = 0.1 / ((eps + b0) * (eps + b0));
  const double a1 = 0.6 / ((eps + b1) * (eps + b1));
  const double a2 = 0.3 / ((eps + b2) * (eps + b2));
  const double sum = a0 + a1 + a2;
  return {a0 / sum, a1 / sum, a2 / sum};
}

double weno5_reconstruct(const std::array<double, 5>& v) {
  const auto w = weno5_weights(v);
  const double p0 = (2 * v[0] - 7 * v[1] + 11 * v[2]) / 6.0;
  const double p1 = (-v[1] + 5 * v[2] + 2 * v[3]) / 6.0;
  const double p2 = (2 * v[2] + 5 * v[3] - v[4]) / 6.0;
  return w[0] * p0 + w[1] * p1 + w[2] * p2;
}

namespace {

int wrap(int i, int n) { return ((i % n) + n) % n; }

}  // namespace

void advection_rhs(const Grid1D& grid, const VectorXd& u, VectorXd& du) {
  const int n = grid.n_cells;
  if (u.size() != n) throw Error(ErrorCode::dimension_mismatch, "advection state size");
  thread_local std::vector<double> flux;
  flux.resize(static_cast<std::size_t>(n));
  // flux[i] = F_{i+1/2}
  for (int i = 0; i < n; ++i) {
    flux[static_cast<std::size_t>(i)] =
        weno5_reconstruct({u(wrap(i - 2, n)), u(wrap(i - 1, n)), u(i), u(wrap(i + 1, n)),
                           u(wrap(i + 2, n))});
  }
  du.resize(n);
  const double inv_dx = 1.0 / grid.dx();
  for (int i = 0; i < n; ++i)
    du(i) = -(flux[static_cast<std::size_t>(i)] -
              flux[static_cast<std::size_t>(wrap(i - 1, n))]) *
            inv_dx;
}

void upwind_rhs(const Grid1D& grid, const VectorXd& u, VectorXd& du) {
  const int n = grid.n_cells;
  if (u.size() != n) throw Error(ErrorCode::dimension_mismatch, "advection state size");
  du.resize(n);
  const double inv_dx = 1.0 / grid.dx();
  for (int i = 0; i < n; ++i) du(i) = -(u(i) - u(wrap(i - 1, n))) * inv_dx;
}

VectorXd advection_initial(const Grid1D& grid, AdvectionData data) {
  VectorXd u(grid.n_cells);
  const double pi = std::acos(-1.0);
  for (int i = 0; i < grid.n_cells; ++i) {
    const double x = grid.x(i);
    u(i) = data == AdvectionData::square ? (std::abs(x) <= 0.5 ? 1.0 : 0.0) : std::sin(pi * x);
  }
  return u;
}

OdeSystem make_advection(int n_cells, AdvectionData data, double t_end, double nu) {
  const Grid1D grid(n_cells, -1.0, 1.0, Boundary::periodic);
  OdeSystem s;
  s.name = "advection";
  s.rhs = [grid](double, const VectorXd& u, VectorXd& du) { advection_rhs(grid, u, du); };
  s.t0 = 0.0;
  s.t_end = t_end;
  s.u0 = advection_initial(grid, data);
  const double dx = grid.dx();
  s.cfl_bound = [dx, nu](const VectorXd&) { return cfl_step(dx, 1.0, nu); };
  s.dx = dx;
  return s;
}

OdeSystem make_upwind(int n_cells, double t_end) {
  const Grid1D grid(n_cells, -1.0, 1.0, Boundary::periodic);
  OdeSystem s;
  s.name = "upwind";
  s.rhs = [grid](double, const VectorXd& u, VectorXd& du) { upwind_rhs(grid, u, du); };
  s.t0 = 0.0;
  s.t_end = t_end;
  s.u0 = advection_initial(grid, AdvectionData::square);
  const double dx = grid.dx();
  s.cfl_bound = [dx](const VectorXd&) { return dx; };
  s.dx = dx;
  return s;
}

// ---------------------------------------------------------------------------

Primitive to_primitive(double rho, double mom, double energy, double gamma) noexcept {
  const double u = mom / rho;
  return {rho, u, (gamma - 1.0) * (energy - 0.5 * rho * u * u)};
}

std::array<double, 3> to_conserved(const Primitive& w, double gamma) noexcept {
  return {w.rho, w.rho * w.u, w.p / (gamma - 1.0) + 0.5 * w.rho * w.u * w.u};
}

double euler_max_speed(const VectorXd& q, double gamma) {
  double c_max = 0.0;
  for (Eigen::Index i = 0; i + 2 < q.size(); i += 3) {
    const auto w = to_primitive(q(i), q(i + 1), q(i + 2), gamma);
    if (!(w.rho > 0.0) || !(w.p > 0.0)) continue;
    c_max = std::max(c_max, std::abs(w.u) + std::sqrt(gamma * w.p / w.rho));
  }
  return c_max;
}

void euler_rhs(const Grid1D& grid, const VectorXd& q, VectorXd& dq, double gamma) {
  const int n = grid.n_cells;
  if (q.size() != 3 * n) throw Error(ErrorCode::dimension_mismatch, "euler state size");
  constexpr int g = 3;
  const int m = n + 2 * g;
  thread_local std::vector<std::array<double, 3>> qe, fe;
  qe.resize(static_cast<std::size_t>(m));
  fe.resize(static_cast<std::size_t>(m));

  double alpha = 0.0;
  for (int i = 0; i < n; ++i) {
    const double rho = q(3 * i);
    const double mom = q(3 * i + 1);
    const double en = q(3 * i + 2);
    const auto w = to_primitive(rho, mom, en, gamma);
    if (!(w.rho > 0.0) || !(w.p > 0.0) || !std::isfinite(w.p))
      throw InvalidState("nonpositive density or pressure in cell " + std::to_string(i));
    alpha = std::max(alpha, std::abs(w.u) + std::sqrt(gamma * w.p / w.rho));
    const auto k = static_cast<std::size_t>(i + g);
    qe[k] = {rho, mom, en};
    fe[k] = {mom, mom * w.u + w.p, (en + w.p) * w.u};
  }
  for (int k = 0; k < g; ++k) {
    const auto periodic = grid.boundary == Boundary::periodic;
    const auto lo = static_cast<std::size_t>(k);
    const auto hi = static_cast<std::size_t>(n + g + k);
    const auto src_lo = static_cast<std::size_t>(periodic ? n + k : g);
    const auto src_hi = static_cast<std::size_t>(periodic ? g + k : n + g - 1);
    qe[lo] = qe[src_lo];
    fe[lo] = fe[src_lo];
    qe[hi] = qe[src_hi];
    fe[hi] = fe[src_hi];
  }

  thread_local std::vector<std::array<double, 3>> fhat;
  fhat.resize(static_cast<std::size_t>(n + 1));
  // fhat[j] is the flux at the left face of interior cell j (ext index j + g).
  for (int j = 0; j <= n; ++j) {
    const int L = j + g - 1;  // ext cell left of the face
    for (std::size_t c = 0; c < 3; ++c) {
      auto fp = [&](int k) {
        const auto e = static_cast<std::size_t>(k);
        return 0.5 * (fe[e][c] + alpha * qe[e][c]);
      };
      auto fm = [&](int k) {
        const auto e = static_cast<std::size_t>(k);
        return 0.5 * (fe[e][c] - alpha * qe[e][c]);
      };
      const double plus = weno5_reconstruct({fp(L - 2), fp(L - 1), fp(L), fp(L + 1), fp(L + 2)});
      const double minus =
          weno5_reconstruct({fm(L + 3), fm(L + 2), fm(L + 1), fm(L), fm(L - 1)});
      fhat[static_cast<std::size_t>(j)][c] = plus + minus;
    }
  }
  dq.resize(3 * n);
  const double inv_dx = 1.0 / grid.dx();
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < 3; ++c)
      dq(3 * i + c) = -(fhat[static_cast<std::size_t>(i + 1)][static_cast<std::size_t>(c)] -
                        fhat[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)]) *
                      inv_dx;
}

VectorXd sod_initial(const Grid1D& grid, double gamma) {
  VectorXd q(3 * grid.n_cells);
  for (int i = 0; i < grid.n_cells; ++i) {
    const Primitive w = grid.x(i) < 0.5 ? Primitive{1.0, 0.0, 1.0} : Primitive{0.125, 0.0, 0.1};
    const auto c = to_conserved(w, gamma);
    q(3 * i) = c[0];
    q(3 * i + 1) = c[1];
    q(3 * i + 2) = c[2];
  }
  return q;
}

OdeSystem make_euler_sod(int n_cells, double t_end, double nu) {
  const Grid1D grid(n_cells, 0.0, 1.0, Boundary::outflow);
  OdeSystem s;
  s.name = "euler";
  s.rhs = [grid](double, const VectorXd& q, VectorXd& dq) { euler_rhs(grid, q, dq); };
  s.t0 = 0.0;
  s.t_end = t_end;
  s.u0 = sod_initial(grid);
  const double dx = grid.dx();
  s.cfl_bound = [dx, nu](const VectorXd& q) { return cfl_step(dx, euler_max_speed(q), nu); };
  s.dx = dx;
  return s;
}

// ---------------------------------------------------------------------------

double total_variation(const VectorXd& u, bool periodic) {
  double tv = 0.0;
  for (Eigen::Index i = 0; i + 1 < u.size(); ++i) tv += std::abs(u(i + 1) - u(i));
  if (periodic && u.size() > 1) tv += std::abs(u(0) - u(u.size() - 1));
  return tv;
}

double cfl_step(double dx, double c_max, double nu, double cap) {
  if (!(nu > 0.0)) throw Error(ErrorCode::invalid_argument, "CFL number must be positive");
  if (!(c_max > 0.0)) return cap;
  return nu * dx / c_max;
}

const std::vector<std::string>& problem_ids() {
  static const std::vector<std::string> ids = {"vdp", "vdp-scaled", "brusselator", "advection",
                                               "euler"};
  return ids;
}

OdeSystem make_problem(std::string_view id) {
  if (id == "vdp") return make_vdp();
  if (id == "vdp-scaled") return make_vdp_scaled();
  if (id == "brusselator") return make_brusselator();
  if (id == "advection") return make_advection();
  if (id == "euler") return make_euler_sod();
  throw Error(ErrorCode::invalid_argument, "unknown problem '" + std::string(id) + "'");
}

}  // namespace ssperk
