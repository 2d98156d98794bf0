#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ssperk/integrator.hpp"

namespace ssperk {

enum class Boundary { periodic, outflow };

struct Grid1D {
  int n_cells = 0;
  double x_min = 0.0;
  double x_max = 1.0;
  Boundary boundary = Boundary::periodic;

  Grid1D() = default;
  Grid1D(int n, double lo, double hi, Boundary bc);

  [[nodiscard]] double dx() const noexcept { return (x_max - x_min) / n_cells; }
  [[nodiscard]] double x(int i) const noexcept { return x_min + (i + 0.5) * dx(); }
};

// ---------------------------------------------------------------------------
// ODEs
// ---------------------------------------------------------------------------

/// Van der Pol: u1' = u2, u2' = (1 - u1^2) u2 / eps - u1.
void vdp_rhs(double t, const Eigen::VectorXd& u, Eigen::VectorXd& du, double eps = 0.1);
/// Van der Pol in relaxation scaling: u2' = ((1 - u1^2) u2 - u1) / eps.
void vdp_scaled_rhs(double t, const Eigen::VectorXd& u, Eigen::VectorXd& du, double eps = 0.1);
/// Brusselator with A = 1, B = 3.
void brusselator_rhs(double t, const Eigen::VectorXd& u, Eigen::VectorXd& du);

/// t in [0, 2], u0 = (2, -0.6654321).
[[nodiscard]] OdeSystem make_vdp(double eps = 0.1);
[[nodiscard]] OdeSystem make_vdp_scaled(double eps = 0.1);
/// t in [0, 20], u0 = (1.01, 3).
[[nodiscard]] OdeSystem make_brusselator();

// ---------------------------------------------------------------------------
// WENO5 and scalar advection
// ---------------------------------------------------------------------------

/// Nonlinear weights of the three candidate stencils for cells i-2..i+2.
[[nodiscard]] std::array<double, 3> weno5_weights(const std::array<double, 5>& v);

/// Left-biased fifth-order WENO value at the interface i+1/2 from v_{i-2..i+2}.
[[nodiscard]] double weno5_reconstruct(const std::array<double, 5>& v);

/// -(F_{i+1/2} - F_{i-1/2}) / dx for u_t + u_x = 0 on a periodic grid.
void advection_rhs(const Grid1D& grid, const Eigen::VectorXd& u, Eigen::VectorXd& du);

/// First-order upwind: -(u_i - u_{i-1}) / dx, periodic.
void upwind_rhs(const Grid1D& grid, const Eigen::VectorXd& u, Eigen::VectorXd& du);

enum class AdvectionData {
  square,  ///< 1 on |x| <= 0.5, 0 elsewhere
  sine,    ///< sin(pi x)
};

[[nodiscard]] Eigen::VectorXd advection_initial(const Grid1D& grid, AdvectionData data);

/// WENO5 advection on [-1, 1] with t in [0, t_end]; CFL bound nu * dx.
[[nodiscard]] OdeSystem make_advection(int n_cells = 200, AdvectionData data = AdvectionData::square,
                                       double t_end = 0.2, double nu = 0.5);
/// First-order upwind advection of the square wave on [-1, 1].
[[nodiscard]] OdeSystem make_upwind(int n_cells = 200, double t_end = 0.2);

// ---------------------------------------------------------------------------
// Euler equations
// ---------------------------------------------------------------------------

inline constexpr double kGammaAir = 1.4;

/// Interleaved conserved variables (rho, rho u, E) per cell.
struct Primitive {
  double rho;
  double u;
  double p;
};

[[nodiscard]] Primitive to_primitive(double rho, double mom, double energy,
                                     double gamma = kGammaAir) noexcept;
[[nodiscard]] std::array<double, 3> to_conserved(const Primitive& w,
                                                 double gamma = kGammaAir) noexcept;

/// Global Lax-Friedrichs split fluxes reconstructed componentwise with WENO5,
/// outflow boundaries via three copied ghost cells. Throws InvalidState on
/// nonpositive density or pressure.
void euler_rhs(const Grid1D& grid, const Eigen::VectorXd& q, Eigen::VectorXd& dq,
               double gamma = kGammaAir);

/// Largest |u| + c_s over the grid.
[[nodiscard]] double euler_max_speed(const Eigen::VectorXd& q, double gamma = kGammaAir);

[[nodiscard]] Eigen::VectorXd sod_initial(const Grid1D& grid, double gamma = kGammaAir);

/// Sod shock tube on [0, 1] to t = 0.2.
[[nodiscard]] OdeSystem make_euler_sod(int n_cells = 200, double t_end = 0.2, double nu = 0.5);

// ---------------------------------------------------------------------------

/// sum |u_{i+1} - u_i|, wrapping around when periodic.
[[nodiscard]] double total_variation(const Eigen::VectorXd& u, bool periodic = true);

/// nu * dx / c_max; returns `cap` when c_max == 0.
[[nodiscard]] double cfl_step(double dx, double c_max, double nu, double cap = 1e300);

/// Problem ids: vdp, vdp-scaled, brusselator, advection, euler.
[[nodiscard]] OdeSystem make_problem(std::string_view id);
[[nodiscard]] const std::vector<std::string>& problem_ids();

}  // namespace ssperk
