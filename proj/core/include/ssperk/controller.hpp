#pragma once

#include <string>
#include <string_view>

namespace ssperk {

enum class ControllerKind { I, PI, PID, Gustafsson };

[[nodiscard]] std::string_view to_string(ControllerKind kind) noexcept;
/// Accepts i, pi, pid, gustafsson (case-insensitive). Throws Error(parse_error).
[[nodiscard]] ControllerKind parse_controller(std::string_view text);

struct ControllerGains {
  double k1 = 1.0;
  double k2 = 0.0;
  double k3 = 0.0;
};

/// Standard gains: I (1), PI (0.8, 0.31), PID (0.58, 0.21, 0.1),
/// Gustafsson (0.367, 0.268).
[[nodiscard]] ControllerGains default_gains(ControllerKind kind) noexcept;

/// Asymptotic step-size controller.
class Controller {
 public:
  static constexpr double kErrFloor = 1e-10;

  explicit Controller(ControllerKind kind);
  Controller(ControllerKind kind, ControllerGains gains);

  [[nodiscard]] ControllerKind kind() const noexcept { return kind_; }
  [[nodiscard]] const ControllerGains& gains() const noexcept { return gains_; }

  /// beta for a new error estimate; p is the order in the exponents.
  [[nodiscard]] double propose_factor(double err_new, int p) const;

  /// dt * min(facmax, max(facmin, fac * beta)), with facmax = fac = 0.9 right
  /// after a rejection.
  [[nodiscard]] double clamp(double dt, double beta) const noexcept;

  void on_accept(double err_new) noexcept;
  void on_reject() noexcept;
  void reset() noexcept;

  [[nodiscard]] double err_n() const noexcept { return err_n_; }
  [[nodiscard]] double err_nm1() const noexcept { return err_nm1_; }
  [[nodiscard]] bool first_step() const noexcept { return first_step_; }
  [[nodiscard]] bool just_rejected() const noexcept { return just_rejected_; }

  double fac = 0.9;
  double facmin = 0.1;
  double facmax = 5.0;

 private:
  ControllerKind kind_;
  ControllerGains gains_;
  double err_n_ = 1.0;
  double err_nm1_ = 1.0;
  bool first_step_ = true;
  bool just_rejected_ = false;
};

}  // namespace ssperk
