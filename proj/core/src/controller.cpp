#include "ssperk/controller.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "ssperk/error.hpp"

namespace ssperk {

std::string_view to_string(ControllerKind kind) noexcept {
  switch (kind) {
    case ControllerKind::I: return "i";
    case ControllerKind::PI: return "pi";
    case ControllerKind::PID: return "pid";
    case ControllerKind::Gustafsson: return "gustafsson";
  }
  return "?";
}

ControllerKind parse_controller(std::string_view text) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (s == "i") return ControllerKind::I;
  if (s == "pi") return ControllerKind::PI;
  if (s == "pid") return ControllerKind::PID;
  if (s == "gustafsson" || s == "g") return ControllerKind::Gustafsson;
  throw Error(ErrorCode::parse_error, "unknown controller '" + std::string(text) + "'");
}

ControllerGains default_gains(ControllerKind kind) noexcept {
  switch (kind) {
    case ControllerKind::I: return {1.0, 0.0, 0.0};
    case ControllerKind::PI: return {0.8, 0.31, 0.0};
    case ControllerKind::PID: return {0.58, 0.21, 0.1};
    case ControllerKind::Gustafsson: return {0.367, 0.268, 0.0};
  }
  return {};
}

Controller::Controller(ControllerKind kind) : Controller(kind, default_gains(kind)) {}

Controller::Controller(ControllerKind kind, ControllerGains gains) : kind_(kind), gains_(gains) {
  if (!(gains.k1 > 0.0) || gains.k2 < 0.0 || gains.k3 < 0.0)
    throw Error(ErrorCode::invalid_argument, "controller gains must be positive");
}

double Controller::propose_factor(double err_new, int p) const {
  if (p < 1) throw Error(ErrorCode::invalid_argument, "controller order must be >= 1");
  const double e = std::max(err_new, kErrFloor);
  const double q = static_cast<double>(p);
  switch (kind_) {
    case ControllerKind::I: return std::pow(e, -gains_.k1 / q);
    case ControllerKind::PI:
      return std::pow(e, -gains_.k1 / q) * std::pow(err_n_, gains_.k2 / q);
    case ControllerKind::PID:
      return std::pow(e, -gains_.k1 / q) * std::pow(err_n_, gains_.k2 / q) *
             std::pow(err_nm1_, -gains_.k3 / q);
    case ControllerKind::Gustafsson:
      if (first_step_) return std::pow(e, -1.0 / q);
      return std::pow(e, -gains_.k1 / q) * std::pow(e / err_n_, gains_.k2 / q);
  }
  return 1.0;
}

double Controller::clamp(double dt, double beta) const noexcept {
  const double fmax = just_rejected_ ? 0.9 : facmax;
  const double f = just_rejected_ ? 0.9 : fac;
  return dt * std::min(fmax, std::max(facmin, f * beta));
}

void Controller::on_accept(double err_new) noexcept {
  err_nm1_ = err_n_;
  err_n_ = std::max(err_new, kErrFloor);
  just_rejected_ = false;
  first_step_ = false;
}

void Controller::on_reject() noexcept { just_rejected_ = true; }

void Controller::reset() noexcept {
  err_n_ = 1.0;
  err_nm1_ = 1.0;
  first_step_ = true;
  just_rejected_ = false;
}

}  // namespace ssperk
