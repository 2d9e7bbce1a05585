#include "wildfire/airframe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wildfire {

AircraftState apply_action(const AircraftState& state, BankAction action) {
  AircraftState next = state;
  next.phi_cmd = std::clamp(state.phi_cmd + action_delta(action), -kBankLimit, kBankLimit);
  return next;
}

namespace {

struct Derivs {
  double dx, dy, dpsi, dphi;
};

Derivs dynamics(double psi, double phi, double v, double phi_cmd, const BankTracking& tracking) {
  Derivs d;
  d.dx = v * std::cos(psi);
  d.dy = v * std::sin(psi);
  d.dpsi = kGravity * std::tan(phi) / v;
  d.dphi = tracking.mode == BankTracking::Mode::Lag ? (phi_cmd - phi) / tracking.tau : 0.0;
  return d;
}

}  // namespace

AircraftState integrate(const AircraftState& state, double dt, const BankTracking& tracking) {
  if (!(dt > 0.0)) throw std::invalid_argument("integration step must be positive");

  AircraftState s = state;
  if (tracking.mode == BankTracking::Mode::Snap) s.phi = s.phi_cmd;

  const auto k1 = dynamics(s.psi, s.phi, s.v, s.phi_cmd, tracking);
  const auto k2 = dynamics(s.psi + 0.5 * dt * k1.dpsi, s.phi + 0.5 * dt * k1.dphi, s.v, s.phi_cmd, tracking);
  const auto k3 = dynamics(s.psi + 0.5 * dt * k2.dpsi, s.phi + 0.5 * dt * k2.dphi, s.v, s.phi_cmd, tracking);
  const auto k4 = dynamics(s.psi + dt * k3.dpsi, s.phi + dt * k3.dphi, s.v, s.phi_cmd, tracking);

  AircraftState next = s;
  next.x = s.x + dt / 6.0 * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
  next.y = s.y + dt / 6.0 * (k1.dy + 2.0 * k2.dy + 2.0 * k3.dy + k4.dy);
  next.psi = wrap_angle(s.psi + dt / 6.0 * (k1.dpsi + 2.0 * k2.dpsi + 2.0 * k3.dpsi + k4.dpsi));
  next.phi = s.phi + dt / 6.0 * (k1.dphi + 2.0 * k2.dphi + 2.0 * k3.dphi + k4.dphi);
  if (tracking.mode == BankTracking::Mode::Snap) next.phi = s.phi_cmd;
  next.phi = std::clamp(next.phi, -kBankLimit, kBankLimit);
  return next;
}

double turn_radius(double v, double phi) {
  const double t = std::tan(phi);
  if (t == 0.0) return std::numeric_limits<double>::infinity();
  return v * v / (kGravity * std::abs(t));
}

}  // namespace wildfire
