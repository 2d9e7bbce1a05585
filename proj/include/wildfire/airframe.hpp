#pragma once

#include "wildfire/geometry.hpp"

namespace wildfire {

// Fixed-wing kinematics at constant speed and altitude:
//   dx/dt = v cos(psi), dy/dt = v sin(psi), dpsi/dt = g tan(phi) / v
// with x north, y east and psi wrapped to (-pi, pi].
struct AircraftState {
  double x = 0.0;        // north, m
  double y = 0.0;        // east, m
  double psi = 0.0;      // heading, rad (0 = north, positive toward east)
  double phi = 0.0;      // bank, rad
  double phi_cmd = 0.0;  // commanded bank, rad
  double v = 20.0;       // m/s
  double h = 200.0;      // altitude, m
};

// The two control actions: step the commanded bank by -5 or +5 degrees.
// Negative bank turns left. Index 0 = BankLeft, 1 = BankRight everywhere.
enum class BankAction : int { BankLeft = 0, BankRight = 1 };

inline constexpr double kBankStep = deg2rad(5.0);
inline constexpr double kBankLimit = deg2rad(50.0);

inline double action_delta(BankAction a) { return a == BankAction::BankLeft ? -kBankStep : kBankStep; }

// Steps phi_cmd by +-5 degrees, clamped to +-50 degrees. Position unchanged.
AircraftState apply_action(const AircraftState& state, BankAction action);

// How phi tracks phi_cmd across one integration step. Snap sets phi to the
// command instantly (commands are already rate-limited to 50 deg/s); Lag
// applies a first-order response with time constant tau.
struct BankTracking {
  enum class Mode { Snap, Lag };
  Mode mode = Mode::Snap;
  double tau = 0.3;  // s, Lag only
};

// Advances position and heading by dt (fixed-step fourth-order integration).
// Speed and altitude are constant; psi is wrapped on output.
AircraftState integrate(const AircraftState& state, double dt,
                        const BankTracking& tracking = {});

// Steady turn radius v^2 / (g tan(phi)); infinite at phi = 0.
double turn_radius(double v, double phi);

}  // namespace wildfire
