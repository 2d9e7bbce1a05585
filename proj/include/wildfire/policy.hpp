#pragma once

#include <vector>

#include "wildfire/airframe.hpp"
#include "wildfire/belief_map.hpp"
#include "wildfire/fire_model.hpp"
#include "wildfire/network.hpp"
#include "wildfire/rng.hpp"

namespace wildfire {

// Aircraft-centric state fed to the Q-network. theta_r is the bearing to
// the other aircraft in the body frame, positive to the left (port side);
// psi_r is the other aircraft's heading minus our own. belief_r is the
// thresholded belief map resampled into a body-frame window centred on the
// aircraft with its heading pointing image-up; cells outside the map read 0.
struct RelativeState {
  double rho = 0.0;
  double theta_r = 0.0;
  double psi_r = 0.0;
  double phi0 = 0.0;
  double phi1 = 0.0;
  int image_size = 0;
  std::vector<float> belief_r;
};

RelativeState build_relative_state(const AircraftState& own, const AircraftState& other,
                                   const BeliefMap& belief, double cell_size, int image_size = 64,
                                   double window_m = 1000.0);

// Network input: [rho / rho_scale, theta_r, psi_r, phi0, phi1] plus the
// belief image.
StateEncoding encode_state(const RelativeState& rs, double rho_scale = 1000.0);

struct RewardWeights {
  double w_new_fire = 1.0;          // per cell newly believed burning
  double proximity_penalty = -50.0; // at zero separation, ramping to 0 at the cutoff
  double proximity_cutoff_m = 60.0;
  double w_overfire = 0.0;          // per true fire cell within overfire_radius_m
  double overfire_radius_m = 40.0;
};

// w_new_fire * (cells newly true in the belief) + proximity ramp +
// w_overfire * (true burning cells within the overfire radius of own).
double reward(const BeliefMap& prev_belief, const BeliefMap& new_belief, const AircraftState& own,
              const AircraftState& other, const FireState& fire, const RewardWeights& weights);

// Greedy action from the two Q-values; ties break toward BankLeft (-5 deg).
BankAction dqn_action(const RelativeState& state, const Network& net,
                      double rho_scale = 1000.0);

BankAction baseline_random(Rng& rng);

struct HeuristicParams {
  double standoff_m = 100.0;  // orbit distance once the frontier is close
};

// Steers toward the nearest believed-fire frontier cell; orbits at max bank
// toward the believed-fire centroid side once within the standoff distance.
// With an empty belief, flies toward the map centre.
BankAction baseline_heuristic(const AircraftState& own, const BeliefMap& belief, double cell_size,
                              const HeuristicParams& params = {});

struct PlannerConfig {
  int horizon = 25;        // T, control ticks
  int exec_steps = 5;      // t_exec
  int restarts = 16;
  double dt = 0.1;
  double obs_radius_m = 100.0;  // planning proxy for the camera footprint
  RewardWeights weights;
};

// Receding-horizon search: coordinate descent over length-T action
// sequences with random restarts, objective = plan reward against the
// (static) belief map with the other aircraft assumed straight-flying.
// Returns the first exec_steps actions of the best sequence.
std::vector<BankAction> receding_horizon(const AircraftState& own, const AircraftState& other,
                                         const BeliefMap& belief, double cell_size,
                                         const PlannerConfig& config, uint64_t seed);

// Objective value of a full candidate sequence (exposed for the optimality
// tests).
double plan_objective(const AircraftState& own, const AircraftState& other,
                      const BeliefMap& belief, double cell_size, const PlannerConfig& config,
                      const std::vector<BankAction>& seq);

}  // namespace wildfire
