#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "wildfire/airframe.hpp"
#include "wildfire/belief_pf.hpp"
#include "wildfire/dqn.hpp"
#include "wildfire/fire_model.hpp"
#include "wildfire/policy.hpp"
#include "wildfire/sensor.hpp"

namespace wildfire {

// Reported with exit code 1 by the CLI; runtime failures exit with 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class FilterKind { Ekf, Pf, EkfPfEval };
enum class PolicyKind { Dqn, Random, Heuristic, RecedingHorizon };

struct AircraftInit {
  double north = 0.0;
  double east = 0.0;
  double psi_deg = 90.0;
};

struct EkfConfig {
  double q = 1e-3;
  double r = 0.5;
  double sigma0 = 0.1;
  double threshold = 0.5;
  bool predict_per_batch = true;
};

struct WindShift {
  bool enabled = false;
  int at_step = 30;
  Vec2 wind{0.0, 1.0};
};

// Everything needed to run one episode. Loaded from the versioned JSON
// config file; CLI flags override individual fields.
struct ScenarioConfig {
  int version = 1;
  uint64_t seed = 1;

  // fire scenario
  int grid_width = 100;
  int grid_height = 100;
  double cell_size = 10.0;   // m; 100 cells span 1 km
  double fire_step_s = 2.5;
  int initial_fuel = 20;
  std::string fuel_map_path;  // optional PGM, pixel value = fuel units
  CellRect seed_region{33, 48, 4, 4};
  Vec2 wind{1.0, 0.0};  // (east, north)
  IgnitionKernel kernel;
  WindShift wind_shift;

  // airframe
  double speed = 20.0;
  double altitude = 200.0;
  double dt = 0.1;
  BankTracking bank_tracking;
  std::vector<AircraftInit> aircraft{{600.0, 200.0, 90.0}, {600.0, 700.0, 90.0}};

  // cameras
  CameraRig rig;
  double error_rate = 0.10;

  // filtering
  FilterKind filter = FilterKind::Pf;
  EkfConfig ekf;
  PfParams pf;
  bool shared_belief = true;

  // policy
  PolicyKind policy = PolicyKind::Heuristic;
  std::string dqn_weights_path;
  int belief_image_size = 64;
  double belief_window_m = 1000.0;
  double rho_scale = 1000.0;
  HeuristicParams heuristic;
  PlannerConfig planner;

  RewardWeights reward_weights;

  // episode
  int fire_steps = 60;

  // training
  TrainParams train;
  NetworkConfig net;
  int train_fire_steps = 30;

  // outputs
  std::string out_dir;
  int snapshot_interval = 10;  // fire steps; 0 = final snapshot only
  bool observation_dump = false;
  bool decision_log = false;

  int ticks_per_fire_step() const;
};

ScenarioConfig default_config();

// Parses a JSON config (any subset of fields on top of the defaults) and
// validates it. Throws ConfigError on malformed input.
ScenarioConfig parse_config(const std::string& json_text);
ScenarioConfig load_config(const std::string& path);
std::string config_to_json(const ScenarioConfig& cfg);

// Checks invariants: integer tick ratio, valid enums, referenced files
// exist, two aircraft, sane ranges. Throws ConfigError.
void validate(const ScenarioConfig& cfg);

struct SweepVariant {
  std::string label;
  std::string overrides_json;  // merge-patched onto the base config
};

struct SweepConfig {
  ScenarioConfig base;
  std::vector<SweepVariant> variants;
  int episodes_per_variant = 20;
  int workers = 0;  // 0 = hardware concurrency
  std::string out_dir = "sweep_out";
};

SweepConfig load_sweep_config(const std::string& path);

}  // namespace wildfire
