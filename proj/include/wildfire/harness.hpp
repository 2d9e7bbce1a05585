#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wildfire/belief_ekf.hpp"
#include "wildfire/belief_pf.hpp"
#include "wildfire/config.hpp"
#include "wildfire/dqn.hpp"
#include "wildfire/policy.hpp"
#include "wildfire/sensor.hpp"

namespace wildfire {

struct MetricsRecord {
  int64_t cells_flown_over = 0;
  int64_t cells_observed = 0;
  double belief_hamming = 0.0;  // mean over fire-step evaluations
  double wind_error = 0.0;      // mean over fire-step evaluations
};

// ---- metric primitives (summed per tick / evaluated per fire step) ----

// True burning cells whose centers lie within `radius` of any aircraft.
int metric_flown_over_tick(const FireState& fire, std::span<const AircraftState> aircraft,
                           double radius);

// True burning cells appearing in any in-range sample this tick; duplicates
// within the tick count once.
int metric_observed_tick(const FireState& fire, std::span<const CellObservation> observations);

// Hamming distance between the thresholded belief and the truth map.
int metric_belief_error(const BeliefMap& belief, const FireState& fire);

double metric_wind_error(Vec2 estimate, Vec2 truth);

// ---- episode timeline ----

// One episode's state machine, shared by the plain runner and the DQN
// environment adapter. Per tick: begin_tick() observes and filters, the
// caller picks actions, apply_actions() integrates; fire steps happen every
// ticks_per_fire_step ticks inside apply_actions().
class EpisodeSim {
 public:
  EpisodeSim(const ScenarioConfig& cfg, uint64_t seed, int fire_steps_override = 0);

  int total_ticks() const { return fire_steps_ * ticks_per_step_; }
  int tick() const { return tick_; }
  bool done() const { return tick_ >= total_ticks(); }
  double time() const { return tick_ * cfg_.dt; }

  void begin_tick();
  void apply_actions(BankAction a0, BankAction a1);

  const BeliefMap& belief() const { return belief_; }
  const BeliefMap& previous_belief() const { return prev_belief_; }
  const FireState& fire() const { return fire_; }
  const std::vector<AircraftState>& aircraft() const { return aircraft_; }
  const std::vector<CellObservation>& last_observations() const { return last_obs_; }
  const std::vector<ObservationImage>& last_images() const { return last_images_; }
  std::optional<Vec2> wind_estimate() const;

  // Invoked at each fire-step evaluation, before the truth advances
  // (snapshot export hook).
  std::function<void(const EpisodeSim&, int fire_step)> on_eval;

  RelativeState relative_state(int aircraft_id) const;
  double tick_reward(int aircraft_id) const;
  // Penalty-only reward at the final tick (no further observations arrive).
  double terminal_reward(int aircraft_id) const;

  const MetricsRecord& metrics() const { return metrics_; }

  struct StepSeries {
    std::vector<int> fire_step;
    std::vector<double> time_s;
    std::vector<int64_t> cells_flown_over;  // cumulative
    std::vector<int64_t> cells_observed;    // cumulative
    std::vector<int> belief_hamming;
    std::vector<double> wind_error;
    std::vector<int> belief_hamming_pf;     // shadow PF, EKF modes only
  };
  const StepSeries& series() const { return series_; }

  struct TrajectoryRow {
    double time;
    int aircraft;
    double x, y, psi, phi;
  };
  const std::vector<TrajectoryRow>& trajectory() const { return trajectory_; }

  const ScenarioConfig& config() const { return cfg_; }
  const ParticleEnsemble* particle_filter() const;  // controlling or shadow PF, if any

 private:
  void refresh_belief();
  void fire_step_boundary();

  ScenarioConfig cfg_;
  uint64_t seed_;
  int fire_steps_;
  int ticks_per_step_;
  int tick_ = 0;
  int fire_step_index_ = 0;

  IgnitionKernel kernel_;
  FireState fire_;
  std::vector<AircraftState> aircraft_;

  std::optional<EkfBelief> ekf_;
  std::optional<ParticleEnsemble> pf_;      // controlling PF
  std::optional<ParticleEnsemble> shadow_pf_;  // passive PF fed by EKF runs

  BeliefMap belief_;
  BeliefMap prev_belief_;
  std::vector<CellObservation> last_obs_;
  std::vector<ObservationImage> last_images_;

  MetricsRecord metrics_;
  int evaluations_ = 0;
  double hamming_sum_ = 0.0;
  double wind_error_sum_ = 0.0;
  StepSeries series_;
  std::vector<TrajectoryRow> trajectory_;
  bool tick_prepared_ = false;
};

// Policy driver for plain (non-training) episodes.
class PolicyDriver {
 public:
  PolicyDriver(const ScenarioConfig& cfg, uint64_t seed);
  BankAction decide(const EpisodeSim& sim, int aircraft_id);
  // Q-values or planner objective recorded for the decision log (optional).
  const std::array<double, 2>& last_scores() const { return last_scores_; }

 private:
  ScenarioConfig cfg_;
  std::optional<Network> net_;
  Rng rng_;
  uint64_t seed_;
  std::array<std::vector<BankAction>, 2> plan_queue_;
  std::array<double, 2> last_scores_{0.0, 0.0};
};

struct EpisodeResult {
  MetricsRecord metrics;
  std::string out_dir;  // empty when no artifacts were written
};

// Runs one episode under cfg with the given seed. When out_dir is non-empty
// the run directory receives: config.json, seed.txt, trajectory.csv,
// metrics.csv, metrics_summary.csv and truth/belief raster snapshots.
EpisodeResult run_episode(const ScenarioConfig& cfg, uint64_t seed, const std::string& out_dir);

// DQN environment over the episode timeline; both aircraft feed one buffer.
class WildfireEnv : public Environment {
 public:
  explicit WildfireEnv(const ScenarioConfig& cfg);
  int agent_count() const override { return 2; }
  std::vector<StateEncoding> reset(uint64_t seed) override;
  StepResult step(const std::vector<int>& actions) override;

 private:
  StateEncoding encode(int aircraft_id) const;
  ScenarioConfig cfg_;
  std::unique_ptr<EpisodeSim> sim_;
};

// Trains the Q-network on the scenario and saves weights + log under
// out_dir; returns the trained network.
Network train_dqn(const ScenarioConfig& cfg, const std::string& out_dir);

struct SweepRow {
  std::string label;
  uint64_t seed = 0;
  bool ok = false;
  std::string error;
  MetricsRecord metrics;
};

struct SweepSummary {
  std::string label;
  int episodes_ok = 0;
  MetricsRecord mean;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<SweepSummary> summaries;
};

// Runs episodes_per_variant seeded episodes per variant in parallel and
// writes episodes.csv / summary.csv under sweep.out_dir. Episode failures
// are recorded and the sweep continues.
SweepResult run_sweep(const SweepConfig& sweep);

// Rebuilds color overlays (truth red, belief green, trajectories white/cyan)
// from a run directory's rasters and trajectory log.
void render_run(const std::string& run_dir, const std::string& out_dir);

}  // namespace wildfire
