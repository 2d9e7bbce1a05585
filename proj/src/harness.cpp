#include "wildfire/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "wildfire/raster.hpp"

namespace wildfire {

namespace fs = std::filesystem;

namespace {

constexpr double kFlownOverRadius = 40.0;  // m

uint64_t sub_seed(uint64_t seed, uint64_t tag) { return hash_u64(seed, tag); }

constexpr uint64_t kFireTag = 0x66697265;
constexpr uint64_t kObsTag = 0x6f6273;
constexpr uint64_t kPfTag = 0x7066;
constexpr uint64_t kShadowTag = 0x736864;
constexpr uint64_t kPolicyTag = 0x706f6c;

}  // namespace

int metric_flown_over_tick(const FireState& fire, std::span<const AircraftState> aircraft,
                           double radius) {
  std::unordered_set<int> cells;
  const double r2 = radius * radius;
  for (const auto& ac : aircraft) {
    const int x_lo = std::max(0, int(std::floor((ac.y - radius) / fire.cell_size)));
    const int x_hi = std::min(fire.width - 1, int(std::floor((ac.y + radius) / fire.cell_size)));
    const int y_lo = std::max(0, int(std::floor((ac.x - radius) / fire.cell_size)));
    const int y_hi = std::min(fire.height - 1, int(std::floor((ac.x + radius) / fire.cell_size)));
    for (int y = y_lo; y <= y_hi; ++y) {
      const double dn = (y + 0.5) * fire.cell_size - ac.x;
      for (int x = x_lo; x <= x_hi; ++x) {
        const double de = (x + 0.5) * fire.cell_size - ac.y;
        if (dn * dn + de * de > r2) continue;
        const int idx = fire.cell_index(x, y);
        if (fire.burning[idx]) cells.insert(idx);
      }
    }
  }
  return int(cells.size());
}

int metric_observed_tick(const FireState& fire, std::span<const CellObservation> observations) {
  std::unordered_set<int> cells;
  for (const auto& obs : observations) {
    if (obs.cell >= 0 && fire.burning[obs.cell]) cells.insert(obs.cell);
  }
  return int(cells.size());
}

int metric_belief_error(const BeliefMap& belief, const FireState& fire) {
  if (belief.width != fire.width || belief.height != fire.height) {
    throw std::invalid_argument("belief and truth grids differ");
  }
  int count = 0;
  for (size_t i = 0; i < belief.burning.size(); ++i) {
    if ((belief.burning[i] != 0) != (fire.burning[i] != 0)) ++count;
  }
  return count;
}

double metric_wind_error(Vec2 estimate, Vec2 truth) { return norm(estimate - truth); }

// ---- EpisodeSim ----

EpisodeSim::EpisodeSim(const ScenarioConfig& cfg, uint64_t seed, int fire_steps_override)
    : cfg_(cfg), seed_(seed) {
  fire_steps_ = fire_steps_override > 0 ? fire_steps_override : cfg_.fire_steps;
  ticks_per_step_ = cfg_.ticks_per_fire_step();
  kernel_ = cfg_.kernel;

  fire_ = make_fire_state(cfg_.grid_width, cfg_.grid_height, cfg_.cell_size, cfg_.wind,
                          sub_seed(seed, kFireTag));
  fire_.step_period = cfg_.fire_step_s;
  if (!cfg_.fuel_map_path.empty()) {
    const GrayImage img = read_pgm(cfg_.fuel_map_path);
    if (img.width != fire_.width || img.height != fire_.height) {
      throw ConfigError("fuel map dimensions do not match the grid");
    }
    std::vector<int> fuel(fire_.cell_count());
    for (int y = 0; y < fire_.height; ++y) {
      for (int x = 0; x < fire_.width; ++x) {
        fuel[size_t(y) * fire_.width + x] = img.pixels[size_t(fire_.height - 1 - y) * fire_.width + x];
      }
    }
    seed_fire(fire_, cfg_.seed_region, fuel);
  } else {
    seed_fire(fire_, cfg_.seed_region, cfg_.initial_fuel);
  }

  for (const auto& init : cfg_.aircraft) {
    AircraftState ac;
    ac.x = init.north;
    ac.y = init.east;
    ac.psi = wrap_angle(deg2rad(init.psi_deg));
    ac.v = cfg_.speed;
    ac.h = cfg_.altitude;
    aircraft_.push_back(ac);
  }

  const bool ekf_mode = cfg_.filter == FilterKind::Ekf || cfg_.filter == FilterKind::EkfPfEval;
  if (ekf_mode) {
    ekf_ = make_ekf_belief(fire_.width, fire_.height, cfg_.ekf.q, cfg_.ekf.r, 0.0, cfg_.ekf.sigma0,
                           cfg_.ekf.threshold);
    shadow_pf_ = make_particle_ensemble(fire_.width, fire_.height, cfg_.pf, cfg_.seed_region,
                                        sub_seed(seed, kShadowTag));
  } else {
    pf_ = make_particle_ensemble(fire_.width, fire_.height, cfg_.pf, cfg_.seed_region,
                                 sub_seed(seed, kPfTag));
  }

  refresh_belief();
  prev_belief_ = belief_;
}

const ParticleEnsemble* EpisodeSim::particle_filter() const {
  if (pf_) return &*pf_;
  if (shadow_pf_) return &*shadow_pf_;
  return nullptr;
}

std::optional<Vec2> EpisodeSim::wind_estimate() const {
  const ParticleEnsemble* ens = particle_filter();
  if (!ens) return std::nullopt;
  return estimate(*ens).wind;
}

void EpisodeSim::refresh_belief() {
  if (ekf_) {
    belief_ = ekf_belief_map(*ekf_);
  } else {
    belief_ = estimate(*pf_).belief;
  }
}

void EpisodeSim::begin_tick() {
  if (done() || tick_prepared_) return;

  last_obs_.clear();
  last_images_.clear();
  for (size_t i = 0; i < aircraft_.size(); ++i) {
    auto images = observe(aircraft_[i], fire_, cfg_.rig, cfg_.error_rate,
                          hash_u64(sub_seed(seed_, kObsTag), uint64_t(tick_), i), time(), int(i));
    for (auto& img : images) {
      last_obs_.insert(last_obs_.end(), img.samples.begin(), img.samples.end());
      last_images_.push_back(std::move(img));
    }
  }

  metrics_.cells_flown_over += metric_flown_over_tick(fire_, aircraft_, kFlownOverRadius);
  metrics_.cells_observed += metric_observed_tick(fire_, last_obs_);

  if (ekf_) {
    if (cfg_.ekf.predict_per_batch) ekf_predict(*ekf_);
    ekf_correct(*ekf_, last_obs_);
    weight_update(*shadow_pf_, last_obs_);
    bayes_update(*shadow_pf_, last_obs_);
  } else {
    weight_update(*pf_, last_obs_);
    bayes_update(*pf_, last_obs_);
  }

  prev_belief_ = std::move(belief_);
  refresh_belief();
  tick_prepared_ = true;
}

RelativeState EpisodeSim::relative_state(int aircraft_id) const {
  const int other = 1 - aircraft_id;
  return build_relative_state(aircraft_[aircraft_id], aircraft_[other], belief_, cfg_.cell_size,
                              cfg_.belief_image_size, cfg_.belief_window_m);
}

double EpisodeSim::tick_reward(int aircraft_id) const {
  const int other = 1 - aircraft_id;
  return reward(prev_belief_, belief_, aircraft_[aircraft_id], aircraft_[other], fire_,
                cfg_.reward_weights);
}

double EpisodeSim::terminal_reward(int aircraft_id) const {
  const int other = 1 - aircraft_id;
  return reward(belief_, belief_, aircraft_[aircraft_id], aircraft_[other], fire_,
                cfg_.reward_weights);
}

void EpisodeSim::apply_actions(BankAction a0, BankAction a1) {
  if (done()) return;
  aircraft_[0] = integrate(apply_action(aircraft_[0], a0), cfg_.dt, cfg_.bank_tracking);
  aircraft_[1] = integrate(apply_action(aircraft_[1], a1), cfg_.dt, cfg_.bank_tracking);
  ++tick_;
  tick_prepared_ = false;

  for (size_t i = 0; i < aircraft_.size(); ++i) {
    trajectory_.push_back(
        {time(), int(i), aircraft_[i].x, aircraft_[i].y, aircraft_[i].psi, aircraft_[i].phi});
  }

  if (tick_ % ticks_per_step_ == 0) fire_step_boundary();
}

void EpisodeSim::fire_step_boundary() {
  // Evaluate belief quality against the truth the belief was built from,
  // before the fire advances.
  const int hamming = metric_belief_error(belief_, fire_);
  double wind_err = 0.0;
  int shadow_hamming = -1;
  if (pf_) {
    wind_err = metric_wind_error(estimate(*pf_).wind, fire_.wind);
  } else {
    const PfEstimate shadow = estimate(*shadow_pf_);
    wind_err = metric_wind_error(shadow.wind, fire_.wind);
    shadow_hamming = metric_belief_error(shadow.belief, fire_);
  }

  const int reported_hamming =
      cfg_.filter == FilterKind::EkfPfEval && shadow_hamming >= 0 ? shadow_hamming : hamming;

  series_.fire_step.push_back(fire_step_index_);
  series_.time_s.push_back(time());
  series_.cells_flown_over.push_back(metrics_.cells_flown_over);
  series_.cells_observed.push_back(metrics_.cells_observed);
  series_.belief_hamming.push_back(reported_hamming);
  series_.wind_error.push_back(wind_err);
  series_.belief_hamming_pf.push_back(shadow_hamming);

  ++evaluations_;
  hamming_sum_ += reported_hamming;
  wind_error_sum_ += wind_err;
  metrics_.belief_hamming = hamming_sum_ / evaluations_;
  metrics_.wind_error = wind_error_sum_ / evaluations_;

  if (on_eval) on_eval(*this, fire_step_index_);

  fire_ = step_fire(fire_, kernel_);
  ++fire_step_index_;
  if (cfg_.wind_shift.enabled && fire_step_index_ == cfg_.wind_shift.at_step) {
    fire_.wind = cfg_.wind_shift.wind;
  }

  auto advance_pf = [this](ParticleEnsemble& ens) {
    propagate(ens, kernel_);
    if (resample_due(ens)) resample(ens);
  };
  if (pf_) advance_pf(*pf_);
  if (shadow_pf_) advance_pf(*shadow_pf_);

  if (pf_) {
    // keep the belief aligned with the propagated ensemble between ticks
    belief_ = estimate(*pf_).belief;
  }
}

// ---- PolicyDriver ----

PolicyDriver::PolicyDriver(const ScenarioConfig& cfg, uint64_t seed)
    : cfg_(cfg), rng_(sub_seed(seed, kPolicyTag)), seed_(seed) {
  if (cfg_.policy == PolicyKind::Dqn) {
    net_ = load_network(cfg_.dqn_weights_path);
  }
}

BankAction PolicyDriver::decide(const EpisodeSim& sim, int aircraft_id) {
  last_scores_ = {0.0, 0.0};
  switch (cfg_.policy) {
    case PolicyKind::Dqn: {
      const RelativeState rs = sim.relative_state(aircraft_id);
      const auto q = forward(*net_, encode_state(rs, cfg_.rho_scale));
      last_scores_ = {q[0], q[1]};
      return q[1] > q[0] ? BankAction::BankRight : BankAction::BankLeft;
    }
    case PolicyKind::Random:
      return baseline_random(rng_);
    case PolicyKind::Heuristic:
      return baseline_heuristic(sim.aircraft()[aircraft_id], sim.belief(), cfg_.cell_size,
                                cfg_.heuristic);
    case PolicyKind::RecedingHorizon: {
      auto& queue = plan_queue_[aircraft_id];
      if (queue.empty()) {
        PlannerConfig planner = cfg_.planner;
        planner.dt = cfg_.dt;
        planner.weights = cfg_.reward_weights;
        auto plan = receding_horizon(sim.aircraft()[aircraft_id], sim.aircraft()[1 - aircraft_id],
                                     sim.belief(), cfg_.cell_size, planner,
                                     hash_u64(seed_, uint64_t(sim.tick()), uint64_t(aircraft_id)));
        queue.assign(plan.begin(), plan.end());
        last_scores_[0] = plan_objective(sim.aircraft()[aircraft_id],
                                         sim.aircraft()[1 - aircraft_id], sim.belief(),
                                         cfg_.cell_size, planner, plan);
      }
      const BankAction a = queue.front();
      queue.erase(queue.begin());
      return a;
    }
  }
  return BankAction::BankLeft;
}

// ---- episode runner ----

namespace {

void write_trajectory_csv(const std::string& path, const std::vector<EpisodeSim::TrajectoryRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "time_s,aircraft,x_north_m,y_east_m,psi_rad,phi_rad\n";
  for (const auto& r : rows) {
    out << r.time << ',' << r.aircraft << ',' << r.x << ',' << r.y << ',' << r.psi << ',' << r.phi
        << '\n';
  }
}

void write_metrics_csv(const std::string& path, const EpisodeSim::StepSeries& s) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "fire_step,time_s,cells_flown_over,cells_observed,belief_hamming,wind_error,belief_hamming_pf\n";
  for (size_t i = 0; i < s.fire_step.size(); ++i) {
    out << s.fire_step[i] << ',' << s.time_s[i] << ',' << s.cells_flown_over[i] << ','
        << s.cells_observed[i] << ',' << s.belief_hamming[i] << ',' << s.wind_error[i] << ','
        << s.belief_hamming_pf[i] << '\n';
  }
}

void write_summary_csv(const std::string& path, const MetricsRecord& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "cells_flown_over,cells_observed,belief_hamming,wind_error\n";
  out << m.cells_flown_over << ',' << m.cells_observed << ',' << m.belief_hamming << ','
      << m.wind_error << '\n';
}

std::string step_tag(int step) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d", step);
  return buf;
}

void write_snapshot(const EpisodeSim& sim, int fire_step, const fs::path& dir) {
  const FireState& fire = sim.fire();
  std::vector<double> fuel(fire.cell_count());
  for (size_t i = 0; i < fuel.size(); ++i) fuel[i] = fire.fuel[i];
  const std::string tag = step_tag(fire_step);

  write_pgm((dir / ("truth_burning_" + tag + ".pgm")).string(),
            grid_to_image(fire.burning, fire.width, fire.height));
  write_pgm((dir / ("truth_fuel_" + tag + ".pgm")).string(),
            grid_to_image(fuel, fire.width, fire.height, 0.0, std::max(1.0, *std::max_element(fuel.begin(), fuel.end()))));

  const BeliefMap& belief = sim.belief();
  write_pgm((dir / ("belief_value_" + tag + ".pgm")).string(),
            grid_to_image(belief.value, belief.width, belief.height, 0.0, 1.0));
  write_pgm((dir / ("belief_bin_" + tag + ".pgm")).string(),
            grid_to_image(belief.burning, belief.width, belief.height));

  if (const ParticleEnsemble* ens = sim.particle_filter()) {
    const PfEstimate est = estimate(*ens, true);
    write_pgm((dir / ("pf_burn_" + tag + ".pgm")).string(),
              grid_to_image(est.belief.value, est.belief.width, est.belief.height, 0.0, 1.0));
    write_pgm((dir / ("pf_fuel_mean_" + tag + ".pgm")).string(),
              grid_to_image(est.fuel_mean, est.belief.width, est.belief.height, 0.0,
                            double(ens->params.k_max)));
    const auto weights = normalized_weights(*ens);
    std::ofstream scatter((dir / ("pf_wind_" + tag + ".csv")).string());
    scatter << "wx_east,wy_north,weight\n";
    for (size_t i = 0; i < ens->particles.size(); ++i) {
      scatter << ens->particles[i].wind.x << ',' << ens->particles[i].wind.y << ',' << weights[i]
              << '\n';
    }
  }
}

}  // namespace

EpisodeResult run_episode(const ScenarioConfig& cfg, uint64_t seed, const std::string& out_dir) {
  EpisodeSim sim(cfg, seed);
  PolicyDriver driver(cfg, seed);

  const bool artifacts = !out_dir.empty();
  fs::path dir(out_dir);
  std::ofstream decision_log;
  std::ofstream obs_dump;
  if (artifacts) {
    fs::create_directories(dir);
    std::ofstream cfg_out((dir / "config.json").string());
    cfg_out << config_to_json(cfg) << '\n';
    std::ofstream seed_out((dir / "seed.txt").string());
    seed_out << seed << '\n';
    if (cfg.decision_log) {
      decision_log.open((dir / "decisions.csv").string());
      decision_log << "time_s,aircraft,rho,theta_r,psi_r,phi0,phi1,score0,score1,action\n";
    }
    if (cfg.observation_dump) {
      obs_dump.open((dir / "observations.csv").string());
      obs_dump << "time_s,aircraft,camera,u_mm,v_mm,cell_x,cell_y,observed\n";
    }
    sim.on_eval = [&](const EpisodeSim& s, int fire_step) {
      const bool due = cfg.snapshot_interval > 0 && fire_step % cfg.snapshot_interval == 0;
      const bool last = fire_step == s.total_ticks() / cfg.ticks_per_fire_step() - 1;
      if (due || last) write_snapshot(s, fire_step, dir);
    };
  }

  while (!sim.done()) {
    sim.begin_tick();

    if (obs_dump.is_open()) {
      for (const auto& img : sim.last_images()) {
        for (size_t k = 0; k < img.samples.size(); ++k) {
          obs_dump << img.timestamp << ',' << img.aircraft_id << ',' << img.camera_id << ','
                   << img.pixels[k].x << ',' << img.pixels[k].y << ','
                   << img.samples[k].cell % cfg.grid_width << ','
                   << img.samples[k].cell / cfg.grid_width << ',' << int(img.samples[k].burning)
                   << '\n';
        }
      }
    }

    std::array<BankAction, 2> actions{};
    for (int i = 0; i < 2; ++i) {
      actions[i] = driver.decide(sim, i);
      if (decision_log.is_open()) {
        const RelativeState rs = sim.relative_state(i);
        decision_log << sim.time() << ',' << i << ',' << rs.rho << ',' << rs.theta_r << ','
                     << rs.psi_r << ',' << rs.phi0 << ',' << rs.phi1 << ','
                     << driver.last_scores()[0] << ',' << driver.last_scores()[1] << ','
                     << (actions[i] == BankAction::BankLeft ? -5 : 5) << '\n';
      }
    }
    sim.apply_actions(actions[0], actions[1]);
  }

  if (artifacts) {
    write_trajectory_csv((dir / "trajectory.csv").string(), sim.trajectory());
    write_metrics_csv((dir / "metrics.csv").string(), sim.series());
    write_summary_csv((dir / "metrics_summary.csv").string(), sim.metrics());
  }
  return {sim.metrics(), out_dir};
}

// ---- DQN environment ----

WildfireEnv::WildfireEnv(const ScenarioConfig& cfg) : cfg_(cfg) {}

StateEncoding WildfireEnv::encode(int aircraft_id) const {
  return encode_state(sim_->relative_state(aircraft_id), cfg_.rho_scale);
}

std::vector<StateEncoding> WildfireEnv::reset(uint64_t seed) {
  sim_ = std::make_unique<EpisodeSim>(cfg_, seed, cfg_.train_fire_steps);
  sim_->begin_tick();
  return {encode(0), encode(1)};
}

Environment::StepResult WildfireEnv::step(const std::vector<int>& actions) {
  StepResult result;
  sim_->apply_actions(actions[0] == 0 ? BankAction::BankLeft : BankAction::BankRight,
                      actions[1] == 0 ? BankAction::BankLeft : BankAction::BankRight);
  if (sim_->done()) {
    result.terminal = true;
    result.reward = {float(sim_->terminal_reward(0)), float(sim_->terminal_reward(1))};
    result.next = {encode(0), encode(1)};
  } else {
    sim_->begin_tick();
    result.terminal = false;
    result.reward = {float(sim_->tick_reward(0)), float(sim_->tick_reward(1))};
    result.next = {encode(0), encode(1)};
  }
  return result;
}

Network train_dqn(const ScenarioConfig& cfg, const std::string& out_dir) {
  ScenarioConfig train_cfg = cfg;
  WildfireEnv env(train_cfg);

  NetworkConfig net_cfg = cfg.net;
  net_cfg.scalar_dim = 5;
  net_cfg.image_size = cfg.belief_image_size;
  net_cfg.image_channels = 1;

  TrainParams params = cfg.train;
  params.seed = cfg.seed;

  auto result = train(env, net_cfg, params);

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    save_network(result.net, (fs::path(out_dir) / "weights.wfqn").string());
    write_training_log(result.log, (fs::path(out_dir) / "training_log.csv").string());
  }
  return result.net;
}

// ---- sweep ----

SweepResult run_sweep(const SweepConfig& sweep) {
  SweepResult result;
  const int workers = sweep.workers > 0 ? sweep.workers
                                        : std::max(1u, std::thread::hardware_concurrency());

  fs::create_directories(sweep.out_dir);

  for (const auto& variant : sweep.variants) {
    const ScenarioConfig cfg = parse_config(variant.overrides_json);
    std::vector<SweepRow> rows(sweep.episodes_per_variant);

    for (int start = 0; start < sweep.episodes_per_variant; start += workers) {
      const int end = std::min(sweep.episodes_per_variant, start + workers);
      std::vector<std::future<void>> futures;
      for (int k = start; k < end; ++k) {
        futures.push_back(std::async(std::launch::async, [&, k]() {
          SweepRow& row = rows[k];
          row.label = variant.label;
          row.seed = hash_u64(cfg.seed, uint64_t(k));
          try {
            row.metrics = run_episode(cfg, row.seed, "").metrics;
            row.ok = true;
          } catch (const std::exception& e) {
            row.ok = false;
            row.error = e.what();
          }
        }));
      }
      for (auto& f : futures) f.get();
    }

    SweepSummary summary;
    summary.label = variant.label;
    for (const auto& row : rows) {
      if (!row.ok) continue;
      ++summary.episodes_ok;
      summary.mean.cells_flown_over += row.metrics.cells_flown_over;
      summary.mean.cells_observed += row.metrics.cells_observed;
      summary.mean.belief_hamming += row.metrics.belief_hamming;
      summary.mean.wind_error += row.metrics.wind_error;
    }
    if (summary.episodes_ok > 0) {
      summary.mean.cells_flown_over /= summary.episodes_ok;
      summary.mean.cells_observed /= summary.episodes_ok;
      summary.mean.belief_hamming /= summary.episodes_ok;
      summary.mean.wind_error /= summary.episodes_ok;
    }
    result.summaries.push_back(summary);
    result.rows.insert(result.rows.end(), rows.begin(), rows.end());
  }

  std::ofstream episodes((fs::path(sweep.out_dir) / "episodes.csv").string());
  episodes << "label,seed,ok,cells_flown_over,cells_observed,belief_hamming,wind_error,error\n";
  for (const auto& r : result.rows) {
    episodes << r.label << ',' << r.seed << ',' << int(r.ok) << ',' << r.metrics.cells_flown_over
             << ',' << r.metrics.cells_observed << ',' << r.metrics.belief_hamming << ','
             << r.metrics.wind_error << ',' << '"' << r.error << '"' << '\n';
  }
  std::ofstream summary((fs::path(sweep.out_dir) / "summary.csv").string());
  summary << "label,episodes_ok,mean_cells_flown_over,mean_cells_observed,mean_belief_hamming,"
             "mean_wind_error\n";
  for (const auto& s : result.summaries) {
    summary << s.label << ',' << s.episodes_ok << ',' << s.mean.cells_flown_over << ','
            << s.mean.cells_observed << ',' << s.mean.belief_hamming << ',' << s.mean.wind_error
            << '\n';
  }
  return result;
}

// ---- render ----

namespace {

struct TrajPoint {
  double time;
  int aircraft;
  double north, east;
};

std::vector<TrajPoint> read_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::vector<TrajPoint> points;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    TrajPoint p;
    std::stringstream ss(line);
    std::string field;
    std::getline(ss, field, ',');
    p.time = std::stod(field);
    std::getline(ss, field, ',');
    p.aircraft = std::stoi(field);
    std::getline(ss, field, ',');
    p.north = std::stod(field);
    std::getline(ss, field, ',');
    p.east = std::stod(field);
    points.push_back(p);
  }
  return points;
}

void draw_line(RgbImage& img, int x0, int y0, int x1, int y1, uint8_t r, uint8_t g, uint8_t b) {
  const int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
  const int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  while (true) {
    if (x0 >= 0 && x0 < img.width && y0 >= 0 && y0 < img.height) {
      uint8_t* px = &img.pixels[(size_t(y0) * img.width + x0) * 3];
      px[0] = r;
      px[1] = g;
      px[2] = b;
    }
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

}  // namespace

void render_run(const std::string& run_dir, const std::string& out_dir) {
  const fs::path dir(run_dir);
  if (!fs::exists(dir)) throw std::runtime_error("run directory not found: " + run_dir);
  fs::create_directories(out_dir);

  std::vector<std::string> tags;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("truth_burning_", 0) == 0 && name.size() >= 18) {
      tags.push_back(name.substr(14, 4));
    }
  }
  std::sort(tags.begin(), tags.end());
  if (tags.empty()) throw std::runtime_error("no truth rasters found in " + run_dir);

  std::vector<TrajPoint> traj;
  const fs::path traj_path = dir / "trajectory.csv";
  if (fs::exists(traj_path)) traj = read_trajectory(traj_path.string());

  // read the config for world scaling
  double cell_size = 10.0;
  const fs::path cfg_path = dir / "config.json";
  if (fs::exists(cfg_path)) {
    std::ifstream cfg_in(cfg_path.string());
    std::stringstream ss;
    ss << cfg_in.rdbuf();
    cell_size = parse_config(ss.str()).cell_size;
  }

  for (const auto& tag : tags) {
    const GrayImage truth = read_pgm((dir / ("truth_burning_" + tag + ".pgm")).string());
    GrayImage belief;
    const fs::path belief_path = dir / ("belief_bin_" + tag + ".pgm");
    if (fs::exists(belief_path)) belief = read_pgm(belief_path.string());

    RgbImage out;
    out.width = truth.width;
    out.height = truth.height;
    out.pixels.assign(size_t(out.width) * out.height * 3, 0);
    for (size_t i = 0; i < truth.pixels.size(); ++i) {
      uint8_t* px = &out.pixels[i * 3];
      px[0] = truth.pixels[i] ? 220 : 24;
      px[1] = (!belief.pixels.empty() && belief.pixels[i]) ? 200 : 24;
      px[2] = 24;
    }

    // overlay trajectories (world north-up maps to image rows top-down)
    for (int ac = 0; ac < 2; ++ac) {
      int prev_x = -1, prev_y = -1;
      for (const auto& p : traj) {
        if (p.aircraft != ac) continue;
        const int x = int(p.east / cell_size);
        const int y = out.height - 1 - int(p.north / cell_size);
        if (prev_x >= 0) {
          if (ac == 0) draw_line(out, prev_x, prev_y, x, y, 255, 255, 255);
          else draw_line(out, prev_x, prev_y, x, y, 80, 220, 255);
        }
        prev_x = x;
        prev_y = y;
      }
    }

    write_ppm((fs::path(out_dir) / ("overlay_" + tag + ".ppm")).string(), out);
  }
}

}  // namespace wildfire
