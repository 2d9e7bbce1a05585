#include "wildfire/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace wildfire {

using nlohmann::json;

int ScenarioConfig::ticks_per_fire_step() const {
  return int(std::lround(fire_step_s / dt));
}

ScenarioConfig default_config() { return ScenarioConfig{}; }

namespace {

FilterKind parse_filter(const std::string& s) {
  if (s == "ekf") return FilterKind::Ekf;
  if (s == "pf") return FilterKind::Pf;
  if (s == "ekf+pf-eval") return FilterKind::EkfPfEval;
  throw ConfigError("unknown filter type: " + s);
}

std::string filter_name(FilterKind k) {
  switch (k) {
    case FilterKind::Ekf: return "ekf";
    case FilterKind::Pf: return "pf";
    case FilterKind::EkfPfEval: return "ekf+pf-eval";
  }
  return "pf";
}

PolicyKind parse_policy(const std::string& s) {
  if (s == "dqn") return PolicyKind::Dqn;
  if (s == "random") return PolicyKind::Random;
  if (s == "heuristic") return PolicyKind::Heuristic;
  if (s == "receding_horizon") return PolicyKind::RecedingHorizon;
  throw ConfigError("unknown policy type: " + s);
}

std::string policy_name(PolicyKind k) {
  switch (k) {
    case PolicyKind::Dqn: return "dqn";
    case PolicyKind::Random: return "random";
    case PolicyKind::Heuristic: return "heuristic";
    case PolicyKind::RecedingHorizon: return "receding_horizon";
  }
  return "heuristic";
}

Vec2 parse_vec2(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ConfigError("expected a 2-element array");
  return {j[0].get<double>(), j[1].get<double>()};
}

template <typename T>
void maybe(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

void maybe_vec2(const json& j, const char* key, Vec2& out) {
  if (auto it = j.find(key); it != j.end()) out = parse_vec2(*it);
}

ScenarioConfig from_json(const json& j) {
  ScenarioConfig c = default_config();
  maybe(j, "version", c.version);
  maybe(j, "seed", c.seed);

  if (auto it = j.find("scenario"); it != j.end()) {
    const json& s = *it;
    maybe(s, "grid_width", c.grid_width);
    maybe(s, "grid_height", c.grid_height);
    maybe(s, "cell_size_m", c.cell_size);
    maybe(s, "fire_step_s", c.fire_step_s);
    maybe(s, "initial_fuel", c.initial_fuel);
    maybe(s, "fuel_map", c.fuel_map_path);
    maybe_vec2(s, "wind", c.wind);
    if (auto r = s.find("seed_region"); r != s.end()) {
      maybe(*r, "x", c.seed_region.x);
      maybe(*r, "y", c.seed_region.y);
      maybe(*r, "w", c.seed_region.w);
      maybe(*r, "h", c.seed_region.h);
    }
    if (auto k = s.find("kernel"); k != s.end()) {
      maybe(*k, "radius", c.kernel.radius);
      maybe(*k, "base_prob", c.kernel.base_prob);
      maybe(*k, "decay_length", c.kernel.decay_length);
      maybe(*k, "wind_gain", c.kernel.wind_gain);
    }
    if (auto w = s.find("wind_shift"); w != s.end() && !w->is_null()) {
      c.wind_shift.enabled = true;
      maybe(*w, "at_step", c.wind_shift.at_step);
      maybe_vec2(*w, "wind", c.wind_shift.wind);
    }
  }

  if (auto it = j.find("airframe"); it != j.end()) {
    const json& a = *it;
    maybe(a, "speed", c.speed);
    maybe(a, "altitude", c.altitude);
    maybe(a, "dt", c.dt);
    if (auto b = a.find("bank_tracking"); b != a.end()) {
      const std::string mode = b->get<std::string>();
      if (mode == "snap") c.bank_tracking.mode = BankTracking::Mode::Snap;
      else if (mode == "lag") c.bank_tracking.mode = BankTracking::Mode::Lag;
      else throw ConfigError("unknown bank_tracking: " + mode);
    }
    maybe(a, "bank_lag_tau", c.bank_tracking.tau);
  }

  if (auto it = j.find("aircraft"); it != j.end()) {
    c.aircraft.clear();
    for (const auto& a : *it) {
      AircraftInit init;
      maybe(a, "north", init.north);
      maybe(a, "east", init.east);
      maybe(a, "psi_deg", init.psi_deg);
      c.aircraft.push_back(init);
    }
  }

  if (auto it = j.find("rig"); it != j.end()) {
    const json& r = *it;
    maybe(r, "focal_mm", c.rig.focal_mm);
    maybe(r, "sensor_w_mm", c.rig.sensor_w_mm);
    maybe(r, "sensor_h_mm", c.rig.sensor_h_mm);
    if (auto t = r.find("theta_c_deg"); t != r.end()) c.rig.theta_c = deg2rad(t->get<double>());
    if (auto p = r.find("phi_c_deg"); p != r.end()) {
      if (!p->is_array() || p->size() != c.rig.phi_c.size()) {
        throw ConfigError("phi_c_deg must list four camera angles");
      }
      for (size_t i = 0; i < c.rig.phi_c.size(); ++i) c.rig.phi_c[i] = deg2rad((*p)[i].get<double>());
    }
    maybe(r, "max_range_m", c.rig.max_range_m);
    maybe(r, "samples_u", c.rig.samples_u);
    maybe(r, "samples_v", c.rig.samples_v);
    if (auto m = r.find("range_mode"); m != r.end()) {
      const std::string mode = m->get<std::string>();
      if (mode == "horizontal") c.rig.range_mode = CameraRig::RangeMode::Horizontal;
      else if (mode == "slant") c.rig.range_mode = CameraRig::RangeMode::Slant;
      else throw ConfigError("unknown range_mode: " + mode);
    }
  }

  if (auto it = j.find("observation"); it != j.end()) {
    maybe(*it, "error_rate", c.error_rate);
  }

  if (auto it = j.find("filter"); it != j.end()) {
    const json& f = *it;
    if (auto t = f.find("type"); t != f.end()) c.filter = parse_filter(t->get<std::string>());
    maybe(f, "shared_belief", c.shared_belief);
    if (auto e = f.find("ekf"); e != f.end()) {
      maybe(*e, "q", c.ekf.q);
      maybe(*e, "r", c.ekf.r);
      maybe(*e, "sigma0", c.ekf.sigma0);
      maybe(*e, "threshold", c.ekf.threshold);
      maybe(*e, "predict_per_batch", c.ekf.predict_per_batch);
    }
    if (auto p = f.find("pf"); p != f.end()) {
      maybe(*p, "particles", c.pf.particle_count);
      maybe(*p, "obs_correct_prob", c.pf.obs_correct_prob);
      maybe(*p, "resample_interval", c.pf.resample_interval);
      maybe(*p, "wind_noise_sigma", c.pf.wind_noise_sigma);
      maybe(*p, "k_max", c.pf.k_max);
      maybe(*p, "init_burn_high", c.pf.init_burn_high);
      maybe(*p, "init_burn_low", c.pf.init_burn_low);
      maybe(*p, "init_wind_sigma", c.pf.init_wind_sigma);
    }
  }

  if (auto it = j.find("policy"); it != j.end()) {
    const json& p = *it;
    if (auto t = p.find("type"); t != p.end()) c.policy = parse_policy(t->get<std::string>());
    maybe(p, "dqn_weights", c.dqn_weights_path);
    maybe(p, "belief_image_size", c.belief_image_size);
    maybe(p, "belief_window_m", c.belief_window_m);
    maybe(p, "rho_scale", c.rho_scale);
    if (auto h = p.find("heuristic"); h != p.end()) {
      maybe(*h, "standoff_m", c.heuristic.standoff_m);
    }
    if (auto pl = p.find("planner"); pl != p.end()) {
      maybe(*pl, "horizon", c.planner.horizon);
      maybe(*pl, "exec_steps", c.planner.exec_steps);
      maybe(*pl, "restarts", c.planner.restarts);
      maybe(*pl, "obs_radius_m", c.planner.obs_radius_m);
    }
  }

  if (auto it = j.find("reward"); it != j.end()) {
    const json& r = *it;
    maybe(r, "w_new_fire", c.reward_weights.w_new_fire);
    maybe(r, "proximity_penalty", c.reward_weights.proximity_penalty);
    maybe(r, "proximity_cutoff_m", c.reward_weights.proximity_cutoff_m);
    maybe(r, "w_overfire", c.reward_weights.w_overfire);
    maybe(r, "overfire_radius_m", c.reward_weights.overfire_radius_m);
  }

  if (auto it = j.find("episode"); it != j.end()) {
    maybe(*it, "fire_steps", c.fire_steps);
  }

  if (auto it = j.find("training"); it != j.end()) {
    const json& t = *it;
    maybe(t, "episodes", c.train.episodes);
    maybe(t, "gamma", c.train.gamma);
    maybe(t, "lr", c.train.lr);
    maybe(t, "lr_decay", c.train.lr_decay);
    maybe(t, "lr_decay_every", c.train.lr_decay_every);
    maybe(t, "batch", c.train.batch);
    maybe(t, "buffer_capacity", c.train.buffer_capacity);
    maybe(t, "warmup", c.train.warmup);
    maybe(t, "updates_per_step", c.train.updates_per_step);
    maybe(t, "target_sync", c.train.target_sync);
    maybe(t, "eps_start", c.train.eps_start);
    maybe(t, "eps_end", c.train.eps_end);
    maybe(t, "eps_anneal_frac", c.train.eps_anneal_frac);
    maybe(t, "use_adam", c.train.use_adam);
    maybe(t, "fire_steps", c.train_fire_steps);
    if (auto n = t.find("network"); n != t.end()) {
      maybe(*n, "scalar_hidden", c.net.scalar_hidden);
      maybe(*n, "head_hidden", c.net.head_hidden);
      if (auto cv = n->find("conv"); cv != n->end()) {
        c.net.conv.clear();
        for (const auto& spec : *cv) {
          NetworkConfig::ConvSpec cs;
          maybe(spec, "filters", cs.filters);
          maybe(spec, "ksize", cs.ksize);
          maybe(spec, "stride", cs.stride);
          maybe(spec, "pool", cs.pool);
          c.net.conv.push_back(cs);
        }
      }
    }
  }

  if (auto it = j.find("outputs"); it != j.end()) {
    const json& o = *it;
    maybe(o, "dir", c.out_dir);
    maybe(o, "snapshot_interval", c.snapshot_interval);
    maybe(o, "observation_dump", c.observation_dump);
    maybe(o, "decision_log", c.decision_log);
  }

  return c;
}

}  // namespace

ScenarioConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  ScenarioConfig c;
  try {
    c = from_json(j);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field error: ") + e.what());
  }
  validate(c);
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const ScenarioConfig& c) {
  json j;
  j["version"] = c.version;
  j["seed"] = c.seed;
  j["scenario"] = {
      {"grid_width", c.grid_width},
      {"grid_height", c.grid_height},
      {"cell_size_m", c.cell_size},
      {"fire_step_s", c.fire_step_s},
      {"initial_fuel", c.initial_fuel},
      {"wind", {c.wind.x, c.wind.y}},
      {"seed_region", {{"x", c.seed_region.x}, {"y", c.seed_region.y}, {"w", c.seed_region.w}, {"h", c.seed_region.h}}},
      {"kernel",
       {{"radius", c.kernel.radius},
        {"base_prob", c.kernel.base_prob},
        {"decay_length", c.kernel.decay_length},
        {"wind_gain", c.kernel.wind_gain}}},
  };
  if (!c.fuel_map_path.empty()) j["scenario"]["fuel_map"] = c.fuel_map_path;
  if (c.wind_shift.enabled) {
    j["scenario"]["wind_shift"] = {{"at_step", c.wind_shift.at_step},
                                   {"wind", {c.wind_shift.wind.x, c.wind_shift.wind.y}}};
  }
  j["airframe"] = {
      {"speed", c.speed},
      {"altitude", c.altitude},
      {"dt", c.dt},
      {"bank_tracking", c.bank_tracking.mode == BankTracking::Mode::Snap ? "snap" : "lag"},
      {"bank_lag_tau", c.bank_tracking.tau},
  };
  j["aircraft"] = json::array();
  for (const auto& a : c.aircraft) {
    j["aircraft"].push_back({{"north", a.north}, {"east", a.east}, {"psi_deg", a.psi_deg}});
  }
  json phi_c = json::array();
  for (double p : c.rig.phi_c) phi_c.push_back(rad2deg(p));
  j["rig"] = {
      {"focal_mm", c.rig.focal_mm},
      {"sensor_w_mm", c.rig.sensor_w_mm},
      {"sensor_h_mm", c.rig.sensor_h_mm},
      {"theta_c_deg", rad2deg(c.rig.theta_c)},
      {"phi_c_deg", phi_c},
      {"max_range_m", c.rig.max_range_m},
      {"samples_u", c.rig.samples_u},
      {"samples_v", c.rig.samples_v},
      {"range_mode", c.rig.range_mode == CameraRig::RangeMode::Horizontal ? "horizontal" : "slant"},
  };
  j["observation"] = {{"error_rate", c.error_rate}};
  j["filter"] = {
      {"type", filter_name(c.filter)},
      {"shared_belief", c.shared_belief},
      {"ekf",
       {{"q", c.ekf.q},
        {"r", c.ekf.r},
        {"sigma0", c.ekf.sigma0},
        {"threshold", c.ekf.threshold},
        {"predict_per_batch", c.ekf.predict_per_batch}}},
      {"pf",
       {{"particles", c.pf.particle_count},
        {"obs_correct_prob", c.pf.obs_correct_prob},
        {"resample_interval", c.pf.resample_interval},
        {"wind_noise_sigma", c.pf.wind_noise_sigma},
        {"k_max", c.pf.k_max},
        {"init_burn_high", c.pf.init_burn_high},
        {"init_burn_low", c.pf.init_burn_low},
        {"init_wind_sigma", c.pf.init_wind_sigma}}},
  };
  j["policy"] = {
      {"type", policy_name(c.policy)},
      {"belief_image_size", c.belief_image_size},
      {"belief_window_m", c.belief_window_m},
      {"rho_scale", c.rho_scale},
      {"heuristic", {{"standoff_m", c.heuristic.standoff_m}}},
      {"planner",
       {{"horizon", c.planner.horizon},
        {"exec_steps", c.planner.exec_steps},
        {"restarts", c.planner.restarts},
        {"obs_radius_m", c.planner.obs_radius_m}}},
  };
  if (!c.dqn_weights_path.empty()) j["policy"]["dqn_weights"] = c.dqn_weights_path;
  j["reward"] = {
      {"w_new_fire", c.reward_weights.w_new_fire},
      {"proximity_penalty", c.reward_weights.proximity_penalty},
      {"proximity_cutoff_m", c.reward_weights.proximity_cutoff_m},
      {"w_overfire", c.reward_weights.w_overfire},
      {"overfire_radius_m", c.reward_weights.overfire_radius_m},
  };
  j["episode"] = {{"fire_steps", c.fire_steps}};
  j["training"] = {
      {"episodes", c.train.episodes},
      {"gamma", c.train.gamma},
      {"lr", c.train.lr},
      {"batch", c.train.batch},
      {"buffer_capacity", c.train.buffer_capacity},
      {"warmup", c.train.warmup},
      {"updates_per_step", c.train.updates_per_step},
      {"target_sync", c.train.target_sync},
      {"eps_start", c.train.eps_start},
      {"eps_end", c.train.eps_end},
      {"eps_anneal_frac", c.train.eps_anneal_frac},
      {"use_adam", c.train.use_adam},
      {"fire_steps", c.train_fire_steps},
  };
  j["outputs"] = {
      {"dir", c.out_dir},
      {"snapshot_interval", c.snapshot_interval},
      {"observation_dump", c.observation_dump},
      {"decision_log", c.decision_log},
  };
  return j.dump(2);
}

void validate(const ScenarioConfig& c) {
  if (c.version != 1) throw ConfigError("unsupported config version");
  if (c.grid_width <= 0 || c.grid_height <= 0) throw ConfigError("grid dimensions must be positive");
  if (c.cell_size <= 0.0) throw ConfigError("cell size must be positive");
  if (c.initial_fuel < 0) throw ConfigError("initial fuel must be non-negative");
  if (c.dt <= 0.0 || c.fire_step_s <= 0.0) throw ConfigError("time steps must be positive");

  const double ratio = c.fire_step_s / c.dt;
  if (std::abs(ratio - std::lround(ratio)) > 1e-9 || std::lround(ratio) < 1) {
    throw ConfigError("fire_step_s must be an integer multiple of dt");
  }

  if (c.seed_region.w <= 0 || c.seed_region.h <= 0) throw ConfigError("seed region is empty");
  if (c.seed_region.x < 0 || c.seed_region.y < 0 || c.seed_region.x + c.seed_region.w > c.grid_width ||
      c.seed_region.y + c.seed_region.h > c.grid_height) {
    throw ConfigError("seed region outside grid");
  }

  if (c.aircraft.size() != 2) throw ConfigError("exactly two aircraft are supported");
  if (!(c.error_rate >= 0.0 && c.error_rate <= 1.0)) throw ConfigError("error_rate must be in [0, 1]");
  if (c.rig.samples_u <= 0 || c.rig.samples_v <= 0) throw ConfigError("camera sample grid must be positive");
  if (c.rig.focal_mm <= 0.0) throw ConfigError("focal length must be positive");

  if (c.pf.particle_count <= 0) throw ConfigError("particle count must be positive");
  if (!(c.pf.obs_correct_prob > 0.0 && c.pf.obs_correct_prob < 1.0)) {
    throw ConfigError("obs_correct_prob must be in (0, 1)");
  }
  if (c.pf.k_max < 1) throw ConfigError("k_max must be at least 1");
  if (c.initial_fuel > c.pf.k_max && (c.filter == FilterKind::Pf || c.filter == FilterKind::EkfPfEval)) {
    throw ConfigError("initial fuel exceeds the particle filter's k_max");
  }

  if (c.policy == PolicyKind::Dqn) {
    if (c.dqn_weights_path.empty()) throw ConfigError("dqn policy requires dqn_weights");
    if (!std::filesystem::exists(c.dqn_weights_path)) {
      throw ConfigError("dqn weights file not found: " + c.dqn_weights_path);
    }
  }
  if (!c.fuel_map_path.empty() && !std::filesystem::exists(c.fuel_map_path)) {
    throw ConfigError("fuel map file not found: " + c.fuel_map_path);
  }
  if (c.policy == PolicyKind::RecedingHorizon) {
    if (c.planner.horizon < 1 || c.planner.exec_steps < 1 || c.planner.exec_steps > c.planner.horizon) {
      throw ConfigError("planner requires horizon >= exec_steps >= 1");
    }
  }
  if (c.fire_steps < 0) throw ConfigError("fire_steps must be non-negative");
  if (c.belief_image_size <= 0) throw ConfigError("belief_image_size must be positive");
}

SweepConfig load_sweep_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open sweep config: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("sweep config parse error: ") + e.what());
  }

  SweepConfig sweep;
  json base = j.value("base", json::object());
  sweep.base = parse_config(base.dump());
  sweep.episodes_per_variant = j.value("episodes", 20);
  sweep.workers = j.value("workers", 0);
  sweep.out_dir = j.value("out_dir", std::string("sweep_out"));

  if (auto it = j.find("variants"); it != j.end()) {
    for (const auto& v : *it) {
      SweepVariant variant;
      variant.label = v.value("label", std::string("variant"));
      json merged = base;
      merged.merge_patch(v.value("overrides", json::object()));
      variant.overrides_json = merged.dump();
      parse_config(variant.overrides_json);  // validate now, fail early
      sweep.variants.push_back(std::move(variant));
    }
  }
  if (sweep.variants.empty()) {
    sweep.variants.push_back({"base", base.dump()});
  }
  return sweep;
}

}  // namespace wildfire
