#include "wildfire/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wildfire {

RelativeState build_relative_state(const AircraftState& own, const AircraftState& other,
                                   const BeliefMap& belief, double cell_size, int image_size,
                                   double window_m) {
  RelativeState rs;
  const double dn = other.x - own.x;
  const double de = other.y - own.y;
  rs.rho = std::hypot(dn, de);
  if (rs.rho > 0.0) {
    // body components: forward along heading, right 90 degrees clockwise
    const double fwd = dn * std::cos(own.psi) + de * std::sin(own.psi);
    const double right = -dn * std::sin(own.psi) + de * std::cos(own.psi);
    rs.theta_r = std::atan2(-right, fwd);  // positive to port
  }
  rs.psi_r = wrap_angle(other.psi - own.psi);
  rs.phi0 = own.phi;
  rs.phi1 = other.phi;

  rs.image_size = image_size;
  rs.belief_r.assign(size_t(image_size) * image_size, 0.0f);
  const double cos_psi = std::cos(own.psi);
  const double sin_psi = std::sin(own.psi);
  for (int row = 0; row < image_size; ++row) {
    // forward distance: top row is furthest ahead
    const double f = window_m * (0.5 - (row + 0.5) / image_size);
    for (int col = 0; col < image_size; ++col) {
      const double r = window_m * ((col + 0.5) / image_size - 0.5);  // right of heading
      const double north = own.x + f * cos_psi - r * sin_psi;
      const double east = own.y + f * sin_psi + r * cos_psi;
      const int cx = int(std::floor(east / cell_size));
      const int cy = int(std::floor(north / cell_size));
      if (cx < 0 || cx >= belief.width || cy < 0 || cy >= belief.height) continue;
      rs.belief_r[size_t(row) * image_size + col] =
          belief.burning[size_t(cy) * belief.width + cx] ? 1.0f : 0.0f;
    }
  }
  return rs;
}

StateEncoding encode_state(const RelativeState& rs, double rho_scale) {
  StateEncoding enc;
  enc.scalars = {float(rs.rho / rho_scale), float(rs.theta_r), float(rs.psi_r), float(rs.phi0),
                 float(rs.phi1)};
  enc.image = rs.belief_r;
  return enc;
}

namespace {

int count_burning_within(const uint8_t* burning, int width, int height, double cell_size,
                         double north, double east, double radius) {
  const int x_lo = std::max(0, int(std::floor((east - radius) / cell_size)));
  const int x_hi = std::min(width - 1, int(std::floor((east + radius) / cell_size)));
  const int y_lo = std::max(0, int(std::floor((north - radius) / cell_size)));
  const int y_hi = std::min(height - 1, int(std::floor((north + radius) / cell_size)));
  const double r2 = radius * radius;
  int count = 0;
  for (int y = y_lo; y <= y_hi; ++y) {
    const double cy = (y + 0.5) * cell_size;
    for (int x = x_lo; x <= x_hi; ++x) {
      const double cx = (x + 0.5) * cell_size;
      const double dn = cy - north;
      const double de = cx - east;
      if (dn * dn + de * de <= r2 && burning[size_t(y) * width + x]) ++count;
    }
  }
  return count;
}

}  // namespace

double reward(const BeliefMap& prev_belief, const BeliefMap& new_belief, const AircraftState& own,
              const AircraftState& other, const FireState& fire, const RewardWeights& weights) {
  if (prev_belief.width != new_belief.width || prev_belief.height != new_belief.height) {
    throw std::invalid_argument("belief maps on different grids");
  }
  double total = 0.0;

  if (weights.w_new_fire != 0.0) {
    int newly = 0;
    for (size_t i = 0; i < new_belief.burning.size(); ++i) {
      if (new_belief.burning[i] && !prev_belief.burning[i]) ++newly;
    }
    total += weights.w_new_fire * newly;
  }

  if (weights.proximity_penalty != 0.0) {
    const double rho = std::hypot(other.x - own.x, other.y - own.y);
    if (rho < weights.proximity_cutoff_m) {
      total += weights.proximity_penalty * (1.0 - rho / weights.proximity_cutoff_m);
    }
  }

  if (weights.w_overfire != 0.0) {
    total += weights.w_overfire * count_burning_within(fire.burning.data(), fire.width, fire.height,
                                                       fire.cell_size, own.x, own.y,
                                                       weights.overfire_radius_m);
  }
  return total;
}

BankAction dqn_action(const RelativeState& state, const Network& net, double rho_scale) {
  const auto q = forward(net, encode_state(state, rho_scale));
  return q[1] > q[0] ? BankAction::BankRight : BankAction::BankLeft;
}

BankAction baseline_random(Rng& rng) {
  return rng.uniform() < 0.5 ? BankAction::BankLeft : BankAction::BankRight;
}

namespace {

// Believed-burning cell with a non-burning 4-neighbour (or on the map edge).
bool is_frontier(const BeliefMap& belief, int x, int y) {
  const auto lit = [&](int cx, int cy) {
    if (cx < 0 || cx >= belief.width || cy < 0 || cy >= belief.height) return false;
    return belief.burning[size_t(cy) * belief.width + cx] != 0;
  };
  if (!lit(x, y)) return false;
  return !lit(x - 1, y) || !lit(x + 1, y) || !lit(x, y - 1) || !lit(x, y + 1);
}

// Action that steers phi_cmd toward the bank needed to null the bearing
// error; ties break toward BankLeft.
BankAction steer_toward(const AircraftState& own, double target_north, double target_east) {
  const double dn = target_north - own.x;
  const double de = target_east - own.y;
  const double bearing = std::atan2(de, dn);          // world bearing to target
  const double err = wrap_angle(bearing - own.psi);   // positive = target to the right
  const double desired_bank = std::clamp(err, -kBankLimit, kBankLimit);
  return desired_bank > own.phi_cmd ? BankAction::BankRight : BankAction::BankLeft;
}

}  // namespace

BankAction baseline_heuristic(const AircraftState& own, const BeliefMap& belief, double cell_size,
                              const HeuristicParams& params) {
  double best_d2 = std::numeric_limits<double>::infinity();
  double target_n = 0.0, target_e = 0.0;
  double centroid_n = 0.0, centroid_e = 0.0;
  int lit_count = 0;
  for (int y = 0; y < belief.height; ++y) {
    for (int x = 0; x < belief.width; ++x) {
      if (!belief.burning[size_t(y) * belief.width + x]) continue;
      const double cn = (y + 0.5) * cell_size;
      const double ce = (x + 0.5) * cell_size;
      centroid_n += cn;
      centroid_e += ce;
      ++lit_count;
      if (!is_frontier(belief, x, y)) continue;
      const double d2 = (cn - own.x) * (cn - own.x) + (ce - own.y) * (ce - own.y);
      if (d2 < best_d2) {
        best_d2 = d2;
        target_n = cn;
        target_e = ce;
      }
    }
  }

  if (lit_count == 0) {
    // nothing believed burning: head for the map centre
    return steer_toward(own, 0.5 * belief.height * cell_size, 0.5 * belief.width * cell_size);
  }

  centroid_n /= lit_count;
  centroid_e /= lit_count;
  if (best_d2 <= params.standoff_m * params.standoff_m) {
    // orbit: max bank toward the centroid side
    const double bearing = std::atan2(centroid_e - own.y, centroid_n - own.x);
    const double err = wrap_angle(bearing - own.psi);
    return err > 0.0 ? BankAction::BankRight : BankAction::BankLeft;
  }
  return steer_toward(own, target_n, target_e);
}

namespace {

// Rollout of one candidate sequence. Coverage is tracked with an epoch
// stamp per cell so repeated evaluations reuse the same buffer.
struct PlanEvaluator {
  const BeliefMap& belief;
  double cell_size;
  const PlannerConfig& config;
  std::vector<uint32_t> visit_epoch;
  uint32_t epoch = 0;

  PlanEvaluator(const BeliefMap& b, double cs, const PlannerConfig& cfg)
      : belief(b), cell_size(cs), config(cfg), visit_epoch(b.cell_count(), 0) {}

  double evaluate(const AircraftState& own0, const AircraftState& other0,
                  const std::vector<BankAction>& seq) {
    ++epoch;
    AircraftState own = own0;
    AircraftState other = other0;
    other.phi_cmd = 0.0;  // assumed straight-flying
    other.phi = 0.0;
    double total = 0.0;
    const double radius = config.obs_radius_m;
    const double r2 = radius * radius;

    for (const BankAction action : seq) {
      own = integrate(apply_action(own, action), config.dt);
      other = integrate(other, config.dt);

      // newly covered believed-burning cells
      const int x_lo = std::max(0, int(std::floor((own.y - radius) / cell_size)));
      const int x_hi = std::min(belief.width - 1, int(std::floor((own.y + radius) / cell_size)));
      const int y_lo = std::max(0, int(std::floor((own.x - radius) / cell_size)));
      const int y_hi = std::min(belief.height - 1, int(std::floor((own.x + radius) / cell_size)));
      int newly = 0;
      int overfire = 0;
      for (int y = y_lo; y <= y_hi; ++y) {
        const double cn = (y + 0.5) * cell_size - own.x;
        for (int x = x_lo; x <= x_hi; ++x) {
          const double ce = (x + 0.5) * cell_size - own.y;
          if (cn * cn + ce * ce > r2) continue;
          const size_t idx = size_t(y) * belief.width + x;
          if (!belief.burning[idx]) continue;
          if (visit_epoch[idx] != epoch) {
            visit_epoch[idx] = epoch;
            ++newly;
          }
          if (config.weights.w_overfire != 0.0 &&
              cn * cn + ce * ce <=
                  config.weights.overfire_radius_m * config.weights.overfire_radius_m) {
            ++overfire;
          }
        }
      }
      total += config.weights.w_new_fire * newly;
      total += config.weights.w_overfire * overfire;

      const double rho = std::hypot(other.x - own.x, other.y - own.y);
      if (rho < config.weights.proximity_cutoff_m) {
        total += config.weights.proximity_penalty * (1.0 - rho / config.weights.proximity_cutoff_m);
      }
    }
    return total;
  }
};

}  // namespace

double plan_objective(const AircraftState& own, const AircraftState& other,
                      const BeliefMap& belief, double cell_size, const PlannerConfig& config,
                      const std::vector<BankAction>& seq) {
  PlanEvaluator eval(belief, cell_size, config);
  return eval.evaluate(own, other, seq);
}

std::vector<BankAction> receding_horizon(const AircraftState& own, const AircraftState& other,
                                         const BeliefMap& belief, double cell_size,
                                         const PlannerConfig& config, uint64_t seed) {
  if (config.horizon <= 0 || config.exec_steps < 1 || config.exec_steps > config.horizon) {
    throw std::invalid_argument("planner horizon must satisfy T > t_exec >= 1 (or T == t_exec == 1)");
  }
  Rng rng(seed);
  PlanEvaluator eval(belief, cell_size, config);

  std::vector<BankAction> best_seq;
  double best_value = -std::numeric_limits<double>::infinity();

  for (int restart = 0; restart < std::max(1, config.restarts); ++restart) {
    std::vector<BankAction> seq(config.horizon);
    for (auto& a : seq) a = rng.uniform() < 0.5 ? BankAction::BankLeft : BankAction::BankRight;
    double value = eval.evaluate(own, other, seq);

    // coordinate descent: sweep until a full pass yields no improvement
    bool improved = true;
    while (improved) {
      improved = false;
      for (int i = 0; i < config.horizon; ++i) {
        seq[i] = seq[i] == BankAction::BankLeft ? BankAction::BankRight : BankAction::BankLeft;
        const double flipped = eval.evaluate(own, other, seq);
        if (flipped > value) {
          value = flipped;
          improved = true;
        } else {
          seq[i] = seq[i] == BankAction::BankLeft ? BankAction::BankRight : BankAction::BankLeft;
        }
      }
    }

    if (value > best_value) {
      best_value = value;
      best_seq = seq;
    }
  }

  best_seq.resize(config.exec_steps);
  return best_seq;
}

}  // namespace wildfire
