#include "wildfire/fire_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wildfire/rng.hpp"

namespace wildfire {

double IgnitionKernel::pair_probability(int dx, int dy, Vec2 wind) const {
  if (dx == 0 && dy == 0) return 0.0;
  const double d = std::hypot(double(dx), double(dy));
  if (d > radius) return 0.0;
  double bias = 1.0;
  if (wind.x != 0.0 || wind.y != 0.0) {
    // Spread direction: from the burning cell at (dx, dy) toward the target.
    const Vec2 u{-dx / d, -dy / d};
    bias += wind_gain * std::max(0.0, dot(wind, u));
  }
  return std::clamp(base_prob * std::exp(-d / decay_length) * bias, 0.0, 1.0);
}

std::vector<kernels::Tap> IgnitionKernel::taps(Vec2 wind) const {
  std::vector<kernels::Tap> out;
  out.reserve(size_t(2 * radius + 1) * (2 * radius + 1));
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      const double p = pair_probability(dx, dy, wind);
      if (p > 0.0) out.push_back({dx, dy, p});
    }
  }
  return out;
}

FireState make_fire_state(int width, int height, double cell_size, Vec2 wind, uint64_t seed) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("fire grid dimensions must be positive");
  FireState s;
  s.width = width;
  s.height = height;
  s.cell_size = cell_size;
  s.wind = wind;
  s.rng_seed = seed;
  s.fuel.assign(s.cell_count(), 0);
  s.burning.assign(s.cell_count(), 0);
  return s;
}

namespace {

void check_region(const FireState& state, CellRect r) {
  if (r.w <= 0 || r.h <= 0) throw std::invalid_argument("seed region is empty");
  if (r.x < 0 || r.y < 0 || r.x + r.w > state.width || r.y + r.h > state.height) {
    throw std::invalid_argument("seed region outside grid");
  }
}

void ignite_region(FireState& state, CellRect r) {
  for (int y = r.y; y < r.y + r.h; ++y) {
    for (int x = r.x; x < r.x + r.w; ++x) {
      state.burning[state.cell_index(x, y)] = 1;
    }
  }
}

}  // namespace

void seed_fire(FireState& state, CellRect region, int fuel_init) {
  check_region(state, region);
  if (fuel_init < 0) throw std::invalid_argument("initial fuel must be non-negative");
  std::fill(state.fuel.begin(), state.fuel.end(), fuel_init);
  ignite_region(state, region);
}

void seed_fire(FireState& state, CellRect region, const std::vector<int>& fuel_map) {
  check_region(state, region);
  if (fuel_map.size() != state.cell_count()) throw std::invalid_argument("fuel map size mismatch");
  for (int v : fuel_map) {
    if (v < 0) throw std::invalid_argument("fuel map values must be non-negative");
  }
  state.fuel = fuel_map;
  ignite_region(state, region);
}

double ignition_probability(const FireState& state, const IgnitionKernel& kernel, int cell) {
  if (cell < 0 || size_t(cell) >= state.cell_count()) {
    throw std::invalid_argument("cell index out of range");
  }
  if (state.fuel[cell] <= 0) return 0.0;
  const int cx = cell % state.width;
  const int cy = cell / state.width;
  double survival = 1.0;
  for (int dy = -kernel.radius; dy <= kernel.radius; ++dy) {
    for (int dx = -kernel.radius; dx <= kernel.radius; ++dx) {
      const int nx = cx + dx;
      const int ny = cy + dy;
      if (!state.in_bounds(nx, ny)) continue;
      if (!state.burning[state.cell_index(nx, ny)]) continue;
      survival *= 1.0 - kernel.pair_probability(dx, dy, state.wind);
    }
  }
  return 1.0 - survival;
}

FireState step_fire(const FireState& state, const IgnitionKernel& kernel) {
  const size_t n = state.cell_count();

  std::vector<double> burn_field(n);
  for (size_t i = 0; i < n; ++i) burn_field[i] = state.burning[i] ? 1.0 : 0.0;

  const auto taps = kernel.taps(state.wind);
  std::vector<double> survival(n);
  kernels::ignite_survival(burn_field.data(), state.width, state.height, taps.data(),
                           int(taps.size()), survival.data());

  FireState next = state;
  next.step_count = state.step_count + 1;
  for (size_t i = 0; i < n; ++i) {
    if (state.burning[i]) {
      next.fuel[i] = std::max(0, state.fuel[i] - 1);
      if (next.fuel[i] == 0) next.burning[i] = 0;
    } else if (state.fuel[i] > 0) {
      const double p = 1.0 - survival[i];
      if (p > 0.0 && uniform_at(state.rng_seed, uint64_t(state.step_count), i) < p) {
        next.burning[i] = 1;
      }
    }
  }
  return next;
}

}  // namespace wildfire
