#pragma once

#include <cstdint>
#include <vector>

#include "wildfire/geometry.hpp"
#include "wildfire/kernels.hpp"

namespace wildfire {

// Pairwise ignition probability: a burning cell ignites a neighbour with
// probability base_prob * exp(-d / decay_length), boosted when the spread
// direction has a positive component along the wind vector and cut off past
// `radius` cell-center distances. Wind is a non-dimensional (east, north)
// coefficient vector; a zero wind gives an isotropic kernel.
//
// Default calibration: with a unit wind the downwind front advances about a
// quarter cell per step (ignition probabilities ~0.2-0.3, inside the
// informative range of the 0.8/0.2 observation model) while upwind creep
// stays near 0.05, so a 60-step episode burns an off-center egg a few
// hundred cells large rather than consuming the grid.
struct IgnitionKernel {
  int radius = 2;
  double base_prob = 0.05;
  double decay_length = 1.0;   // cells
  double wind_gain = 4.0;

  // Probability that a burning cell at offset (dx east, dy north) from the
  // target ignites the target. Zero outside the radius and for (0, 0).
  double pair_probability(int dx, int dy, Vec2 wind) const;

  // All non-zero taps for a given wind, in fixed (dy, dx) row-major order.
  std::vector<kernels::Tap> taps(Vec2 wind) const;
};

// Ground-truth stochastic wildfire on a rectangular cell grid.
// Cell index = y * width + x (x east column, y north row); cell centers sit
// at ((x + 0.5) * cell_size east, (y + 0.5) * cell_size north).
struct FireState {
  int width = 100;
  int height = 100;
  double cell_size = 10.0;     // m
  double step_period = 2.5;    // s per fire step
  std::vector<int> fuel;       // >= 0
  std::vector<uint8_t> burning;
  Vec2 wind;                   // (east, north), non-dimensional
  uint64_t rng_seed = 0;
  int step_count = 0;

  size_t cell_count() const { return size_t(width) * height; }
  bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
  int cell_index(int x, int y) const { return y * width + x; }
};

FireState make_fire_state(int width, int height, double cell_size, Vec2 wind, uint64_t seed);

struct CellRect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;
};

// Assigns uniform initial fuel everywhere and ignites the given block.
// Throws std::invalid_argument for an empty or out-of-grid region.
void seed_fire(FireState& state, CellRect region, int fuel_init);

// Same, with a per-cell fuel map (width*height values).
void seed_fire(FireState& state, CellRect region, const std::vector<int>& fuel_map);

// Probability that cell `cell` ignites at the next step given the current
// burning set: 1 - prod(1 - P(s,s') B(s')) when fuelled, 0 otherwise.
// Throws std::invalid_argument for an out-of-range cell.
double ignition_probability(const FireState& state, const IgnitionKernel& kernel, int cell);

// One synchronous fire step: burning cells lose one unit of fuel and
// extinguish at zero; fuelled non-burning cells ignite independently with
// ignition_probability, all evaluated against the pre-step burning set.
// Ignition draws are keyed by (rng_seed, step_count, cell), so trajectories
// are reproducible regardless of evaluation order.
FireState step_fire(const FireState& state, const IgnitionKernel& kernel);

}  // namespace wildfire
