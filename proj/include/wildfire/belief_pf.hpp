#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wildfire/belief_map.hpp"
#include "wildfire/fire_model.hpp"
#include "wildfire/geometry.hpp"
#include "wildfire/rng.hpp"

namespace wildfire {

// A probabilistic wildfire hypothesis: per-cell burn probability, a per-cell
// categorical distribution over remaining fuel levels 0..k_max (stored as
// k_max+1 planes of width*height cells), a wind coefficient vector, and a
// log-likelihood weight.
struct Particle {
  std::vector<double> burn;                // p(cell burning)
  std::vector<std::vector<double>> fuel;   // fuel[k][cell]
  Vec2 wind;
  double log_like = 0.0;
};

struct PfParams {
  int particle_count = 40;
  double obs_correct_prob = 0.8;
  int resample_interval = 20;      // fire steps
  double wind_noise_sigma = 0.02;  // per fire step, per component
  int k_max = 20;
  double init_burn_high = 0.9;
  double init_burn_low = 0.01;
  double init_wind_sigma = 0.5;
};

struct ParticleEnsemble {
  int width = 0;
  int height = 0;
  PfParams params;
  std::vector<Particle> particles;
  Rng rng;
  int steps_since_resample = 0;

  size_t cell_count() const { return size_t(width) * height; }
};

// Burn probability init_burn_high inside the seed block and init_burn_low
// elsewhere; fuel uniform over the k_max+1 levels; winds drawn per particle
// from a zero-mean Gaussian with std init_wind_sigma.
ParticleEnsemble make_particle_ensemble(int width, int height, const PfParams& params,
                                        CellRect seed_region, uint64_t seed);

// One fire step of the probabilistic model with the particle's own wind:
// fuel mass shifts one level down where the cell burns, then
//   rho  = 1 - prod(1 - P(s,s') b(s'))
//   b   <- (1 - p(fuel=0)) * ((1 - b) rho + b)
// with rho evaluated from the pre-step burn field and p(fuel=0) from the
// shifted distribution.
Particle propagate_particle(Particle p, const IgnitionKernel& kernel, int width, int height);

// Propagates every particle, then perturbs each particle's wind with
// zero-mean Gaussian noise (wind_noise_sigma). Counts one fire step toward
// the resample interval.
void propagate(ParticleEnsemble& ensemble, const IgnitionKernel& kernel);

bool resample_due(const ParticleEnsemble& ensemble);

// log_like += sum_i log p(o_i | particle) with
// p(o=1|b) = c b + (1-c)(1-b), p(o=0|b) = (1-c) b + c (1-b), c = obs_correct_prob.
void weight_update(ParticleEnsemble& ensemble, std::span<const CellObservation> observations);

// Replaces burn[cell] with the normalized posterior under the same model.
void bayes_cell_update(Particle& p, int cell, bool observed, double correct_prob);

// Applies the posterior update to every particle for every sample. Repeated
// samples of one cell fold into a single odds update (algebraically equal to
// applying them one at a time).
void bayes_update(ParticleEnsemble& ensemble, std::span<const CellObservation> observations);

// exp(log_like - max) normalized to sum 1. Throws std::runtime_error when no
// particle has a finite weight (filter divergence).
std::vector<double> normalized_weights(const ParticleEnsemble& ensemble);

// Systematic resampling with one uniform offset; particle count is
// preserved and weights reset to uniform.
void resample(ParticleEnsemble& ensemble);

struct PfEstimate {
  BeliefMap belief;              // value = weighted mean burn, thresholded at 0.5
  Vec2 wind;                     // weighted mean wind
  std::vector<double> fuel_mean; // weighted expected fuel level (optional)
};

PfEstimate estimate(const ParticleEnsemble& ensemble, bool with_fuel_mean = false);

// Rescales each cell's fuel distribution to sum exactly 1 (drift guard).
void normalize_fuel(Particle& p);

}  // namespace wildfire
