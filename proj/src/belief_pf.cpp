#include "wildfire/belief_pf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "wildfire/kernels.hpp"

namespace wildfire {

ParticleEnsemble make_particle_ensemble(int width, int height, const PfParams& params,
                                        CellRect seed_region, uint64_t seed) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("ensemble grid dimensions must be positive");
  if (params.particle_count <= 0) throw std::invalid_argument("particle count must be positive");
  if (params.k_max < 1) throw std::invalid_argument("k_max must be at least 1");

  ParticleEnsemble ens;
  ens.width = width;
  ens.height = height;
  ens.params = params;
  ens.rng = Rng(seed);

  const size_t n = ens.cell_count();
  const int levels = params.k_max + 1;
  const double uniform_mass = 1.0 / levels;

  Particle proto;
  proto.burn.assign(n, params.init_burn_low);
  for (int y = seed_region.y; y < seed_region.y + seed_region.h; ++y) {
    for (int x = seed_region.x; x < seed_region.x + seed_region.w; ++x) {
      if (x >= 0 && x < width && y >= 0 && y < height) {
        proto.burn[size_t(y) * width + x] = params.init_burn_high;
      }
    }
  }
  proto.fuel.assign(levels, std::vector<double>(n, uniform_mass));

  ens.particles.reserve(params.particle_count);
  for (int i = 0; i < params.particle_count; ++i) {
    Particle p = proto;
    p.wind = {params.init_wind_sigma * ens.rng.normal(), params.init_wind_sigma * ens.rng.normal()};
    ens.particles.push_back(std::move(p));
  }
  return ens;
}

namespace {

void propagate_in_place(Particle& p, const IgnitionKernel& kernel, int width, int height,
                        std::vector<double>& rho_scratch) {
  const size_t n = size_t(width) * height;
  rho_scratch.resize(n);

  const auto taps = kernel.taps(p.wind);
  kernels::ignite_survival(p.burn.data(), width, height, taps.data(), int(taps.size()),
                           rho_scratch.data());
  for (size_t i = 0; i < n; ++i) rho_scratch[i] = 1.0 - rho_scratch[i];

  std::vector<double*> planes(p.fuel.size());
  for (size_t k = 0; k < p.fuel.size(); ++k) planes[k] = p.fuel[k].data();
  kernels::fuel_shift(planes.data(), int(planes.size()), p.burn.data(), int(n));

  kernels::burn_update(p.burn.data(), p.fuel[0].data(), rho_scratch.data(), int(n));
}

}  // namespace

Particle propagate_particle(Particle p, const IgnitionKernel& kernel, int width, int height) {
  if (size_t(width) * height != p.burn.size()) {
    throw std::invalid_argument("grid dimensions do not match particle fields");
  }
  std::vector<double> rho;
  propagate_in_place(p, kernel, width, height, rho);
  return p;
}

void propagate(ParticleEnsemble& ensemble, const IgnitionKernel& kernel) {
  std::vector<double> rho;
  for (auto& p : ensemble.particles) {
    propagate_in_place(p, kernel, ensemble.width, ensemble.height, rho);
    p.wind.x += ensemble.params.wind_noise_sigma * ensemble.rng.normal();
    p.wind.y += ensemble.params.wind_noise_sigma * ensemble.rng.normal();
  }
  ++ensemble.steps_since_resample;
}

bool resample_due(const ParticleEnsemble& ensemble) {
  return ensemble.steps_since_resample >= ensemble.params.resample_interval;
}

namespace {

struct CellCounts {
  int cell;
  int positives;
  int negatives;
};

std::vector<CellCounts> aggregate(std::span<const CellObservation> observations, size_t n_cells) {
  std::unordered_map<int, std::pair<int, int>> counts;
  counts.reserve(observations.size());
  for (const auto& o : observations) {
    if (o.cell < 0 || size_t(o.cell) >= n_cells) throw std::invalid_argument("observation cell out of range");
    auto& c = counts[o.cell];
    if (o.burning) ++c.first;
    else ++c.second;
  }
  std::vector<CellCounts> out;
  out.reserve(counts.size());
  for (const auto& [cell, c] : counts) out.push_back({cell, c.first, c.second});
  return out;
}

}  // namespace

void weight_update(ParticleEnsemble& ensemble, std::span<const CellObservation> observations) {
  const auto agg = aggregate(observations, ensemble.cell_count());
  const double c = ensemble.params.obs_correct_prob;
  for (auto& p : ensemble.particles) {
    double acc = 0.0;
    for (const auto& a : agg) {
      const double b = p.burn[a.cell];
      const double p1 = c * b + (1.0 - c) * (1.0 - b);
      if (a.positives) acc += a.positives * std::log(p1);
      if (a.negatives) acc += a.negatives * std::log(1.0 - p1);
    }
    p.log_like += acc;
  }
}

void bayes_cell_update(Particle& p, int cell, bool observed, double correct_prob) {
  if (cell < 0 || size_t(cell) >= p.burn.size()) throw std::invalid_argument("cell index out of range");
  const double c = correct_prob;
  const double b = p.burn[cell];
  const double num = observed ? c * b : (1.0 - c) * b;
  const double den = observed ? c * b + (1.0 - c) * (1.0 - b) : (1.0 - c) * b + c * (1.0 - b);
  p.burn[cell] = den > 0.0 ? num / den : b;
}

void bayes_update(ParticleEnsemble& ensemble, std::span<const CellObservation> observations) {
  const auto agg = aggregate(observations, ensemble.cell_count());
  const double c = ensemble.params.obs_correct_prob;
  const double lr = c / (1.0 - c);  // likelihood ratio per positive sample
  for (auto& p : ensemble.particles) {
    for (const auto& a : agg) {
      const double b = p.burn[a.cell];
      if (b <= 0.0 || b >= 1.0) continue;  // absorbing priors stay put
      // net odds update: (c/(1-c))^(positives-negatives)
      const double ratio = std::pow(lr, double(a.positives - a.negatives));
      const double odds = b / (1.0 - b) * ratio;
      p.burn[a.cell] = odds / (1.0 + odds);
    }
  }
}

std::vector<double> normalized_weights(const ParticleEnsemble& ensemble) {
  double max_ll = -std::numeric_limits<double>::infinity();
  for (const auto& p : ensemble.particles) max_ll = std::max(max_ll, p.log_like);
  if (!std::isfinite(max_ll)) {
    throw std::runtime_error("particle filter divergence: no particle has a finite weight");
  }
  std::vector<double> w(ensemble.particles.size());
  double total = 0.0;
  for (size_t i = 0; i < w.size(); ++i) {
    w[i] = std::exp(ensemble.particles[i].log_like - max_ll);
    total += w[i];
  }
  for (double& v : w) v /= total;
  return w;
}

void resample(ParticleEnsemble& ensemble) {
  const auto w = normalized_weights(ensemble);
  const int count = int(ensemble.particles.size());
  const double offset = ensemble.rng.uniform();

  std::vector<Particle> next;
  next.reserve(count);
  double cumulative = w[0];
  int idx = 0;
  for (int j = 0; j < count; ++j) {
    const double target = (j + offset) / count;
    while (target > cumulative && idx + 1 < count) {
      ++idx;
      cumulative += w[idx];
    }
    next.push_back(ensemble.particles[idx]);
  }
  for (auto& p : next) {
    p.log_like = 0.0;
    normalize_fuel(p);
  }
  ensemble.particles = std::move(next);
  ensemble.steps_since_resample = 0;
}

PfEstimate estimate(const ParticleEnsemble& ensemble, bool with_fuel_mean) {
  const auto w = normalized_weights(ensemble);
  const size_t n = ensemble.cell_count();

  PfEstimate est;
  est.belief.width = ensemble.width;
  est.belief.height = ensemble.height;
  est.belief.value.assign(n, 0.0);
  est.wind = {0.0, 0.0};

  for (size_t i = 0; i < ensemble.particles.size(); ++i) {
    const auto& p = ensemble.particles[i];
    const double wi = w[i];
    if (wi == 0.0) continue;
    const double* burn = p.burn.data();
    double* acc = est.belief.value.data();
    for (size_t c = 0; c < n; ++c) acc[c] += wi * burn[c];
    est.wind.x += wi * p.wind.x;
    est.wind.y += wi * p.wind.y;
  }

  est.belief.burning.resize(n);
  for (size_t c = 0; c < n; ++c) est.belief.burning[c] = est.belief.value[c] > 0.5 ? 1 : 0;

  if (with_fuel_mean) {
    est.fuel_mean.assign(n, 0.0);
    for (size_t i = 0; i < ensemble.particles.size(); ++i) {
      const double wi = w[i];
      if (wi == 0.0) continue;
      const auto& fuel = ensemble.particles[i].fuel;
      for (size_t k = 1; k < fuel.size(); ++k) {
        const double* plane = fuel[k].data();
        const double scale = wi * double(k);
        for (size_t c = 0; c < n; ++c) est.fuel_mean[c] += scale * plane[c];
      }
    }
  }
  return est;
}

void normalize_fuel(Particle& p) {
  const size_t n = p.burn.size();
  for (size_t c = 0; c < n; ++c) {
    double total = 0.0;
    for (const auto& plane : p.fuel) total += plane[c];
    if (total > 0.0 && total != 1.0) {
      const double inv = 1.0 / total;
      for (auto& plane : p.fuel) plane[c] *= inv;
    }
  }
}

}  // namespace wildfire
