#include "wildfire/belief_ekf.hpp"

#include <stdexcept>

namespace wildfire {

EkfBelief make_ekf_belief(int width, int height, double q, double r, double mu0, double sigma0,
                          double threshold) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("belief grid dimensions must be positive");
  if (!(sigma0 > 0.0)) throw std::invalid_argument("initial variance must be positive");
  EkfBelief b;
  b.width = width;
  b.height = height;
  b.q = q;
  b.r = r;
  b.threshold = threshold;
  b.mu.assign(b.cell_count(), mu0);
  b.sigma.assign(b.cell_count(), sigma0);
  return b;
}

void ekf_predict(EkfBelief& belief) {
  for (double& s : belief.sigma) s += belief.q;
}

void ekf_correct(EkfBelief& belief, std::span<const CellObservation> observations) {
  const size_t n = belief.cell_count();
  for (const auto& obs : observations) {
    if (obs.cell < 0 || size_t(obs.cell) >= n) throw std::invalid_argument("observation cell out of range");
    double& mu = belief.mu[obs.cell];
    double& sigma = belief.sigma[obs.cell];
    const double k = sigma / (sigma + belief.r);
    const double innovation = (obs.burning ? 1.0 : 0.0) - (mu > belief.threshold ? 1.0 : 0.0);
    mu += k * innovation;
    sigma -= k * sigma;
    ++belief.cell_updates;
  }
}

BeliefMap ekf_belief_map(const EkfBelief& belief) {
  BeliefMap map;
  map.width = belief.width;
  map.height = belief.height;
  map.value = belief.mu;
  map.burning.resize(belief.cell_count());
  for (size_t i = 0; i < map.burning.size(); ++i) {
    map.burning[i] = belief.mu[i] > belief.threshold ? 1 : 0;
  }
  return map;
}

}  // namespace wildfire
