#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wildfire/belief_map.hpp"

namespace wildfire {

// One independent scalar Kalman filter per cell. Prediction inflates every
// variance by q; correction applies, per observed cell,
//   k = s / (s + r),  mu += k * (y - [mu > threshold]),  s -= k * s
// with y in {0, 1}. Repeated samples of one cell within a batch are applied
// sequentially in observation order.
struct EkfBelief {
  int width = 0;
  int height = 0;
  std::vector<double> mu;
  std::vector<double> sigma;  // variances, > 0
  double q = 1e-3;
  double r = 0.5;
  double threshold = 0.5;
  uint64_t cell_updates = 0;  // total correction updates applied

  size_t cell_count() const { return size_t(width) * height; }
};

EkfBelief make_ekf_belief(int width, int height, double q = 1e-3, double r = 0.5,
                          double mu0 = 0.0, double sigma0 = 0.1, double threshold = 0.5);

// Variance grows by q everywhere; means are untouched.
void ekf_predict(EkfBelief& belief);

// Applies one correction per observation; cells not observed are untouched.
void ekf_correct(EkfBelief& belief, std::span<const CellObservation> observations);

// Thresholded view: burning iff mu > threshold (strict).
BeliefMap ekf_belief_map(const EkfBelief& belief);

}  // namespace wildfire
