#pragma once

#include <cstdint>
#include <vector>

namespace wildfire {

// Per-cell burning estimate produced by either filter: a scalar field plus
// its thresholded binary view. Row-major, index = y * width + x, where x is
// the east column and y the north row.
struct BeliefMap {
  int width = 0;
  int height = 0;
  std::vector<double> value;      // filter mean / weighted burn probability
  std::vector<uint8_t> burning;   // thresholded view

  size_t cell_count() const { return size_t(width) * height; }
};

// One filtered camera sample: grid cell index plus the (possibly corrupted)
// burning flag read there.
struct CellObservation {
  int cell = 0;
  bool burning = false;
};

}  // namespace wildfire
