#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace wildfire {

// 8-bit grayscale raster, row 0 at the top of the file. Grid fields are
// written with north row (height-1) on top so east is right and north is up.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> pixels;  // row-major, top row first
};

struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> pixels;  // RGBRGB..., top row first
};

void write_pgm(const std::string& path, const GrayImage& img);
GrayImage read_pgm(const std::string& path);
void write_ppm(const std::string& path, const RgbImage& img);

// Flips a row-major grid field (row 0 = southmost) into image rows
// (top = northmost) and scales values in [lo, hi] to 0..255.
GrayImage grid_to_image(const std::vector<double>& field, int width, int height, double lo,
                        double hi);
GrayImage grid_to_image(const std::vector<uint8_t>& flags, int width, int height);

}  // namespace wildfire
