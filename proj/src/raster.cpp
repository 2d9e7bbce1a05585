#include "wildfire/raster.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace wildfire {

void write_pgm(const std::string& path, const GrayImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()), std::streamsize(img.pixels.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

int next_token(std::istream& in) {
  // Skips whitespace and '#' comment lines, then reads one integer.
  while (in) {
    const int c = in.peek();
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      break;
    }
  }
  int value = -1;
  in >> value;
  return value;
}

}  // namespace

GrayImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string magic;
  in >> magic;
  if (magic != "P5") throw std::runtime_error("not a binary PGM: " + path);
  GrayImage img;
  img.width = next_token(in);
  img.height = next_token(in);
  const int maxval = next_token(in);
  if (img.width <= 0 || img.height <= 0 || maxval != 255) {
    throw std::runtime_error("unsupported PGM header: " + path);
  }
  in.get();  // single whitespace after maxval
  img.pixels.resize(size_t(img.width) * img.height);
  in.read(reinterpret_cast<char*>(img.pixels.data()), std::streamsize(img.pixels.size()));
  if (!in) throw std::runtime_error("truncated PGM: " + path);
  return img;
}

void write_ppm(const std::string& path, const RgbImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "P6\n" << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()), std::streamsize(img.pixels.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

GrayImage grid_to_image(const std::vector<double>& field, int width, int height, double lo,
                        double hi) {
  GrayImage img;
  img.width = width;
  img.height = height;
  img.pixels.resize(size_t(width) * height);
  const double scale = hi > lo ? 255.0 / (hi - lo) : 0.0;
  for (int y = 0; y < height; ++y) {
    const int img_row = height - 1 - y;
    for (int x = 0; x < width; ++x) {
      const double v = std::clamp((field[size_t(y) * width + x] - lo) * scale, 0.0, 255.0);
      img.pixels[size_t(img_row) * width + x] = uint8_t(std::lround(v));
    }
  }
  return img;
}

GrayImage grid_to_image(const std::vector<uint8_t>& flags, int width, int height) {
  GrayImage img;
  img.width = width;
  img.height = height;
  img.pixels.resize(size_t(width) * height);
  for (int y = 0; y < height; ++y) {
    const int img_row = height - 1 - y;
    for (int x = 0; x < width; ++x) {
      img.pixels[size_t(img_row) * width + x] = flags[size_t(y) * width + x] ? 255 : 0;
    }
  }
  return img;
}

}  // namespace wildfire
