#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "wildfire/airframe.hpp"
#include "wildfire/belief_map.hpp"
#include "wildfire/fire_model.hpp"
#include "wildfire/geometry.hpp"

namespace wildfire {

// Four body-mounted pinhole cameras. Each camera is rolled about the body
// x-axis by phi_c, then pitched about the body y-axis by theta_c; with all
// angles zero it looks straight down (camera z = body z). Image coordinates
// (u, v) are millimetres on the sensor, u along camera x, v along camera y,
// with (u, v) = (f x / z, f y / z).
struct CameraRig {
  double focal_mm = 50.0;
  double sensor_w_mm = 36.0;  // u extent: [-18, 18]
  double sensor_h_mm = 24.0;  // v extent: [-12, 12]
  double theta_c = deg2rad(30.0);
  std::array<double, 4> phi_c{deg2rad(-40.0), deg2rad(-13.0), deg2rad(13.0), deg2rad(40.0)};
  double max_range_m = 300.0;
  int samples_u = 30;
  int samples_v = 20;
  // Range cap measured as horizontal ground distance from the aircraft by
  // default; Slant measures along the ray.
  enum class RangeMode { Horizontal, Slant };
  RangeMode range_mode = RangeMode::Horizontal;

  int camera_count() const { return int(phi_c.size()); }
};

// Grid geometry needed to map ground points to cells.
struct GroundGrid {
  int width = 100;
  int height = 100;
  double cell_size = 10.0;

  static GroundGrid of(const FireState& f) { return {f.width, f.height, f.cell_size}; }
};

// cell < 0 marks an out-of-range sample.
inline constexpr int kOutOfRange = -1;

struct ObservationImage {
  int aircraft_id = 0;
  int camera_id = 0;
  double timestamp = 0.0;
  std::vector<CellObservation> samples;  // in-range samples only, row-major (v rows, u cols)
  std::vector<Vec2> pixels;              // (u, v) mm per sample, parallel to samples
};

// Camera-frame point to world-frame direction: R_z(psi) R_x(phi) R_y(theta_c) R_x(phi_c) p.
Vec3 camera_to_world(Vec3 p_c, double psi, double phi, double theta_c, double phi_c);

// Casts the ray through pixel (u, v) of the given camera to the ground plane.
// Returns the grid cell hit, or kOutOfRange when the ray points skyward, the
// hit is past max_range, or it falls outside the grid. ground_out (optional)
// receives the intersection in world (north, east) metres whenever the ray
// reaches the ground, in range or not. Throws std::invalid_argument for a
// pixel outside the sensor extent.
int pixel_to_ground(const AircraftState& state, const CameraRig& rig, int camera_id, double u_mm,
                    double v_mm, const GroundGrid& grid, Vec2* ground_out = nullptr);

// Inverse projection: world ground point to image coordinates on one camera.
// Empty when the point is behind the image plane.
std::optional<Vec2> ground_to_pixel(const AircraftState& state, const CameraRig& rig,
                                    int camera_id, Vec2 ground);

// Samples each camera on its samples_u x samples_v grid (uniform across the
// sensor including edges), reads the true burning flag of the cell hit, and
// flips each sample independently with probability error_rate. Flip draws
// are keyed by (noise_key, camera, row, col), so results are reproducible
// and independent of how many samples land in range.
std::vector<ObservationImage> observe(const AircraftState& state, const FireState& fire,
                                      const CameraRig& rig, double error_rate, uint64_t noise_key,
                                      double timestamp = 0.0, int aircraft_id = 0);

}  // namespace wildfire
