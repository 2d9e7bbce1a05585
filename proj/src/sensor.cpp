#include "wildfire/sensor.hpp"

#include <cmath>
#include <stdexcept>

#include "wildfire/rng.hpp"

namespace wildfire {

Vec3 camera_to_world(Vec3 p_c, double psi, double phi, double theta_c, double phi_c) {
  return rot_z(psi, rot_x(phi, rot_y(theta_c, rot_x(phi_c, p_c))));
}

namespace {

void check_camera(const CameraRig& rig, int camera_id) {
  if (camera_id < 0 || camera_id >= rig.camera_count()) {
    throw std::invalid_argument("camera id out of range");
  }
}

}  // namespace

int pixel_to_ground(const AircraftState& state, const CameraRig& rig, int camera_id, double u_mm,
                    double v_mm, const GroundGrid& grid, Vec2* ground_out) {
  check_camera(rig, camera_id);
  const double hu = 0.5 * rig.sensor_w_mm;
  const double hv = 0.5 * rig.sensor_h_mm;
  if (std::abs(u_mm) > hu + 1e-9 || std::abs(v_mm) > hv + 1e-9) {
    throw std::invalid_argument("pixel outside sensor extent");
  }

  const Vec3 dir = camera_to_world({u_mm, v_mm, rig.focal_mm}, state.psi, state.phi, rig.theta_c,
                                   rig.phi_c[camera_id]);
  if (dir.z <= 1e-12) return kOutOfRange;  // skyward or parallel to the ground

  const double t = state.h / dir.z;
  const Vec2 offset{t * dir.x, t * dir.y};  // (north, east) from the aircraft
  const Vec2 ground{state.x + offset.x, state.y + offset.y};
  if (ground_out) *ground_out = ground;

  const double range = rig.range_mode == CameraRig::RangeMode::Horizontal
                           ? norm(offset)
                           : std::sqrt(offset.x * offset.x + offset.y * offset.y + state.h * state.h);
  if (range > rig.max_range_m) return kOutOfRange;

  const int cx = int(std::floor(ground.y / grid.cell_size));  // east column
  const int cy = int(std::floor(ground.x / grid.cell_size));  // north row
  if (cx < 0 || cx >= grid.width || cy < 0 || cy >= grid.height) return kOutOfRange;
  return cy * grid.width + cx;
}

std::optional<Vec2> ground_to_pixel(const AircraftState& state, const CameraRig& rig,
                                    int camera_id, Vec2 ground) {
  check_camera(rig, camera_id);
  // World offset from the aircraft to the ground point (z down, ground at 0).
  const Vec3 w{ground.x - state.x, ground.y - state.y, state.h};
  // Undo the rotation chain.
  const Vec3 p = rot_x(-rig.phi_c[camera_id],
                       rot_y(-rig.theta_c, rot_x(-state.phi, rot_z(-state.psi, w))));
  if (p.z <= 1e-12) return std::nullopt;
  return Vec2{rig.focal_mm * p.x / p.z, rig.focal_mm * p.y / p.z};
}

std::vector<ObservationImage> observe(const AircraftState& state, const FireState& fire,
                                      const CameraRig& rig, double error_rate, uint64_t noise_key,
                                      double timestamp, int aircraft_id) {
  if (!(error_rate >= 0.0 && error_rate < 1.0 + 1e-12)) {
    throw std::invalid_argument("error rate must be in [0, 1]");
  }
  const GroundGrid grid = GroundGrid::of(fire);
  const double hu = 0.5 * rig.sensor_w_mm;
  const double hv = 0.5 * rig.sensor_h_mm;

  std::vector<ObservationImage> images;
  images.reserve(rig.camera_count());
  for (int cam = 0; cam < rig.camera_count(); ++cam) {
    ObservationImage img;
    img.aircraft_id = aircraft_id;
    img.camera_id = cam;
    img.timestamp = timestamp;
    img.samples.reserve(size_t(rig.samples_u) * rig.samples_v);
    for (int row = 0; row < rig.samples_v; ++row) {
      const double v = rig.samples_v > 1 ? -hv + rig.sensor_h_mm * row / (rig.samples_v - 1) : 0.0;
      for (int col = 0; col < rig.samples_u; ++col) {
        const double u = rig.samples_u > 1 ? -hu + rig.sensor_w_mm * col / (rig.samples_u - 1) : 0.0;
        const int cell = pixel_to_ground(state, rig, cam, u, v, grid);
        if (cell == kOutOfRange) continue;
        bool burning = fire.burning[cell] != 0;
        if (error_rate > 0.0 &&
            uniform_at(noise_key, uint64_t(cam), uint64_t(row), uint64_t(col)) < error_rate) {
          burning = !burning;
        }
        img.samples.push_back({cell, burning});
        img.pixels.push_back({u, v});
      }
    }
    images.push_back(std::move(img));
  }
  return images;
}

}  // namespace wildfire
