#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <set>

#include "wildfire/rng.hpp"
#include "wildfire/sensor.hpp"

using namespace wildfire;

namespace {

using Mat3 = std::array<std::array<double, 3>, 3>;

Mat3 mat_mul(const Mat3& a, const Mat3& b) {
  Mat3 c{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) c[i][j] += a[i][k] * b[k][j];
  return c;
}

Vec3 mat_apply(const Mat3& m, Vec3 p) {
  return {m[0][0] * p.x + m[0][1] * p.y + m[0][2] * p.z,
          m[1][0] * p.x + m[1][1] * p.y + m[1][2] * p.z,
          m[2][0] * p.x + m[2][1] * p.y + m[2][2] * p.z};
}

Mat3 mat_rx(double a) {
  const double c = std::cos(a), s = std::sin(a);
  return {{{1, 0, 0}, {0, c, -s}, {0, s, c}}};
}
Mat3 mat_ry(double a) {
  const double c = std::cos(a), s = std::sin(a);
  return {{{c, 0, s}, {0, 1, 0}, {-s, 0, c}}};
}
Mat3 mat_rz(double a) {
  const double c = std::cos(a), s = std::sin(a);
  return {{{c, -s, 0}, {s, c, 0}, {0, 0, 1}}};
}

FireState cold_fire(int w = 100, int h = 100) {
  FireState f = make_fire_state(w, h, 10.0, {0, 0}, 1);
  std::fill(f.fuel.begin(), f.fuel.end(), 10);
  return f;
}

}  // namespace

TEST_CASE("camera_to_world: identity and single-axis cases") {
  const Vec3 z{0, 0, 1};
  const Vec3 id = camera_to_world(z, 0, 0, 0, 0);
  CHECK(id.x == doctest::Approx(0.0));
  CHECK(id.y == doctest::Approx(0.0));
  CHECK(id.z == doctest::Approx(1.0));

  // 30 degree pitch tilts the view ray from body z toward body x
  const Vec3 tilted = camera_to_world(z, 0, 0, deg2rad(30.0), 0);
  CHECK(tilted.x == doctest::Approx(std::sin(deg2rad(30.0))));
  CHECK(tilted.y == doctest::Approx(0.0));
  CHECK(tilted.z == doctest::Approx(std::cos(deg2rad(30.0))));
}

TEST_CASE("camera_to_world matches the explicit matrix product") {
  const double psi = deg2rad(90.0), phi = deg2rad(40.0);
  const double theta_c = deg2rad(30.0), phi_c = deg2rad(13.0);
  const Mat3 compound = mat_mul(mat_rz(psi), mat_mul(mat_rx(phi), mat_mul(mat_ry(theta_c), mat_rx(phi_c))));

  Rng rng(17);
  for (int i = 0; i < 50; ++i) {
    const Vec3 p{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
    const Vec3 got = camera_to_world(p, psi, phi, theta_c, phi_c);
    const Vec3 want = mat_apply(compound, p);
    CHECK(std::abs(got.x - want.x) < 1e-12);
    CHECK(std::abs(got.y - want.y) < 1e-12);
    CHECK(std::abs(got.z - want.z) < 1e-12);
  }
}

TEST_CASE("pixel_to_ground matches an independent ray-plane solver") {
  CameraRig rig;
  AircraftState ac;
  ac.x = 500.0;
  ac.y = 500.0;
  ac.psi = deg2rad(35.0);
  ac.phi = deg2rad(10.0);
  const GroundGrid grid{100, 100, 10.0};

  Rng rng(23);
  int checked = 0;
  while (checked < 200) {
    const int cam = rng.uniform_int(4);
    const double u = rng.uniform(-18.0, 18.0);
    const double v = rng.uniform(-12.0, 12.0);
    Vec2 ground;
    const int cell = pixel_to_ground(ac, rig, cam, u, v, grid, &ground);
    if (cell == kOutOfRange) continue;

    // independent solve: p = origin + t d with p.z = 0
    const Vec3 d = camera_to_world({u, v, rig.focal_mm}, ac.psi, ac.phi, rig.theta_c, rig.phi_c[cam]);
    const Vec3 origin{ac.x, ac.y, -ac.h};
    REQUIRE(d.z > 0.0);
    const double t = -origin.z / d.z;
    const double north = origin.x + t * d.x;
    const double east = origin.y + t * d.y;
    CHECK(std::abs(north - ground.x) < 1e-2 * 1e-2);  // well under 1 cm
    CHECK(std::abs(east - ground.y) < 1e-2 * 1e-2);
    CHECK(cell == int(std::floor(north / 10.0)) * 100 + int(std::floor(east / 10.0)));
    ++checked;
  }
}

TEST_CASE("rays past the range cap or skyward are out of range") {
  CameraRig rig;
  AircraftState ac;
  ac.x = 500.0;
  ac.y = 500.0;
  const GroundGrid grid{100, 100, 10.0};

  // Level flight, centre pixel of the steepest camera looks far out: with
  // theta_c = 30deg and phi_c = 40deg the centre ray hits ~260 m out; tilt
  // the pitch up via a pixel at the sensor edge to push past 300 m.
  Vec2 ground;
  const int far_cell = pixel_to_ground(ac, rig, 3, -18.0, -12.0, grid, &ground);
  const double range = std::hypot(ground.x - ac.x, ground.y - ac.y);
  if (range > rig.max_range_m) {
    CHECK(far_cell == kOutOfRange);
  }

  // bank the aircraft so one camera points at or above the horizon
  ac.phi = deg2rad(-50.0);
  bool saw_sky = false;
  for (double v = -12.0; v <= 12.0 && !saw_sky; v += 1.0) {
    const Vec3 d = camera_to_world({-18.0, v, rig.focal_mm}, ac.psi, ac.phi, rig.theta_c, rig.phi_c[0]);
    if (d.z <= 0.0) {
      CHECK(pixel_to_ground(ac, rig, 0, -18.0, v, grid) == kOutOfRange);
      saw_sky = true;
    }
  }
  CHECK(saw_sky);

  CHECK_THROWS_AS(pixel_to_ground(ac, rig, 0, 30.0, 0.0, grid), std::invalid_argument);
  CHECK_THROWS_AS(pixel_to_ground(ac, rig, 0, 0.0, 20.0, grid), std::invalid_argument);
  CHECK_THROWS_AS(pixel_to_ground(ac, rig, 7, 0.0, 0.0, grid), std::invalid_argument);
}

TEST_CASE("project/unproject round trip is exact to 1e-9 mm") {
  CameraRig rig;
  AircraftState ac;
  ac.x = 480.0;
  ac.y = 520.0;
  ac.psi = deg2rad(-120.0);
  ac.phi = deg2rad(25.0);
  const GroundGrid grid{100, 100, 10.0};

  Rng rng(31);
  int checked = 0;
  while (checked < 500) {
    const int cam = rng.uniform_int(4);
    const double u = rng.uniform(-18.0, 18.0);
    const double v = rng.uniform(-12.0, 12.0);
    Vec2 ground;
    if (pixel_to_ground(ac, rig, cam, u, v, grid, &ground) == kOutOfRange) continue;
    const auto uv = ground_to_pixel(ac, rig, cam, ground);
    REQUIRE(uv.has_value());
    CHECK(std::abs(uv->x - u) < 1e-9);
    CHECK(std::abs(uv->y - v) < 1e-9);
    ++checked;
  }
}

TEST_CASE("observe: no fire and no noise gives all-false samples") {
  const FireState fire = cold_fire();
  CameraRig rig;
  AircraftState ac;
  ac.x = 500.0;
  ac.y = 500.0;
  const auto images = observe(ac, fire, rig, 0.0, 42);
  CHECK(images.size() == 4);
  size_t total = 0;
  for (const auto& img : images) {
    CHECK(img.samples.size() <= size_t(rig.samples_u) * rig.samples_v);
    for (const auto& s : img.samples) {
      CHECK(!s.burning);
      CHECK(s.cell >= 0);
      CHECK(s.cell < 10000);
    }
    total += img.samples.size();
  }
  CHECK(total > 0);
}

TEST_CASE("observe: error rate one inverts every sample") {
  FireState fire = cold_fire();
  fire.burning[fire.cell_index(50, 50)] = 1;
  CameraRig rig;
  AircraftState ac;
  ac.x = 500.0;
  ac.y = 500.0;
  const auto clean = observe(ac, fire, rig, 0.0, 42);
  const auto flipped = observe(ac, fire, rig, 1.0, 42);
  for (size_t i = 0; i < clean.size(); ++i) {
    REQUIRE(clean[i].samples.size() == flipped[i].samples.size());
    for (size_t k = 0; k < clean[i].samples.size(); ++k) {
      CHECK(clean[i].samples[k].cell == flipped[i].samples[k].cell);
      CHECK(clean[i].samples[k].burning == !flipped[i].samples[k].burning);
    }
  }
}

TEST_CASE("observe: flip frequency 0.10 within 0.005 over 1e5 samples") {
  const FireState fire = cold_fire();
  CameraRig rig;
  AircraftState ac;
  ac.x = 500.0;
  ac.y = 500.0;

  int64_t flipped = 0, total = 0;
  uint64_t key = 0;
  while (total < 100000) {
    const auto images = observe(ac, fire, rig, 0.10, hash_u64(555, key++));
    for (const auto& img : images) {
      for (const auto& s : img.samples) {
        flipped += s.burning ? 1 : 0;  // truth is everywhere false
        ++total;
      }
    }
  }
  const double freq = double(flipped) / double(total);
  CHECK(std::abs(freq - 0.10) < 0.005);
}

TEST_CASE("observation range cap holds for every sample") {
  const FireState fire = cold_fire();
  CameraRig rig;
  AircraftState ac;
  ac.x = 300.0;
  ac.y = 700.0;
  ac.psi = deg2rad(45.0);
  ac.phi = deg2rad(40.0);
  const auto images = observe(ac, fire, rig, 0.0, 7);
  for (const auto& img : images) {
    for (const auto& s : img.samples) {
      const int cx = s.cell % fire.width;
      const int cy = s.cell / fire.width;
      const double east = (cx + 0.5) * fire.cell_size;
      const double north = (cy + 0.5) * fire.cell_size;
      const double d = std::hypot(north - ac.x, east - ac.y);
      // cell centers can sit up to half a diagonal from the sampled point
      CHECK(d <= rig.max_range_m + fire.cell_size);
    }
  }
}

TEST_CASE("banking changes the ground footprint") {
  const FireState fire = cold_fire();
  CameraRig rig;
  AircraftState level, banked;
  level.x = banked.x = 500.0;
  level.y = banked.y = 500.0;
  banked.phi = deg2rad(40.0);

  auto cells_of = [&](const AircraftState& ac) {
    std::set<int> cells;
    for (const auto& img : observe(ac, fire, rig, 0.0, 3)) {
      for (const auto& s : img.samples) cells.insert(s.cell);
    }
    return cells;
  };
  const auto level_cells = cells_of(level);
  const auto banked_cells = cells_of(banked);
  CHECK(level_cells != banked_cells);
  CHECK(level_cells.size() > 50);
  CHECK(banked_cells.size() > 50);
}
