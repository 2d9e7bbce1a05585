#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>

#include "wildfire/fire_model.hpp"
#include "wildfire/rng.hpp"

using namespace wildfire;

namespace {

// all eight neighbours at probability ~p, no decay, no wind
IgnitionKernel flat_kernel(double p) {
  IgnitionKernel k;
  k.radius = 2;
  k.base_prob = p;
  k.decay_length = 1e15;
  k.wind_gain = 0.0;
  return k;
}

FireState grid3x3_center_burning(int fuel) {
  FireState s = make_fire_state(3, 3, 10.0, {0, 0}, 99);
  std::fill(s.fuel.begin(), s.fuel.end(), fuel);
  s.burning[s.cell_index(1, 1)] = 1;
  return s;
}

}  // namespace

TEST_CASE("pair probability decays with distance and cuts off at the radius") {
  IgnitionKernel k;  // defaults
  CHECK(k.pair_probability(0, 0, {0, 0}) == 0.0);
  const double p1 = k.pair_probability(1, 0, {0, 0});
  const double p2 = k.pair_probability(2, 0, {0, 0});
  CHECK(p1 > p2);
  CHECK(p2 > 0.0);
  CHECK(k.pair_probability(4, 0, {0, 0}) == 0.0);
  CHECK(k.pair_probability(3, 1, {0, 0}) == 0.0);  // sqrt(10) > 3

  // isotropy with zero wind
  CHECK(k.pair_probability(1, 0, {0, 0}) ==
        doctest::Approx(k.pair_probability(0, 1, {0, 0})).epsilon(1e-15));
  CHECK(k.pair_probability(1, 1, {0, 0}) ==
        doctest::Approx(k.pair_probability(-1, -1, {0, 0})).epsilon(1e-15));

  // east wind boosts spread toward the east: a neighbour west of the target
  // (dx = -1) ignites it more strongly than one east of it
  const Vec2 east_wind{1.0, 0.0};
  CHECK(k.pair_probability(-1, 0, east_wind) > k.pair_probability(1, 0, east_wind));
  CHECK(k.pair_probability(1, 0, east_wind) ==
        doctest::Approx(k.pair_probability(1, 0, {0, 0})).epsilon(1e-15));

  for (int dy = -3; dy <= 3; ++dy) {
    for (int dx = -3; dx <= 3; ++dx) {
      const double p = k.pair_probability(dx, dy, {3.0, -2.0});
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
    }
  }
}

TEST_CASE("ignition probability: zero fuel short-circuits to zero") {
  FireState s = grid3x3_center_burning(5);
  s.fuel[s.cell_index(0, 0)] = 0;
  CHECK(ignition_probability(s, flat_kernel(0.1), s.cell_index(0, 0)) == 0.0);
}

TEST_CASE("ignition probability: single and double burning neighbours") {
  FireState s = grid3x3_center_burning(5);
  const IgnitionKernel k = flat_kernel(0.1);
  CHECK(ignition_probability(s, k, s.cell_index(0, 1)) == doctest::Approx(0.1).epsilon(1e-9));

  s.burning[s.cell_index(1, 0)] = 1;
  // (0,1) now sees burning cells at (1,1) and (1,0)
  CHECK(ignition_probability(s, k, s.cell_index(0, 1)) ==
        doctest::Approx(1.0 - 0.9 * 0.9).epsilon(1e-9));
}

TEST_CASE("ignition probability rejects out-of-range cells") {
  FireState s = grid3x3_center_burning(5);
  CHECK_THROWS_AS(ignition_probability(s, flat_kernel(0.1), -1), std::invalid_argument);
  CHECK_THROWS_AS(ignition_probability(s, flat_kernel(0.1), 9), std::invalid_argument);
}

TEST_CASE("step_fire: burning cells lose one fuel unit and extinguish at zero") {
  FireState s = grid3x3_center_burning(5);
  const IgnitionKernel k = flat_kernel(0.0);
  FireState next = step_fire(s, k);
  CHECK(next.fuel[next.cell_index(1, 1)] == 4);
  CHECK(next.burning[next.cell_index(1, 1)] == 1);

  FireState low = grid3x3_center_burning(1);
  FireState out = step_fire(low, k);
  CHECK(out.fuel[out.cell_index(1, 1)] == 0);
  CHECK(out.burning[out.cell_index(1, 1)] == 0);
}

TEST_CASE("step_fire: Monte-Carlo ignition frequency per neighbour is 0.1 within 0.01") {
  const IgnitionKernel k = flat_kernel(0.1);
  const int trials = 100000;
  std::array<int, 9> ignitions{};
  for (int t = 0; t < trials; ++t) {
    FireState s = grid3x3_center_burning(5);
    s.rng_seed = hash_u64(424242, uint64_t(t));
    const FireState next = step_fire(s, k);
    for (int c = 0; c < 9; ++c) {
      if (c != 4 && next.burning[c]) ++ignitions[c];
    }
  }
  for (int c = 0; c < 9; ++c) {
    if (c == 4) continue;
    const double freq = double(ignitions[c]) / trials;
    CHECK(std::abs(freq - 0.1) < 0.01);
  }
}

TEST_CASE("seed_fire seeds exactly the requested block and is idempotent") {
  FireState s = make_fire_state(10, 10, 10.0, {0, 0}, 1);
  seed_fire(s, {2, 3, 2, 2}, 7);
  int burning = 0;
  for (auto b : s.burning) burning += b;
  CHECK(burning == 4);
  CHECK(s.fuel[0] == 7);

  seed_fire(s, {2, 3, 2, 2}, 7);
  burning = 0;
  for (auto b : s.burning) burning += b;
  CHECK(burning == 4);

  CHECK_THROWS_AS(seed_fire(s, {2, 3, 0, 2}, 7), std::invalid_argument);
  CHECK_THROWS_AS(seed_fire(s, {9, 9, 4, 4}, 7), std::invalid_argument);
}

TEST_CASE("default scenario: 100x100, uniform fuel 20, seed block") {
  FireState s = make_fire_state(100, 100, 10.0, {1.0, 0.0}, 5);
  seed_fire(s, {48, 48, 4, 4}, 20);
  CHECK(s.cell_count() == 10000);
  int burning = 0;
  for (auto b : s.burning) burning += b;
  CHECK(burning == 16);
  for (int f : s.fuel) CHECK(f == 20);
}

TEST_CASE("monotone fuel and quiescence") {
  IgnitionKernel k;
  FireState s = make_fire_state(20, 20, 10.0, {1.0, 0.0}, 77);
  seed_fire(s, {9, 9, 2, 2}, 5);
  FireState prev = s;
  for (int t = 0; t < 12; ++t) {
    FireState next = step_fire(prev, k);
    for (size_t i = 0; i < next.fuel.size(); ++i) {
      CHECK(next.fuel[i] <= prev.fuel[i]);
      CHECK(next.fuel[i] >= 0);
    }
    prev = std::move(next);
  }

  FireState cold = make_fire_state(4, 4, 10.0, {0, 0}, 3);
  std::fill(cold.fuel.begin(), cold.fuel.end(), 3);
  const FireState same = step_fire(cold, k);
  CHECK(same.fuel == cold.fuel);
  CHECK(same.burning == cold.burning);
}

TEST_CASE("Monte-Carlo ignition rate matches the closed form within 3 standard errors") {
  IgnitionKernel k;
  FireState base = make_fire_state(7, 7, 10.0, {0.8, 0.3}, 0);
  std::fill(base.fuel.begin(), base.fuel.end(), 10);
  base.burning[base.cell_index(3, 3)] = 1;
  base.burning[base.cell_index(4, 3)] = 1;
  base.burning[base.cell_index(3, 4)] = 1;

  const int trials = 20000;
  std::vector<int> counts(base.cell_count(), 0);
  for (int t = 0; t < trials; ++t) {
    FireState s = base;
    s.rng_seed = hash_u64(31337, uint64_t(t));
    const FireState next = step_fire(s, k);
    for (size_t c = 0; c < counts.size(); ++c) {
      if (!base.burning[c] && next.burning[c]) ++counts[c];
    }
  }
  for (size_t c = 0; c < counts.size(); ++c) {
    if (base.burning[c]) continue;
    const double p = ignition_probability(base, k, int(c));
    const double freq = double(counts[c]) / trials;
    const double se = std::sqrt(std::max(p * (1.0 - p), 1e-12) / trials);
    CAPTURE(c);
    CHECK(std::abs(freq - p) <= 3.0 * se + 1e-9);
  }
}

TEST_CASE("east wind skews growth eastward") {
  IgnitionKernel k;
  double east_total = 0.0, west_total = 0.0;
  for (uint64_t seed = 0; seed < 8; ++seed) {
    FireState s = make_fire_state(60, 60, 10.0, {1.5, 0.0}, hash_u64(9000, seed));
    seed_fire(s, {28, 28, 4, 4}, 20);
    for (int t = 0; t < 20; ++t) s = step_fire(s, k);
    int min_x = s.width, max_x = -1;
    for (int y = 0; y < s.height; ++y) {
      for (int x = 0; x < s.width; ++x) {
        const int idx = s.cell_index(x, y);
        if (s.burning[idx] || s.fuel[idx] < 20) {
          min_x = std::min(min_x, x);
          max_x = std::max(max_x, x);
        }
      }
    }
    east_total += max_x - 31;
    west_total += 28 - min_x;
  }
  CHECK(east_total > west_total);
}

TEST_CASE("identical seeds give identical trajectories") {
  IgnitionKernel k;
  auto run = [&]() {
    FireState s = make_fire_state(30, 30, 10.0, {1.0, 0.0}, 123456);
    seed_fire(s, {14, 14, 3, 3}, 8);
    for (int t = 0; t < 15; ++t) s = step_fire(s, k);
    return s;
  };
  const FireState a = run();
  const FireState b = run();
  CHECK(a.burning == b.burning);
  CHECK(a.fuel == b.fuel);
}
