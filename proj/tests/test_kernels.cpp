#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "wildfire/kernels.hpp"
#include "wildfire/rng.hpp"

using namespace wildfire;
using kernels::Tap;

namespace {

std::vector<double> random_field(Rng& rng, size_t n, double lo = 0.0, double hi = 1.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

std::vector<float> random_floats(Rng& rng, size_t n, double lo = -1.0, double hi = 1.0) {
  std::vector<float> v(n);
  for (auto& x : v) x = float(rng.uniform(lo, hi));
  return v;
}

double rel_diff(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-30});
  return std::abs(a - b) / scale;
}

const bool have_avx2 = kernels::backend_supported(kernels::Backend::Avx2);

template <typename Fn>
void on_both_backends(Fn&& fn) {
  kernels::set_backend(kernels::Backend::Scalar);
  fn();
  if (have_avx2) {
    kernels::set_backend(kernels::Backend::Avx2);
    fn();
    kernels::set_backend(kernels::Backend::Scalar);
  }
}

}  // namespace

TEST_CASE("ignite_survival matches a naive per-cell product") {
  Rng rng(11);
  const int w = 23, h = 17;
  const auto field = random_field(rng, size_t(w) * h);
  std::vector<Tap> taps;
  for (int dy = -2; dy <= 2; ++dy) {
    for (int dx = -2; dx <= 2; ++dx) {
      if (dx == 0 && dy == 0) continue;
      taps.push_back({dx, dy, rng.uniform(0.0, 0.3)});
    }
  }

  std::vector<double> expected(size_t(w) * h, 1.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double prod = 1.0;
      for (const auto& t : taps) {
        const int nx = x + t.dx, ny = y + t.dy;
        if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
        prod *= 1.0 - t.weight * field[size_t(ny) * w + nx];
      }
      expected[size_t(y) * w + x] = prod;
    }
  }

  on_both_backends([&]() {
    std::vector<double> out(size_t(w) * h);
    kernels::ignite_survival(field.data(), w, h, taps.data(), int(taps.size()), out.data());
    for (size_t i = 0; i < out.size(); ++i) {
      CAPTURE(i);
      CHECK(rel_diff(out[i], expected[i]) < 1e-12);
    }
  });
}

TEST_CASE("ignite_survival: zero taps leaves the survival at one") {
  std::vector<double> field(12, 0.7);
  std::vector<double> out(12, -1.0);
  kernels::ignite_survival(field.data(), 4, 3, nullptr, 0, out.data());
  for (double v : out) CHECK(v == 1.0);
}

TEST_CASE("fuel_shift conserves mass and matches the recurrence") {
  Rng rng(22);
  const int n = 37, levels = 6;
  std::vector<std::vector<double>> fuel(levels);
  for (auto& plane : fuel) plane = random_field(rng, n);
  for (int i = 0; i < n; ++i) {
    double total = 0.0;
    for (auto& plane : fuel) total += plane[i];
    for (auto& plane : fuel) plane[i] /= total;
  }
  const auto burn = random_field(rng, n);

  std::vector<std::vector<double>> expected(levels, std::vector<double>(n));
  for (int i = 0; i < n; ++i) {
    expected[0][i] = fuel[0][i] + fuel[1][i] * burn[i];
    for (int k = 1; k < levels - 1; ++k) {
      expected[k][i] = fuel[k][i] * (1.0 - burn[i]) + fuel[k + 1][i] * burn[i];
    }
    expected[levels - 1][i] = fuel[levels - 1][i] * (1.0 - burn[i]);
  }

  on_both_backends([&]() {
    auto work = fuel;
    std::vector<double*> planes(levels);
    for (int k = 0; k < levels; ++k) planes[k] = work[k].data();
    kernels::fuel_shift(planes.data(), levels, burn.data(), n);
    for (int k = 0; k < levels; ++k) {
      for (int i = 0; i < n; ++i) {
        CHECK(rel_diff(work[k][i], expected[k][i]) < 1e-13);
      }
    }
    for (int i = 0; i < n; ++i) {
      double total = 0.0;
      for (int k = 0; k < levels; ++k) total += work[k][i];
      CHECK(std::abs(total - 1.0) < 1e-12);
    }
  });
}

TEST_CASE("burn_update elementwise formula") {
  Rng rng(33);
  const int n = 41;
  const auto fuel0 = random_field(rng, n);
  const auto rho = random_field(rng, n);
  const auto burn0 = random_field(rng, n);

  on_both_backends([&]() {
    auto burn = burn0;
    kernels::burn_update(burn.data(), fuel0.data(), rho.data(), n);
    for (int i = 0; i < n; ++i) {
      const double b = burn0[i];
      const double expect = (1.0 - fuel0[i]) * ((1.0 - b) * rho[i] + b);
      CHECK(rel_diff(burn[i], expect) < 1e-14);
      CHECK(burn[i] >= 0.0);
      CHECK(burn[i] <= 1.0);
    }
  });
}

TEST_CASE("float kernels agree with naive references") {
  Rng rng(44);
  const int rows = 19, cols = 29;
  const auto w = random_floats(rng, size_t(rows) * cols);
  const auto x = random_floats(rng, cols);
  const auto bias = random_floats(rng, rows);
  const auto g = random_floats(rng, rows);

  std::vector<float> y_ref(rows);
  for (int r = 0; r < rows; ++r) {
    double acc = bias[r];
    for (int c = 0; c < cols; ++c) acc += double(w[size_t(r) * cols + c]) * x[c];
    y_ref[r] = float(acc);
  }
  std::vector<float> xt_ref(cols, 0.0f);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) xt_ref[c] += g[r] * w[size_t(r) * cols + c];
  }

  on_both_backends([&]() {
    std::vector<float> y(rows);
    kernels::matvec(w.data(), x.data(), bias.data(), y.data(), rows, cols);
    for (int r = 0; r < rows; ++r) CHECK(rel_diff(y[r], y_ref[r]) < 1e-5);

    std::vector<float> xt(cols);
    kernels::matvec_t(w.data(), g.data(), xt.data(), rows, cols);
    for (int c = 0; c < cols; ++c) CHECK(rel_diff(xt[c], xt_ref[c]) < 1e-5);

    std::vector<float> gw(size_t(rows) * cols, 0.5f);
    kernels::rank1_acc(gw.data(), g.data(), x.data(), rows, cols);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        CHECK(rel_diff(gw[size_t(r) * cols + c], 0.5f + g[r] * x[c]) < 1e-5);
      }
    }

    double dot_ref = 0.0;
    for (int c = 0; c < cols; ++c) dot_ref += double(x[c]) * x[c];
    CHECK(rel_diff(kernels::dot(x.data(), x.data(), cols), dot_ref) < 1e-5);

    std::vector<float> ax = bias;
    kernels::axpy(0.25f, g.data(), ax.data(), rows);
    for (int r = 0; r < rows; ++r) CHECK(rel_diff(ax[r], bias[r] + 0.25f * g[r]) < 1e-5);

    std::vector<float> rl(rows);
    kernels::relu(g.data(), rl.data(), rows);
    for (int r = 0; r < rows; ++r) CHECK(rl[r] == (g[r] > 0.0f ? g[r] : 0.0f));
  });
}

TEST_CASE("matmul variants agree with triple loops") {
  Rng rng(55);
  const int m = 9, k = 13, n = 21;
  const auto a = random_floats(rng, size_t(m) * k);
  const auto b = random_floats(rng, size_t(k) * n);
  const auto bt = random_floats(rng, size_t(n) * k);
  const auto at = random_floats(rng, size_t(k) * m);

  std::vector<float> c_ref(size_t(m) * n, 0.0f);
  for (int i = 0; i < m; ++i)
    for (int p = 0; p < k; ++p)
      for (int j = 0; j < n; ++j)
        c_ref[size_t(i) * n + j] += a[size_t(i) * k + p] * b[size_t(p) * n + j];

  std::vector<float> cnt_ref(size_t(m) * n, 0.0f);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      for (int p = 0; p < k; ++p)
        cnt_ref[size_t(i) * n + j] += a[size_t(i) * k + p] * bt[size_t(j) * k + p];

  std::vector<float> ctn_ref(size_t(m) * n, 0.0f);
  for (int p = 0; p < k; ++p)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j)
        ctn_ref[size_t(i) * n + j] += at[size_t(p) * m + i] * b[size_t(p) * n + j];

  on_both_backends([&]() {
    std::vector<float> c(size_t(m) * n, 0.0f);
    kernels::matmul_acc(a.data(), b.data(), c.data(), m, k, n);
    for (size_t i = 0; i < c.size(); ++i) CHECK(rel_diff(c[i], c_ref[i]) < 1e-4);

    std::vector<float> cnt(size_t(m) * n, 0.0f);
    kernels::matmul_acc_nt(a.data(), bt.data(), cnt.data(), m, k, n);
    for (size_t i = 0; i < cnt.size(); ++i) CHECK(rel_diff(cnt[i], cnt_ref[i]) < 1e-4);

    std::vector<float> ctn(size_t(m) * n, 0.0f);
    kernels::matmul_acc_tn(at.data(), b.data(), ctn.data(), m, k, n);
    for (size_t i = 0; i < ctn.size(); ++i) CHECK(rel_diff(ctn[i], ctn_ref[i]) < 1e-4);
  });
}

TEST_CASE("avx2 backend matches the scalar reference") {
  if (!have_avx2) return;
  Rng rng(66);
  const int w = 61, h = 47;  // odd sizes exercise the vector tails
  const auto field = random_field(rng, size_t(w) * h);
  std::vector<Tap> taps;
  for (int dy = -3; dy <= 3; ++dy)
    for (int dx = -3; dx <= 3; ++dx)
      if (dx || dy) taps.push_back({dx, dy, rng.uniform(0.0, 0.2)});

  std::vector<double> scalar_out(size_t(w) * h), avx_out(size_t(w) * h);
  kernels::set_backend(kernels::Backend::Scalar);
  kernels::ignite_survival(field.data(), w, h, taps.data(), int(taps.size()), scalar_out.data());
  kernels::set_backend(kernels::Backend::Avx2);
  kernels::ignite_survival(field.data(), w, h, taps.data(), int(taps.size()), avx_out.data());
  kernels::set_backend(kernels::Backend::Scalar);

  for (size_t i = 0; i < scalar_out.size(); ++i) {
    CHECK(rel_diff(scalar_out[i], avx_out[i]) < 1e-13);
  }
}

TEST_CASE("backend dispatch") {
  CHECK(kernels::backend_supported(kernels::Backend::Scalar));
  kernels::set_backend(kernels::Backend::Scalar);
  CHECK(kernels::active_backend() == kernels::Backend::Scalar);
  if (have_avx2) {
    kernels::set_backend(kernels::Backend::Avx2);
    CHECK(kernels::active_backend() == kernels::Backend::Avx2);
    kernels::set_backend(kernels::Backend::Scalar);
  } else {
    CHECK_THROWS_AS(kernels::set_backend(kernels::Backend::Avx2), std::invalid_argument);
  }
  CHECK(std::string(kernels::backend_name(kernels::Backend::Avx2)) == "avx2");
}
