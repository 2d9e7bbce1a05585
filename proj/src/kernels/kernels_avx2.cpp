#include "wildfire/kernels.hpp"

#if defined(WILDFIRE_HAVE_AVX2)

#include <immintrin.h>

#include <algorithm>
#include <cstring>
#include <vector>

namespace wildfire::kernels {
namespace {

int pad_field(const double* field, int width, int height, int radius, std::vector<double>& pad) {
  const int stride = width + 2 * radius;
  pad.assign(size_t(stride) * (height + 2 * radius), 0.0);
  for (int y = 0; y < height; ++y) {
    std::memcpy(pad.data() + size_t(y + radius) * stride + radius, field + size_t(y) * width,
                sizeof(double) * width);
  }
  return stride;
}

int max_tap_radius(const Tap* taps, int n_taps) {
  int r = 0;
  for (int t = 0; t < n_taps; ++t) {
    r = std::max({r, std::abs(taps[t].dx), std::abs(taps[t].dy)});
  }
  return r;
}

void ignite_survival_avx2(const double* field, int width, int height, const Tap* taps, int n_taps,
                          double* out) {
  const size_t n = size_t(width) * height;
  std::fill(out, out + n, 1.0);
  if (n_taps == 0) return;

  thread_local std::vector<double> pad;
  const int radius = max_tap_radius(taps, n_taps);
  const int stride = pad_field(field, width, height, radius, pad);

  const __m256d ones = _mm256_set1_pd(1.0);
  for (int t = 0; t < n_taps; ++t) {
    const __m256d w = _mm256_set1_pd(taps[t].weight);
    for (int y = 0; y < height; ++y) {
      const double* src = pad.data() + size_t(y + radius + taps[t].dy) * stride + radius + taps[t].dx;
      double* dst = out + size_t(y) * width;
      int x = 0;
      for (; x + 4 <= width; x += 4) {
        const __m256d f = _mm256_loadu_pd(src + x);
        const __m256d factor = _mm256_fnmadd_pd(w, f, ones);  // 1 - w*f
        _mm256_storeu_pd(dst + x, _mm256_mul_pd(_mm256_loadu_pd(dst + x), factor));
      }
      for (; x < width; ++x) {
        dst[x] *= 1.0 - taps[t].weight * src[x];
      }
    }
  }
}

void fuel_shift_avx2(double* const* levels, int n_levels, const double* burn, int n) {
  if (n_levels < 2) return;
  const __m256d ones = _mm256_set1_pd(1.0);

  double* f0 = levels[0];
  const double* f1 = levels[1];
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d b = _mm256_loadu_pd(burn + i);
    const __m256d v = _mm256_fmadd_pd(_mm256_loadu_pd(f1 + i), b, _mm256_loadu_pd(f0 + i));
    _mm256_storeu_pd(f0 + i, v);
  }
  for (; i < n; ++i) f0[i] += f1[i] * burn[i];

  for (int k = 1; k < n_levels - 1; ++k) {
    double* fk = levels[k];
    const double* fk1 = levels[k + 1];
    i = 0;
    for (; i + 4 <= n; i += 4) {
      const __m256d b = _mm256_loadu_pd(burn + i);
      const __m256d keep = _mm256_sub_pd(ones, b);
      const __m256d v = _mm256_fmadd_pd(_mm256_loadu_pd(fk1 + i), b,
                                        _mm256_mul_pd(_mm256_loadu_pd(fk + i), keep));
      _mm256_storeu_pd(fk + i, v);
    }
    for (; i < n; ++i) fk[i] = fk[i] * (1.0 - burn[i]) + fk1[i] * burn[i];
  }

  double* top = levels[n_levels - 1];
  i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d keep = _mm256_sub_pd(ones, _mm256_loadu_pd(burn + i));
    _mm256_storeu_pd(top + i, _mm256_mul_pd(_mm256_loadu_pd(top + i), keep));
  }
  for (; i < n; ++i) top[i] *= 1.0 - burn[i];
}

void burn_update_avx2(double* burn, const double* fuel0, const double* rho, int n) {
  const __m256d ones = _mm256_set1_pd(1.0);
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d b = _mm256_loadu_pd(burn + i);
    const __m256d r = _mm256_loadu_pd(rho + i);
    const __m256d grown = _mm256_fmadd_pd(_mm256_sub_pd(ones, b), r, b);
    const __m256d alive = _mm256_sub_pd(ones, _mm256_loadu_pd(fuel0 + i));
    _mm256_storeu_pd(burn + i, _mm256_mul_pd(alive, grown));
  }
  for (; i < n; ++i) {
    const double b = burn[i];
    burn[i] = (1.0 - fuel0[i]) * ((1.0 - b) * rho[i] + b);
  }
}

inline float hsum(__m256 v) {
  __m128 lo = _mm256_castps256_ps128(v);
  __m128 hi = _mm256_extractf128_ps(v, 1);
  lo = _mm_add_ps(lo, hi);
  lo = _mm_hadd_ps(lo, lo);
  lo = _mm_hadd_ps(lo, lo);
  return _mm_cvtss_f32(lo);
}

inline float dot_row(const float* a, const float* b, int n) {
  __m256 acc = _mm256_setzero_ps();
  int i = 0;
  for (; i + 8 <= n; i += 8) {
    acc = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), acc);
  }
  float s = hsum(acc);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

inline void axpy_row(float alpha, const float* x, float* y, int n) {
  const __m256 a = _mm256_set1_ps(alpha);
  int i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_ps(y + i, _mm256_fmadd_ps(a, _mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void matvec_avx2(const float* w, const float* x, const float* bias, float* y, int rows, int cols) {
  for (int r = 0; r < rows; ++r) {
    y[r] = dot_row(w + size_t(r) * cols, x, cols) + (bias ? bias[r] : 0.0f);
  }
}

void matvec_t_avx2(const float* w, const float* g, float* out, int rows, int cols) {
  std::fill(out, out + cols, 0.0f);
  for (int r = 0; r < rows; ++r) {
    axpy_row(g[r], w + size_t(r) * cols, out, cols);
  }
}

void rank1_acc_avx2(float* g_w, const float* g, const float* x, int rows, int cols) {
  for (int r = 0; r < rows; ++r) {
    axpy_row(g[r], x, g_w + size_t(r) * cols, cols);
  }
}

void matmul_acc_avx2(const float* a, const float* b, float* c, int m, int k, int n) {
  for (int i = 0; i < m; ++i) {
    float* crow = c + size_t(i) * n;
    for (int p = 0; p < k; ++p) {
      axpy_row(a[size_t(i) * k + p], b + size_t(p) * n, crow, n);
    }
  }
}

void matmul_acc_nt_avx2(const float* a, const float* b, float* c, int m, int k, int n) {
  for (int i = 0; i < m; ++i) {
    const float* arow = a + size_t(i) * k;
    float* crow = c + size_t(i) * n;
    for (int j = 0; j < n; ++j) {
      crow[j] += dot_row(arow, b + size_t(j) * k, k);
    }
  }
}

void matmul_acc_tn_avx2(const float* a, const float* b, float* c, int m, int k, int n) {
  for (int p = 0; p < k; ++p) {
    const float* arow = a + size_t(p) * m;
    const float* brow = b + size_t(p) * n;
    for (int i = 0; i < m; ++i) {
      axpy_row(arow[i], brow, c + size_t(i) * n, n);
    }
  }
}

float dot_avx2(const float* a, const float* b, int n) { return dot_row(a, b, n); }

void axpy_avx2(float alpha, const float* x, float* y, int n) { axpy_row(alpha, x, y, n); }

void relu_avx2(const float* x, float* y, int n) {
  const __m256 zero = _mm256_setzero_ps();
  int i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_ps(y + i, _mm256_max_ps(_mm256_loadu_ps(x + i), zero));
  }
  for (; i < n; ++i) y[i] = x[i] > 0.0f ? x[i] : 0.0f;
}

}  // namespace

const Ops& avx2_ops() {
  static const Ops ops = {
      ignite_survival_avx2, fuel_shift_avx2,     burn_update_avx2,
      matvec_avx2,          matvec_t_avx2,       rank1_acc_avx2,
      matmul_acc_avx2,      matmul_acc_nt_avx2,  matmul_acc_tn_avx2,
      dot_avx2,             axpy_avx2,           relu_avx2,
  };
  return ops;
}

}  // namespace wildfire::kernels

#endif  // WILDFIRE_HAVE_AVX2
