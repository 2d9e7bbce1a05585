#include "wildfire/kernels.hpp"

#include <algorithm>
#include <cstring>
#include <vector>

namespace wildfire::kernels {
namespace {

// Copies the field into a zero-padded scratch so tap reads never branch.
// Returns the padded stride; pad is resized as needed.
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

void ignite_survival_scalar(const double* field, int width, int height, const Tap* taps,
                            int n_taps, double* out) {
  const size_t n = size_t(width) * height;
  std::fill(out, out + n, 1.0);
  if (n_taps == 0) return;

  thread_local std::vector<double> pad;
  const int radius = max_tap_radius(taps, n_taps);
  const int stride = pad_field(field, width, height, radius, pad);

  for (int t = 0; t < n_taps; ++t) {
    const double w = taps[t].weight;
    for (int y = 0; y < height; ++y) {
      const double* src = pad.data() + size_t(y + radius + taps[t].dy) * stride + radius + taps[t].dx;
      double* dst = out + size_t(y) * width;
      for (int x = 0; x < width; ++x) {
        dst[x] *= 1.0 - w * src[x];
      }
    }
  }
}

void fuel_shift_scalar(double* const* levels, int n_levels, const double* burn, int n) {
  if (n_levels < 2) return;
  double* f0 = levels[0];
  const double* f1 = levels[1];
  for (int i = 0; i < n; ++i) {
    f0[i] += f1[i] * burn[i];
  }
  for (int k = 1; k < n_levels - 1; ++k) {
    double* fk = levels[k];
    const double* fk1 = levels[k + 1];
    for (int i = 0; i < n; ++i) {
      fk[i] = fk[i] * (1.0 - burn[i]) + fk1[i] * burn[i];
    }
  }
  double* top = levels[n_levels - 1];
  for (int i = 0; i < n; ++i) {
    top[i] *= 1.0 - burn[i];
  }
}

void burn_update_scalar(double* burn, const double* fuel0, const double* rho, int n) {
  for (int i = 0; i < n; ++i) {
    const double b = burn[i];
    burn[i] = (1.0 - fuel0[i]) * ((1.0 - b) * rho[i] + b);
  }
}

void matvec_scalar(const float* w, const float* x, const float* bias, float* y, int rows,
                   int cols) {
  for (int r = 0; r < rows; ++r) {
    const float* row = w + size_t(r) * cols;
    float acc = 0.0f;
    for (int c = 0; c < cols; ++c) acc += row[c] * x[c];
    y[r] = acc + (bias ? bias[r] : 0.0f);
  }
}

void matvec_t_scalar(const float* w, const float* g, float* out, int rows, int cols) {
  std::fill(out, out + cols, 0.0f);
  for (int r = 0; r < rows; ++r) {
    const float* row = w + size_t(r) * cols;
    const float gr = g[r];
    for (int c = 0; c < cols; ++c) out[c] += gr * row[c];
  }
}

void rank1_acc_scalar(float* g_w, const float* g, const float* x, int rows, int cols) {
  for (int r = 0; r < rows; ++r) {
    float* row = g_w + size_t(r) * cols;
    const float gr = g[r];
    for (int c = 0; c < cols; ++c) row[c] += gr * x[c];
  }
}

void matmul_acc_scalar(const float* a, const float* b, float* c, int m, int k, int n) {
  for (int i = 0; i < m; ++i) {
    float* crow = c + size_t(i) * n;
    for (int p = 0; p < k; ++p) {
      const float aip = a[size_t(i) * k + p];
      const float* brow = b + size_t(p) * n;
      for (int j = 0; j < n; ++j) crow[j] += aip * brow[j];
    }
  }
}

void matmul_acc_nt_scalar(const float* a, const float* b, float* c, int m, int k, int n) {
  for (int i = 0; i < m; ++i) {
    const float* arow = a + size_t(i) * k;
    float* crow = c + size_t(i) * n;
    for (int j = 0; j < n; ++j) {
      const float* brow = b + size_t(j) * k;
      float acc = 0.0f;
      for (int p = 0; p < k; ++p) acc += arow[p] * brow[p];
      crow[j] += acc;
    }
  }
}

void matmul_acc_tn_scalar(const float* a, const float* b, float* c, int m, int k, int n) {
  for (int p = 0; p < k; ++p) {
    const float* arow = a + size_t(p) * m;
    const float* brow = b + size_t(p) * n;
    for (int i = 0; i < m; ++i) {
      const float aip = arow[i];
      float* crow = c + size_t(i) * n;
      for (int j = 0; j < n; ++j) crow[j] += aip * brow[j];
    }
  }
}

float dot_scalar(const float* a, const float* b, int n) {
  float acc = 0.0f;
  for (int i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_scalar(float alpha, const float* x, float* y, int n) {
  for (int i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void relu_scalar(const float* x, float* y, int n) {
  for (int i = 0; i < n; ++i) y[i] = x[i] > 0.0f ? x[i] : 0.0f;
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops = {
      ignite_survival_scalar, fuel_shift_scalar,     burn_update_scalar,
      matvec_scalar,          matvec_t_scalar,       rank1_acc_scalar,
      matmul_acc_scalar,      matmul_acc_nt_scalar,  matmul_acc_tn_scalar,
      dot_scalar,             axpy_scalar,           relu_scalar,
  };
  return ops;
}

}  // namespace wildfire::kernels
