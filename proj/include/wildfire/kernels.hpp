#pragma once

#include <cstddef>

// Data-parallel inner loops used by the simulator, the particle filter, and
// the neural network. Every kernel has a scalar reference implementation and
// an AVX2 variant; the active backend is picked once at startup from CPUID
// and can be overridden with set_backend() or the WILDFIRE_SIMD environment
// variable ("scalar" / "avx2"). The two backends are equivalence-tested in
// tests/test_kernels.cpp.

namespace wildfire::kernels {

enum class Backend { Scalar, Avx2 };

const char* backend_name(Backend b);
bool backend_supported(Backend b);
Backend active_backend();
// Throws std::invalid_argument if the backend is not supported on this CPU.
void set_backend(Backend b);

// One neighbourhood contribution: field value at offset (dx, dy) scaled by
// weight. Offsets reaching outside the grid contribute nothing.
struct Tap {
  int dx = 0;
  int dy = 0;
  double weight = 0.0;
};

// out[c] = prod over taps of (1 - tap.weight * field[c + (dx, dy)]).
// field is a width*height row-major scalar map in [0, 1]; cells outside the
// grid read as 0. out may not alias field.
void ignite_survival(const double* field, int width, int height, const Tap* taps, int n_taps,
                     double* out);

// In-place shift of per-cell categorical fuel mass one level down where the
// cell burns: level 0 absorbs burn*level1, level k keeps (1-burn) of itself
// and gains burn of level k+1, the top level only drains. levels[k] is an
// array of n cells; total mass per cell is conserved.
void fuel_shift(double* const* levels, int n_levels, const double* burn, int n);

// burn[i] = (1 - fuel0[i]) * ((1 - burn[i]) * rho[i] + burn[i])
void burn_update(double* burn, const double* fuel0, const double* rho, int n);

// ---- float32 linear algebra for the Q-network ----

// y = W x + bias; W is rows x cols row-major.
void matvec(const float* w, const float* x, const float* bias, float* y, int rows, int cols);

// out = W^T g (overwrites out); W is rows x cols row-major.
void matvec_t(const float* w, const float* g, float* out, int rows, int cols);

// G += g x^T; G is rows x cols row-major.
void rank1_acc(float* g_w, const float* g, const float* x, int rows, int cols);

// C += A B; A is m x k, B is k x n, C is m x n, all row-major.
void matmul_acc(const float* a, const float* b, float* c, int m, int k, int n);

// C += A B^T; A is m x k, B is n x k, C is m x n, all row-major.
void matmul_acc_nt(const float* a, const float* b, float* c, int m, int k, int n);

// C += A^T B; A is k x m, B is k x n, C is m x n, all row-major.
void matmul_acc_tn(const float* a, const float* b, float* c, int m, int k, int n);

float dot(const float* a, const float* b, int n);

// y += alpha * x
void axpy(float alpha, const float* x, float* y, int n);

// y[i] = max(0, x[i])
void relu(const float* x, float* y, int n);

// Function-pointer table filled in by each backend.
struct Ops {
  void (*ignite_survival)(const double*, int, int, const Tap*, int, double*);
  void (*fuel_shift)(double* const*, int, const double*, int);
  void (*burn_update)(double*, const double*, const double*, int);
  void (*matvec)(const float*, const float*, const float*, float*, int, int);
  void (*matvec_t)(const float*, const float*, float*, int, int);
  void (*rank1_acc)(float*, const float*, const float*, int, int);
  void (*matmul_acc)(const float*, const float*, float*, int, int, int);
  void (*matmul_acc_nt)(const float*, const float*, float*, int, int, int);
  void (*matmul_acc_tn)(const float*, const float*, float*, int, int, int);
  float (*dot)(const float*, const float*, int);
  void (*axpy)(float, const float*, float*, int);
  void (*relu)(const float*, float*, int);
};

const Ops& scalar_ops();
#if defined(WILDFIRE_HAVE_AVX2)
const Ops& avx2_ops();
#endif

}  // namespace wildfire::kernels
