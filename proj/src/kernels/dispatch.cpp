#include "wildfire/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <string>

namespace wildfire::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(WILDFIRE_HAVE_AVX2) && defined(__GNUC__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend pick_default() {
  if (const char* env = std::getenv("WILDFIRE_SIMD")) {
    if (std::strcmp(env, "scalar") == 0) return Backend::Scalar;
    if (std::strcmp(env, "avx2") == 0 && backend_supported(Backend::Avx2)) return Backend::Avx2;
  }
  return backend_supported(Backend::Avx2) ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> backend{pick_default()};
  return backend;
}

const Ops& ops_for(Backend b) {
#if defined(WILDFIRE_HAVE_AVX2)
  if (b == Backend::Avx2) return avx2_ops();
#endif
  (void)b;
  return scalar_ops();
}

const Ops& ops() { return ops_for(current().load(std::memory_order_relaxed)); }

}  // namespace

const char* backend_name(Backend b) { return b == Backend::Avx2 ? "avx2" : "scalar"; }

bool backend_supported(Backend b) {
  if (b == Backend::Scalar) return true;
  return cpu_has_avx2();
}

Backend active_backend() { return current().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
  if (!backend_supported(b)) {
    throw std::invalid_argument(std::string("SIMD backend not supported on this CPU: ") +
                                backend_name(b));
  }
  current().store(b, std::memory_order_relaxed);
}

void ignite_survival(const double* field, int width, int height, const Tap* taps, int n_taps,
                     double* out) {
  ops().ignite_survival(field, width, height, taps, n_taps, out);
}

void fuel_shift(double* const* levels, int n_levels, const double* burn, int n) {
  ops().fuel_shift(levels, n_levels, burn, n);
}

void burn_update(double* burn, const double* fuel0, const double* rho, int n) {
  ops().burn_update(burn, fuel0, rho, n);
}

void matvec(const float* w, const float* x, const float* bias, float* y, int rows, int cols) {
  ops().matvec(w, x, bias, y, rows, cols);
}

void matvec_t(const float* w, const float* g, float* out, int rows, int cols) {
  ops().matvec_t(w, g, out, rows, cols);
}

void rank1_acc(float* g_w, const float* g, const float* x, int rows, int cols) {
  ops().rank1_acc(g_w, g, x, rows, cols);
}

void matmul_acc(const float* a, const float* b, float* c, int m, int k, int n) {
  ops().matmul_acc(a, b, c, m, k, n);
}

void matmul_acc_nt(const float* a, const float* b, float* c, int m, int k, int n) {
  ops().matmul_acc_nt(a, b, c, m, k, n);
}

void matmul_acc_tn(const float* a, const float* b, float* c, int m, int k, int n) {
  ops().matmul_acc_tn(a, b, c, m, k, n);
}

float dot(const float* a, const float* b, int n) { return ops().dot(a, b, n); }

void axpy(float alpha, const float* x, float* y, int n) { ops().axpy(alpha, x, y, n); }

void relu(const float* x, float* y, int n) { ops().relu(x, y, n); }

}  // namespace wildfire::kernels
