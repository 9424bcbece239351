#include "banditforge/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace banditforge::kern {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sumsq_scalar(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * a[i];
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void chol_sweep_scalar(double* l, double* w, std::size_t n, double c,
                       double s) {
  const double inv_c = 1.0 / c;
  for (std::size_t i = 0; i < n; ++i) {
    const double li = (l[i] + s * w[i]) * inv_c;
    l[i] = li;
    w[i] = c * w[i] - s * li;
  }
}

constexpr Kernels kScalar = {
    "scalar", dot_scalar, sumsq_scalar, axpy_scalar, chol_sweep_scalar,
};

const Kernels& pick_active() {
  const char* env = std::getenv("BANDITFORGE_SIMD");
#if defined(BANDITFORGE_BUILD_AVX2)
  if (env != nullptr && std::strcmp(env, "scalar") == 0) return kScalar;
  if (avx2_supported()) return avx2();
  return kScalar;
#else
  (void)env;
  return kScalar;
#endif
}

}  // namespace

const Kernels& scalar() { return kScalar; }

const Kernels& active() {
  static const Kernels& chosen = pick_active();
  return chosen;
}

}  // namespace banditforge::kern
