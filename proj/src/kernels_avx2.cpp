// AVX2+FMA kernel lane. This translation unit is the only one compiled with
// -mavx2 -mfma; callers reach it through kern::active() after the runtime
// CPU probe.

#include <immintrin.h>

#include "banditforge/kernels.hpp"

namespace banditforge::kern {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d h = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, h));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4),
                           acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sumsq_avx2(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(a + i);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i] * a[i];
  return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r =
        _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(y + i, r);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void chol_sweep_avx2(double* l, double* w, std::size_t n, double c, double s) {
  const __m256d vc = _mm256_set1_pd(c);
  const __m256d vs = _mm256_set1_pd(s);
  const __m256d vinv_c = _mm256_set1_pd(1.0 / c);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d wi = _mm256_loadu_pd(w + i);
    const __m256d li =
        _mm256_mul_pd(_mm256_fmadd_pd(vs, wi, _mm256_loadu_pd(l + i)), vinv_c);
    _mm256_storeu_pd(l + i, li);
    _mm256_storeu_pd(w + i, _mm256_fnmadd_pd(vs, li, _mm256_mul_pd(vc, wi)));
  }
  const double inv_c = 1.0 / c;
  for (; i < n; ++i) {
    const double li = (l[i] + s * w[i]) * inv_c;
    l[i] = li;
    w[i] = c * w[i] - s * li;
  }
}

constexpr Kernels kAvx2 = {
    "avx2", dot_avx2, sumsq_avx2, axpy_avx2, chol_sweep_avx2,
};

}  // namespace

const Kernels& avx2() { return kAvx2; }

bool avx2_supported() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

}  // namespace banditforge::kern
