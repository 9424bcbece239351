#pragma once

// Arithmetic inner-loop kernels. Each operation has a scalar reference
// implementation and, on x86-64, an AVX2+FMA variant; one lane is selected at
// process start. The scalar lane defines the semantics; vector lanes must
// agree with it to round-off (see tests/test_kernels.cpp).
//
// Lane selection: BANDITFORGE_SIMD=scalar|avx2|auto (default auto). Requesting
// an unavailable lane falls back to the best available one.

#include <cstddef>

namespace banditforge::kern {

struct Kernels {
  const char* name;

  // sum_i a[i]*b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // sum_i a[i]^2
  double (*sumsq)(const double* a, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // Elementwise column sweep of the positive rank-one Cholesky factor update:
  //   l[i] <- (l[i] + s*w[i]) / c;  w[i] <- c*w[i] - s*l[i](new)
  void (*chol_sweep)(double* l, double* w, std::size_t n, double c, double s);
};

const Kernels& scalar();

// Lane chosen for this process (CPU probe + BANDITFORGE_SIMD override).
const Kernels& active();

#if defined(BANDITFORGE_BUILD_AVX2)
const Kernels& avx2();
bool avx2_supported();
#endif

}  // namespace banditforge::kern
