#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "banditforge/kernels.hpp"
#include "banditforge/rng.hpp"

using namespace banditforge;

namespace {

Vec random_vec(RngStream& rng, std::size_t n) {
  Vec v(n);
  for (auto& x : v) x = rng.gaussian();
  return v;
}

void check_lane_agreement(const kern::Kernels& a, const kern::Kernels& b) {
  RngStream rng(42);
  // Odd lengths exercise the vector tails.
  for (std::size_t n : {0UL, 1UL, 3UL, 4UL, 7UL, 8UL, 17UL, 64UL, 129UL}) {
    const Vec x = random_vec(rng, n);
    const Vec y = random_vec(rng, n);

    const double da = a.dot(x.data(), y.data(), n);
    const double db = b.dot(x.data(), y.data(), n);
    CHECK(std::fabs(da - db) <=
          1e-13 * (1.0 + std::fabs(da)) * static_cast<double>(n + 1));

    const double sa = a.sumsq(x.data(), n);
    const double sb = b.sumsq(x.data(), n);
    CHECK(std::fabs(sa - sb) <= 1e-13 * (1.0 + sa) * static_cast<double>(n + 1));

    Vec ya = y, yb = y;
    a.axpy(0.7, x.data(), ya.data(), n);
    b.axpy(0.7, x.data(), yb.data(), n);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(std::fabs(ya[i] - yb[i]) <= 1e-14 * (1.0 + std::fabs(ya[i])));

    Vec la = x, lb = x, wa = y, wb = y;
    const double c = 1.25, s = 0.3;
    a.chol_sweep(la.data(), wa.data(), n, c, s);
    b.chol_sweep(lb.data(), wb.data(), n, c, s);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::fabs(la[i] - lb[i]) <= 1e-13 * (1.0 + std::fabs(la[i])));
      CHECK(std::fabs(wa[i] - wb[i]) <= 1e-13 * (1.0 + std::fabs(wa[i])));
    }
  }
}

}  // namespace

TEST_CASE("scalar kernels match plain formulas") {
  const auto& k = kern::scalar();
  const Vec a = {1.0, 2.0, 3.0};
  const Vec b = {4.0, -5.0, 6.0};
  CHECK(k.dot(a.data(), b.data(), 3) == doctest::Approx(4.0 - 10.0 + 18.0));
  CHECK(k.sumsq(a.data(), 3) == doctest::Approx(14.0));

  Vec y = b;
  k.axpy(2.0, a.data(), y.data(), 3);
  CHECK(y[0] == doctest::Approx(6.0));
  CHECK(y[1] == doctest::Approx(-1.0));
  CHECK(y[2] == doctest::Approx(12.0));
}

TEST_CASE("chol_sweep semantics") {
  const auto& k = kern::scalar();
  Vec l = {2.0, 1.0};
  Vec w = {0.5, -0.25};
  const double c = 1.5, s = 0.5;
  Vec l2 = l, w2 = w;
  k.chol_sweep(l2.data(), w2.data(), 2, c, s);
  for (std::size_t i = 0; i < 2; ++i) {
    const double li = (l[i] + s * w[i]) / c;
    CHECK(l2[i] == doctest::Approx(li).epsilon(1e-15));
    CHECK(w2[i] == doctest::Approx(c * w[i] - s * li).epsilon(1e-15));
  }
}

#if defined(BANDITFORGE_BUILD_AVX2)
TEST_CASE("avx2 lane agrees with scalar lane") {
  if (!kern::avx2_supported()) return;  // nothing to compare on this host
  check_lane_agreement(kern::scalar(), kern::avx2());
}
#endif

TEST_CASE("active lane agrees with scalar lane") {
  check_lane_agreement(kern::scalar(), kern::active());
}
