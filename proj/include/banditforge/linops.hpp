#pragma once

// Incrementally maintained positive-definite matrix algebra behind the
// regularised least-squares statistics: V_t = V_{t-1} + x xᵀ starting from
// λI, with a cached Cholesky factor, running log-determinant, whitening and
// weighted norms.

#include <cstddef>
#include <cstdint>
#include <utility>

#include "banditforge/vecmat.hpp"

namespace banditforge {

// Symmetric positive-definite matrix with a cached Cholesky factor
// (entries = L Lᵀ) and running log-determinant. The factor is stored as
// U = Lᵀ, row-major, so the hot loops (column sweeps of the rank-one factor
// update, triangular solves) run over contiguous memory.
//
// After a rank-one addition the factor is updated in O(d²); a full
// refactorisation is forced every 256 updates to bound round-off drift, and
// on any update that loses positive definiteness.
class SpdMatrix {
 public:
  SpdMatrix() = default;

  // λI with λ > 0.
  static SpdMatrix scaled_identity(std::size_t dim, double lambda);

  std::size_t dim() const { return dim_; }
  const Matrix& entries() const { return entries_; }
  double log_det() const { return log_det_; }
  // Upper factor U with UᵀU = entries (U = Lᵀ for the lower factor L).
  const Matrix& factor_upper() const { return upper_; }

  // this += x xᵀ. Returns ‖x‖²_{V⁻¹} evaluated before the update (the
  // quantity by which log det grows: log det V' = log det V + log1p(that)).
  double add_outer(const Vec& x);

  // L⁻¹ v (forward substitution); ‖L⁻¹v‖² = ‖v‖²_{V⁻¹}.
  Vec solve_lower(const Vec& v) const;
  // L⁻ᵀ v (back substitution). This is the whitening transform.
  Vec solve_upper(const Vec& v) const;
  // V⁻¹ b via the factor.
  Vec solve(const Vec& b) const;
  // U v, so that ‖Uv‖² = vᵀ V v.
  Vec apply_upper(const Vec& v) const;

  void refactor();  // full Cholesky from entries; throws on failure

 private:
  std::size_t dim_ = 0;
  Matrix entries_;
  Matrix upper_;
  double log_det_ = 0.0;
  std::uint32_t updates_since_refactor_ = 0;
};

// whiten(m, v) = W v with W Wᵀ = m⁻¹. Realised as W = L⁻ᵀ, the triangular
// whitening transform. The symmetric root m^{-1/2} differs from W by an
// orthogonal factor only, so W η and m^{-1/2} η have the same law for any
// rotationally invariant η.
Vec whiten(const SpdMatrix& m, const Vec& v);

// (‖v‖_V, ‖v‖_{V⁻¹})
std::pair<double, double> weighted_norms(const SpdMatrix& m, const Vec& v);

// Running least-squares state: gram = V_t, response = Σ Y_i X_i,
// estimate = V_t⁻¹ response, step = t.
struct SufficientStats {
  SpdMatrix gram;
  Vec response;
  Vec estimate;
  std::int64_t step = 0;

  static SufficientStats initial(std::size_t dim, double lambda);
};

// V += x xᵀ, b += y x, estimate and log det refreshed, step incremented.
// Non-finite inputs are rejected.
SufficientStats rank_one_update(const SufficientStats& stats, const Vec& x,
                                double y);

}  // namespace banditforge
