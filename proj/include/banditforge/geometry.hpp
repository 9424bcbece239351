#pragma once

// Action sets and their support-function machinery: J_X(θ) = max_{x∈X}⟨x,θ⟩
// with argmax oracle (= ∇J_X where unique), Bregman divergences of J and J²,
// and Monte Carlo probes of the strong-convexity / smoothness moduli of J².

#include <cstddef>
#include <memory>
#include <vector>

#include "banditforge/rng.hpp"
#include "banditforge/vecmat.hpp"

namespace banditforge {

enum class SetKind { L2Ball, LqBall, Transformed, Finite };

class ActionSet {
 public:
  // Unit Euclidean ball.
  static ActionSet l2_ball(std::size_t dim);
  // Unit ℓq ball, q in [1.01, 100] (exponent arithmetic overflows outside).
  static ActionSet lq_ball(std::size_t dim, double q);
  // {x : A x ∈ inner}. A must be supplied with its explicit inverse;
  // A·A⁻¹ ≈ I is checked, and sampled boundary members must stay inside the
  // unit Euclidean ball.
  static ActionSet transformed(Matrix a, Matrix a_inv, ActionSet inner);
  // Explicit nonempty point list; duplicates removed. Every point must lie in
  // the unit Euclidean ball. Argmax ties break to the lowest index.
  static ActionSet finite(std::vector<Vec> points);

  SetKind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  double q() const { return q_; }
  const Matrix& transform() const { return a_; }
  const Matrix& transform_inv() const { return a_inv_; }
  const ActionSet& inner() const { return *inner_; }
  const std::vector<Vec>& points() const { return points_; }

  // Distance-like residual: 0 for members, > 0 outside.
  double membership_residual(const Vec& x) const;
  // Minkowski gauge (positively homogeneous, 1 on the boundary). Not defined
  // for finite sets.
  double gauge(const Vec& x) const;

 private:
  ActionSet() = default;
  SetKind kind_ = SetKind::L2Ball;
  std::size_t dim_ = 0;
  double q_ = 2.0;
  Matrix a_, a_inv_;
  std::shared_ptr<const ActionSet> inner_;
  std::vector<Vec> points_;
};

struct SupportEval {
  double value = 0.0;  // J_X(θ)
  Vec maximizer;       // argmax x, = ∇J_X(θ) where unique
};

// Throws DegenerateDirection for θ = 0.
SupportEval support(const ActionSet& set, const Vec& theta);

// J value only; 0 at θ = 0 (where the argmax, not the value, degenerates).
double support_value(const ActionSet& set, const Vec& theta);

enum class BregmanMode { J, JSquared };

// D_J(θa, θb) or D_{J²}(θa, θb); θb must be nonzero. Nonnegative; round-off
// below 1e-12 is clamped to 0.
double bregman(const ActionSet& set, BregmanMode mode, const Vec& theta_a,
               const Vec& theta_b);

// The norm ⦀·⦀ against which the moduli of J² are probed.
enum class NormKind { Euclidean, Lp, Transformed };

class NormSpec {
 public:
  static NormSpec euclidean();
  static NormSpec lp(double p);  // p > 1
  // Norm matched to ActionSet::transformed(A, ...): ⦀x⦀ = inner(A⁻ᵀ x).
  // (J of the transformed set is J_inner ∘ A⁻ᵀ, so this is the norm under
  // which the inner set's moduli carry over unchanged.)
  static NormSpec transformed(Matrix a, Matrix a_inv, NormSpec inner);

  double operator()(const Vec& x) const;
  NormKind kind() const { return kind_; }

 private:
  NormSpec() = default;
  NormKind kind_ = NormKind::Euclidean;
  double p_ = 2.0;
  Matrix a_, a_inv_;
  std::shared_ptr<const NormSpec> inner_;
};

struct ProbeResult {
  double ratio_min = 0.0;
  double ratio_max = 0.0;
};

// Samples pairs θ, θ′ from the annulus 0.1 ≤ ‖θ‖ ≤ 2 (resampling pairs closer
// than 1e-3) and brackets D_{J²}(θ,θ′) / ⦀θ−θ′⦀². For an m-strongly-convex,
// M-smooth J² the returned range lies inside [m, M].
ProbeResult convexity_probe(const ActionSet& set, const NormSpec& norm,
                            int n_pairs, RngStream& rng);

}  // namespace banditforge
