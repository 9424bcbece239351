#pragma once

// Perturbation distributions η_t for randomised exploration, and Monte Carlo
// audits of their directional moment conditions:
//   1 ≤ E⟨u,η⟩² ≤ K²  and  E⟨u,η⟩⁴ ≤ K⁴  for all unit u.

#include <cstddef>

#include "banditforge/rng.hpp"
#include "banditforge/vecmat.hpp"

namespace banditforge {

enum class PerturbationKind { StandardGaussian, UniformSphere, ScaledGaussian };

struct PerturbationSpec {
  PerturbationKind kind = PerturbationKind::StandardGaussian;
  double sigma = 1.0;     // ScaledGaussian only
  double declared_K = 1.0;

  static PerturbationSpec standard_gaussian();
  // Uniform on the sphere of radius √d. The directional fourth moment is
  // 3d/(d+2), which exceeds 1 for d > 1, so K = 3^{1/4} is declared here
  // rather than 1; moment_report measures the actual values.
  static PerturbationSpec uniform_sphere();
  static PerturbationSpec scaled_gaussian(double sigma);  // sigma > 0
};

// One draw of η in dimension d. UniformSphere draws have norm exactly √d.
Vec sample(const PerturbationSpec& spec, std::size_t d, RngStream& rng);

struct MomentReport {
  double second_min = 0.0;
  double second_max = 0.0;
  double fourth_max = 0.0;
  double second_tol = 0.0;  // 5 Monte Carlo standard errors
  double fourth_tol = 0.0;
  bool pass = false;
};

// Estimates E⟨u,η⟩² and E⟨u,η⟩⁴ over n_directions random unit directions
// using n_samples shared draws. pass = (second_min ≥ 1 − tol) ∧
// (second_max ≤ K² + tol) ∧ (fourth_max ≤ K⁴ + tol), tolerances at 5 MC
// standard errors.
MomentReport moment_report(const PerturbationSpec& spec, std::size_t d,
                           int n_samples, int n_directions, RngStream& rng);

}  // namespace banditforge
