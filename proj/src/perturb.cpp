#include "banditforge/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace banditforge {

namespace {
// K = 3^{1/4}: the Gaussian directional fourth moment is 3, and the uniform
// sphere's is 3d/(d+2) < 3, so this one constant covers both.
const double kFourthRootThree = std::pow(3.0, 0.25);
}  // namespace

PerturbationSpec PerturbationSpec::standard_gaussian() {
  PerturbationSpec s;
  s.kind = PerturbationKind::StandardGaussian;
  s.declared_K = kFourthRootThree;
  return s;
}

PerturbationSpec PerturbationSpec::uniform_sphere() {
  PerturbationSpec s;
  s.kind = PerturbationKind::UniformSphere;
  s.declared_K = kFourthRootThree;
  return s;
}

PerturbationSpec PerturbationSpec::scaled_gaussian(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw Error("scaled gaussian: sigma must be positive");
  PerturbationSpec s;
  s.kind = PerturbationKind::ScaledGaussian;
  s.sigma = sigma;
  s.declared_K = std::max(1.0, kFourthRootThree * sigma);
  return s;
}

Vec sample(const PerturbationSpec& spec, std::size_t d, RngStream& rng) {
  if (d == 0) throw Error("perturbation sample: d must be positive");
  switch (spec.kind) {
    case PerturbationKind::StandardGaussian:
      return rng.gaussian_vec(d);
    case PerturbationKind::UniformSphere: {
      Vec v = rng.unit_vec(d);
      const double r = std::sqrt(static_cast<double>(d));
      for (auto& x : v) x *= r;
      return v;
    }
    case PerturbationKind::ScaledGaussian: {
      Vec v = rng.gaussian_vec(d);
      for (auto& x : v) x *= spec.sigma;
      return v;
    }
  }
  throw Error("perturbation sample: unreachable");
}

MomentReport moment_report(const PerturbationSpec& spec, std::size_t d,
                           int n_samples, int n_directions, RngStream& rng) {
  if (n_samples < 10000)
    throw Error("moment_report: needs at least 1e4 samples");
  if (n_directions < 1) throw Error("moment_report: needs a direction");

  std::vector<Vec> dirs;
  dirs.reserve(n_directions);
  for (int i = 0; i < n_directions; ++i) dirs.push_back(rng.unit_vec(d));

  // Shared draws across directions; per-direction running moments of ⟨u,η⟩.
  std::vector<double> m2(n_directions, 0.0), m4(n_directions, 0.0);
  std::vector<double> m4_sq(n_directions, 0.0), m8(n_directions, 0.0);
  for (int s = 0; s < n_samples; ++s) {
    const Vec eta = sample(spec, d, rng);
    for (int k = 0; k < n_directions; ++k) {
      const double z = dot(dirs[k], eta);
      const double z2 = z * z;
      const double z4 = z2 * z2;
      m2[k] += z2;
      m4[k] += z4;
      m4_sq[k] += z4;       // for Var(z²) = E z⁴ − (E z²)²
      m8[k] += z4 * z4;     // for Var(z⁴)
    }
  }

  MomentReport rep;
  rep.second_min = std::numeric_limits<double>::infinity();
  rep.second_max = -rep.second_min;
  rep.fourth_max = -rep.second_min;
  double se2_max = 0.0, se4_max = 0.0;
  const double n = static_cast<double>(n_samples);
  for (int k = 0; k < n_directions; ++k) {
    const double e2 = m2[k] / n;
    const double e4 = m4[k] / n;
    rep.second_min = std::min(rep.second_min, e2);
    rep.second_max = std::max(rep.second_max, e2);
    rep.fourth_max = std::max(rep.fourth_max, e4);
    const double var2 = std::max(0.0, m4_sq[k] / n - e2 * e2);
    const double var4 = std::max(0.0, m8[k] / n - e4 * e4);
    se2_max = std::max(se2_max, std::sqrt(var2 / n));
    se4_max = std::max(se4_max, std::sqrt(var4 / n));
  }
  rep.second_tol = 5.0 * se2_max;
  rep.fourth_tol = 5.0 * se4_max;

  const double k2 = spec.declared_K * spec.declared_K;
  rep.pass = rep.second_min >= 1.0 - rep.second_tol &&
             rep.second_max <= k2 + rep.second_tol &&
             rep.fourth_max <= k2 * k2 + rep.fourth_tol;
  return rep;
}

}  // namespace banditforge
