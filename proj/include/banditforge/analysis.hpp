#pragma once

// Post-hoc statistics: regret scaling fits, Monte Carlo validators for the
// concentration lemmas, and trace aggregation.

#include <cstdint>
#include <functional>
#include <vector>

#include "banditforge/env.hpp"
#include "banditforge/rng.hpp"

namespace banditforge {

struct ScalingPoint {
  std::int64_t n = 0;
  double mean = 0.0;
  double se = 0.0;
};

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<ScalingPoint> grid;
};

// Least-squares line through (log n, log mean R_n) at the checkpoints.
// Checkpoints with nonpositive mean regret are dropped; fewer than two
// surviving points is an error.
ScalingFit slope_fit(const std::vector<TrialTrace>& traces,
                     const std::vector<std::int64_t>& checkpoints);

// Slope of log mean R_n against log d; needs ≥ 3 dimensions.
double dimension_fit(const std::vector<std::pair<int, double>>& results);

// Bounded martingale-difference generator: |value| ≤ c given the history.
using MdsGen = std::function<double(RngStream&, std::int64_t t)>;
// Adapted nonnegative bounded generator: value in [0, R], with its
// conditional mean given the history.
struct AdaptedSample {
  double value = 0.0;
  double cond_mean = 0.0;
};
using AdaptedGen = std::function<AdaptedSample(RngStream&, std::int64_t t)>;

MdsGen rademacher_gen(double c);
MdsGen zero_mds_gen();
AdaptedGen bernoulli_gen(double p);
AdaptedGen constant_gen(double v);

// Fraction of trials on which (Σ_{t≤n'} ξ_t)² ≥ 2(c²n'+1)log(√(c²n'+1)/δ)
// for some n' ≤ n. The bound holds with probability ≥ 1−δ.
double mds_bound_mc(const MdsGen& gen, double c, std::int64_t n,
                    std::int64_t trials, double delta, RngStream& rng);

// Fraction of trials on which Σα_t < (1−1/e)ΣE[α_t|F_{t-1}] − R log(1/δ)
// for some prefix. The bound holds with probability ≥ 1−δ.
double nonneg_bound_mc(const AdaptedGen& gen, double R, std::int64_t n,
                       std::int64_t trials, double delta, RngStream& rng);

struct AggregateCurves {
  std::vector<double> mean;  // cumulative regret, pointwise over t
  std::vector<double> q10;
  std::vector<double> q90;
  std::vector<double> se;
};

// Pointwise mean / 10–90 quantiles / standard error of cumulative regret.
// All traces must share one horizon. Permutation invariant (bit-exact).
AggregateCurves aggregate(const std::vector<TrialTrace>& traces);

}  // namespace banditforge
