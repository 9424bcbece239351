#include "banditforge/env.hpp"

#include <cmath>
#include <sstream>

namespace banditforge {

namespace {
constexpr std::uint64_t kDiagSalt = 0xD1A6ULL;
constexpr int kOptimismSamples = 512;
}  // namespace

BanditInstance BanditInstance::make(Vec theta_star, ActionSet set, double S,
                                    NoiseKind noise, double R) {
  require_finite(theta_star, "theta_star");
  if (theta_star.size() != set.dim())
    throw Error("bandit instance: theta_star dimension mismatch");
  const double nrm = norm2(theta_star);
  if (nrm == 0.0) throw Error("bandit instance: theta_star must be nonzero");
  if (!(R > 0.0)) throw Error("bandit instance: R must be positive");
  if (nrm > R * (1.0 + 1e-12))
    throw Error("bandit instance: theta_star exceeds the parameter bound R");
  if (!(S >= 0.0)) throw Error("bandit instance: S must be nonnegative");
  return BanditInstance{std::move(theta_star), std::move(set), S, noise, R};
}

double draw_reward(const BanditInstance& instance, const Vec& x,
                   RngStream& rng) {
  const double mean = dot(x, instance.theta_star);
  switch (instance.noise) {
    case NoiseKind::Gaussian:
      return mean + instance.S * rng.gaussian();
    case NoiseKind::Uniform: {
      // Uniform on ±S√3: variance S², and exactly S-subgaussian.
      const double half_width = instance.S * std::sqrt(3.0);
      return mean + rng.uniform(-half_width, half_width);
    }
  }
  return mean;
}

double instant_regret(const BanditInstance& instance, const Vec& x) {
  const double best = support_value(instance.set, instance.theta_star);
  double r = best - dot(x, instance.theta_star);
  if (r < 0.0) {
    if (r < -1e-10)
      throw Error("instant_regret: action beats the support value");
    r = 0.0;
  }
  return r;
}

bool coverage_check(const AgentState& state, const Vec& theta_star) {
  const Vec diff = sub(state.stats.estimate, theta_star);
  const auto [v_norm, _] = weighted_norms(state.stats.gram, diff);
  return v_norm <= state.beta;
}

TrialTrace run_trial(const BanditInstance& instance, const AgentConfig& config,
                     std::int64_t n, std::uint64_t seed,
                     Diagnostics diagnostics) {
  if (n < 0) throw Error("run_trial: horizon must be nonnegative");
  const std::size_t d = instance.set.dim();

  RngStream stream(seed);
  RngStream diag_stream(splitmix64(seed ^ kDiagSalt));

  AgentState state = make_agent(config, d, &instance.set);
  const bool randomised = std::holds_alternative<RandomisedCfg>(config.kind);

  TrialTrace trace;
  trace.seed = seed;
  {
    std::ostringstream os;
    os << config.kind_name() << " d=" << d << " n=" << n
       << " lambda=" << config.lambda << " delta=" << config.delta;
    trace.config_summary = os.str();
  }
  trace.records.reserve(static_cast<std::size_t>(n));

  for (std::int64_t t = 1; t <= n; ++t) {
    try {
      StepRecord rec;
      rec.t = t;
      rec.beta = state.beta;
      rec.coverage = coverage_check(state, instance.theta_star);
      if (diagnostics.optimism && randomised) {
        rec.p_opt = optimism_prob(state, instance.set, instance.theta_star,
                                  kOptimismSamples, diag_stream)
                        .p_hat;
      }

      const RandomisedDraw draw = act(state, instance.set, stream);
      rec.x = draw.action;
      rec.y = draw_reward(instance, rec.x, stream);
      rec.r = instant_regret(instance, rec.x);
      if (diagnostics.regret_identity && randomised && !draw.theta.empty()) {
        const double dj = bregman(instance.set, BregmanMode::J,
                                  instance.theta_star, draw.theta);
        rec.identity_residual = std::fabs(rec.r - dj);
      }

      state = update(state, rec.x, rec.y);
      const auto [_, inv_norm] = weighted_norms(state.stats.gram, rec.x);
      rec.epl_term = inv_norm * inv_norm;

      trace.records.push_back(std::move(rec));
    } catch (const Error& e) {
      throw Error("step " + std::to_string(t) + ": " + e.what());
    }
  }
  return trace;
}

}  // namespace banditforge
