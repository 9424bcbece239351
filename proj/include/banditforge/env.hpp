#pragma once

// Bandit environment and the act / reward / update interaction loop, with
// per-step regret accounting and optional diagnostics.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "banditforge/agents.hpp"

namespace banditforge {

enum class NoiseKind { Gaussian, Uniform };

// Ground truth. Gaussian(S) and Uniform(±S√3) noise are both exactly
// S-subgaussian. θ* must be nonzero (regret is undefined otherwise) with
// ‖θ*‖ ≤ R.
struct BanditInstance {
  Vec theta_star;
  ActionSet set;
  double S = 1.0;
  NoiseKind noise = NoiseKind::Gaussian;
  double R = 1.0;

  static BanditInstance make(Vec theta_star, ActionSet set, double S,
                             NoiseKind noise, double R);
};

struct StepRecord {
  std::int64_t t = 0;  // 1-based
  Vec x;
  double y = 0.0;
  double r = 0.0;     // instantaneous regret
  double beta = 0.0;  // β_{t-1} in force when the action was chosen
  bool coverage = false;  // θ* ∈ Θ_{t-1}
  std::optional<double> p_opt;  // optimism probability (diagnostics)
  double epl_term = 0.0;  // ‖x‖²_{V_t⁻¹} with the post-update V_t
  // |r_t − D_J(θ*, θ_t)| for randomised agents (diagnostics)
  std::optional<double> identity_residual;
};

struct TrialTrace {
  std::vector<StepRecord> records;
  std::uint64_t seed = 0;
  std::string config_summary;
};

struct Diagnostics {
  bool optimism = false;        // 512-sample estimate per step
  bool regret_identity = false;

  static Diagnostics all() { return {true, true}; }
};

double draw_reward(const BanditInstance& instance, const Vec& x,
                   RngStream& rng);

// J(θ*) − ⟨x, θ*⟩, clamped to 0 when within −1e-10 of it.
double instant_regret(const BanditInstance& instance, const Vec& x);

// ‖θ̂ − θ*‖_V ≤ β, boundary inclusive.
bool coverage_check(const AgentState& state, const Vec& theta_star);

// Runs the interaction loop for n steps. Deterministic in
// (instance, config, n, seed); diagnostics use a separate derived stream so
// enabling them does not change the actions taken.
TrialTrace run_trial(const BanditInstance& instance, const AgentConfig& config,
                     std::int64_t n, std::uint64_t seed,
                     Diagnostics diagnostics = {});

}  // namespace banditforge
