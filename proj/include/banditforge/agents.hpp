#pragma once

// Action-selection policies over a shared least-squares state:
//  - randomised exploration  θ_t = θ̂ + s·V^{-1/2}η,  X_t = argmax⟨x, θ_t⟩
//  - OFUL-style optimism     max_x ⟨x, θ̂⟩ + β‖x‖_{V⁻¹}
//  - phased explore-then-commit over a fixed independent basis
//  - uniform random directions

#include <cstdint>
#include <optional>
#include <variant>

#include "banditforge/geometry.hpp"
#include "banditforge/linops.hpp"
#include "banditforge/perturb.hpp"
#include "banditforge/rng.hpp"

namespace banditforge {

struct RandomisedCfg {
  PerturbationSpec perturbation = PerturbationSpec::standard_gaussian();
  double inflation = 1.0;  // multiplier on the whitened perturbation, ≥ 1
};

struct OfulCfg {
  int restarts = 16;
  int iters = 200;
};

struct PhasedEtcCfg {};
struct UniformRandomCfg {};

using AgentKind =
    std::variant<RandomisedCfg, OfulCfg, PhasedEtcCfg, UniformRandomCfg>;

struct AgentConfig {
  AgentKind kind = RandomisedCfg{};
  double lambda = 1.0;  // > 0; values below 1 draw a one-time warning
  double delta = 0.05;  // in (0,1)
  double R = 1.0;       // ‖θ*‖ ≤ R
  double S = 1.0;       // subgaussian reward scale, ≥ 0

  const char* kind_name() const;
};

// Explore/exploit bookkeeping for the phased agent. The schedule itself is a
// pure function of the step count; only the action frozen at the start of the
// current exploitation phase needs caching.
struct PhasedBookkeeping {
  std::vector<Vec> basis;
  Vec committed;
  int committed_phase = -1;
};

// Position in the phased schedule: exploration rounds of d steps interleaved
// with exploitation phases of length 2, 4, 8, ...
struct PhasedSegment {
  bool exploring = true;
  int phase = 1;        // 1-based
  std::int64_t pos = 0; // index within the segment
};
PhasedSegment phased_locate(std::int64_t step, std::size_t d);

struct AgentState {
  SufficientStats stats;
  double beta = 0.0;  // current confidence width β_t
  AgentConfig config;
  PhasedBookkeeping phased;
};

// β_t = R√λ + S√(2 log(1/δ) + log(det V_t / λ^d)), from the cached log det.
double beta_width(const SufficientStats& stats, const AgentConfig& config);

// Validates the config and builds the step-0 state. `set` is required for the
// phased agent (its exploration basis comes from the support maximizers of
// ±e_1..±e_d, greedily deduplicated to d independent directions).
AgentState make_agent(const AgentConfig& config, std::size_t dim,
                      const ActionSet* set = nullptr);

struct RandomisedDraw {
  Vec action;
  Vec theta;  // the sampled parameter
};

// θ_t = estimate + inflation·whiten(V, η); action = support maximizer.
// θ_t = 0 (probability zero) is resampled once, then falls back to a fixed
// member of the set.
RandomisedDraw act_randomised(const AgentState& state, const ActionSet& set,
                              RngStream& rng);

// Approximate maximizer of ⟨x, θ̂⟩ + β‖x‖_{V⁻¹} over the set. Finite sets are
// scanned exactly; smooth sets use projected-gradient ascent from `restarts`
// boundary starts (the θ̂-greedy point is always among the candidates).
Vec act_oful(const AgentState& state, const ActionSet& set, RngStream& rng);

// Objective of the above at a given x.
double oful_objective(const AgentState& state, const Vec& x);

Vec act_phased_etc(AgentState& state, const ActionSet& set);

// Support maximizer of a uniformly random direction.
Vec act_uniform_random(const ActionSet& set, RngStream& rng);

// Dispatch on the configured kind. May mutate phased bookkeeping only.
RandomisedDraw act(AgentState& state, const ActionSet& set, RngStream& rng);

AgentState update(const AgentState& state, const Vec& x, double y);

struct OptimismEstimate {
  double p_hat = 0.0;
  bool below_threshold = false;  // p̂ ≤ 1/(16 K⁴)
};

// Monte Carlo estimate of P(J(θ_t) ≥ J(θ*)) under the randomised agent's
// current sampling distribution.
OptimismEstimate optimism_prob(const AgentState& state, const ActionSet& set,
                               const Vec& theta_star, int n_mc, RngStream& rng);

}  // namespace banditforge
