#include "banditforge/agents.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace banditforge {

const char* AgentConfig::kind_name() const {
  switch (kind.index()) {
    case 0: return "randomised";
    case 1: return "oful";
    case 2: return "phased_etc";
    case 3: return "uniform_random";
  }
  return "?";
}

double beta_width(const SufficientStats& stats, const AgentConfig& config) {
  const double d = static_cast<double>(stats.gram.dim());
  const double log_det_ratio =
      stats.gram.log_det() - d * std::log(config.lambda);
  return config.R * std::sqrt(config.lambda) +
         config.S *
             std::sqrt(2.0 * std::log(1.0 / config.delta) + log_det_ratio);
}

namespace {

void validate_config(const AgentConfig& config) {
  if (!(config.lambda > 0.0)) throw Error("agent: lambda must be positive");
  if (config.lambda < 1.0) {
    static bool warned = false;
    if (!warned) {
      warned = true;
      std::fprintf(stderr,
                   "banditforge: warning: lambda = %g below 1; the regret "
                   "guarantees assume lambda >= 1\n",
                   config.lambda);
    }
  }
  if (!(config.delta > 0.0 && config.delta < 1.0))
    throw Error("agent: delta must lie in (0,1)");
  if (!(config.R > 0.0)) throw Error("agent: R must be positive");
  if (!(config.S >= 0.0)) throw Error("agent: S must be nonnegative");
  if (const auto* r = std::get_if<RandomisedCfg>(&config.kind)) {
    if (!(r->inflation >= 1.0))
      throw Error("agent: inflation must be at least 1");
    if (!(r->perturbation.declared_K >= 1.0))
      throw Error("agent: declared K must be at least 1");
  }
  if (const auto* o = std::get_if<OfulCfg>(&config.kind)) {
    if (o->restarts < 1 || o->iters < 1)
      throw Error("agent: oful restarts/iters must be positive");
  }
}

// Greedy deduplication of ±e_1..±e_d support maximizers to d linearly
// independent directions (rank tracked by Gram-Schmidt residual).
std::vector<Vec> exploration_basis(const ActionSet& set) {
  const std::size_t d = set.dim();
  std::vector<Vec> basis;
  std::vector<Vec> ortho;
  for (std::size_t i = 0; i < d && basis.size() < d; ++i) {
    for (double sign : {1.0, -1.0}) {
      Vec e(d, 0.0);
      e[i] = sign;
      const Vec cand = support(set, e).maximizer;
      Vec resid = cand;
      for (const auto& u : ortho) {
        const double c = dot(resid, u);
        for (std::size_t j = 0; j < d; ++j) resid[j] -= c * u[j];
      }
      const double r = norm2(resid);
      if (r > 1e-9) {
        for (auto& v : resid) v /= r;
        ortho.push_back(std::move(resid));
        basis.push_back(cand);
        if (basis.size() == d) break;
      }
    }
  }
  if (basis.size() != d)
    throw Error("phased etc: action set has no d independent directions");
  return basis;
}

}  // namespace

PhasedSegment phased_locate(std::int64_t step, std::size_t d) {
  std::int64_t rem = step;
  std::int64_t exploit_len = 2;
  for (int phase = 1;; ++phase) {
    const std::int64_t explore_len = static_cast<std::int64_t>(d);
    if (rem < explore_len) return {true, phase, rem};
    rem -= explore_len;
    if (rem < exploit_len) return {false, phase, rem};
    rem -= exploit_len;
    exploit_len *= 2;
  }
}

AgentState make_agent(const AgentConfig& config, std::size_t dim,
                      const ActionSet* set) {
  validate_config(config);
  AgentState state;
  state.config = config;
  state.stats = SufficientStats::initial(dim, config.lambda);
  state.beta = beta_width(state.stats, config);
  if (std::holds_alternative<PhasedEtcCfg>(config.kind)) {
    if (set == nullptr)
      throw Error("phased etc: action set required at construction");
    state.phased.basis = exploration_basis(*set);
  }
  return state;
}

RandomisedDraw act_randomised(const AgentState& state, const ActionSet& set,
                              RngStream& rng) {
  const auto& cfg = std::get<RandomisedCfg>(state.config.kind);
  const std::size_t d = state.stats.gram.dim();

  auto draw_theta = [&]() {
    const Vec eta = sample(cfg.perturbation, d, rng);
    const Vec offset = whiten(state.stats.gram, eta);
    return add_scaled(state.stats.estimate, cfg.inflation, offset);
  };

  Vec theta = draw_theta();
  bool zero = std::all_of(theta.begin(), theta.end(),
                          [](double x) { return x == 0.0; });
  if (zero) {
    theta = draw_theta();  // probability-zero event: one resample
    zero = std::all_of(theta.begin(), theta.end(),
                       [](double x) { return x == 0.0; });
  }
  if (zero) {
    // Still degenerate: fall back to a fixed member and note the event.
    std::fprintf(stderr,
                 "banditforge: degenerate theta_t twice; playing fixed action\n");
    Vec e1(d, 0.0);
    e1[0] = 1.0;
    return {support(set, e1).maximizer, e1};
  }
  return {support(set, theta).maximizer, theta};
}

double oful_objective(const AgentState& state, const Vec& x) {
  const auto [_, inv_norm] = weighted_norms(state.stats.gram, x);
  return dot(x, state.stats.estimate) + state.beta * inv_norm;
}

namespace {

// Monotone projected-gradient ascent on the boundary: steps follow a
// 1/(1+√t) decay with a backtracking scale, only improving moves are kept,
// iterates are re-projected through the Minkowski gauge.
Vec oful_ascend(const AgentState& state, const ActionSet& set, Vec x,
                int iters) {
  const std::size_t d = x.size();
  {
    const double g = set.gauge(x);
    if (g <= 0.0) return x;
    for (auto& v : x) v /= g;
  }
  double fx = oful_objective(state, x);
  double scale = 1.0;
  for (int it = 1; it <= iters && scale > 1e-10; ++it) {
    const Vec vinv_x = state.stats.gram.solve(x);
    const double inv_norm = std::sqrt(std::max(dot(vinv_x, x), 0.0));
    Vec grad = state.stats.estimate;
    if (inv_norm > 1e-14) {
      const double c = state.beta / inv_norm;
      for (std::size_t j = 0; j < d; ++j) grad[j] += c * vinv_x[j];
    }
    const double gn = norm2(grad);
    if (gn < 1e-14) break;
    const double step =
        scale / ((1.0 + std::sqrt(static_cast<double>(it))) * gn);
    Vec next = add_scaled(x, step, grad);
    const double g = set.gauge(next);
    if (g <= 1e-14) {
      scale *= 0.5;
      continue;
    }
    for (auto& v : next) v /= g;
    const double fn = oful_objective(state, next);
    if (fn > fx) {
      x = std::move(next);
      fx = fn;
    } else {
      scale *= 0.5;
    }
  }
  return x;
}

}  // namespace

Vec act_oful(const AgentState& state, const ActionSet& set, RngStream& rng) {
  if (set.kind() == SetKind::Finite) {
    const auto& pts = set.points();
    std::size_t best = 0;
    double best_val = oful_objective(state, pts[0]);
    for (std::size_t i = 1; i < pts.size(); ++i) {
      const double v = oful_objective(state, pts[i]);
      if (v > best_val) {
        best_val = v;
        best = i;
      }
    }
    return pts[best];
  }

  const auto& cfg = std::get<OfulCfg>(state.config.kind);
  const std::size_t d = state.stats.gram.dim();

  std::vector<Vec> starts;
  // Deterministic extreme starts cover the two terms of the objective: the
  // greedy point (and its antipode) for the linear term, and the most
  // uncertain direction (top eigendirection of V⁻¹, by inverse power
  // iteration) for the width term. The greedy point being a candidate also
  // keeps the returned objective at least the exploitation-only value.
  if (norm2(state.stats.estimate) > 1e-14) {
    starts.push_back(support(set, state.stats.estimate).maximizer);
    Vec neg = state.stats.estimate;
    for (auto& v : neg) v = -v;
    starts.push_back(support(set, neg).maximizer);
  }
  {
    Vec v(d, 1.0 / std::sqrt(static_cast<double>(d)));
    for (int it = 0; it < 32; ++it) {
      v = state.stats.gram.solve(v);
      const double r = norm2(v);
      if (r < 1e-300) break;
      for (auto& x : v) x /= r;
    }
    if (norm2(v) > 0.5) {
      starts.push_back(support(set, v).maximizer);
      for (auto& x : v) x = -x;
      starts.push_back(support(set, v).maximizer);
    }
  }
  while (starts.size() < static_cast<std::size_t>(cfg.restarts) + 4)
    starts.push_back(support(set, rng.unit_vec(d)).maximizer);

  Vec best;
  double best_val = -std::numeric_limits<double>::infinity();
  for (auto& s : starts) {
    const Vec cand = oful_ascend(state, set, std::move(s), cfg.iters);
    const double v = oful_objective(state, cand);
    if (v > best_val) {
      best_val = v;
      best = cand;
    }
  }
  return best;
}

Vec act_phased_etc(AgentState& state, const ActionSet& set) {
  const std::size_t d = state.stats.gram.dim();
  const PhasedSegment seg = phased_locate(state.stats.step, d);
  if (seg.exploring) {
    state.phased.committed_phase = -1;
    return state.phased.basis[static_cast<std::size_t>(seg.pos)];
  }
  if (state.phased.committed_phase != seg.phase) {
    // Entering a new exploitation phase: freeze the greedy action.
    Vec target = state.stats.estimate;
    if (norm2(target) < 1e-300) {
      state.phased.committed = state.phased.basis[0];
    } else {
      state.phased.committed = support(set, target).maximizer;
    }
    state.phased.committed_phase = seg.phase;
  }
  return state.phased.committed;
}

Vec act_uniform_random(const ActionSet& set, RngStream& rng) {
  return support(set, rng.unit_vec(set.dim())).maximizer;
}

RandomisedDraw act(AgentState& state, const ActionSet& set, RngStream& rng) {
  if (std::holds_alternative<RandomisedCfg>(state.config.kind))
    return act_randomised(state, set, rng);
  if (std::holds_alternative<OfulCfg>(state.config.kind))
    return {act_oful(state, set, rng), {}};
  if (std::holds_alternative<PhasedEtcCfg>(state.config.kind))
    return {act_phased_etc(state, set), {}};
  return {act_uniform_random(set, rng), {}};
}

AgentState update(const AgentState& state, const Vec& x, double y) {
  AgentState next = state;
  next.stats = rank_one_update(state.stats, x, y);
  next.beta = beta_width(next.stats, next.config);
  return next;
}

OptimismEstimate optimism_prob(const AgentState& state, const ActionSet& set,
                               const Vec& theta_star, int n_mc,
                               RngStream& rng) {
  if (n_mc < 1) throw Error("optimism_prob: n_mc must be positive");
  const auto* cfg = std::get_if<RandomisedCfg>(&state.config.kind);
  if (cfg == nullptr)
    throw Error("optimism_prob: defined for randomised agents only");

  const std::size_t d = state.stats.gram.dim();
  const double j_star = support_value(set, theta_star);
  int hits = 0;
  for (int i = 0; i < n_mc; ++i) {
    const Vec eta = sample(cfg->perturbation, d, rng);
    const Vec theta =
        add_scaled(state.stats.estimate, cfg->inflation,
                   whiten(state.stats.gram, eta));
    if (support_value(set, theta) >= j_star) ++hits;
  }
  OptimismEstimate est;
  est.p_hat = static_cast<double>(hits) / static_cast<double>(n_mc);
  const double k4 = std::pow(cfg->perturbation.declared_K, 4.0);
  est.below_threshold = est.p_hat <= 1.0 / (16.0 * k4);
  return est;
}

}  // namespace banditforge
