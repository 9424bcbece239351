#include "banditforge/analysis.hpp"

#include <algorithm>
#include <cmath>

namespace banditforge {

namespace {

struct Line {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

Line fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw Error("fit: degenerate abscissae");
  Line l;
  l.slope = sxy / sxx;
  l.intercept = my - l.slope * mx;
  l.r_squared = (syy == 0.0) ? 1.0 : (sxy * sxy) / (sxx * syy);
  return l;
}

// Permutation-invariant mean/SE: sum over value-sorted copies.
std::pair<double, double> mean_se_sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double sum = 0.0;
  for (double x : v) sum += x;
  const double n = static_cast<double>(v.size());
  const double mean = sum / n;
  if (v.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

// Inverted-CDF quantile (so two mirrored samples report exactly the lower
// and upper values at the 10/90 marks).
double quantile_sorted(const std::vector<double>& sorted, double q) {
  const std::size_t n = sorted.size();
  const double pos = q * static_cast<double>(n);
  std::size_t idx = static_cast<std::size_t>(std::ceil(pos));
  if (idx > 0) --idx;
  if (idx >= n) idx = n - 1;
  return sorted[idx];
}

}  // namespace

ScalingFit slope_fit(const std::vector<TrialTrace>& traces,
                     const std::vector<std::int64_t>& checkpoints) {
  if (traces.size() < 2) throw Error("slope_fit: needs at least 2 traces");
  if (checkpoints.size() < 2)
    throw Error("slope_fit: needs at least 2 checkpoints");

  std::vector<std::int64_t> cps = checkpoints;
  std::sort(cps.begin(), cps.end());
  for (std::size_t i = 1; i < cps.size(); ++i)
    if (cps[i] == cps[i - 1]) throw Error("slope_fit: duplicate checkpoint");

  ScalingFit fit;
  std::vector<double> xs, ys;
  for (std::int64_t cp : cps) {
    if (cp < 1) throw Error("slope_fit: checkpoints must be positive");
    std::vector<double> totals;
    totals.reserve(traces.size());
    for (const auto& tr : traces) {
      if (static_cast<std::int64_t>(tr.records.size()) < cp)
        throw Error("slope_fit: checkpoint beyond trace horizon");
      double cum = 0.0;
      for (std::int64_t t = 0; t < cp; ++t)
        cum += tr.records[static_cast<std::size_t>(t)].r;
      totals.push_back(cum);
    }
    const auto [mean, se] = mean_se_sorted(std::move(totals));
    if (mean <= 0.0) continue;  // dropped: log undefined
    fit.grid.push_back({cp, mean, se});
    xs.push_back(std::log(static_cast<double>(cp)));
    ys.push_back(std::log(mean));
  }
  if (xs.size() < 2)
    throw Error("slope_fit: fewer than 2 checkpoints with positive regret");
  const Line l = fit_line(xs, ys);
  fit.slope = l.slope;
  fit.intercept = l.intercept;
  fit.r_squared = l.r_squared;
  return fit;
}

double dimension_fit(const std::vector<std::pair<int, double>>& results) {
  if (results.size() < 3) throw Error("dimension_fit: needs >= 3 dimensions");
  std::vector<double> xs, ys;
  for (const auto& [d, mean] : results) {
    if (d < 1) throw Error("dimension_fit: dimensions must be positive");
    if (mean <= 0.0) continue;
    xs.push_back(std::log(static_cast<double>(d)));
    ys.push_back(std::log(mean));
  }
  if (xs.size() < 2)
    throw Error("dimension_fit: fewer than 2 dimensions with positive regret");
  return fit_line(xs, ys).slope;
}

MdsGen rademacher_gen(double c) {
  return [c](RngStream& rng, std::int64_t) {
    return rng.uniform01() < 0.5 ? c : -c;
  };
}

MdsGen zero_mds_gen() {
  return [](RngStream&, std::int64_t) { return 0.0; };
}

AdaptedGen bernoulli_gen(double p) {
  return [p](RngStream& rng, std::int64_t) {
    return AdaptedSample{rng.uniform01() < p ? 1.0 : 0.0, p};
  };
}

AdaptedGen constant_gen(double v) {
  return [v](RngStream&, std::int64_t) { return AdaptedSample{v, v}; };
}

double mds_bound_mc(const MdsGen& gen, double c, std::int64_t n,
                    std::int64_t trials, double delta, RngStream& rng) {
  if (!(delta > 0.0 && delta <= 1.0))
    throw Error("mds_bound_mc: delta must lie in (0,1]");
  if (n < 0 || trials < 1) throw Error("mds_bound_mc: bad sizes");
  const double c2 = c * c;
  std::vector<double> threshold(static_cast<std::size_t>(n));
  for (std::int64_t t = 1; t <= n; ++t) {
    const double a = c2 * static_cast<double>(t) + 1.0;
    threshold[static_cast<std::size_t>(t - 1)] =
        2.0 * a * std::log(std::sqrt(a) / delta);
  }
  std::int64_t violations = 0;
  for (std::int64_t trial = 0; trial < trials; ++trial) {
    double sum = 0.0;
    for (std::int64_t t = 1; t <= n; ++t) {
      sum += gen(rng, t);
      if (sum * sum >= threshold[static_cast<std::size_t>(t - 1)]) {
        ++violations;
        break;
      }
    }
  }
  return static_cast<double>(violations) / static_cast<double>(trials);
}

double nonneg_bound_mc(const AdaptedGen& gen, double R, std::int64_t n,
                       std::int64_t trials, double delta, RngStream& rng) {
  if (!(delta > 0.0 && delta < 1.0))
    throw Error("nonneg_bound_mc: delta must lie in (0,1)");
  if (!(R > 0.0)) throw Error("nonneg_bound_mc: R must be positive");
  if (n < 0 || trials < 1) throw Error("nonneg_bound_mc: bad sizes");
  const double slack = R * std::log(1.0 / delta);
  const double shrink = 1.0 - std::exp(-1.0);
  std::int64_t violations = 0;
  for (std::int64_t trial = 0; trial < trials; ++trial) {
    double sum = 0.0, mean_sum = 0.0;
    for (std::int64_t t = 1; t <= n; ++t) {
      const AdaptedSample s = gen(rng, t);
      if (s.value < -1e-12 || s.value > R + 1e-12)
        throw Error("nonneg_bound_mc: generator value outside [0, R]");
      sum += s.value;
      mean_sum += s.cond_mean;
      if (sum < shrink * mean_sum - slack) {
        ++violations;
        break;
      }
    }
  }
  return static_cast<double>(violations) / static_cast<double>(trials);
}

AggregateCurves aggregate(const std::vector<TrialTrace>& traces) {
  if (traces.empty()) throw Error("aggregate: no traces");
  const std::size_t horizon = traces.front().records.size();
  for (const auto& tr : traces)
    if (tr.records.size() != horizon)
      throw Error("aggregate: traces have mismatched horizons");

  AggregateCurves out;
  out.mean.resize(horizon);
  out.q10.resize(horizon);
  out.q90.resize(horizon);
  out.se.resize(horizon);

  std::vector<double> cums(traces.size(), 0.0);
  std::vector<double> col(traces.size());
  for (std::size_t t = 0; t < horizon; ++t) {
    for (std::size_t i = 0; i < traces.size(); ++i) {
      cums[i] += traces[i].records[t].r;
      col[i] = cums[i];
    }
    std::vector<double> sorted = col;
    std::sort(sorted.begin(), sorted.end());
    double sum = 0.0;
    for (double x : sorted) sum += x;
    const double n = static_cast<double>(sorted.size());
    const double mean = sum / n;
    double ss = 0.0;
    for (double x : sorted) ss += (x - mean) * (x - mean);
    out.mean[t] = mean;
    out.se[t] =
        sorted.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
    out.q10[t] = quantile_sorted(sorted, 0.10);
    out.q90[t] = quantile_sorted(sorted, 0.90);
  }
  return out;
}

}  // namespace banditforge
