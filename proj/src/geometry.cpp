#include "banditforge/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "banditforge/kernels.hpp"

namespace banditforge {

namespace {

// Exponent arithmetic clamps magnitudes below 1e-300 to zero before powering,
// so denormal inputs cannot produce NaN through pow.
constexpr double kPowClamp = 1e-300;

double lp_norm(const Vec& x, double p) {
  double m = 0.0;
  for (double xi : x) m = std::max(m, std::fabs(xi));
  if (m < kPowClamp) return 0.0;
  double acc = 0.0;
  for (double xi : x) {
    const double a = std::fabs(xi);
    if (a < kPowClamp) continue;
    acc += std::pow(a / m, p);
  }
  return m * std::pow(acc, 1.0 / p);
}

bool is_zero(const Vec& v) {
  for (double x : v) {
    if (x != 0.0) return false;
  }
  return true;
}

void check_inverse_pair(const Matrix& a, const Matrix& a_inv) {
  if (a.n == 0 || a.n != a_inv.n)
    throw Error("transformed set: matrix dimensions do not match");
  const std::size_t n = a.n;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += a.at(i, k) * a_inv.at(k, j);
      const double want = (i == j) ? 1.0 : 0.0;
      if (std::fabs(acc - want) > 1e-9)
        throw Error("transformed set: supplied inverse does not invert A");
    }
  }
}

}  // namespace

ActionSet ActionSet::l2_ball(std::size_t dim) {
  if (dim == 0) throw Error("action set: dimension must be positive");
  ActionSet s;
  s.kind_ = SetKind::L2Ball;
  s.dim_ = dim;
  return s;
}

ActionSet ActionSet::lq_ball(std::size_t dim, double q) {
  if (dim == 0) throw Error("action set: dimension must be positive");
  if (!(q >= 1.01 && q <= 100.0))
    throw Error("lq ball: q must lie in [1.01, 100]");
  ActionSet s;
  s.kind_ = SetKind::LqBall;
  s.dim_ = dim;
  s.q_ = q;
  return s;
}

ActionSet ActionSet::transformed(Matrix a, Matrix a_inv, ActionSet inner) {
  check_inverse_pair(a, a_inv);
  if (a.n != inner.dim())
    throw Error("transformed set: matrix and inner set dimensions differ");
  ActionSet s;
  s.kind_ = SetKind::Transformed;
  s.dim_ = a.n;
  s.a_ = std::move(a);
  s.a_inv_ = std::move(a_inv);
  s.inner_ = std::make_shared<const ActionSet>(std::move(inner));

  // Sampled boundary members must stay inside the unit Euclidean ball.
  RngStream probe(0xB0A7ULL);
  for (int i = 0; i < 64; ++i) {
    const Vec member = support(s, probe.unit_vec(s.dim_)).maximizer;
    if (norm2(member) > 1.0 + 1e-9)
      throw Error("transformed set: sampled boundary member leaves the unit ball");
  }
  return s;
}

ActionSet ActionSet::finite(std::vector<Vec> points) {
  if (points.empty()) throw Error("finite set: needs at least one point");
  const std::size_t dim = points.front().size();
  std::vector<Vec> dedup;
  for (auto& p : points) {
    if (p.size() != dim) throw Error("finite set: inconsistent dimensions");
    require_finite(p, "finite set point");
    if (norm2(p) > 1.0 + 1e-12)
      throw Error("finite set: point outside the unit ball");
    if (std::find(dedup.begin(), dedup.end(), p) == dedup.end())
      dedup.push_back(std::move(p));
  }
  ActionSet s;
  s.kind_ = SetKind::Finite;
  s.dim_ = dim;
  s.points_ = std::move(dedup);
  return s;
}

double ActionSet::membership_residual(const Vec& x) const {
  switch (kind_) {
    case SetKind::L2Ball:
      return std::max(0.0, norm2(x) - 1.0);
    case SetKind::LqBall:
      return std::max(0.0, lp_norm(x, q_) - 1.0);
    case SetKind::Transformed:
      return inner_->membership_residual(a_.matvec(x));
    case SetKind::Finite: {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& p : points_) best = std::min(best, norm2(sub(x, p)));
      return best;
    }
  }
  return 0.0;
}

double ActionSet::gauge(const Vec& x) const {
  switch (kind_) {
    case SetKind::L2Ball:
      return norm2(x);
    case SetKind::LqBall:
      return lp_norm(x, q_);
    case SetKind::Transformed:
      return inner_->gauge(a_.matvec(x));
    case SetKind::Finite:
      throw Error("gauge undefined for finite sets");
  }
  return 0.0;
}

SupportEval support(const ActionSet& set, const Vec& theta) {
  require_finite(theta, "support: theta");
  if (theta.size() != set.dim()) throw Error("support: dimension mismatch");
  if (is_zero(theta)) throw DegenerateDirection();

  switch (set.kind()) {
    case SetKind::L2Ball: {
      const double r = norm2(theta);
      SupportEval ev;
      ev.value = r;
      ev.maximizer.resize(theta.size());
      for (std::size_t i = 0; i < theta.size(); ++i)
        ev.maximizer[i] = theta[i] / r;
      return ev;
    }
    case SetKind::LqBall: {
      const double q = set.q();
      const double p = q / (q - 1.0);
      double m = 0.0;
      for (double t : theta) m = std::max(m, std::fabs(t));
      if (m < kPowClamp) throw DegenerateDirection();
      double sum_p = 0.0;
      Vec pw(theta.size(), 0.0);
      for (std::size_t i = 0; i < theta.size(); ++i) {
        const double a = std::fabs(theta[i]);
        if (a < kPowClamp) continue;
        const double ap1 = std::pow(a / m, p - 1.0);
        pw[i] = std::copysign(ap1, theta[i]);
        sum_p += ap1 * (a / m);
      }
      // ‖θ‖_p = m · sum_p^{1/p}; maximizer_i = sign(θ_i)|θ_i|^{p-1}/‖θ‖_p^{p-1}
      const double denom = std::pow(sum_p, (p - 1.0) / p);
      SupportEval ev;
      ev.value = m * std::pow(sum_p, 1.0 / p);
      ev.maximizer.resize(theta.size());
      for (std::size_t i = 0; i < theta.size(); ++i)
        ev.maximizer[i] = pw[i] / denom;
      return ev;
    }
    case SetKind::Transformed: {
      SupportEval ev = support(set.inner(), set.transform_inv().tmatvec(theta));
      ev.maximizer = set.transform_inv().matvec(ev.maximizer);
      return ev;
    }
    case SetKind::Finite: {
      const auto& pts = set.points();
      const auto& k = kern::active();
      std::size_t best = 0;
      double best_val = k.dot(pts[0].data(), theta.data(), theta.size());
      for (std::size_t i = 1; i < pts.size(); ++i) {
        const double v = k.dot(pts[i].data(), theta.data(), theta.size());
        if (v > best_val) {
          best_val = v;
          best = i;
        }
      }
      return {best_val, pts[best]};
    }
  }
  throw Error("support: unreachable");
}

double support_value(const ActionSet& set, const Vec& theta) {
  if (is_zero(theta)) return 0.0;
  switch (set.kind()) {
    case SetKind::L2Ball:
      return norm2(theta);
    case SetKind::LqBall:
      return lp_norm(theta, set.q() / (set.q() - 1.0));
    case SetKind::Transformed:
      return support_value(set.inner(), set.transform_inv().tmatvec(theta));
    case SetKind::Finite: {
      const auto& k = kern::active();
      double best = -std::numeric_limits<double>::infinity();
      for (const auto& p : set.points())
        best = std::max(best, k.dot(p.data(), theta.data(), theta.size()));
      return best;
    }
  }
  return 0.0;
}

double bregman(const ActionSet& set, BregmanMode mode, const Vec& theta_a,
               const Vec& theta_b) {
  require_finite(theta_a, "bregman: theta_a");
  const SupportEval at_b = support(set, theta_b);  // rejects θb = 0
  const double ja = support_value(set, theta_a);
  const Vec diff = sub(theta_a, theta_b);
  const double grad_dot = dot(at_b.maximizer, diff);

  double d;
  if (mode == BregmanMode::J) {
    d = ja - at_b.value - grad_dot;
  } else {
    d = ja * ja - at_b.value * at_b.value - 2.0 * at_b.value * grad_dot;
  }
  if (d < 0.0 && d > -1e-12) d = 0.0;
  return d;
}

NormSpec NormSpec::euclidean() { return NormSpec(); }

NormSpec NormSpec::lp(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw Error("lp norm: p must exceed 1");
  NormSpec n;
  n.kind_ = NormKind::Lp;
  n.p_ = p;
  return n;
}

NormSpec NormSpec::transformed(Matrix a, Matrix a_inv, NormSpec inner) {
  check_inverse_pair(a, a_inv);
  NormSpec n;
  n.kind_ = NormKind::Transformed;
  n.a_ = std::move(a);
  n.a_inv_ = std::move(a_inv);
  n.inner_ = std::make_shared<const NormSpec>(std::move(inner));
  return n;
}

double NormSpec::operator()(const Vec& x) const {
  switch (kind_) {
    case NormKind::Euclidean:
      return norm2(x);
    case NormKind::Lp:
      return lp_norm(x, p_);
    case NormKind::Transformed:
      return (*inner_)(a_inv_.tmatvec(x));
  }
  return 0.0;
}

ProbeResult convexity_probe(const ActionSet& set, const NormSpec& norm,
                            int n_pairs, RngStream& rng) {
  if (n_pairs < 1) throw Error("convexity_probe: n_pairs must be positive");
  const std::size_t d = set.dim();
  auto annulus = [&]() {
    Vec v = rng.unit_vec(d);
    const double r = rng.uniform(0.1, 2.0);
    for (auto& x : v) x *= r;
    return v;
  };

  ProbeResult out;
  out.ratio_min = std::numeric_limits<double>::infinity();
  out.ratio_max = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_pairs; ++i) {
    Vec a, b;
    do {
      a = annulus();
      b = annulus();
    } while (norm2(sub(a, b)) < 1e-3);
    const double dj2 = bregman(set, BregmanMode::JSquared, a, b);
    const double s = norm(sub(a, b));
    const double ratio = dj2 / (s * s);
    out.ratio_min = std::min(out.ratio_min, ratio);
    out.ratio_max = std::max(out.ratio_max, ratio);
  }
  return out;
}

}  // namespace banditforge
