#include "banditforge/linops.hpp"

#include <cmath>

#include "banditforge/kernels.hpp"

namespace banditforge {

namespace {
constexpr std::uint32_t kRefactorPeriod = 256;
}

SpdMatrix SpdMatrix::scaled_identity(std::size_t dim, double lambda) {
  if (dim == 0) throw Error("SpdMatrix: dimension must be positive");
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw Error("SpdMatrix: lambda must be positive and finite");
  SpdMatrix m;
  m.dim_ = dim;
  m.entries_ = Matrix::scaled_identity(dim, lambda);
  m.upper_ = Matrix::scaled_identity(dim, std::sqrt(lambda));
  m.log_det_ = static_cast<double>(dim) * std::log(lambda);
  return m;
}

double SpdMatrix::add_outer(const Vec& x) {
  if (x.size() != dim_) throw Error("SpdMatrix: dimension mismatch");
  const auto& k = kern::active();

  const Vec y = solve_lower(x);
  const double wnorm_sq = kern::active().sumsq(y.data(), y.size());

  for (std::size_t i = 0; i < dim_; ++i)
    k.axpy(x[i], x.data(), entries_.row(i), dim_);
  log_det_ += std::log1p(wnorm_sq);

  // Rank-one factor update, column sweeps over rows of U (= columns of L).
  Vec w = x;
  bool ok = true;
  for (std::size_t j = 0; j < dim_ && ok; ++j) {
    const double ljj = upper_.at(j, j);
    const double wj = w[j];
    const double r = std::sqrt(ljj * ljj + wj * wj);
    if (!(r > 0.0) || !std::isfinite(r) || ljj <= 0.0) {
      ok = false;
      break;
    }
    const double c = r / ljj;
    const double s = wj / ljj;
    upper_.at(j, j) = r;
    k.chol_sweep(upper_.row(j) + j + 1, w.data() + j + 1, dim_ - j - 1, c, s);
  }
  if (!ok || ++updates_since_refactor_ >= kRefactorPeriod) refactor();
  return wnorm_sq;
}

void SpdMatrix::refactor() {
  Matrix u(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = i; j < dim_; ++j) {
      double acc = entries_.at(i, j);
      for (std::size_t r = 0; r < i; ++r) acc -= u.at(r, i) * u.at(r, j);
      if (j == i) {
        if (!(acc > 0.0) || !std::isfinite(acc))
          throw Error("SpdMatrix: refactorisation failed (not positive definite)");
        u.at(i, i) = std::sqrt(acc);
      } else {
        u.at(i, j) = acc / u.at(i, i);
      }
    }
  }
  upper_ = std::move(u);
  updates_since_refactor_ = 0;
  // log_det_ stays on the incremental path; drift is bounded by the periodic
  // refactor of the factor itself.
}

Vec SpdMatrix::solve_lower(const Vec& v) const {
  if (v.size() != dim_) throw Error("SpdMatrix: dimension mismatch");
  const auto& k = kern::active();
  Vec y = v;
  for (std::size_t j = 0; j < dim_; ++j) {
    const double d = upper_.at(j, j);
    if (d == 0.0 || !std::isfinite(d)) throw Error("SpdMatrix: singular factor");
    y[j] /= d;
    k.axpy(-y[j], upper_.row(j) + j + 1, y.data() + j + 1, dim_ - j - 1);
  }
  return y;
}

Vec SpdMatrix::solve_upper(const Vec& v) const {
  if (v.size() != dim_) throw Error("SpdMatrix: dimension mismatch");
  const auto& k = kern::active();
  Vec z(dim_);
  for (std::size_t i = dim_; i-- > 0;) {
    const double d = upper_.at(i, i);
    if (d == 0.0 || !std::isfinite(d)) throw Error("SpdMatrix: singular factor");
    const double tail =
        k.dot(upper_.row(i) + i + 1, z.data() + i + 1, dim_ - i - 1);
    z[i] = (v[i] - tail) / d;
  }
  return z;
}

Vec SpdMatrix::solve(const Vec& b) const { return solve_upper(solve_lower(b)); }

Vec SpdMatrix::apply_upper(const Vec& v) const {
  if (v.size() != dim_) throw Error("SpdMatrix: dimension mismatch");
  const auto& k = kern::active();
  Vec out(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    out[i] = k.dot(upper_.row(i) + i, v.data() + i, dim_ - i);
  return out;
}

Vec whiten(const SpdMatrix& m, const Vec& v) {
  require_finite(v, "whiten");
  return m.solve_upper(v);
}

std::pair<double, double> weighted_norms(const SpdMatrix& m, const Vec& v) {
  require_finite(v, "weighted_norms");
  const auto& k = kern::active();
  const Vec uv = m.apply_upper(v);
  const Vec li = m.solve_lower(v);
  return {std::sqrt(k.sumsq(uv.data(), uv.size())),
          std::sqrt(k.sumsq(li.data(), li.size()))};
}

SufficientStats SufficientStats::initial(std::size_t dim, double lambda) {
  SufficientStats s;
  s.gram = SpdMatrix::scaled_identity(dim, lambda);
  s.response.assign(dim, 0.0);
  s.estimate.assign(dim, 0.0);
  s.step = 0;
  return s;
}

SufficientStats rank_one_update(const SufficientStats& stats, const Vec& x,
                                double y) {
  require_finite(x, "rank_one_update: x");
  if (!std::isfinite(y)) throw Error("rank_one_update: y non-finite");
  if (x.size() != stats.gram.dim())
    throw Error("rank_one_update: dimension mismatch");

  SufficientStats next = stats;
  ++next.step;

  bool zero = true;
  for (double xi : x) {
    if (xi != 0.0) {
      zero = false;
      break;
    }
  }
  if (zero) return next;  // everything but the step count is untouched

  next.gram.add_outer(x);
  kern::active().axpy(y, x.data(), next.response.data(), x.size());
  next.estimate = next.gram.solve(next.response);
  return next;
}

}  // namespace banditforge
