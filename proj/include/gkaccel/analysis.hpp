#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "gkaccel/geometry.hpp"

namespace gkaccel {

struct AnalysisOptions {
  double rank_cutoff = kDefaultRankCutoff;
  /// Least-squares residual above which a stacked system counts as infeasible,
  /// relative to (1 + |solution|).
  double feasibility_tol = 1e-6;
};

/// Every affine set in the list stacked into one system A x = b with
/// orthonormal rows per set.
inline std::pair<Matrix, Vector> stacked_constraints(std::span<const AffineSet> sets) {
  if (sets.empty()) throw std::invalid_argument("need at least one set");
  const auto d = static_cast<Eigen::Index>(sets.front().dim());
  std::vector<std::pair<Matrix, Vector>> parts;
  parts.reserve(sets.size());
  Eigen::Index rows = 0;
  for (const auto& s : sets) {
    require_dim(static_cast<std::size_t>(d), s.dim());
    parts.push_back(s.constraints());
    rows += parts.back().first.cols();
  }
  Matrix a(rows, d);
  Vector b(rows);
  Eigen::Index r = 0;
  for (const auto& [nm, rhs] : parts) {
    a.middleRows(r, nm.cols()) = nm.transpose();
    b.segment(r, nm.cols()) = rhs;
    r += nm.cols();
  }
  return {std::move(a), std::move(b)};
}

/// P_M(x0) for M the intersection of `sets`, computed directly as
/// x0 - A^+ (A x0 - b) from the stacked constraints. This is the ground truth
/// the iterative methods are measured against.
inline Vector exact_projection(const Vector& x0, std::span<const AffineSet> sets,
                               const AnalysisOptions& opts = {}) {
  auto [a, b] = stacked_constraints(sets);
  require_dim(static_cast<std::size_t>(a.cols()), static_cast<std::size_t>(x0.size()));
  if (a.rows() == 0) return x0;
  linalg::Svd svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  const auto rank = linalg::numerical_rank(sv, opts.rank_cutoff);
  const Vector r = a * x0 - b;
  Vector coeff = svd.matrixU().leftCols(rank).transpose() * r;
  coeff.array() /= sv.head(rank).array();
  Vector x = x0 - svd.matrixV().leftCols(rank) * coeff;
  const double infeas = (a * x - b).norm();
  if (!(infeas <= opts.feasibility_tol * (1.0 + x.norm())))
    throw InfeasibleError("sets have empty intersection (least-squares residual " +
                          std::to_string(infeas) + ")");
  return x;
}

inline Vector exact_projection(const Vector& x0, const std::vector<AffineSet>& sets,
                               const AnalysisOptions& opts = {}) {
  return exact_projection(x0, std::span<const AffineSet>(sets), opts);
}

/// Orthonormal basis of the intersection of the linear subspaces parallel to
/// `sets`.
inline Matrix parallel_intersection(std::span<const AffineSet> sets,
                                    double rank_cutoff = kDefaultRankCutoff) {
  auto a = stacked_constraints(sets).first;
  return linalg::null_space(a, a.cols(), rank_cutoff);
}

/// Cosine of the Friederichs angle between span(u) and span(v).
///
/// The common part W of the two subspaces is removed first; the result is the
/// largest singular value of the cross-Gram matrix of what remains. Zero when
/// either subspace is contained in the other.
inline double friederichs_cosine(const Matrix& u, const Matrix& v,
                                 double rank_cutoff = kDefaultRankCutoff) {
  require_dim(static_cast<std::size_t>(u.rows()), static_cast<std::size_t>(v.rows()));
  if (linalg::orthonormality_drift(u) > tol::kRepairableDrift ||
      linalg::orthonormality_drift(v) > tol::kRepairableDrift)
    throw std::invalid_argument("friederichs_cosine expects orthonormal bases");
  const auto d = u.rows();
  if (u.cols() == 0 || v.cols() == 0) return 0.0;

  const Matrix cu = linalg::complement(u, d);
  const Matrix cv = linalg::complement(v, d);
  Matrix stacked(cu.cols() + cv.cols(), d);
  stacked << cu.transpose(), cv.transpose();
  const Matrix w = linalg::null_space(stacked, d, rank_cutoff);

  const Matrix deflate = Matrix::Identity(d, d) - w * w.transpose();
  const Matrix ud = linalg::orth(deflate * u, rank_cutoff);
  const Matrix vd = linalg::orth(deflate * v, rank_cutoff);
  if (ud.cols() == 0 || vd.cols() == 0) return 0.0;
  linalg::Svd svd(ud.transpose() * vd);
  return std::clamp(svd.singularValues()[0], 0.0, 1.0);
}

/// The linear-rate constant for cyclic projections over a list of sets.
struct RateReport {
  /// c_i = c(M_i', intersection of M_j' for j > i), i = 1..n-1
  std::vector<double> cosines;
  double constant = 1.0;

  /// c^k
  double bound(std::size_t k) const { return std::pow(constant, static_cast<double>(k)); }

  std::vector<double> bound_table(std::size_t kmax) const {
    std::vector<double> t(kmax + 1);
    for (std::size_t k = 0; k <= kmax; ++k) t[k] = bound(k);
    return t;
  }
};

inline RateReport rate_constant(std::span<const AffineSet> sets, const AnalysisOptions& opts = {}) {
  if (sets.size() < 2) throw std::invalid_argument("rate_constant needs at least two sets");
  // throws InfeasibleError for an empty intersection
  (void)exact_projection(Vector::Zero(static_cast<Eigen::Index>(sets.front().dim())), sets, opts);

  RateReport rep;
  double prod = 1.0;
  for (std::size_t i = 0; i + 1 < sets.size(); ++i) {
    const Matrix tail = parallel_intersection(sets.subspan(i + 1), opts.rank_cutoff);
    const Matrix own = sets[i].to_span().basis();
    const double ci = friederichs_cosine(own, tail, opts.rank_cutoff);
    rep.cosines.push_back(ci);
    prod *= 1.0 - ci * ci;
  }
  rep.constant = std::clamp(std::sqrt(std::max(0.0, 1.0 - prod)), 0.0, 1.0);
  return rep;
}

inline RateReport rate_constant(const std::vector<AffineSet>& sets, const AnalysisOptions& opts = {}) {
  return rate_constant(std::span<const AffineSet>(sets), opts);
}

/// First k at which dist[k] > c^k dist[0] (1 + rel_slack), if any.
inline std::optional<std::size_t> first_bound_violation(const std::vector<double>& dist, double c,
                                                        double rel_slack = 1e-8) {
  if (dist.empty()) return std::nullopt;
  double ck = 1.0;
  for (std::size_t k = 0; k < dist.size(); ++k) {
    if (dist[k] > ck * dist[0] * (1.0 + rel_slack)) return k;
    ck *= c;
  }
  return std::nullopt;
}

}  // namespace gkaccel
