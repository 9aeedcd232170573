#pragma once

#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "gkaccel/analysis.hpp"
#include "gkaccel/geometry.hpp"

namespace gkaccel {

/// Intermediate results of a composite operator.
///
/// stages[0] is the input and stages[i] is the i-th stage operator applied to
/// stages[i-1]; stages.back() is the composite applied to the input.
struct StageTrace {
  std::vector<Vector> stages;

  const Vector& input() const { return stages.front(); }
  const Vector& output() const { return stages.back(); }
  std::size_t size() const noexcept { return stages.size(); }

  /// sum_i |stages[i-1] - stages[i]|^2
  double sum_sq_steps() const {
    double s = 0.0;
    for (std::size_t i = 1; i < stages.size(); ++i) s += (stages[i - 1] - stages[i]).squaredNorm();
    return s;
  }
};

/// An operator T with |T(x) - y|^2 + |x - T(x)|^2 <= |x - y|^2 for every fixed
/// point y. Implementations may expose one known fixed point.
class FqneOperator {
 public:
  virtual ~FqneOperator() = default;
  virtual Vector apply(const Vector& x) const = 0;
  virtual std::size_t dim() const = 0;
  virtual std::optional<Vector> fixed_point_witness() const { return std::nullopt; }
};

using FqneChain = std::vector<std::shared_ptr<const FqneOperator>>;

/// Nearest-point projector onto an affine set or half-space.
class ProjectorOperator final : public FqneOperator {
 public:
  explicit ProjectorOperator(AffineSet set) : set_(std::move(set)) {}

  Vector apply(const Vector& x) const override { return project(x, set_); }
  std::size_t dim() const override { return set_.dim(); }
  std::optional<Vector> fixed_point_witness() const override {
    return project(Vector::Zero(static_cast<Eigen::Index>(set_.dim())), set_);
  }
  const AffineSet& set() const noexcept { return set_; }

 private:
  AffineSet set_;
};

inline FqneChain make_projector_chain(const std::vector<AffineSet>& sets) {
  FqneChain chain;
  chain.reserve(sets.size());
  for (const auto& s : sets) chain.push_back(std::make_shared<ProjectorOperator>(s));
  return chain;
}

enum class CycleMode { Cyclic, Symmetric };

/// Q = P_n ... P_1 (cyclic) or S = P_1 ... P_{n-1} P_n P_{n-1} ... P_1 (symmetric).
class CycleOperator {
 public:
  explicit CycleOperator(std::vector<AffineSet> sets, CycleMode mode = CycleMode::Cyclic)
      : sets_(std::move(sets)), mode_(mode) {
    if (sets_.empty()) throw std::invalid_argument("cycle needs at least one set");
    for (const auto& s : sets_) require_dim(sets_.front().dim(), s.dim());
  }

  CycleMode mode() const noexcept { return mode_; }
  std::size_t dim() const noexcept { return sets_.front().dim(); }
  const std::vector<AffineSet>& sets() const noexcept { return sets_; }

  /// Projections per application: n, or 2n-1 in symmetric mode.
  std::size_t projection_count() const noexcept {
    return mode_ == CycleMode::Cyclic ? sets_.size() : 2 * sets_.size() - 1;
  }

  /// The set projected onto at stage i (0-based), i < projection_count().
  const AffineSet& stage_set(std::size_t i) const {
    const std::size_t n = sets_.size();
    return i < n ? sets_[i] : sets_[2 * n - 2 - i];
  }

  /// Sets in stage order: M_1..M_n, or M_1..M_n..M_1.
  std::vector<AffineSet> unrolled_sets() const {
    std::vector<AffineSet> out;
    for (std::size_t i = 0; i < projection_count(); ++i) out.push_back(stage_set(i));
    return out;
  }

  Vector apply(const Vector& x) const {
    require_dim(dim(), static_cast<std::size_t>(x.size()));
    Vector y = x;
    for (std::size_t i = 0; i < projection_count(); ++i) y = project(y, stage_set(i));
    return y;
  }

  StageTrace trace(const Vector& x) const {
    require_dim(dim(), static_cast<std::size_t>(x.size()));
    StageTrace t;
    t.stages.reserve(projection_count() + 1);
    t.stages.push_back(x);
    for (std::size_t i = 0; i < projection_count(); ++i)
      t.stages.push_back(project(t.stages.back(), stage_set(i)));
    return t;
  }

  /// Op(x) together with sum_i |stage_{i-1} - stage_i|^2, without keeping the
  /// stages. Same arithmetic as trace().
  std::pair<Vector, double> apply_accumulate(const Vector& x) const {
    require_dim(dim(), static_cast<std::size_t>(x.size()));
    Vector y = x;
    double acc = 0.0;
    for (std::size_t i = 0; i < projection_count(); ++i) {
      Vector next = project(y, stage_set(i));
      acc += (y - next).squaredNorm();
      y = std::move(next);
    }
    return {std::move(y), acc};
  }

  /// Same cycle over the parallel linear subspaces.
  CycleOperator linear_part() const {
    std::vector<AffineSet> lin;
    for (const auto& s : sets_) lin.push_back(s.linear_part());
    return CycleOperator(std::move(lin), mode_);
  }

 private:
  std::vector<AffineSet> sets_;
  CycleMode mode_;
};

/// T_{C1,C2} = (I + R_{C2} R_{C1}) / 2, or its symmetrization
/// T = T_{C2,C1} T_{C1,C2} when `symmetric` is set.
class DouglasRachfordOperator final : public FqneOperator {
 public:
  DouglasRachfordOperator(AffineSet c1, AffineSet c2, bool symmetric = false)
      : c1_(std::move(c1)), c2_(std::move(c2)), symmetric_(symmetric) {
    if (!c1_.is_affine() || !c2_.is_affine())
      throw UnsupportedOperation("Douglas-Rachford operator needs affine sets");
    require_dim(c1_.dim(), c2_.dim());
  }

  const AffineSet& first() const noexcept { return c1_; }
  const AffineSet& second() const noexcept { return c2_; }
  bool symmetric() const noexcept { return symmetric_; }
  std::size_t dim() const override { return c1_.dim(); }

  /// T_{C1,C2}(x)
  Vector forward(const Vector& x) const { return 0.5 * (x + reflect(reflect(x, c1_), c2_)); }
  /// T_{C2,C1}(x)
  Vector backward(const Vector& x) const { return 0.5 * (x + reflect(reflect(x, c2_), c1_)); }

  Vector apply(const Vector& x) const override {
    require_dim(dim(), static_cast<std::size_t>(x.size()));
    Vector h = forward(x);
    return symmetric_ ? backward(h) : h;
  }

  /// [x, T_{C1,C2} x] or, symmetric, [z, T_{C1,C2} z, T z].
  StageTrace trace(const Vector& x) const {
    require_dim(dim(), static_cast<std::size_t>(x.size()));
    StageTrace t;
    t.stages.push_back(x);
    t.stages.push_back(forward(x));
    if (symmetric_) t.stages.push_back(backward(t.stages.back()));
    return t;
  }

  std::optional<Vector> fixed_point_witness() const override {
    const std::vector<AffineSet> pair{c1_, c2_};
    return exact_projection(Vector::Zero(static_cast<Eigen::Index>(dim())), pair);
  }

  DouglasRachfordOperator linear_part() const {
    return DouglasRachfordOperator(c1_.linear_part(), c2_.linear_part(), symmetric_);
  }

 private:
  AffineSet c1_;
  AffineSet c2_;
  bool symmetric_;
};

inline StageTrace apply_with_trace(const CycleOperator& op, const Vector& x) { return op.trace(x); }

inline StageTrace apply_with_trace(const DouglasRachfordOperator& op, const Vector& x) {
  return op.trace(x);
}

inline StageTrace apply_with_trace(std::span<const std::shared_ptr<const FqneOperator>> chain,
                                   const Vector& x) {
  if (chain.empty()) throw std::invalid_argument("empty operator chain");
  StageTrace t;
  t.stages.reserve(chain.size() + 1);
  t.stages.push_back(x);
  for (const auto& op : chain) {
    require_dim(op->dim(), static_cast<std::size_t>(t.stages.back().size()));
    t.stages.push_back(op->apply(t.stages.back()));
  }
  return t;
}

/// Fix T for the symmetric Douglas-Rachford operator on C1, C2:
/// (C1 n C2) + (C1')^perp n (C2')^perp, in span form.
inline AffineSet fixset_dr(const AffineSet& c1, const AffineSet& c2, const AnalysisOptions& opts = {}) {
  if (!c1.is_affine() || !c2.is_affine())
    throw UnsupportedOperation("fixset_dr needs affine sets");
  require_dim(c1.dim(), c2.dim());
  const auto d = static_cast<Eigen::Index>(c1.dim());
  const std::vector<AffineSet> pair{c1, c2};
  Vector anchor = exact_projection(Vector::Zero(d), pair, opts);

  const Matrix common = parallel_intersection(pair, opts.rank_cutoff);

  const Matrix b1 = c1.to_span().basis();
  const Matrix b2 = c2.to_span().basis();
  Matrix stacked(b1.cols() + b2.cols(), d);
  stacked << b1.transpose(), b2.transpose();
  const Matrix normals = linalg::null_space(stacked, d, opts.rank_cutoff);

  Matrix dirs(d, common.cols() + normals.cols());
  dirs << common, normals;
  return AffineSet::span(std::move(anchor), linalg::orth(dirs, opts.rank_cutoff));
}

/// Shadow of a Douglas-Rachford iterate: P_{C1}(z).
inline Vector shadow_project(const Vector& z, const AffineSet& c1, const AffineSet& c2) {
  require_dim(c1.dim(), c2.dim());
  return project(z, c1);
}

}  // namespace gkaccel
