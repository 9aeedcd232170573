#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "gkaccel/errors.hpp"
#include "gkaccel/linalg.hpp"

namespace gkaccel {

namespace tol {
/// Orthonormality accepted as-is by the Span constructor.
inline constexpr double kOrthonormal = 1e-12;
/// Drift up to this is repaired by re-orthonormalizing; beyond it is rejected.
inline constexpr double kRepairableDrift = 1e-8;
/// Membership test "p in S", relative to (1 + |x|).
inline constexpr double kMembership = 1e-10;
}  // namespace tol

/// A closed affine subspace of R^d, or a closed half-space.
///
/// Affine sets come in two representations. Hyperplanes {x : <a,x> = b} project
/// in O(d); spans {p + B y} carry an orthonormal basis B of the parallel linear
/// subspace and are what angle computations need. `to_span()` converts the
/// former into the latter. Half-spaces {x : <a,x> <= b} are convex but not
/// affine and only support projection.
///
/// Values are immutable after construction.
class AffineSet {
 public:
  enum class Kind { Hyperplane, Span, HalfSpace };

  static AffineSet hyperplane(Vector normal, double offset) {
    return AffineSet(Kind::Hyperplane, std::move(normal), offset);
  }

  static AffineSet halfspace(Vector normal, double offset) {
    return AffineSet(Kind::HalfSpace, std::move(normal), offset);
  }

  /// `basis` columns must be orthonormal to 1e-12; drift up to 1e-8 is repaired.
  static AffineSet span(Vector anchor, Matrix basis) {
    require_dim(static_cast<std::size_t>(anchor.size()), static_cast<std::size_t>(basis.rows()));
    if (basis.cols() > anchor.size())
      throw std::invalid_argument("span basis has more vectors than the ambient dimension");
    const double drift = linalg::orthonormality_drift(basis);
    if (!(drift <= tol::kRepairableDrift))
      throw std::invalid_argument("span basis is not orthonormal (drift " +
                                  std::to_string(drift) + ")");
    if (drift > tol::kOrthonormal) basis = reorthonormalize(basis);
    AffineSet s;
    s.kind_ = Kind::Span;
    s.point_ = std::move(anchor);
    s.basis_ = std::move(basis);
    return s;
  }

  static AffineSet span(Vector anchor, const std::vector<Vector>& basis) {
    Matrix b(anchor.size(), static_cast<Eigen::Index>(basis.size()));
    for (std::size_t j = 0; j < basis.size(); ++j) {
      require_dim(static_cast<std::size_t>(anchor.size()), static_cast<std::size_t>(basis[j].size()));
      b.col(static_cast<Eigen::Index>(j)) = basis[j];
    }
    return span(std::move(anchor), std::move(b));
  }

  /// Span of arbitrary (possibly dependent) direction columns through `anchor`.
  static AffineSet from_directions(Vector anchor, const Matrix& directions,
                                   double rel_cutoff = kDefaultRankCutoff) {
    require_dim(static_cast<std::size_t>(anchor.size()), static_cast<std::size_t>(directions.rows()));
    return span(std::move(anchor), linalg::orth(directions, rel_cutoff));
  }

  /// The singleton {p}.
  static AffineSet point(Vector p) {
    const auto d = p.size();
    return span(std::move(p), Matrix(d, 0));
  }

  Kind kind() const noexcept { return kind_; }
  bool is_affine() const noexcept { return kind_ != Kind::HalfSpace; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(point_.size()); }

  /// Hyperplane / half-space data.
  const Vector& normal() const {
    require_halfspace_or_hyperplane();
    return point_;
  }
  double offset() const {
    require_halfspace_or_hyperplane();
    return offset_;
  }
  double normal_sq() const {
    require_halfspace_or_hyperplane();
    return normal_sq_;
  }

  /// Span data.
  const Vector& anchor() const {
    require_span();
    return point_;
  }
  const Matrix& basis() const {
    require_span();
    return basis_;
  }

  /// Dimension of the parallel linear subspace.
  std::size_t affine_dim() const {
    switch (kind_) {
      case Kind::Span:
        return static_cast<std::size_t>(basis_.cols());
      case Kind::Hyperplane:
        return dim() - 1;
      case Kind::HalfSpace:
        break;
    }
    throw UnsupportedOperation("half-spaces have no affine dimension");
  }

  /// Equivalent Span-form set. The hyperplane normal is completed to an
  /// orthonormal basis with a Householder reflection.
  AffineSet to_span() const {
    switch (kind_) {
      case Kind::Span:
        return *this;
      case Kind::Hyperplane: {
        const Vector unit = point_ / std::sqrt(normal_sq_);
        Matrix b = linalg::complement(unit, point_.size());
        // one re-orthogonalization pass against the normal
        b -= unit * (unit.transpose() * b);
        return span(unit * (offset_ / std::sqrt(normal_sq_)), reorthonormalize(b));
      }
      case Kind::HalfSpace:
        break;
    }
    throw UnsupportedOperation("half-spaces have no span form");
  }

  /// Orthonormal normals N (columns) and right-hand side r with S = {x : N^T x = r}.
  std::pair<Matrix, Vector> constraints() const {
    switch (kind_) {
      case Kind::Hyperplane: {
        const double n = std::sqrt(normal_sq_);
        Matrix nm = point_ / n;
        Vector r(1);
        r[0] = offset_ / n;
        return {std::move(nm), std::move(r)};
      }
      case Kind::Span: {
        Matrix nm = linalg::complement(basis_, point_.size());
        Vector r = nm.transpose() * point_;
        return {std::move(nm), std::move(r)};
      }
      case Kind::HalfSpace:
        break;
    }
    throw UnsupportedOperation("half-spaces have no equality-constraint form");
  }

  /// The set S - y.
  AffineSet translated(const Vector& y) const {
    require_dim(dim(), static_cast<std::size_t>(y.size()));
    AffineSet s = *this;
    if (kind_ == Kind::Span)
      s.point_ = point_ - y;
    else
      s.offset_ = offset_ - point_.dot(y);
    return s;
  }

  /// The linear subspace parallel to this set.
  AffineSet linear_part() const {
    if (kind_ == Kind::HalfSpace) throw UnsupportedOperation("half-spaces have no parallel subspace");
    AffineSet s = *this;
    if (kind_ == Kind::Span)
      s.point_.setZero();
    else
      s.offset_ = 0.0;
    return s;
  }

  /// Constraint violation of x (0 inside the set).
  double residual(const Vector& x) const {
    require_dim(dim(), static_cast<std::size_t>(x.size()));
    switch (kind_) {
      case Kind::Hyperplane:
        return std::abs(point_.dot(x) - offset_) / std::sqrt(normal_sq_);
      case Kind::HalfSpace:
        return std::max(0.0, point_.dot(x) - offset_) / std::sqrt(normal_sq_);
      case Kind::Span: {
        const Vector r = x - point_;
        return (r - basis_ * (basis_.transpose() * r)).norm();
      }
    }
    return 0.0;
  }

  bool contains(const Vector& x, double rel_tol = tol::kMembership) const {
    return residual(x) <= rel_tol * (1.0 + x.norm());
  }

 private:
  AffineSet() = default;

  AffineSet(Kind kind, Vector normal, double offset)
      : kind_(kind), point_(std::move(normal)), offset_(offset) {
    if (point_.size() < 1) throw std::invalid_argument("ambient dimension must be at least 1");
    if (!point_.allFinite() || !std::isfinite(offset_))
      throw std::invalid_argument("non-finite set data");
    normal_sq_ = point_.squaredNorm();
    if (!(normal_sq_ > 0.0)) throw std::invalid_argument("normal vector must be nonzero");
  }

  static Matrix reorthonormalize(const Matrix& b) {
    if (b.cols() == 0) return b;
    Eigen::HouseholderQR<Matrix> qr(b);
    Matrix q = qr.householderQ() * Matrix::Identity(b.rows(), b.cols());
    return q;
  }

  void require_span() const {
    if (kind_ != Kind::Span) throw UnsupportedOperation("set is not in span form");
  }
  void require_halfspace_or_hyperplane() const {
    if (kind_ == Kind::Span) throw UnsupportedOperation("set is in span form");
  }

  Kind kind_ = Kind::Span;
  Vector point_;  // normal for hyperplane/half-space, anchor for span
  double offset_ = 0.0;
  double normal_sq_ = 0.0;
  Matrix basis_;
};

/// Nearest point of S to x. Defined for every kind, including half-spaces.
inline Vector project(const Vector& x, const AffineSet& s) {
  require_dim(s.dim(), static_cast<std::size_t>(x.size()));
  switch (s.kind()) {
    case AffineSet::Kind::Hyperplane: {
      const double viol = s.normal().dot(x) - s.offset();
      return x - (viol / s.normal_sq()) * s.normal();
    }
    case AffineSet::Kind::HalfSpace: {
      const double viol = s.normal().dot(x) - s.offset();
      if (viol <= 0.0) return x;
      return x - (viol / s.normal_sq()) * s.normal();
    }
    case AffineSet::Kind::Span: {
      const Vector& p = s.anchor();
      if (s.basis().cols() == 0) return p;
      return p + s.basis() * (s.basis().transpose() * (x - p));
    }
  }
  return x;
}

/// Projection onto a half-space: x itself when <a,x> <= b.
inline Vector project_halfspace(const Vector& x, const AffineSet& h) {
  if (h.kind() != AffineSet::Kind::HalfSpace)
    throw UnsupportedOperation("project_halfspace expects a half-space");
  return project(x, h);
}

/// 2 P_S(x) - x. Affine sets only.
inline Vector reflect(const Vector& x, const AffineSet& s) {
  if (!s.is_affine()) throw UnsupportedOperation("reflector through a half-space is not supported");
  return 2.0 * project(x, s) - x;
}

/// P_{S-y}(x-y) + y, which must agree with project(x, S).
inline Vector translate_check(const Vector& x, const AffineSet& s, const Vector& y) {
  require_dim(s.dim(), static_cast<std::size_t>(y.size()));
  return project(x - y, s.translated(y)) + y;
}

}  // namespace gkaccel
