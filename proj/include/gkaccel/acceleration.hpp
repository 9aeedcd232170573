#pragma once

#include <cassert>
#include <cmath>
#include <limits>
#include <optional>
#include <type_traits>
#include <variant>
#include <vector>

#include "gkaccel/operators.hpp"

namespace gkaccel {

namespace tol {
/// |x - Op(x)| <= kFixedPoint (1 + |x|) counts as Op(x) = x.
inline constexpr double kFixedPoint = 1e-14;
/// Oracle intersection points must be fixed to this relative accuracy.
inline constexpr double kOracleWitness = 1e-8;
}  // namespace tol

inline bool is_fixed(const Vector& x, const Vector& opx, double fix_tol = tol::kFixedPoint) {
  return (x - opx).norm() <= fix_tol * (1.0 + x.norm());
}

namespace detail {

inline void reject_if_fixed(const Vector& x, const Vector& opx, double fix_tol) {
  if (is_fixed(x, opx, fix_tol)) throw StepRejected("step size undefined at a fixed point");
}

/// 1/2 + sum_sq / (2 total_sq)
inline double half_plus_ratio(double sum_sq, double total_sq) {
  const double t = 0.5 + sum_sq / (2.0 * total_sq);
  assert(t >= 0.5);
  return t;
}

}  // namespace detail

/// <x - Qx, x> / |x - Qx|^2. Valid when every set is a linear subspace.
inline double step_gk_linear(const Vector& x, const Vector& qx, double fix_tol = tol::kFixedPoint) {
  require_dim(static_cast<std::size_t>(x.size()), static_cast<std::size_t>(qx.size()));
  detail::reject_if_fixed(x, qx, fix_tol);
  const Vector r = x - qx;
  return r.dot(x) / r.squaredNorm();
}

/// Exact line-search step for a cycle of affine projections, from its stages:
/// 1/2 + sum_i |Q_{i-1}x - Q_i x|^2 / (2 |x - Qx|^2).
///
/// For a cycle of general firmly quasi-nonexpansive operators the same value is
/// a lower bound on the exact step.
inline double step_gk_affine(const StageTrace& trace, double fix_tol = tol::kFixedPoint) {
  if (trace.size() < 2) throw std::invalid_argument("trace needs at least one stage");
  detail::reject_if_fixed(trace.input(), trace.output(), fix_tol);
  return detail::half_plus_ratio(trace.sum_sq_steps(), (trace.input() - trace.output()).squaredNorm());
}

/// Step for the symmetric cycle S from its 2n stages S_0 z .. S_{2n-1} z.
inline double step_symmetric(const StageTrace& trace, double fix_tol = tol::kFixedPoint) {
  if (trace.size() < 2 || trace.size() % 2 != 0)
    throw std::invalid_argument("symmetric trace must have 2n stages");
  return step_gk_affine(trace, fix_tol);
}

/// Step for the symmetric Douglas-Rachford operator T = T_{C2,C1} T_{C1,C2},
/// given z, T_{C1,C2} z and T z.
inline double step_dr(const Vector& z, const Vector& tz_half, const Vector& tz,
                      double fix_tol = tol::kFixedPoint) {
  require_dim(static_cast<std::size_t>(z.size()), static_cast<std::size_t>(tz_half.size()));
  require_dim(static_cast<std::size_t>(z.size()), static_cast<std::size_t>(tz.size()));
  detail::reject_if_fixed(z, tz, fix_tol);
  return detail::half_plus_ratio((z - tz_half).squaredNorm() + (tz_half - tz).squaredNorm(),
                                 (z - tz).squaredNorm());
}

/// <x - Qx, x - m> / |x - Qx|^2 for a known common fixed point m.
inline double step_oracle(const Vector& x, const Vector& qx, const Vector& m,
                          double fix_tol = tol::kFixedPoint) {
  require_dim(static_cast<std::size_t>(x.size()), static_cast<std::size_t>(qx.size()));
  require_dim(static_cast<std::size_t>(x.size()), static_cast<std::size_t>(m.size()));
  detail::reject_if_fixed(x, qx, fix_tol);
  const Vector r = x - qx;
  return r.dot(x - m) / r.squaredNorm();
}

// -- step rules ---------------------------------------------------------------

struct UnitStep {};
struct GKLinearStep {};
struct GKAffineStep {};
struct SymmetricStep {};
struct SymmetricDRStep {};

/// Line search towards a known point m of the fixed set.
class OracleStep {
 public:
  template <class Op>
  static OracleStep make(Vector m, const Op& op) {
    require_dim(op.dim(), static_cast<std::size_t>(m.size()));
    if ((op.apply(m) - m).norm() > tol::kOracleWitness * (1.0 + m.norm()))
      throw std::invalid_argument("oracle point is not a fixed point of the operator");
    return OracleStep(std::move(m));
  }

  const Vector& point() const noexcept { return m_; }

 private:
  explicit OracleStep(Vector m) : m_(std::move(m)) {}
  Vector m_;
};

using StepRule = std::variant<UnitStep, GKLinearStep, GKAffineStep, SymmetricStep, SymmetricDRStep, OracleStep>;

// -- solver --------------------------------------------------------------------

struct DistanceToSolution {
  Vector solution;
};
struct SuccessiveChange {};

struct SolveConfig {
  double eps = 1e-9;
  std::size_t max_iter = 100000;
  std::variant<DistanceToSolution, SuccessiveChange> termination = SuccessiveChange{};
  double fix_tol = tol::kFixedPoint;
  /// Keep every j-th iterate (plus the last); 0 keeps only the last.
  std::size_t store_every = 1;
  /// Known solution for distance/contraction columns when terminating on
  /// successive change.
  std::optional<Vector> reference;

  void validate() const {
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    if (max_iter < 1) throw std::invalid_argument("max_iter must be at least 1");
    if (!(fix_tol > 0.0)) throw std::invalid_argument("fix_tol must be positive");
  }

  const Vector* solution() const {
    if (const auto* d = std::get_if<DistanceToSolution>(&termination)) return &d->solution;
    return reference ? &*reference : nullptr;
  }
};

/// One row per iterate x_k. `step` is the t that produced x_k from x_{k-1}
/// (NaN for k = 0), likewise `successive_change`.
struct IterationRecord {
  std::size_t k = 0;
  double step = std::numeric_limits<double>::quiet_NaN();
  double successive_change = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> dist_to_solution;
  /// |x_k - x*| / |x_{k-1} - x*|
  std::optional<double> observed_factor;
};

struct IterationTrace {
  std::vector<IterationRecord> records;
  /// (k, x_k) for stored iterates.
  std::vector<std::pair<std::size_t, Vector>> iterates;
  Vector final_x;
  bool converged = false;
  /// Operator applications, including the initial z_0 = Op(x_0) of the
  /// symmetric variants.
  std::size_t applications = 0;

  /// Index of the final iterate.
  std::size_t iterations() const { return records.empty() ? 0 : records.back().k; }
};

namespace detail {

template <class Op>
void require_linear(const Op& op) {
  const Vector zero = Vector::Zero(static_cast<Eigen::Index>(op.dim()));
  for (const auto& s : op.sets())
    if (!s.contains(zero, 1e-12)) throw std::invalid_argument("GK linear step needs linear subspaces");
}

/// x_{k+1} = x_k + t_k (Op(x_k) - x_k), with `advance(x)` returning (Op(x), t).
template <class Advance>
IterationTrace iterate(Vector x, const SolveConfig& cfg, std::size_t applications, Advance&& advance) {
  cfg.validate();
  IterationTrace out;
  out.applications = applications;
  const Vector* sol = cfg.solution();
  if (sol) require_dim(static_cast<std::size_t>(x.size()), static_cast<std::size_t>(sol->size()));
  const bool by_distance = std::holds_alternative<DistanceToSolution>(cfg.termination);

  auto store = [&](std::size_t k, const Vector& v, bool last) {
    if (last || (cfg.store_every != 0 && k % cfg.store_every == 0)) {
      if (!out.iterates.empty() && out.iterates.back().first == k) return;
      out.iterates.emplace_back(k, v);
    }
  };

  IterationRecord rec;
  if (sol) rec.dist_to_solution = (x - *sol).norm();
  out.records.push_back(rec);
  store(0, x, false);

  if (by_distance && *rec.dist_to_solution < cfg.eps) {
    out.converged = true;
  } else {
    for (std::size_t k = 1; k <= cfg.max_iter; ++k) {
      auto [opx, t] = advance(x);
      ++out.applications;
      Vector next = t == 1.0 ? std::move(opx) : Vector(x + t * (opx - x));
      if (!next.allFinite()) throw NumericalFailure(k, "non-finite iterate");

      IterationRecord r;
      r.k = k;
      r.step = t;
      r.successive_change = (next - x).norm();
      if (sol) {
        r.dist_to_solution = (next - *sol).norm();
        const double prev = *out.records.back().dist_to_solution;
        if (prev > cfg.eps * cfg.eps) r.observed_factor = *r.dist_to_solution / prev;
      }
      out.records.push_back(r);
      x = std::move(next);
      store(k, x, false);

      const double crit = by_distance ? *r.dist_to_solution : r.successive_change;
      if (crit < cfg.eps) {
        out.converged = true;
        break;
      }
    }
  }
  store(out.records.back().k, x, true);
  out.final_x = std::move(x);
  return out;
}

}  // namespace detail

/// Runs the (possibly accelerated) fixed-point iteration of a projection cycle.
///
/// Symmetric rules start from z_0 = S(x_0). GK rules take the unit step when
/// the iterate is already fixed. Throws std::invalid_argument for rules that do
/// not fit the operator.
inline IterationTrace solve(const CycleOperator& op, const StepRule& rule, const Vector& x0,
                            const SolveConfig& cfg) {
  require_dim(op.dim(), static_cast<std::size_t>(x0.size()));
  const double ft = cfg.fix_tol;
  return std::visit(
      [&](const auto& r) -> IterationTrace {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, UnitStep>) {
          return detail::iterate(x0, cfg, 0, [&](const Vector& x) {
            return std::pair<Vector, double>{op.apply(x), 1.0};
          });
        } else if constexpr (std::is_same_v<R, GKLinearStep>) {
          detail::require_linear(op);
          return detail::iterate(x0, cfg, 0, [&](const Vector& x) {
            Vector qx = op.apply(x);
            const double t = is_fixed(x, qx, ft) ? 1.0 : step_gk_linear(x, qx, ft);
            return std::pair<Vector, double>{std::move(qx), t};
          });
        } else if constexpr (std::is_same_v<R, GKAffineStep> || std::is_same_v<R, SymmetricStep>) {
          std::size_t init = 0;
          Vector start = x0;
          if constexpr (std::is_same_v<R, SymmetricStep>) {
            if (op.mode() != CycleMode::Symmetric)
              throw std::invalid_argument("symmetric step needs a symmetric cycle");
            start = op.apply(x0);
            init = 1;
          }
          return detail::iterate(std::move(start), cfg, init, [&](const Vector& x) {
            auto [qx, acc] = op.apply_accumulate(x);
            const double t =
                is_fixed(x, qx, ft) ? 1.0 : detail::half_plus_ratio(acc, (x - qx).squaredNorm());
            return std::pair<Vector, double>{std::move(qx), t};
          });
        } else if constexpr (std::is_same_v<R, OracleStep>) {
          return detail::iterate(x0, cfg, 0, [&](const Vector& x) {
            Vector qx = op.apply(x);
            const double t = is_fixed(x, qx, ft) ? 1.0 : step_oracle(x, qx, r.point(), ft);
            return std::pair<Vector, double>{std::move(qx), t};
          });
        } else {
          throw std::invalid_argument("Douglas-Rachford step rule used with a projection cycle");
        }
      },
      rule);
}

/// Runs the (possibly accelerated) Douglas-Rachford iteration. The symmetric
/// rule starts from z_0 = T(x_0).
inline IterationTrace solve(const DouglasRachfordOperator& op, const StepRule& rule, const Vector& x0,
                            const SolveConfig& cfg) {
  require_dim(op.dim(), static_cast<std::size_t>(x0.size()));
  const double ft = cfg.fix_tol;
  return std::visit(
      [&](const auto& r) -> IterationTrace {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, UnitStep>) {
          return detail::iterate(x0, cfg, 0, [&](const Vector& x) {
            return std::pair<Vector, double>{op.apply(x), 1.0};
          });
        } else if constexpr (std::is_same_v<R, SymmetricDRStep>) {
          if (!op.symmetric()) throw std::invalid_argument("DR step needs the symmetric operator");
          return detail::iterate(op.apply(x0), cfg, 1, [&](const Vector& z) {
            Vector half = op.forward(z);
            Vector tz = op.backward(half);
            const double t = is_fixed(z, tz, ft) ? 1.0 : step_dr(z, half, tz, ft);
            return std::pair<Vector, double>{std::move(tz), t};
          });
        } else if constexpr (std::is_same_v<R, OracleStep>) {
          return detail::iterate(x0, cfg, 0, [&](const Vector& x) {
            Vector tx = op.apply(x);
            const double t = is_fixed(x, tx, ft) ? 1.0 : step_oracle(x, tx, r.point(), ft);
            return std::pair<Vector, double>{std::move(tx), t};
          });
        } else {
          throw std::invalid_argument("projection-cycle step rule used with a Douglas-Rachford operator");
        }
      },
      rule);
}

}  // namespace gkaccel
