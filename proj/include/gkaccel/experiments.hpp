#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "gkaccel/acceleration.hpp"
#include "gkaccel/analysis.hpp"
#include "gkaccel/random.hpp"

namespace gkaccel {

enum class Method { CP, GKAffine, SymCP, AccelSymCP, DR, AccelDR };

inline Method parse_method(const std::string& name) {
  if (name == "cp") return Method::CP;
  if (name == "gk-affine" || name == "accel-cp") return Method::GKAffine;
  if (name == "sym-cp") return Method::SymCP;
  if (name == "accel-sym-cp") return Method::AccelSymCP;
  if (name == "dr") return Method::DR;
  if (name == "accel-dr") return Method::AccelDR;
  throw std::invalid_argument("unknown method '" + name + "'");
}

inline const char* method_name(Method m) {
  switch (m) {
    case Method::CP: return "cp";
    case Method::GKAffine: return "gk-affine";
    case Method::SymCP: return "sym-cp";
    case Method::AccelSymCP: return "accel-sym-cp";
    case Method::DR: return "dr";
    case Method::AccelDR: return "accel-dr";
  }
  return "?";
}

inline bool is_dr(Method m) { return m == Method::DR || m == Method::AccelDR; }

inline void require_pair(Method m, const std::vector<AffineSet>& sets) {
  if (is_dr(m) && sets.size() != 2)
    throw std::invalid_argument(std::string(method_name(m)) + " needs exactly two sets");
}

/// Point the iterates of `m` converge to: P_M(x0) for projection cycles,
/// P_{Fix T}(x0) for Douglas-Rachford.
inline Vector method_target(Method m, const std::vector<AffineSet>& sets, const Vector& x0) {
  require_pair(m, sets);
  if (is_dr(m)) return project(x0, fixset_dr(sets[0], sets[1]));
  return exact_projection(x0, sets);
}

struct MethodResult {
  IterationTrace trace;
  /// The final iterate, or its shadow P_{M_1}(z) for Douglas-Rachford.
  Vector answer;
};

inline MethodResult run_method(Method m, const std::vector<AffineSet>& sets, const Vector& x0,
                               const SolveConfig& cfg) {
  require_pair(m, sets);
  MethodResult res;
  switch (m) {
    case Method::CP:
      res.trace = solve(CycleOperator(sets), UnitStep{}, x0, cfg);
      break;
    case Method::GKAffine:
      res.trace = solve(CycleOperator(sets), GKAffineStep{}, x0, cfg);
      break;
    case Method::SymCP:
      res.trace = solve(CycleOperator(sets, CycleMode::Symmetric), UnitStep{}, x0, cfg);
      break;
    case Method::AccelSymCP:
      res.trace = solve(CycleOperator(sets, CycleMode::Symmetric), SymmetricStep{}, x0, cfg);
      break;
    case Method::DR:
      res.trace = solve(DouglasRachfordOperator(sets[0], sets[1], true), UnitStep{}, x0, cfg);
      break;
    case Method::AccelDR:
      res.trace = solve(DouglasRachfordOperator(sets[0], sets[1], true), SymmetricDRStep{}, x0, cfg);
      break;
  }
  res.answer = is_dr(m) ? shadow_project(res.trace.final_x, sets[0], sets[1]) : res.trace.final_x;
  return res;
}

// -- formatting ------------------------------------------------------------------

inline std::string format_real(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

// -- angle sweep -----------------------------------------------------------------

/// Two lines through x* in R^2: the horizontal one and the one at angle theta.
inline std::vector<AffineSet> two_lines(double theta, const Vector& xstar) {
  Vector n1(2), n2(2);
  n1 << 0.0, 1.0;
  n2 << -std::sin(theta), std::cos(theta);
  const double b2 = n2.dot(xstar);
  return {AffineSet::hyperplane(n1, xstar[1]), AffineSet::hyperplane(n2, b2)};
}

struct AngleSweepConfig {
  double theta_min = 0.01;
  double theta_max = 1.57;
  double theta_step = 0.01;
  std::size_t reps = 10;
  double eps = 1e-9;
  std::uint64_t seed = 0;
  std::size_t max_iter = 100000;
  double start_norm = 10.0;
};

struct AngleRow {
  double theta = 0.0;
  Method method = Method::CP;
  double mean_iterations = 0.0;
  double std_iterations = 0.0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  std::size_t unconverged = 0;
};

inline std::vector<double> theta_grid(const AngleSweepConfig& c) {
  if (!(c.theta_min > 0.0) || !(c.theta_max >= c.theta_min) || !(c.theta_max < std::numbers::pi / 2))
    throw std::invalid_argument("need 0 < theta-min <= theta-max < pi/2");
  if (!(c.theta_step > 0.0)) throw std::invalid_argument("theta-step must be positive");
  const auto count = static_cast<std::size_t>(std::floor((c.theta_max - c.theta_min) / c.theta_step + 1e-9)) + 1;
  std::vector<double> g(count);
  for (std::size_t i = 0; i < count; ++i) g[i] = c.theta_min + static_cast<double>(i) * c.theta_step;
  return g;
}

namespace detail {

inline std::pair<double, double> mean_std(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
  return {mean, sd};
}

}  // namespace detail

/// CP against GK-affine on the two-line problem for each angle in the grid.
/// Replication r starts from a point drawn with seed + r; x* for the i-th angle
/// comes from its own stream.
inline std::vector<AngleRow> angle_sweep(const AngleSweepConfig& c) {
  if (c.reps < 1) throw std::invalid_argument("reps must be at least 1");
  const auto grid = theta_grid(c);
  std::vector<AngleRow> rows;
  for (std::size_t ti = 0; ti < grid.size(); ++ti) {
    const double theta = grid[ti];
    Rng inst(derive_seed(c.seed, ti));
    const Vector xstar = inst.normal_vector(2);
    const auto sets = two_lines(theta, xstar);

    SolveConfig cfg;
    cfg.eps = c.eps;
    cfg.max_iter = c.max_iter;
    cfg.termination = DistanceToSolution{xstar};
    cfg.store_every = 0;

    for (Method m : {Method::CP, Method::GKAffine}) {
      std::vector<double> its;
      AngleRow row{theta, m, 0.0, 0.0, c.reps, c.seed, 0};
      for (std::size_t r = 0; r < c.reps; ++r) {
        Rng rep(c.seed + r);
        const Vector x0 = rep.on_sphere(2, c.start_norm);
        const auto res = run_method(m, sets, x0, cfg);
        its.push_back(static_cast<double>(res.trace.iterations()));
        if (!res.trace.converged) ++row.unconverged;
      }
      std::tie(row.mean_iterations, row.std_iterations) = detail::mean_std(its);
      rows.push_back(row);
    }
  }
  return rows;
}

inline void write_angle_csv(std::ostream& out, const std::vector<AngleRow>& rows) {
  out << "theta,method,mean_iterations,std_iterations,reps,seed\n";
  for (const auto& r : rows)
    out << format_real(r.theta, 6) << ',' << method_name(r.method) << ',' << format_real(r.mean_iterations, 6)
        << ',' << format_real(r.std_iterations, 6) << ',' << r.reps << ',' << r.seed << '\n';
}

// -- hyperplane benchmark -----------------------------------------------------------

struct HyperplaneInstance {
  std::vector<AffineSet> sets;
  Vector xstar;

  /// |A x - b|
  double residual(const Vector& x) const {
    double s = 0.0;
    for (const auto& h : sets) {
      const double r = h.normal().dot(x) - h.offset();
      s += r * r;
    }
    return std::sqrt(s);
  }
};

/// n hyperplanes <a_i, x> = b_i in R^m with standard normal A and x*, b = A x*.
inline HyperplaneInstance make_hyperplane_instance(std::size_t m, std::size_t n, std::uint64_t seed) {
  if (n < 1 || n >= m) throw std::invalid_argument("need 1 <= n < m");
  Rng rng(derive_seed(seed, 0xb0b));
  const auto dm = static_cast<Eigen::Index>(m);
  HyperplaneInstance inst;
  std::vector<Vector> rows;
  rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) rows.push_back(rng.normal_vector(dm));
  inst.xstar = rng.normal_vector(dm);
  inst.sets.reserve(n);
  for (auto& a : rows) {
    const double b = a.dot(inst.xstar);
    inst.sets.push_back(AffineSet::hyperplane(std::move(a), b));
  }
  return inst;
}

struct HyperplaneBenchConfig {
  std::size_t m = 500;
  std::size_t n = 250;
  std::size_t reps = 10;
  double eps = 1e-6;
  std::uint64_t seed = 0;
  std::vector<Method> methods{Method::CP, Method::GKAffine};
  std::size_t max_iter = 100000;
  double start_norm = 10.0;
};

struct BenchRow {
  std::size_t m = 0;
  std::size_t n = 0;
  Method method = Method::CP;
  double mean_iterations = 0.0;
  double mean_residual = 0.0;
  double mean_time_s = 0.0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  std::size_t unconverged = 0;
  /// Mean residual of the first unaccelerated iterate Q(x0).
  double mean_first_cp_residual = 0.0;
};

/// Each method runs from the same `reps` start points (seed + r) and stops
/// when |x_k - x_{k-1}| < eps. Time covers the solve loop only.
inline std::vector<BenchRow> hyperplane_bench(const HyperplaneBenchConfig& c) {
  if (c.reps < 1) throw std::invalid_argument("reps must be at least 1");
  const auto inst = make_hyperplane_instance(c.m, c.n, c.seed);
  std::vector<Vector> starts;
  for (std::size_t r = 0; r < c.reps; ++r) starts.push_back(Rng(c.seed + r).on_sphere(static_cast<Eigen::Index>(c.m), c.start_norm));

  double first_res = 0.0;
  const CycleOperator q(inst.sets);
  for (const auto& x0 : starts) first_res += inst.residual(q.apply(x0));
  first_res /= static_cast<double>(c.reps);

  SolveConfig cfg;
  cfg.eps = c.eps;
  cfg.max_iter = c.max_iter;
  cfg.termination = SuccessiveChange{};
  cfg.store_every = 0;

  std::vector<BenchRow> rows;
  for (Method m : c.methods) {
    require_pair(m, inst.sets);
    BenchRow row;
    row.m = c.m;
    row.n = c.n;
    row.method = m;
    row.reps = c.reps;
    row.seed = c.seed;
    row.mean_first_cp_residual = first_res;
    for (const auto& x0 : starts) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto res = run_method(m, inst.sets, x0, cfg);
      const auto t1 = std::chrono::steady_clock::now();
      row.mean_iterations += static_cast<double>(res.trace.iterations());
      row.mean_residual += inst.residual(res.answer);
      row.mean_time_s += std::chrono::duration<double>(t1 - t0).count();
      if (!res.trace.converged) ++row.unconverged;
    }
    const auto reps = static_cast<double>(c.reps);
    row.mean_iterations /= reps;
    row.mean_residual /= reps;
    row.mean_time_s /= reps;
    rows.push_back(row);
  }
  return rows;
}

inline void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "m,n,method,mean_iterations,mean_residual,mean_time_s,reps,seed\n";
  for (const auto& r : rows)
    out << r.m << ',' << r.n << ',' << method_name(r.method) << ',' << format_real(r.mean_iterations, 6) << ','
        << format_real(r.mean_residual, 6) << ',' << format_real(r.mean_time_s, 6) << ',' << r.reps << ','
        << r.seed << '\n';
}

/// k,t_k,successive_change,dist_to_solution with 17 significant digits.
/// Undefined entries (k = 0, or no known solution) are left empty.
inline void write_trace_csv(std::ostream& out, const IterationTrace& trace) {
  out << "k,t_k,successive_change,dist_to_solution\n";
  for (const auto& r : trace.records) {
    out << r.k << ',';
    if (r.k > 0) out << format_real(r.step, 17) << ',' << format_real(r.successive_change, 17);
    else out << ',';
    out << ',';
    if (r.dist_to_solution) out << format_real(*r.dist_to_solution, 17);
    out << '\n';
  }
}

}  // namespace gkaccel
