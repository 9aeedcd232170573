// gkaccel: cyclic projections and their line-search accelerations from the
// command line.
//
//   gkaccel solve problem.txt --method gk-affine --eps 1e-9 --trace-out trace.csv
//   gkaccel angle-sweep --reps 10 --out sweep.csv
//   gkaccel hyperplane-bench --m 500 --n 250 --reps 10 --out table.csv
//
// Exit codes: 0 converged, 1 usage/parse error, 2 max-iter reached, 3 infeasible.

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gkaccel/gkaccel.hpp"

namespace {

constexpr int kConverged = 0;
constexpr int kUsage = 1;
constexpr int kMaxIter = 2;
constexpr int kInfeasible = 3;

/// Output stream for --out / --trace-out; "-" or empty means stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw std::runtime_error("cannot open '" + path + "' for writing");
    }
  }
  std::ostream& get() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

struct Common {
  std::string out;
  std::uint64_t seed = 0;
  double eps = 0.0;
  std::size_t max_iter = 100000;
};

void add_common(CLI::App* cmd, Common& c, double default_eps) {
  c.eps = default_eps;
  cmd->add_option("--out", c.out, "Output path (default stdout)");
  cmd->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  cmd->add_option("--eps", c.eps, "Termination tolerance")->capture_default_str();
  cmd->add_option("--max-iter", c.max_iter, "Iteration cap")->capture_default_str()->check(CLI::PositiveNumber);
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) parts.push_back(item);
  return parts;
}

int run_solve(const std::string& problem_path, const std::string& method_str, const std::string& criterion,
              const std::string& trace_out, const Common& c) {
  using namespace gkaccel;
  std::ifstream in(problem_path);
  if (!in) {
    std::cerr << "error: cannot open '" << problem_path << "'\n";
    return kUsage;
  }
  Problem prob;
  Method method{};
  try {
    prob = parse_problem(in);
    method = parse_method(method_str);
    require_pair(method, prob.sets);
  } catch (const ParseError& e) {
    std::cerr << problem_path << ":" << e.line() << ": " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }

  Vector target;
  try {
    target = method_target(method, prob.sets, prob.x0);
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kInfeasible;
  }

  SolveConfig cfg;
  cfg.eps = c.eps;
  cfg.max_iter = c.max_iter;
  if (criterion == "distance") {
    cfg.termination = DistanceToSolution{target};
  } else {
    cfg.termination = SuccessiveChange{};
    cfg.reference = target;
  }
  cfg.store_every = 0;

  const auto res = run_method(method, prob.sets, prob.x0, cfg);

  if (!trace_out.empty()) {
    Sink ts(trace_out);
    write_trace_csv(ts.get(), res.trace);
  }
  Sink out(c.out);
  auto& os = out.get();
  os << "method " << method_name(method) << '\n';
  os << "iterations " << res.trace.iterations() << '\n';
  os << "converged " << (res.trace.converged ? "yes" : "no") << '\n';
  os << "x";
  for (auto v : res.answer) os << ' ' << format_real(v, 17);
  os << '\n';
  os << "max_violation " << format_real([&] {
    double worst = 0.0;
    for (const auto& s : prob.sets) worst = std::max(worst, s.residual(res.answer));
    return worst;
  }(), 17) << '\n';
  return res.trace.converged ? kConverged : kMaxIter;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace gkaccel;
  CLI::App app{"Cyclic projections with line-search acceleration"};
  app.require_subcommand(1);

  // solve
  Common solve_c;
  std::string problem_path, method_str = "gk-affine", criterion = "distance", trace_out;
  auto* solve_cmd = app.add_subcommand("solve", "Solve a best-approximation problem from a problem file");
  solve_cmd->add_option("problem", problem_path, "Problem file")->required();
  solve_cmd->add_option("--method", method_str, "cp | gk-affine | sym-cp | accel-sym-cp | dr | accel-dr")
      ->capture_default_str();
  solve_cmd->add_option("--criterion", criterion, "distance (to the exact solution) | change (successive iterates)")
      ->check(CLI::IsMember({"distance", "change"}))
      ->capture_default_str();
  solve_cmd->add_option("--trace-out", trace_out, "Per-iteration CSV");
  add_common(solve_cmd, solve_c, 1e-9);

  // angle-sweep
  Common sweep_c;
  AngleSweepConfig sweep;
  auto* sweep_cmd = app.add_subcommand("angle-sweep", "Iterations versus Friederichs angle for two lines in R^2");
  sweep_cmd->add_option("--theta-min", sweep.theta_min)->capture_default_str();
  sweep_cmd->add_option("--theta-max", sweep.theta_max)->capture_default_str();
  sweep_cmd->add_option("--theta-step", sweep.theta_step)->capture_default_str();
  sweep_cmd->add_option("--reps", sweep.reps)->capture_default_str()->check(CLI::PositiveNumber);
  add_common(sweep_cmd, sweep_c, 1e-9);

  // hyperplane-bench
  Common bench_c;
  HyperplaneBenchConfig bench;
  std::size_t bench_n = 0;
  std::string methods_str = "cp,gk-affine";
  auto* bench_cmd = app.add_subcommand("hyperplane-bench", "Best approximation subject to A x = b, random A");
  bench_cmd->add_option("--m", bench.m, "Ambient dimension")->capture_default_str();
  bench_cmd->add_option("--n", bench_n, "Number of hyperplanes (default m/2)");
  bench_cmd->add_option("--reps", bench.reps)->capture_default_str()->check(CLI::PositiveNumber);
  bench_cmd->add_option("--methods", methods_str, "Comma-separated method list")->capture_default_str();
  add_common(bench_cmd, bench_c, 1e-6);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*solve_cmd) return run_solve(problem_path, method_str, criterion, trace_out, solve_c);

    if (*sweep_cmd) {
      sweep.eps = sweep_c.eps;
      sweep.seed = sweep_c.seed;
      sweep.max_iter = sweep_c.max_iter;
      const auto rows = angle_sweep(sweep);
      Sink out(sweep_c.out);
      write_angle_csv(out.get(), rows);
      for (const auto& r : rows)
        if (r.unconverged) return kMaxIter;
      return kConverged;
    }

    if (*bench_cmd) {
      bench.n = bench_n ? bench_n : bench.m / 2;
      bench.eps = bench_c.eps;
      bench.seed = bench_c.seed;
      bench.max_iter = bench_c.max_iter;
      bench.methods.clear();
      for (const auto& name : split_commas(methods_str)) bench.methods.push_back(parse_method(name));
      if (bench.methods.empty()) throw std::invalid_argument("no methods given");
      const auto rows = hyperplane_bench(bench);
      Sink out(bench_c.out);
      write_bench_csv(out.get(), rows);
      for (const auto& r : rows)
        if (r.unconverged) return kMaxIter;
      return kConverged;
    }
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
