#include <gtest/gtest.h>

#include <sstream>

#include "gkaccel/experiments.hpp"
#include "gkaccel/problem_io.hpp"
#include "test_util.hpp"

using namespace gkaccel;
using gkaccel::test::vec;

namespace {

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST(ProblemFile, ParsesHyperplanesAndPoints) {
  const auto p = parse_problem(
      "# two lines in the plane\n"
      "dim 2\n"
      "x0 3 4\n"
      "\n"
      "hyperplane 1 1 1   # x + y = 1\n"
      "hyperplane 0 1 0.5\n"
      "point 0.5 0.5\n");
  EXPECT_EQ(p.dim, 2u);
  EXPECT_EQ(p.x0, vec({3, 4}));
  ASSERT_EQ(p.sets.size(), 3u);
  EXPECT_EQ(p.sets[0].kind(), AffineSet::Kind::Hyperplane);
  EXPECT_EQ(p.sets[0].offset(), 1.0);
  EXPECT_EQ(p.sets[2].affine_dim(), 0u);
}

TEST(ProblemFile, ErrorsCarryLineNumbers) {
  auto line_of = [](const std::string& text) -> std::size_t {
    try {
      parse_problem(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  EXPECT_EQ(line_of("dim 2\nx0 1\nhyperplane 1 0 0\n"), 2u);
  EXPECT_EQ(line_of("dim 2\nx0 1 2\nhyperplane 1 0 zero\n"), 3u);
  EXPECT_EQ(line_of("dim 2\nx0 1 2\nhyperplane 1 0 1\nplane 1 0\n"), 4u);
  EXPECT_EQ(line_of("x0 1 2\n"), 1u);
  EXPECT_EQ(line_of("dim 2\nx0 1 2\nhyperplane 0 0 1\n"), 3u);
  EXPECT_EQ(line_of("dim 2\nx0 1 2\npoint 1 2 3\n"), 3u);
  EXPECT_EQ(line_of("dim -1\n"), 1u);
  EXPECT_NE(line_of("dim 2\nx0 1 2\n"), 0u);
}

TEST(ProblemFile, WriteThenParse) {
  Rng rng(40);
  Problem p;
  p.dim = 4;
  p.x0 = rng.normal_vector(4);
  for (int i = 0; i < 3; ++i) p.sets.push_back(AffineSet::hyperplane(rng.normal_vector(4), rng.normal()));
  p.sets.push_back(AffineSet::point(rng.normal_vector(4)));
  std::ostringstream out;
  write_problem(out, p);
  const auto q = parse_problem(out.str());
  EXPECT_EQ(q.x0, p.x0);
  ASSERT_EQ(q.sets.size(), p.sets.size());
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(q.sets[i].normal(), p.sets[i].normal());
    EXPECT_EQ(q.sets[i].offset(), p.sets[i].offset());
  }
  EXPECT_EQ(q.sets[3].anchor(), p.sets[3].anchor());
}

TEST(Methods, NamesRoundTrip) {
  for (auto m : {Method::CP, Method::GKAffine, Method::SymCP, Method::AccelSymCP, Method::DR, Method::AccelDR})
    EXPECT_EQ(parse_method(method_name(m)), m);
  EXPECT_EQ(parse_method("accel-cp"), Method::GKAffine);
  EXPECT_THROW(parse_method("newton"), std::invalid_argument);
}

TEST(Methods, EveryMethodSolvesATwoLineProblem) {
  const Vector xstar = vec({1.5, -0.5});
  const auto sets = two_lines(0.6, xstar);
  const Vector x0 = vec({-4, 7});
  for (auto m : {Method::CP, Method::GKAffine, Method::SymCP, Method::AccelSymCP, Method::DR, Method::AccelDR}) {
    SolveConfig cfg;
    cfg.termination = DistanceToSolution{method_target(m, sets, x0)};
    cfg.eps = 1e-11;
    const auto res = run_method(m, sets, x0, cfg);
    EXPECT_TRUE(res.trace.converged) << method_name(m);
    EXPECT_LE((res.answer - xstar).norm(), 1e-9) << method_name(m);
  }
}

TEST(Methods, DrNeedsTwoSets) {
  Rng rng(41);
  const auto sets = test::random_consistent_sets(rng, 4, 3);
  EXPECT_THROW(run_method(Method::AccelDR, sets, Vector::Zero(4), SolveConfig{}), std::invalid_argument);
}

TEST(AngleSweep, GridAndValidation) {
  AngleSweepConfig c;
  EXPECT_EQ(theta_grid(c).size(), 157u);
  EXPECT_DOUBLE_EQ(theta_grid(c).back(), 1.57);
  c.theta_max = 1.6;
  EXPECT_THROW(theta_grid(c), std::invalid_argument);
  c.theta_min = 0.0;
  c.theta_max = 1.0;
  EXPECT_THROW(theta_grid(c), std::invalid_argument);
}

TEST(AngleSweep, RowsAndSchema) {
  AngleSweepConfig c;
  c.theta_min = 0.5;
  c.theta_max = 0.7;
  c.theta_step = 0.1;
  c.reps = 3;
  c.seed = 5;
  const auto rows = angle_sweep(c);
  ASSERT_EQ(rows.size(), 6u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.reps, 3u);
    EXPECT_GE(r.mean_iterations, 0.0);
    EXPECT_EQ(r.unconverged, 0u);
  }
  std::ostringstream a, b;
  write_angle_csv(a, rows);
  write_angle_csv(b, angle_sweep(c));
  EXPECT_EQ(first_line(a.str()), "theta,method,mean_iterations,std_iterations,reps,seed");
  EXPECT_EQ(a.str(), b.str());
  EXPECT_NE(a.str().find("\n0.6,gk-affine,"), std::string::npos);
}

TEST(HyperplaneBench, InstanceIsConsistent) {
  const auto inst = make_hyperplane_instance(30, 12, 3);
  EXPECT_EQ(inst.sets.size(), 12u);
  EXPECT_LE(inst.residual(inst.xstar), 1e-12);
  EXPECT_THROW(make_hyperplane_instance(10, 10, 0), std::invalid_argument);
}

TEST(HyperplaneBench, RowsBeatTheFirstIterate) {
  HyperplaneBenchConfig c;
  c.m = 60;
  c.n = 30;
  c.reps = 3;
  c.seed = 9;
  c.methods = {Method::CP, Method::GKAffine, Method::SymCP, Method::AccelSymCP};
  const auto rows = hyperplane_bench(c);
  ASSERT_EQ(rows.size(), 4u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.unconverged, 0u) << method_name(r.method);
    EXPECT_LE(r.mean_residual, r.mean_first_cp_residual) << method_name(r.method);
  }
  std::ostringstream out;
  write_bench_csv(out, rows);
  EXPECT_EQ(first_line(out.str()), "m,n,method,mean_iterations,mean_residual,mean_time_s,reps,seed");
}

TEST(HyperplaneBench, DrRejectedForManySets) {
  HyperplaneBenchConfig c;
  c.m = 10;
  c.n = 5;
  c.reps = 1;
  c.methods = {Method::DR};
  EXPECT_THROW(hyperplane_bench(c), std::invalid_argument);
}

TEST(TraceCsv, Format) {
  const Vector xstar = vec({0, 0});
  SolveConfig cfg;
  cfg.termination = DistanceToSolution{xstar};
  cfg.eps = 1e-3;
  const auto tr = solve(CycleOperator(two_lines(1.0, xstar)), GKAffineStep{}, vec({1, 1}), cfg);
  std::ostringstream out;
  write_trace_csv(out, tr);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "k,t_k,successive_change,dist_to_solution");
  std::getline(in, line);
  EXPECT_EQ(line, "0,,," + format_real(std::sqrt(2.0), 17));
  std::size_t rows = 1;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, tr.records.size());
}

TEST(Rng, DeterministicAndNormalish) {
  Rng a(123), b(123);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(a.normal(), b.normal());
  Rng c(7);
  double mean = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double v = c.normal();
    mean += v;
    sq += v * v;
  }
  mean /= n;
  EXPECT_NEAR(mean, 0.0, 0.01);
  EXPECT_NEAR(sq / n - mean * mean, 1.0, 0.02);
  EXPECT_NEAR(Rng(3).on_sphere(5, 10.0).norm(), 10.0, 1e-12);
}
