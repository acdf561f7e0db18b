#include "dne/harness.hpp"
#include "dne/picone_library.hpp"

#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace dne;
using namespace dne::testing;

namespace {

std::vector<double> constant(const MeshPtr& mesh, double c) { return std::vector<double>(mesh->num_vertices(), c); }

DiscreteField random_positive(const MeshPtr& mesh, std::mt19937_64& engine) {
  std::uniform_real_distribution<double> value(0.05, 2.0);
  Vector v = Vector::Zero(static_cast<Eigen::Index>(mesh->num_vertices()));
  for (int i : mesh->interior_vertices()) v[i] = value(engine);
  return DiscreteField(mesh, v);
}

Vec scalar(double x) {
  Vec v(1);
  v[0] = x;
  return v;
}

Trajectory run(const Model& m, std::shared_ptr<const PotentialField> h, const DiscreteField& v0, double horizon,
               int steps) {
  auto setup = EvolutionSetup::create(m, std::move(h), horizon, steps, v0);
  setup.step_options.solver = SolverOptions::for_dimension(m.mesh->dimension());
  return evolve(setup);
}

} // namespace

TEST(Picone, EqualityWhenFunctionsCoincide) {
  const auto op = LerayLionsOperator::isotropic(ExponentField::constant(3.0, 1), 1);
  for (double x : {0.1, 0.37, 0.8}) {
    const double u = x * (1.0 - x);
    const Vec gu = scalar(1.0 - 2.0 * x);
    const PiconeTriple t = picone_triple(u, gu, u, gu, 1.0);
    const Gap g = op.picone_gap(0, t.grad_u_root, t.grad_v_root, t.ratio_grad, 1.0);
    EXPECT_NEAR(g.rhs - g.lhs, 0.0, 1e-12);
  }
}

TEST(Picone, StrictForParabolaAgainstSine) {
  // u = x(1-x), v = sin(pi x), p = 3, r = 1.5 at 10^3 midpoints.
  const auto op = LerayLionsOperator::isotropic(ExponentField::constant(3.0, 1), 1);
  const double r = 1.5;
  for (int k = 0; k < 1000; ++k) {
    const double x = (k + 0.5) / 1000.0;
    const double u = x * (1.0 - x);
    const double v = std::sin(std::numbers::pi * x);
    const PiconeTriple t =
        picone_triple(u, scalar(1.0 - 2.0 * x), v, scalar(std::numbers::pi * std::cos(std::numbers::pi * x)), r);
    const Gap g = op.picone_gap(0, t.grad_u_root, t.grad_v_root, t.ratio_grad, r);
    EXPECT_GT(g.rhs - g.lhs, 0.0) << "x = " << x;
  }
}

TEST(Picone, SampledChecksPass) {
  const auto op = LerayLionsOperator::isotropic(ExponentField::constant(3.0, 1), 2);
  const CheckReport strict = check_picone(op, 1.5, SamplingOptions{100000, 3, 1});
  EXPECT_TRUE(strict.passed) << strict.location;
  EXPECT_GT(strict.measurement("strict_samples"), 0.0);
  EXPECT_GT(strict.measurement("min_strict_margin"), 0.0);
  EXPECT_TRUE(check_picone(op, 1.0, SamplingOptions{100000, 4, 1}).passed);
  EXPECT_THROW(check_picone(op, 3.0, SamplingOptions{10, 1, 1}), DomainError);
}

TEST(Lemma21, EqualFieldsGiveZero) {
  const auto mesh = interval(50);
  const auto op = isotropic(mesh, 2.5);
  const auto w = sine_bump(mesh, 1.0);
  const CheckReport report = check_lemma21(*op, 1.5, w, w);
  EXPECT_TRUE(report.passed);
  EXPECT_NEAR(report.measurement("value"), 0.0, 1e-10);
}

TEST(Lemma21, ProportionalFieldsArePositive) {
  const auto mesh = interval(50);
  const auto op = isotropic(mesh, 2.5);
  const auto w = sine_bump(mesh, 1.0);
  const CheckReport report = check_lemma21(*op, 1.0, w.scaled(2.0), w);
  EXPECT_TRUE(report.passed);
  EXPECT_GT(report.measurement("value"), 0.0);
}

TEST(Lemma21, RandomPositivePairs) {
  std::mt19937_64 engine(11);
  const auto line = interval(12);
  const auto square = unit_square(5);
  const auto op_line = affine_isotropic(line, 1.8, 3.0);
  const auto op_square = affine_isotropic(square, 2.2, 2.8);
  int checked = 0;
  for (int pair = 0; pair < 500; ++pair) {
    for (double r : {1.0, 1.5}) {
      const CheckReport a = check_lemma21(*op_line, std::min(r, 1.7), random_positive(line, engine),
                                          random_positive(line, engine));
      const CheckReport b =
          check_lemma21(*op_square, r, random_positive(square, engine), random_positive(square, engine));
      EXPECT_TRUE(a.passed) << a.worst_margin;
      EXPECT_TRUE(b.passed) << b.worst_margin;
      checked += 2;
    }
  }
  EXPECT_EQ(checked, 2000);
}

TEST(Lemma21, RejectsNonpositiveFields) {
  const auto mesh = interval(10);
  const auto op = isotropic(mesh, 2.5);
  EXPECT_THROW(check_lemma21(*op, 1.0, DiscreteField::zero(mesh), sine_bump(mesh, 1.0)), DomainError);
}

TEST(ContractionElliptic, IdenticalAndShiftedPotentials) {
  const auto mesh = interval(100);
  const Model m{mesh, isotropic(mesh, 2.5), source(mesh, 1.0, 0.5, 0.1, 1.5), 1.5};
  const auto options = SolverOptions::for_dimension(1);
  const auto h1 = vertex_values(mesh, [](const Mesh::Point& x) { return 1.0 + x[0]; });
  auto h2 = h1;
  for (double& v : h2) v += 0.1;
  const auto first = EllipticProblem::standard(m, 0.5, h1);
  const auto same = check_contraction_elliptic(first, EllipticProblem::standard(m, 0.5, h1), options);
  EXPECT_TRUE(same.passed);
  EXPECT_LE(same.measurement("lhs"), 10.0 * options.tolerance);
  const auto shifted = check_contraction_elliptic(first, EllipticProblem::standard(m, 0.5, h2), options);
  EXPECT_TRUE(shifted.passed);
  EXPECT_GE(shifted.measurement("comparison_margin"), -1e-8);
  const auto reversed = check_contraction_elliptic(EllipticProblem::standard(m, 0.5, h2), first, options);
  EXPECT_TRUE(reversed.passed);
  EXPECT_LE(reversed.measurement("ratio"), 1.02);
}

TEST(ContractionParabolic, Cases) {
  const auto mesh = interval(60);
  const Model m{mesh, isotropic(mesh, 2.5), source(mesh, 1.0, 0.5, 0.1, 1.5), 1.5};
  const double tol = SolverOptions::for_dimension(1).tolerance;
  const auto h = std::make_shared<const PotentialField>(PotentialField::time_constant(constant(mesh, 1.0)));
  const auto g = std::make_shared<const PotentialField>(PotentialField::decaying(constant(mesh, 1.2), 0.5, 0.5));
  const Trajectory a = run(m, h, sine_bump(mesh, 0.4), 1.0, 10);
  const Trajectory a2 = run(m, h, sine_bump(mesh, 0.4), 1.0, 10);
  const Trajectory b = run(m, h, sine_bump(mesh, 0.2), 1.0, 10);
  const Trajectory c = run(m, g, sine_bump(mesh, 0.2), 1.0, 10);

  EXPECT_TRUE(check_contraction_parabolic(a, a2, *h, *h, tol).passed);

  EXPECT_TRUE(check_contraction_parabolic(a, b, *h, *h, tol).passed);
  const Trajectory ua = change_of_variables_u(a), ub = change_of_variables_u(b);
  const double start = l2_norm_diff_power(ua.fields.front(), ub.fields.front(), 1.0, false);
  const double end = l2_norm_diff_power(ua.fields.back(), ub.fields.back(), 1.0, false);
  EXPECT_LE(end, 1.02 * start);

  EXPECT_TRUE(check_contraction_parabolic(a, c, *h, *g, tol).passed);
  EXPECT_TRUE(check_contraction_parabolic(c, a, *g, *h, tol).passed);

  const Trajectory other_dt = run(m, h, sine_bump(mesh, 0.4), 1.0, 20);
  EXPECT_THROW(check_contraction_parabolic(a, other_dt, *h, *h, tol), DomainError);
}

TEST(Stabilization, PerturbedStationaryStartConverges) {
  const auto mesh = interval(60);
  const Model m{mesh, isotropic(mesh, 2.5), source(mesh, 1.0, 0.5, 0.1, 1.5), 1.5};
  const auto b = constant(mesh, 1.0);
  const auto v_stat = solve_stationary(m, b).solution;
  const auto h = std::make_shared<const PotentialField>(PotentialField::time_constant(b));
  const Trajectory traj = run(m, h, v_stat.scaled(1.3), 50.0, 500);
  const CheckReport report = check_stabilization(traj, v_stat, {1.0, 2.0}, 1e-4);
  EXPECT_TRUE(report.passed) << report.location;
  EXPECT_LE(report.measurement("e_T_r2"), 1e-4);
}

TEST(LambdaScaling, Slopes) {
  const auto mesh = interval(400);
  const std::vector<double> lambdas{0.5, 1.0, 2.0, 4.0};
  for (double p : {2.0, 3.0}) {
    SCOPED_TRACE(p);
    const CheckReport report = check_lambda_scaling(mesh, isotropic(mesh, p), lambdas);
    EXPECT_TRUE(report.passed);
    EXPECT_NEAR(report.measurement("slope"), 1.0 / (p - 1.0), 0.02);
    EXPECT_GE(report.measurement("monotone_margin"), 0.0);
  }
  EXPECT_THROW(check_lambda_scaling(mesh, isotropic(mesh, 2.0), {1.0, 2.0}), DomainError);
  EXPECT_THROW(check_lambda_scaling(mesh, affine_isotropic(mesh, 2.0, 3.0), lambdas), DomainError);
}

TEST(PositivityHopf, LinearLambdaSolutionSlope) {
  const auto mesh = interval(2000);
  const auto w = solve_lambda_problem(1.0, mesh, isotropic(mesh, 2.0));
  const CheckReport report = check_positivity_hopf(w);
  EXPECT_TRUE(report.passed);
  EXPECT_NEAR(report.measurement("min_boundary_slope"), 0.5, 1e-3);
}

TEST(PositivityHopf, StationarySolutionIsPositive) {
  const auto mesh = unit_square(16);
  const Model m{mesh, affine_isotropic(mesh, 2.2, 2.8), nullptr, 1.3};
  const auto v = solve_stationary(m, constant(mesh, 1.0)).solution;
  EXPECT_TRUE(check_positivity_hopf(v).passed);
}

TEST(PositivityHopf, ZeroFieldFails) {
  const CheckReport report = check_positivity_hopf(DiscreteField::zero(interval(20)));
  EXPECT_FALSE(report.passed);
  EXPECT_LT(report.worst_margin, 0.0);
}

TEST(AlgInequality, PointCases) {
  // |a-b|^{2q} <= (a^q - b^q)^2 evaluated directly.
  auto gap = [](double a, double b, double q) {
    return std::pow(std::pow(a, q) - std::pow(b, q), 2.0) - std::pow(std::abs(a - b), 2.0 * q);
  };
  EXPECT_EQ(gap(0.7, 0.7, 1.5), 0.0);
  EXPECT_EQ(gap(1.0, 0.0, 2.0), 0.0);
  EXPECT_GT(gap(2.0, 1.0, 1.5), 0.0);
}

TEST(AlgInequality, SampledPairs) {
  for (double q : {1.2, 1.5, 3.0}) {
    SCOPED_TRACE(q);
    EXPECT_TRUE(check_alg_inequality(q, SamplingOptions{1000000, 5, 1}).passed);
  }
  EXPECT_THROW(check_alg_inequality(1.0, SamplingOptions{10, 5, 1}), DomainError);
}

TEST(Determinism, IndependentOfThreadCount) {
  const auto op = LerayLionsOperator::isotropic(ExponentField({1.6, 2.4, 3.1}), 2);
  for (int threads : {2, 3, 8}) {
    const CheckReport one = check_picone(op, 1.2, SamplingOptions{50000, 17, 1});
    const CheckReport many = check_picone(op, 1.2, SamplingOptions{50000, 17, threads});
    EXPECT_EQ(one.worst_margin, many.worst_margin);
    EXPECT_EQ(one.location, many.location);
    EXPECT_EQ(one.measurement("min_strict_margin"), many.measurement("min_strict_margin"));
    EXPECT_EQ(check_monotonicity_gap(op.with_gamma0(0.1), SamplingOptions{30000, 2, 1}).worst_margin,
              check_monotonicity_gap(op.with_gamma0(0.1), SamplingOptions{30000, 2, threads}).worst_margin);
  }
  EXPECT_EQ(calibrate_gamma0(op, 30000, 9), calibrate_gamma0(op, 30000, 9));
}

TEST(RunChecks, PreservesOrderAndPropagatesErrors) {
  std::vector<std::function<CheckReport()>> checks;
  for (int i = 0; i < 6; ++i)
    checks.emplace_back([i] {
      CheckReport r;
      r.check_name = "c" + std::to_string(i);
      return r;
    });
  const auto reports = run_checks(checks, 3);
  ASSERT_EQ(reports.size(), 6u);
  for (int i = 0; i < 6; ++i) EXPECT_EQ(reports[static_cast<std::size_t>(i)].check_name, "c" + std::to_string(i));
  checks.emplace_back([]() -> CheckReport { throw DomainError("boom"); });
  EXPECT_THROW(run_checks(checks, 2), DomainError);
}
