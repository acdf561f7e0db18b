#include "dne/harness.hpp"
#include "dne/time_integrator.hpp"

#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace dne;
using namespace dne::testing;

namespace {

Model model_1d(int cells, double p, double q) {
  const auto mesh = interval(cells);
  return Model{mesh, isotropic(mesh, p), source(mesh, 1.0, 0.5, 0.1, q), q};
}

std::vector<double> constant(const MeshPtr& mesh, double c) { return std::vector<double>(mesh->num_vertices(), c); }

std::shared_ptr<const PotentialField> constant_potential(const MeshPtr& mesh, double c) {
  return std::make_shared<const PotentialField>(PotentialField::time_constant(constant(mesh, c)));
}

StepOptions step_options(const Model& m) {
  StepOptions options;
  options.solver = SolverOptions::for_dimension(m.mesh->dimension());
  return options;
}

double l2_diff(const DiscreteField& a, const DiscreteField& b) { return l2_norm_diff_power(a, b, 1.0, false); }

double increment_sum(const Trajectory& t) {
  double sum = 0.0;
  for (const auto& d : t.diagnostics) sum += t.dt * d.increment_norm * d.increment_norm;
  return sum;
}

} // namespace

TEST(AveragePotential, TimeConstant) {
  const auto h = PotentialField::time_constant({1.0, 2.5, 0.5});
  const auto avg = average_potential(h, 3, 0.1);
  EXPECT_DOUBLE_EQ(avg[0], 1.0);
  EXPECT_DOUBLE_EQ(avg[1], 2.5);
  EXPECT_DOUBLE_EQ(avg[2], 0.5);
}

TEST(AveragePotential, LinearInTimeIsExact) {
  // The offset keeps the lower envelope positive; the average of t over [0, 1] is 1/2.
  const PotentialField h([](double t, std::size_t) { return 1.0 + t; }, 1, {1.0}, 2.0);
  EXPECT_NEAR(average_potential(h, 1, 1.0)[0] - 1.0, 0.5, 1e-12);
  const PotentialField cubic([](double t, std::size_t) { return 1.0 + t * t * t; }, 1, {1.0}, 9.0);
  EXPECT_NEAR(average_potential(cubic, 2, 1.0)[0] - 1.0, (16.0 - 1.0) / 4.0, 1e-12);
}

TEST(AveragePotential, BoundedBySupOnWindow) {
  const auto h = PotentialField::decaying({1.0, 2.0}, 1.0, 0.5);
  for (int n = 1; n <= 20; ++n) {
    const auto avg = average_potential(h, n, 0.25);
    for (std::size_t k = 0; k < avg.size(); ++k) EXPECT_LE(avg[k], h((n - 1) * 0.25, k));
  }
}

TEST(SandwichConstant, RejectsVanishingInterior) {
  const auto mesh = interval(10);
  Vector v = sine_bump(mesh, 1.0).values();
  v[4] = 0.0;
  try {
    sandwich_constant(DiscreteField(mesh, v));
    FAIL() << "field vanishing inside was accepted";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.tag(), "M_delta^1");
  }
  EXPECT_GE(sandwich_constant(sine_bump(mesh, 1.0)), 1.0);
}

TEST(Step, StationarySolutionIsAFixedPoint) {
  const auto m = model_1d(100, 2.5, 1.5);
  const auto opts = step_options(m);
  const auto v_stat = solve_stationary(m, constant(m.mesh, 1.0), opts.solver).solution;
  const auto next = step(m, v_stat, constant(m.mesh, 1.0), 0.1, opts).solution;
  EXPECT_LE(l2_diff(next, v_stat), 10.0 * opts.solver.tolerance);
}

TEST(Step, PreservesOrdering) {
  const auto m = model_1d(100, 2.5, 1.5);
  const auto opts = step_options(m);
  const auto low = sine_bump(m.mesh, 0.2);
  const auto high = sine_bump(m.mesh, 0.6);
  const auto h = constant(m.mesh, 1.0);
  const auto v = step(m, low, h, 0.05, opts).solution;
  const auto w = step(m, high, h, 0.05, opts).solution;
  EXPECT_GE((w.values() - v.values()).minCoeff(), -1e-8);
}

TEST(Step, ContinuousInTimeStep) {
  const auto m = model_1d(100, 2.5, 1.5);
  const auto v0 = sine_bump(m.mesh, 0.4);
  const auto next = step(m, v0, constant(m.mesh, 1.0), 1e-6, step_options(m)).solution;
  EXPECT_LE(l2_diff(next, v0), 1e-3);
}

TEST(Evolve, SandwichAndBoundaryBehavior) {
  const auto m = model_1d(80, 2.5, 1.5);
  const auto v0 = sine_bump(m.mesh, 0.4);
  const auto h = constant_potential(m.mesh, 1.0);
  const auto opts = step_options(m);
  const Barrier sub = make_subsolution(m, constant(m.mesh, 0.5), v0, 1.0, opts.solver);
  const Barrier super = make_supersolution(m, h->sup_norm(), v0, 1.0, opts.solver);
  auto setup = EvolutionSetup::create(m, h, 1.0, 20, v0);
  setup.step_options = opts;
  const Trajectory traj = evolve(setup);
  ASSERT_EQ(traj.fields.size(), 21u);
  for (std::size_t n = 1; n < traj.times.size(); ++n) EXPECT_NEAR(traj.times[n] - traj.times[n - 1], 0.05, 1e-14);
  EXPECT_TRUE(check_sandwich(traj, sub.field, super.field).passed);
  const double c = std::max(sandwich_constant(sub.field), sandwich_constant(super.field));
  EXPECT_TRUE(check_boundary_behavior(traj, c).passed);
  EXPECT_TRUE(check_dissipation(traj).passed);
  EXPECT_TRUE(traj.dissipation.satisfied);
  for (const auto& d : traj.diagnostics) EXPECT_LE(d.report.final_gradient_norm, opts.solver.tolerance);
  for (const auto& f : traj.fields) EXPECT_GE(f.values().minCoeff(), 0.0);
}

TEST(Evolve, MonotoneFromBarriers) {
  const auto m = model_1d(80, 2.5, 1.5);
  const auto v0 = sine_bump(m.mesh, 0.4);
  const auto h = constant_potential(m.mesh, 1.0);
  const auto opts = step_options(m);
  const Barrier sub = make_subsolution(m, constant(m.mesh, 0.5), v0, 1.0, opts.solver);
  const Barrier super = make_supersolution(m, h->sup_norm(), v0, 1.0, opts.solver);
  auto from_sub = EvolutionSetup::create(m, h, 2.0, 20, sub.field);
  auto from_super = EvolutionSetup::create(m, h, 2.0, 20, super.field);
  from_sub.step_options = from_super.step_options = opts;
  EXPECT_TRUE(check_monotone(evolve(from_sub), Monotonicity::Nondecreasing).passed);
  EXPECT_TRUE(check_monotone(evolve(from_super), Monotonicity::Nonincreasing).passed);
}

TEST(Evolve, ParabolicContraction) {
  const auto m = model_1d(80, 2.5, 1.5);
  const auto opts = step_options(m);
  const auto h = constant_potential(m.mesh, 1.0);
  const auto g = std::make_shared<const PotentialField>(PotentialField::decaying(constant(m.mesh, 0.8), 1.0, 0.5));
  auto first = EvolutionSetup::create(m, h, 1.0, 20, sine_bump(m.mesh, 0.4));
  auto second = EvolutionSetup::create(m, g, 1.0, 20, sine_bump(m.mesh, 0.3));
  first.step_options = second.step_options = opts;
  const Trajectory a = evolve(first), b = evolve(second);
  EXPECT_TRUE(check_contraction_parabolic(a, b, *h, *g, opts.solver.tolerance).passed);
  EXPECT_TRUE(check_contraction_parabolic(b, a, *g, *h, opts.solver.tolerance).passed);
  EXPECT_TRUE(check_contraction_parabolic(a, a, *h, *h, opts.solver.tolerance).passed);
}

TEST(Evolve, IncrementBoundIsUniformInStep) {
  const auto m = model_1d(80, 2.5, 1.5);
  const auto h = constant_potential(m.mesh, 1.0);
  auto coarse = EvolutionSetup::create(m, h, 1.0, 20, sine_bump(m.mesh, 0.4));
  auto fine = EvolutionSetup::create(m, h, 1.0, 40, sine_bump(m.mesh, 0.4));
  coarse.step_options = fine.step_options = step_options(m);
  const double a = increment_sum(evolve(coarse));
  const double b = increment_sum(evolve(fine));
  EXPECT_GT(a, 0.0);
  EXPECT_LT(std::max(a, b) / std::min(a, b), 2.0);
}

TEST(Evolve, StrideKeepsFinalField) {
  const auto m = model_1d(40, 2.5, 1.5);
  auto setup = EvolutionSetup::create(m, constant_potential(m.mesh, 1.0), 1.0, 10, sine_bump(m.mesh, 0.4));
  setup.step_options = step_options(m);
  setup.stride = 4;
  const Trajectory traj = evolve(setup);
  EXPECT_EQ(traj.indices, (std::vector<int>{0, 4, 8, 10}));
  EXPECT_EQ(traj.diagnostics.size(), 10u);
}

TEST(Evolve, StepFailureKeepsPartialTrajectory) {
  const auto m = model_1d(100, 3.0, 1.5);
  auto setup = EvolutionSetup::create(m, constant_potential(m.mesh, 1.0), 1.0, 5, sine_bump(m.mesh, 0.4));
  setup.step_options = step_options(m);
  setup.step_options.solver.max_iterations = 1;
  try {
    evolve(setup);
    FAIL() << "evolve succeeded with a one-iteration solver";
  } catch (const StepFailure& e) {
    EXPECT_EQ(e.step_index(), 1);
    ASSERT_EQ(e.partial().fields.size(), 1u);
    EXPECT_EQ(max_abs_diff(e.partial().fields[0], setup.initial), 0.0);
  }
}

TEST(ChangeOfVariables, RoundTripAndSandwich) {
  const auto m = model_1d(40, 2.5, 1.5);
  auto setup = EvolutionSetup::create(m, constant_potential(m.mesh, 1.0), 0.5, 5, sine_bump(m.mesh, 0.4));
  setup.step_options = step_options(m);
  const Trajectory v = evolve(setup);
  const Trajectory u = change_of_variables_u(v);
  ASSERT_EQ(u.fields.size(), v.fields.size());
  const auto delta = boundary_distance_field(*m.mesh).at_vertices;
  double c = 1.0;
  for (const auto& f : v.fields) c = std::max(c, sandwich_constant(f));
  for (std::size_t n = 0; n < v.fields.size(); ++n) {
    const auto back = u.fields[n].power(1.0 / m.q);
    EXPECT_LE(max_abs_diff(back, v.fields[n]), 1e-14);
    for (int i : m.mesh->interior_vertices()) {
      const auto k = static_cast<std::size_t>(i);
      const double dq = std::pow(delta[k], m.q);
      EXPECT_GE(u.fields[n][k], dq / std::pow(c, m.q) * (1.0 - 1e-12));
      EXPECT_LE(u.fields[n][k], std::pow(c, m.q) * dq * (1.0 + 1e-12));
    }
  }
  Trajectory zero = v;
  for (auto& f : zero.fields) f = DiscreteField::zero(m.mesh);
  for (const auto& f : change_of_variables_u(zero).fields) EXPECT_EQ(f.values().cwiseAbs().maxCoeff(), 0.0);
}

TEST(ChangeOfVariables, InterpolantMatchesStoredFields) {
  const auto m = model_1d(40, 2.5, 1.5);
  auto setup = EvolutionSetup::create(m, constant_potential(m.mesh, 1.0), 0.5, 5, sine_bump(m.mesh, 0.4));
  setup.step_options = step_options(m);
  const Trajectory v = evolve(setup);
  const Trajectory u = change_of_variables_u(v);
  EXPECT_LE(max_abs_diff(interpolate_u(v, v.times[2]), u.fields[2]), 1e-15);
  const auto mid = interpolate_u(v, 0.5 * (v.times[2] + v.times[3]));
  const Vector expected = 0.5 * (u.fields[2].values() + u.fields[3].values());
  EXPECT_LE((mid.values() - expected).cwiseAbs().maxCoeff(), 1e-15);
}
