#include "dne/harness.hpp"
#include "dne/mesh.hpp"

#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace dne;
using namespace dne::testing;

namespace {

double parabola(const Mesh::Point& x) { return x[0] * (1.0 - x[0]); }

double exact_parabola_modular() { return 1.0 / 6.0; } // int_0^1 (1-2x)^2 / 2 dx

} // namespace

TEST(Mesh, MeasuresSumToDomain) {
  for (const auto& mesh : {Mesh::interval(-1.0, 2.0, 7), Mesh::rectangle({0.0, -1.0}, {2.0, 0.5}, 5, 3)}) {
    double total = 0.0;
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
      EXPECT_GT(mesh.measure(e), 0.0);
      total += mesh.measure(e);
    }
    EXPECT_NEAR(total, mesh.domain_measure(), 1e-12 * mesh.domain_measure());
    double lumped = 0.0;
    for (double m : mesh.lumped_weights()) lumped += m;
    EXPECT_NEAR(lumped, mesh.domain_measure(), 1e-12 * mesh.domain_measure());
  }
}

TEST(Mesh, BoundaryIsGeometricBoundary) {
  const Mesh mesh = Mesh::rectangle({0.0, 0.0}, {1.0, 2.0}, 4, 6);
  for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
    const auto& x = mesh.vertex(i);
    const bool on_edge = x[0] == 0.0 || x[0] == 1.0 || x[1] == 0.0 || x[1] == 2.0;
    EXPECT_EQ(mesh.is_boundary(i), on_edge);
    EXPECT_EQ(mesh.dof(i) < 0, on_edge);
  }
  EXPECT_EQ(mesh.num_dofs(), 3u * 5u);
}

TEST(Mesh, RejectsDegenerateGeometry) {
  EXPECT_THROW(Mesh::interval(1.0, 1.0, 4), DomainError);
  EXPECT_THROW(Mesh::interval(0.0, 1.0, 1), DomainError);
  EXPECT_THROW(Mesh::rectangle({0.0, 0.0}, {1.0, 1.0}, 3, 0), DomainError);
}

TEST(Gradient, ParabolaChordSlopes) {
  const auto mesh = interval(10);
  const auto v = DiscreteField::interpolate(mesh, parabola);
  const auto grads = gradient(v);
  for (std::size_t e = 0; e < mesh->num_elements(); ++e) {
    const auto el = mesh->element(e);
    const double xk = std::min(mesh->vertex(el[0])[0], mesh->vertex(el[1])[0]);
    const double xk1 = std::max(mesh->vertex(el[0])[0], mesh->vertex(el[1])[0]);
    EXPECT_NEAR(grads[e][0], 1.0 - xk - xk1, 1e-13);
  }
}

TEST(Gradient, ZeroFieldHasZeroGradient) {
  for (const auto& g : gradient(DiscreteField::zero(unit_square(4)))) EXPECT_EQ(g.norm(), 0.0);
}

TEST(Gradient, LinearFieldOnInteriorElements) {
  const auto mesh = unit_square(6);
  const double a = 0.7, b = -1.3;
  const auto v = DiscreteField::interpolate(mesh, [&](const Mesh::Point& x) { return a * x[0] + b * x[1]; });
  const auto grads = gradient(v);
  std::size_t interior = 0;
  for (std::size_t e = 0; e < mesh->num_elements(); ++e) {
    const auto el = mesh->element(e);
    if (std::any_of(el.begin(), el.end(), [&](int i) { return mesh->is_boundary(static_cast<std::size_t>(i)); }))
      continue;
    ++interior;
    EXPECT_NEAR(grads[e][0], a, 1e-12);
    EXPECT_NEAR(grads[e][1], b, 1e-12);
  }
  EXPECT_GT(interior, 0u);
}

TEST(DiscreteField, RejectsBoundaryDataAndNonFiniteValues) {
  const auto mesh = interval(4);
  Vector values = Vector::Zero(5);
  values[0] = 1.0;
  EXPECT_THROW(DiscreteField(mesh, values), DomainError);
  values[0] = 0.0;
  values[2] = std::nan("");
  EXPECT_THROW(DiscreteField(mesh, values), DomainError);
  EXPECT_THROW(DiscreteField(mesh, Vector::Zero(3)), DomainError);
}

TEST(DiscreteField, InteriorRoundTrip) {
  const auto mesh = unit_square(5);
  const auto v = sine_bump(mesh, 1.5);
  const auto back = DiscreteField::from_interior(mesh, v.interior_values());
  EXPECT_EQ(max_abs_diff(v, back), 0.0);
}

TEST(Modular, ZeroField) { EXPECT_EQ(modular(DiscreteField::zero(interval(8)), *isotropic(interval(8), 2.0)), 0.0); }

TEST(Modular, ParabolaApproachesOneSixth) {
  const auto mesh = interval(200);
  const double value = modular(DiscreteField::interpolate(mesh, parabola), *isotropic(mesh, 2.0));
  EXPECT_NEAR(value, exact_parabola_modular(), 1e-4);
}

TEST(Modular, ErrorDecreasesUnderRefinement) {
  double previous = std::numeric_limits<double>::infinity();
  for (int cells : {25, 50, 100, 200}) {
    const auto mesh = interval(cells);
    const double err =
        std::abs(modular(DiscreteField::interpolate(mesh, parabola), *isotropic(mesh, 2.0)) - exact_parabola_modular());
    EXPECT_LT(err, previous);
    previous = err;
  }
}

TEST(Modular, ExactForPiecewiseLinearFields) {
  // Tent with peak 1 at x = 1/2 on an even mesh: gradient +-2, A/p = 2 everywhere.
  const auto mesh = interval(8);
  const auto tent = DiscreteField::interpolate(mesh, [](const Mesh::Point& x) { return 1.0 - std::abs(2.0 * x[0] - 1.0); });
  EXPECT_NEAR(modular(tent, *isotropic(mesh, 2.0)), 2.0, 1e-14);
  EXPECT_NEAR(modular(tent, *isotropic(mesh, 3.0)), 8.0 / 3.0, 1e-14);
}

TEST(Modular, HomogeneityFactor) {
  const auto mesh = unit_square(8);
  const auto op = isotropic(mesh, 3.0);
  const auto v = sine_bump(mesh, 0.7);
  const double m1 = modular(v, *op);
  EXPECT_NEAR(modular(v.scaled(2.0), *op), 8.0 * m1, 1e-12 * 8.0 * m1);
}

TEST(LqIntegral, Examples) {
  const auto mesh = interval(200);
  EXPECT_EQ(lq_integral(DiscreteField::zero(mesh), 2.0), 0.0);
  const auto hat =
      DiscreteField::interpolate(mesh, [](const Mesh::Point& x) { return 2.0 * std::min(x[0], 1.0 - x[0]); });
  EXPECT_NEAR(lq_integral(hat, 2.0), 1.0 / 3.0, 1e-3);
  const auto negative = DiscreteField::interpolate(mesh, [](const Mesh::Point&) { return -1.0; });
  EXPECT_EQ(lq_integral(negative, 1.5), 0.0);
}

TEST(LqIntegral, WeightAndMonotonicity) {
  const auto mesh = unit_square(6);
  const auto v = sine_bump(mesh, 1.0);
  const std::vector<double> two(mesh->num_vertices(), 2.0);
  EXPECT_NEAR(lq_integral(v, two, 1.5), 2.0 * lq_integral(v, 1.5), 1e-14);
  EXPECT_LT(lq_integral(v, 1.5), lq_integral(v.scaled(1.1), 1.5));
}

TEST(L2NormDiffPower, Cases) {
  const auto mesh = interval(40);
  const auto u = sine_bump(mesh, 2.0);
  const auto v = sine_bump(mesh, 1.0);
  EXPECT_EQ(l2_norm_diff_power(u, u, 1.5, false), 0.0);
  EXPECT_DOUBLE_EQ(l2_norm_diff_power(u, v, 1.5, true), l2_norm_diff_power(u, v, 1.5, false));
  EXPECT_EQ(l2_norm_diff_power(v, u, 1.5, true), 0.0);
  EXPECT_GT(l2_norm_diff_power(v, u, 1.5, false), 0.0);
  EXPECT_THROW(l2_norm_diff_power(u, sine_bump(interval(20), 1.0), 1.0, false), DomainError);
}

TEST(L2NormDiffPower, AlgebraicInequalityOnRandomFields) {
  const double q = 1.5;
  std::mt19937_64 engine(7);
  std::uniform_real_distribution<double> value(0.0, 3.0);
  for (const auto& mesh : {interval(30), unit_square(6)}) {
    for (int trial = 0; trial < 20; ++trial) {
      Vector a = Vector::Zero(static_cast<Eigen::Index>(mesh->num_vertices()));
      Vector b = a;
      for (int i : mesh->interior_vertices()) {
        a[i] = value(engine);
        b[i] = value(engine);
      }
      const DiscreteField u(mesh, a), v(mesh, b);
      std::vector<double> diff(mesh->num_vertices());
      for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = u[i] - v[i];
      const double lhs = std::pow(lumped_norm(*mesh, diff, 2.0 * q), 2.0 * q);
      const double rhs = std::pow(l2_norm_diff_power(u, v, q, false), 2.0);
      EXPECT_LE(lhs, rhs * (1.0 + 1e-12));
    }
  }
}

TEST(BoundaryDistance, Examples) {
  const Mesh line = Mesh::interval(0.0, 1.0, 10);
  EXPECT_DOUBLE_EQ(line.boundary_distance({0.3, 0.0}), 0.3);
  EXPECT_DOUBLE_EQ(line.boundary_distance({0.5, 0.0}), 0.5);
  const Mesh square = Mesh::rectangle({0.0, 0.0}, {1.0, 1.0}, 5, 5);
  EXPECT_DOUBLE_EQ(square.boundary_distance({0.2, 0.4}), 0.2);
  const auto field = boundary_distance_field(square);
  for (std::size_t i = 0; i < square.num_vertices(); ++i)
    EXPECT_EQ(field.at_vertices[i] == 0.0, square.is_boundary(i));
  EXPECT_EQ(field.at_barycenters.size(), square.num_elements());
}

TEST(Norms, NonnegativeAndVanishOnlyOnZero) {
  const auto mesh = unit_square(5);
  const auto v = sine_bump(mesh, 1.0);
  const std::vector<double> values(v.values().begin(), v.values().end());
  EXPECT_GT(lumped_norm(*mesh, values, 3.0), 0.0);
  EXPECT_EQ(lumped_norm(*mesh, std::vector<double>(mesh->num_vertices(), 0.0), 3.0), 0.0);
  EXPECT_GT(modular(v, *isotropic(mesh, 1.5)), 0.0);
  std::vector<double> negative(values.size());
  std::transform(values.begin(), values.end(), negative.begin(), [](double x) { return -x; });
  EXPECT_EQ(lumped_norm_positive(*mesh, negative), 0.0);
}
