#include "dne/harness.hpp"
#include "dne/operator_model.hpp"
#include "dne/picone_library.hpp"

#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace dne;

namespace {

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

LerayLionsOperator single(double p, int dim, std::size_t points = 1) {
  return LerayLionsOperator::isotropic(ExponentField::constant(p, points), dim);
}

LerayLionsOperator coordinate(double p, std::vector<double> weights) {
  LerayLionsOperator::Partition blocks;
  std::vector<std::vector<double>> w;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    blocks.push_back({static_cast<int>(i)});
    w.push_back({weights[i]});
  }
  return LerayLionsOperator(ExponentField::constant(p, 1), blocks, w);
}

/// Central differences of the flux, the independent oracle for the Jacobian.
Mat fd_jacobian(const LerayLionsOperator& op, const Vec& xi, double h) {
  const auto n = xi.size();
  Mat jac(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Vec plus = xi, minus = xi;
    plus[i] += h;
    minus[i] -= h;
    jac.col(i) = (op.eval_flux(0, plus) - op.eval_flux(0, minus)) / (2.0 * h);
  }
  return jac;
}

SamplingOptions samples(std::size_t n) { return SamplingOptions{n, 99, 1}; }

} // namespace

TEST(ExponentField, CachesExtremes) {
  const ExponentField p({2.5, 1.5, 3.5});
  EXPECT_DOUBLE_EQ(p.p_minus(), 1.5);
  EXPECT_DOUBLE_EQ(p.p_plus(), 3.5);
  EXPECT_FALSE(p.is_constant());
  EXPECT_TRUE(ExponentField::constant(2.0, 4).is_constant());
}

TEST(ExponentField, RejectsExponentsAtOrBelowOne) {
  EXPECT_THROW(ExponentField({2.0, 1.0}), ValidationError);
  EXPECT_THROW(ExponentField(std::vector<double>{}), DomainError);
}

TEST(Operator, EvalAExamples) {
  EXPECT_DOUBLE_EQ(single(2.0, 2).eval_A(0, vec({3, 4})), 25.0);
  const auto cubic = single(3.0, 2);
  const Vec unit = vec({0.6, 0.8});
  EXPECT_NEAR(cubic.eval_A(0, unit), 1.0, 1e-15);
  EXPECT_NEAR(cubic.eval_A(0, Vec(2.0 * unit)), 8.0, 1e-13);
  EXPECT_DOUBLE_EQ(coordinate(3.0, {1.0, 2.0}).eval_A(0, vec({1, 1})), 3.0);
  EXPECT_EQ(single(1.5, 2).eval_A(0, vec({0, 0})), 0.0);
}

TEST(Operator, RejectsOverlappingBlocksAndVanishingWeights) {
  const ExponentField p = ExponentField::constant(2.0, 1);
  EXPECT_THROW(LerayLionsOperator(p, {{0, 1}, {1}}, {{1.0}, {1.0}}), DomainError);
  EXPECT_THROW(LerayLionsOperator(p, {{0}, {1}}, {{1.0}, {0.0}}), ValidationError);
}

TEST(Operator, FluxExamples) {
  const Vec a2 = single(2.0, 2).eval_flux(0, vec({3, 4}));
  EXPECT_DOUBLE_EQ(a2[0], 3.0);
  EXPECT_DOUBLE_EQ(a2[1], 4.0);
  const Vec a4 = single(4.0, 2).eval_flux(0, vec({1, 0}));
  EXPECT_DOUBLE_EQ(a4[0], 1.0);
  EXPECT_DOUBLE_EQ(a4[1], 0.0);
  const Vec a0 = single(1.3, 2).eval_flux(0, vec({0, 0}));
  EXPECT_EQ(a0.norm(), 0.0);
}

TEST(Operator, JacobianExamples) {
  const Mat id = single(2.0, 2).eval_flux_jacobian(0, vec({0.3, -1.7}));
  EXPECT_NEAR((id - Mat::Identity(2, 2)).cwiseAbs().maxCoeff(), 0.0, 1e-14);

  const auto quartic = single(4.0, 2);
  const Vec xi = vec({1, 0});
  const Mat jac = quartic.eval_flux_jacobian(0, xi);
  const Mat oracle = fd_jacobian(quartic, xi, 1e-6);
  EXPECT_NEAR((jac - oracle).cwiseAbs().maxCoeff(), 0.0, 1e-5);
  EXPECT_NEAR(jac(0, 0), 3.0, 1e-14);
  EXPECT_NEAR(jac(1, 1), 1.0, 1e-14);
  EXPECT_NEAR(jac(0, 1), 0.0, 1e-14);

  EXPECT_THROW(single(1.5, 2).eval_flux_jacobian(0, vec({0, 0})), DomainError);
}

TEST(Operator, RegularizedJacobianMatchesExactAwayFromZero) {
  const auto op = single(3.0, 2);
  const Vec xi = vec({0.4, 0.7});
  EXPECT_NEAR((op.regularized_flux_jacobian(0, xi, 1e-8) - op.eval_flux_jacobian(0, xi)).cwiseAbs().maxCoeff(), 0.0,
              1e-12);
  EXPECT_TRUE(op.regularized_flux_jacobian(0, vec({0, 0}), 1e-8).allFinite());
}

TEST(Operator, MonotonicityGapExamples) {
  const auto op = single(2.0, 2);
  const Gap g = op.monotonicity_gap(0, vec({1, 0}), vec({0, 1}));
  EXPECT_DOUBLE_EQ(g.lhs, 2.0);
  const Gap same = op.monotonicity_gap(0, vec({0.2, 0.5}), vec({0.2, 0.5}));
  EXPECT_EQ(same.lhs, 0.0);
  EXPECT_EQ(same.rhs, 0.0);
}

TEST(Operator, PiconeEqualityCases) {
  const auto op = single(2.0, 2);
  const Vec x = vec({0.3, 0.6});
  const TestFunction u = TestFunction(2, {0, 0}, {1, 1}).with_wave({{1.0, 2.0}, 0.3, 2.0});
  const PiconeTriple same = picone_triple(u.value(x), u.gradient(x), u.value(x), u.gradient(x), 1.0);
  const Gap g1 = op.picone_gap(0, same.grad_u_root, same.grad_v_root, same.ratio_grad, 1.0);
  EXPECT_NEAR(g1.lhs, g1.rhs, 1e-12 * std::max(1.0, std::abs(g1.rhs)));

  const PiconeTriple scaled = picone_triple(u.value(x), u.gradient(x), 2.0 * u.value(x), 2.0 * u.gradient(x), 1.0);
  const Gap g2 = op.picone_gap(0, scaled.grad_u_root, scaled.grad_v_root, scaled.ratio_grad, 1.0);
  EXPECT_NEAR(g2.lhs, g2.rhs, 1e-12 * std::max(1.0, std::abs(g2.rhs)));

  EXPECT_THROW(op.picone_gap(0, x, x, x, 2.0), DomainError);
}

TEST(Source, Examples) {
  const SourceTerm f({1.0}, {0.4}, 0.0, 1.0, 2.2);
  EXPECT_EQ(f.eval(0, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(f.eval(0, 2.0), 2.0);
  EXPECT_THROW(f.eval(0, -1.0), DomainError);
  // F(t) = g delta^gamma t^{beta+1}/(beta+1)
  EXPECT_DOUBLE_EQ(f.primitive(0, 2.0), 2.0);
  EXPECT_DOUBLE_EQ(f.ratio(0, 0.0), 0.0);
}

TEST(Source, RatioIsNonincreasing) {
  const SourceTerm f({1.0, 2.0}, {0.1, 0.5}, 0.5, 0.2, 1.5);
  for (double s1 : {1e-3, 0.1, 1.0, 5.0})
    for (double s2 : {2e-3, 0.2, 1.5, 50.0})
      if (s1 < s2) {
        for (std::size_t k = 0; k < 2; ++k) EXPECT_GE(f.ratio(k, s1), f.ratio(k, s2));
      }
  EXPECT_TRUE(check_source_monotonicity(f, samples(20000)).passed);
}

TEST(Source, HypothesisTags) {
  try {
    SourceTerm({1.0}, {0.5}, 0.0, 0.6, 1.5);
    FAIL() << "beta >= q - 1 accepted";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.tag(), "(f1)");
  }
  try {
    SourceTerm({1.0}, {0.5}, -0.8, 0.0, 1.5);
    FAIL() << "beta + gamma <= q - 3/2 accepted";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.tag(), "(f2)");
  }
}

TEST(Regime, Examples) {
  EXPECT_EQ(classify_regime(ExponentField::constant(3.0, 3), 1.2), Regime::SlowDiffusion);
  EXPECT_EQ(classify_regime(ExponentField::constant(2.2, 3), 1.5), Regime::FastDiffusion);
  EXPECT_EQ(classify_regime(ExponentField({2.5, 3.0, 3.5}), 1.5), Regime::Mixed);
  try {
    classify_regime(ExponentField::constant(1.8, 1), 2.0);
    FAIL() << "q >= p_- accepted";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.tag(), "q in (1, p_-)");
  }
}

TEST(Potential, LowerEnvelopeHypothesis) {
  try {
    PotentialField::time_constant({0.0, 0.0});
    FAIL() << "vanishing lower envelope accepted";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.tag(), "(H_h)");
  }
  const auto h = PotentialField::decaying({1.0, 2.0}, 1.0, 0.5);
  const std::vector<double> times{0.0, 1.0, 10.0, 100.0};
  EXPECT_NO_THROW(h.validate_on(times));
  EXPECT_DOUBLE_EQ(h(0.0, 1), 4.0);
  EXPECT_DOUBLE_EQ(h.sup_norm(), 4.0);
  EXPECT_NEAR(h(3.0, 0), 1.0 + std::pow(4.0, -1.5), 1e-15);

  const PotentialField below([](double, std::size_t) { return 0.5; }, 1, {1.0}, 1.0);
  EXPECT_THROW(below.validate_on(times), ValidationError);
}

TEST(Gamma0, CalibrationIsDeterministicAndPositive) {
  const auto op = single(3.0, 2, 4);
  const double a = calibrate_gamma0(op, 20000, 5);
  EXPECT_GT(a, 0.0);
  EXPECT_EQ(a, calibrate_gamma0(op, 20000, 5));
}

// Sampled properties on several operators. Multi-block operators with p > 2
// are excluded from the Jacobian floor, whose eigenvalues vanish with a block.
struct OperatorCase {
  const char* name;
  LerayLionsOperator op;
  bool jacobian_floor;
};

std::vector<OperatorCase> operator_cases() {
  std::vector<double> ramp(20);
  for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = 1.3 + 2.5 * static_cast<double>(i) / 19.0;
  std::vector<std::vector<double>> weights{std::vector<double>(20, 1.0), std::vector<double>(20, 2.5)};
  return {
      {"isotropic_1d_variable", LerayLionsOperator::isotropic(ExponentField(ramp), 1), true},
      {"isotropic_2d_variable", LerayLionsOperator::isotropic(ExponentField(ramp), 2), true},
      {"isotropic_2d_p3", LerayLionsOperator::isotropic(ExponentField::constant(3.0, 4), 2), true},
      {"coordinate_2d_p1.6", LerayLionsOperator(ExponentField::constant(1.6, 20), {{0}, {1}}, weights), true},
      {"coordinate_2d_p3", LerayLionsOperator(ExponentField::constant(3.0, 20), {{0}, {1}}, weights), false},
  };
}

TEST(OperatorProperties, SampledInvariantsHold) {
  for (auto& c : operator_cases()) {
    SCOPED_TRACE(c.name);
    const auto op = c.op.with_gamma0(calibrate_gamma0(c.op, 20000, 1));
    const SamplingOptions so = samples(20000);
    EXPECT_TRUE(check_homogeneity(op, so).passed);
    EXPECT_TRUE(check_euler(op, so).passed);
    EXPECT_TRUE(check_growth(op, so).passed);
    EXPECT_TRUE(check_convexity(op, so).passed);
    EXPECT_TRUE(check_flux_jacobian_fd(op, so).passed);
    EXPECT_TRUE(check_monotonicity_gap(op, so).passed);
    if (c.jacobian_floor) {
      EXPECT_TRUE(check_flux_jacobian(op, so).passed);
    }
    EXPECT_TRUE(check_picone(op, 1.0, so).passed);
    EXPECT_TRUE(check_lemma21_pointwise(op, 1.0, so).passed);
    const double r = 0.5 * (1.0 + op.exponent().p_minus());
    EXPECT_TRUE(check_picone(op, r, so).passed);
    EXPECT_TRUE(check_lemma21_pointwise(op, r, so).passed);
  }
}

TEST(OperatorProperties, JacobianFloorFailsForMultiBlockAboveTwo) {
  // The block eigenvalue (p-1)|xi_j|^{p-2} vanishes as xi_j -> 0 while the
  // floor gamma |xi|^{p-2} does not; the check must detect this.
  const auto op = coordinate(3.0, {1.0, 1.0});
  EXPECT_FALSE(check_flux_jacobian(op, samples(20000)).passed);
}

TEST(OperatorProperties, MorawetzPassesForConstantExponent) {
  for (double p : {1.5, 2.0, 3.0}) {
    SCOPED_TRACE(p);
    EXPECT_TRUE(check_morawetz(single(p, 2, 3), samples(20000)).passed);
  }
}
