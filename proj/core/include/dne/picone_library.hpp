#ifndef DNE_PICONE_LIBRARY_HPP
#define DNE_PICONE_LIBRARY_HPP

#include "dne/types.hpp"

#include <array>
#include <random>
#include <vector>

namespace dne {

/// Smooth positive function on the open box prod_i (lo_i, hi_i) with a
/// symbolic gradient:
///
///   u(x) = scale * prod_i ((x_i - lo_i)(hi_i - x_i))^{a_i} * prod_m (c_m + sin(k_m . x + phi_m))
///
/// with a_i >= 0 and c_m > 1, so u is bounded away from 0 on compact
/// subsets of the box.
class TestFunction {
public:
  struct Wave {
    std::array<double, 2> k{0.0, 0.0};
    double phase = 0.0;
    double offset = 2.0; // > 1
  };

  TestFunction(int dimension, std::array<double, 2> lower, std::array<double, 2> upper);

  TestFunction& with_scale(double scale);
  TestFunction& with_bump_power(int axis, double power);
  TestFunction& with_wave(Wave wave);

  /// Random member of the library.
  static TestFunction random(std::mt19937_64& engine, int dimension, std::array<double, 2> lower,
                             std::array<double, 2> upper);

  int dimension() const noexcept { return dimension_; }
  double value(const Vec& x) const;
  Vec gradient(const Vec& x) const;

private:
  int dimension_;
  std::array<double, 2> lower_;
  std::array<double, 2> upper_;
  double scale_ = 1.0;
  std::array<double, 2> bump_power_{1.0, 1.0};
  std::vector<Wave> waves_;
};

/// Gradients entering the Picone comparison at one point, built from the
/// values and gradients of positive u, v:
///   grad_u_root = grad(u^{1/r}), grad_v_root = grad(v^{1/r}),
///   ratio_grad = grad(v / u^{(r-1)/r}).
struct PiconeTriple {
  Vec grad_u_root;
  Vec grad_v_root;
  Vec ratio_grad;
};

PiconeTriple picone_triple(double u, const Vec& grad_u, double v, const Vec& grad_v, double r);

/// Pointwise two-function sum
///   a(grad w1) . grad((w1^r - w2^r)/w1^{r-1}) + a(grad w2) . grad((w2^r - w1^r)/w2^{r-1})
/// expanded with the chain rule; the fluxes are passed in.
double lemma21_density(const Vec& a1, const Vec& a2, double w1, const Vec& grad_w1, double w2,
                       const Vec& grad_w2, double r);

} // namespace dne

#endif
