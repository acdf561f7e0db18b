#include "dne/picone_library.hpp"

#include "dne/sampling.hpp"

#include <cmath>
#include <numbers>

namespace dne {

TestFunction::TestFunction(int dimension, std::array<double, 2> lower, std::array<double, 2> upper)
    : dimension_(dimension), lower_(lower), upper_(upper) {
  if (dimension < 1 || dimension > 2) throw DomainError("test functions live in 1D or 2D");
  for (int i = 0; i < dimension; ++i)
    if (!(upper[i] > lower[i])) throw DomainError("degenerate box");
}

TestFunction& TestFunction::with_scale(double scale) {
  if (!(scale > 0.0)) throw DomainError("scale must be positive");
  scale_ = scale;
  return *this;
}

TestFunction& TestFunction::with_bump_power(int axis, double power) {
  if (axis < 0 || axis >= dimension_) throw DomainError("axis out of range");
  if (!(power >= 0.0)) throw DomainError("bump power must be nonnegative");
  bump_power_[axis] = power;
  return *this;
}

TestFunction& TestFunction::with_wave(Wave wave) {
  if (!(wave.offset > 1.0)) throw DomainError("wave offset must exceed 1");
  waves_.push_back(wave);
  return *this;
}

TestFunction TestFunction::random(std::mt19937_64& engine, int dimension, std::array<double, 2> lower,
                                  std::array<double, 2> upper) {
  TestFunction fn(dimension, lower, upper);
  fn.with_scale(std::pow(10.0, sampling::uniform(engine, -1.0, 1.0)));
  for (int i = 0; i < dimension; ++i) fn.with_bump_power(i, sampling::uniform(engine, 0.0, 2.0));
  const int waves = static_cast<int>(sampling::uniform(engine, 0.0, 3.0));
  for (int m = 0; m < waves; ++m) {
    Wave w;
    for (int i = 0; i < dimension; ++i) w.k[i] = sampling::uniform(engine, -6.0, 6.0);
    w.phase = sampling::uniform(engine, 0.0, 2.0 * std::numbers::pi);
    w.offset = sampling::uniform(engine, 1.1, 3.0);
    fn.with_wave(w);
  }
  return fn;
}

double TestFunction::value(const Vec& x) const {
  double u = scale_;
  for (int i = 0; i < dimension_; ++i) u *= std::pow((x[i] - lower_[i]) * (upper_[i] - x[i]), bump_power_[i]);
  for (const Wave& w : waves_) {
    double phase = w.phase;
    for (int i = 0; i < dimension_; ++i) phase += w.k[i] * x[i];
    u *= w.offset + std::sin(phase);
  }
  return u;
}

Vec TestFunction::gradient(const Vec& x) const {
  // grad u = u * grad log u
  Vec dlog = Vec::Zero(dimension_);
  for (int i = 0; i < dimension_; ++i) {
    const double left = x[i] - lower_[i];
    const double right = upper_[i] - x[i];
    dlog[i] += bump_power_[i] * (1.0 / left - 1.0 / right);
  }
  for (const Wave& w : waves_) {
    double phase = w.phase;
    for (int i = 0; i < dimension_; ++i) phase += w.k[i] * x[i];
    const double factor = std::cos(phase) / (w.offset + std::sin(phase));
    for (int i = 0; i < dimension_; ++i) dlog[i] += w.k[i] * factor;
  }
  return value(x) * dlog;
}

PiconeTriple picone_triple(double u, const Vec& grad_u, double v, const Vec& grad_v, double r) {
  if (!(u > 0.0 && v > 0.0)) throw DomainError("Picone triples need positive u and v");
  PiconeTriple t;
  t.grad_u_root = (std::pow(u, 1.0 / r - 1.0) / r) * grad_u;
  t.grad_v_root = (std::pow(v, 1.0 / r - 1.0) / r) * grad_v;
  const double e = (r - 1.0) / r;
  t.ratio_grad = std::pow(u, -e) * grad_v - (e * v * std::pow(u, -e - 1.0)) * grad_u;
  return t;
}

double lemma21_density(const Vec& a1, const Vec& a2, double w1, const Vec& grad_w1, double w2,
                       const Vec& grad_w2, double r) {
  if (!(w1 > 0.0 && w2 > 0.0)) throw DomainError("lemma densities need positive fields");
  // grad((w1^r - w2^r)/w1^{r-1}) = grad w1 - r (w2/w1)^{r-1} grad w2 + (r-1) (w2/w1)^r grad w1
  const double t12 = w2 / w1;
  const double t21 = w1 / w2;
  const Vec g1 = (1.0 + (r - 1.0) * std::pow(t12, r)) * grad_w1 - r * std::pow(t12, r - 1.0) * grad_w2;
  const Vec g2 = (1.0 + (r - 1.0) * std::pow(t21, r)) * grad_w2 - r * std::pow(t21, r - 1.0) * grad_w1;
  return a1.dot(g1) + a2.dot(g2);
}

} // namespace dne
