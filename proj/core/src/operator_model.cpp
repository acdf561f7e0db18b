#include "dne/operator_model.hpp"

#include "dne/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <sstream>

namespace dne {

// ----------------------------------------------------------------------------
// ExponentField
// ----------------------------------------------------------------------------

ExponentField::ExponentField(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw DomainError("exponent field needs at least one point");
  for (double p : values_) {
    if (!std::isfinite(p) || p <= 1.0)
      throw ValidationError("(A0) p_- > 1", "exponent value " + std::to_string(p) + " not in (1, inf)");
  }
  const auto [lo, hi] = std::minmax_element(values_.begin(), values_.end());
  p_minus_ = *lo;
  p_plus_ = *hi;
}

ExponentField ExponentField::constant(double p, std::size_t points) {
  return ExponentField(std::vector<double>(points, p));
}

// ----------------------------------------------------------------------------
// LerayLionsOperator
// ----------------------------------------------------------------------------

LerayLionsOperator::LerayLionsOperator(ExponentField exponent, Partition blocks,
                                       std::vector<std::vector<double>> weights)
    : exponent_(std::move(exponent)), blocks_(std::move(blocks)), weights_(std::move(weights)) {
  if (blocks_.empty()) throw DomainError("operator needs at least one block");
  if (weights_.size() != blocks_.size())
    throw DomainError("one weight field per block required");

  std::vector<int> seen;
  for (const auto& block : blocks_) {
    if (block.empty()) throw DomainError("empty block in partition");
    seen.insert(seen.end(), block.begin(), block.end());
  }
  std::sort(seen.begin(), seen.end());
  dimension_ = static_cast<int>(seen.size());
  if (dimension_ > 3) throw DomainError("gradient dimension above 3 is not supported");
  for (int i = 0; i < dimension_; ++i) {
    if (seen[i] != i) throw DomainError("blocks must partition {0..N-1} disjointly");
  }

  weight_floor_ = std::numeric_limits<double>::infinity();
  weight_ceiling_ = 0.0;
  for (const auto& w : weights_) {
    if (w.size() != exponent_.size())
      throw DomainError("weight field size does not match exponent field");
    for (double g : w) {
      if (!std::isfinite(g) || g <= 0.0)
        throw ValidationError("(A1) weight floor", "block weight must be bounded below by c > 0");
      weight_floor_ = std::min(weight_floor_, g);
      weight_ceiling_ = std::max(weight_ceiling_, g);
    }
  }
}

LerayLionsOperator LerayLionsOperator::isotropic(ExponentField exponent, int dimension,
                                                 std::vector<double> weight) {
  Partition blocks(1);
  for (int i = 0; i < dimension; ++i) blocks[0].push_back(i);
  return LerayLionsOperator(std::move(exponent), std::move(blocks), {std::move(weight)});
}

LerayLionsOperator LerayLionsOperator::isotropic(ExponentField exponent, int dimension) {
  std::vector<double> ones(exponent.size(), 1.0);
  return isotropic(std::move(exponent), dimension, std::move(ones));
}

double LerayLionsOperator::ellipticity_constant() const noexcept {
  return weight_floor_ * std::min(1.0, exponent_.p_minus() - 1.0);
}

double LerayLionsOperator::growth_constant() const noexcept {
  return weight_ceiling_ * std::max(1.0, exponent_.p_plus() - 1.0) * dimension_;
}

namespace {

double block_square(const Vec& xi, const std::vector<int>& block) {
  double s = 0.0;
  for (int i : block) s += xi[i] * xi[i];
  return s;
}

} // namespace

double LerayLionsOperator::eval_A(std::size_t k, const Vec& xi) const {
  const double p = exponent_[k];
  double total = 0.0;
  for (std::size_t j = 0; j < blocks_.size(); ++j) {
    const double s = block_square(xi, blocks_[j]);
    if (s > 0.0) total += weights_[j][k] * std::pow(s, 0.5 * p);
  }
  return total;
}

Vec LerayLionsOperator::eval_flux(std::size_t k, const Vec& xi) const {
  const double p = exponent_[k];
  Vec a = Vec::Zero(dimension_);
  for (std::size_t j = 0; j < blocks_.size(); ++j) {
    const double s = block_square(xi, blocks_[j]);
    if (s == 0.0) continue; // continuous extension, p > 1
    const double factor = weights_[j][k] * std::pow(s, 0.5 * (p - 2.0));
    for (int i : blocks_[j]) a[i] = factor * xi[i];
  }
  return a;
}

Mat LerayLionsOperator::eval_flux_jacobian(std::size_t k, const Vec& xi) const {
  if (xi.isZero(0.0)) throw DomainError("flux Jacobian is undefined at xi = 0");
  const double p = exponent_[k];
  Mat jac = Mat::Zero(dimension_, dimension_);
  for (std::size_t j = 0; j < blocks_.size(); ++j) {
    const auto& block = blocks_[j];
    const double s = block_square(xi, block);
    if (s == 0.0) {
      if (p < 2.0) throw DomainError("flux Jacobian unbounded on a vanishing block for p < 2");
      if (p == 2.0)
        for (int i : block) jac(i, i) = weights_[j][k];
      continue;
    }
    const double g = weights_[j][k];
    const double diag = g * std::pow(s, 0.5 * (p - 2.0));
    const double rank1 = g * (p - 2.0) * std::pow(s, 0.5 * (p - 4.0));
    for (int a : block) {
      jac(a, a) += diag;
      for (int b : block) jac(a, b) += rank1 * xi[a] * xi[b];
    }
  }
  return jac;
}

Mat LerayLionsOperator::regularized_flux_jacobian(std::size_t k, const Vec& xi, double eps) const {
  const double p = exponent_[k];
  Mat jac = Mat::Zero(dimension_, dimension_);
  for (std::size_t j = 0; j < blocks_.size(); ++j) {
    const auto& block = blocks_[j];
    const double s = block_square(xi, block) + eps * eps;
    const double g = weights_[j][k];
    const double diag = g * std::pow(s, 0.5 * (p - 2.0));
    const double rank1 = g * (p - 2.0) * std::pow(s, 0.5 * (p - 4.0));
    for (int a : block) {
      jac(a, a) += diag;
      for (int b : block) jac(a, b) += rank1 * xi[a] * xi[b];
    }
  }
  return jac;
}

Mat LerayLionsOperator::secant_flux_jacobian(std::size_t k, const Vec& xi, double eps) const {
  const double p = exponent_[k];
  if (p >= 2.0) return regularized_flux_jacobian(k, xi, eps);
  Mat jac = Mat::Zero(dimension_, dimension_);
  for (std::size_t j = 0; j < blocks_.size(); ++j) {
    const double s = block_square(xi, blocks_[j]) + eps * eps;
    const double diag = weights_[j][k] * std::pow(s, 0.5 * (p - 2.0));
    for (int a : blocks_[j]) jac(a, a) += diag;
  }
  return jac;
}

Gap LerayLionsOperator::monotonicity_gap(std::size_t k, const Vec& xi, const Vec& eta) const {
  const double p = exponent_[k];
  const Vec diff = xi - eta;
  Gap gap;
  gap.lhs = (eval_flux(k, xi) - eval_flux(k, eta)).dot(diff);
  const double d = diff.norm();
  if (p > 2.0) {
    gap.rhs = gamma0_ * std::pow(d, p);
  } else {
    gap.rhs = gamma0_ * d * d / std::pow(1.0 + xi.norm() + eta.norm(), 2.0 - p);
  }
  return gap;
}

Gap LerayLionsOperator::picone_gap(std::size_t k, const Vec& grad_u_root, const Vec& grad_v_root,
                                   const Vec& ratio_grad, double r) const {
  const double p = exponent_[k];
  if (!(r >= 1.0 && r < p)) throw DomainError("Picone exponent r must lie in [1, p(x))");
  Gap gap;
  gap.lhs = eval_flux(k, grad_u_root).dot(ratio_grad);
  const double a_v = eval_A(k, grad_v_root);
  const double a_u = eval_A(k, grad_u_root);
  gap.rhs = std::pow(a_v, r / p) * std::pow(a_u, (p - r) / p);
  return gap;
}

Gap LerayLionsOperator::morawetz_gap(std::size_t k, const Vec& xi, const Vec& eta) const {
  const double p = exponent_[k];
  const double s = std::min(1.0, 0.5 * p);
  const double zeta = std::pow(1.0 - std::pow(2.0, 1.0 - p), -s);
  const double a_xi = eval_A(k, xi);
  const double a_eta = eval_A(k, eta);
  const double mid = eval_A(k, Vec(0.5 * (xi + eta)));
  const double defect = std::max(0.0, a_xi + a_eta - 2.0 * mid);
  Gap gap;
  gap.lhs = eval_A(k, Vec(0.5 * (xi - eta)));
  gap.rhs = zeta * std::pow(a_xi + a_eta, 1.0 - s) * std::pow(defect, s);
  return gap;
}

LerayLionsOperator LerayLionsOperator::with_gamma0(double gamma0) const {
  if (!(gamma0 >= 0.0)) throw DomainError("gamma0 must be nonnegative");
  LerayLionsOperator copy = *this;
  copy.gamma0_ = gamma0;
  return copy;
}

double calibrate_gamma0(const LerayLionsOperator& op, std::size_t samples, std::uint64_t seed) {
  const LerayLionsOperator unit = op.with_gamma0(1.0);
  const std::size_t chunks = (samples + sampling::kChunkSize - 1) / sampling::kChunkSize;
  double min_ratio = std::numeric_limits<double>::infinity();
  std::size_t drawn = 0;
  for (std::size_t c = 0; c < chunks; ++c) {
    auto engine = sampling::chunk_engine(seed, c);
    for (std::size_t i = 0; i < sampling::kChunkSize && drawn < samples; ++i, ++drawn) {
      const std::size_t k = std::uniform_int_distribution<std::size_t>(0, op.num_points() - 1)(engine);
      const auto [xi, eta] = sampling::random_pair(engine, op.dimension());
      const Gap gap = unit.monotonicity_gap(k, xi, eta);
      if (gap.rhs > 0.0) min_ratio = std::min(min_ratio, gap.lhs / gap.rhs);
    }
  }
  if (!std::isfinite(min_ratio)) return 0.0;
  return 0.9 * min_ratio;
}

// ----------------------------------------------------------------------------
// SourceTerm
// ----------------------------------------------------------------------------

SourceTerm::SourceTerm(std::vector<double> g, std::vector<double> delta, double gamma,
                       double beta, double q)
    : g_(std::move(g)), gamma_(gamma), beta_(beta), q_(q) {
  if (g_.size() != delta.size()) throw DomainError("g and delta sizes differ");
  if (!(q_ > 1.0)) throw ValidationError("q in (1, p_-)", "q must exceed 1");
  if (!(beta_ >= 0.0 && beta_ < q_ - 1.0))
    throw ValidationError("(f1)", "beta must lie in [0, q-1)");
  if (!(beta_ + gamma_ > q_ - 1.5))
    throw ValidationError("(f2)", "beta + gamma must exceed q - 3/2");
  coefficient_.resize(g_.size());
  for (std::size_t k = 0; k < g_.size(); ++k) {
    if (!(g_[k] >= 0.0) || !std::isfinite(g_[k]))
      throw ValidationError("(f0)", "source weight g must be nonnegative and bounded");
    if (delta[k] < 0.0) throw DomainError("boundary distance must be nonnegative");
    // delta^gamma with gamma < 0 is unbounded on the boundary; the boundary
    // values never enter since fields vanish there.
    coefficient_[k] = delta[k] > 0.0 ? g_[k] * std::pow(delta[k], gamma_) : (gamma_ == 0.0 ? g_[k] : 0.0);
  }
}

double SourceTerm::eval(std::size_t k, double s) const {
  if (s < 0.0) throw DomainError("source evaluated at negative s");
  if (s == 0.0) return 0.0;
  return coefficient_[k] * std::pow(s, beta_);
}

double SourceTerm::primitive(std::size_t k, double t) const {
  if (t <= 0.0) return 0.0;
  return coefficient_[k] * std::pow(t, beta_ + 1.0) / (beta_ + 1.0);
}

double SourceTerm::derivative(std::size_t k, double s) const {
  if (s <= 0.0 || beta_ == 0.0) return 0.0;
  return coefficient_[k] * beta_ * std::pow(s, beta_ - 1.0);
}

double SourceTerm::ratio(std::size_t k, double s) const {
  if (s <= 0.0) return 0.0;
  return coefficient_[k] * std::pow(s, beta_ - (q_ - 1.0));
}

// ----------------------------------------------------------------------------
// PotentialField
// ----------------------------------------------------------------------------

PotentialField::PotentialField(Evaluator h, std::size_t points, std::vector<double> lower_envelope,
                               double sup_norm, std::optional<std::vector<double>> limit)
    : h_(std::move(h)), points_(points), lower_(std::move(lower_envelope)), sup_norm_(sup_norm),
      limit_(std::move(limit)) {
  if (lower_.size() != points_) throw DomainError("lower envelope size mismatch");
  if (limit_ && limit_->size() != points_) throw DomainError("limit potential size mismatch");
  bool nonzero = false;
  for (double v : lower_) {
    if (!(v >= 0.0)) throw ValidationError("(H_h)", "lower envelope must be nonnegative");
    nonzero = nonzero || v > 0.0;
  }
  if (!nonzero) throw ValidationError("(H_h)", "lower envelope must not vanish identically");
  if (!(sup_norm_ >= 0.0)) throw DomainError("sup norm must be nonnegative");
}

PotentialField PotentialField::time_constant(std::vector<double> values) {
  const double sup = values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
  auto shared = std::make_shared<const std::vector<double>>(values);
  const std::size_t n = values.size();
  return PotentialField([shared](double, std::size_t k) { return (*shared)[k]; }, n, values, sup,
                        values);
}

PotentialField PotentialField::decaying(std::vector<double> h_inf, double amplitude, double eta) {
  if (amplitude < -1.0) throw DomainError("decay amplitude must be >= -1");
  if (!(eta > 0.0)) throw DomainError("decay exponent eta must be positive");
  auto shared = std::make_shared<const std::vector<double>>(h_inf);
  std::vector<double> lower = h_inf;
  double sup = 0.0;
  for (double& v : lower) {
    sup = std::max(sup, v * std::max(1.0, 1.0 + amplitude));
    v *= std::min(1.0, 1.0 + amplitude);
  }
  const std::size_t n = h_inf.size();
  return PotentialField(
      [shared, amplitude, eta](double t, std::size_t k) {
        return (*shared)[k] * (1.0 + amplitude * std::pow(1.0 + t, -(1.0 + eta)));
      },
      n, std::move(lower), sup, std::move(h_inf));
}

void PotentialField::validate_on(std::span<const double> times) const {
  for (double t : times) {
    for (std::size_t k = 0; k < points_; ++k) {
      const double h = h_(t, k);
      if (h < lower_[k] - 1e-12 * std::max(1.0, std::abs(lower_[k]))) {
        std::ostringstream msg;
        msg << "h(" << t << ", x_" << k << ") = " << h << " below lower envelope " << lower_[k];
        throw ValidationError("(H_h)", msg.str());
      }
      if (h > sup_norm_ * (1.0 + 1e-12) + 1e-300) {
        std::ostringstream msg;
        msg << "h(" << t << ", x_" << k << ") = " << h << " exceeds recorded sup norm " << sup_norm_;
        throw DomainError(msg.str());
      }
    }
  }
}

// ----------------------------------------------------------------------------
// Regime
// ----------------------------------------------------------------------------

std::string_view to_string(Regime regime) {
  switch (regime) {
  case Regime::SlowDiffusion: return "slow-diffusion";
  case Regime::FastDiffusion: return "fast-diffusion";
  case Regime::Mixed: return "mixed";
  }
  return "unknown";
}

Regime classify_regime(const ExponentField& exponents, double q) {
  if (!(q > 1.0 && q < exponents.p_minus()))
    throw ValidationError("q in (1, p_-)", "q = " + std::to_string(q) + " outside (1, p_-)");
  if (2.0 * q < exponents.p_minus()) return Regime::SlowDiffusion;
  if (2.0 * q > exponents.p_plus()) return Regime::FastDiffusion;
  return Regime::Mixed;
}

} // namespace dne
