#ifndef DNE_OPERATOR_MODEL_HPP
#define DNE_OPERATOR_MODEL_HPP

#include "dne/types.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace dne {

/// Variable exponent p(x) sampled on a point set (element barycenters when
/// attached to a mesh). Caches p_- and p_+.
class ExponentField {
public:
  explicit ExponentField(std::vector<double> values);

  static ExponentField constant(double p, std::size_t points);

  double operator[](std::size_t k) const { return values_[k]; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double p_minus() const noexcept { return p_minus_; }
  double p_plus() const noexcept { return p_plus_; }
  bool is_constant() const noexcept { return p_minus_ == p_plus_; }

private:
  std::vector<double> values_;
  double p_minus_ = 0.0;
  double p_plus_ = 0.0;
};

/// A pair of quantities an inequality compares: the harness asserts lhs <= rhs
/// or lhs >= rhs depending on the estimate.
struct Gap {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Block-anisotropic p(x)-homogeneous density
///
///   A(x, xi) = sum_j g_j(x) (sum_{i in P_j} xi_i^2)^{p(x)/2}
///
/// with flux a = grad_xi A / p(x). Blocks partition {0..N-1}; weights are
/// stored per block and per point.
class LerayLionsOperator {
public:
  using Partition = std::vector<std::vector<int>>;

  LerayLionsOperator(ExponentField exponent, Partition blocks,
                     std::vector<std::vector<double>> weights);

  /// Single block, A = g(x)|xi|^{p(x)}.
  static LerayLionsOperator isotropic(ExponentField exponent, int dimension,
                                      std::vector<double> weight);
  static LerayLionsOperator isotropic(ExponentField exponent, int dimension);

  int dimension() const noexcept { return dimension_; }
  std::size_t num_points() const noexcept { return exponent_.size(); }
  std::size_t num_blocks() const noexcept { return blocks_.size(); }
  const Partition& blocks() const noexcept { return blocks_; }
  const ExponentField& exponent() const noexcept { return exponent_; }
  double p(std::size_t k) const { return exponent_[k]; }
  double weight(std::size_t block, std::size_t k) const { return weights_[block][k]; }

  double weight_floor() const noexcept { return weight_floor_; }
  double weight_ceiling() const noexcept { return weight_ceiling_; }

  /// gamma = weight_floor * min(1, p_- - 1).
  double ellipticity_constant() const noexcept;
  /// Gamma = weight_ceiling * max(1, p_+ - 1) * N.
  double growth_constant() const noexcept;

  double eval_A(std::size_t k, const Vec& xi) const;
  Vec eval_flux(std::size_t k, const Vec& xi) const;

  /// Closed-form d a / d xi. Throws DomainError at xi = 0, and at any xi
  /// with a vanishing block when p(x) < 2 (the derivative is unbounded there).
  Mat eval_flux_jacobian(std::size_t k, const Vec& xi) const;

  /// Newton matrix for the diffusion block: the exact Jacobian with
  /// |xi_j|^2 replaced by |xi_j|^2 + eps^2. Defined everywhere.
  Mat regularized_flux_jacobian(std::size_t k, const Vec& xi, double eps) const;

  /// Secant (lagged-coefficient) matrix: on blocks with p < 2 the isotropic
  /// g_j (|xi_j|^2 + eps^2)^{(p-2)/2} I, which dominates the exact Jacobian
  /// there; on the other blocks the regularized exact Jacobian.
  Mat secant_flux_jacobian(std::size_t k, const Vec& xi, double eps) const;

  /// <a(xi) - a(eta), xi - eta> against gamma0 |xi-eta|^p (p > 2) or
  /// gamma0 |xi-eta|^2 / (1+|xi|+|eta|)^{2-p} (p <= 2).
  Gap monotonicity_gap(std::size_t k, const Vec& xi, const Vec& eta) const;

  /// Picone pair for roots U = u^{1/r}, V = v^{1/r}:
  ///   lhs = a(grad U) . grad(v / u^{(r-1)/r}),
  ///   rhs = A(grad V)^{r/p} A(grad U)^{(p-r)/p}.
  /// Throws DomainError unless 1 <= r < p(x).
  Gap picone_gap(std::size_t k, const Vec& grad_u_root, const Vec& grad_v_root,
                 const Vec& ratio_grad, double r) const;

  /// Morawetz-type comparison: lhs = A((xi-eta)/2), rhs = zeta (A(xi)+A(eta))^{1-s}
  /// (A(xi)+A(eta)-2A((xi+eta)/2))^s with s = min(1, p/2).
  Gap morawetz_gap(std::size_t k, const Vec& xi, const Vec& eta) const;

  /// Empirical constant used by monotonicity_gap; 0 until calibrated.
  double gamma0() const noexcept { return gamma0_; }
  LerayLionsOperator with_gamma0(double gamma0) const;

private:
  ExponentField exponent_;
  Partition blocks_;
  std::vector<std::vector<double>> weights_;
  int dimension_ = 0;
  double weight_floor_ = 0.0;
  double weight_ceiling_ = 0.0;
  double gamma0_ = 0.0;
};

/// Sampled ratio <a(xi)-a(eta),xi-eta> / (reference term) used for gamma0.
/// Returns 0.9 * the minimum ratio over `samples` seeded draws.
double calibrate_gamma0(const LerayLionsOperator& op, std::size_t samples,
                        std::uint64_t seed);

/// Prototype source f(x, s) = g(x) delta(x)^gamma s^beta on a point set
/// (mesh vertices when attached to a mesh).
class SourceTerm {
public:
  SourceTerm(std::vector<double> g, std::vector<double> delta, double gamma,
             double beta, double q);

  std::size_t num_points() const noexcept { return coefficient_.size(); }
  double gamma() const noexcept { return gamma_; }
  double beta() const noexcept { return beta_; }
  double q() const noexcept { return q_; }
  std::span<const double> g() const noexcept { return g_; }

  /// f(x_k, s); throws DomainError for s < 0.
  double eval(std::size_t k, double s) const;
  /// F(x_k, t) = int_0^{t+} f(x_k, s) ds.
  double primitive(std::size_t k, double t) const;
  /// d f / d s for s > 0 (0 for s <= 0).
  double derivative(std::size_t k, double s) const;
  /// f(x_k, s) / s^{q-1}; 0 at s = 0 by convention.
  double ratio(std::size_t k, double s) const;

private:
  std::vector<double> g_;
  std::vector<double> coefficient_; // g * delta^gamma
  double gamma_ = 0.0;
  double beta_ = 0.0;
  double q_ = 0.0;
};

/// Time dependent potential h(t, x_k) with lower envelope and sup-norm.
class PotentialField {
public:
  using Evaluator = std::function<double(double t, std::size_t k)>;

  PotentialField(Evaluator h, std::size_t points, std::vector<double> lower_envelope,
                 double sup_norm, std::optional<std::vector<double>> limit = std::nullopt);

  /// h(t, x) = values(x).
  static PotentialField time_constant(std::vector<double> values);
  /// h(t, x) = h_inf(x) (1 + amplitude (1+t)^{-(1+eta)}); amplitude >= -1.
  static PotentialField decaying(std::vector<double> h_inf, double amplitude, double eta);

  double operator()(double t, std::size_t k) const { return h_(t, k); }
  std::size_t num_points() const noexcept { return points_; }
  std::span<const double> lower_envelope() const noexcept { return lower_; }
  double sup_norm() const noexcept { return sup_norm_; }
  const std::optional<std::vector<double>>& limit() const noexcept { return limit_; }

  /// Checks h(t, x_k) >= lower(x_k) at the given times; throws ValidationError "(H_h)".
  void validate_on(std::span<const double> times) const;

private:
  Evaluator h_;
  std::size_t points_ = 0;
  std::vector<double> lower_;
  double sup_norm_ = 0.0;
  std::optional<std::vector<double>> limit_;
};

enum class Regime { SlowDiffusion, FastDiffusion, Mixed };

std::string_view to_string(Regime regime);

/// Slow diffusion iff 2q < p_-, fast iff 2q > p_+. Requires q in (1, p_-).
Regime classify_regime(const ExponentField& exponents, double q);

} // namespace dne

#endif
