#ifndef DNE_HARNESS_HPP
#define DNE_HARNESS_HPP

#include "dne/elliptic.hpp"
#include "dne/time_integrator.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace dne {

/// Outcome of one named check. worst_margin is signed and normalized per
/// check; passed iff worst_margin >= -slack (plus any extra condition the
/// check documents, such as strictness).
struct CheckReport {
  std::string check_name;
  std::size_t samples = 0;
  double worst_margin = 0.0;
  std::string location;
  bool passed = true;
  double slack = 0.0;
  /// Named measured quantities (ratios, slopes, norms) for reporting.
  std::vector<std::pair<std::string, double>> measurements;

  double measurement(const std::string& name) const;
};

/// Every tolerance the checks use.
namespace slack {
inline constexpr double kHomogeneity = 1e-10;    // relative to max(1, A(t xi))
inline constexpr double kEuler = 1e-12;          // relative to A
inline constexpr double kGrowth = 1e-10;         // relative
inline constexpr double kConvexity = 1e-12;      // relative to max(1, rhs)
inline constexpr double kJacobian = 1e-10;       // relative eigenvalue floor and symmetry
inline constexpr double kJacobianFd = 1e-5;      // central differences vs closed form
inline constexpr double kMonotonicity = 1e-10;   // relative
inline constexpr double kPicone = 1e-12;         // relative to max(1, |rhs|)
inline constexpr double kLemma21Pointwise = 1e-12;
inline constexpr double kLemma21Field = 1e-10;   // relative to the integrated scale
inline constexpr double kLemma21Equality = 1e-8;
inline constexpr double kAlgebraic = 1e-14;      // relative to max(1, rhs)
inline constexpr double kSourceRatio = 1e-12;
inline constexpr double kMorawetz = 1e-10;
inline constexpr double kContraction = 0.02;     // multiplicative: lhs <= 1.02 rhs
inline constexpr double kIdenticalRuns = 10.0;   // times the solver tolerance
inline constexpr double kOrdering = 1e-8;        // nodal, sandwich and comparison
inline constexpr double kMonotoneTrajectory = 1e-10;
inline constexpr double kLambdaMonotone = 1e-10;
inline constexpr double kLambdaSlope = 0.02;
inline constexpr double kGradientConsistency = 1e-5;
inline constexpr double kStationaryUniqueness = 1e-6;
inline constexpr double kStabilizationGrowth = 1e-6;       // e_{n+1} <= e_n (1 + this)
inline constexpr double kStabilizationBurnIn = 0.2;        // n0 = n* / 5
inline constexpr double kStabilizationNoiseFloor = 1e-9;   // absolute, below solver resolution
inline constexpr double kDissipation = 1e-8;               // relative
inline constexpr double kHopfFloor = 1e-8;
} // namespace slack

struct SamplingOptions {
  std::size_t samples = 100000;
  std::uint64_t seed = 20240601;
  int threads = 1;
};

// ---------------------------------------------------------------------------
// Pointwise algebra (sampled)
// ---------------------------------------------------------------------------

CheckReport check_homogeneity(const LerayLionsOperator& op, const SamplingOptions& options);
CheckReport check_euler(const LerayLionsOperator& op, const SamplingOptions& options);
/// gamma/(p-1) |xi|^p <= A <= weight_ceiling C(J) |xi|^p with gamma the
/// ellipticity constant and C(J) = max(1, J^{1 - p_-/2}) for J blocks.
CheckReport check_growth(const LerayLionsOperator& op, const SamplingOptions& options);
CheckReport check_convexity(const LerayLionsOperator& op, const SamplingOptions& options);
/// Symmetry and eigenvalue floor gamma |xi|^{p-2} of the flux Jacobian.
CheckReport check_flux_jacobian(const LerayLionsOperator& op, const SamplingOptions& options);
/// Closed-form Jacobian against central differences of the flux.
CheckReport check_flux_jacobian_fd(const LerayLionsOperator& op, const SamplingOptions& options);
/// Uses the operator's stored gamma0.
CheckReport check_monotonicity_gap(const LerayLionsOperator& op, const SamplingOptions& options);
/// Picone comparison on consistent triples from the test-function library on
/// the unit box; asserts strictness where r > 1 and grad(u/v) is not small.
CheckReport check_picone(const LerayLionsOperator& op, double r, const SamplingOptions& options);
/// Pointwise two-function sum of the lemma, expected >= 0.
CheckReport check_lemma21_pointwise(const LerayLionsOperator& op, double r, const SamplingOptions& options);
/// |a - b|^{2q} <= (a^q - b^q)^2 for a, b >= 0.
CheckReport check_alg_inequality(double q, const SamplingOptions& options);
/// s -> f(x, s)/s^{q-1} nonincreasing.
CheckReport check_source_monotonicity(const SourceTerm& source, const SamplingOptions& options);
/// Sampled Morawetz-type comparison; pass/fail only for constant p, recorded
/// as informational otherwise.
CheckReport check_morawetz(const LerayLionsOperator& op, const SamplingOptions& options);

// ---------------------------------------------------------------------------
// Fields, solves and trajectories
// ---------------------------------------------------------------------------

/// Integrated two-function sum on P1 fields, with the quotient fields
/// interpolated nodally. Throws DomainError unless both fields are positive
/// at interior vertices.
CheckReport check_lemma21(const LerayLionsOperator& op, double r, const DiscreteField& w1, const DiscreteField& w2);

/// Solves two Standard problems sharing lambda, f and mesh and compares
/// |(v1^q - v2^q)^+| with |(h1 - h2)^+|. When h1 <= h2 also checks v1 <= v2.
CheckReport check_contraction_elliptic(const EllipticProblem& first, const EllipticProblem& second,
                                       const SolverOptions& options);

/// Two-sided and one-sided L2 contraction between two trajectories driven by
/// potentials h and g, at every stored time.
CheckReport check_contraction_parabolic(const Trajectory& first, const Trajectory& second, const PotentialField& h,
                                        const PotentialField& g, double solver_tolerance);

/// sub <= v_n <= super nodally for every stored field.
CheckReport check_sandwich(const Trajectory& trajectory, const DiscreteField& sub, const DiscreteField& super);

enum class Monotonicity { Nondecreasing, Nonincreasing };
CheckReport check_monotone(const Trajectory& trajectory, Monotonicity direction);

/// c^{-1} delta <= v_n <= c delta at interior vertices for every stored field.
CheckReport check_boundary_behavior(const Trajectory& trajectory, double c);

/// Discrete dissipation balance recorded by evolve.
CheckReport check_dissipation(const Trajectory& trajectory);

/// e_n = |v_n^q - v_stat^q|_{L^r}: eventually decreasing after n0 = n*/5 and
/// e(T) <= threshold for every r.
CheckReport check_stabilization(const Trajectory& trajectory, const DiscreteField& v_stat,
                                const std::vector<double>& r_norms, double threshold);

/// Least-squares slope of log |w_lambda|_inf against log lambda (constant p)
/// and nodal monotonicity in lambda. Needs at least 3 lambdas.
CheckReport check_lambda_scaling(const MeshPtr& mesh, const std::shared_ptr<const LerayLionsOperator>& op,
                                 const std::vector<double>& lambdas,
                                 const std::optional<SolverOptions>& options = std::nullopt);

/// Interior positivity and one-sided boundary slopes u(x_b + 2h n_in)/(2h)
/// >= hopf_floor away from corners (band of 3 cells).
CheckReport check_positivity_hopf(const DiscreteField& field, double hopf_floor = slack::kHopfFloor);

/// energy_gradient against central differences of energy.
CheckReport check_gradient_consistency(const EllipticProblem& problem, const DiscreteField& v);

/// Stationary solves from the default starts and from `perturbed` agree in L2.
CheckReport check_stationary_uniqueness(const Model& model, const std::vector<double>& b,
                                        const DiscreteField& perturbed, const SolverOptions& options);

/// Runs independent checks, on up to `threads` threads; output order matches input.
std::vector<CheckReport> run_checks(const std::vector<std::function<CheckReport()>>& checks, int threads);

/// Every stored field must share one mesh; throws DomainError otherwise.
void require_compatible(const Trajectory& first, const Trajectory& second);

} // namespace dne

#endif
