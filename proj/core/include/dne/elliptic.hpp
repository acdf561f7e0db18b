#ifndef DNE_ELLIPTIC_HPP
#define DNE_ELLIPTIC_HPP

#include "dne/mesh.hpp"
#include "dne/operator_model.hpp"

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dne {

/// Shared discrete setting: mesh, diffusion operator on barycenters, optional
/// source on vertices, and the time exponent q.
struct Model {
  MeshPtr mesh;
  std::shared_ptr<const LerayLionsOperator> op;
  std::shared_ptr<const SourceTerm> source; // null when disabled
  double q = 2.0;

  /// Throws DomainError when the pieces are attached to different point sets.
  void check_consistency() const;
};

enum class Variant { Standard, PureLambda, Stationary, SubSolution, SuperSolution };

std::string to_string(Variant variant);

/// Discrete energy, one functional covering every variant:
///
///   J(v) = mass/(2q) sum_i m_i (v_i^+)^{2q} + diffusion sum_e |e| A(x_e, grad v)/p(x_e)
///        - 1/q sum_i m_i h0_i (v_i^+)^q - source_scale sum_i m_i F(x_i, v_i) - sum_i m_i load_i v_i
///
/// Zeroth-order terms use the lumped vertex rule.
struct EnergyCoefficients {
  double mass = 0.0;
  double diffusion = 1.0;
  std::vector<double> h0;
  double source_scale = 0.0;
  std::vector<double> load;
};

/// A semilinear elliptic problem on a Model. Use the named constructors.
class EllipticProblem {
public:
  /// v^{2q-1} - lambda div a(x, grad v) = h0 v^{q-1} + lambda f(x, v).
  static EllipticProblem standard(Model model, double lambda, std::vector<double> h0);
  /// -div a(x, grad w) = lambda.
  static EllipticProblem pure_lambda(Model model, double lambda);
  /// -div a(x, grad w) = rho(x) with a vertex load; source disabled.
  static EllipticProblem with_load(Model model, std::vector<double> load);
  /// -div a(x, grad v) = b v^{q-1} + f(x, v).
  static EllipticProblem stationary(Model model, std::vector<double> b);
  /// -div a(x, grad w) = mu (lower w^{q-1} + f(x, w)).
  static EllipticProblem subsolution(Model model, double mu, std::vector<double> lower_envelope);
  /// -div a(x, grad w) = sup_h w^{q-1} + f(x, w) + kappa.
  static EllipticProblem supersolution(Model model, double kappa, double sup_h);

  const Model& model() const noexcept { return model_; }
  const Mesh& mesh() const noexcept { return *model_.mesh; }
  Variant variant() const noexcept { return variant_; }
  double lambda() const noexcept { return lambda_; }
  /// mu for SubSolution, kappa for SuperSolution, 0 otherwise.
  double parameter() const noexcept { return parameter_; }
  double q() const noexcept { return model_.q; }
  const EnergyCoefficients& coefficients() const noexcept { return coefficients_; }

  /// True when v = 0 is not the minimizer (some forcing is present).
  bool is_driven() const;

private:
  EllipticProblem(Model model, Variant variant, double lambda, double parameter,
                  EnergyCoefficients coefficients);

  Model model_;
  Variant variant_ = Variant::Standard;
  double lambda_ = 1.0;
  double parameter_ = 0.0;
  EnergyCoefficients coefficients_;
};

/// Raised for parameter choices outside the admissible range (q, lambda, h0).
class InvalidProblem : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

struct SolverReport {
  int iterations = 0;
  double final_gradient_norm = 0.0;
  double energy = 0.0;
  int line_search_failures = 0;
  bool regularization_floor_hit = false;
  bool converged = false;
  /// Iterations that used the convex-part Hessian or a gradient step.
  int fallback_steps = 0;
  /// Steps accepted below the resolution of energy differences.
  int roundoff_steps = 0;
  std::vector<double> energy_history;
};

class NonConvergence : public std::runtime_error {
public:
  NonConvergence(const std::string& what, SolverReport report)
      : std::runtime_error(what), report_(std::move(report)) {}
  const SolverReport& report() const noexcept { return report_; }

private:
  SolverReport report_;
};

struct SolverOptions {
  double tolerance = 1e-9;
  int max_iterations = 200;
  double armijo = 1e-4;
  double backtrack = 0.5;
  double hessian_eps = 1e-8;

  /// 1e-9 in 1D, 1e-7 in 2D.
  static SolverOptions for_dimension(int dimension);
};

struct SolveResult {
  DiscreteField solution;
  SolverReport report;
};

/// Quadrature value of the variant's energy.
double energy(const EllipticProblem& problem, const DiscreteField& v);

/// Nodal partial derivatives of the energy (weak residual against hat
/// functions); boundary entries are zero.
DiscreteField energy_gradient(const EllipticProblem& problem, const DiscreteField& v);

/// Sup-norm of the projected gradient over interior vertices, the solver's
/// stopping quantity on the cone v >= 0.
double projected_gradient_norm(const EllipticProblem& problem, const DiscreteField& v);

/// Projected damped Newton on the cone v >= 0. A zero initial guess of a
/// driven problem is replaced by the best scaled bump.
SolveResult solve(const EllipticProblem& problem, const DiscreteField& initial_guess,
                  const SolverOptions& options);
SolveResult solve(const EllipticProblem& problem, const DiscreteField& initial_guess);

/// Runs solve from each start and keeps the lowest energy. Throws
/// NonConvergence only if every start fails.
SolveResult solve_multistart(const EllipticProblem& problem, const std::vector<DiscreteField>& starts,
                             const SolverOptions& options);

/// -div a(x, grad w) = lambda, w = 0 on the boundary.
DiscreteField solve_lambda_problem(double lambda, const MeshPtr& mesh,
                                   const std::shared_ptr<const LerayLionsOperator>& op,
                                   const std::optional<SolverOptions>& options = std::nullopt);

/// Raised when the mu/kappa search leaves its range.
class FailedToFit : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct PicardOptions {
  double step_tolerance = 1e-11;
  int max_iterations = 200;
};

/// Result of a sub/supersolution construction.
struct Barrier {
  DiscreteField field;
  double parameter = 0.0; // fitted mu or kappa
  double residual = 0.0;  // projected gradient of the barrier problem
  int picard_iterations = 0;
};

/// Solves the subsolution problem for a fixed mu by Picard iteration with a
/// frozen right-hand side, starting from `start`.
Barrier solve_barrier(const EllipticProblem& problem, const DiscreteField& start,
                      const SolverOptions& options, const PicardOptions& picard = {});

/// Halves mu from 1 until the subsolution lies below v0 nodally.
Barrier make_subsolution(const Model& model, std::vector<double> lower_envelope, const DiscreteField& v0,
                         double mu_start = 1.0, const std::optional<SolverOptions>& options = std::nullopt);

/// Doubles kappa from 1 until the supersolution lies above v0 nodally.
Barrier make_supersolution(const Model& model, double sup_h, const DiscreteField& v0,
                           double kappa_start = 1.0,
                           const std::optional<SolverOptions>& options = std::nullopt);

/// Global minimizer of the stationary energy with potential b >= 0, b != 0.
SolveResult solve_stationary(const Model& model, std::vector<double> b,
                             const std::optional<SolverOptions>& options = std::nullopt,
                             const std::optional<DiscreteField>& initial_guess = std::nullopt);

} // namespace dne

#endif
