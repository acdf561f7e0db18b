#ifndef DNE_TIME_INTEGRATOR_HPP
#define DNE_TIME_INTEGRATOR_HPP

#include "dne/elliptic.hpp"

#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

namespace dne {

/// Per-vertex time average of h over [t_{n-1}, t_n] with t_k = k dt,
/// by 5-point Gauss-Legendre quadrature.
std::vector<double> average_potential(const PotentialField& h, int n, double dt);

struct StepOptions {
  SolverOptions solver = SolverOptions::for_dimension(1);
  /// Also start from the bump and from `lambda_start`, keeping the lowest energy.
  bool multistart = true;
  std::optional<DiscreteField> lambda_start;
};

/// One implicit Euler step: the Standard problem with lambda = dt and
/// h0 = dt h_n + v_{n-1}^q, warm-started from v_{n-1}.
SolveResult step(const Model& model, const DiscreteField& previous, const std::vector<double>& h_n, double dt,
                 const StepOptions& options);

/// Evolution inputs. `create` measures the constant c of the sandwich
/// c^{-1} delta <= v0 <= c delta over interior vertices.
struct EvolutionSetup {
  Model model;
  std::shared_ptr<const PotentialField> potential;
  double horizon = 1.0;
  int steps = 1;
  DiscreteField initial;
  double sandwich_constant = 1.0;
  StepOptions step_options;
  /// Keep every stride-th field (the final field is always kept).
  int stride = 1;

  static EvolutionSetup create(Model model, std::shared_ptr<const PotentialField> potential, double horizon,
                               int steps, DiscreteField initial);

  double dt() const noexcept { return horizon / steps; }
};

/// Smallest c with c^{-1} delta <= v <= c delta at interior vertices; throws
/// ValidationError "M_delta^1" if v is not positive there.
double sandwich_constant(const DiscreteField& v);

struct StepDiagnostics {
  SolverReport report;
  /// Lumped L2 norm of (v_n^q - v_{n-1}^q) / dt.
  double increment_norm = 0.0;
  /// Stationary energy with b = h^n evaluated at v_n.
  double stationary_energy = 0.0;
};

/// Discrete dissipation balance: lhs + dissipation <= rhs, where
///   lhs = 1/2 sum dt |(u_n - u_{n-1})/dt|^2,
///   dissipation = sum int a(grad v_n) . grad I((u_n - u_{n-1}) / v_n^{q-1}),
///   rhs = sum dt (|h^n|^2 + |f(v_n)/v_n^{q-1}|^2), all lumped.
struct DissipationBalance {
  double lhs = 0.0;
  double dissipation = 0.0;
  double rhs = 0.0;
  /// q (modular(v_N) - modular(v_0)), a lower bound for the dissipation.
  double modular_difference = 0.0;
  bool satisfied = true;
};

struct Trajectory {
  double dt = 0.0;
  int steps = 0;
  int stride = 1;
  double q = 2.0;
  /// Times of the stored fields.
  std::vector<double> times;
  std::vector<DiscreteField> fields;
  /// Step indices of the stored fields.
  std::vector<int> indices;
  /// One entry per completed step (index n-1 for step n).
  std::vector<StepDiagnostics> diagnostics;
  DissipationBalance dissipation;

  const DiscreteField& final_field() const { return fields.back(); }
};

/// A step failed; the trajectory up to the last accepted step is kept.
class StepFailure : public std::runtime_error {
public:
  StepFailure(const std::string& what, int step_index, Trajectory partial)
      : std::runtime_error(what), step_index_(step_index), partial_(std::move(partial)) {}
  int step_index() const noexcept { return step_index_; }
  const Trajectory& partial() const noexcept { return partial_; }

private:
  int step_index_;
  Trajectory partial_;
};

Trajectory evolve(const EvolutionSetup& setup);

/// Nodal power map u_n = v_n^q applied to every stored field.
Trajectory change_of_variables_u(const Trajectory& trajectory);

/// Piecewise-linear in time interpolant of u = v^q at time t between stored
/// fields (requires stride 1 for the exact scheme interpolant).
DiscreteField interpolate_u(const Trajectory& trajectory, double t);

} // namespace dne

#endif
