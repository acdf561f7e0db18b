#include "dne/time_integrator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace dne {

namespace {

// Gauss-Legendre nodes and weights on [-1, 1].
constexpr std::array<double, 5> kGaussNodes{-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                            0.9061798459386640};
constexpr std::array<double, 5> kGaussWeights{0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                              0.4786286704993665, 0.2369268850561891};

double lumped_inner(const Mesh& mesh, const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < mesh.num_vertices(); ++i) s += mesh.lumped_weight(i) * a[i] * b[i];
  return s;
}

} // namespace

std::vector<double> average_potential(const PotentialField& h, int n, double dt) {
  if (n < 1) throw DomainError("step index must be >= 1");
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  const double t0 = (n - 1) * dt;
  std::vector<double> out(h.num_points(), 0.0);
  for (std::size_t g = 0; g < kGaussNodes.size(); ++g) {
    const double t = t0 + 0.5 * dt * (kGaussNodes[g] + 1.0);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += 0.5 * kGaussWeights[g] * h(t, k);
  }
  return out;
}

SolveResult step(const Model& model, const DiscreteField& previous, const std::vector<double>& h_n, double dt,
                 const StepOptions& options) {
  if (h_n.size() != model.mesh->num_vertices()) throw DomainError("averaged potential must live on vertices");
  if ((previous.values().array() < 0.0).any()) throw DomainError("previous step must be nonnegative");
  std::vector<double> h0(h_n.size());
  for (std::size_t i = 0; i < h0.size(); ++i) {
    const double v = previous[i];
    h0[i] = dt * h_n[i] + (v > 0.0 ? std::pow(v, model.q) : 0.0);
  }
  const EllipticProblem problem = EllipticProblem::standard(model, dt, std::move(h0));
  std::vector<DiscreteField> starts{previous};
  if (options.multistart) {
    starts.push_back(DiscreteField::zero(model.mesh));
    if (options.lambda_start) starts.push_back(*options.lambda_start);
  }
  return solve_multistart(problem, starts, options.solver);
}

double sandwich_constant(const DiscreteField& v) {
  const Mesh& mesh = v.mesh();
  double c = 1.0;
  for (int vi : mesh.interior_vertices()) {
    const auto i = static_cast<std::size_t>(vi);
    const double d = mesh.boundary_distance(mesh.vertex(i));
    if (!(v[i] > 0.0)) throw ValidationError("M_delta^1", "initial datum must be positive at interior vertices");
    c = std::max({c, v[i] / d, d / v[i]});
  }
  return c;
}

EvolutionSetup EvolutionSetup::create(Model model, std::shared_ptr<const PotentialField> potential,
                                      double horizon, int steps, DiscreteField initial) {
  model.check_consistency();
  if (!potential) throw DomainError("evolution needs a potential");
  if (potential->num_points() != model.mesh->num_vertices())
    throw DomainError("potential must be sampled on mesh vertices");
  if (!(horizon > 0.0)) throw DomainError("horizon must be positive");
  if (steps < 1) throw DomainError("at least one time step is required");
  if (initial.size() != model.mesh->num_vertices()) throw DomainError("initial datum lives on another mesh");
  const double c = dne::sandwich_constant(initial);
  EvolutionSetup setup{std::move(model), std::move(potential), horizon, steps, std::move(initial), c, {}, 1};
  setup.step_options.solver = SolverOptions::for_dimension(setup.model.mesh->dimension());
  return setup;
}

Trajectory evolve(const EvolutionSetup& setup) {
  const Model& model = setup.model;
  const Mesh& mesh = *model.mesh;
  const double dt = setup.dt();
  const double q = model.q;
  if (setup.stride < 1) throw DomainError("stride must be >= 1");

  Trajectory traj;
  traj.dt = dt;
  traj.steps = setup.steps;
  traj.stride = setup.stride;
  traj.q = q;
  traj.times.push_back(0.0);
  traj.fields.push_back(setup.initial);
  traj.indices.push_back(0);

  const std::size_t nv = mesh.num_vertices();
  DiscreteField current = setup.initial;
  double increment_sum = 0.0;
  double dissipation = 0.0;
  double rhs = 0.0;

  for (int n = 1; n <= setup.steps; ++n) {
    const std::vector<double> h_n = average_potential(*setup.potential, n, dt);
    SolveResult result = [&]() {
      try {
        return step(model, current, h_n, dt, setup.step_options);
      } catch (const NonConvergence& e) {
        traj.steps = n - 1;
        throw StepFailure(std::string("step ") + std::to_string(n) + ": " + e.what(), n, traj);
      }
    }();
    const DiscreteField& next = result.solution;

    // Increment (u_n - u_{n-1}) / dt and the dissipation test function.
    std::vector<double> increment(nv, 0.0), test(nv, 0.0), ratio(nv, 0.0);
    Vector test_vec = Vector::Zero(static_cast<Eigen::Index>(nv));
    for (int vi : mesh.interior_vertices()) {
      const auto i = static_cast<std::size_t>(vi);
      const double un = std::pow(std::max(next[i], 0.0), q);
      const double up = std::pow(std::max(current[i], 0.0), q);
      increment[i] = (un - up) / dt;
      if (next[i] > 0.0) {
        test[i] = (un - up) / std::pow(next[i], q - 1.0);
        if (model.source) ratio[i] = model.source->ratio(i, next[i]);
      }
      test_vec[vi] = test[i];
    }
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
      const Vec a = model.op->eval_flux(e, element_gradient(mesh, e, next.values()));
      dissipation += mesh.measure(e) * a.dot(element_gradient(mesh, e, test_vec));
    }
    const double inc2 = lumped_inner(mesh, increment, increment);
    increment_sum += 0.5 * dt * inc2;
    rhs += dt * (lumped_inner(mesh, h_n, h_n) + lumped_inner(mesh, ratio, ratio));

    StepDiagnostics diag;
    diag.report = std::move(result.report);
    diag.increment_norm = std::sqrt(inc2);
    diag.stationary_energy = energy(EllipticProblem::stationary(model, h_n), next);
    traj.diagnostics.push_back(std::move(diag));

    current = next;
    if (n % setup.stride == 0 || n == setup.steps) {
      traj.times.push_back(n * dt);
      traj.fields.push_back(current);
      traj.indices.push_back(n);
    }
  }

  DissipationBalance& balance = traj.dissipation;
  balance.lhs = increment_sum;
  balance.dissipation = dissipation;
  balance.rhs = rhs;
  balance.modular_difference = q * (modular(current, *model.op) - modular(setup.initial, *model.op));
  const double slack = 1e-8 * (std::abs(balance.lhs) + std::abs(balance.dissipation) + std::abs(balance.rhs)) + 1e-12;
  balance.satisfied = balance.lhs + balance.dissipation <= balance.rhs + slack;
  return traj;
}

Trajectory change_of_variables_u(const Trajectory& trajectory) {
  Trajectory out = trajectory;
  for (auto& field : out.fields) field = field.power(trajectory.q);
  return out;
}

DiscreteField interpolate_u(const Trajectory& trajectory, double t) {
  const auto& times = trajectory.times;
  if (times.empty()) throw DomainError("empty trajectory");
  if (t <= times.front()) return trajectory.fields.front().power(trajectory.q);
  if (t >= times.back()) return trajectory.fields.back().power(trajectory.q);
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const auto k = static_cast<std::size_t>(it - times.begin());
  const double w = (t - times[k - 1]) / (times[k] - times[k - 1]);
  const DiscreteField a = trajectory.fields[k - 1].power(trajectory.q);
  const DiscreteField b = trajectory.fields[k].power(trajectory.q);
  return DiscreteField(a.mesh_ptr(), (1.0 - w) * a.values() + w * b.values());
}

} // namespace dne
