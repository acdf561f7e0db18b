#include "dne/elliptic.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>

namespace dne {

namespace {

using Triplet = Eigen::Triplet<double>;
using SparseMatrix = Eigen::SparseMatrix<double>;

bool all_nonnegative_finite(const std::vector<double>& values) {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v) && v >= 0.0; });
}

bool any_positive_interior(const Mesh& mesh, const std::vector<double>& values) {
  for (int i : mesh.interior_vertices())
    if (values[static_cast<std::size_t>(i)] > 0.0) return true;
  return false;
}

/// The discrete energy and its derivatives on full vertex vectors.
class Functional {
public:
  explicit Functional(const EllipticProblem& problem)
      : problem_(problem), mesh_(problem.mesh()), op_(*problem.model().op), source_(problem.model().source.get()),
        c_(problem.coefficients()), q_(problem.q()) {}

  struct Value {
    double value = 0.0;
    double magnitude = 0.0; // sum of absolute term values, the scale of roundoff
  };

  Value energy(const Vector& v) const {
    Value out;
    for (std::size_t e = 0; e < mesh_.num_elements(); ++e) {
      const Vec xi = element_gradient(mesh_, e, v);
      const double term = c_.diffusion * mesh_.measure(e) * op_.eval_A(e, xi) / op_.p(e);
      out.value += term;
      out.magnitude += term;
    }
    for (int vi : mesh_.interior_vertices()) {
      const auto i = static_cast<std::size_t>(vi);
      const double x = v[vi];
      const double xp = std::max(x, 0.0);
      const double m = mesh_.lumped_weight(i);
      double terms[4] = {0.0, 0.0, 0.0, 0.0};
      if (xp > 0.0) {
        terms[0] = c_.mass / (2.0 * q_) * std::pow(xp, 2.0 * q_);
        terms[1] = -c_.h0[i] / q_ * std::pow(xp, q_);
        if (source_ != nullptr) terms[2] = -c_.source_scale * source_->primitive(i, xp);
      }
      terms[3] = -c_.load[i] * x;
      for (double t : terms) {
        out.value += m * t;
        out.magnitude += m * std::abs(t);
      }
    }
    return out;
  }

  /// Right derivative of the nodal source at x >= 0.
  double source_value(std::size_t i, double x) const {
    if (source_ == nullptr || x < 0.0) return 0.0;
    if (x == 0.0) return source_->beta() == 0.0 ? source_->eval(i, 1.0) : 0.0;
    return source_->eval(i, x);
  }

  Vector gradient(const Vector& v) const {
    Vector g = Vector::Zero(v.size());
    const std::size_t npe = mesh_.vertices_per_element();
    for (std::size_t e = 0; e < mesh_.num_elements(); ++e) {
      const Vec xi = element_gradient(mesh_, e, v);
      const Vec a = op_.eval_flux(e, xi);
      const double w = c_.diffusion * mesh_.measure(e);
      const auto verts = mesh_.element(e);
      for (std::size_t l = 0; l < npe; ++l) g[verts[l]] += w * a.dot(mesh_.shape_gradient(e, l));
    }
    for (int vi : mesh_.interior_vertices()) {
      const auto i = static_cast<std::size_t>(vi);
      const double x = v[vi];
      const double xp = std::max(x, 0.0);
      double d = -c_.load[i] - c_.source_scale * source_value(i, x);
      if (xp > 0.0) d += c_.mass * std::pow(xp, 2.0 * q_ - 1.0) - c_.h0[i] * std::pow(xp, q_ - 1.0);
      g[vi] += mesh_.lumped_weight(i) * d;
    }
    for (std::size_t i = 0; i < mesh_.num_vertices(); ++i)
      if (mesh_.is_boundary(i)) g[static_cast<Eigen::Index>(i)] = 0.0;
    return g;
  }

  /// Second derivative of the nodal terms. Returns NaN where the concave part
  /// is unbounded (x = 0 with a positive h0 or a sublinear source).
  double nodal_curvature(std::size_t i, double x, bool convex_only) const {
    const double xp = std::max(x, 0.0);
    double h = xp > 0.0 ? c_.mass * (2.0 * q_ - 1.0) * std::pow(xp, 2.0 * q_ - 2.0) : 0.0;
    if (convex_only) return h;
    if (xp > 0.0) {
      h -= c_.h0[i] * (q_ - 1.0) * std::pow(xp, q_ - 2.0);
      if (source_ != nullptr) h -= c_.source_scale * source_->derivative(i, xp);
      return h;
    }
    const bool unbounded_h0 = c_.h0[i] > 0.0 && q_ < 2.0;
    const bool unbounded_f = source_ != nullptr && c_.source_scale > 0.0 && source_->beta() > 0.0 &&
                             source_->beta() < 1.0 && source_->eval(i, 1.0) > 0.0;
    return (unbounded_h0 || unbounded_f) ? std::numeric_limits<double>::quiet_NaN() : h;
  }

  /// Hessian triplets on interior dofs. Entries coupling an active dof keep
  /// their slot with value zero so the sparsity pattern never changes.
  /// Returns false when some entry is not finite.
  /// With `secant` set, blocks with p < 2 use the lagged-coefficient matrix,
  /// a majorant of the diffusion curvature there.
  bool hessian(const Vector& v, bool convex_only, bool secant, const std::vector<char>& active, double eps,
               std::vector<Triplet>& out, bool& floor_hit) const {
    out.clear();
    const std::size_t npe = mesh_.vertices_per_element();
    for (std::size_t e = 0; e < mesh_.num_elements(); ++e) {
      const Vec xi = element_gradient(mesh_, e, v);
      if (xi.squaredNorm() < 1e6 * eps * eps) floor_hit = true;
      const Mat jac = secant ? op_.secant_flux_jacobian(e, xi, eps) : op_.regularized_flux_jacobian(e, xi, eps);
      const double w = c_.diffusion * mesh_.measure(e);
      const auto verts = mesh_.element(e);
      for (std::size_t l = 0; l < npe; ++l) {
        const int r = mesh_.dof(static_cast<std::size_t>(verts[l]));
        if (r < 0) continue;
        const Vec jl = jac * mesh_.shape_gradient(e, l);
        for (std::size_t k = 0; k < npe; ++k) {
          const int c = mesh_.dof(static_cast<std::size_t>(verts[k]));
          if (c < 0) continue;
          double value = w * jl.dot(mesh_.shape_gradient(e, k));
          if ((active[static_cast<std::size_t>(r)] || active[static_cast<std::size_t>(c)]) && r != c) value = 0.0;
          if (!std::isfinite(value)) return false;
          out.emplace_back(r, c, value);
        }
      }
    }
    const auto interior = mesh_.interior_vertices();
    for (std::size_t d = 0; d < interior.size(); ++d) {
      const auto i = static_cast<std::size_t>(interior[d]);
      const double h = mesh_.lumped_weight(i) * nodal_curvature(i, v[interior[d]], convex_only);
      if (!std::isfinite(h)) return false;
      out.emplace_back(static_cast<int>(d), static_cast<int>(d), h);
    }
    return true;
  }

private:
  const EllipticProblem& problem_;
  const Mesh& mesh_;
  const LerayLionsOperator& op_;
  const SourceTerm* source_;
  const EnergyCoefficients& c_;
  double q_;
};

Vector to_full(const Mesh& mesh, const Vector& interior) {
  Vector full = Vector::Zero(static_cast<Eigen::Index>(mesh.num_vertices()));
  const auto ids = mesh.interior_vertices();
  for (std::size_t d = 0; d < ids.size(); ++d) full[ids[d]] = interior[static_cast<Eigen::Index>(d)];
  return full;
}

Vector to_interior(const Mesh& mesh, const Vector& full) {
  const auto ids = mesh.interior_vertices();
  Vector out(static_cast<Eigen::Index>(ids.size()));
  for (std::size_t d = 0; d < ids.size(); ++d) out[static_cast<Eigen::Index>(d)] = full[ids[d]];
  return out;
}

double projected_norm(const Vector& x, const Vector& g) {
  double worst = 0.0;
  for (Eigen::Index d = 0; d < x.size(); ++d) {
    const double pg = x[d] > 0.0 ? g[d] : std::min(g[d], 0.0);
    worst = std::max(worst, std::abs(pg));
  }
  return worst;
}

void require_same_mesh(const EllipticProblem& problem, const DiscreteField& v) {
  if (v.size() != problem.mesh().num_vertices()) throw DomainError("field does not live on the problem mesh");
}

} // namespace

// ----------------------------------------------------------------------------
// Model and problem construction
// ----------------------------------------------------------------------------

void Model::check_consistency() const {
  if (!mesh || !op) throw DomainError("model needs a mesh and an operator");
  if (op->dimension() != mesh->dimension()) throw DomainError("operator and mesh dimensions differ");
  if (op->num_points() != mesh->num_elements()) throw DomainError("operator must be sampled on element barycenters");
  if (source) {
    if (source->num_points() != mesh->num_vertices()) throw DomainError("source must be sampled on mesh vertices");
    if (source->q() != q) throw DomainError("source and model disagree on q");
  }
}

std::string to_string(Variant variant) {
  switch (variant) {
  case Variant::Standard: return "standard";
  case Variant::PureLambda: return "pure-lambda";
  case Variant::Stationary: return "stationary";
  case Variant::SubSolution: return "subsolution";
  case Variant::SuperSolution: return "supersolution";
  }
  return "unknown";
}

EllipticProblem::EllipticProblem(Model model, Variant variant, double lambda, double parameter,
                                 EnergyCoefficients coefficients)
    : model_(std::move(model)), variant_(variant), lambda_(lambda), parameter_(parameter),
      coefficients_(std::move(coefficients)) {
  model_.check_consistency();
  const std::size_t nv = model_.mesh->num_vertices();
  if (coefficients_.h0.empty()) coefficients_.h0.assign(nv, 0.0);
  if (coefficients_.load.empty()) coefficients_.load.assign(nv, 0.0);
  if (coefficients_.h0.size() != nv || coefficients_.load.size() != nv)
    throw DomainError("potential and load must be sampled on mesh vertices");
  if (!(std::isfinite(lambda_) && lambda_ > 0.0)) throw InvalidProblem("lambda must be positive");
  if (!all_nonnegative_finite(coefficients_.h0)) throw InvalidProblem("h0 must be nonnegative and finite");
  if (!std::all_of(coefficients_.load.begin(), coefficients_.load.end(), [](double v) { return std::isfinite(v); }))
    throw InvalidProblem("load must be finite");
  if (variant_ != Variant::PureLambda) {
    const double p_minus = model_.op->exponent().p_minus();
    if (!(model_.q > 1.0 && model_.q < p_minus)) throw InvalidProblem("q must lie in (1, p_-)");
  }
}

EllipticProblem EllipticProblem::standard(Model model, double lambda, std::vector<double> h0) {
  EnergyCoefficients c;
  c.mass = 1.0;
  c.diffusion = lambda;
  c.h0 = std::move(h0);
  c.source_scale = lambda;
  return EllipticProblem(std::move(model), Variant::Standard, lambda, 0.0, std::move(c));
}

EllipticProblem EllipticProblem::pure_lambda(Model model, double lambda) {
  if (!(lambda > 0.0)) throw InvalidProblem("lambda must be positive");
  EnergyCoefficients c;
  c.load.assign(model.mesh ? model.mesh->num_vertices() : 0, lambda);
  model.source.reset();
  return EllipticProblem(std::move(model), Variant::PureLambda, lambda, 0.0, std::move(c));
}

EllipticProblem EllipticProblem::with_load(Model model, std::vector<double> load) {
  EnergyCoefficients c;
  c.load = std::move(load);
  model.source.reset();
  return EllipticProblem(std::move(model), Variant::PureLambda, 1.0, 0.0, std::move(c));
}

EllipticProblem EllipticProblem::stationary(Model model, std::vector<double> b) {
  if (!model.mesh) throw DomainError("model needs a mesh");
  if (b.size() != model.mesh->num_vertices()) throw DomainError("potential must be sampled on mesh vertices");
  if (!any_positive_interior(*model.mesh, b)) throw InvalidProblem("stationary potential b must not vanish identically");
  EnergyCoefficients c;
  c.h0 = std::move(b);
  c.source_scale = 1.0;
  return EllipticProblem(std::move(model), Variant::Stationary, 1.0, 0.0, std::move(c));
}

EllipticProblem EllipticProblem::subsolution(Model model, double mu, std::vector<double> lower_envelope) {
  if (!(mu > 0.0)) throw InvalidProblem("mu must be positive");
  for (double& h : lower_envelope) h *= mu;
  EnergyCoefficients c;
  c.h0 = std::move(lower_envelope);
  c.source_scale = mu;
  return EllipticProblem(std::move(model), Variant::SubSolution, 1.0, mu, std::move(c));
}

EllipticProblem EllipticProblem::supersolution(Model model, double kappa, double sup_h) {
  if (!(kappa > 0.0)) throw InvalidProblem("kappa must be positive");
  if (!(sup_h >= 0.0)) throw InvalidProblem("sup-norm of h must be nonnegative");
  const std::size_t nv = model.mesh ? model.mesh->num_vertices() : 0;
  EnergyCoefficients c;
  c.h0.assign(nv, sup_h);
  c.source_scale = 1.0;
  c.load.assign(nv, kappa);
  return EllipticProblem(std::move(model), Variant::SuperSolution, 1.0, kappa, std::move(c));
}

bool EllipticProblem::is_driven() const {
  const Mesh& m = mesh();
  if (any_positive_interior(m, coefficients_.h0)) return true;
  for (int i : m.interior_vertices())
    if (coefficients_.load[static_cast<std::size_t>(i)] != 0.0) return true;
  if (model_.source && coefficients_.source_scale > 0.0)
    for (int i : m.interior_vertices())
      if (model_.source->eval(static_cast<std::size_t>(i), 1.0) > 0.0) return true;
  return false;
}

SolverOptions SolverOptions::for_dimension(int dimension) {
  SolverOptions options;
  options.tolerance = dimension >= 2 ? 1e-7 : 1e-9;
  return options;
}

// ----------------------------------------------------------------------------
// Energy and gradient
// ----------------------------------------------------------------------------

double energy(const EllipticProblem& problem, const DiscreteField& v) {
  require_same_mesh(problem, v);
  return Functional(problem).energy(v.values()).value;
}

DiscreteField energy_gradient(const EllipticProblem& problem, const DiscreteField& v) {
  require_same_mesh(problem, v);
  return DiscreteField(problem.model().mesh, Functional(problem).gradient(v.values()));
}

double projected_gradient_norm(const EllipticProblem& problem, const DiscreteField& v) {
  require_same_mesh(problem, v);
  const Mesh& mesh = problem.mesh();
  const Vector g = Functional(problem).gradient(v.values());
  return projected_norm(to_interior(mesh, v.values()), to_interior(mesh, g));
}

// ----------------------------------------------------------------------------
// Projected damped Newton
// ----------------------------------------------------------------------------

namespace {

/// Scaled bump t * delta / max(delta) with the lowest energy over t = 2^k.
Vector best_bump(const Mesh& mesh, const Functional& functional) {
  const BoundaryDistance dist = boundary_distance_field(mesh);
  const double dmax = *std::max_element(dist.at_vertices.begin(), dist.at_vertices.end());
  Vector shape = Vector::Zero(static_cast<Eigen::Index>(mesh.num_vertices()));
  for (int i : mesh.interior_vertices()) shape[i] = dist.at_vertices[static_cast<std::size_t>(i)] / dmax;
  Vector best = shape;
  double best_energy = std::numeric_limits<double>::infinity();
  for (int k = 20; k >= -40; --k) {
    const Vector trial = std::ldexp(1.0, k) * shape;
    const double j = functional.energy(trial).value;
    if (j < best_energy) {
      best_energy = j;
      best = trial;
    }
  }
  return best;
}

enum class Mode { Exact, Secant, ConvexPart, Gradient };

} // namespace

SolveResult solve(const EllipticProblem& problem, const DiscreteField& initial_guess, const SolverOptions& options) {
  require_same_mesh(problem, initial_guess);
  if ((initial_guess.values().array() < 0.0).any()) throw DomainError("initial guess must be nonnegative");
  const Mesh& mesh = problem.mesh();
  const Functional functional(problem);
  const auto n = static_cast<Eigen::Index>(mesh.num_dofs());

  Vector full = initial_guess.values();
  // Without forcing every energy term is nonnegative and v = 0 is the unique minimizer.
  if (!problem.is_driven()) full.setZero();
  else if (full.isZero(0.0)) full = best_bump(mesh, functional);

  SolverReport report;
  Functional::Value value = functional.energy(full);
  Vector g = to_interior(mesh, functional.gradient(full));
  Vector x = to_interior(mesh, full);
  double pg = projected_norm(x, g);
  report.energy_history.push_back(value.value);

  std::vector<Triplet> triplets;
  std::vector<char> active(static_cast<std::size_t>(n), 0);
  SparseMatrix hessian(n, n);
  Eigen::SimplicialLDLT<SparseMatrix> ldlt;
  bool pattern_ready = false;
  // For p < 2 the exact Jacobian underestimates the curvature towards small
  // gradients, so a damped exact step is replaced by a secant step.
  const bool singular = problem.model().op->exponent().p_minus() < 2.0;

  auto finish = [&]() {
    report.final_gradient_norm = pg;
    report.energy = value.value;
    return SolveResult{DiscreteField(problem.model().mesh, to_full(mesh, x)), report};
  };

  for (int iteration = 0;; ++iteration) {
    if (pg <= options.tolerance) {
      report.converged = true;
      report.iterations = iteration;
      return finish();
    }
    if (iteration >= options.max_iterations) {
      report.iterations = iteration;
      report.final_gradient_norm = pg;
      report.energy = value.value;
      throw NonConvergence("projected Newton exceeded the iteration limit", report);
    }

    // Active set: variables at (or within eps_k of) the bound with a positive gradient.
    double eps_k = 0.0;
    for (Eigen::Index d = 0; d < n; ++d) eps_k = std::max(eps_k, std::abs(x[d] - std::max(x[d] - g[d], 0.0)));
    eps_k = std::min(eps_k, 1e-3);
    for (Eigen::Index d = 0; d < n; ++d)
      active[static_cast<std::size_t>(d)] = (x[d] <= eps_k && g[d] > 0.0) ? 1 : 0;

    // Newton-type direction for the given curvature model; empty when the
    // matrix is not finite or not positive definite.
    auto newton_direction = [&](bool convex_only, bool secant) -> std::optional<Vector> {
      if (!functional.hessian(full, convex_only, secant, active, options.hessian_eps, triplets,
                              report.regularization_floor_hit))
        return std::nullopt;
      hessian.setFromTriplets(triplets.begin(), triplets.end());
      if (!pattern_ready) {
        ldlt.analyzePattern(hessian);
        pattern_ready = true;
      }
      ldlt.factorize(hessian);
      if (ldlt.info() != Eigen::Success) return std::nullopt;
      const Vector diag = ldlt.vectorD();
      if (!(diag.array() > 0.0).all() || !diag.allFinite()) return std::nullopt;
      Vector direction = -ldlt.solve(g);
      if (!direction.allFinite()) return std::nullopt;
      return direction;
    };

    // With p < 2 the full exact Newton step converges fast near the minimizer
    // but can cycle far from it, so it competes with the secant step.
    std::optional<std::pair<Vector, Functional::Value>> exact_candidate;
    if (singular) {
      if (const auto direction = newton_direction(false, false)) {
        const Vector trial = (x + *direction).cwiseMax(0.0);
        const double decrease = g.dot(trial - x);
        Functional::Value trial_value = functional.energy(to_full(mesh, trial));
        if (decrease < 0.0 && trial_value.value <= value.value + options.armijo * decrease)
          exact_candidate.emplace(trial, trial_value);
      }
    }

    bool accepted = false;
    for (Mode mode : {Mode::Secant, Mode::Exact, Mode::ConvexPart, Mode::Gradient}) {
      if (mode == Mode::Secant && !singular) continue;
      if (mode == Mode::Exact && singular) continue;
      Vector direction(n);
      if (mode != Mode::Gradient) {
        auto candidate = newton_direction(mode == Mode::ConvexPart, mode != Mode::Exact);
        if (!candidate) continue;
        direction = std::move(*candidate);
      } else {
        // Diagonally scaled gradient step using the convex-part curvature.
        functional.hessian(full, true, true, active, options.hessian_eps, triplets, report.regularization_floor_hit);
        Vector diag = Vector::Zero(n);
        for (const auto& t : triplets)
          if (t.row() == t.col()) diag[t.row()] += t.value();
        for (Eigen::Index d = 0; d < n; ++d) direction[d] = -g[d] / std::max(diag[d], 1e-300);
        if (!direction.allFinite()) direction = -g;
      }
      const double slope = g.dot(direction);
      if (!(slope < 0.0)) continue;

      double alpha = 1.0;
      for (int halving = 0; halving < 60 && !accepted; ++halving, alpha *= options.backtrack) {
        const Vector trial = (x + alpha * direction).cwiseMax(0.0);
        const Vector trial_full = to_full(mesh, trial);
        const Functional::Value trial_value = functional.energy(trial_full);
        const double decrease = g.dot(trial - x);
        if (decrease < 0.0 && trial_value.value <= value.value + options.armijo * decrease &&
            trial_value.value < value.value) {
          x = trial;
          full = trial_full;
          value = trial_value;
          accepted = true;
        }
      }
      if (!accepted) {
        // Near convergence the predicted decrease falls below the roundoff of
        // the energy; accept the full step if it reduces the stopping quantity.
        const Vector trial = (x + direction).cwiseMax(0.0);
        const double decrease = g.dot(trial - x);
        const double noise = 64.0 * std::numeric_limits<double>::epsilon() * value.magnitude;
        if (std::abs(decrease) <= noise) {
          const Vector trial_full = to_full(mesh, trial);
          const Vector trial_g = to_interior(mesh, functional.gradient(trial_full));
          const Functional::Value trial_value = functional.energy(trial_full);
          if (projected_norm(trial, trial_g) < pg && trial_value.value <= value.value + noise) {
            x = trial;
            full = trial_full;
            value = trial_value;
            accepted = true;
            ++report.roundoff_steps;
          }
        }
      }
      if (accepted) {
        if (mode != Mode::Exact && mode != Mode::Secant) ++report.fallback_steps;
        break;
      }
      ++report.line_search_failures;
    }
    if (exact_candidate && (!accepted || exact_candidate->second.value < value.value)) {
      x = exact_candidate->first;
      full = to_full(mesh, x);
      value = exact_candidate->second;
      accepted = true;
    }

    if (!accepted) {
      report.iterations = iteration;
      report.final_gradient_norm = pg;
      report.energy = value.value;
      throw NonConvergence("line search failed for every search direction", report);
    }
    g = to_interior(mesh, functional.gradient(full));
    pg = projected_norm(x, g);
    report.energy_history.push_back(value.value);
  }
}

SolveResult solve(const EllipticProblem& problem, const DiscreteField& initial_guess) {
  return solve(problem, initial_guess, SolverOptions::for_dimension(problem.mesh().dimension()));
}

SolveResult solve_multistart(const EllipticProblem& problem, const std::vector<DiscreteField>& starts,
                             const SolverOptions& options) {
  if (starts.empty()) throw DomainError("multistart needs at least one start");
  std::optional<SolveResult> best;
  std::optional<NonConvergence> last_failure;
  for (const auto& start : starts) {
    try {
      SolveResult result = solve(problem, start, options);
      if (!best || result.report.energy < best->report.energy) best = std::move(result);
    } catch (const NonConvergence& e) {
      last_failure = e;
    }
  }
  if (!best) throw *last_failure;
  return std::move(*best);
}

DiscreteField solve_lambda_problem(double lambda, const MeshPtr& mesh,
                                   const std::shared_ptr<const LerayLionsOperator>& op,
                                   const std::optional<SolverOptions>& options) {
  Model model{mesh, op, nullptr, 2.0};
  const EllipticProblem problem = EllipticProblem::pure_lambda(model, lambda);
  const SolverOptions opts = options.value_or(SolverOptions::for_dimension(mesh->dimension()));
  return solve(problem, DiscreteField::zero(mesh), opts).solution;
}

// ----------------------------------------------------------------------------
// Sub- and supersolutions
// ----------------------------------------------------------------------------

Barrier solve_barrier(const EllipticProblem& problem, const DiscreteField& start, const SolverOptions& options,
                      const PicardOptions& picard) {
  if (problem.variant() != Variant::SubSolution && problem.variant() != Variant::SuperSolution)
    throw DomainError("barrier construction needs a sub- or supersolution problem");
  require_same_mesh(problem, start);
  const Mesh& mesh = problem.mesh();
  const Model& model = problem.model();
  const EnergyCoefficients& c = problem.coefficients();
  const double q = problem.q();

  SolverOptions inner = options;
  inner.tolerance = 0.1 * options.tolerance;

  DiscreteField w = start;
  for (int it = 1; it <= picard.max_iterations; ++it) {
    std::vector<double> load(mesh.num_vertices(), 0.0);
    for (int vi : mesh.interior_vertices()) {
      const auto i = static_cast<std::size_t>(vi);
      const double x = std::max(w[i], 0.0);
      double rhs = c.load[i];
      if (x > 0.0) {
        rhs += c.h0[i] * std::pow(x, q - 1.0);
        if (model.source) rhs += c.source_scale * model.source->eval(i, x);
      } else if (model.source && model.source->beta() == 0.0) {
        rhs += c.source_scale * model.source->eval(i, 1.0);
      }
      load[i] = rhs;
    }
    const EllipticProblem frozen = EllipticProblem::with_load(model, std::move(load));
    DiscreteField next = solve(frozen, w, inner).solution;
    const double step = l2_norm_diff_power(next, w, 1.0, false);
    w = std::move(next);
    if (step < picard.step_tolerance) {
      const double residual = projected_gradient_norm(problem, w);
      if (residual <= options.tolerance) return Barrier{w, problem.parameter(), residual, it};
    }
  }
  SolverReport report;
  report.iterations = picard.max_iterations;
  report.final_gradient_norm = projected_gradient_norm(problem, w);
  throw NonConvergence("Picard iteration for the barrier problem did not settle", report);
}

namespace {

bool nodally_below(const DiscreteField& a, const DiscreteField& b) {
  for (int i : a.mesh().interior_vertices())
    if (a[static_cast<std::size_t>(i)] > b[static_cast<std::size_t>(i)]) return false;
  return true;
}

} // namespace

Barrier make_subsolution(const Model& model, std::vector<double> lower_envelope, const DiscreteField& v0,
                         double mu_start, const std::optional<SolverOptions>& options) {
  model.check_consistency();
  for (int i : model.mesh->interior_vertices())
    if (!(v0[static_cast<std::size_t>(i)] > 0.0)) throw DomainError("v0 must be positive in the interior");
  const SolverOptions opts = options.value_or(SolverOptions::for_dimension(model.mesh->dimension()));
  DiscreteField start = v0;
  for (double mu = mu_start; mu >= 1e-12; mu *= 0.5) {
    const EllipticProblem problem = EllipticProblem::subsolution(model, mu, lower_envelope);
    Barrier barrier = solve_barrier(problem, start, opts);
    if (nodally_below(barrier.field, v0)) return barrier;
    start = barrier.field;
  }
  throw FailedToFit("no mu >= 1e-12 gives a subsolution below v0");
}

Barrier make_supersolution(const Model& model, double sup_h, const DiscreteField& v0, double kappa_start,
                           const std::optional<SolverOptions>& options) {
  model.check_consistency();
  const SolverOptions opts = options.value_or(SolverOptions::for_dimension(model.mesh->dimension()));
  DiscreteField start = v0;
  for (double kappa = kappa_start; kappa <= 1e12; kappa *= 2.0) {
    const EllipticProblem problem = EllipticProblem::supersolution(model, kappa, sup_h);
    Barrier barrier = solve_barrier(problem, start, opts);
    if (nodally_below(v0, barrier.field)) return barrier;
    start = barrier.field;
  }
  throw FailedToFit("no kappa <= 1e12 gives a supersolution above v0");
}

SolveResult solve_stationary(const Model& model, std::vector<double> b, const std::optional<SolverOptions>& options,
                             const std::optional<DiscreteField>& initial_guess) {
  const EllipticProblem problem = EllipticProblem::stationary(model, std::move(b));
  const SolverOptions opts = options.value_or(SolverOptions::for_dimension(model.mesh->dimension()));
  std::vector<DiscreteField> starts;
  if (initial_guess) {
    starts.push_back(*initial_guess);
  } else {
    starts.push_back(DiscreteField::zero(model.mesh));
    starts.push_back(solve_lambda_problem(1.0, model.mesh, model.op, opts));
  }
  return solve_multistart(problem, starts, opts);
}

} // namespace dne
