#include "dne/commands.hpp"

#include "dne/io.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <set>

namespace dne {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Serialization helpers
// ---------------------------------------------------------------------------

json to_json(const CheckReport& r) {
  json m = json::object();
  for (const auto& [key, value] : r.measurements) m[key] = value;
  return json{{"check_name", r.check_name}, {"samples", r.samples}, {"worst_margin", r.worst_margin},
              {"location", r.location},     {"passed", r.passed},   {"slack", r.slack},
              {"measurements", m}};
}

json to_json(const SolverReport& r) {
  return json{{"iterations", r.iterations},
              {"final_gradient_norm", r.final_gradient_norm},
              {"energy", r.energy},
              {"converged", r.converged},
              {"line_search_failures", r.line_search_failures},
              {"regularization_floor_hit", r.regularization_floor_hit},
              {"fallback_steps", r.fallback_steps},
              {"roundoff_steps", r.roundoff_steps}};
}

json manifest_base(Command command, const Scenario& s) {
  const auto& exponent = s.op->exponent();
  json mesh{{"dimension", s.mesh->dimension()},
            {"vertices", s.mesh->num_vertices()},
            {"elements", s.mesh->num_elements()}};
  return json{{"command", std::string(to_string(command))},
              {"config", s.config.echo()},
              {"seed", s.run.seed},
              {"threads", s.run.threads},
              {"reproducibility", "bit-for-bit for a fixed seed and thread count; sampled check margins agree "
                                  "to the stated slack across thread counts"},
              {"mesh", mesh},
              {"p_minus", exponent.p_minus()},
              {"p_plus", exponent.p_plus()},
              {"q", s.q},
              {"regime", std::string(to_string(classify_regime(exponent, s.q)))}};
}

void write_json(const std::filesystem::path& path, const json& value) { write_text_atomic(path, value.dump(2) + "\n"); }

double stabilization_error(const DiscreteField& v, const DiscreteField& v_stat, double q) {
  std::vector<double> diff(v.size());
  for (std::size_t i = 0; i < diff.size(); ++i)
    diff[i] = std::pow(std::max(v[i], 0.0), q) - std::pow(std::max(v_stat[i], 0.0), q);
  return lumped_norm(v.mesh(), diff);
}

void log_line(const CommandOptions& options, const std::string& line) {
  if (options.log) *options.log << line << '\n' << std::flush;
}

double fitted_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

// ---------------------------------------------------------------------------
// Verify
// ---------------------------------------------------------------------------

const std::vector<std::string>& pointwise_checks() {
  static const std::vector<std::string> names{
      "homogeneity", "euler",   "growth",         "convexity",           "flux_jacobian", "flux_jacobian_fd",
      "monotonicity_gap", "picone", "lemma21_pointwise", "alg_inequality", "source_monotonicity", "morawetz"};
  return names;
}

const std::vector<std::string>& field_checks() {
  static const std::vector<std::string> names{"lemma21",          "gradient_consistency",  "contraction_elliptic",
                                              "positivity_hopf",  "stationary_uniqueness", "lambda_scaling"};
  return names;
}

const std::vector<std::string>& trajectory_checks() {
  static const std::vector<std::string> names{"sandwich",          "monotone",    "dissipation",
                                              "boundary_behavior", "contraction_parabolic"};
  return names;
}

/// Lazily computed solves and runs shared between checks.
class VerifyContext {
public:
  explicit VerifyContext(const Scenario& s) : s_(s) {}

  SamplingOptions sampling() const { return SamplingOptions{s_.run.samples, s_.run.seed, s_.run.threads}; }

  std::vector<double> picone_r() const {
    if (!s_.run.picone_r.empty()) return s_.run.picone_r;
    return {1.0, 0.5 * (1.0 + s_.op->exponent().p_minus())};
  }
  std::vector<double> lemma21_r() const {
    if (!s_.run.lemma21_r.empty()) return s_.run.lemma21_r;
    return {1.0, std::min(2.0, 0.5 * (1.0 + s_.op->exponent().p_minus()))};
  }

  const DiscreteField& lambda_solution() {
    if (!lambda_) lambda_ = solve_lambda_problem(1.0, s_.mesh, s_.op, s_.solver_options());
    return *lambda_;
  }
  const DiscreteField& stationary() {
    if (!stationary_) stationary_ = solve_stationary(s_.model(), s_.h_inf, s_.solver_options()).solution;
    return *stationary_;
  }
  const Barrier& sub() {
    if (!sub_) sub_ = make_subsolution(s_.model(), s_.lower_envelope, s_.initial, 1.0, s_.solver_options());
    return *sub_;
  }
  const Barrier& super() {
    if (!super_)
      super_ = make_supersolution(s_.model(), s_.potential->sup_norm(), s_.initial, 1.0, s_.solver_options());
    return *super_;
  }
  const Trajectory& main() {
    if (!main_) main_ = evolve(s_.evolution_setup());
    return *main_;
  }
  const Trajectory& from_sub() {
    if (!from_sub_) from_sub_ = evolve(setup_from(sub().field, s_.potential));
    return *from_sub_;
  }
  const Trajectory& from_super() {
    if (!from_super_) from_super_ = evolve(setup_from(super().field, s_.potential));
    return *from_super_;
  }
  const std::shared_ptr<const PotentialField>& scaled_potential() {
    if (!scaled_) {
      constexpr double factor = 1.2;
      auto base = s_.potential;
      std::vector<double> lower(base->lower_envelope().begin(), base->lower_envelope().end());
      for (double& v : lower) v *= factor;
      std::optional<std::vector<double>> limit = base->limit();
      if (limit)
        for (double& v : *limit) v *= factor;
      scaled_ = std::make_shared<const PotentialField>(
          [base](double t, std::size_t k) { return factor * (*base)(t, k); }, base->num_points(), std::move(lower),
          factor * base->sup_norm(), std::move(limit));
    }
    return scaled_;
  }
  const Trajectory& from_super_scaled() {
    if (!from_super_scaled_) from_super_scaled_ = evolve(setup_from(super().field, scaled_potential()));
    return *from_super_scaled_;
  }

private:
  EvolutionSetup setup_from(const DiscreteField& initial, std::shared_ptr<const PotentialField> potential) const {
    EvolutionSetup setup = EvolutionSetup::create(s_.model(), std::move(potential), s_.run.horizon, s_.run.steps, initial);
    setup.step_options.solver = s_.solver_options();
    setup.stride = s_.run.stride;
    return setup;
  }

  const Scenario& s_;
  std::optional<DiscreteField> lambda_, stationary_;
  std::optional<Barrier> sub_, super_;
  std::optional<Trajectory> main_, from_sub_, from_super_, from_super_scaled_;
  std::shared_ptr<const PotentialField> scaled_;
};

std::vector<CheckReport> run_single(const std::string& name, const Scenario& s, VerifyContext& ctx) {
  const LerayLionsOperator& op = *s.op;
  const SamplingOptions so = ctx.sampling();
  const SolverOptions solver = s.solver_options();
  if (name == "homogeneity") return {check_homogeneity(op, so)};
  if (name == "euler") return {check_euler(op, so)};
  if (name == "growth") return {check_growth(op, so)};
  if (name == "convexity") return {check_convexity(op, so)};
  if (name == "flux_jacobian") return {check_flux_jacobian(op, so)};
  if (name == "flux_jacobian_fd") return {check_flux_jacobian_fd(op, so)};
  if (name == "monotonicity_gap") return {check_monotonicity_gap(op, so)};
  if (name == "morawetz") return {check_morawetz(op, so)};
  if (name == "alg_inequality") return {check_alg_inequality(s.q, so)};
  if (name == "source_monotonicity") {
    if (!s.source) return {};
    return {check_source_monotonicity(*s.source, so)};
  }
  if (name == "picone") {
    std::vector<CheckReport> out;
    for (double r : ctx.picone_r()) out.push_back(check_picone(op, r, so));
    return out;
  }
  if (name == "lemma21_pointwise") {
    std::vector<CheckReport> out;
    for (double r : ctx.lemma21_r()) out.push_back(check_lemma21_pointwise(op, r, so));
    return out;
  }
  if (name == "lemma21") {
    std::vector<CheckReport> out;
    for (double r : ctx.lemma21_r()) {
      out.push_back(check_lemma21(op, r, s.initial, ctx.lambda_solution()));
      out.push_back(check_lemma21(op, r, s.initial, s.initial));
    }
    return out;
  }
  if (name == "gradient_consistency") {
    const double dt = s.run.horizon / s.run.steps;
    std::vector<double> h0(s.mesh->num_vertices());
    for (std::size_t i = 0; i < h0.size(); ++i) h0[i] = dt * s.h_inf[i] + std::pow(s.initial[i], s.q);
    return {check_gradient_consistency(EllipticProblem::standard(s.model(), dt, std::move(h0)), s.initial)};
  }
  if (name == "contraction_elliptic") {
    std::vector<double> shifted = s.h_inf;
    for (double& v : shifted) v += 0.1;
    return {check_contraction_elliptic(EllipticProblem::standard(s.model(), s.elliptic.lambda, s.h_inf),
                                       EllipticProblem::standard(s.model(), s.elliptic.lambda, std::move(shifted)),
                                       solver)};
  }
  if (name == "positivity_hopf") return {check_positivity_hopf(ctx.stationary())};
  if (name == "stationary_uniqueness") return {check_stationary_uniqueness(s.model(), s.h_inf, s.initial.scaled(3.0), solver)};
  if (name == "lambda_scaling") {
    if (!op.exponent().is_constant()) return {};
    return {check_lambda_scaling(s.mesh, s.op, s.sweep.lambdas, solver)};
  }
  if (name == "sandwich") return {check_sandwich(ctx.main(), ctx.sub().field, ctx.super().field)};
  if (name == "monotone") {
    if (!s.potential_time_constant) return {};
    return {check_monotone(ctx.from_sub(), Monotonicity::Nondecreasing),
            check_monotone(ctx.from_super(), Monotonicity::Nonincreasing)};
  }
  if (name == "dissipation") return {check_dissipation(ctx.main())};
  if (name == "boundary_behavior") {
    const double c = std::max(sandwich_constant(ctx.sub().field), sandwich_constant(ctx.super().field));
    return {check_boundary_behavior(ctx.main(), c)};
  }
  if (name == "contraction_parabolic")
    return {check_contraction_parabolic(ctx.main(), ctx.from_super_scaled(), *s.potential, *ctx.scaled_potential(),
                                        solver.tolerance)};
  if (name == "stabilization")
    return {check_stabilization(ctx.main(), ctx.stationary(), s.run.norms, s.run.stabilization_threshold)};
  throw ParseError("unknown check '" + name + "'");
}

std::vector<std::string> expand(const std::vector<std::string>& names) {
  std::vector<std::string> out;
  auto add = [&](const std::vector<std::string>& group) {
    for (const auto& n : group)
      if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
  };
  for (const auto& n : names) {
    if (n == "default") add(default_suite());
    else if (n == "trajectory") add(trajectory_checks());
    else if (n == "all") {
      add(default_suite());
      add(trajectory_checks());
      add({"stabilization"});
    } else {
      const auto all = available_checks();
      if (std::find(all.begin(), all.end(), n) == all.end()) throw ParseError("unknown check '" + n + "'");
      add({n});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

int cmd_solve_elliptic(const Scenario& s, const std::filesystem::path& out, const CommandOptions& options) {
  json manifest = manifest_base(Command::SolveElliptic, s);
  const bool lambda_kind = s.elliptic.kind == EllipticKind::Lambda;
  manifest["problem"] = {{"kind", lambda_kind ? "lambda" : "standard"}, {"lambda", s.elliptic.lambda}};
  const EllipticProblem problem = lambda_kind ? EllipticProblem::pure_lambda(s.model(), s.elliptic.lambda)
                                              : EllipticProblem::standard(s.model(), s.elliptic.lambda, s.elliptic.h0);
  try {
    const SolveResult result = solve(problem, DiscreteField::zero(s.mesh), s.solver_options());
    write_field_csv(out / "solution.csv", result.solution);
    const CheckReport hopf = check_positivity_hopf(result.solution);
    manifest["solver"] = to_json(result.report);
    manifest["sup_norm"] = result.solution.values().cwiseAbs().maxCoeff();
    manifest["checks"] = json::array({to_json(hopf)});
    manifest["status"] = hopf.passed ? "ok" : "check_failure";
    write_json(out / "manifest.json", manifest);
    log_line(options, "solve-elliptic: " + std::to_string(result.report.iterations) + " iterations");
    return hopf.passed ? kExitSuccess : kExitCheckFailure;
  } catch (const NonConvergence& e) {
    manifest["solver"] = to_json(e.report());
    manifest["status"] = "solver_failure";
    manifest["error"] = e.what();
    write_json(out / "manifest.json", manifest);
    return kExitSolverFailure;
  }
}

int cmd_stationary(const Scenario& s, const std::filesystem::path& out, const CommandOptions& options) {
  json manifest = manifest_base(Command::Stationary, s);
  try {
    const SolveResult result = solve_stationary(s.model(), s.h_inf, s.solver_options());
    write_field_csv(out / "stationary.csv", result.solution);
    const CheckReport hopf = check_positivity_hopf(result.solution);
    manifest["solver"] = to_json(result.report);
    manifest["sup_norm"] = result.solution.values().cwiseAbs().maxCoeff();
    manifest["checks"] = json::array({to_json(hopf)});
    if (std::filesystem::exists(out / "final.csv")) {
      const DiscreteField final_field = read_field_csv(out / "final.csv", s.mesh);
      manifest["stabilization_error"] = {{"evolve_final", "final.csv"},
                                         {"norm", "L2"},
                                         {"value", stabilization_error(final_field, result.solution, s.q)}};
    }
    manifest["status"] = hopf.passed ? "ok" : "check_failure";
    write_json(out / "manifest_stationary.json", manifest);
    log_line(options, "stationary: " + std::to_string(result.report.iterations) + " iterations");
    return hopf.passed ? kExitSuccess : kExitCheckFailure;
  } catch (const NonConvergence& e) {
    manifest["solver"] = to_json(e.report());
    manifest["status"] = "solver_failure";
    manifest["error"] = e.what();
    write_json(out / "manifest_stationary.json", manifest);
    return kExitSolverFailure;
  }
}

void write_trajectory(const Scenario& s, const Trajectory& traj, const std::filesystem::path& out,
                      const std::optional<DiscreteField>& v_stat) {
  Table table;
  table.columns = {"step", "t", "iterations", "gradient_norm", "increment_norm", "stationary_energy"};
  if (v_stat) table.columns.push_back("stabilization_error");
  for (std::size_t k = 0; k < traj.fields.size(); ++k) {
    const int n = traj.indices[k];
    std::vector<Table::Cell> row{static_cast<double>(n), traj.times[k]};
    if (n == 0) {
      row.insert(row.end(), {0.0, 0.0, 0.0, std::nan("")});
    } else {
      const StepDiagnostics& d = traj.diagnostics[static_cast<std::size_t>(n - 1)];
      row.insert(row.end(), {static_cast<double>(d.report.iterations), d.report.final_gradient_norm,
                             d.increment_norm, d.stationary_energy});
    }
    if (v_stat) row.emplace_back(stabilization_error(traj.fields[k], *v_stat, s.q));
    table.rows.push_back(std::move(row));
    if (s.run.snapshots) {
      char name[32];
      std::snprintf(name, sizeof(name), "v_%06d.csv", n);
      write_field_csv(out / "snapshots" / name, traj.fields[k]);
    }
  }
  write_text_atomic(out / "trajectory.csv", table.to_csv());
  write_field_csv(out / "final.csv", traj.final_field());
}

int cmd_evolve(const Scenario& s, const std::filesystem::path& out, const CommandOptions& options) {
  json manifest = manifest_base(Command::Evolve, s);
  manifest["horizon"] = s.run.horizon;
  manifest["steps"] = s.run.steps;
  manifest["stride"] = s.run.stride;
  std::optional<DiscreteField> v_stat;
  if (std::filesystem::exists(out / "stationary.csv")) v_stat = read_field_csv(out / "stationary.csv", s.mesh);

  auto describe = [&](const Trajectory& traj) {
    manifest["times"] = traj.times;
    json diag = json::array();
    int fallback = 0, roundoff = 0, max_iter = 0;
    for (const auto& d : traj.diagnostics) {
      fallback += d.report.fallback_steps;
      roundoff += d.report.roundoff_steps;
      max_iter = std::max(max_iter, d.report.iterations);
    }
    manifest["diagnostics"] = {{"steps_completed", traj.diagnostics.size()},
                               {"max_iterations", max_iter},
                               {"fallback_steps", fallback},
                               {"roundoff_steps", roundoff}};
    write_trajectory(s, traj, out, v_stat);
    if (v_stat)
      manifest["stabilization_error"] = {{"stationary", "stationary.csv"},
                                         {"norm", "L2"},
                                         {"value", stabilization_error(traj.final_field(), *v_stat, s.q)}};
  };

  try {
    const Trajectory traj = evolve(s.evolution_setup());
    describe(traj);
    const CheckReport dissipation = check_dissipation(traj);
    manifest["checks"] = json::array({to_json(dissipation)});
    manifest["status"] = dissipation.passed ? "ok" : "check_failure";
    write_json(out / "manifest.json", manifest);
    log_line(options, "evolve: " + std::to_string(traj.steps) + " steps");
    return dissipation.passed ? kExitSuccess : kExitCheckFailure;
  } catch (const StepFailure& e) {
    describe(e.partial());
    manifest["status"] = "solver_failure";
    manifest["failed_step"] = e.step_index();
    manifest["error"] = e.what();
    write_json(out / "manifest.json", manifest);
    return kExitSolverFailure;
  }
}

int cmd_verify(const Scenario& s, const std::filesystem::path& out, const CommandOptions& options) {
  json manifest = manifest_base(Command::Verify, s);
  const std::vector<std::string> names = options.checks.empty() ? std::vector<std::string>{"default"} : options.checks;
  manifest["requested_checks"] = names;
  try {
    const std::vector<CheckReport> reports = run_verify(s, names);
    json array = json::array();
    bool passed = true;
    for (const auto& r : reports) {
      array.push_back(to_json(r));
      passed = passed && r.passed;
      log_line(options, std::string(r.passed ? "PASS " : "FAIL ") + r.check_name);
    }
    write_json(out / "verify.json", array);
    manifest["status"] = passed ? "ok" : "check_failure";
    write_json(out / "manifest.json", manifest);
    return passed ? kExitSuccess : kExitCheckFailure;
  } catch (const NonConvergence& e) {
    manifest["status"] = "solver_failure";
    manifest["error"] = e.what();
  } catch (const StepFailure& e) {
    manifest["status"] = "solver_failure";
    manifest["error"] = e.what();
  } catch (const FailedToFit& e) {
    manifest["status"] = "solver_failure";
    manifest["error"] = e.what();
  }
  write_json(out / "manifest.json", manifest);
  return kExitSolverFailure;
}

int cmd_sweep(const Scenario& s, const std::filesystem::path& out, const CommandOptions& options) {
  json manifest = manifest_base(Command::Sweep, s);
  Table table;
  bool failed = false;
  if (s.sweep.kind == SweepKind::Lambda) {
    manifest["sweep"] = {{"kind", "lambda"}, {"lambdas", s.sweep.lambdas}};
    const auto& exponent = s.op->exponent();
    const double expected = exponent.is_constant() ? 1.0 / (exponent.p_minus() - 1.0) : std::nan("");
    const std::string regime(to_string(classify_regime(exponent, s.q)));
    std::vector<double> x, y;
    for (double lambda : s.sweep.lambdas) {
      try {
        const DiscreteField w = solve_lambda_problem(lambda, s.mesh, s.op, s.solver_options());
        x.push_back(std::log(lambda));
        y.push_back(std::log(w.values().cwiseAbs().maxCoeff()));
      } catch (const NonConvergence& e) {
        failed = true;
        log_line(options, "sweep: lambda " + std::to_string(lambda) + " failed: " + e.what());
        x.push_back(std::log(lambda));
        y.push_back(std::nan(""));
      }
    }
    const double slope = (!failed && x.size() >= 2) ? fitted_slope(x, y) : std::nan("");
    table.columns = {"lambda", "sup_norm", "slope", "expected_slope", "regime"};
    for (std::size_t i = 0; i < x.size(); ++i)
      table.rows.push_back({s.sweep.lambdas[i], std::exp(y[i]), slope, expected, regime});
    manifest["slope"] = slope;
    manifest["expected_slope"] = expected;
  } else {
    manifest["sweep"] = {{"kind", "pq"}, {"p_values", s.sweep.p_values}, {"q_values", s.sweep.q_values}};
    table.columns = {"p", "q", "regime", "sup_norm", "iterations"};
    for (double p : s.sweep.p_values)
      for (double q : s.sweep.q_values) {
        Config cell = s.config;
        char buffer[64];
        std::snprintf(buffer, sizeof(buffer), "constant(%.17g)", p);
        cell.set("exponent", "p", buffer);
        std::snprintf(buffer, sizeof(buffer), "%.17g", q);
        cell.set("problem", "q", buffer);
        try {
          const Scenario cs = build_scenario(cell);
          const std::string regime(to_string(classify_regime(cs.op->exponent(), q)));
          try {
            const SolveResult r = solve_stationary(cs.model(), cs.h_inf, cs.solver_options());
            table.rows.push_back({p, q, regime, r.solution.values().cwiseAbs().maxCoeff(),
                                  static_cast<double>(r.report.iterations)});
          } catch (const NonConvergence&) {
            failed = true;
            table.rows.push_back({p, q, regime, std::nan(""), std::nan("")});
          }
        } catch (const ValidationError& e) {
          table.rows.push_back({p, q, std::string("invalid"), std::nan(""), std::nan("")});
          log_line(options, std::string("sweep: cell skipped: ") + e.what());
        }
      }
  }
  write_text_atomic(out / "summary.csv", table.to_csv());
  manifest["status"] = failed ? "solver_failure" : "ok";
  write_json(out / "manifest.json", manifest);
  return failed ? kExitSolverFailure : kExitSuccess;
}

} // namespace

Command parse_command(std::string_view name) {
  if (name == "solve-elliptic") return Command::SolveElliptic;
  if (name == "evolve") return Command::Evolve;
  if (name == "stationary") return Command::Stationary;
  if (name == "verify") return Command::Verify;
  if (name == "sweep") return Command::Sweep;
  throw ParseError("unknown command '" + std::string(name) + "'");
}

std::string_view to_string(Command command) {
  switch (command) {
  case Command::SolveElliptic: return "solve-elliptic";
  case Command::Evolve: return "evolve";
  case Command::Stationary: return "stationary";
  case Command::Verify: return "verify";
  case Command::Sweep: return "sweep";
  }
  return "unknown";
}

std::vector<std::string> available_checks() {
  std::vector<std::string> out = default_suite();
  out.insert(out.end(), trajectory_checks().begin(), trajectory_checks().end());
  out.push_back("stabilization");
  return out;
}

std::vector<std::string> default_suite() {
  std::vector<std::string> out = pointwise_checks();
  out.insert(out.end(), field_checks().begin(), field_checks().end());
  return out;
}

std::vector<CheckReport> run_verify(const Scenario& scenario, const std::vector<std::string>& names) {
  VerifyContext ctx(scenario);
  std::vector<CheckReport> out;
  for (const std::string& name : expand(names)) {
    std::vector<CheckReport> reports = run_single(name, scenario, ctx);
    out.insert(out.end(), std::make_move_iterator(reports.begin()), std::make_move_iterator(reports.end()));
  }
  return out;
}

int run_command(Command command, const Scenario& scenario, const std::filesystem::path& out_dir,
                const CommandOptions& options) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError(out_dir, "cannot create output directory: " + ec.message());
  switch (command) {
  case Command::SolveElliptic: return cmd_solve_elliptic(scenario, out_dir, options);
  case Command::Evolve: return cmd_evolve(scenario, out_dir, options);
  case Command::Stationary: return cmd_stationary(scenario, out_dir, options);
  case Command::Verify: return cmd_verify(scenario, out_dir, options);
  case Command::Sweep: return cmd_sweep(scenario, out_dir, options);
  }
  return kExitSolverFailure;
}

} // namespace dne
