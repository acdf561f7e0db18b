#include "dne/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace dne {

namespace {

MeshPtr build_mesh(const Config& c) {
  const int dim = c.get_int("mesh", "dimension", 1);
  if (dim != 1 && dim != 2) throw ParseError("mesh.dimension must be 1 or 2");
  const std::vector<double> lower = c.get_list("mesh", "lower", std::vector<double>(static_cast<std::size_t>(dim), 0.0));
  const std::vector<double> upper = c.get_list("mesh", "upper", std::vector<double>(static_cast<std::size_t>(dim), 1.0));
  const std::vector<double> res = c.get_list(
      "mesh", "resolution", dim == 1 ? std::vector<double>{100.0} : std::vector<double>{20.0, 20.0});
  const auto n = static_cast<std::size_t>(dim);
  if (lower.size() != n || upper.size() != n || res.size() != n)
    throw ParseError("mesh.lower, mesh.upper and mesh.resolution need one entry per dimension");
  for (double r : res)
    if (r != std::floor(r) || r < 2) throw ParseError("mesh.resolution entries must be integers >= 2");
  if (dim == 1) return std::make_shared<const Mesh>(Mesh::interval(lower[0], upper[0], static_cast<int>(res[0])));
  return std::make_shared<const Mesh>(Mesh::rectangle({lower[0], lower[1]}, {upper[0], upper[1]},
                                                      static_cast<int>(res[0]), static_cast<int>(res[1])));
}

std::shared_ptr<const LerayLionsOperator> build_operator(const Config& c, const Mesh& mesh, std::uint64_t seed) {
  ExponentField exponent(c.get_function("exponent", "p", "constant(2)").at_barycenters(mesh));
  const std::string blocks = c.get_string("operator", "blocks", "isotropic");
  const FunctionSpec weight = c.get_function("operator", "weight", "constant(1)");
  const int dim = mesh.dimension();
  LerayLionsOperator op = [&]() {
    if (blocks == "isotropic") return LerayLionsOperator::isotropic(exponent, dim, weight.at_barycenters(mesh));
    if (blocks == "coordinate") {
      LerayLionsOperator::Partition partition;
      std::vector<std::vector<double>> weights;
      for (int i = 0; i < dim; ++i) {
        partition.push_back({i});
        const std::string key = std::string("weight_") + (i == 0 ? "x" : "y");
        weights.push_back(c.get_function("operator", key, weight.to_string()).at_barycenters(mesh));
      }
      return LerayLionsOperator(exponent, std::move(partition), std::move(weights));
    }
    throw ParseError("operator.blocks must be 'isotropic' or 'coordinate'");
  }();
  const int samples = c.get_int("operator", "gamma0_samples", 1000000);
  if (samples < 1) throw ParseError("operator.gamma0_samples must be positive");
  // Calibrate on a stream distinct from the one the verify checks draw from.
  return std::make_shared<const LerayLionsOperator>(
      op.with_gamma0(calibrate_gamma0(op, static_cast<std::size_t>(samples), seed + 1)));
}

std::shared_ptr<const SourceTerm> build_source(const Config& c, const Mesh& mesh, double q) {
  if (!c.get_bool("source", "enabled", c.has_section("source"))) return nullptr;
  std::vector<double> g = c.get_function("source", "g", "constant(1)").at_vertices(mesh);
  const double gamma = c.get_double("source", "gamma", 0.0);
  const double beta = c.get_double("source", "beta", 0.0);
  return std::make_shared<const SourceTerm>(std::move(g), boundary_distance_field(mesh).at_vertices, gamma, beta, q);
}

} // namespace

SolverOptions Scenario::solver_options() const {
  SolverOptions opts = SolverOptions::for_dimension(mesh->dimension());
  if (run.tolerance) opts.tolerance = *run.tolerance;
  return opts;
}

EvolutionSetup Scenario::evolution_setup() const {
  EvolutionSetup setup = EvolutionSetup::create(model(), potential, run.horizon, run.steps, initial);
  setup.step_options.solver = solver_options();
  setup.stride = run.stride;
  return setup;
}

Scenario build_scenario(const Config& c) {
  RunSpec run;
  run.horizon = c.get_double("run", "T", 1.0);
  run.steps = c.get_int("run", "steps", 100);
  run.stride = c.get_int("run", "stride", 1);
  run.snapshots = c.get_bool("run", "snapshots", true);
  if (c.has("run", "tolerance")) run.tolerance = c.get_double("run", "tolerance");
  const std::string seed = c.get_string("run", "seed", "20240601");
  const auto parsed = std::from_chars(seed.data(), seed.data() + seed.size(), run.seed);
  if (parsed.ec != std::errc() || parsed.ptr != seed.data() + seed.size())
    throw ParseError("run.seed must be an unsigned 64-bit integer");
  run.threads = c.get_int("run", "threads", 1);
  run.samples = static_cast<std::size_t>(c.get_int("run", "samples", 100000));
  run.stabilization_threshold = c.get_double("run", "threshold", 1e-3);
  run.norms = c.get_list("run", "norms", std::vector<double>{2.0});
  run.picone_r = c.get_list("run", "picone_r", std::vector<double>{});
  run.lemma21_r = c.get_list("run", "lemma21_r", std::vector<double>{});
  if (!(run.horizon > 0.0) || run.steps < 1 || run.stride < 1 || run.threads < 1 || run.samples < 1)
    throw ParseError("run.T, run.steps, run.stride, run.threads and run.samples must be positive");
  if (run.tolerance && !(*run.tolerance > 0.0)) throw ParseError("run.tolerance must be positive");

  MeshPtr mesh = build_mesh(c);
  auto op = build_operator(c, *mesh, run.seed);
  const double q = c.get_double("problem", "q", 1.5);
  classify_regime(op->exponent(), q); // ValidationError "q in (1, p_-)"
  auto source = build_source(c, *mesh, q);

  // Potential h(t, x) and its lower envelope.
  const std::string kind = c.get_string("potential", "kind", "constant");
  std::vector<double> h_inf = c.get_function("potential", "h_inf", "constant(1)").at_vertices(*mesh);
  std::shared_ptr<const PotentialField> potential;
  if (kind == "constant") {
    potential = std::make_shared<const PotentialField>(PotentialField::time_constant(h_inf));
  } else if (kind == "decaying") {
    const double amplitude = c.get_double("potential", "amplitude", 1.0);
    const double eta = c.get_double("potential", "eta", 0.5);
    potential = std::make_shared<const PotentialField>(PotentialField::decaying(h_inf, amplitude, eta));
  } else {
    throw ParseError("potential.kind must be 'constant' or 'decaying'");
  }
  if (c.has("potential", "lower")) {
    std::vector<double> lower = c.get_function("potential", "lower").at_vertices(*mesh);
    auto base = potential;
    potential = std::make_shared<const PotentialField>([base](double t, std::size_t k) { return (*base)(t, k); },
                                                       base->num_points(), std::move(lower), base->sup_norm(),
                                                       base->limit());
  }
  std::vector<double> times;
  for (int n = 0; n <= run.steps; ++n) times.push_back(run.horizon * n / run.steps);
  potential->validate_on(times);
  std::vector<double> lower(potential->lower_envelope().begin(), potential->lower_envelope().end());

  const std::vector<double> v0 = c.get_function("initial", "v0", "sin_product(0.3)").at_vertices(*mesh);
  Vector v0_values = Eigen::Map<const Vector>(v0.data(), static_cast<Eigen::Index>(v0.size()));
  for (std::size_t i = 0; i < mesh->num_vertices(); ++i)
    if (mesh->is_boundary(i)) v0_values[static_cast<Eigen::Index>(i)] = 0.0;
  DiscreteField initial(mesh, v0_values);
  sandwich_constant(initial); // ValidationError "M_delta^1"

  EllipticSpec elliptic;
  const std::string ek = c.get_string("elliptic", "kind", "lambda");
  if (ek == "lambda") elliptic.kind = EllipticKind::Lambda;
  else if (ek == "standard") elliptic.kind = EllipticKind::Standard;
  else throw ParseError("elliptic.kind must be 'lambda' or 'standard'");
  elliptic.lambda = c.get_double("elliptic", "lambda", 1.0);
  if (!(elliptic.lambda > 0.0)) throw ParseError("elliptic.lambda must be positive");
  if (elliptic.kind == EllipticKind::Standard)
    elliptic.h0 = c.get_function("elliptic", "h0", "constant(1)").at_vertices(*mesh);

  SweepSpec sweep;
  const std::string sk = c.get_string("sweep", "kind", "lambda");
  if (sk == "lambda") sweep.kind = SweepKind::Lambda;
  else if (sk == "pq") sweep.kind = SweepKind::ExponentQ;
  else throw ParseError("sweep.kind must be 'lambda' or 'pq'");
  sweep.lambdas = c.get_list("sweep", "lambdas", sweep.lambdas);
  sweep.p_values = c.get_list("sweep", "p_values", std::vector<double>{2.5, 3.0});
  sweep.q_values = c.get_list("sweep", "q_values", std::vector<double>{1.2, 1.6});

  c.require_all_used();
  return Scenario{.config = c,
                  .mesh = std::move(mesh),
                  .op = std::move(op),
                  .source = std::move(source),
                  .q = q,
                  .potential = std::move(potential),
                  .potential_time_constant = kind == "constant",
                  .h_inf = std::move(h_inf),
                  .lower_envelope = std::move(lower),
                  .initial = std::move(initial),
                  .elliptic = std::move(elliptic),
                  .run = std::move(run),
                  .sweep = std::move(sweep)};
}

Scenario load_scenario(const std::filesystem::path& path) { return build_scenario(Config::load(path)); }

Scenario parse_scenario(const std::string& text, const std::filesystem::path& base_dir) {
  return build_scenario(Config::parse(text, base_dir));
}

} // namespace dne
