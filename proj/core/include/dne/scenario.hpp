#ifndef DNE_SCENARIO_HPP
#define DNE_SCENARIO_HPP

#include "dne/config.hpp"
#include "dne/elliptic.hpp"
#include "dne/time_integrator.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace dne {

/// Which elliptic problem `solve-elliptic` solves.
enum class EllipticKind { Lambda, Standard };

struct EllipticSpec {
  EllipticKind kind = EllipticKind::Lambda;
  double lambda = 1.0;
  std::vector<double> h0; // Standard only
};

struct RunSpec {
  double horizon = 1.0;
  int steps = 100;
  int stride = 1;
  bool snapshots = true; // one CSV per stored field of an evolve run
  std::optional<double> tolerance;
  std::uint64_t seed = 20240601;
  int threads = 1;
  std::size_t samples = 100000;
  double stabilization_threshold = 1e-3;
  std::vector<double> norms{2.0};
  std::vector<double> picone_r;  // empty: {1, (1 + p_-)/2}
  std::vector<double> lemma21_r; // empty: {1, min(2, (1 + p_-)/2)}
};

enum class SweepKind { Lambda, ExponentQ };

struct SweepSpec {
  SweepKind kind = SweepKind::Lambda;
  std::vector<double> lambdas{0.5, 1.0, 2.0, 4.0};
  std::vector<double> p_values;
  std::vector<double> q_values;
};

/// Fully built and validated run description. Every hypothesis the models
/// rely on is re-checked here and reported as a tagged ValidationError.
struct Scenario {
  Config config;
  MeshPtr mesh;
  std::shared_ptr<const LerayLionsOperator> op;
  std::shared_ptr<const SourceTerm> source; // null when disabled
  double q = 1.5;
  std::shared_ptr<const PotentialField> potential;
  bool potential_time_constant = true;
  std::vector<double> h_inf;          // t -> infinity limit of the potential
  std::vector<double> lower_envelope; // h_ (vertices)
  DiscreteField initial;
  EllipticSpec elliptic;
  RunSpec run;
  SweepSpec sweep;

  Model model() const { return Model{mesh, op, source, q}; }
  SolverOptions solver_options() const;
  EvolutionSetup evolution_setup() const;
};

/// Builds a scenario from parsed text. Unknown keys raise ParseError.
Scenario build_scenario(const Config& config);
Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(const std::string& text, const std::filesystem::path& base_dir = {});

} // namespace dne

#endif
