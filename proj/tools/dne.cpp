#include "dne/commands.hpp"
#include "dne/io.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Doubly nonlinear evolution solver and verification suite"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::vector<std::string> checks;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  bool quiet = false;

  const std::vector<std::pair<std::string, std::string>> commands{
      {"solve-elliptic", "Solve the configured elliptic problem"},
      {"evolve", "Run the implicit time stepping scheme"},
      {"stationary", "Solve the stationary problem for the limit potential"},
      {"verify", "Run named checks (default suite if none given)"},
      {"sweep", "Run a lambda or (p, q) parameter sweep"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "Scenario file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
    sub->add_option("--check", checks, "Check or group name (repeatable)");
    sub->add_option("--seed", seed, "Override run.seed");
    sub->add_option("--threads", threads, "Override run.threads")->check(CLI::PositiveNumber);
    sub->add_flag("--quiet", quiet, "Suppress progress lines");
  }
  CLI11_PARSE(app, argc, argv);

  try {
    const dne::Command command = dne::parse_command(app.get_subcommands().front()->get_name());
    if (!checks.empty() && command != dne::Command::Verify) throw dne::ParseError("--check applies to verify only");
    dne::Config config = dne::Config::load(config_path);
    if (seed) config.set("run", "seed", std::to_string(*seed));
    if (threads) config.set("run", "threads", std::to_string(*threads));
    const dne::Scenario scenario = dne::build_scenario(config);
    dne::CommandOptions options;
    options.checks = checks;
    options.log = quiet ? nullptr : &std::cerr;
    return dne::run_command(command, scenario, out_dir, options);
  } catch (const dne::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
  } catch (const dne::ValidationError& e) {
    std::cerr << "validation error [" << e.tag() << "]: " << e.what() << '\n';
  } catch (const dne::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return 64;
}
