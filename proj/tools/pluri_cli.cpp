// pluri_cli: experiment runner for weighted Bergman kernels.
//
//   pluri_cli run <config>       per-k CSVs and summary.csv
//   pluri_cli table <config>     convergence table on stdout
//   pluri_cli sample <config>    samples.csv per k
//   pluri_cli envelope <config>  envelope.csv
//
// Exit codes: 0 ok, 1 bad config or input, 2 numerical refusal, 3 I/O.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "pluri/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Weighted Bergman kernel experiments"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::uint64_t> seed;
  app.add_option("--seed", seed, "Override stochastic.seed");

  auto add = [&](const char* name, const char* help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("config", config_path, "Config file (key = value)")->required();
    return sub;
  };
  CLI::App* run = add("run", "Write per-k density, potential and summary CSVs");
  CLI::App* table = add("table", "Print the convergence table");
  CLI::App* sample = add("sample", "Write determinantal and random-zero samples");
  CLI::App* envelope = add("envelope", "Write the radial equilibrium profile");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    pluri::ExperimentConfig cfg = pluri::load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (run->parsed()) {
      pluri::run_experiment(cfg);
    } else if (table->parsed()) {
      std::cout << pluri::convergence_table(cfg);
    } else if (sample->parsed()) {
      pluri::write_samples(cfg);
    } else if (envelope->parsed()) {
      pluri::write_envelope(cfg);
    }
  } catch (const pluri::IoError& e) {
    std::fprintf(stderr, "I/O error: %s\n", e.what());
    return 3;
  } catch (const pluri::NumericalRefusal& e) {
    std::fprintf(stderr, "numerical refusal (condition estimate %g): %s\n", e.condition(), e.what());
    return 2;
  } catch (const pluri::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
