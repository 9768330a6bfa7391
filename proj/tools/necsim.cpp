// necsim: run a network evolution chain experiment from a config file.
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "necsim/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Network evolution chain simulator"};
  app.set_version_flag("--version", "necsim 0.1.0");

  std::string kind;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> length;
  std::optional<std::string> out;
  std::optional<int> n_max;
  std::optional<double> q;
  std::optional<std::string> mode;
  std::optional<std::string> emissions;
  bool quiet = false;

  app.add_option("kind", kind,
                 "simulate | stationary | entropy | npc | ctmc | reproduce-table{1,2,3,4} | reproduce-fig{2,3}")
      ->required();
  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "master seed");
  app.add_option("--length", length, "chain length (states)");
  app.add_option("--out", out, "output directory");
  app.add_option("--nmax", n_max, "maximum node count");
  app.add_option("--q", q, "edge probability");
  app.add_option("--mode", mode, "graph-kernel | labeled-path");
  app.add_option("--emissions", emissions, "npc emissions: estimated | er-weighted | uniform");
  app.add_flag("--quiet", quiet, "do not print the report");

  CLI11_PARSE(app, argc, argv);

  try {
    necsim::ExperimentConfig config = config_path.empty() ? necsim::ExperimentConfig{} : necsim::load_config(config_path);
    config.kind = necsim::parse_experiment_kind(kind);
    if (seed) config.seed = *seed;
    if (length) config.length = *length;
    if (out) config.out_dir = *out;
    if (n_max) config.n_max = *n_max;
    if (q) config.q = *q;
    if (mode) config.mode = necsim::parse_chain_mode(*mode);
    if (emissions) config.emissions = *emissions;

    const auto report = necsim::run(config);
    if (!quiet) std::cout << report.to_json().dump(2) << '\n';
  } catch (const std::exception& e) {
    std::cerr << "necsim: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
