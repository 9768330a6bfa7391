#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "necsim/entropy_analysis.hpp"
#include "necsim/ernec.hpp"

namespace necsim {

enum class ExperimentKind {
  Simulate,
  Stationary,
  Entropy,
  Npc,
  Ctmc,
  ReproduceTable1,
  ReproduceTable2,
  ReproduceTable3,
  ReproduceTable4,
  ReproduceFig2,
  ReproduceFig3,
};

std::string to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(std::string_view text);

/// Unset optionals take the defaults of the chosen kind (the reproduce-*
/// kinds carry their own n_max, q, length and run count).
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Simulate;
  std::optional<ErnecParams> params;
  std::optional<int> n_max;
  std::optional<double> q;
  std::optional<std::uint64_t> random_seed;
  std::optional<std::size_t> length;
  std::uint64_t seed = 1;
  double burn_in = 0.1;
  std::filesystem::path out_dir = "necsim-out";
  std::optional<ChainMode> mode;
  std::optional<std::string> property;
  std::optional<std::size_t> runs;
  std::optional<std::size_t> window;
  /// NPC emissions: "estimated" (supervised counts), "er-weighted" or "uniform".
  std::string emissions = "estimated";
  double epsilon = 0.05;
  std::vector<double> lambda;
  std::optional<double> horizon;

  void validate() const;
};

/// Overlay the keys of a JSON object onto `config`. Recognized keys: kind,
/// n_max, q, t, r, s, random_seed, seed, length, burn_in, out, mode, property,
/// runs, window, emissions, epsilon, lambda, horizon.
void apply_json(ExperimentConfig& config, const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

/// ERNEC parameters for a config: explicit ones, or a random draw seeded by
/// random_seed (default derive_seed(seed, 0)). Run r simulates with
/// derive_seed(seed, r + 1).
ErnecParams resolve_params(const ExperimentConfig& config);
std::uint64_t run_seed(const ExperimentConfig& config, std::size_t run);

struct RunReport {
  nlohmann::json config;
  std::vector<std::filesystem::path> outputs;
  nlohmann::json summary;
  double wall_seconds = 0.0;

  nlohmann::json to_json() const;
};

/// Execute one experiment and write its outputs (always including report.json)
/// into config.out_dir.
RunReport run(const ExperimentConfig& config);

}  // namespace necsim
