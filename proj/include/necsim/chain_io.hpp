#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "necsim/continuous_time.hpp"
#include "necsim/entropy_analysis.hpp"
#include "necsim/ernec.hpp"
#include "necsim/nec_kernel.hpp"
#include "necsim/property_chain.hpp"

namespace necsim {

/// Malformed input file; line() is 1-based (0 when not line-specific).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Header names a format version this build does not read.
class VersionError : public ParseError {
 public:
  using ParseError::ParseError;
};

// Chain files:
//   nec-chain v1 n_max=<k> seed=<s>
//   <n:HEX> [A|S|D <label>]
// The scheme column on line i+1 names the move from state i to state i+1;
// deletions also carry the removed label. The first state has no scheme.
void write_chain(std::ostream& os, const GraphChain& chain);
void write_chain(const std::filesystem::path& path, const GraphChain& chain);
GraphChain read_chain(std::istream& is);
GraphChain load_chain(const std::filesystem::path& path);

// NPC files: `npc v1 f=<name>` then one integer symbol per line.
void write_npc(std::ostream& os, const PropertyChainData& npc);
void write_npc(const std::filesystem::path& path, const PropertyChainData& npc);
PropertyChainData read_npc(std::istream& is);
PropertyChainData load_npc(const std::filesystem::path& path);

// CTMC trajectories: `ctmc v1` then `<n:HEX> <holding_time>` per line.
void write_trajectory(std::ostream& os, const CtmcTrajectory& traj);
void write_trajectory(const std::filesystem::path& path, const CtmcTrajectory& traj);
CtmcTrajectory read_trajectory(std::istream& is);

/// Shortest round-trip text for a double.
std::string format_double(double v);

nlohmann::json to_json(const ErnecParams& p);
/// Accepts explicit n_max, q, t, r, s or n_max, q, random_seed.
ErnecParams ernec_params_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Hmm& h);
Hmm hmm_from_json(const nlohmann::json& j);

nlohmann::json to_json(const EntropyReport& r);

}  // namespace necsim
