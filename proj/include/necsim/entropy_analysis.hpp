#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "necsim/nec_kernel.hpp"

namespace necsim {

/// How a chain's probability is scored.
///  - GraphKernel: product of graph-to-graph kernel probabilities (deletions
///    producing the same graph are merged).
///  - LabeledPath: product of scheme and choice probabilities along the
///    recorded path (which node was deleted counts).
enum class ChainMode { GraphKernel, LabeledPath };

std::string to_string(ChainMode mode);
ChainMode parse_chain_mode(std::string_view text);

/// Scheme entropy plus the expected addition-pattern and deleted-label
/// entropies, weighted by pi. Bits per step.
double formula_entropy_rate(const NecModel& m, const StateSpace& space, const StationaryDistribution& pi);

/// -sum_g pi(g) sum_g' P(g,g') log2 P(g,g') over the aggregated kernel.
double kernel_entropy_rate(const SparseKernel& kernel, const StationaryDistribution& pi);
double kernel_entropy_rate(const NecModel& m);

/// sum_g pi(g) r(g) [H(deleted label | g) - H(deletion outcome | g)], the
/// amount by which the formula rate exceeds the kernel rate.
double deletion_collision_gap(const NecModel& m, const StateSpace& space, const StationaryDistribution& pi);

struct ChainLogProb {
  double log2_prob = 0.0;               // -infinity when some step is impossible
  std::optional<std::size_t> zero_step; // index i of the impossible move states[i] -> states[i+1]
  bool finite() const { return !zero_step.has_value(); }
};

/// log2 pi(G_1) + sum of per-step log2 probabilities. LabeledPath mode needs
/// recorded schemes and deletion labels.
ChainLogProb chain_log_prob(const NecModel& m, const GraphChain& chain, ChainMode mode,
                            const StationaryLookup& stationary);

struct EmpiricalRate {
  double rate = 0.0;
  double log2_prob = 0.0;
  /// prefix[k-1] is -(1/k) log2 p(G_1..G_k).
  std::vector<double> prefix;
  std::optional<std::size_t> zero_step;
};

EmpiricalRate empirical_entropy_rate(const NecModel& m, const GraphChain& chain, ChainMode mode,
                                     const StationaryLookup& stationary);

struct EntropyReport {
  double formula_rate = 0.0;
  double kernel_rate = 0.0;
  std::optional<double> empirical_rate;
  std::size_t chain_length = 0;
  double gap = 0.0;
  ChainMode mode = ChainMode::GraphKernel;
};

/// Formula and kernel rates for an enumerable model, plus the empirical rate
/// of `chain` when one is given.
EntropyReport entropy_report(const NecModel& m, const GraphChain* chain = nullptr,
                             ChainMode mode = ChainMode::GraphKernel);

struct TypicalityVerdict {
  double epsilon = 0.0;
  double entropy_rate = 0.0;
  double neg_log_prob_per_symbol = 0.0;
  std::size_t length = 0;
  double log2_lower = 0.0;  // -n (H + eps)
  double log2_upper = 0.0;  // -n (H - eps)
  double margin = 0.0;      // eps - |value - H|; non-negative iff typical
  bool typical = false;
};

TypicalityVerdict typicality_test(double entropy_rate, double neg_log_prob_per_symbol, double epsilon,
                                  std::size_t length = 1);

}  // namespace necsim
