#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "necsim/ernec.hpp"
#include "necsim/nec_kernel.hpp"

namespace necsim {

/// A discrete graph property. Symbols are integers in [0, max_symbol(n_max)].
struct PropertyFn {
  std::string name;
  std::function<int(const LabeledGraph&)> fn;
  std::function<int(int n_max)> max_symbol;

  int operator()(const LabeledGraph& g) const { return fn(g); }
  int symbol_count(int n_max) const { return max_symbol(n_max) + 1; }
};

PropertyFn node_count_property();
PropertyFn edge_count_property();
PropertyFn triangle_count_property();
PropertyFn constant_property(int value = 0);
/// Injective: the graph's id in StateSpace(n_max).
PropertyFn state_id_property(int n_max);
/// One of node-count, edge-count, triangle-count, constant.
PropertyFn property_by_name(const std::string& name);

struct PropertyChainData {
  std::string property;
  std::vector<int> symbols;
};

PropertyChainData extract_npc(const GraphChain& chain, const PropertyFn& f);

/// Discrete HMM: trans is m x m, emit is m x k, both row-stochastic.
struct Hmm {
  Eigen::VectorXd initial;
  Eigen::MatrixXd trans;
  Eigen::MatrixXd emit;

  int states() const { return static_cast<int>(trans.rows()); }
  int symbols() const { return static_cast<int>(emit.cols()); }
  /// Throws std::invalid_argument on shape or normalization problems.
  void validate(double tol = 1e-12) const;
};

/// Hidden states are every graph of StateSpace(n_max) with the exact kernel,
/// indicator emissions and the stationary initial distribution. Dense, so
/// limited to n_max <= 5.
Hmm build_full_hmm(const NecModel& m, const PropertyFn& f);

/// Weighting of graphs with X nodes when computing reduced-HMM emissions.
enum class EmissionWeighting {
  Uniform,     // count of graphs with f(g)=y over 2^{C(X,2)}
  ErWeighted,  // sum of q^E (1-q)^{C(X,2)-E} over graphs with f(g)=y
};

/// Hidden states are node counts 1..n_max (index X-1), transitions are the
/// node-count matrix and the initial law is the node stationary distribution.
/// Exact emissions need every graph of each size, so n_max <= kEnumerationCap.
Hmm build_reduced_hmm(const ErnecParams& p, const PropertyFn& f,
                      EmissionWeighting weighting = EmissionWeighting::ErWeighted);

struct ForwardResult {
  double log2_prob = 0.0;
  /// prefix_log2[k-1] = log2 p(y_1..y_k).
  std::vector<double> prefix_log2;
  std::optional<std::size_t> zero_step;
};

/// Scaled forward recursion; impossible sequences return -infinity.
ForwardResult forward(const Hmm& h, std::span<const int> symbols);
double forward_log_prob(const Hmm& h, std::span<const int> symbols);

/// Maximum-likelihood counts from observed hidden states. Rows without data
/// fall back to uniform; the initial law is the empirical state frequency.
Hmm estimate_hmm_supervised(std::span<const int> symbols, std::span<const int> hidden, int m, int k);

struct BaumWelchOptions {
  int max_iterations = 500;
  double tolerance = 1e-9;  // relative log-likelihood improvement
  std::uint64_t seed = 0;
  double jitter = 0.1;
};

struct BaumWelchResult {
  Hmm hmm;
  /// Log2-likelihood of the data under the parameters entering each iteration,
  /// followed by the final value.
  std::vector<double> log_likelihood;
  int iterations = 0;
  bool converged = false;
};

BaumWelchResult baum_welch(std::span<const int> symbols, Hmm start, const BaumWelchOptions& opts = {});
/// Starts from uniform rows perturbed by seeded jitter.
BaumWelchResult baum_welch(std::span<const int> symbols, int m, int k, const BaumWelchOptions& opts = {});

/// Supervised counting when hidden states are given, Baum-Welch otherwise.
Hmm estimate_hmm(std::span<const int> symbols, std::optional<std::span<const int>> hidden, int m, int k,
                 const BaumWelchOptions& opts = {});

struct NpcPipelineOptions {
  double burn_in = 0.1;          // fraction of the chain discarded first
  std::size_t window = 0;        // keep only the last `window` samples; 0 keeps all
  bool exact_emissions = false;  // use build_reduced_hmm emissions instead of estimates
  EmissionWeighting weighting = EmissionWeighting::ErWeighted;
};

struct NpcEntropyEstimate {
  double rate = 0.0;
  std::vector<double> prefix;  // running -(1/k) log2 p(y_1..y_k)
  Hmm hmm;
  std::size_t samples = 0;
};

/// Simulate the ERNEC, map it through f, pair the node-count matrix with
/// emissions estimated from the (node count, symbol) pairs, score the symbol
/// sequence with the forward algorithm and return -(1/n) log2 p.
NpcEntropyEstimate npc_entropy_pipeline(const ErnecParams& p, const PropertyFn& f, std::size_t length,
                                        std::uint64_t seed, const NpcPipelineOptions& opts = {});

/// Same pipeline on an already simulated ERNEC chain.
NpcEntropyEstimate npc_entropy_pipeline(const ErnecParams& p, const PropertyFn& f, const GraphChain& chain,
                                        const NpcPipelineOptions& opts = {});

}  // namespace necsim
