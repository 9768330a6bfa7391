#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "necsim/graph_state.hpp"
#include "necsim/rng.hpp"

namespace necsim {

/// Raised when an iterative solver fails to reach its tolerance.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Scheme { Addition, Deletion, Same };

char scheme_code(Scheme s);
Scheme scheme_from_code(char c);

/// Per-graph probabilities of the three transition schemes.
struct TransitionPolicy {
  std::function<double(const LabeledGraph&)> t;  // addition
  std::function<double(const LabeledGraph&)> r;  // deletion
  std::function<double(const LabeledGraph&)> s;  // same
};

/// Distribution over the edges that connect a newly added node.
class AdditionModel {
 public:
  virtual ~AdditionModel() = default;
  virtual std::string name() const = 0;
  virtual double pattern_prob(const LabeledGraph& g, EdgePattern pattern) const = 0;
  virtual EdgePattern sample(const LabeledGraph& g, Rng& rng) const = 0;
  /// Entropy in bits of pattern_prob(g, .). The default enumerates all 2^n patterns.
  virtual double pattern_entropy(const LabeledGraph& g) const;
};

/// Each existing node is linked to the new node independently with probability q.
/// Sampling draws one uniform per existing node, in label order.
class ErdosRenyiAddition final : public AdditionModel {
 public:
  explicit ErdosRenyiAddition(double q);
  std::string name() const override { return "erdos-renyi"; }
  double pattern_prob(const LabeledGraph& g, EdgePattern pattern) const override;
  EdgePattern sample(const LabeledGraph& g, Rng& rng) const override;
  double pattern_entropy(const LabeledGraph& g) const override;
  double q() const { return q_; }

 private:
  double q_;
};

/// Distribution over which node is removed on a deletion step.
class DeletionModel {
 public:
  virtual ~DeletionModel() = default;
  virtual std::string name() const = 0;
  virtual double node_prob(const LabeledGraph& g, int label) const = 0;
  /// Inverse-CDF over node_prob using one uniform draw.
  virtual int sample(const LabeledGraph& g, Rng& rng) const;
  /// Entropy in bits of the deleted label.
  virtual double label_entropy(const LabeledGraph& g) const;
};

class UniformDeletion final : public DeletionModel {
 public:
  std::string name() const override { return "uniform"; }
  double node_prob(const LabeledGraph& g, int label) const override;
  int sample(const LabeledGraph& g, Rng& rng) const override;
  double label_entropy(const LabeledGraph& g) const override;
};

/// A Network Evolution Chain: bounded node count, scheme policy, and the
/// addition and deletion models. Construction does not validate; call
/// validate_model.
struct NecModel {
  int n_max = 1;
  TransitionPolicy policy;
  std::shared_ptr<const AdditionModel> addition;
  std::shared_ptr<const DeletionModel> deletion;

  double t(const LabeledGraph& g) const { return policy.t(g); }
  double r(const LabeledGraph& g) const { return policy.r(g); }
  double s(const LabeledGraph& g) const { return policy.s(g); }
};

struct Violation {
  std::string graph;  // `n:HEX`, or empty for model-level problems
  std::string message;
};
using ValidationReport = std::vector<Violation>;

/// Checks the scheme constraints (sum to one, t=0 exactly at n_max, r=0
/// exactly at one node, s>0) and that the addition and deletion models are
/// normalized. Enumerates every graph when n_max <= kEnumerationCap and
/// otherwise inspects the graphs along a seeded trajectory.
ValidationReport validate_model(const NecModel& m);

struct StepResult {
  LabeledGraph graph;
  Scheme scheme = Scheme::Same;
  int deleted_label = 0;  // set on Deletion only
};

/// One transition. Consumes one uniform for the scheme (Addition if u < t,
/// Deletion if u < t + r, else Same), then the addition or deletion draws.
StepResult step(const NecModel& m, const LabeledGraph& g, Rng& rng);

/// A realized chain. schemes[i] and deleted_labels[i] describe the move from
/// states[i] to states[i + 1]; deleted_labels[i] is 0 unless that move was a
/// deletion.
struct GraphChain {
  std::uint64_t seed = 0;
  int n_max = 1;
  std::vector<LabeledGraph> states;
  std::vector<Scheme> schemes;
  std::vector<int> deleted_labels;

  std::size_t size() const { return states.size(); }
  bool has_schemes() const { return !states.empty() && schemes.size() + 1 == states.size(); }
};

/// Chain of `length` states starting from the single-node graph.
GraphChain simulate(const NecModel& m, std::size_t length, std::uint64_t seed);

/// Exact one-step probability p(g2 | g). Deletions that yield the same
/// labeled graph are summed.
double transition_prob(const NecModel& m, const LabeledGraph& g, const LabeledGraph& g2);

/// Row-sparse kernel over an enumerated state space.
struct SparseKernel {
  std::vector<std::vector<std::pair<std::size_t, double>>> rows;
  std::size_t size() const { return rows.size(); }
};

SparseKernel build_kernel(const NecModel& m, const StateSpace& space);

enum class Provenance { Analytic, Numeric, Empirical };

struct StationaryDistribution {
  std::vector<double> probs;
  Provenance provenance = Provenance::Numeric;
  double residual = 0.0;
  std::size_t iterations = 0;

  double operator[](std::size_t i) const { return probs[i]; }
  std::size_t size() const { return probs.size(); }
};

struct PowerIterationOptions {
  double tolerance = 1e-12;  // L1 norm of pi P - pi
  std::size_t max_iterations = 1'000'000;
};

/// pi = pi P by power iteration from the uniform vector.
StationaryDistribution power_iteration(const SparseKernel& kernel, const PowerIterationOptions& opts = {},
                                       std::vector<double> start = {});

StationaryDistribution stationary_graph_distribution(const NecModel& m, const StateSpace& space,
                                                     const PowerIterationOptions& opts = {});

/// Lookup of a graph's stationary probability, used to weight the first state of a chain.
using StationaryLookup = std::function<double(const LabeledGraph&)>;

StationaryLookup make_lookup(const StateSpace& space, const StationaryDistribution& pi);

}  // namespace necsim
