#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "necsim/nec_kernel.hpp"

namespace necsim {

class ErnecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Erdős–Rényi NEC parameters. The scheme probabilities depend only on the
/// node count; t[i-1], r[i-1], s[i-1] apply to graphs with i nodes.
struct ErnecParams {
  int n_max = 1;
  double q = 0.5;
  std::vector<double> t, r, s;

  double t_at(int i) const { return t.at(static_cast<std::size_t>(i - 1)); }
  double r_at(int i) const { return r.at(static_cast<std::size_t>(i - 1)); }
  double s_at(int i) const { return s.at(static_cast<std::size_t>(i - 1)); }
};

/// Throws ErnecError naming the first violated constraint.
void validate_ernec(const ErnecParams& p);

/// Random scheme probabilities: for 1 < i < n_max two uniform points split
/// [0,1] into (t_i, r_i, s_i) in order; i = 1 splits into (t_1, s_1) and
/// i = n_max into (r_nmax, s_nmax).
ErnecParams random_ernec_params(int n_max, double q, Rng& rng);
ErnecParams random_ernec_params(int n_max, double q, std::uint64_t seed);

/// Validated ERNEC as a generic model: Bernoulli(q) wiring of new nodes,
/// uniform deletion with label compaction.
NecModel make_ernec(const ErnecParams& p);

/// Tridiagonal node-count transition matrix (row i-1 is node count i).
Eigen::MatrixXd node_count_matrix(const ErnecParams& p);

/// Product formula pi_i / pi_1 = prod_{j<i} t_j / prod_{1<j<=i} r_j, normalized.
StationaryDistribution node_stationary_analytic(const ErnecParams& p);

/// Null-space solve of pi = pi P with sum(pi) = 1.
StationaryDistribution node_stationary_numeric(const ErnecParams& p);

/// pi_N q^E (1-q)^{C(N,2)-E} for a graph with N nodes and E edges.
double graph_stationary_prob(const ErnecParams& p, const StationaryDistribution& node_pi, const LabeledGraph& g);
double graph_stationary_prob(const ErnecParams& p, const LabeledGraph& g);

/// Closed-form entropy rate in bits per step. The deletion term counts the
/// identity of the removed node (log2 i), so it can exceed the graph-level rate.
double ernec_entropy_rate(const ErnecParams& p);

/// Entropy rate of the node-count Markov chain alone.
double node_count_entropy_rate(const ErnecParams& p);

/// Analytic per-graph stationary probabilities as a lookup.
StationaryLookup ernec_lookup(const ErnecParams& p);

}  // namespace necsim
