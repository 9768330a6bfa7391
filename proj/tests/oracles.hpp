#pragma once
// Test-side reference implementations. They work on dense adjacency matrices
// and explicit enumeration and share no code with the library algorithms.

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "necsim/ernec.hpp"
#include "necsim/graph_state.hpp"

namespace oracle {

using Adj = std::vector<std::vector<int>>;  // 0-based, symmetric

inline Adj adjacency(const necsim::LabeledGraph& g) {
  const int n = g.node_count();
  Adj a(n, std::vector<int>(n, 0));
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j)
      if (g.has_edge(i, j)) a[i - 1][j - 1] = a[j - 1][i - 1] = 1;
  return a;
}

/// Bit k of the encoding walks pairs (1,2), (1,3), ..., (1,n), (2,3), ...
inline necsim::LabeledGraph from_adjacency(const Adj& a) {
  const int n = static_cast<int>(a.size());
  std::uint64_t bits = 0;
  int k = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j, ++k)
      if (a[i][j]) bits |= std::uint64_t{1} << k;
  return necsim::LabeledGraph::from_bits(n, bits);
}

inline Adj remove_vertex(const Adj& a, int label) {
  Adj out;
  for (int i = 0; i < static_cast<int>(a.size()); ++i) {
    if (i == label - 1) continue;
    std::vector<int> row;
    for (int j = 0; j < static_cast<int>(a.size()); ++j)
      if (j != label - 1) row.push_back(a[i][j]);
    out.push_back(row);
  }
  return out;
}

inline int triangles_by_trace(const Adj& a) {
  const auto n = static_cast<Eigen::Index>(a.size());
  Eigen::MatrixXd A(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) A(i, j) = a[i][j];
  return static_cast<int>(std::lround((A * A * A).trace() / 6.0));
}

inline double log2_safe(double x) { return x > 0.0 ? std::log2(x) : 0.0; }

/// Every successor of g under an ERNEC with its probability, by enumerating
/// every attachment subset and every deleted vertex.
inline std::map<necsim::LabeledGraph, double> ernec_successors(const necsim::ErnecParams& p,
                                                               const necsim::LabeledGraph& g) {
  std::map<necsim::LabeledGraph, double> out;
  const int n = g.node_count();
  out[g] += p.s_at(n);
  const Adj a = adjacency(g);
  if (n < p.n_max) {
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
      Adj b = a;
      for (auto& row : b) row.push_back(0);
      b.emplace_back(n + 1, 0);
      int e = 0;
      for (int i = 0; i < n; ++i) {
        if (mask >> i & 1) {
          b[i][n] = b[n][i] = 1;
          ++e;
        }
      }
      out[from_adjacency(b)] += p.t_at(n) * std::pow(p.q, e) * std::pow(1.0 - p.q, n - e);
    }
  }
  if (n > 1) {
    for (int v = 1; v <= n; ++v) out[from_adjacency(remove_vertex(a, v))] += p.r_at(n) / n;
  }
  return out;
}

/// Stationary law over all graphs with at most n_max nodes via a dense
/// eigen-solve of the full transition matrix.
struct DenseChain {
  std::vector<necsim::LabeledGraph> graphs;
  std::map<necsim::LabeledGraph, int> index;
  Eigen::MatrixXd P;
  Eigen::VectorXd pi;
};

inline DenseChain dense_ernec(const necsim::ErnecParams& p) {
  DenseChain c;
  for (int n = 1; n <= p.n_max; ++n) {
    const int pairs = n * (n - 1) / 2;
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << pairs); ++bits) {
      c.index[necsim::LabeledGraph::from_bits(n, bits)] = static_cast<int>(c.graphs.size());
      c.graphs.push_back(necsim::LabeledGraph::from_bits(n, bits));
    }
  }
  const auto m = static_cast<Eigen::Index>(c.graphs.size());
  c.P = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (const auto& [h, w] : ernec_successors(p, c.graphs[static_cast<std::size_t>(i)])) c.P(i, c.index.at(h)) += w;
  // pi (P - I) = 0 with the normalization replacing one equation.
  Eigen::MatrixXd A = (c.P - Eigen::MatrixXd::Identity(m, m)).transpose();
  A.row(m - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
  b(m - 1) = 1.0;
  c.pi = A.fullPivLu().solve(b);
  return c;
}

/// -sum_i pi_i sum_j P_ij log2 P_ij.
inline double markov_entropy_rate(const Eigen::MatrixXd& P, const Eigen::VectorXd& pi) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < P.rows(); ++i)
    for (Eigen::Index j = 0; j < P.cols(); ++j) h -= pi(i) * P(i, j) * log2_safe(P(i, j));
  return h;
}

/// Node-count stationary law from birth-death balance,
/// pi_{i+1} / pi_i = t_i / r_{i+1}.
inline std::vector<double> node_pi_by_balance(const necsim::ErnecParams& p) {
  std::vector<double> w{1.0};
  for (int i = 1; i < p.n_max; ++i) w.push_back(w.back() * p.t_at(i) / p.r_at(i + 1));
  double total = 0.0;
  for (double v : w) total += v;
  for (double& v : w) v /= total;
  return w;
}

/// Closed-form ERNEC rate computed term by term from the definitions: scheme
/// entropy, Binomial attachment entropy, and log2 i bits for the deleted label.
inline double ernec_rate_terms(const necsim::ErnecParams& p) {
  const auto pi = node_pi_by_balance(p);
  double h = 0.0;
  for (int i = 1; i <= p.n_max; ++i) {
    const double w = pi[static_cast<std::size_t>(i - 1)];
    h -= w * (log2_safe(p.t_at(i)) * p.t_at(i) + log2_safe(p.r_at(i)) * p.r_at(i) + log2_safe(p.s_at(i)) * p.s_at(i));
    if (i < p.n_max) {
      // Entropy of i independent Bernoulli(q) draws.
      const double hq = -(p.q * std::log2(p.q) + (1.0 - p.q) * std::log2(1.0 - p.q));
      h += w * p.t_at(i) * i * hq;
    }
    if (i > 1) h += w * p.r_at(i) * std::log2(static_cast<double>(i));
  }
  return h;
}

/// Hand-built two-size ERNEC used by several worked examples: n_max = 2,
/// q = 1/2, t_1 = s_1 = 1/2, r_2 = s_2 = 1/2.
inline necsim::ErnecParams two_node_example() {
  necsim::ErnecParams p;
  p.n_max = 2;
  p.q = 0.5;
  p.t = {0.5, 0.0};
  p.r = {0.0, 0.5};
  p.s = {0.5, 0.5};
  return p;
}

}  // namespace oracle
