#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace necsim {

/// Largest node count any graph may carry (simulation-only workloads).
inline constexpr int kMaxNodes = 64;

/// Largest n_max for which the full state space may be materialized.
inline constexpr int kEnumerationCap = 6;

/// Number of unordered node pairs on n nodes.
constexpr std::size_t pair_count(int n) {
  return n < 2 ? 0 : static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2;
}

/// Bit position of the pair (i, j), 1 <= i < j <= n, in the upper-triangular
/// row-major layout: (1,2), (1,3), ..., (1,n), (2,3), ...
constexpr std::size_t pair_index(int n, int i, int j) {
  const auto a = static_cast<std::size_t>(i - 1);
  return a * static_cast<std::size_t>(n) - a * (a + 1) / 2 + static_cast<std::size_t>(j - i - 1);
}

/// Edges from a new node to the existing nodes 1..width. Bit k-1 set means an
/// edge to node k.
struct EdgePattern {
  int width = 0;
  std::uint64_t bits = 0;

  bool connects(int label) const { return (bits >> (label - 1)) & 1u; }
  int degree() const;
  friend bool operator==(const EdgePattern&, const EdgePattern&) = default;
};

/// Simple undirected graph on nodes {1..n}. The adjacency is stored as an
/// upper-triangular bitset in 64-bit little-endian words; bits past the last
/// pair are always zero, so (n, words) equality is graph equality.
class LabeledGraph {
 public:
  /// The single-node graph.
  LabeledGraph() : LabeledGraph(1) {}

  /// Empty graph on n nodes.
  explicit LabeledGraph(int n);

  static LabeledGraph from_edges(int n, std::span<const std::pair<int, int>> edges);
  static LabeledGraph from_edges(int n, std::initializer_list<std::pair<int, int>> edges);

  /// Build from the low pair_count(n) bits of an integer (n <= 11).
  static LabeledGraph from_bits(int n, std::uint64_t bits);

  /// Build from raw words; throws if bits past the last pair are set.
  static LabeledGraph from_words(int n, std::vector<std::uint64_t> words);

  /// Parse the `n:HEX` text encoding.
  static LabeledGraph parse(std::string_view text);

  int node_count() const { return n_; }
  std::size_t pair_count() const { return necsim::pair_count(n_); }
  bool has_edge(int i, int j) const;
  int edge_count() const;
  std::span<const std::uint64_t> words() const { return words_; }

  /// Adjacency value as an integer; requires pair_count() <= 64.
  std::uint64_t bits() const;

  /// Neighbour masks, bit k-1 of entry i-1 set when {i, k} is an edge. Requires n <= 64.
  std::vector<std::uint64_t> neighbour_masks() const;

  /// `n:HEX` with lowercase hex and no leading zeros.
  std::string to_string() const;

  friend bool operator==(const LabeledGraph&, const LabeledGraph&) = default;
  friend std::strong_ordering operator<=>(const LabeledGraph& a, const LabeledGraph& b);
  friend LabeledGraph delete_node(const LabeledGraph& g, int label);
  friend LabeledGraph add_node(const LabeledGraph& g, EdgePattern pattern);

 private:
  void set_edge(int i, int j);

  int n_ = 1;
  std::vector<std::uint64_t> words_;
};

/// Number of 3-cliques.
int triangle_count(const LabeledGraph& g);

/// Remove node `label` and shift every larger label down by one.
LabeledGraph delete_node(const LabeledGraph& g, int label);

/// Append node n+1 wired to existing nodes per `pattern`.
LabeledGraph add_node(const LabeledGraph& g, EdgePattern pattern);

/// Edges of the highest-labelled node towards nodes 1..n-1.
EdgePattern newest_node_pattern(const LabeledGraph& g);

/// Every labeled graph on 1..n_max nodes, ordered by node count and then by
/// adjacency value. Graph ids are dense indices into that order.
class StateSpace {
 public:
  explicit StateSpace(int n_max);

  int n_max() const { return n_max_; }
  std::size_t size() const { return graphs_.size(); }
  const LabeledGraph& graph(std::size_t id) const { return graphs_.at(id); }
  const std::vector<LabeledGraph>& graphs() const { return graphs_; }

  /// Dense id of g; throws std::out_of_range when g lies outside the space.
  std::size_t id(const LabeledGraph& g) const;
  bool contains(const LabeledGraph& g) const;

  /// First id of graphs with n nodes, and the count of such graphs.
  std::size_t offset(int n) const { return offsets_.at(static_cast<std::size_t>(n - 1)); }
  std::size_t count(int n) const { return std::size_t{1} << necsim::pair_count(n); }

  /// Closed-form size: sum over n of 2^{n(n-1)/2}.
  static std::size_t expected_size(int n_max);

 private:
  int n_max_;
  std::vector<std::size_t> offsets_;
  std::vector<LabeledGraph> graphs_;
};

}  // namespace necsim
