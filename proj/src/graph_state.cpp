#include "necsim/graph_state.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <stdexcept>

namespace necsim {

namespace {

std::size_t word_count(int n) { return (pair_count(n) + 63) / 64; }

void check_node_count(int n) {
  if (n < 1 || n > kMaxNodes) {
    throw std::invalid_argument("node count " + std::to_string(n) + " outside [1, " +
                                std::to_string(kMaxNodes) + "]");
  }
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

int EdgePattern::degree() const { return std::popcount(bits); }

LabeledGraph::LabeledGraph(int n) : n_(n) {
  check_node_count(n);
  words_.assign(word_count(n), 0);
}

LabeledGraph LabeledGraph::from_edges(int n, std::span<const std::pair<int, int>> edges) {
  LabeledGraph g(n);
  for (auto [i, j] : edges) {
    if (i == j || i < 1 || j < 1 || i > n || j > n) {
      throw std::invalid_argument("invalid edge {" + std::to_string(i) + "," + std::to_string(j) +
                                  "} for " + std::to_string(n) + " nodes");
    }
    g.set_edge(std::min(i, j), std::max(i, j));
  }
  return g;
}

LabeledGraph LabeledGraph::from_edges(int n, std::initializer_list<std::pair<int, int>> edges) {
  return from_edges(n, std::span<const std::pair<int, int>>(edges.begin(), edges.size()));
}

LabeledGraph LabeledGraph::from_bits(int n, std::uint64_t bits) {
  check_node_count(n);
  const std::size_t pairs = necsim::pair_count(n);
  if (pairs > 64) throw std::invalid_argument("from_bits requires at most 64 node pairs");
  if (pairs < 64 && (bits >> pairs) != 0) {
    throw std::invalid_argument("adjacency bits beyond the last node pair are set");
  }
  std::vector<std::uint64_t> words(word_count(n), 0);
  if (!words.empty()) words[0] = bits;
  return from_words(n, std::move(words));
}

LabeledGraph LabeledGraph::from_words(int n, std::vector<std::uint64_t> words) {
  check_node_count(n);
  if (words.size() != word_count(n)) {
    throw std::invalid_argument("expected " + std::to_string(word_count(n)) + " adjacency words for " +
                                std::to_string(n) + " nodes");
  }
  const std::size_t used = necsim::pair_count(n) % 64;
  if (used != 0 && (words.back() >> used) != 0) {
    throw std::invalid_argument("adjacency bits beyond the last node pair are set");
  }
  LabeledGraph g(n);
  g.words_ = std::move(words);
  return g;
}

LabeledGraph LabeledGraph::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 == text.size()) {
    throw std::invalid_argument("malformed graph encoding '" + std::string(text) + "'");
  }
  int n = 0;
  const auto* first = text.data();
  const auto [ptr, ec] = std::from_chars(first, first + colon, n);
  if (ec != std::errc{} || ptr != first + colon) {
    throw std::invalid_argument("malformed node count in '" + std::string(text) + "'");
  }
  check_node_count(n);

  std::vector<std::uint64_t> words(word_count(n), 0);
  const std::string_view hex = text.substr(colon + 1);
  const std::size_t capacity = words.size() * 16;
  std::size_t digit = 0;  // position from the least significant end
  for (auto it = hex.rbegin(); it != hex.rend(); ++it, ++digit) {
    const int v = hex_value(*it);
    if (v < 0) throw std::invalid_argument("malformed hex digits in '" + std::string(text) + "'");
    if (v == 0) continue;
    if (digit >= capacity) {
      throw std::invalid_argument("adjacency value too wide in '" + std::string(text) + "'");
    }
    words[digit / 16] |= static_cast<std::uint64_t>(v) << (4 * (digit % 16));
  }
  return from_words(n, std::move(words));
}

void LabeledGraph::set_edge(int i, int j) {
  const std::size_t k = pair_index(n_, i, j);
  words_[k / 64] |= std::uint64_t{1} << (k % 64);
}

bool LabeledGraph::has_edge(int i, int j) const {
  if (i == j) return false;
  if (i > j) std::swap(i, j);
  if (i < 1 || j > n_) throw std::out_of_range("node label out of range");
  const std::size_t k = pair_index(n_, i, j);
  return (words_[k / 64] >> (k % 64)) & 1u;
}

int LabeledGraph::edge_count() const {
  int total = 0;
  for (auto w : words_) total += std::popcount(w);
  return total;
}

std::uint64_t LabeledGraph::bits() const {
  if (words_.size() > 1) throw std::logic_error("adjacency does not fit in 64 bits");
  return words_.empty() ? 0 : words_[0];
}

std::vector<std::uint64_t> LabeledGraph::neighbour_masks() const {
  std::vector<std::uint64_t> masks(static_cast<std::size_t>(n_), 0);
  std::size_t k = 0;
  for (int i = 1; i <= n_; ++i) {
    for (int j = i + 1; j <= n_; ++j, ++k) {
      if ((words_[k / 64] >> (k % 64)) & 1u) {
        masks[i - 1] |= std::uint64_t{1} << (j - 1);
        masks[j - 1] |= std::uint64_t{1} << (i - 1);
      }
    }
  }
  return masks;
}

std::string LabeledGraph::to_string() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string hex;
  for (auto w = words_.rbegin(); w != words_.rend(); ++w) {
    for (int shift = 60; shift >= 0; shift -= 4) {
      const auto v = (*w >> shift) & 0xFu;
      if (hex.empty() && v == 0) continue;
      hex.push_back(kDigits[v]);
    }
  }
  if (hex.empty()) hex = "0";
  return std::to_string(n_) + ":" + hex;
}

std::strong_ordering operator<=>(const LabeledGraph& a, const LabeledGraph& b) {
  if (auto c = a.n_ <=> b.n_; c != 0) return c;
  for (std::size_t w = a.words_.size(); w-- > 0;) {
    if (auto c = a.words_[w] <=> b.words_[w]; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

int triangle_count(const LabeledGraph& g) {
  const int n = g.node_count();
  if (n < 3) return 0;
  const auto masks = g.neighbour_masks();
  int total = 0;
  for (int i = 0; i < n; ++i) {
    // Count each triangle once, from its smallest vertex.
    std::uint64_t higher = masks[i] & ~((std::uint64_t{2} << i) - 1);
    while (higher) {
      const int j = std::countr_zero(higher);
      higher &= higher - 1;
      const std::uint64_t above_j = j + 1 >= 64 ? 0 : ~((std::uint64_t{2} << j) - 1);
      total += std::popcount(masks[i] & masks[j] & above_j);
    }
  }
  return total;
}

LabeledGraph delete_node(const LabeledGraph& g, int label) {
  const int n = g.node_count();
  if (n == 1) throw std::logic_error("cannot delete the only node of a graph");
  if (label < 1 || label > n) {
    throw std::invalid_argument("node label " + std::to_string(label) + " outside [1, " +
                                std::to_string(n) + "]");
  }
  LabeledGraph out(n - 1);
  auto relabel = [label](int v) { return v > label ? v - 1 : v; };
  for (int i = 1; i <= n; ++i) {
    if (i == label) continue;
    for (int j = i + 1; j <= n; ++j) {
      if (j == label || !g.has_edge(i, j)) continue;
      out.set_edge(relabel(i), relabel(j));
    }
  }
  return out;
}

LabeledGraph add_node(const LabeledGraph& g, EdgePattern pattern) {
  const int n = g.node_count();
  if (pattern.width != n) {
    throw std::invalid_argument("edge pattern width " + std::to_string(pattern.width) +
                                " does not match node count " + std::to_string(n));
  }
  if (n + 1 > kMaxNodes) throw std::invalid_argument("graph already has the maximum node count");
  if (n < 64 && (pattern.bits >> n) != 0) {
    throw std::invalid_argument("edge pattern has bits beyond its width");
  }
  LabeledGraph out(n + 1);
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      if (g.has_edge(i, j)) out.set_edge(i, j);
    }
    if (pattern.connects(i)) out.set_edge(i, n + 1);
  }
  return out;
}

EdgePattern newest_node_pattern(const LabeledGraph& g) {
  const int n = g.node_count();
  EdgePattern p{n - 1, 0};
  for (int i = 1; i < n; ++i) {
    if (g.has_edge(i, n)) p.bits |= std::uint64_t{1} << (i - 1);
  }
  return p;
}

std::size_t StateSpace::expected_size(int n_max) {
  std::size_t total = 0;
  for (int n = 1; n <= n_max; ++n) total += std::size_t{1} << necsim::pair_count(n);
  return total;
}

StateSpace::StateSpace(int n_max) : n_max_(n_max) {
  if (n_max < 1 || n_max > kEnumerationCap) {
    throw std::out_of_range("state-space enumeration requires 1 <= n_max <= " +
                            std::to_string(kEnumerationCap) + " (got " + std::to_string(n_max) + ")");
  }
  graphs_.reserve(expected_size(n_max));
  for (int n = 1; n <= n_max; ++n) {
    offsets_.push_back(graphs_.size());
    const std::uint64_t count = std::uint64_t{1} << necsim::pair_count(n);
    for (std::uint64_t bits = 0; bits < count; ++bits) graphs_.push_back(LabeledGraph::from_bits(n, bits));
  }
}

bool StateSpace::contains(const LabeledGraph& g) const { return g.node_count() <= n_max_; }

std::size_t StateSpace::id(const LabeledGraph& g) const {
  if (!contains(g)) {
    throw std::out_of_range("graph " + g.to_string() + " lies outside the state space with n_max=" +
                            std::to_string(n_max_));
  }
  return offset(g.node_count()) + static_cast<std::size_t>(g.bits());
}

}  // namespace necsim
