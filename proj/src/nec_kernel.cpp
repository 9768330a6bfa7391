#include "necsim/nec_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace necsim {

namespace {

constexpr double kSumTolerance = 1e-12;
constexpr double kModelTolerance = 1e-9;
constexpr int kPatternEnumerationLimit = 20;

double entropy_term(double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; }

void check_in_scope(const NecModel& m, const LabeledGraph& g) {
  if (g.node_count() > m.n_max) {
    throw std::invalid_argument("graph " + g.to_string() + " exceeds n_max=" + std::to_string(m.n_max));
  }
}

std::string format_prob(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void check_graph(const NecModel& m, const LabeledGraph& g, ValidationReport& out) {
  const int n = g.node_count();
  const std::string id = g.to_string();
  const double t = m.t(g), r = m.r(g), s = m.s(g);
  auto add = [&](std::string msg) { out.push_back({id, std::move(msg)}); };

  for (auto [name, v] : {std::pair{"t", t}, std::pair{"r", r}, std::pair{"s", s}}) {
    if (!(v >= 0.0 && v <= 1.0)) add(std::string(name) + "(g)=" + format_prob(v) + " is not a probability");
  }
  if (std::abs(t + r + s - 1.0) > kSumTolerance) {
    add("t(g)+r(g)+s(g)=" + format_prob(t + r + s) + " does not sum to 1");
  }
  if (n == m.n_max && t != 0.0) add("t(g) must be 0 for graphs with n_max nodes");
  if (n < m.n_max && !(t > 0.0)) add("t(g) must be positive for graphs below n_max nodes");
  if (n == 1 && r != 0.0) add("r(g) must be 0 for the single-node graph");
  if (n > 1 && !(r > 0.0)) add("r(g) must be positive for graphs with more than one node");
  if (!(s > 0.0)) add("s(g) must be positive");

  if (n < m.n_max && n <= kPatternEnumerationLimit) {
    double total = 0.0;
    const std::uint64_t count = std::uint64_t{1} << n;
    for (std::uint64_t bits = 0; bits < count; ++bits) total += m.addition->pattern_prob(g, {n, bits});
    if (std::abs(total - 1.0) > kModelTolerance) {
      add("addition pattern probabilities sum to " + format_prob(total));
    }
  }
  if (n > 1) {
    double total = 0.0;
    for (int label = 1; label <= n; ++label) total += m.deletion->node_prob(g, label);
    if (std::abs(total - 1.0) > kModelTolerance) {
      add("deletion node probabilities sum to " + format_prob(total));
    }
  }
}

}  // namespace

char scheme_code(Scheme s) {
  switch (s) {
    case Scheme::Addition: return 'A';
    case Scheme::Deletion: return 'D';
    case Scheme::Same: return 'S';
  }
  return '?';
}

Scheme scheme_from_code(char c) {
  switch (c) {
    case 'A': return Scheme::Addition;
    case 'D': return Scheme::Deletion;
    case 'S': return Scheme::Same;
    default: throw std::invalid_argument(std::string("unknown transition scheme '") + c + "'");
  }
}

double AdditionModel::pattern_entropy(const LabeledGraph& g) const {
  const int n = g.node_count();
  if (n > kPatternEnumerationLimit) throw std::out_of_range("too many nodes to enumerate edge patterns");
  double h = 0.0;
  const std::uint64_t count = std::uint64_t{1} << n;
  for (std::uint64_t bits = 0; bits < count; ++bits) h += entropy_term(pattern_prob(g, {n, bits}));
  return h;
}

ErdosRenyiAddition::ErdosRenyiAddition(double q) : q_(q) {
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("edge probability must lie in [0, 1]");
}

double ErdosRenyiAddition::pattern_prob(const LabeledGraph& g, EdgePattern pattern) const {
  const int n = g.node_count();
  if (pattern.width != n) throw std::invalid_argument("edge pattern width does not match node count");
  const int k = pattern.degree();
  return std::pow(q_, k) * std::pow(1.0 - q_, n - k);
}

EdgePattern ErdosRenyiAddition::sample(const LabeledGraph& g, Rng& rng) const {
  EdgePattern p{g.node_count(), 0};
  for (int i = 0; i < p.width; ++i) {
    if (rng.uniform() < q_) p.bits |= std::uint64_t{1} << i;
  }
  return p;
}

double ErdosRenyiAddition::pattern_entropy(const LabeledGraph& g) const {
  return g.node_count() * (entropy_term(q_) + entropy_term(1.0 - q_));
}

int DeletionModel::sample(const LabeledGraph& g, Rng& rng) const {
  const int n = g.node_count();
  const double u = rng.uniform();
  double cumulative = 0.0;
  for (int label = 1; label < n; ++label) {
    cumulative += node_prob(g, label);
    if (u < cumulative) return label;
  }
  return n;
}

double DeletionModel::label_entropy(const LabeledGraph& g) const {
  double h = 0.0;
  for (int label = 1; label <= g.node_count(); ++label) h += entropy_term(node_prob(g, label));
  return h;
}

double UniformDeletion::node_prob(const LabeledGraph& g, int label) const {
  const int n = g.node_count();
  return label >= 1 && label <= n ? 1.0 / n : 0.0;
}

int UniformDeletion::sample(const LabeledGraph& g, Rng& rng) const {
  const int n = g.node_count();
  const int label = 1 + static_cast<int>(rng.uniform() * n);
  return std::min(label, n);
}

double UniformDeletion::label_entropy(const LabeledGraph& g) const { return std::log2(g.node_count()); }

ValidationReport validate_model(const NecModel& m) {
  ValidationReport report;
  if (m.n_max < 1 || m.n_max > kMaxNodes) {
    report.push_back({"", "n_max=" + std::to_string(m.n_max) + " outside [1, " + std::to_string(kMaxNodes) + "]"});
    return report;
  }
  if (!m.policy.t || !m.policy.r || !m.policy.s) report.push_back({"", "transition policy is incomplete"});
  if (!m.addition) report.push_back({"", "addition model is missing"});
  if (!m.deletion) report.push_back({"", "deletion model is missing"});
  if (!report.empty()) return report;

  if (m.n_max <= kEnumerationCap) {
    const StateSpace space(m.n_max);
    for (const auto& g : space.graphs()) check_graph(m, g, report);
    return report;
  }

  // Too many graphs to enumerate: inspect the graphs along a seeded trajectory.
  constexpr std::size_t kSpotCheckSteps = 10'000;
  Rng rng(0);
  LabeledGraph g;
  std::vector<LabeledGraph> seen;
  for (std::size_t i = 0; i < kSpotCheckSteps; ++i) {
    if (std::find(seen.begin(), seen.end(), g) == seen.end()) {
      const std::size_t before = report.size();
      check_graph(m, g, report);
      if (report.size() != before) return report;
      if (seen.size() < 4096) seen.push_back(g);
    }
    g = step(m, g, rng).graph;
  }
  return report;
}

StepResult step(const NecModel& m, const LabeledGraph& g, Rng& rng) {
  if (g.node_count() > m.n_max) {
    throw std::invalid_argument("graph " + g.to_string() + " exceeds n_max=" + std::to_string(m.n_max));
  }
  const double u = rng.uniform();
  const double t = m.t(g);
  if (u < t) {
    if (g.node_count() >= m.n_max) throw std::logic_error("addition chosen at n_max; model is invalid");
    return {add_node(g, m.addition->sample(g, rng)), Scheme::Addition, 0};
  }
  if (u < t + m.r(g)) {
    if (g.node_count() == 1) throw std::logic_error("deletion chosen for the single-node graph; model is invalid");
    const int label = m.deletion->sample(g, rng);
    return {delete_node(g, label), Scheme::Deletion, label};
  }
  return {g, Scheme::Same, 0};
}

GraphChain simulate(const NecModel& m, std::size_t length, std::uint64_t seed) {
  if (length == 0) throw std::invalid_argument("chain length must be at least 1");
  GraphChain chain;
  chain.seed = seed;
  chain.n_max = m.n_max;
  chain.states.reserve(length);
  chain.schemes.reserve(length - 1);
  chain.deleted_labels.reserve(length - 1);
  chain.states.emplace_back();
  Rng rng(seed);
  for (std::size_t i = 1; i < length; ++i) {
    auto next = step(m, chain.states.back(), rng);
    chain.schemes.push_back(next.scheme);
    chain.deleted_labels.push_back(next.deleted_label);
    chain.states.push_back(std::move(next.graph));
  }
  return chain;
}

double transition_prob(const NecModel& m, const LabeledGraph& g, const LabeledGraph& g2) {
  check_in_scope(m, g);
  check_in_scope(m, g2);
  const int n = g.node_count();
  const int n2 = g2.node_count();
  if (n2 == n) return g2 == g ? m.s(g) : 0.0;
  if (n2 == n + 1) {
    const double t = m.t(g);
    if (t == 0.0 || delete_node(g2, n2) != g) return 0.0;
    return t * m.addition->pattern_prob(g, newest_node_pattern(g2));
  }
  if (n2 == n - 1) {
    const double r = m.r(g);
    if (r == 0.0) return 0.0;
    double total = 0.0;
    for (int label = 1; label <= n; ++label) {
      if (delete_node(g, label) == g2) total += m.deletion->node_prob(g, label);
    }
    return r * total;
  }
  return 0.0;
}

SparseKernel build_kernel(const NecModel& m, const StateSpace& space) {
  if (space.n_max() != m.n_max) throw std::invalid_argument("state space and model disagree on n_max");
  SparseKernel kernel;
  kernel.rows.resize(space.size());
  for (std::size_t id = 0; id < space.size(); ++id) {
    const auto& g = space.graph(id);
    const int n = g.node_count();
    auto& row = kernel.rows[id];
    if (const double s = m.s(g); s > 0.0) row.emplace_back(id, s);
    if (const double t = m.t(g); t > 0.0 && n < m.n_max) {
      const std::uint64_t count = std::uint64_t{1} << n;
      for (std::uint64_t bits = 0; bits < count; ++bits) {
        const EdgePattern p{n, bits};
        const double w = t * m.addition->pattern_prob(g, p);
        if (w > 0.0) row.emplace_back(space.id(add_node(g, p)), w);
      }
    }
    if (const double r = m.r(g); r > 0.0 && n > 1) {
      for (int label = 1; label <= n; ++label) {
        const double w = r * m.deletion->node_prob(g, label);
        if (w > 0.0) row.emplace_back(space.id(delete_node(g, label)), w);
      }
    }
    std::sort(row.begin(), row.end());
    std::vector<std::pair<std::size_t, double>> merged;
    for (const auto& [col, w] : row) {
      if (!merged.empty() && merged.back().first == col) {
        merged.back().second += w;
      } else {
        merged.emplace_back(col, w);
      }
    }
    row = std::move(merged);
  }
  return kernel;
}

StationaryDistribution power_iteration(const SparseKernel& kernel, const PowerIterationOptions& opts,
                                       std::vector<double> start) {
  const std::size_t size = kernel.size();
  if (size == 0) throw std::invalid_argument("empty kernel");
  std::vector<double> pi = start.empty() ? std::vector<double>(size, 1.0 / static_cast<double>(size)) : std::move(start);
  if (pi.size() != size) throw std::invalid_argument("start vector length does not match kernel");
  std::vector<double> next(size);
  double residual = 0.0;
  for (std::size_t iter = 1; iter <= opts.max_iterations; ++iter) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < size; ++i) {
      const double mass = pi[i];
      if (mass == 0.0) continue;
      for (const auto& [j, w] : kernel.rows[i]) next[j] += mass * w;
    }
    double total = 0.0;
    for (double v : next) total += v;
    residual = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
      next[i] /= total;
      residual += std::abs(next[i] - pi[i]);
    }
    pi.swap(next);
    if (residual < opts.tolerance) return {std::move(pi), Provenance::Numeric, residual, iter};
  }
  throw NumericError("power iteration did not converge after " + std::to_string(opts.max_iterations) +
                     " iterations (residual " + format_prob(residual) + ")");
}

StationaryDistribution stationary_graph_distribution(const NecModel& m, const StateSpace& space,
                                                     const PowerIterationOptions& opts) {
  return power_iteration(build_kernel(m, space), opts);
}

StationaryLookup make_lookup(const StateSpace& space, const StationaryDistribution& pi) {
  if (pi.size() != space.size()) throw std::invalid_argument("distribution length does not match state space");
  std::vector<std::size_t> offsets;
  for (int n = 1; n <= space.n_max(); ++n) offsets.push_back(space.offset(n));
  return [offsets = std::move(offsets), probs = pi.probs](const LabeledGraph& g) {
    const auto n = static_cast<std::size_t>(g.node_count());
    if (n > offsets.size()) return 0.0;
    return probs[offsets[n - 1] + static_cast<std::size_t>(g.bits())];
  };
}

}  // namespace necsim
