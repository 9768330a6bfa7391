#include "necsim/entropy_analysis.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace necsim {

namespace {

double xlog2x(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

void check_pi(const StateSpace& space, const StationaryDistribution& pi) {
  if (pi.size() != space.size()) {
    throw std::invalid_argument("stationary distribution has " + std::to_string(pi.size()) +
                                " entries but the state space has " + std::to_string(space.size()));
  }
}

/// Probability of the recorded move states[i] -> states[i+1] without merging
/// deletions that collide.
double labeled_step_prob(const NecModel& m, const GraphChain& chain, std::size_t i) {
  const auto& g = chain.states[i];
  const auto& next = chain.states[i + 1];
  switch (chain.schemes[i]) {
    case Scheme::Same:
      return next == g ? m.s(g) : 0.0;
    case Scheme::Addition:
      if (next.node_count() != g.node_count() + 1 || g.node_count() >= m.n_max) return 0.0;
      if (delete_node(next, next.node_count()) != g) return 0.0;
      return m.t(g) * m.addition->pattern_prob(g, newest_node_pattern(next));
    case Scheme::Deletion: {
      const int label = i < chain.deleted_labels.size() ? chain.deleted_labels[i] : 0;
      if (label < 1 || label > g.node_count()) {
        throw std::invalid_argument("labeled-path scoring needs the deleted label of step " + std::to_string(i));
      }
      if (g.node_count() == 1 || delete_node(g, label) != next) return 0.0;
      return m.r(g) * m.deletion->node_prob(g, label);
    }
  }
  return 0.0;
}

template <typename StepLog>
EmpiricalRate accumulate(const GraphChain& chain, const StationaryLookup& stationary, StepLog&& step_log) {
  EmpiricalRate out;
  out.prefix.reserve(chain.size());
  double total = std::log2(stationary(chain.states.front()));
  if (!std::isfinite(total)) {
    throw std::invalid_argument("initial graph has zero stationary probability");
  }
  out.prefix.push_back(-total);
  const double inf = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    if (!out.zero_step) {
      const double lp = step_log(i);
      if (std::isfinite(lp)) {
        total += lp;
      } else {
        out.zero_step = i;
        total = -inf;
      }
    }
    out.prefix.push_back(-total / static_cast<double>(i + 2));
  }
  out.rate = out.prefix.back();
  out.log2_prob = total;
  return out;
}

}  // namespace

std::string to_string(ChainMode mode) {
  return mode == ChainMode::GraphKernel ? "graph-kernel" : "labeled-path";
}

ChainMode parse_chain_mode(std::string_view text) {
  if (text == "graph-kernel") return ChainMode::GraphKernel;
  if (text == "labeled-path") return ChainMode::LabeledPath;
  throw std::invalid_argument("unknown mode '" + std::string(text) + "' (expected graph-kernel or labeled-path)");
}

double formula_entropy_rate(const NecModel& m, const StateSpace& space, const StationaryDistribution& pi) {
  check_pi(space, pi);
  double h = 0.0;
  for (std::size_t id = 0; id < space.size(); ++id) {
    const double w = pi[id];
    if (w == 0.0) continue;
    const auto& g = space.graph(id);
    const double t = m.t(g), r = m.r(g), s = m.s(g);
    h -= w * (xlog2x(t) + xlog2x(r) + xlog2x(s));
    if (t > 0.0) h += w * t * m.addition->pattern_entropy(g);
    if (r > 0.0) h += w * r * m.deletion->label_entropy(g);
  }
  return h;
}

double kernel_entropy_rate(const SparseKernel& kernel, const StationaryDistribution& pi) {
  if (pi.size() != kernel.size()) throw std::invalid_argument("distribution length does not match kernel");
  double h = 0.0;
  for (std::size_t i = 0; i < kernel.size(); ++i) {
    double row = 0.0;
    for (const auto& [j, w] : kernel.rows[i]) row -= xlog2x(w);
    h += pi[i] * row;
  }
  return h;
}

double kernel_entropy_rate(const NecModel& m) {
  const StateSpace space(m.n_max);
  const auto kernel = build_kernel(m, space);
  return kernel_entropy_rate(kernel, power_iteration(kernel));
}

double deletion_collision_gap(const NecModel& m, const StateSpace& space, const StationaryDistribution& pi) {
  check_pi(space, pi);
  double gap = 0.0;
  for (std::size_t id = 0; id < space.size(); ++id) {
    const auto& g = space.graph(id);
    const double r = m.r(g);
    if (pi[id] == 0.0 || r == 0.0) continue;
    std::map<LabeledGraph, double> outcomes;
    for (int label = 1; label <= g.node_count(); ++label) {
      outcomes[delete_node(g, label)] += m.deletion->node_prob(g, label);
    }
    double outcome_entropy = 0.0;
    for (const auto& [graph, p] : outcomes) outcome_entropy -= xlog2x(p);
    gap += pi[id] * r * (m.deletion->label_entropy(g) - outcome_entropy);
  }
  return gap;
}

ChainLogProb chain_log_prob(const NecModel& m, const GraphChain& chain, ChainMode mode,
                            const StationaryLookup& stationary) {
  if (chain.size() == 0) throw std::invalid_argument("empty chain");
  if (mode == ChainMode::LabeledPath && !chain.has_schemes()) {
    throw std::invalid_argument("labeled-path scoring requires scheme annotations");
  }
  const auto series = empirical_entropy_rate(m, chain, mode, stationary);
  ChainLogProb out;
  out.zero_step = series.zero_step;
  out.log2_prob = series.log2_prob;
  return out;
}

EmpiricalRate empirical_entropy_rate(const NecModel& m, const GraphChain& chain, ChainMode mode,
                                     const StationaryLookup& stationary) {
  if (chain.size() == 0) throw std::invalid_argument("empty chain");
  if (mode == ChainMode::GraphKernel) {
    return accumulate(chain, stationary, [&](std::size_t i) {
      return std::log2(transition_prob(m, chain.states[i], chain.states[i + 1]));
    });
  }
  if (!chain.has_schemes()) throw std::invalid_argument("labeled-path scoring requires scheme annotations");
  return accumulate(chain, stationary, [&](std::size_t i) { return std::log2(labeled_step_prob(m, chain, i)); });
}

EntropyReport entropy_report(const NecModel& m, const GraphChain* chain, ChainMode mode) {
  const StateSpace space(m.n_max);
  const auto kernel = build_kernel(m, space);
  const auto pi = power_iteration(kernel);
  EntropyReport report;
  report.formula_rate = formula_entropy_rate(m, space, pi);
  report.kernel_rate = kernel_entropy_rate(kernel, pi);
  report.gap = report.formula_rate - report.kernel_rate;
  report.mode = mode;
  if (chain != nullptr) {
    report.empirical_rate = empirical_entropy_rate(m, *chain, mode, make_lookup(space, pi)).rate;
    report.chain_length = chain->size();
  }
  return report;
}

TypicalityVerdict typicality_test(double entropy_rate, double neg_log_prob_per_symbol, double epsilon,
                                  std::size_t length) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  TypicalityVerdict v;
  v.epsilon = epsilon;
  v.entropy_rate = entropy_rate;
  v.neg_log_prob_per_symbol = neg_log_prob_per_symbol;
  v.length = length;
  const auto n = static_cast<double>(length);
  v.log2_lower = -n * (entropy_rate + epsilon);
  v.log2_upper = -n * (entropy_rate - epsilon);
  v.margin = epsilon - std::abs(neg_log_prob_per_symbol - entropy_rate);
  v.typical = entropy_rate - epsilon <= neg_log_prob_per_symbol && neg_log_prob_per_symbol <= entropy_rate + epsilon;
  return v;
}

}  // namespace necsim
