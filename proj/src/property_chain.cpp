#include "necsim/property_chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace necsim {

namespace {

constexpr int kDenseHmmMaxNodes = 5;

int choose(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long c = 1;
  for (int j = 1; j <= k; ++j) c = c * (n - k + j) / j;
  return static_cast<int>(c);
}

void check_symbols(std::span<const int> symbols, int k) {
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    if (symbols[i] < 0 || symbols[i] >= k) {
      throw std::invalid_argument("symbol " + std::to_string(symbols[i]) + " at position " + std::to_string(i) +
                                  " outside [0, " + std::to_string(k) + ")");
    }
  }
}

void normalize_rows(Eigen::MatrixXd& M) {
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    const double total = M.row(i).sum();
    if (total > 0.0) {
      M.row(i) /= total;
    } else {
      M.row(i).setConstant(1.0 / static_cast<double>(M.cols()));
    }
  }
}

/// Scaled forward pass keeping every normalized alpha (needed by Baum-Welch).
/// Returns false if the sequence is impossible.
bool forward_scaled(const Hmm& h, std::span<const int> symbols, Eigen::MatrixXd& alpha, Eigen::VectorXd& scale) {
  const auto n = static_cast<Eigen::Index>(symbols.size());
  alpha.resize(n, h.states());
  scale.resize(n);
  Eigen::VectorXd a = h.initial.cwiseProduct(h.emit.col(symbols[0]));
  for (Eigen::Index t = 0; t < n; ++t) {
    if (t > 0) a = (alpha.row(t - 1) * h.trans).transpose().cwiseProduct(h.emit.col(symbols[t]));
    const double c = a.sum();
    if (!(c > 0.0)) return false;
    scale(t) = c;
    alpha.row(t) = a.transpose() / c;
  }
  return true;
}

}  // namespace

PropertyFn node_count_property() {
  return {"node-count", [](const LabeledGraph& g) { return g.node_count(); }, [](int n_max) { return n_max; }};
}

PropertyFn edge_count_property() {
  return {"edge-count", [](const LabeledGraph& g) { return g.edge_count(); },
          [](int n_max) { return static_cast<int>(pair_count(n_max)); }};
}

PropertyFn triangle_count_property() {
  return {"triangle-count", [](const LabeledGraph& g) { return triangle_count(g); },
          [](int n_max) { return choose(n_max, 3); }};
}

PropertyFn constant_property(int value) {
  if (value < 0) throw std::invalid_argument("property symbols must be non-negative");
  return {"constant", [value](const LabeledGraph&) { return value; }, [value](int) { return value; }};
}

PropertyFn state_id_property(int n_max) {
  auto space = std::make_shared<const StateSpace>(n_max);
  return {"state-id", [space](const LabeledGraph& g) { return static_cast<int>(space->id(g)); },
          [space](int) { return static_cast<int>(space->size()) - 1; }};
}

PropertyFn property_by_name(const std::string& name) {
  if (name == "node-count") return node_count_property();
  if (name == "edge-count") return edge_count_property();
  if (name == "triangle-count") return triangle_count_property();
  if (name == "constant") return constant_property();
  throw std::invalid_argument("unknown property '" + name +
                              "' (expected node-count, edge-count, triangle-count or constant)");
}

PropertyChainData extract_npc(const GraphChain& chain, const PropertyFn& f) {
  PropertyChainData out;
  out.property = f.name;
  out.symbols.reserve(chain.size());
  for (const auto& g : chain.states) out.symbols.push_back(f(g));
  return out;
}

void Hmm::validate(double tol) const {
  const auto m = trans.rows();
  if (m == 0 || trans.cols() != m || initial.size() != m || emit.rows() != m || emit.cols() == 0) {
    throw std::invalid_argument("inconsistent HMM dimensions");
  }
  if ((trans.array() < 0.0).any() || (emit.array() < 0.0).any() || (initial.array() < 0.0).any()) {
    throw std::invalid_argument("HMM has negative probabilities");
  }
  if (std::abs(initial.sum() - 1.0) > tol) throw std::invalid_argument("HMM initial distribution does not sum to 1");
  for (Eigen::Index i = 0; i < m; ++i) {
    if (std::abs(trans.row(i).sum() - 1.0) > tol) {
      throw std::invalid_argument("HMM transition row " + std::to_string(i) + " does not sum to 1");
    }
    if (std::abs(emit.row(i).sum() - 1.0) > tol) {
      throw std::invalid_argument("HMM emission row " + std::to_string(i) + " does not sum to 1");
    }
  }
}

Hmm build_full_hmm(const NecModel& m, const PropertyFn& f) {
  if (m.n_max > kDenseHmmMaxNodes) {
    throw std::out_of_range("full graph HMM is dense and limited to n_max <= " + std::to_string(kDenseHmmMaxNodes));
  }
  const StateSpace space(m.n_max);
  const auto kernel = build_kernel(m, space);
  const auto pi = power_iteration(kernel);
  const auto size = static_cast<Eigen::Index>(space.size());
  Hmm h;
  h.initial = Eigen::Map<const Eigen::VectorXd>(pi.probs.data(), size);
  h.trans = Eigen::MatrixXd::Zero(size, size);
  for (Eigen::Index i = 0; i < size; ++i) {
    for (const auto& [j, w] : kernel.rows[static_cast<std::size_t>(i)]) h.trans(i, static_cast<Eigen::Index>(j)) = w;
  }
  h.emit = Eigen::MatrixXd::Zero(size, f.symbol_count(m.n_max));
  for (Eigen::Index i = 0; i < size; ++i) {
    const int y = f(space.graph(static_cast<std::size_t>(i)));
    if (y < 0 || y >= h.emit.cols()) throw std::out_of_range("property value outside its declared codomain");
    h.emit(i, y) = 1.0;
  }
  return h;
}

Hmm build_reduced_hmm(const ErnecParams& p, const PropertyFn& f, EmissionWeighting weighting) {
  validate_ernec(p);
  if (p.n_max > kEnumerationCap) {
    throw std::out_of_range("exact reduced-HMM emissions enumerate every graph; n_max must be <= " +
                            std::to_string(kEnumerationCap));
  }
  const auto pi = node_stationary_analytic(p);
  Hmm h;
  h.initial = Eigen::Map<const Eigen::VectorXd>(pi.probs.data(), p.n_max);
  h.trans = node_count_matrix(p);
  h.emit = Eigen::MatrixXd::Zero(p.n_max, f.symbol_count(p.n_max));
  for (int n = 1; n <= p.n_max; ++n) {
    const std::size_t pairs = pair_count(n);
    const std::uint64_t count = std::uint64_t{1} << pairs;
    for (std::uint64_t bits = 0; bits < count; ++bits) {
      const auto g = LabeledGraph::from_bits(n, bits);
      const int y = f(g);
      if (y < 0 || y >= h.emit.cols()) throw std::out_of_range("property value outside its declared codomain");
      const int e = g.edge_count();
      const double w = weighting == EmissionWeighting::Uniform
                           ? 1.0 / static_cast<double>(count)
                           : std::pow(p.q, e) * std::pow(1.0 - p.q, static_cast<double>(pairs) - e);
      h.emit(n - 1, y) += w;
    }
  }
  return h;
}

ForwardResult forward(const Hmm& h, std::span<const int> symbols) {
  if (symbols.empty()) throw std::invalid_argument("empty symbol sequence");
  check_symbols(symbols, h.symbols());
  ForwardResult out;
  out.prefix_log2.reserve(symbols.size());
  Eigen::VectorXd a = h.initial.cwiseProduct(h.emit.col(symbols[0]));
  Eigen::VectorXd next(h.states());
  double total = 0.0;
  for (std::size_t t = 0; t < symbols.size(); ++t) {
    if (t > 0) {
      next.noalias() = h.trans.transpose() * a;
      a = next.cwiseProduct(h.emit.col(symbols[t]));
    }
    const double c = a.sum();
    if (!(c > 0.0)) {
      out.zero_step = t;
      out.log2_prob = -std::numeric_limits<double>::infinity();
      out.prefix_log2.resize(symbols.size(), out.log2_prob);
      return out;
    }
    a /= c;
    total += std::log2(c);
    out.prefix_log2.push_back(total);
  }
  out.log2_prob = total;
  return out;
}

double forward_log_prob(const Hmm& h, std::span<const int> symbols) { return forward(h, symbols).log2_prob; }

Hmm estimate_hmm_supervised(std::span<const int> symbols, std::span<const int> hidden, int m, int k) {
  if (symbols.empty()) throw std::invalid_argument("cannot estimate an HMM from an empty sequence");
  if (symbols.size() != hidden.size()) throw std::invalid_argument("symbol and hidden-state sequences differ in length");
  if (m < 1 || k < 1) throw std::invalid_argument("HMM needs at least one state and one symbol");
  check_symbols(symbols, k);
  for (int x : hidden) {
    if (x < 0 || x >= m) throw std::invalid_argument("hidden state " + std::to_string(x) + " outside [0, m)");
  }
  Hmm h;
  h.initial = Eigen::VectorXd::Zero(m);
  h.trans = Eigen::MatrixXd::Zero(m, m);
  h.emit = Eigen::MatrixXd::Zero(m, k);
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    h.initial(hidden[i]) += 1.0;
    h.emit(hidden[i], symbols[i]) += 1.0;
    if (i + 1 < symbols.size()) h.trans(hidden[i], hidden[i + 1]) += 1.0;
  }
  h.initial /= h.initial.sum();
  normalize_rows(h.trans);
  normalize_rows(h.emit);
  return h;
}

BaumWelchResult baum_welch(std::span<const int> symbols, Hmm start, const BaumWelchOptions& opts) {
  if (symbols.empty()) throw std::invalid_argument("cannot estimate an HMM from an empty sequence");
  start.validate(1e-9);
  check_symbols(symbols, start.symbols());
  const auto n = static_cast<Eigen::Index>(symbols.size());
  const int m = start.states();
  BaumWelchResult out{std::move(start), {}, 0, false};
  Hmm& h = out.hmm;

  Eigen::MatrixXd alpha, beta(n, m);
  Eigen::VectorXd scale;
  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    if (!forward_scaled(h, symbols, alpha, scale)) {
      throw std::invalid_argument("symbol sequence has zero probability under the starting HMM");
    }
    const double ll = scale.array().log().sum() / std::log(2.0);
    if (!out.log_likelihood.empty()) {
      const double prev = out.log_likelihood.back();
      if (ll - prev <= opts.tolerance * std::abs(prev)) {
        out.log_likelihood.push_back(ll);
        out.converged = true;
        break;
      }
    }
    out.log_likelihood.push_back(ll);

    beta.row(n - 1).setOnes();
    for (Eigen::Index t = n - 1; t > 0; --t) {
      const Eigen::VectorXd weighted = h.emit.col(symbols[t]).cwiseProduct(beta.row(t).transpose());
      beta.row(t - 1) = (h.trans * weighted).transpose() / scale(t);
    }

    Eigen::VectorXd gamma_first = alpha.row(0).cwiseProduct(beta.row(0)).transpose();
    Eigen::MatrixXd trans_num = Eigen::MatrixXd::Zero(m, m);
    Eigen::MatrixXd emit_num = Eigen::MatrixXd::Zero(m, h.symbols());
    for (Eigen::Index t = 0; t < n; ++t) {
      const Eigen::RowVectorXd gamma = alpha.row(t).cwiseProduct(beta.row(t));
      emit_num.col(symbols[t]) += gamma.transpose() / gamma.sum();
      if (t + 1 < n) {
        const Eigen::RowVectorXd weighted =
            h.emit.col(symbols[t + 1]).cwiseProduct(beta.row(t + 1).transpose()).transpose();
        trans_num += (alpha.row(t).transpose() * weighted).cwiseProduct(h.trans) / scale(t + 1);
      }
    }
    h.initial = gamma_first / gamma_first.sum();
    for (int i = 0; i < m; ++i) {
      if (trans_num.row(i).sum() > 0.0) h.trans.row(i) = trans_num.row(i) / trans_num.row(i).sum();
      if (emit_num.row(i).sum() > 0.0) h.emit.row(i) = emit_num.row(i) / emit_num.row(i).sum();
    }
    out.iterations = iter + 1;
  }
  if (!out.converged) {
    forward_scaled(h, symbols, alpha, scale);
    out.log_likelihood.push_back(scale.array().log().sum() / std::log(2.0));
  }
  return out;
}

BaumWelchResult baum_welch(std::span<const int> symbols, int m, int k, const BaumWelchOptions& opts) {
  if (m < 1 || k < 1) throw std::invalid_argument("HMM needs at least one state and one symbol");
  Rng rng(opts.seed);
  auto jittered = [&](int rows, int cols) {
    Eigen::MatrixXd M(rows, cols);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) M(i, j) = 1.0 + opts.jitter * rng.uniform();
    }
    normalize_rows(M);
    return M;
  };
  Hmm start;
  start.trans = jittered(m, m);
  start.emit = jittered(m, k);
  start.initial = jittered(1, m).row(0).transpose();
  return baum_welch(symbols, std::move(start), opts);
}

Hmm estimate_hmm(std::span<const int> symbols, std::optional<std::span<const int>> hidden, int m, int k,
                 const BaumWelchOptions& opts) {
  if (symbols.empty()) throw std::invalid_argument("cannot estimate an HMM from an empty sequence");
  if (hidden) return estimate_hmm_supervised(symbols, *hidden, m, k);
  return baum_welch(symbols, m, k, opts).hmm;
}

NpcEntropyEstimate npc_entropy_pipeline(const ErnecParams& p, const PropertyFn& f, std::size_t length,
                                        std::uint64_t seed, const NpcPipelineOptions& opts) {
  return npc_entropy_pipeline(p, f, simulate(make_ernec(p), length, seed), opts);
}

NpcEntropyEstimate npc_entropy_pipeline(const ErnecParams& p, const PropertyFn& f, const GraphChain& chain,
                                        const NpcPipelineOptions& opts) {
  if (!(opts.burn_in >= 0.0 && opts.burn_in <= 0.5)) throw std::invalid_argument("burn-in fraction must lie in [0, 0.5]");
  validate_ernec(p);
  const std::size_t length = chain.size();
  if (length == 0) throw std::invalid_argument("empty chain");
  const auto npc = extract_npc(chain, f);

  auto first = static_cast<std::size_t>(opts.burn_in * static_cast<double>(length));
  if (opts.window > 0 && length - first > opts.window) first = length - opts.window;
  if (first >= length) throw std::invalid_argument("no samples left after burn-in");

  std::vector<int> symbols(npc.symbols.begin() + static_cast<std::ptrdiff_t>(first), npc.symbols.end());
  std::vector<int> hidden;
  hidden.reserve(symbols.size());
  for (std::size_t i = first; i < length; ++i) hidden.push_back(chain.states[i].node_count() - 1);

  const int k = f.symbol_count(p.n_max);
  Hmm h;
  if (opts.exact_emissions) {
    h = build_reduced_hmm(p, f, opts.weighting);
  } else {
    h.emit = estimate_hmm_supervised(symbols, hidden, p.n_max, k).emit;
    const auto pi = node_stationary_analytic(p);
    h.initial = Eigen::Map<const Eigen::VectorXd>(pi.probs.data(), p.n_max);
    h.trans = node_count_matrix(p);
  }

  const auto fw = forward(h, symbols);
  NpcEntropyEstimate out;
  out.samples = symbols.size();
  out.prefix.reserve(symbols.size());
  for (std::size_t i = 0; i < fw.prefix_log2.size(); ++i) {
    out.prefix.push_back(-fw.prefix_log2[i] / static_cast<double>(i + 1));
  }
  out.rate = out.prefix.back();
  out.hmm = std::move(h);
  return out;
}

}  // namespace necsim
