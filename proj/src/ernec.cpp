#include "necsim/ernec.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace necsim {

namespace {

std::string at_count(const char* name, int i) { return std::string(name) + "(" + std::to_string(i) + ")"; }

double xlog2x(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

double binomial(int n, int k) {
  double c = 1.0;
  for (int j = 1; j <= k; ++j) c = c * (n - k + j) / j;
  return c;
}

}  // namespace

void validate_ernec(const ErnecParams& p) {
  if (p.n_max < 1 || p.n_max > kMaxNodes) {
    throw ErnecError("n_max=" + std::to_string(p.n_max) + " outside [1, " + std::to_string(kMaxNodes) + "]");
  }
  if (!(p.q > 0.0 && p.q < 1.0)) {
    throw ErnecError("edge probability q=" + std::to_string(p.q) + " must lie strictly inside (0, 1)");
  }
  const auto n = static_cast<std::size_t>(p.n_max);
  if (p.t.size() != n || p.r.size() != n || p.s.size() != n) {
    throw ErnecError("t, r and s must each have n_max=" + std::to_string(p.n_max) + " entries");
  }
  for (int i = 1; i <= p.n_max; ++i) {
    const double t = p.t_at(i), r = p.r_at(i), s = p.s_at(i);
    if (!(t >= 0.0 && r >= 0.0 && s >= 0.0)) {
      throw ErnecError("scheme probabilities for node count " + std::to_string(i) + " must be non-negative");
    }
    if (std::abs(t + r + s - 1.0) > 1e-12) {
      throw ErnecError(at_count("t", i) + "+" + at_count("r", i) + "+" + at_count("s", i) + " must equal 1");
    }
    if (i == p.n_max && t != 0.0) throw ErnecError(at_count("t", i) + " must be 0 at n_max");
    if (i < p.n_max && !(t > 0.0)) throw ErnecError(at_count("t", i) + " must be positive below n_max");
    if (i == 1 && r != 0.0) throw ErnecError("r(1) must be 0");
    if (i > 1 && !(r > 0.0)) throw ErnecError(at_count("r", i) + " must be positive above one node");
    if (!(s > 0.0)) throw ErnecError(at_count("s", i) + " must be positive");
  }
}

ErnecParams random_ernec_params(int n_max, double q, Rng& rng) {
  if (n_max < 1 || n_max > kMaxNodes) throw ErnecError("n_max outside [1, " + std::to_string(kMaxNodes) + "]");
  ErnecParams p;
  p.n_max = n_max;
  p.q = q;
  const auto n = static_cast<std::size_t>(n_max);
  p.t.assign(n, 0.0);
  p.r.assign(n, 0.0);
  p.s.assign(n, 0.0);
  if (n_max == 1) {
    p.s[0] = 1.0;
    validate_ernec(p);
    return p;
  }
  for (int i = 1; i <= n_max; ++i) {
    const auto k = static_cast<std::size_t>(i - 1);
    if (i == 1 || i == n_max) {
      const double u = rng.uniform();
      (i == 1 ? p.t : p.r)[k] = u;
      p.s[k] = 1.0 - u;
    } else {
      double a = rng.uniform();
      double b = rng.uniform();
      if (a > b) std::swap(a, b);
      p.t[k] = a;
      p.r[k] = b - a;
      p.s[k] = 1.0 - b;
    }
  }
  validate_ernec(p);
  return p;
}

ErnecParams random_ernec_params(int n_max, double q, std::uint64_t seed) {
  Rng rng(seed);
  return random_ernec_params(n_max, q, rng);
}

NecModel make_ernec(const ErnecParams& p) {
  validate_ernec(p);
  NecModel m;
  m.n_max = p.n_max;
  m.policy.t = [t = p.t](const LabeledGraph& g) { return t[static_cast<std::size_t>(g.node_count() - 1)]; };
  m.policy.r = [r = p.r](const LabeledGraph& g) { return r[static_cast<std::size_t>(g.node_count() - 1)]; };
  m.policy.s = [s = p.s](const LabeledGraph& g) { return s[static_cast<std::size_t>(g.node_count() - 1)]; };
  m.addition = std::make_shared<ErdosRenyiAddition>(p.q);
  m.deletion = std::make_shared<UniformDeletion>();
  return m;
}

Eigen::MatrixXd node_count_matrix(const ErnecParams& p) {
  validate_ernec(p);
  const int n = p.n_max;
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i <= n; ++i) {
    P(i - 1, i - 1) = p.s_at(i);
    if (i < n) P(i - 1, i) = p.t_at(i);
    if (i > 1) P(i - 1, i - 2) = p.r_at(i);
  }
  return P;
}

StationaryDistribution node_stationary_analytic(const ErnecParams& p) {
  validate_ernec(p);
  std::vector<double> pi(static_cast<std::size_t>(p.n_max));
  pi[0] = 1.0;
  for (int i = 2; i <= p.n_max; ++i) {
    pi[static_cast<std::size_t>(i - 1)] = pi[static_cast<std::size_t>(i - 2)] * p.t_at(i - 1) / p.r_at(i);
  }
  double total = 0.0;
  for (double v : pi) total += v;
  for (double& v : pi) v /= total;
  return {std::move(pi), Provenance::Analytic, 0.0, 0};
}

StationaryDistribution node_stationary_numeric(const ErnecParams& p) {
  const Eigen::MatrixXd P = node_count_matrix(p);
  const int n = p.n_max;
  // Rows of (P^T - I) are the balance equations; one is redundant and is
  // replaced by the normalization.
  Eigen::MatrixXd A = P.transpose() - Eigen::MatrixXd::Identity(n, n);
  A.row(n - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(n - 1) = 1.0;
  const Eigen::VectorXd x = A.fullPivLu().solve(b);
  const double residual = (x.transpose() * P - x.transpose()).lpNorm<1>();
  if (!(residual < 1e-12) || (x.array() < 0.0).any()) {
    throw NumericError("node-count stationary solve failed (residual " + std::to_string(residual) + ")");
  }
  return {std::vector<double>(x.data(), x.data() + n), Provenance::Numeric, residual, 1};
}

double graph_stationary_prob(const ErnecParams& p, const StationaryDistribution& node_pi, const LabeledGraph& g) {
  const int N = g.node_count();
  if (N > p.n_max) return 0.0;
  const int E = g.edge_count();
  const auto pairs = static_cast<int>(pair_count(N));
  return node_pi[static_cast<std::size_t>(N - 1)] * std::pow(p.q, E) * std::pow(1.0 - p.q, pairs - E);
}

double graph_stationary_prob(const ErnecParams& p, const LabeledGraph& g) {
  return graph_stationary_prob(p, node_stationary_analytic(p), g);
}

double ernec_entropy_rate(const ErnecParams& p) {
  const auto pi = node_stationary_analytic(p);
  const double q = p.q;
  double scheme = 0.0, addition = 0.0, deletion = 0.0;
  for (int i = 1; i <= p.n_max; ++i) {
    const double w = pi[static_cast<std::size_t>(i - 1)];
    scheme -= w * (xlog2x(p.t_at(i)) + xlog2x(p.r_at(i)) + xlog2x(p.s_at(i)));
    if (i < p.n_max) {
      double inner = 0.0;
      for (int j = 0; j <= i; ++j) {
        const double pattern = std::pow(q, j) * std::pow(1.0 - q, i - j);
        inner += binomial(i, j) * pattern * std::log2(pattern);
      }
      addition -= w * p.t_at(i) * inner;
    }
    if (i > 1) deletion += w * p.r_at(i) * std::log2(static_cast<double>(i));
  }
  return scheme + addition + deletion;
}

double node_count_entropy_rate(const ErnecParams& p) {
  const auto pi = node_stationary_analytic(p);
  double h = 0.0;
  for (int i = 1; i <= p.n_max; ++i) {
    h -= pi[static_cast<std::size_t>(i - 1)] * (xlog2x(p.t_at(i)) + xlog2x(p.r_at(i)) + xlog2x(p.s_at(i)));
  }
  return h;
}

StationaryLookup ernec_lookup(const ErnecParams& p) {
  return [p, pi = node_stationary_analytic(p)](const LabeledGraph& g) { return graph_stationary_prob(p, pi, g); };
}

}  // namespace necsim
