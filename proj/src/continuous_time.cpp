#include "necsim/continuous_time.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace necsim {

namespace {

constexpr int kDenseCtmcMaxNodes = 5;

}  // namespace

double expected_dwell(double tau, double s) {
  if (!(tau > 0.0)) throw std::invalid_argument("time quantum must be positive");
  if (!(s >= 0.0 && s < 1.0)) throw std::invalid_argument("same-probability must lie in [0, 1)");
  return tau / (1.0 - s);
}

double same_prob_for_dwell(double tau, double target_dwell) {
  if (!(tau > 0.0)) throw std::invalid_argument("time quantum must be positive");
  if (!(target_dwell > tau)) throw CalibrationError("target dwell must exceed the time quantum");
  return 1.0 - tau / target_dwell;
}

ErnecParams calibrate_s(double tau, const std::vector<double>& target_dwell, const ErnecParams& base) {
  validate_ernec(base);
  if (target_dwell.size() != static_cast<std::size_t>(base.n_max)) {
    throw CalibrationError("expected one target dwell per node count (" + std::to_string(base.n_max) + ")");
  }
  ErnecParams out = base;
  for (int i = 1; i <= base.n_max; ++i) {
    const auto k = static_cast<std::size_t>(i - 1);
    if (!(target_dwell[k] > tau)) {
      throw CalibrationError("target dwell for node count " + std::to_string(i) + " must exceed tau=" +
                             std::to_string(tau));
    }
    const double moving = base.t[k] + base.r[k];
    if (moving == 0.0) {
      throw CalibrationError("node count " + std::to_string(i) + " never changes, so its dwell cannot be calibrated");
    }
    const double s = same_prob_for_dwell(tau, target_dwell[k]);
    out.s[k] = s;
    out.t[k] = base.t[k] / moving * (1.0 - s);
    out.r[k] = 1.0 - s - out.t[k];
  }
  validate_ernec(out);
  return out;
}

DwellRuns dwell_runs(const GraphChain& chain) {
  DwellRuns runs;
  std::size_t start = 0;
  for (std::size_t i = 1; i < chain.size(); ++i) {
    if (chain.states[i] != chain.states[i - 1]) {
      runs.node_counts.push_back(chain.states[start].node_count());
      runs.lengths.push_back(i - start);
      start = i;
    }
  }
  return runs;
}

void RateMatrix::validate(double tol) const {
  const auto n = R.rows();
  if (n == 0 || R.cols() != n) throw std::invalid_argument("rate matrix must be square and non-empty");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(R.row(i).sum()) > tol) {
      throw std::invalid_argument("rate matrix row " + std::to_string(i) + " does not sum to zero");
    }
    if (R(i, i) > 0.0) throw std::invalid_argument("rate matrix diagonal must be non-positive");
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j && R(i, j) < 0.0) throw std::invalid_argument("rate matrix off-diagonals must be non-negative");
    }
  }
}

RateMatrix RateMatrix::from_generator(Eigen::MatrixXd R) {
  RateMatrix out{std::move(R), {}};
  out.lambda = -out.R.diagonal();
  out.validate(1e-12);
  return out;
}

RateFn rate_by_node_count(std::vector<double> rates) {
  for (double v : rates) {
    if (!(v > 0.0)) throw std::invalid_argument("rates must be positive");
  }
  return [rates = std::move(rates)](const LabeledGraph& g) {
    const auto k = static_cast<std::size_t>(g.node_count() - 1);
    if (k >= rates.size()) throw std::out_of_range("no rate configured for node count " + std::to_string(k + 1));
    return rates[k];
  };
}

RateMatrix build_rate_matrix(const NecModel& m, const RateFn& lambda) {
  if (m.n_max > kDenseCtmcMaxNodes) {
    throw std::out_of_range("dense rate matrix limited to n_max <= " + std::to_string(kDenseCtmcMaxNodes));
  }
  const StateSpace space(m.n_max);
  const auto kernel = build_kernel(m, space);
  const auto n = static_cast<Eigen::Index>(space.size());
  RateMatrix out{Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& g = space.graph(static_cast<std::size_t>(i));
    const double rate = lambda(g);
    if (!(rate > 0.0)) throw std::invalid_argument("rate for " + g.to_string() + " must be positive");
    out.lambda(i) = rate;
    const double leave = 1.0 - m.s(g);
    if (leave <= 0.0) continue;  // absorbing only when n_max = 1
    out.R(i, i) = -rate;
    for (const auto& [j, w] : kernel.rows[static_cast<std::size_t>(i)]) {
      if (static_cast<Eigen::Index>(j) != i) out.R(i, static_cast<Eigen::Index>(j)) = rate * w / leave;
    }
  }
  return out;
}

Eigen::MatrixXd transition_matrix_at(const RateMatrix& R, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("time must be non-negative");
  const auto n = R.size();
  const double Lambda = (-R.R.diagonal()).maxCoeff();
  if (t == 0.0 || Lambda <= 0.0) return Eigen::MatrixXd::Identity(n, n);

  const Eigen::MatrixXd U = Eigen::MatrixXd::Identity(n, n) + R.R / Lambda;
  const double mean = Lambda * t;
  const double log_mean = std::log(mean);
  constexpr double kTailMass = 1e-13;
  constexpr std::size_t kMaxTerms = 50'000'000;

  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd result = Eigen::MatrixXd::Zero(n, n);
  double mass = 0.0;
  for (std::size_t k = 0; k < kMaxTerms; ++k) {
    const double kd = static_cast<double>(k);
    const double w = std::exp(-mean + kd * log_mean - std::lgamma(kd + 1.0));
    if (w > 0.0) result += w * power;
    mass += w;
    if (kd > mean && 1.0 - mass < kTailMass) return result;
    power = power * U;
  }
  throw NumericError("uniformization did not reach its truncation bound");
}

StationaryDistribution ctmc_stationary(const RateMatrix& R) {
  const auto n = R.size();
  Eigen::MatrixXd A = R.R.transpose();
  A.row(n - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(n - 1) = 1.0;
  const Eigen::VectorXd x = A.fullPivLu().solve(b);
  const double residual = (x.transpose() * R.R).lpNorm<1>();
  const double scale = std::max(1.0, R.lambda.maxCoeff());
  if (!(residual < 1e-10 * scale) || (x.array() < -1e-14).any()) {
    throw NumericError("CTMC stationary solve failed (residual " + std::to_string(residual) + ")");
  }
  std::vector<double> probs(x.data(), x.data() + n);
  for (double& v : probs) v = std::max(v, 0.0);
  return {std::move(probs), Provenance::Numeric, residual, 1};
}

CtmcTrajectory simulate_ctmc(const NecModel& m, const RateFn& lambda, double horizon, std::uint64_t seed) {
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  CtmcTrajectory traj;
  traj.horizon = horizon;
  Rng rng(seed);
  LabeledGraph g;
  double clock = 0.0;
  while (true) {
    const double rate = lambda(g);
    const double hold = rng.exponential(rate);
    const double t = m.t(g), r = m.r(g);
    if (clock + hold >= horizon || t + r <= 0.0) {
      traj.states.push_back(g);
      traj.holding_times.push_back(horizon - clock);
      return traj;
    }
    traj.states.push_back(g);
    traj.holding_times.push_back(hold);
    clock += hold;
    if (rng.uniform() * (t + r) < t) {
      g = add_node(g, m.addition->sample(g, rng));
    } else {
      g = delete_node(g, m.deletion->sample(g, rng));
    }
  }
}

std::vector<double> occupation_fractions(const CtmcTrajectory& traj, const StateSpace& space) {
  std::vector<double> out(space.size(), 0.0);
  for (std::size_t i = 0; i < traj.states.size(); ++i) out[space.id(traj.states[i])] += traj.holding_times[i];
  for (double& v : out) v /= traj.horizon;
  return out;
}

}  // namespace necsim
