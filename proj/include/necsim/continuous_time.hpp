#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "necsim/ernec.hpp"
#include "necsim/nec_kernel.hpp"

namespace necsim {

class CalibrationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Expected time a graph stays unchanged when each step lasts tau and the
/// Same scheme has probability s: tau / (1 - s).
double expected_dwell(double tau, double s);

/// Same-probability giving the requested expected dwell: 1 - tau / target.
double same_prob_for_dwell(double tau, double target_dwell);

/// Sets s_i = 1 - tau / target_dwell[i-1] and rescales t_i, r_i so their
/// ratio is kept and each row still sums to one.
ErnecParams calibrate_s(double tau, const std::vector<double>& target_dwell, const ErnecParams& base);

/// Lengths (in steps) of maximal runs of identical consecutive states, with
/// the node count of each run. The final run is dropped because it is
/// truncated by the end of the chain.
struct DwellRuns {
  std::vector<int> node_counts;
  std::vector<std::size_t> lengths;
};
DwellRuns dwell_runs(const GraphChain& chain);

/// CTMC generator over an enumerated state space: off-diagonal lambda(i) p_ij,
/// diagonal -lambda(i), where p_ij is the NEC kernel with the Same mass
/// removed and rows renormalized.
struct RateMatrix {
  Eigen::MatrixXd R;
  Eigen::VectorXd lambda;

  Eigen::Index size() const { return R.rows(); }
  /// Checks zero row sums, non-negative off-diagonals and non-positive diagonal.
  void validate(double tol = 1e-12) const;
  static RateMatrix from_generator(Eigen::MatrixXd R);
};

using RateFn = std::function<double(const LabeledGraph&)>;

/// Rates that depend only on node count; rates[i-1] applies to graphs with i nodes.
RateFn rate_by_node_count(std::vector<double> rates);

/// Dense, so limited to n_max <= 5.
RateMatrix build_rate_matrix(const NecModel& m, const RateFn& lambda);

/// e^{Rt} by uniformization: sum_k Poisson(k; Lt) U^k with U = I + R/L and
/// L the largest exit rate. Truncated once the remaining Poisson mass is below 1e-13.
Eigen::MatrixXd transition_matrix_at(const RateMatrix& R, double t);

/// Solves pi R = 0 with sum(pi) = 1.
StationaryDistribution ctmc_stationary(const RateMatrix& R);

struct CtmcTrajectory {
  std::vector<LabeledGraph> states;
  std::vector<double> holding_times;
  double horizon = 0.0;
};

/// Starts from the single-node graph; holds Exp(lambda(g)) in each state and
/// jumps through the NEC kernel conditioned on leaving. The last holding time
/// is cut at the horizon.
CtmcTrajectory simulate_ctmc(const NecModel& m, const RateFn& lambda, double horizon, std::uint64_t seed);

/// Fraction of [0, horizon] spent in each state of `space`.
std::vector<double> occupation_fractions(const CtmcTrajectory& traj, const StateSpace& space);

}  // namespace necsim
