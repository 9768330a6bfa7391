#include <doctest.h>

#include <limits>

#include "necsim/entropy_analysis.hpp"
#include "necsim/ernec.hpp"
#include "necsim/rng.hpp"
#include "oracles.hpp"

using namespace necsim;

namespace {

// 1:0 -A-> 2:1 -S-> 2:1 -D(2)-> 1:0 in the two-node example.
GraphChain hand_chain() {
  GraphChain c;
  c.n_max = 2;
  c.states = {LabeledGraph(), LabeledGraph::parse("2:1"), LabeledGraph::parse("2:1"), LabeledGraph()};
  c.schemes = {Scheme::Addition, Scheme::Same, Scheme::Deletion};
  c.deleted_labels = {0, 0, 2};
  return c;
}

}  // namespace

TEST_CASE("deletion collisions in the two-node example") {
  const auto p = oracle::two_node_example();
  const auto m = make_ernec(p);
  const StateSpace space(2);
  const auto pi = stationary_graph_distribution(m, space);
  // pi = (1/2, 1/4, 1/4); the 2-node rows lose one bit of label entropy.
  CHECK(pi[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(formula_entropy_rate(m, space, pi) == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(kernel_entropy_rate(m) == doctest::Approx(1.25).epsilon(1e-9));
  CHECK(deletion_collision_gap(m, space, pi) == doctest::Approx(0.25).epsilon(1e-9));
  const auto report = entropy_report(m);
  CHECK(report.gap == doctest::Approx(0.25).epsilon(1e-9));
  CHECK_FALSE(report.empirical_rate.has_value());
}

TEST_CASE("kernel rate equals the dense Markov entropy rate") {
  for (int n_max = 1; n_max <= 4; ++n_max) {
    const auto p = random_ernec_params(n_max, 0.65, 40 + n_max);
    const auto dense = oracle::dense_ernec(p);
    CHECK(kernel_entropy_rate(make_ernec(p)) ==
          doctest::Approx(oracle::markov_entropy_rate(dense.P, dense.pi)).epsilon(1e-9));
  }
}

TEST_CASE("formula rate matches the closed form and exceeds the kernel rate by the collision gap") {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const int n_max = 1 + static_cast<int>(rng.uniform() * 5);
    const auto p = random_ernec_params(n_max, 0.1 + 0.8 * rng.uniform(), rng);
    const auto m = make_ernec(p);
    const StateSpace space(n_max);
    const auto pi = stationary_graph_distribution(m, space);
    const double formula = formula_entropy_rate(m, space, pi);
    const double kernel = kernel_entropy_rate(build_kernel(m, space), pi);
    CHECK(formula == doctest::Approx(ernec_entropy_rate(p)).epsilon(1e-9));
    CHECK(formula - kernel == doctest::Approx(deletion_collision_gap(m, space, pi)).epsilon(1e-9));
    if (n_max >= 2) CHECK(formula - kernel > 0.0);
  }
}

TEST_CASE("chain log-probabilities in both scoring modes") {
  const auto p = oracle::two_node_example();
  const auto m = make_ernec(p);
  const auto lookup = ernec_lookup(p);
  const auto chain = hand_chain();

  const auto graph = empirical_entropy_rate(m, chain, ChainMode::GraphKernel, lookup);
  // log2 of 1/2 * 1/4 * 1/2 * 1/2.
  CHECK(graph.log2_prob == doctest::Approx(-5.0));
  CHECK(graph.rate == doctest::Approx(1.25));
  REQUIRE(graph.prefix.size() == 4);
  CHECK(graph.prefix[0] == doctest::Approx(1.0));
  CHECK(graph.prefix[1] == doctest::Approx(1.5));
  CHECK(graph.prefix[2] == doctest::Approx(4.0 / 3.0));

  // The deletion names one of two labels, costing one more bit.
  const auto labeled = chain_log_prob(m, chain, ChainMode::LabeledPath, lookup);
  CHECK(labeled.finite());
  CHECK(labeled.log2_prob == doctest::Approx(-6.0));

  auto bare = chain;
  bare.schemes.clear();
  bare.deleted_labels.clear();
  CHECK_THROWS_AS(chain_log_prob(m, bare, ChainMode::LabeledPath, lookup), std::invalid_argument);
  CHECK(chain_log_prob(m, bare, ChainMode::GraphKernel, lookup).log2_prob == doctest::Approx(-5.0));
}

TEST_CASE("impossible moves give minus infinity and the failing index") {
  const auto p = random_ernec_params(3, 0.5, 1);
  const auto m = make_ernec(p);
  GraphChain c;
  c.n_max = 3;
  c.states = {LabeledGraph(), LabeledGraph::parse("2:0"), LabeledGraph::parse("3:7")};
  const auto r = chain_log_prob(m, c, ChainMode::GraphKernel, ernec_lookup(p));
  CHECK_FALSE(r.finite());
  CHECK(r.zero_step == 1u);
  CHECK(r.log2_prob == -std::numeric_limits<double>::infinity());
  const auto e = empirical_entropy_rate(m, c, ChainMode::GraphKernel, ernec_lookup(p));
  CHECK(std::isfinite(e.prefix[1]));
  CHECK(std::isinf(e.prefix[2]));
}

TEST_CASE("empirical rate of a long chain approaches the exact rates") {
  const auto p = random_ernec_params(4, 0.7, 3);
  const auto m = make_ernec(p);
  const auto chain = simulate(m, 100000, 11);
  const auto lookup = ernec_lookup(p);
  CHECK(std::abs(empirical_entropy_rate(m, chain, ChainMode::LabeledPath, lookup).rate - ernec_entropy_rate(p)) < 0.05);
  CHECK(std::abs(empirical_entropy_rate(m, chain, ChainMode::GraphKernel, lookup).rate - kernel_entropy_rate(m)) < 0.05);
  const auto report = entropy_report(m, &chain, ChainMode::GraphKernel);
  CHECK(report.chain_length == chain.size());
  REQUIRE(report.empirical_rate.has_value());
  CHECK(std::abs(*report.empirical_rate - report.kernel_rate) < 0.05);
}

TEST_CASE("typical-set membership uses a closed band") {
  const auto in = typicality_test(2.0, 2.25, 0.25, 100);
  CHECK(in.typical);
  CHECK(in.margin == 0.0);
  CHECK(in.log2_lower == doctest::Approx(-225.0));
  CHECK(in.log2_upper == doctest::Approx(-175.0));
  CHECK(typicality_test(2.0, 1.75, 0.25).typical);
  const auto out = typicality_test(2.0, 2.0501, 0.05);
  CHECK_FALSE(out.typical);
  CHECK(out.margin < 0.0);
  CHECK_FALSE(typicality_test(2.0, -std::numeric_limits<double>::infinity(), 0.05).typical);
  CHECK_THROWS_AS(typicality_test(2.0, 2.0, 0.0), std::invalid_argument);
}

TEST_CASE("chain mode names") {
  CHECK(parse_chain_mode("graph-kernel") == ChainMode::GraphKernel);
  CHECK(parse_chain_mode("labeled-path") == ChainMode::LabeledPath);
  CHECK(to_string(ChainMode::LabeledPath) == "labeled-path");
  CHECK_THROWS_AS(parse_chain_mode("labelled"), std::invalid_argument);
}
