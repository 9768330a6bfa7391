#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "necsim/chain_io.hpp"
#include "necsim/continuous_time.hpp"
#include "necsim/entropy_analysis.hpp"
#include "necsim/ernec.hpp"
#include "necsim/experiment.hpp"
#include "necsim/property_chain.hpp"
#include "necsim/rng.hpp"

namespace py = pybind11;
using namespace necsim;

namespace {

std::string schemes_string(const GraphChain& c) {
  std::string out;
  out.reserve(c.schemes.size());
  for (auto s : c.schemes) out.push_back(scheme_code(s));
  return out;
}

PropertyFn as_property(const py::object& f) {
  if (py::isinstance<py::str>(f)) return property_by_name(f.cast<std::string>());
  return f.cast<PropertyFn>();
}

std::string run_json(const std::string& config_text) {
  ExperimentConfig c;
  apply_json(c, nlohmann::json::parse(config_text));
  return run(c).to_json().dump();
}

void export_graphs(py::module_& m) {
  py::class_<LabeledGraph>(m, "LabeledGraph")
      .def(py::init<>())
      .def(py::init<int>(), py::arg("n"))
      .def_static("parse", &LabeledGraph::parse, py::arg("text"))
      .def_static(
          "from_edges",
          [](int n, const std::vector<std::pair<int, int>>& edges) { return LabeledGraph::from_edges(n, edges); },
          py::arg("n"), py::arg("edges"))
      .def_static("from_bits", &LabeledGraph::from_bits, py::arg("n"), py::arg("bits"))
      .def_property_readonly("node_count", &LabeledGraph::node_count)
      .def_property_readonly("edge_count", &LabeledGraph::edge_count)
      .def("has_edge", &LabeledGraph::has_edge, py::arg("i"), py::arg("j"))
      .def("triangle_count", [](const LabeledGraph& g) { return triangle_count(g); })
      .def("delete_node", [](const LabeledGraph& g, int label) { return delete_node(g, label); }, py::arg("label"))
      .def("__str__", &LabeledGraph::to_string)
      .def("__repr__", [](const LabeledGraph& g) { return "LabeledGraph('" + g.to_string() + "')"; })
      .def("__hash__", [](const LabeledGraph& g) { return py::hash(py::str(g.to_string())); })
      .def(py::self == py::self)
      .def(py::self < py::self);

  py::class_<StateSpace>(m, "StateSpace")
      .def(py::init<int>(), py::arg("n_max"))
      .def("__len__", &StateSpace::size)
      .def("graph", &StateSpace::graph, py::arg("id"))
      .def("id", &StateSpace::id, py::arg("g"))
      .def_property_readonly("graphs", &StateSpace::graphs);
}

void export_models(py::module_& m) {
  py::register_exception<ErnecError>(m, "ErnecError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

  py::class_<ErnecParams>(m, "ErnecParams")
      .def(py::init([](int n_max, double q, std::vector<double> t, std::vector<double> r, std::vector<double> s) {
             ErnecParams p{n_max, q, std::move(t), std::move(r), std::move(s)};
             validate_ernec(p);
             return p;
           }),
           py::arg("n_max"), py::arg("q"), py::arg("t"), py::arg("r"), py::arg("s"))
      .def_readonly("n_max", &ErnecParams::n_max)
      .def_readonly("q", &ErnecParams::q)
      .def_readonly("t", &ErnecParams::t)
      .def_readonly("r", &ErnecParams::r)
      .def_readonly("s", &ErnecParams::s)
      .def("to_json", [](const ErnecParams& p) { return to_json(p).dump(); });

  m.def("random_ernec_params", py::overload_cast<int, double, std::uint64_t>(&random_ernec_params), py::arg("n_max"),
        py::arg("q"), py::arg("seed"));
  m.def("derive_seed", &derive_seed, py::arg("seed"), py::arg("stream"));

  py::class_<GraphChain>(m, "GraphChain")
      .def_readonly("seed", &GraphChain::seed)
      .def_readonly("n_max", &GraphChain::n_max)
      .def_readonly("states", &GraphChain::states)
      .def_readonly("deleted_labels", &GraphChain::deleted_labels)
      .def_property_readonly("schemes", &schemes_string)
      .def("__len__", &GraphChain::size)
      .def("save", [](const GraphChain& c, const std::filesystem::path& path) { write_chain(path, c); })
      .def_static("load", &load_chain, py::arg("path"));

  m.def(
      "simulate", [](const ErnecParams& p, std::size_t length, std::uint64_t seed) {
        py::gil_scoped_release release;
        return simulate(make_ernec(p), length, seed);
      },
      py::arg("params"), py::arg("length"), py::arg("seed"));
  m.def(
      "transition_prob",
      [](const ErnecParams& p, const LabeledGraph& a, const LabeledGraph& b) { return transition_prob(make_ernec(p), a, b); },
      py::arg("params"), py::arg("g"), py::arg("g2"));

  m.def("node_count_matrix", &node_count_matrix, py::arg("params"));
  m.def(
      "node_stationary_analytic", [](const ErnecParams& p) { return node_stationary_analytic(p).probs; },
      py::arg("params"));
  m.def(
      "node_stationary_numeric", [](const ErnecParams& p) { return node_stationary_numeric(p).probs; },
      py::arg("params"));
  m.def("graph_stationary_prob", py::overload_cast<const ErnecParams&, const LabeledGraph&>(&graph_stationary_prob),
        py::arg("params"), py::arg("g"));
  m.def(
      "graph_stationary_distribution",
      [](const ErnecParams& p) { return stationary_graph_distribution(make_ernec(p), StateSpace(p.n_max)).probs; },
      py::arg("params"));
}

void export_entropy(py::module_& m) {
  m.def("ernec_entropy_rate", &ernec_entropy_rate, py::arg("params"));
  m.def("node_count_entropy_rate", &node_count_entropy_rate, py::arg("params"));
  m.def(
      "kernel_entropy_rate", [](const ErnecParams& p) { return kernel_entropy_rate(make_ernec(p)); }, py::arg("params"));
  m.def(
      "deletion_collision_gap",
      [](const ErnecParams& p) {
        const auto model = make_ernec(p);
        const StateSpace space(p.n_max);
        return deletion_collision_gap(model, space, stationary_graph_distribution(model, space));
      },
      py::arg("params"));
  m.def(
      "empirical_entropy_rate",
      [](const ErnecParams& p, const GraphChain& chain, const std::string& mode) {
        const auto r = empirical_entropy_rate(make_ernec(p), chain, parse_chain_mode(mode), ernec_lookup(p));
        py::dict d;
        d["rate"] = r.rate;
        d["log2_prob"] = r.log2_prob;
        d["prefix"] = r.prefix;
        d["zero_step"] = r.zero_step;
        return d;
      },
      py::arg("params"), py::arg("chain"), py::arg("mode") = "graph-kernel");
  m.def(
      "typicality_test",
      [](double h, double value, double epsilon, std::size_t length) {
        const auto v = typicality_test(h, value, epsilon, length);
        py::dict d;
        d["typical"] = v.typical;
        d["margin"] = v.margin;
        d["log2_lower"] = v.log2_lower;
        d["log2_upper"] = v.log2_upper;
        return d;
      },
      py::arg("entropy_rate"), py::arg("neg_log_prob_per_symbol"), py::arg("epsilon"), py::arg("length") = 1);
}

void export_hmm(py::module_& m) {
  py::class_<PropertyFn>(m, "Property")
      .def(py::init([](std::string name, std::function<int(const LabeledGraph&)> fn, std::function<int(int)> max_symbol) {
             return PropertyFn{std::move(name), std::move(fn), std::move(max_symbol)};
           }),
           py::arg("name"), py::arg("fn"), py::arg("max_symbol"))
      .def_readonly("name", &PropertyFn::name)
      .def("__call__", [](const PropertyFn& f, const LabeledGraph& g) { return f(g); })
      .def("symbol_count", [](const PropertyFn& f, int n_max) { return f.symbol_count(n_max); });
  m.def("property_by_name", &property_by_name, py::arg("name"));

  m.def(
      "extract_npc", [](const GraphChain& c, const py::object& f) { return extract_npc(c, as_property(f)).symbols; },
      py::arg("chain"), py::arg("property"));

  py::class_<Hmm>(m, "Hmm")
      .def(py::init([](Eigen::VectorXd initial, Eigen::MatrixXd trans, Eigen::MatrixXd emit) {
             Hmm h{std::move(initial), std::move(trans), std::move(emit)};
             h.validate(1e-9);
             return h;
           }),
           py::arg("initial"), py::arg("trans"), py::arg("emit"))
      .def_readonly("initial", &Hmm::initial)
      .def_readonly("trans", &Hmm::trans)
      .def_readonly("emit", &Hmm::emit);

  m.def(
      "forward_log_prob", [](const Hmm& h, const std::vector<int>& y) { return forward_log_prob(h, y); }, py::arg("hmm"),
      py::arg("symbols"));
  m.def(
      "build_reduced_hmm",
      [](const ErnecParams& p, const py::object& f, bool uniform) {
        return build_reduced_hmm(p, as_property(f), uniform ? EmissionWeighting::Uniform : EmissionWeighting::ErWeighted);
      },
      py::arg("params"), py::arg("property"), py::arg("uniform_emissions") = false);
  m.def(
      "baum_welch",
      [](const std::vector<int>& y, int states, int symbols, std::uint64_t seed, int max_iterations) {
        BaumWelchOptions opts;
        opts.seed = seed;
        opts.max_iterations = max_iterations;
        const auto r = baum_welch(y, states, symbols, opts);
        return py::make_tuple(r.hmm, r.log_likelihood);
      },
      py::arg("symbols"), py::arg("states"), py::arg("symbol_count"), py::arg("seed") = 0,
      py::arg("max_iterations") = 500);
  m.def(
      "npc_entropy_pipeline",
      [](const ErnecParams& p, const py::object& f, std::size_t length, std::uint64_t seed, double burn_in,
         std::size_t window, bool exact_emissions) {
        NpcPipelineOptions opts{burn_in, window, exact_emissions, EmissionWeighting::ErWeighted};
        const auto est = npc_entropy_pipeline(p, as_property(f), length, seed, opts);
        py::dict d;
        d["rate"] = est.rate;
        d["prefix"] = est.prefix;
        d["samples"] = est.samples;
        d["hmm"] = est.hmm;
        return d;
      },
      py::arg("params"), py::arg("property"), py::arg("length"), py::arg("seed"), py::arg("burn_in") = 0.1,
      py::arg("window") = 0, py::arg("exact_emissions") = false);
}

void export_ctmc(py::module_& m) {
  m.def(
      "rate_matrix",
      [](const ErnecParams& p, std::vector<double> rates) {
        return build_rate_matrix(make_ernec(p), rate_by_node_count(std::move(rates))).R;
      },
      py::arg("params"), py::arg("rates"));
  m.def(
      "transition_matrix_at",
      [](const Eigen::MatrixXd& R, double t) { return transition_matrix_at(RateMatrix::from_generator(R), t); },
      py::arg("R"), py::arg("t"));
  m.def(
      "ctmc_stationary", [](const Eigen::MatrixXd& R) { return ctmc_stationary(RateMatrix::from_generator(R)).probs; },
      py::arg("R"));
  m.def(
      "simulate_ctmc",
      [](const ErnecParams& p, std::vector<double> rates, double horizon, std::uint64_t seed) {
        const auto traj = simulate_ctmc(make_ernec(p), rate_by_node_count(std::move(rates)), horizon, seed);
        return py::make_tuple(traj.states, traj.holding_times);
      },
      py::arg("params"), py::arg("rates"), py::arg("horizon"), py::arg("seed"));
  m.def("expected_dwell", &expected_dwell, py::arg("tau"), py::arg("s"));
  m.def("calibrate_s", &calibrate_s, py::arg("tau"), py::arg("target_dwell"), py::arg("base"));
}

}  // namespace

PYBIND11_MODULE(_necsim, m) {
  m.doc() = "Node-event chain simulation and entropy analysis";
  export_graphs(m);
  export_models(m);
  export_entropy(m);
  export_hmm(m);
  export_ctmc(m);
  m.def("_run_json", &run_json, py::arg("config"));
}
