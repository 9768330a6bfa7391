#include "necsim/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "necsim/chain_io.hpp"
#include "necsim/continuous_time.hpp"
#include "necsim/property_chain.hpp"
#include "necsim/rng.hpp"

namespace necsim {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct KindInfo {
  ExperimentKind kind;
  const char* name;
};

constexpr KindInfo kKinds[] = {
    {ExperimentKind::Simulate, "simulate"},
    {ExperimentKind::Stationary, "stationary"},
    {ExperimentKind::Entropy, "entropy"},
    {ExperimentKind::Npc, "npc"},
    {ExperimentKind::Ctmc, "ctmc"},
    {ExperimentKind::ReproduceTable1, "reproduce-table1"},
    {ExperimentKind::ReproduceTable2, "reproduce-table2"},
    {ExperimentKind::ReproduceTable3, "reproduce-table3"},
    {ExperimentKind::ReproduceTable4, "reproduce-table4"},
    {ExperimentKind::ReproduceFig2, "reproduce-fig2"},
    {ExperimentKind::ReproduceFig3, "reproduce-fig3"},
};

/// Defaults a kind supplies for every unset optional.
struct Preset {
  int n_max = 5;
  double q = 0.7;
  std::size_t length = 100000;
  std::size_t runs = 1;
  ChainMode mode = ChainMode::LabeledPath;
  std::string property = "triangle-count";
  std::size_t window = 0;
};

Preset preset_for(ExperimentKind kind) {
  Preset p;
  switch (kind) {
    case ExperimentKind::ReproduceTable2:
      p.n_max = 8;
      break;
    case ExperimentKind::ReproduceTable3:
      p.n_max = 3;
      p.length = 1000000;
      break;
    case ExperimentKind::ReproduceTable4:
      p.length = 200000;
      p.runs = 5;
      break;
    case ExperimentKind::ReproduceFig2:
      p.length = 5000;
      p.runs = 4;
      break;
    case ExperimentKind::ReproduceFig3:
      p.n_max = 3;
      p.q = 0.8;
      p.runs = 4;
      p.window = 1500;
      break;
    default:
      break;
  }
  return p;
}

// Dense CTMC generator limit (matches build_rate_matrix).
constexpr int kCtmcMaxNodes = 5;

std::string fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10f", v);
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

void write_json(const fs::path& path, const json& j) {
  auto os = open_out(path);
  os << j.dump(2) << '\n';
}

/// Row indices kept in convergence CSVs: at most ~2000 evenly spaced steps
/// plus the final one.
std::vector<std::size_t> sample_steps(std::size_t n) {
  std::vector<std::size_t> steps;
  const std::size_t stride = std::max<std::size_t>(1, n / 2000);
  for (std::size_t k = stride; k <= n; k += stride) steps.push_back(k);
  if (steps.empty() || steps.back() != n) steps.push_back(n);
  return steps;
}

void write_series(const fs::path& path, const std::vector<std::vector<double>>& series,
                  const std::vector<std::string>& names) {
  auto os = open_out(path);
  os << "step";
  for (const auto& name : names) os << ',' << name;
  os << '\n';
  std::size_t n = 0;
  for (const auto& s : series) n = std::max(n, s.size());
  for (std::size_t k : sample_steps(n)) {
    os << k;
    for (const auto& s : series) os << ',' << (k <= s.size() ? fixed(s[k - 1]) : std::string());
    os << '\n';
  }
}

std::size_t burn_in_start(const ExperimentConfig& c, std::size_t length) {
  return static_cast<std::size_t>(c.burn_in * static_cast<double>(length));
}

json config_to_json(const ExperimentConfig& c) {
  json j{{"kind", to_string(c.kind)},
         {"seed", c.seed},
         {"burn_in", c.burn_in},
         {"out", c.out_dir.string()},
         {"epsilon", c.epsilon}};
  if (c.params) j["params"] = to_json(*c.params);
  if (c.n_max) j["n_max"] = *c.n_max;
  if (c.q) j["q"] = *c.q;
  if (c.random_seed) j["random_seed"] = *c.random_seed;
  if (c.length) j["length"] = *c.length;
  if (c.mode) j["mode"] = to_string(*c.mode);
  if (c.property) j["property"] = *c.property;
  if (c.runs) j["runs"] = *c.runs;
  if (c.window) j["window"] = *c.window;
  j["emissions"] = c.emissions;
  if (!c.lambda.empty()) j["lambda"] = c.lambda;
  if (c.horizon) j["horizon"] = *c.horizon;
  return j;
}

class Runner {
 public:
  Runner(const ExperimentConfig& c, RunReport& report)
      : c_(c), preset_(preset_for(c.kind)), params_(resolve_params(c)), report_(report) {
    length_ = c.length.value_or(preset_.length);
    runs_ = c.runs.value_or(preset_.runs);
    mode_ = c.mode.value_or(preset_.mode);
    report_.summary["params"] = to_json(params_);
  }

  void simulate_kind() {
    const auto chain = simulate(make_ernec(params_), length_, run_seed(c_, 0));
    write_chain(path("chain.txt"), chain);
    std::size_t adds = 0, dels = 0;
    for (auto s : chain.schemes) {
      adds += s == Scheme::Addition;
      dels += s == Scheme::Deletion;
    }
    report_.summary["length"] = chain.size();
    report_.summary["additions"] = adds;
    report_.summary["deletions"] = dels;
    report_.summary["final_graph"] = chain.states.back().to_string();
  }

  void stationary_kind() {
    const auto chain = simulate(make_ernec(params_), length_, run_seed(c_, 0));
    const auto analytic = node_stationary_analytic(params_);
    const auto numeric = node_stationary_numeric(params_);
    std::vector<double> observed(static_cast<std::size_t>(params_.n_max), 0.0);
    const std::size_t first = burn_in_start(c_, chain.size());
    for (std::size_t i = first; i < chain.size(); ++i) observed[chain.states[i].node_count() - 1] += 1.0;
    for (auto& v : observed) v /= static_cast<double>(chain.size() - first);

    auto os = open_out(path("stationary.csv"));
    os << "i,calculated,numeric,observed\n";
    double max_dev = 0.0, max_num = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
      os << i + 1 << ',' << fixed(analytic.probs[i]) << ',' << fixed(numeric.probs[i]) << ',' << fixed(observed[i])
         << '\n';
      max_dev = std::max(max_dev, std::abs(observed[i] - analytic.probs[i]));
      max_num = std::max(max_num, std::abs(numeric.probs[i] - analytic.probs[i]));
    }
    report_.summary["max_observed_deviation"] = max_dev;
    report_.summary["max_numeric_deviation"] = max_num;
  }

  void table3_kind() {
    if (params_.n_max < 3) throw std::invalid_argument("reproduce-table3 needs n_max >= 3");
    const auto chain = simulate(make_ernec(params_), length_, run_seed(c_, 0));
    std::vector<double> counts(8, 0.0);
    double total = 0.0;
    for (std::size_t i = burn_in_start(c_, chain.size()); i < chain.size(); ++i) {
      const auto& g = chain.states[i];
      if (g.node_count() != 3) continue;
      counts[static_cast<std::size_t>(g.bits())] += 1.0;
      total += 1.0;
    }
    if (total == 0.0) throw std::runtime_error("chain never reached 3 nodes; increase the length");
    auto os = open_out(path("stationary.csv"));
    os << "graph,edges,observed,er_probability\n";
    json rows = json::array();
    for (std::uint64_t bits = 0; bits < 8; ++bits) {
      const auto g = LabeledGraph::from_bits(3, bits);
      const int e = g.edge_count();
      const double er = std::pow(params_.q, e) * std::pow(1.0 - params_.q, 3 - e);
      const double obs = counts[bits] / total;
      os << g.to_string() << ',' << e << ',' << fixed(obs) << ',' << fixed(er) << '\n';
      // The three graphs singled out in the printed table.
      if (bits == 3 || bits == 0 || bits == 7) {
        rows.push_back({{"graph", g.to_string()}, {"observed", obs}, {"er_probability", er}});
      }
    }
    report_.summary["highlighted"] = rows;
    report_.summary["three_node_samples"] = total;
  }

  void entropy_kind(bool write_chain_file) {
    const auto model = make_ernec(params_);
    const auto chain = simulate(model, length_, run_seed(c_, 0));
    if (write_chain_file) write_chain(path("chain.txt"), chain);
    const auto emp = empirical_entropy_rate(model, chain, mode_, ernec_lookup(params_));
    EntropyReport r;
    r.formula_rate = ernec_entropy_rate(params_);
    r.mode = mode_;
    r.chain_length = chain.size();
    r.empirical_rate = emp.rate;
    json j;
    if (params_.n_max <= kEnumerationCap) {
      r.kernel_rate = kernel_entropy_rate(model);
      r.gap = r.formula_rate - r.kernel_rate;
      j = to_json(r);
    } else {
      j = to_json(r);
      j["kernel_rate"] = nullptr;
      j["gap"] = nullptr;
    }
    write_json(path("entropy.json"), j);
    write_series(path("convergence.csv"), {emp.prefix}, {"running_rate"});
    report_.summary["entropy"] = j;
  }

  void table4_kind() {
    const auto model = make_ernec(params_);
    const auto lookup = ernec_lookup(params_);
    const double formula = ernec_entropy_rate(params_);
    const bool enumerable = params_.n_max <= kEnumerationCap;
    const double kernel = enumerable ? kernel_entropy_rate(model) : 0.0;

    auto os = open_out(path("table4.csv"));
    os << "run,labeled_rate,labeled_deviation,kernel_mode_rate,kernel_deviation,typical\n";
    json runs = json::array();
    std::size_t typical = 0;
    for (std::size_t r = 0; r < runs_; ++r) {
      const auto chain = simulate(model, length_, run_seed(c_, r));
      const double labeled = empirical_entropy_rate(model, chain, ChainMode::LabeledPath, lookup).rate;
      const auto verdict = typicality_test(formula, labeled, c_.epsilon, chain.size());
      typical += verdict.typical;
      os << r + 1 << ',' << fixed(labeled) << ',' << fixed(labeled - formula);
      json row{{"run", r + 1}, {"labeled_rate", labeled}, {"typical", verdict.typical}, {"margin", verdict.margin}};
      if (enumerable) {
        const double graph = empirical_entropy_rate(model, chain, ChainMode::GraphKernel, lookup).rate;
        os << ',' << fixed(graph) << ',' << fixed(graph - kernel);
        row["kernel_mode_rate"] = graph;
      } else {
        os << ",,";
      }
      os << ',' << (verdict.typical ? "yes" : "no") << '\n';
      runs.push_back(row);
    }
    json j{{"formula_rate", formula}, {"epsilon", c_.epsilon}, {"typical_runs", typical}, {"runs", runs}, {"n", length_}};
    j["kernel_rate"] = enumerable ? json(kernel) : json(nullptr);
    j["gap"] = enumerable ? json(formula - kernel) : json(nullptr);
    write_json(path("entropy.json"), j);
    report_.summary["entropy"] = j;
  }

  void fig2_kind() {
    const auto model = make_ernec(params_);
    const auto lookup = ernec_lookup(params_);
    std::vector<std::vector<double>> series;
    std::vector<std::string> names;
    json finals = json::array();
    for (std::size_t r = 0; r < runs_; ++r) {
      const auto chain = simulate(model, length_, run_seed(c_, r));
      auto emp = empirical_entropy_rate(model, chain, mode_, lookup);
      finals.push_back(emp.rate);
      series.push_back(std::move(emp.prefix));
      names.push_back("run" + std::to_string(r + 1));
    }
    const double target = mode_ == ChainMode::LabeledPath ? ernec_entropy_rate(params_)
                                                          : kernel_entropy_rate(make_ernec(params_));
    write_series(path("convergence.csv"), series, names);
    report_.summary["target_rate"] = target;
    report_.summary["mode"] = to_string(mode_);
    report_.summary["final_rates"] = finals;
  }

  void npc_kind(bool single) {
    const auto f = property_by_name(c_.property.value_or(preset_.property));
    NpcPipelineOptions opts;
    opts.burn_in = c_.burn_in;
    opts.window = c_.window.value_or(preset_.window);
    opts.exact_emissions = c_.emissions != "estimated";
    if (c_.emissions == "uniform") opts.weighting = EmissionWeighting::Uniform;
    const auto model = make_ernec(params_);
    std::vector<std::vector<double>> series;
    std::vector<std::string> names;
    json finals = json::array();
    const std::size_t runs = single ? 1 : runs_;
    for (std::size_t r = 0; r < runs; ++r) {
      const auto chain = simulate(model, length_, run_seed(c_, r));
      auto est = npc_entropy_pipeline(params_, f, chain, opts);
      if (single) {
        write_npc(path("npc.txt"), extract_npc(chain, f));
        write_json(path("hmm.json"), to_json(est.hmm));
      }
      finals.push_back(est.rate);
      series.push_back(std::move(est.prefix));
      names.push_back(single ? "running_rate" : "run" + std::to_string(r + 1));
    }
    write_series(path("convergence.csv"), series, names);
    report_.summary["property"] = f.name;
    report_.summary["emissions"] = c_.emissions;
    report_.summary["rates"] = finals;
    report_.summary["samples"] = series.front().size();
  }

  void ctmc_kind() {
    if (params_.n_max > kCtmcMaxNodes) {
      throw std::invalid_argument("ctmc builds a dense rate matrix; n_max must be <= " + std::to_string(kCtmcMaxNodes));
    }
    std::vector<double> rates = c_.lambda;
    if (rates.empty()) rates.assign(1, 1.0);
    if (rates.size() == 1) rates.assign(static_cast<std::size_t>(params_.n_max), rates[0]);
    if (rates.size() != static_cast<std::size_t>(params_.n_max)) {
      throw std::invalid_argument("lambda needs one rate or one per node count (" + std::to_string(params_.n_max) + ")");
    }
    const double min_rate = *std::min_element(rates.begin(), rates.end());
    const double horizon = c_.horizon.value_or(1e4 / min_rate);
    const auto model = make_ernec(params_);
    const auto lambda = rate_by_node_count(rates);
    const auto traj = simulate_ctmc(model, lambda, horizon, run_seed(c_, 0));
    {
      auto os = open_out(path("ctmc.txt"));
      write_trajectory(os, traj);
    }
    const StateSpace space(params_.n_max);
    const auto pi = ctmc_stationary(build_rate_matrix(model, lambda));
    const auto occ = occupation_fractions(traj, space);
    auto os = open_out(path("stationary.csv"));
    os << "graph,ctmc_stationary,occupation\n";
    double max_dev = 0.0;
    for (std::size_t i = 0; i < space.size(); ++i) {
      os << space.graph(i).to_string() << ',' << fixed(pi.probs[i]) << ',' << fixed(occ[i]) << '\n';
      max_dev = std::max(max_dev, std::abs(pi.probs[i] - occ[i]));
    }
    report_.summary["horizon"] = horizon;
    report_.summary["jumps"] = traj.states.size();
    report_.summary["max_occupation_deviation"] = max_dev;
  }

  void dispatch() {
    switch (c_.kind) {
      case ExperimentKind::Simulate: return simulate_kind();
      case ExperimentKind::Stationary:
      case ExperimentKind::ReproduceTable1:
      case ExperimentKind::ReproduceTable2: return stationary_kind();
      case ExperimentKind::ReproduceTable3: return table3_kind();
      case ExperimentKind::Entropy: return entropy_kind(true);
      case ExperimentKind::ReproduceTable4: return table4_kind();
      case ExperimentKind::ReproduceFig2: return fig2_kind();
      case ExperimentKind::Npc: return npc_kind(true);
      case ExperimentKind::ReproduceFig3: return npc_kind(false);
      case ExperimentKind::Ctmc: return ctmc_kind();
    }
  }

 private:
  fs::path path(const char* name) {
    auto p = c_.out_dir / name;
    report_.outputs.push_back(p);
    return p;
  }

  const ExperimentConfig& c_;
  Preset preset_;
  ErnecParams params_;
  RunReport& report_;
  std::size_t length_ = 0;
  std::size_t runs_ = 1;
  ChainMode mode_ = ChainMode::LabeledPath;
};

}  // namespace

std::string to_string(ExperimentKind kind) {
  for (const auto& k : kKinds) {
    if (k.kind == kind) return k.name;
  }
  throw std::invalid_argument("unknown experiment kind");
}

ExperimentKind parse_experiment_kind(std::string_view text) {
  for (const auto& k : kKinds) {
    if (text == k.name) return k.kind;
  }
  std::string names;
  for (const auto& k : kKinds) names += (names.empty() ? "" : ", ") + std::string(k.name);
  throw std::invalid_argument("unknown experiment kind '" + std::string(text) + "' (expected one of " + names + ")");
}

void ExperimentConfig::validate() const {
  if (params) validate_ernec(*params);
  if (n_max && (*n_max < 1 || *n_max > kMaxNodes)) {
    throw std::invalid_argument("n_max must lie in [1, " + std::to_string(kMaxNodes) + "]");
  }
  if (q && !(*q > 0.0 && *q < 1.0)) throw std::invalid_argument("q must lie strictly between 0 and 1");
  if (emissions != "estimated" && emissions != "er-weighted" && emissions != "uniform") {
    throw std::invalid_argument("emissions must be one of estimated, er-weighted, uniform (got '" + emissions + "')");
  }
  if (length && *length == 0) throw std::invalid_argument("length must be positive");
  if (runs && *runs == 0) throw std::invalid_argument("runs must be positive");
  if (!(burn_in >= 0.0 && burn_in <= 0.5)) throw std::invalid_argument("burn_in must lie in [0, 0.5]");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  for (double l : lambda) {
    if (!(l > 0.0)) throw std::invalid_argument("lambda rates must be positive");
  }
  if (horizon && !(*horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (out_dir.empty()) throw std::invalid_argument("output directory must not be empty");
}

void apply_json(ExperimentConfig& c, const json& j) {
  if (!j.is_object()) throw ParseError("config must be a JSON object", 0);
  static const char* known[] = {"kind", "n_max", "q", "t", "r", "s", "random_seed", "seed", "length",
                                "burn_in", "out", "mode", "property", "runs", "window", "emissions", "epsilon",
                                "lambda", "horizon"};
  for (const auto& [key, _] : j.items()) {
    if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return key == k; }) == std::end(known)) {
      throw ParseError("unknown config key '" + key + "'", 0);
    }
  }
  try {
    if (j.contains("kind")) c.kind = parse_experiment_kind(j["kind"].get<std::string>());
    if (j.contains("n_max")) c.n_max = j["n_max"].get<int>();
    if (j.contains("q")) c.q = j["q"].get<double>();
    if (j.contains("random_seed")) c.random_seed = j["random_seed"].get<std::uint64_t>();
    if (j.contains("t") || j.contains("r") || j.contains("s")) {
      if (!(j.contains("t") && j.contains("r") && j.contains("s"))) {
        throw ParseError("explicit parameters need all of t, r and s", 0);
      }
      if (!c.n_max || !c.q) throw ParseError("explicit parameters need n_max and q", 0);
      ErnecParams p;
      p.n_max = *c.n_max;
      p.q = *c.q;
      p.t = j["t"].get<std::vector<double>>();
      p.r = j["r"].get<std::vector<double>>();
      p.s = j["s"].get<std::vector<double>>();
      c.params = p;
    }
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("length")) c.length = j["length"].get<std::size_t>();
    if (j.contains("burn_in")) c.burn_in = j["burn_in"].get<double>();
    if (j.contains("out")) c.out_dir = j["out"].get<std::string>();
    if (j.contains("mode")) c.mode = parse_chain_mode(j["mode"].get<std::string>());
    if (j.contains("property")) c.property = j["property"].get<std::string>();
    if (j.contains("runs")) c.runs = j["runs"].get<std::size_t>();
    if (j.contains("window")) c.window = j["window"].get<std::size_t>();
    if (j.contains("emissions")) c.emissions = j["emissions"].get<std::string>();
    if (j.contains("epsilon")) c.epsilon = j["epsilon"].get<double>();
    if (j.contains("lambda")) {
      c.lambda = j["lambda"].is_array() ? j["lambda"].get<std::vector<double>>()
                                        : std::vector<double>{j["lambda"].get<double>()};
    }
    if (j.contains("horizon")) c.horizon = j["horizon"].get<double>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad config value: ") + e.what(), 0);
  }
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(is);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  }
  ExperimentConfig c;
  apply_json(c, j);
  return c;
}

ErnecParams resolve_params(const ExperimentConfig& c) {
  if (c.params) {
    ErnecParams p = *c.params;
    if ((c.n_max && *c.n_max != p.n_max)) throw std::invalid_argument("n_max disagrees with the explicit t/r/s arrays");
    if (c.q) p.q = *c.q;
    validate_ernec(p);
    return p;
  }
  const auto preset = preset_for(c.kind);
  return random_ernec_params(c.n_max.value_or(preset.n_max), c.q.value_or(preset.q),
                             c.random_seed.value_or(derive_seed(c.seed, 0)));
}

std::uint64_t run_seed(const ExperimentConfig& c, std::size_t run) { return derive_seed(c.seed, run + 1); }

json RunReport::to_json() const {
  std::vector<std::string> paths;
  for (const auto& p : outputs) paths.push_back(p.string());
  return {{"config", config}, {"outputs", paths}, {"summary", summary}, {"wall_seconds", wall_seconds}};
}

RunReport run(const ExperimentConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  std::error_code ec;
  fs::create_directories(config.out_dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + config.out_dir.string() + ": " + ec.message());

  RunReport report;
  report.config = config_to_json(config);
  Runner runner(config, report);
  runner.dispatch();

  const auto report_path = config.out_dir / "report.json";
  report.outputs.push_back(report_path);
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_json(report_path, report.to_json());
  return report;
}

}  // namespace necsim
