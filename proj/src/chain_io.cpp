#include "necsim/chain_io.hpp"

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <vector>

namespace necsim {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  for (std::string tok; is >> tok;) out.push_back(tok);
  return out;
}

template <typename T>
T parse_number(const std::string& text, std::size_t line, const char* what) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ParseError(std::string("malformed ") + what + " '" + text + "'", line);
  }
  return value;
}

/// Reads the header line and checks magic and version.
std::vector<std::string> read_header(std::istream& is, const std::string& magic) {
  std::string line;
  if (!std::getline(is, line)) throw ParseError("missing '" + magic + "' header", 1);
  auto tokens = split(line);
  if (tokens.empty() || tokens[0] != magic) throw ParseError("expected '" + magic + "' header", 1);
  if (tokens.size() < 2) throw ParseError("missing format version", 1);
  if (tokens[1] != "v1") throw VersionError("unsupported " + magic + " version '" + tokens[1] + "'", 1);
  return tokens;
}

std::string key_value(const std::string& token, const std::string& key, std::size_t line) {
  if (token.rfind(key + "=", 0) != 0) throw ParseError("expected '" + key + "=' in header", line);
  return token.substr(key.size() + 1);
}

LabeledGraph parse_graph(const std::string& text, std::size_t line) {
  try {
    return LabeledGraph::parse(text);
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), line);
  }
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return os;
}

std::ifstream open_for_read(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  return is;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::runtime_error("cannot format number");
  return std::string(buf, ptr);
}

void write_chain(std::ostream& os, const GraphChain& chain) {
  os << "nec-chain v1 n_max=" << chain.n_max << " seed=" << chain.seed << '\n';
  const bool annotated = chain.has_schemes();
  for (std::size_t i = 0; i < chain.size(); ++i) {
    os << chain.states[i].to_string();
    if (annotated && i > 0) {
      os << ' ' << scheme_code(chain.schemes[i - 1]);
      if (chain.schemes[i - 1] == Scheme::Deletion) os << ' ' << chain.deleted_labels[i - 1];
    }
    os << '\n';
  }
}

void write_chain(const std::filesystem::path& path, const GraphChain& chain) {
  auto os = open_for_write(path);
  write_chain(os, chain);
}

GraphChain read_chain(std::istream& is) {
  const auto header = read_header(is, "nec-chain");
  if (header.size() != 4) throw ParseError("expected 'nec-chain v1 n_max=<k> seed=<s>'", 1);
  GraphChain chain;
  chain.n_max = parse_number<int>(key_value(header[2], "n_max", 1), 1, "n_max");
  chain.seed = parse_number<std::uint64_t>(key_value(header[3], "seed", 1), 1, "seed");
  if (chain.n_max < 1 || chain.n_max > kMaxNodes) throw ParseError("n_max out of range", 1);

  std::optional<bool> annotated;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    const auto tokens = split(line);
    if (tokens.empty()) throw ParseError("empty line", line_no);
    auto g = parse_graph(tokens[0], line_no);
    if (g.node_count() > chain.n_max) throw ParseError("graph exceeds n_max", line_no);
    if (chain.states.empty()) {
      if (tokens.size() != 1) throw ParseError("the first state carries no scheme", line_no);
      if (g.node_count() != 1) throw ParseError("chains start from the single-node graph", line_no);
    } else {
      const bool has_scheme = tokens.size() > 1;
      if (annotated && *annotated != has_scheme) throw ParseError("scheme column present on some lines only", line_no);
      annotated = has_scheme;
      if (has_scheme) {
        if (tokens[1].size() != 1) throw ParseError("malformed scheme '" + tokens[1] + "'", line_no);
        Scheme s{};
        try {
          s = scheme_from_code(tokens[1][0]);
        } catch (const std::invalid_argument& e) {
          throw ParseError(e.what(), line_no);
        }
        int label = 0;
        if (s == Scheme::Deletion) {
          if (tokens.size() != 3) throw ParseError("deletion is missing its node label", line_no);
          label = parse_number<int>(tokens[2], line_no, "node label");
          if (label < 1 || label > chain.states.back().node_count()) throw ParseError("deleted label out of range", line_no);
        } else if (tokens.size() != 2) {
          throw ParseError("unexpected trailing fields", line_no);
        }
        chain.schemes.push_back(s);
        chain.deleted_labels.push_back(label);
      }
    }
    chain.states.push_back(std::move(g));
  }
  if (chain.states.empty()) throw ParseError("chain has no states", line_no + 1);
  return chain;
}

GraphChain load_chain(const std::filesystem::path& path) {
  auto is = open_for_read(path);
  return read_chain(is);
}

void write_npc(std::ostream& os, const PropertyChainData& npc) {
  os << "npc v1 f=" << npc.property << '\n';
  for (int y : npc.symbols) os << y << '\n';
}

void write_npc(const std::filesystem::path& path, const PropertyChainData& npc) {
  auto os = open_for_write(path);
  write_npc(os, npc);
}

PropertyChainData read_npc(std::istream& is) {
  const auto header = read_header(is, "npc");
  if (header.size() != 3) throw ParseError("expected 'npc v1 f=<name>'", 1);
  PropertyChainData npc;
  npc.property = key_value(header[2], "f", 1);
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    const auto tokens = split(line);
    if (tokens.size() != 1) throw ParseError("expected one symbol per line", line_no);
    const int y = parse_number<int>(tokens[0], line_no, "symbol");
    if (y < 0) throw ParseError("symbols must be non-negative", line_no);
    npc.symbols.push_back(y);
  }
  if (npc.symbols.empty()) throw ParseError("NPC has no symbols", line_no + 1);
  return npc;
}

PropertyChainData load_npc(const std::filesystem::path& path) {
  auto is = open_for_read(path);
  return read_npc(is);
}

void write_trajectory(std::ostream& os, const CtmcTrajectory& traj) {
  os << "ctmc v1\n";
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    os << traj.states[i].to_string() << ' ' << format_double(traj.holding_times[i]) << '\n';
  }
}

void write_trajectory(const std::filesystem::path& path, const CtmcTrajectory& traj) {
  auto os = open_for_write(path);
  write_trajectory(os, traj);
}

CtmcTrajectory read_trajectory(std::istream& is) {
  read_header(is, "ctmc");
  CtmcTrajectory traj;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    const auto tokens = split(line);
    if (tokens.size() != 2) throw ParseError("expected '<n:HEX> <holding_time>'", line_no);
    traj.states.push_back(parse_graph(tokens[0], line_no));
    const double hold = parse_number<double>(tokens[1], line_no, "holding time");
    if (!(hold > 0.0)) throw ParseError("holding times must be positive", line_no);
    traj.holding_times.push_back(hold);
    traj.horizon += hold;
  }
  return traj;
}

nlohmann::json to_json(const ErnecParams& p) {
  return {{"n_max", p.n_max}, {"q", p.q}, {"t", p.t}, {"r", p.r}, {"s", p.s}};
}

ErnecParams ernec_params_from_json(const nlohmann::json& j) {
  try {
    const int n_max = j.at("n_max").get<int>();
    const double q = j.at("q").get<double>();
    if (j.contains("random_seed")) {
      return random_ernec_params(n_max, q, j.at("random_seed").get<std::uint64_t>());
    }
    ErnecParams p;
    p.n_max = n_max;
    p.q = q;
    p.t = j.at("t").get<std::vector<double>>();
    p.r = j.at("r").get<std::vector<double>>();
    p.s = j.at("s").get<std::vector<double>>();
    validate_ernec(p);
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid ERNEC parameters: ") + e.what(), 0);
  }
}

nlohmann::json to_json(const Hmm& h) {
  auto matrix = [](const Eigen::MatrixXd& M) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
      std::vector<double> row(static_cast<std::size_t>(M.cols()));
      for (Eigen::Index k = 0; k < M.cols(); ++k) row[static_cast<std::size_t>(k)] = M(i, k);
      rows.push_back(row);
    }
    return rows;
  };
  return {{"initial", std::vector<double>(h.initial.data(), h.initial.data() + h.initial.size())},
          {"trans", matrix(h.trans)},
          {"emit", matrix(h.emit)}};
}

Hmm hmm_from_json(const nlohmann::json& j) {
  auto matrix = [](const nlohmann::json& rows) {
    const auto data = rows.get<std::vector<std::vector<double>>>();
    if (data.empty()) throw ParseError("empty HMM matrix", 0);
    Eigen::MatrixXd M(static_cast<Eigen::Index>(data.size()), static_cast<Eigen::Index>(data[0].size()));
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (data[i].size() != data[0].size()) throw ParseError("ragged HMM matrix", 0);
      for (std::size_t k = 0; k < data[i].size(); ++k) M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = data[i][k];
    }
    return M;
  };
  try {
    Hmm h;
    const auto init = j.at("initial").get<std::vector<double>>();
    h.initial = Eigen::Map<const Eigen::VectorXd>(init.data(), static_cast<Eigen::Index>(init.size()));
    h.trans = matrix(j.at("trans"));
    h.emit = matrix(j.at("emit"));
    h.validate(1e-9);
    return h;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid HMM record: ") + e.what(), 0);
  }
}

nlohmann::json to_json(const EntropyReport& r) {
  nlohmann::json j{{"formula_rate", r.formula_rate},
                   {"kernel_rate", r.kernel_rate},
                   {"gap", r.gap},
                   {"n", r.chain_length},
                   {"mode", to_string(r.mode)}};
  j["empirical_rate"] = r.empirical_rate ? nlohmann::json(*r.empirical_rate) : nlohmann::json(nullptr);
  return j;
}

}  // namespace necsim
