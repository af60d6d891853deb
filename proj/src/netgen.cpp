#include "ectrl/netgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "ectrl/error.hpp"
#include "ectrl/rng.hpp"

namespace ectrl {

void Topology::validate() const {
  if (n_nodes < 0) throw Error(ErrorCode::InvalidSpec, "negative node count");
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(edges.size() * 2);
  for (const Edge& e : edges) {
    if (e.source < 0 || e.source >= n_nodes || e.target < 0 || e.target >= n_nodes)
      throw Error(ErrorCode::InvalidSpec, "edge endpoint out of range");
    if (e.source == e.target) throw Error(ErrorCode::InvalidSpec, "self-pair in topology");
    int a = e.source, b = e.target;
    if (!directed && a > b) std::swap(a, b);
    const auto key = (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
    if (!seen.insert(key).second) throw Error(ErrorCode::InvalidSpec, "duplicate edge");
  }
}

namespace {

void check_common(const GraphSpec& spec) {
  if (spec.n_nodes < 1) throw Error(ErrorCode::InvalidSpec, "n_nodes must be positive");
  if (!(spec.mean_degree >= 0.0) || !std::isfinite(spec.mean_degree))
    throw Error(ErrorCode::InvalidSpec, "mean degree must be a finite value >= 0");
}

}  // namespace

Topology generate_er(const GraphSpec& spec) {
  if (spec.model != GraphModel::ER) throw Error(ErrorCode::InvalidSpec, "generate_er needs model ER");
  check_common(spec);
  Topology t{spec.n_nodes, spec.directed, {}};
  const int n = spec.n_nodes;
  if (spec.mean_degree == 0.0 || n < 2) {
    if (spec.mean_degree > 0.0) throw Error(ErrorCode::InvalidSpec, "p > 1: single node cannot carry degree");
    return t;
  }
  const double p = spec.directed ? spec.mean_degree / (2.0 * (n - 1)) : spec.mean_degree / (n - 1);
  if (p > 1.0) throw Error(ErrorCode::InvalidSpec, "edge probability p > 1");
  Rng rng(spec.seed);
  if (spec.directed) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j && rng.bernoulli(p)) t.edges.push_back({i, j});
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (rng.bernoulli(p)) t.edges.push_back({i, j});
  }
  return t;
}

std::int64_t sf_attempt_cap(std::int64_t target_edges) { return 100 * target_edges + 10000; }

Topology generate_sf(const GraphSpec& spec) {
  if (spec.model != GraphModel::SF) throw Error(ErrorCode::InvalidSpec, "generate_sf needs model SF");
  check_common(spec);
  if (!(spec.gamma > 2.0)) throw Error(ErrorCode::InvalidSpec, "SF exponent gamma must exceed 2");
  const int n = spec.n_nodes;
  Topology t{n, spec.directed, {}};
  const auto target = static_cast<std::int64_t>(std::floor(n * spec.mean_degree / 2.0));
  const std::int64_t max_pairs =
      spec.directed ? static_cast<std::int64_t>(n) * (n - 1) : static_cast<std::int64_t>(n) * (n - 1) / 2;
  if (target > max_pairs) throw Error(ErrorCode::InvalidSpec, "target edge count exceeds available pairs");
  if (target == 0) return t;

  const double alpha = 1.0 / (spec.gamma - 1.0);
  std::vector<double> cumulative(static_cast<std::size_t>(n));
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    total += std::pow(static_cast<double>(i + 1), -alpha);
    cumulative[static_cast<std::size_t>(i)] = total;
  }
  Rng rng(spec.seed);
  auto draw = [&] {
    const double u = rng.uniform() * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) --it;
    return static_cast<int>(it - cumulative.begin());
  };

  std::unordered_set<std::uint64_t> present;
  present.reserve(static_cast<std::size_t>(target) * 2);
  t.edges.reserve(static_cast<std::size_t>(target));
  const std::int64_t cap = sf_attempt_cap(target);
  std::int64_t attempts = 0;
  while (static_cast<std::int64_t>(t.edges.size()) < target) {
    if (++attempts > cap)
      throw Error(ErrorCode::GenerationStalled,
                  "static model reached " + std::to_string(t.edges.size()) + " of " + std::to_string(target) +
                      " edges after " + std::to_string(cap) + " draws");
    int a = draw();
    int b = draw();
    if (a == b) continue;
    if (!spec.directed && a > b) std::swap(a, b);
    const auto key = (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
    if (!present.insert(key).second) continue;
    t.edges.push_back({a, b});
  }
  std::sort(t.edges.begin(), t.edges.end());
  return t;
}

Topology generate(const GraphSpec& spec) {
  return spec.model == GraphModel::ER ? generate_er(spec) : generate_sf(spec);
}

DegreeStats degree_stats(const Topology& t) {
  DegreeStats s;
  if (t.n_nodes == 0) return s;
  std::vector<int> degree(static_cast<std::size_t>(t.n_nodes), 0);
  for (const Edge& e : t.edges) {
    ++degree[static_cast<std::size_t>(e.source)];
    ++degree[static_cast<std::size_t>(e.target)];
  }
  s.mean = 2.0 * static_cast<double>(t.edges.size()) / t.n_nodes;
  s.min = *std::min_element(degree.begin(), degree.end());
  s.max = *std::max_element(degree.begin(), degree.end());
  s.isolated = static_cast<int>(std::count(degree.begin(), degree.end(), 0));
  return s;
}

void write_edge_list(std::ostream& out, const Topology& t) {
  out << "N " << t.n_nodes << " directed " << (t.directed ? 1 : 0) << '\n';
  for (const Edge& e : t.edges) out << e.source << ' ' << e.target << '\n';
}

Topology read_edge_list(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::Parse, "edge list: missing header");
  std::istringstream header(line);
  std::string tag_n, tag_directed;
  long long n = -1;
  int directed = -1;
  if (!(header >> tag_n >> n >> tag_directed >> directed) || tag_n != "N" || tag_directed != "directed" ||
      (directed != 0 && directed != 1) || n < 0 || n > (1LL << 30))
    throw Error(ErrorCode::Parse, "edge list: bad header '" + line + "'");
  Topology t{static_cast<int>(n), directed == 1, {}};
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    long long a = 0, b = 0;
    std::string rest;
    if (!(row >> a >> b) || (row >> rest))
      throw Error(ErrorCode::Parse, "edge list: bad line " + std::to_string(lineno));
    if (a < 0 || b < 0 || a >= n || b >= n)
      throw Error(ErrorCode::Parse, "edge list: endpoint out of range on line " + std::to_string(lineno));
    t.edges.push_back({static_cast<int>(a), static_cast<int>(b)});
  }
  t.validate();
  return t;
}

void save_edge_list(const std::string& path, const Topology& t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
  write_edge_list(out, t);
  if (!out) throw Error(ErrorCode::Io, "write failed for '" + path + "'");
}

Topology load_edge_list(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  return read_edge_list(in);
}

const char* to_string(GraphModel m) { return m == GraphModel::ER ? "ER" : "SF"; }

GraphModel parse_graph_model(const std::string& name) {
  if (name == "ER" || name == "er") return GraphModel::ER;
  if (name == "SF" || name == "sf") return GraphModel::SF;
  throw Error(ErrorCode::InvalidSpec, "unknown graph model '" + name + "'");
}

}  // namespace ectrl
