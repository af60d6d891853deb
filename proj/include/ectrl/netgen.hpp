#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ectrl {

struct Edge {
  int source = 0;
  int target = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Zero/nonzero pattern of the coupling matrix. Edge (source, target) means
// the state of `source` drives `target`. Undirected graphs store each pair
// once (the generators emit source < target). Self-dynamics never appear here.
struct Topology {
  int n_nodes = 0;
  bool directed = false;
  std::vector<Edge> edges;

  // Throws InvalidSpec if an invariant is broken.
  void validate() const;
  friend bool operator==(const Topology&, const Topology&) = default;
};

enum class GraphModel { ER, SF };

struct GraphSpec {
  GraphModel model = GraphModel::ER;
  int n_nodes = 0;
  double mean_degree = 0.0;  // average total degree <k>
  double gamma = 3.0;        // SF only
  bool directed = false;
  std::uint64_t seed = 0;
};

struct DegreeStats {
  double mean = 0.0;  // mean total (in + out) degree
  int min = 0;
  int max = 0;
  int isolated = 0;
};

// Erdos-Renyi: every unordered pair independently with p = <k>/(N-1), or
// every ordered pair with p = <k>/(2(N-1)) when directed.
Topology generate_er(const GraphSpec& spec);

// Static-model scale-free graph with fitness (i+1)^(-1/(gamma-1)), exactly
// floor(N<k>/2) edges. Gives up with GenerationStalled after
// sf_attempt_cap(target) pair draws.
Topology generate_sf(const GraphSpec& spec);

Topology generate(const GraphSpec& spec);

std::int64_t sf_attempt_cap(std::int64_t target_edges);

DegreeStats degree_stats(const Topology& t);

// Edge-list text format:
//   N <n> directed <0|1>
//   <src> <dst>
//   ...
void write_edge_list(std::ostream& out, const Topology& t);
Topology read_edge_list(std::istream& in);
void save_edge_list(const std::string& path, const Topology& t);
Topology load_edge_list(const std::string& path);

const char* to_string(GraphModel m);
GraphModel parse_graph_model(const std::string& name);

}  // namespace ectrl
