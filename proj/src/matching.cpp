#include "ectrl/matching.hpp"

#include <limits>

#include "ectrl/error.hpp"

namespace ectrl {

namespace {

constexpr int kInf = std::numeric_limits<int>::max();

class HopcroftKarp {
 public:
  HopcroftKarp(int n_left, int n_right, const std::vector<std::vector<int>>& adj)
      : adj_(adj),
        dist_(static_cast<std::size_t>(n_left)),
        next_edge_(static_cast<std::size_t>(n_left)),
        queue_(static_cast<std::size_t>(n_left)) {
    m_.mate_left.assign(static_cast<std::size_t>(n_left), -1);
    m_.mate_right.assign(static_cast<std::size_t>(n_right), -1);
  }

  Matching run() {
    while (bfs()) {
      for (std::size_t u = 0; u < adj_.size(); ++u) next_edge_[u] = 0;
      for (int u = 0; u < static_cast<int>(adj_.size()); ++u)
        if (m_.mate_left[static_cast<std::size_t>(u)] < 0 && augment(u)) ++m_.size;
    }
    return std::move(m_);
  }

 private:
  // Layers free left vertices at distance 0; true if some free right vertex is reachable.
  bool bfs() {
    std::size_t head = 0, tail = 0;
    for (std::size_t u = 0; u < adj_.size(); ++u) {
      if (m_.mate_left[u] < 0) {
        dist_[u] = 0;
        queue_[tail++] = static_cast<int>(u);
      } else {
        dist_[u] = kInf;
      }
    }
    bool found = false;
    while (head < tail) {
      const auto u = static_cast<std::size_t>(queue_[head++]);
      for (int v : adj_[u]) {
        const int w = m_.mate_right[static_cast<std::size_t>(v)];
        if (w < 0) {
          found = true;
        } else if (dist_[static_cast<std::size_t>(w)] == kInf) {
          dist_[static_cast<std::size_t>(w)] = dist_[u] + 1;
          queue_[tail++] = w;
        }
      }
    }
    return found;
  }

  // Iterative DFS along the layered graph.
  bool augment(int root) {
    std::vector<int> stack{root};
    while (!stack.empty()) {
      const auto u = static_cast<std::size_t>(stack.back());
      auto& k = next_edge_[u];
      if (k >= adj_[u].size()) {
        dist_[u] = kInf;
        stack.pop_back();
        continue;
      }
      const int v = adj_[u][k];
      const int w = m_.mate_right[static_cast<std::size_t>(v)];
      if (w < 0) {
        // Flip the path root .. u -> v.
        int right = v;
        for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
          const auto left = static_cast<std::size_t>(*it);
          const int previous = m_.mate_left[left];
          m_.mate_left[left] = right;
          m_.mate_right[static_cast<std::size_t>(right)] = static_cast<int>(left);
          right = previous;
        }
        return true;
      }
      ++k;
      if (dist_[static_cast<std::size_t>(w)] == dist_[u] + 1) stack.push_back(w);
    }
    return false;
  }

  const std::vector<std::vector<int>>& adj_;
  std::vector<int> dist_;
  std::vector<std::size_t> next_edge_;
  std::vector<int> queue_;
  Matching m_;
};

}  // namespace

Matching hopcroft_karp(int n_left, int n_right, const std::vector<std::vector<int>>& adjacency) {
  if (adjacency.size() != static_cast<std::size_t>(n_left))
    throw Error(ErrorCode::ContractViolation, "adjacency size must equal n_left");
  for (const auto& row : adjacency)
    for (int v : row)
      if (v < 0 || v >= n_right) throw Error(ErrorCode::ContractViolation, "right vertex out of range");
  return HopcroftKarp(n_left, n_right, adjacency).run();
}

}  // namespace ectrl
