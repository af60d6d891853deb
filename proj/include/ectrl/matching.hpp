#pragma once

#include <vector>

namespace ectrl {

struct Matching {
  int size = 0;
  std::vector<int> mate_left;   // left vertex -> right vertex or -1
  std::vector<int> mate_right;  // right vertex -> left vertex or -1
};

// Maximum cardinality matching (Hopcroft-Karp). adjacency[u] lists the
// right-side neighbours of left vertex u.
Matching hopcroft_karp(int n_left, int n_right, const std::vector<std::vector<int>>& adjacency);

}  // namespace ectrl
