#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ectrl/dynamics.hpp"

namespace ectrl {

// Random small system used by the oracle suites. Instance i of a suite with
// master seed s is random_small_system(derive_seed({s, i}), max_dim, i % 2 + 1),
// so any reported instance can be rebuilt from its seed alone.
StateMatrix random_small_system(std::uint64_t seed, int max_dim, int order);

struct OracleRecord {
  int index = 0;
  std::uint64_t seed = 0;
  int dim = 0;
  int order = 1;
  int oracle = 0;
  int et = 0;
  int ect = 0;
  bool agree() const { return oracle == et && et == ect; }
};

struct ShiftRecord {
  int index = 0;
  std::uint64_t seed = 0;
  int n_nodes = 0;
  std::string shift;
  bool equal = false;
};

// nd_oracle vs nd_et vs nd_ect_numeric; max_dim bounds dN (<= the oracle cap).
std::vector<OracleRecord> run_oracle_suite(int instances, int max_dim, std::uint64_t seed);

// kalman_shift_check on random first-order systems with N <= max_n.
std::vector<ShiftRecord> run_shift_suite(int instances, int max_n, std::uint64_t seed);

std::string describe(const OracleRecord& r);
std::string describe(const ShiftRecord& r);

}  // namespace ectrl
