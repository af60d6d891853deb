#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ectrl/dynamics.hpp"
#include "ectrl/netgen.hpp"
#include "ectrl/rank.hpp"

namespace ectrl {

enum class DriverMethod { ET, ECT_NUMERIC, ECT_SYMMETRIC, SCT_MATCHING, ORACLE };
const char* to_string(DriverMethod m);
DriverMethod parse_driver_method(const std::string& name);

struct CandidateRank {
  Rational eigenvalue;
  int rank = 0;
  double failure_bound = 0.0;
};

struct DriverResult {
  int n_d = 1;
  int dim = 0;
  int n_nodes = 0;
  DriverMethod method = DriverMethod::ET;
  std::optional<Rational> achieving_exact;    // ET
  std::complex<double> achieving_value{0.0};  // every method that has one
  std::vector<CandidateRank> candidate_ranks;  // ET only

  double n_d_frac() const { return dim ? static_cast<double>(n_d) / dim : 0.0; }          // N_D / (dN)
  double n_d_per_node() const { return n_nodes ? static_cast<double>(n_d) / n_nodes : 0.0; }  // N_D / N
};

// Efficient tool: N_D = max(1, dN - min_lambda generic_rank(Phi - lambda I))
// over lambda in {0} + the matrix's candidate set. Candidate k uses seed
// derive_seed({seed, k}).
DriverResult nd_et(const StateMatrix& m, std::uint64_t seed, int trials = 3);

struct EctTolerances {
  double cluster_rel = 1e-6;  // tau_c = cluster_rel * max(1, spectral radius)
  double rank_rel = kDefaultRankTol;
  int dim_cap = 500;
  double cluster_rel_max = 1e-2;  // widest cluster level tried by nd_ect_numeric (x10 steps from cluster_rel)
};

// Maximum geometric multiplicity over the numerically computed spectrum.
DriverResult nd_ect_numeric(const Eigen::MatrixXd& phi, const EctTolerances& tol = {});

// Largest eigenvalue cluster of a symmetric matrix (algebraic == geometric).
DriverResult nd_ect_symmetric(const Eigen::MatrixXd& phi, const EctTolerances& tol = {});

// Structural-control baseline: N_D = max(1, N - |maximum matching|) on the
// out-copy/in-copy bipartite graph. self_loops[i] marks a nonzero first-order
// self-dynamic at node i (empty means none).
DriverResult nd_sct_matching(const Topology& t, const std::vector<bool>& self_loops = {});

// Same baseline on the full zero/nonzero pattern of Phi (any order d).
DriverResult nd_sct_matching(const StateMatrix& m);

inline constexpr int kOracleCap = 12;

// Brute-force Kalman oracle: smallest M such that a random dense integer
// B with M columns (3 draws per M) gives a full-rank controllability matrix
// for a random integer instantiation of Phi.
DriverResult nd_oracle(const StateMatrix& m, std::uint64_t seed, int cap = kOracleCap);

// rank [B, AB, ..., A^(n-1) B] versus the same with A + wI, on a random
// integer instantiation of A (first order, no self-dynamics).
bool kalman_shift_check(const StateMatrix& m, const RationalMatrix& b, const Rational& w, std::uint64_t seed,
                        int cap = kOracleCap);

// Real instantiation: free parameters uniform on [0.5, 1.5].
Eigen::MatrixXd instantiate_real(const StateMatrix& m, std::uint64_t seed);

// Rational instantiation with integer free parameters uniform on [lo, hi].
RationalMatrix instantiate_integer(const StateMatrix& m, std::uint64_t seed, std::int64_t lo = 1,
                                   std::int64_t hi = 1000000);

// [B, AB, ..., A^(n-1) B] for square A (n x n) and B (n x M).
RationalMatrix kalman_matrix(const RationalMatrix& a, const RationalMatrix& b);

}  // namespace ectrl
