#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "ectrl/dynamics.hpp"
#include "ectrl/rational.hpp"

namespace ectrl {

inline constexpr std::uint32_t kPrime = 0x7fffffffu;  // 2^31 - 1

// Arithmetic in GF(2^31 - 1).
namespace gf {

inline std::uint32_t reduce(std::uint64_t x) {
  x = (x & kPrime) + (x >> 31);
  x = (x & kPrime) + (x >> 31);
  return static_cast<std::uint32_t>(x >= kPrime ? x - kPrime : x);
}
inline std::uint32_t add(std::uint32_t a, std::uint32_t b) { return reduce(std::uint64_t{a} + b); }
inline std::uint32_t sub(std::uint32_t a, std::uint32_t b) { return reduce(std::uint64_t{a} + kPrime - b); }
inline std::uint32_t mul(std::uint32_t a, std::uint32_t b) { return reduce(std::uint64_t{a} * b); }
std::uint32_t pow(std::uint32_t base, std::uint64_t exp);
inline std::uint32_t inverse(std::uint32_t a) { return pow(a, kPrime - 2); }

// Residue of an exact rational; throws UnrepresentableConstant when the
// denominator is a multiple of the prime.
std::uint32_t residue(const Rational& q);

}  // namespace gf

struct FieldMatrix {
  int dim = 0;
  std::vector<std::uint32_t> data;  // row-major, entries in [0, p)

  explicit FieldMatrix(int n = 0) : dim(n), data(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0) {}
  std::uint32_t& at(int r, int c) { return data[static_cast<std::size_t>(r) * static_cast<std::size_t>(dim) + static_cast<std::size_t>(c)]; }
  std::uint32_t at(int r, int c) const { return data[static_cast<std::size_t>(r) * static_cast<std::size_t>(dim) + static_cast<std::size_t>(c)]; }
};

void write_field_matrix(std::ostream& out, const FieldMatrix& fm);

enum class RankMethod { FF_GENERIC, FP_SVD, EXACT_RATIONAL };
const char* to_string(RankMethod m);

struct RankResult {
  int rank = 0;
  RankMethod method = RankMethod::FF_GENERIC;
  int trials = 0;  // instantiations actually eliminated
  // Upper bound on P(rank < generic rank). Zero when the rank met the
  // structural (term-rank) upper bound and is therefore exact.
  double failure_bound = 0.0;
  int term_rank = -1;  // structural upper bound, FF only
};

// Phi - shift I over GF(p): each free parameter becomes an independent
// uniform nonzero residue drawn from `seed` (shared ids share a residue).
FieldMatrix instantiate(const StateMatrix& m, const Rational& shift, std::uint64_t seed);

// Rank over GF(p) by Gaussian elimination with row pivoting.
int rank_ff(FieldMatrix fm);

// Maximum number of nonzero entries of Phi - shift I no two of which share
// a row or column; an upper bound on the generic rank.
int term_rank(const StateMatrix& m, const Rational& shift);

// Generic rank of Phi - shift I: max of rank_ff over independent
// instantiations, trial t seeded by derive_seed({seed, t}). Stops early once
// the term-rank bound is met.
RankResult generic_rank(const StateMatrix& m, const Rational& shift, int trials = 3, std::uint64_t seed = 0);

inline constexpr double kDefaultRankTol = 1e-10;

// Number of singular values above rel_tol * sigma_max * max(rows, cols).
int rank_fp(const Eigen::MatrixXd& a, double rel_tol = kDefaultRankTol);

struct RationalMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<Rational> data;  // row-major

  RationalMatrix() = default;
  RationalMatrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), Rational(0)) {}
  Rational& at(int r, int c) { return data[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c)]; }
  const Rational& at(int r, int c) const { return data[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c)]; }
};

inline constexpr int kExactRankCap = 64;

// Exact rank over Q by fraction-free (Bareiss) elimination. `cap` bounds the
// smaller dimension; the larger may be up to cap^2 (Kalman block matrices).
int rank_exact(const RationalMatrix& a, int cap = kExactRankCap);

}  // namespace ectrl
