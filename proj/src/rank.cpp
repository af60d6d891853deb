#include "ectrl/rank.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "ectrl/error.hpp"
#include "ectrl/matching.hpp"
#include "ectrl/rng.hpp"

namespace ectrl {

namespace gf {

std::uint32_t pow(std::uint32_t base, std::uint64_t exp) {
  std::uint32_t result = 1;
  while (exp) {
    if (exp & 1) result = mul(result, base);
    base = mul(base, base);
    exp >>= 1;
  }
  return result;
}

std::uint32_t residue(const Rational& q) {
  const BigInt p(kPrime);
  BigInt den = q.get_den() % p;
  if (den == 0)
    throw Error(ErrorCode::UnrepresentableConstant, format_rational(q) + " has a denominator divisible by 2^31-1");
  BigInt num = q.get_num() % p;
  if (num < 0) num += p;
  return mul(static_cast<std::uint32_t>(num.get_ui()), inverse(static_cast<std::uint32_t>(den.get_ui())));
}

}  // namespace gf

const char* to_string(RankMethod m) {
  switch (m) {
    case RankMethod::FF_GENERIC: return "FF_GENERIC";
    case RankMethod::FP_SVD: return "FP_SVD";
    case RankMethod::EXACT_RATIONAL: return "EXACT_RATIONAL";
  }
  return "?";
}

void write_field_matrix(std::ostream& out, const FieldMatrix& fm) {
  for (int r = 0; r < fm.dim; ++r) {
    for (int c = 0; c < fm.dim; ++c) out << (c ? " " : "") << fm.at(r, c);
    out << '\n';
  }
}

FieldMatrix instantiate(const StateMatrix& m, const Rational& shift, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::uint32_t> params(static_cast<std::size_t>(m.n_params));
  for (auto& v : params) v = static_cast<std::uint32_t>(1 + rng.below(kPrime - 1));
  FieldMatrix fm(m.dim);
  for (const MatrixEntry& e : m.entries) {
    std::uint32_t value;
    if (const auto* p = std::get_if<FreeParam>(&e.value))
      value = params[static_cast<std::size_t>(p->id)];
    else
      value = gf::residue(std::get<Rational>(e.value));
    fm.at(e.row, e.col) = gf::add(fm.at(e.row, e.col), value);
  }
  const std::uint32_t s = gf::residue(shift);
  for (int i = 0; i < m.dim; ++i) fm.at(i, i) = gf::sub(fm.at(i, i), s);
  return fm;
}

int rank_ff(FieldMatrix fm) {
  const int n = fm.dim;
  const auto stride = static_cast<std::size_t>(n);
  std::uint32_t* a = fm.data.data();
  int rank = 0;
  for (int c = 0; c < n && rank < n; ++c) {
    int pivot = -1;
    for (int r = rank; r < n; ++r)
      if (a[static_cast<std::size_t>(r) * stride + static_cast<std::size_t>(c)] != 0) {
        pivot = r;
        break;
      }
    if (pivot < 0) continue;
    std::uint32_t* prow = a + static_cast<std::size_t>(rank) * stride;
    if (pivot != rank) std::swap_ranges(prow + c, prow + n, a + static_cast<std::size_t>(pivot) * stride + c);
    const std::uint32_t inv = gf::inverse(prow[c]);
    for (int r = pivot + 1; r < n; ++r) {
      std::uint32_t* row = a + static_cast<std::size_t>(r) * stride;
      if (row[c] == 0) continue;
      // row <- row - f * prow, written as row + (p - f) * prow.
      const std::uint64_t neg = kPrime - gf::mul(row[c], inv);
      row[c] = 0;
      for (int k = c + 1; k < n; ++k) {
        std::uint64_t x = std::uint64_t{row[k]} + neg * prow[k];
        x = (x & kPrime) + (x >> 31);
        x = (x & kPrime) + (x >> 31);
        row[k] = static_cast<std::uint32_t>(x >= kPrime ? x - kPrime : x);
      }
    }
    ++rank;
  }
  return rank;
}

int term_rank(const StateMatrix& m, const Rational& shift) {
  const auto n = static_cast<std::size_t>(m.dim);
  std::vector<std::vector<int>> adjacency(n);
  std::vector<char> has_diagonal(n, 0);
  for (const MatrixEntry& e : m.entries) {
    if (e.row == e.col) {
      has_diagonal[static_cast<std::size_t>(e.row)] = 1;
      // Free parameters never sit on the diagonal; constants do.
      const bool nonzero = std::holds_alternative<FreeParam>(e.value) || std::get<Rational>(e.value) != shift;
      if (nonzero) adjacency[static_cast<std::size_t>(e.row)].push_back(e.col);
      continue;
    }
    if (std::holds_alternative<FreeParam>(e.value) || std::get<Rational>(e.value) != 0)
      adjacency[static_cast<std::size_t>(e.row)].push_back(e.col);
  }
  if (shift != 0)
    for (std::size_t i = 0; i < n; ++i)
      if (!has_diagonal[i]) adjacency[i].push_back(static_cast<int>(i));
  return hopcroft_karp(m.dim, m.dim, adjacency).size;
}

RankResult generic_rank(const StateMatrix& m, const Rational& shift, int trials, std::uint64_t seed) {
  if (trials < 1) throw Error(ErrorCode::ContractViolation, "generic_rank needs at least one trial");
  RankResult result;
  result.method = RankMethod::FF_GENERIC;
  result.term_rank = term_rank(m, shift);
  for (int t = 0; t < trials; ++t) {
    const int r = rank_ff(instantiate(m, shift, derive_seed({seed, static_cast<std::uint64_t>(t)})));
    result.rank = std::max(result.rank, r);
    result.trials = t + 1;
    if (result.rank == result.term_rank) break;
  }
  result.failure_bound =
      result.rank == result.term_rank ? 0.0 : std::pow(static_cast<double>(m.dim) / kPrime, result.trials);
  return result;
}

int rank_fp(const Eigen::MatrixXd& a, double rel_tol) {
  if (a.size() == 0) return 0;
  if (!a.allFinite()) throw Error(ErrorCode::NumericFailure, "rank_fp: non-finite entry");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  const double threshold = rel_tol * sv(0) * static_cast<double>(std::max(a.rows(), a.cols()));
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > threshold) ++rank;
  return rank;
}

int rank_exact(const RationalMatrix& a, int cap) {
  const int small = std::min(a.rows, a.cols);
  const int large = std::max(a.rows, a.cols);
  if (small > cap || large > cap * cap)
    throw Error(ErrorCode::OracleTooLarge, std::to_string(a.rows) + "x" + std::to_string(a.cols) +
                                               " exceeds the exact-rank cap " + std::to_string(cap));
  // Clear denominators row by row; row scaling preserves rank.
  std::vector<std::vector<BigInt>> m(static_cast<std::size_t>(a.rows), std::vector<BigInt>(static_cast<std::size_t>(a.cols)));
  for (int r = 0; r < a.rows; ++r) {
    BigInt lcm = 1;
    for (int c = 0; c < a.cols; ++c) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), a.at(r, c).get_den_mpz_t());
    for (int c = 0; c < a.cols; ++c)
      m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = a.at(r, c).get_num() * (lcm / a.at(r, c).get_den());
  }

  int rank = 0;
  BigInt previous = 1;
  BigInt t;
  for (int c = 0; c < a.cols && rank < a.rows; ++c) {
    int pivot = -1;
    for (int r = rank; r < a.rows; ++r)
      if (m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] != 0) {
        pivot = r;
        break;
      }
    if (pivot < 0) continue;
    std::swap(m[static_cast<std::size_t>(rank)], m[static_cast<std::size_t>(pivot)]);
    const auto& prow = m[static_cast<std::size_t>(rank)];
    const BigInt& p = prow[static_cast<std::size_t>(c)];
    for (int r = rank + 1; r < a.rows; ++r) {
      auto& row = m[static_cast<std::size_t>(r)];
      for (int k = c + 1; k < a.cols; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        // row[k] = (row[k] * p - row[c] * prow[k]) / previous, exact.
        t = row[kk] * p;
        t -= row[static_cast<std::size_t>(c)] * prow[kk];
        mpz_divexact(row[kk].get_mpz_t(), t.get_mpz_t(), previous.get_mpz_t());
      }
      row[static_cast<std::size_t>(c)] = 0;
    }
    previous = p;
    ++rank;
  }
  return rank;
}

}  // namespace ectrl
