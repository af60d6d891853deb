#include "doctest.h"

#include <chrono>
#include <numeric>
#include <sstream>

#include "ectrl/control.hpp"
#include "ectrl/error.hpp"
#include "ectrl/rank.hpp"
#include "ectrl/rng.hpp"

using namespace ectrl;

namespace {

// Independent oracle: plain Gauss-Jordan over Q with mpq arithmetic.
int rank_by_fractions(RationalMatrix a) {
  int rank = 0;
  for (int c = 0; c < a.cols && rank < a.rows; ++c) {
    int pivot = -1;
    for (int r = rank; r < a.rows; ++r)
      if (a.at(r, c) != 0) {
        pivot = r;
        break;
      }
    if (pivot < 0) continue;
    for (int k = 0; k < a.cols; ++k) std::swap(a.at(rank, k), a.at(pivot, k));
    for (int r = 0; r < a.rows; ++r) {
      if (r == rank || a.at(r, c) == 0) continue;
      const Rational f = a.at(r, c) / a.at(rank, c);
      for (int k = c; k < a.cols; ++k) a.at(r, k) -= f * a.at(rank, k);
    }
    ++rank;
  }
  return rank;
}

RationalMatrix from_ints(int rows, int cols, std::initializer_list<long> values) {
  RationalMatrix m(rows, cols);
  std::size_t i = 0;
  for (long v : values) m.data[i++] = v;
  return m;
}

FieldMatrix field(int n, std::initializer_list<std::uint32_t> values) {
  FieldMatrix fm(n);
  std::size_t i = 0;
  for (auto v : values) fm.data[i++] = v;
  return fm;
}

StateMatrix plain(const Topology& t, std::vector<Rational> loops = {}) {
  if (loops.empty()) loops.assign(static_cast<std::size_t>(t.n_nodes), Rational(0));
  std::vector<UnitType> types;
  std::vector<Rational> spectrum;
  Assignment a;
  for (int v = 0; v < t.n_nodes; ++v) {
    auto it = std::find(spectrum.begin(), spectrum.end(), loops[static_cast<std::size_t>(v)]);
    if (it == spectrum.end()) {
      spectrum.push_back(loops[static_cast<std::size_t>(v)]);
      types.push_back(self_loop(spectrum.back(), static_cast<int>(types.size())));
      it = spectrum.end() - 1;
    }
    a.node_type.push_back(static_cast<int>(it - spectrum.begin()));
  }
  a.types = types;
  return assemble(t, a);
}

Topology chain(int n) {
  Topology t{n, true, {}};
  for (int i = 0; i + 1 < n; ++i) t.edges.push_back({i, i + 1});
  return t;
}

}  // namespace

TEST_CASE("field arithmetic") {
  CHECK(gf::mul(gf::inverse(12345), 12345) == 1);
  CHECK(gf::residue(Rational(-2)) == kPrime - 2);
  CHECK(gf::mul(gf::residue(Rational(1, 3)), 3) == 1);
  CHECK_THROWS_AS(gf::residue(Rational(1, kPrime)), Error);
  CHECK(gf::reduce(std::uint64_t{kPrime} * kPrime) == 0);
}

TEST_CASE("instantiate") {
  SUBCASE("zero pattern") {
    StateMatrix m;
    m.dim = 3;
    const FieldMatrix fm = instantiate(m, Rational(0), 1);
    CHECK(std::all_of(fm.data.begin(), fm.data.end(), [](auto v) { return v == 0; }));
  }
  SUBCASE("diagonal constants minus the shift") {
    const StateMatrix m = plain(Topology{3, true, {}}, {Rational(5), Rational(5), Rational(3)});
    const FieldMatrix fm = instantiate(m, Rational(5), 1);
    CHECK(fm.at(0, 0) == 0);
    CHECK(fm.at(1, 1) == 0);
    CHECK(fm.at(2, 2) == kPrime - 2);
  }
  SUBCASE("shared parameters share a residue") {
    const StateMatrix m = plain(Topology{4, false, {{0, 1}, {1, 2}, {2, 3}}});
    const FieldMatrix fm = instantiate(m, Rational(0), 77);
    CHECK(fm.at(0, 1) == fm.at(1, 0));
    CHECK(fm.at(1, 2) == fm.at(2, 1));
    CHECK(fm.at(0, 1) != 0);
  }
  SUBCASE("unrepresentable shift") {
    const StateMatrix m = plain(Topology{2, true, {}});
    CHECK_THROWS_AS(instantiate(m, Rational(1, kPrime), 1), Error);
  }
  SUBCASE("dump") {
    std::ostringstream out;
    write_field_matrix(out, field(2, {1, 2, 3, 4}));
    CHECK(out.str() == "1 2\n3 4\n");
  }
}

TEST_CASE("rank_ff") {
  CHECK(rank_ff(field(3, {1, 0, 0, 0, 1, 0, 0, 0, 1})) == 3);
  CHECK(rank_ff(field(2, {1, 2, 2, 4})) == 1);
  CHECK(rank_ff(FieldMatrix(5)) == 0);
  CHECK(rank_ff(field(3, {0, 0, 1, 0, 1, 0, 0, 0, 0})) == 2);
}

TEST_CASE("rank_ff is invariant under row and column permutations") {
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(15));
    const int r = static_cast<int>(rng.below(static_cast<std::uint64_t>(n) + 1));
    // Product of n x r and r x n random matrices: rank <= r.
    FieldMatrix fm(n);
    std::vector<std::uint32_t> left(static_cast<std::size_t>(n * r)), right(static_cast<std::size_t>(r * n));
    for (auto& v : left) v = static_cast<std::uint32_t>(rng.below(kPrime));
    for (auto& v : right) v = static_cast<std::uint32_t>(rng.below(kPrime));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < r; ++k)
          fm.at(i, j) = gf::add(fm.at(i, j), gf::mul(left[static_cast<std::size_t>(i * r + k)], right[static_cast<std::size_t>(k * n + j)]));
    std::vector<int> rows(static_cast<std::size_t>(n)), cols(static_cast<std::size_t>(n));
    std::iota(rows.begin(), rows.end(), 0);
    std::iota(cols.begin(), cols.end(), 0);
    rng.shuffle(rows);
    rng.shuffle(cols);
    FieldMatrix permuted(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) permuted.at(i, j) = fm.at(rows[static_cast<std::size_t>(i)], cols[static_cast<std::size_t>(j)]);
    const int base = rank_ff(fm);
    CHECK(base <= r);
    CHECK(rank_ff(permuted) == base);
  }
}

TEST_CASE("generic_rank examples") {
  const RankResult c = generic_rank(plain(chain(5)), Rational(0), 3, 1);
  CHECK(c.rank == 4);
  CHECK(c.method == RankMethod::FF_GENERIC);

  const Topology star{4, true, {{0, 1}, {0, 2}, {0, 3}}};
  const RankResult s = generic_rank(plain(star), Rational(0), 3, 1);
  CHECK(s.rank == 1);
  CHECK(4 - s.rank == 3);

  const StateMatrix loops = plain(Topology{4, true, {}}, std::vector<Rational>(4, Rational(5)));
  CHECK(generic_rank(loops, Rational(5), 3, 1).rank == 0);

  // Confirm the two DERIVED values with exact elimination on a rational instance.
  CHECK(rank_exact(instantiate_integer(plain(chain(5)), 9)) == 4);
  CHECK(rank_exact(instantiate_integer(plain(star), 9)) == 1);
  CHECK_THROWS_AS(generic_rank(plain(chain(3)), Rational(0), 0, 1), Error);
}

TEST_CASE("failure bound respects (dim/p)^trials") {
  // Two equal constants make generic rank fall below the term rank, so all trials run.
  const StateMatrix m = plain(Topology{2, false, {{0, 1}}}, {Rational(1), Rational(1)});
  const RankResult r = generic_rank(m, Rational(0), 3, 5);
  CHECK(r.trials <= 3);
  CHECK(r.failure_bound <= std::pow(2.0 / kPrime, r.trials));
}

TEST_CASE("generic_rank matches exact rank on random small structured matrices") {
  Rng rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(9));
    const int d = 1 + static_cast<int>(rng.below(2));
    const bool directed = rng.below(2) == 0;
    const Topology t = generate_er(GraphSpec{GraphModel::ER, n, std::min<double>(n - 1, rng.uniform(0.5, 3.0)), 3.0, directed, rng.next()});
    std::vector<UnitType> types{make_unit_type(d, std::vector<Rational>(d, Rational(0)), 0)};
    std::vector<Rational> rho{Rational(1, 2), Rational(1, 2)};
    if (d == 1)
      types.push_back(self_loop(Rational(rng.range(1, 4))));
    else
      types.push_back(make_unit_type(2, {Rational(1), Rational(rng.range(2, 4))}));
    const StateMatrix m = assemble(t, assign_types(types, rho, n, rng.next()));
    REQUIRE(m.dim <= 20);
    for (const Rational& lambda : std::vector<Rational>{Rational(0), m.candidates.back()}) {
      RationalMatrix exact = instantiate_integer(m, rng.next());
      for (int i = 0; i < m.dim; ++i) exact.at(i, i) -= lambda;
      CHECK(generic_rank(m, lambda, 3, rng.next()).rank == rank_exact(exact));
    }
  }
}

TEST_CASE("term rank bounds generic rank") {
  const StateMatrix m = plain(chain(6));
  CHECK(term_rank(m, Rational(0)) == 5);
  CHECK(term_rank(m, Rational(2)) == 6);
}

TEST_CASE("rank_fp") {
  CHECK(rank_fp(Eigen::MatrixXd::Identity(4, 4)) == 4);
  Eigen::VectorXd u = Eigen::VectorXd::LinSpaced(10, 1, 10), v = Eigen::VectorXd::LinSpaced(10, -3, 7);
  CHECK(rank_fp(u * v.transpose()) == 1);
  Rng rng(8);
  Eigen::MatrixXd r(50, 50);
  for (Eigen::Index i = 0; i < r.size(); ++i) r.data()[i] = rng.uniform(-1, 1);
  r.row(17) = r.row(3);
  CHECK(rank_fp(r) == 49);
  CHECK(rank_fp(Eigen::MatrixXd::Zero(3, 3)) == 0);
}

TEST_CASE("rank_fp agrees with rank_exact on integer matrices") {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(30));
    const int r = static_cast<int>(rng.below(static_cast<std::uint64_t>(n) + 1));
    // Low-rank integer matrix: sum of r integer outer products, entries <= 10^3.
    RationalMatrix q(n, n);
    Eigen::MatrixXd f = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < r; ++k) {
      std::vector<long> a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n));
      for (auto& x : a) x = rng.range(-5, 5);
      for (auto& x : b) x = rng.range(-5, 5);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const long add = a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(j)];
          q.at(i, j) += add;
          f(i, j) += static_cast<double>(add);
        }
    }
    CHECK(rank_fp(f) == rank_exact(q));
  }
}

TEST_CASE("rank_exact") {
  CHECK(rank_exact(from_ints(2, 2, {1, 2, 2, 4})) == 1);
  RationalMatrix hilbert(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) hilbert.at(i, j) = Rational(1, static_cast<unsigned long>(i + j + 1));
  CHECK(rank_exact(hilbert) == 4);
  CHECK(rank_exact(RationalMatrix(3, 3)) == 0);
  CHECK(rank_exact(from_ints(2, 3, {1, 2, 3, 2, 4, 7})) == 2);
  CHECK_THROWS_AS(rank_exact(RationalMatrix(65, 65)), Error);
}

TEST_CASE("rank_exact agrees with plain fraction elimination") {
  Rng rng(12);
  for (int trial = 0; trial < 60; ++trial) {
    const int rows = 1 + static_cast<int>(rng.below(9)), cols = 1 + static_cast<int>(rng.below(12));
    RationalMatrix m(rows, cols);
    for (auto& v : m.data)
      if (rng.below(3)) v = Rational(rng.range(-9, 9), static_cast<unsigned long>(rng.range(1, 4)));
    for (auto& v : m.data) v.canonicalize();
    if (rows > 2)
      for (int c = 0; c < cols; ++c) m.at(rows - 1, c) = m.at(0, c) * 3 - m.at(1, c);
    CHECK(rank_exact(m) == rank_by_fractions(m));
  }
}
