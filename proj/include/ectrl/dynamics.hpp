#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "ectrl/netgen.hpp"
#include "ectrl/rational.hpp"

namespace ectrl {

// A d-th order individual dynamic x^(d) = a_0 x + a_1 x' + ... + a_{d-1} x^(d-1),
// given by its spectrum. The companion coefficients are derived so every
// eigenvalue stays exactly rational.
struct UnitType {
  int order = 1;
  std::vector<Rational> eigenvalues;
  std::vector<Rational> coefficients;  // a_0 .. a_{d-1}
  int type_id = 0;

  // Eigenvalue multiset comparison; distinct types must differ here.
  bool same_spectrum(const UnitType& other) const;
};

UnitType make_unit_type(int order, std::vector<Rational> eigenvalues, int type_id = 0);

// Convenience for first-order self-loops: eigenvalue == self-loop weight.
UnitType self_loop(const Rational& weight, int type_id = 0);

// d x d companion block, row-major: 1 on the superdiagonal, a_k on the last row.
std::vector<Rational> companion_block(const UnitType& u);

// det(x I - companion) evaluated exactly, via the characteristic polynomial.
Rational characteristic_value(const UnitType& u, const Rational& x);

struct Assignment {
  std::vector<UnitType> types;
  std::vector<Rational> densities;
  std::vector<int> counts;     // nodes per type
  std::vector<int> node_type;  // node -> index into types
  std::uint64_t seed = 0;

  int order() const { return types.empty() ? 1 : types.front().order; }
};

// Largest-remainder rounding of densities * n; ties go to the lower index.
std::vector<int> largest_remainder_counts(const std::vector<Rational>& densities, int n);

Assignment assign_types(std::vector<UnitType> types, std::vector<Rational> densities, int n_nodes,
                        std::uint64_t seed);

struct FreeParam {
  int id = 0;
  friend bool operator==(const FreeParam&, const FreeParam&) = default;
};

using EntryValue = std::variant<FreeParam, Rational>;

struct MatrixEntry {
  int row = 0;
  int col = 0;
  EntryValue value;
};

// Mixed matrix Phi = Lambda + A of dimension dN: constant companion blocks
// on the diagonal, one free parameter per coupling (shared across both
// symmetric positions for undirected edges).
struct StateMatrix {
  int dim = 0;
  int order = 1;
  int n_nodes = 0;
  int n_params = 0;
  bool symmetric_pattern = false;  // undirected couplings and d == 1
  std::vector<MatrixEntry> entries;
  // Constants at which Phi - lambda I may lose rank generically: the
  // unit-type eigenvalues plus any extra values a builder registers.
  std::vector<Rational> candidates;
};

// Where the coupling source -> target lands for order d: the source unit's
// 0th-order state drives the target unit's highest-order equation.
std::pair<int, int> coupling_position(int order, int source, int target);

StateMatrix assemble(const Topology& t, const Assignment& a);

// As assemble(), but edge e carries the constant fixed_weights[e] instead of
// a free parameter when that optional is set. The constants join the
// candidate set.
StateMatrix assemble(const Topology& t, const Assignment& a,
                     const std::vector<std::optional<Rational>>& fixed_weights);

// Dense rational matrix (row-major) with free parameter k set to params[k].
std::vector<Rational> to_dense(const StateMatrix& m, const std::vector<Rational>& params);

// Debug dump, one "row col P<id>" or "row col C<num>/<den>" line per entry.
void write_triplets(std::ostream& out, const StateMatrix& m);

Rational delta_exact(const std::vector<Rational>& densities);
double delta(const Assignment& a);
double delta(const std::vector<Rational>& densities);

// Lattice points of the 2-simplex with spacing `step` (1/step must be an
// integer), ordered by rho1 then rho2.
std::vector<std::array<Rational, 3>> densities_on_simplex(const Rational& step);

}  // namespace ectrl
