#include "ectrl/dynamics.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

#include "ectrl/error.hpp"
#include "ectrl/rng.hpp"

namespace ectrl {

bool UnitType::same_spectrum(const UnitType& other) const {
  if (eigenvalues.size() != other.eigenvalues.size()) return false;
  auto a = eigenvalues, b = other.eigenvalues;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

UnitType make_unit_type(int order, std::vector<Rational> eigenvalues, int type_id) {
  if (order < 1) throw Error(ErrorCode::ContractViolation, "unit order must be >= 1");
  if (eigenvalues.size() != static_cast<std::size_t>(order))
    throw Error(ErrorCode::ContractViolation, "unit of order " + std::to_string(order) + " needs exactly " +
                                                  std::to_string(order) + " eigenvalues");
  // poly holds monic prod (x - l_j), low degree first.
  std::vector<Rational> poly{Rational(1)};
  for (const Rational& l : eigenvalues) {
    std::vector<Rational> next(poly.size() + 1, Rational(0));
    for (std::size_t k = 0; k < poly.size(); ++k) {
      next[k + 1] += poly[k];
      next[k] -= l * poly[k];
    }
    poly = std::move(next);
  }
  UnitType u;
  u.order = order;
  u.type_id = type_id;
  u.coefficients.resize(static_cast<std::size_t>(order));
  for (int k = 0; k < order; ++k) u.coefficients[static_cast<std::size_t>(k)] = -poly[static_cast<std::size_t>(k)];
  u.eigenvalues = std::move(eigenvalues);
  return u;
}

UnitType self_loop(const Rational& weight, int type_id) { return make_unit_type(1, {weight}, type_id); }

std::vector<Rational> companion_block(const UnitType& u) {
  const auto d = static_cast<std::size_t>(u.order);
  std::vector<Rational> block(d * d, Rational(0));
  for (std::size_t r = 0; r + 1 < d; ++r) block[r * d + r + 1] = 1;
  for (std::size_t k = 0; k < d; ++k) block[(d - 1) * d + k] = u.coefficients[k];
  return block;
}

Rational characteristic_value(const UnitType& u, const Rational& x) {
  // x^d - a_{d-1} x^{d-1} - ... - a_0, Horner.
  Rational acc = 1;
  for (int k = u.order - 1; k >= 0; --k) acc = acc * x - u.coefficients[static_cast<std::size_t>(k)];
  return acc;
}

std::vector<int> largest_remainder_counts(const std::vector<Rational>& densities, int n) {
  std::vector<int> counts(densities.size(), 0);
  std::vector<Rational> remainder(densities.size());
  int assigned = 0;
  for (std::size_t i = 0; i < densities.size(); ++i) {
    Rational share = densities[i] * n;
    BigInt whole = share.get_num() / share.get_den();  // share >= 0, truncation is floor
    counts[i] = static_cast<int>(whole.get_si());
    remainder[i] = share - Rational(whole);
    assigned += counts[i];
  }
  std::vector<std::size_t> order(densities.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < n && k < order.size(); ++k, ++assigned) ++counts[order[k]];
  return counts;
}

Assignment assign_types(std::vector<UnitType> types, std::vector<Rational> densities, int n_nodes,
                        std::uint64_t seed) {
  if (types.empty()) throw Error(ErrorCode::InvalidAssignment, "no unit types");
  if (types.size() != densities.size())
    throw Error(ErrorCode::InvalidAssignment, "types and densities differ in length");
  if (n_nodes < 0) throw Error(ErrorCode::InvalidAssignment, "negative node count");
  Rational sum = 0;
  for (const Rational& r : densities) {
    if (r < 0 || r > 1) throw Error(ErrorCode::InvalidAssignment, "density outside [0,1]");
    sum += r;
  }
  if (sum != 1) throw Error(ErrorCode::InvalidAssignment, "densities sum to " + format_rational(sum) + ", not 1");
  for (std::size_t i = 0; i < types.size(); ++i) {
    if (types[i].order != types.front().order)
      throw Error(ErrorCode::InvalidAssignment, "unit types mix orders");
    for (std::size_t j = 0; j < i; ++j)
      if (types[i].same_spectrum(types[j]))
        throw Error(ErrorCode::InvalidAssignment,
                    "types " + std::to_string(j) + " and " + std::to_string(i) + " share a spectrum");
  }

  Assignment a;
  a.counts = largest_remainder_counts(densities, n_nodes);
  a.node_type.reserve(static_cast<std::size_t>(n_nodes));
  for (std::size_t i = 0; i < a.counts.size(); ++i)
    a.node_type.insert(a.node_type.end(), static_cast<std::size_t>(a.counts[i]), static_cast<int>(i));
  Rng rng(seed);
  rng.shuffle(a.node_type);
  a.types = std::move(types);
  a.densities = std::move(densities);
  a.seed = seed;
  return a;
}

std::pair<int, int> coupling_position(int order, int source, int target) {
  return {order * target + order - 1, order * source};
}

StateMatrix assemble(const Topology& t, const Assignment& a) {
  return assemble(t, a, std::vector<std::optional<Rational>>(t.edges.size()));
}

StateMatrix assemble(const Topology& t, const Assignment& a,
                     const std::vector<std::optional<Rational>>& fixed_weights) {
  if (a.node_type.size() != static_cast<std::size_t>(t.n_nodes))
    throw Error(ErrorCode::InvalidAssignment, "assignment covers " + std::to_string(a.node_type.size()) +
                                                  " nodes, topology has " + std::to_string(t.n_nodes));
  if (fixed_weights.size() != t.edges.size())
    throw Error(ErrorCode::ContractViolation, "fixed weight list must match the edge list");
  const int d = a.order();
  for (const UnitType& u : a.types)
    if (u.order != d) throw Error(ErrorCode::InvalidAssignment, "unit types mix orders");

  StateMatrix m;
  m.order = d;
  m.n_nodes = t.n_nodes;
  m.dim = d * t.n_nodes;
  m.symmetric_pattern = !t.directed && d == 1;
  m.entries.reserve(static_cast<std::size_t>(t.n_nodes * d) + 2 * t.edges.size());

  std::vector<std::vector<Rational>> blocks;
  for (const UnitType& u : a.types) blocks.push_back(companion_block(u));
  for (int v = 0; v < t.n_nodes; ++v) {
    const auto& block = blocks[static_cast<std::size_t>(a.node_type[static_cast<std::size_t>(v)])];
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) {
        const bool structural = (c == r + 1) || (r == d - 1);
        if (structural)
          m.entries.push_back({d * v + r, d * v + c, block[static_cast<std::size_t>(r * d + c)]});
      }
  }

  for (std::size_t e = 0; e < t.edges.size(); ++e) {
    const Edge& edge = t.edges[e];
    EntryValue value;
    if (fixed_weights[e]) {
      value = *fixed_weights[e];
    } else {
      value = FreeParam{m.n_params++};
    }
    auto [row, col] = coupling_position(d, edge.source, edge.target);
    m.entries.push_back({row, col, value});
    if (!t.directed) {
      auto [rrow, rcol] = coupling_position(d, edge.target, edge.source);
      m.entries.push_back({rrow, rcol, value});
    }
  }

  for (const UnitType& u : a.types) m.candidates.insert(m.candidates.end(), u.eigenvalues.begin(), u.eigenvalues.end());
  for (const auto& w : fixed_weights)
    if (w) m.candidates.push_back(*w);
  std::sort(m.candidates.begin(), m.candidates.end());
  m.candidates.erase(std::unique(m.candidates.begin(), m.candidates.end()), m.candidates.end());
  return m;
}

std::vector<Rational> to_dense(const StateMatrix& m, const std::vector<Rational>& params) {
  if (params.size() < static_cast<std::size_t>(m.n_params))
    throw Error(ErrorCode::ContractViolation, "not enough parameter values");
  const auto n = static_cast<std::size_t>(m.dim);
  std::vector<Rational> dense(n * n, Rational(0));
  for (const MatrixEntry& e : m.entries) {
    auto& slot = dense[static_cast<std::size_t>(e.row) * n + static_cast<std::size_t>(e.col)];
    if (const auto* p = std::get_if<FreeParam>(&e.value))
      slot += params[static_cast<std::size_t>(p->id)];
    else
      slot += std::get<Rational>(e.value);
  }
  return dense;
}

void write_triplets(std::ostream& out, const StateMatrix& m) {
  for (const MatrixEntry& e : m.entries) {
    out << e.row << ' ' << e.col << ' ';
    if (const auto* p = std::get_if<FreeParam>(&e.value)) {
      out << 'P' << p->id;
    } else {
      const Rational& q = std::get<Rational>(e.value);
      out << 'C' << q.get_num().get_str() << '/' << q.get_den().get_str();
    }
    out << '\n';
  }
}

Rational delta_exact(const std::vector<Rational>& densities) {
  if (densities.empty()) throw Error(ErrorCode::ContractViolation, "delta needs at least one type");
  const Rational uniform(1, static_cast<unsigned long>(densities.size()));
  Rational total = 0;
  for (const Rational& r : densities) total += abs(Rational(r - uniform));
  return total;
}

double delta(const std::vector<Rational>& densities) { return to_double(delta_exact(densities)); }

double delta(const Assignment& a) { return delta(a.densities); }

std::vector<std::array<Rational, 3>> densities_on_simplex(const Rational& step) {
  if (step <= 0 || step > 1) throw Error(ErrorCode::InvalidConfig, "simplex step must lie in (0, 1]");
  const Rational inverse = 1 / step;
  if (inverse.get_den() != 1) throw Error(ErrorCode::InvalidConfig, "simplex step must divide 1");
  const long k = inverse.get_num().get_si();
  std::vector<std::array<Rational, 3>> points;
  points.reserve(static_cast<std::size_t>((k + 1) * (k + 2) / 2));
  for (long i = 0; i <= k; ++i)
    for (long j = 0; j <= k - i; ++j) {
      Rational a(i, k), b(j, k), c(k - i - j, k);
      a.canonicalize();
      b.canonicalize();
      c.canonicalize();
      points.push_back({a, b, c});
    }
  return points;
}

}  // namespace ectrl
