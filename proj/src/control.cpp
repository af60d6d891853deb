#include "ectrl/control.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "ectrl/error.hpp"
#include "ectrl/matching.hpp"
#include "ectrl/rng.hpp"

namespace ectrl {

const char* to_string(DriverMethod m) {
  switch (m) {
    case DriverMethod::ET: return "ET";
    case DriverMethod::ECT_NUMERIC: return "ECT_NUMERIC";
    case DriverMethod::ECT_SYMMETRIC: return "ECT_SYMMETRIC";
    case DriverMethod::SCT_MATCHING: return "SCT_MATCHING";
    case DriverMethod::ORACLE: return "ORACLE";
  }
  return "?";
}

DriverMethod parse_driver_method(const std::string& name) {
  std::string upper = name;
  std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
  if (upper == "ET") return DriverMethod::ET;
  if (upper == "ECT_NUMERIC" || upper == "ECT") return DriverMethod::ECT_NUMERIC;
  if (upper == "ECT_SYMMETRIC") return DriverMethod::ECT_SYMMETRIC;
  if (upper == "SCT_MATCHING" || upper == "SCT") return DriverMethod::SCT_MATCHING;
  if (upper == "ORACLE") return DriverMethod::ORACLE;
  throw Error(ErrorCode::InvalidConfig, "unknown method '" + name + "'");
}

DriverResult nd_et(const StateMatrix& m, std::uint64_t seed, int trials) {
  std::vector<Rational> candidates{Rational(0)};
  candidates.insert(candidates.end(), m.candidates.begin(), m.candidates.end());
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  DriverResult out;
  out.method = DriverMethod::ET;
  out.dim = m.dim;
  out.n_nodes = m.n_nodes;
  int best = -1;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const RankResult r = generic_rank(m, candidates[k], trials, derive_seed({seed, k}));
    out.candidate_ranks.push_back({candidates[k], r.rank, r.failure_bound});
    // Candidates are sorted, so strict < keeps the smallest on ties.
    if (best < 0 || r.rank < out.candidate_ranks[static_cast<std::size_t>(best)].rank) best = static_cast<int>(k);
  }
  const CandidateRank& chosen = out.candidate_ranks[static_cast<std::size_t>(best)];
  out.n_d = std::max(1, m.dim - chosen.rank);
  out.achieving_exact = chosen.eigenvalue;
  out.achieving_value = to_double(chosen.eigenvalue);
  return out;
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  }
};

bool complex_less(std::complex<double> a, std::complex<double> b) {
  return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
}

int rank_fp_complex(const Eigen::MatrixXcd& a, double rel_tol) {
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(a);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  const double threshold = rel_tol * sv(0) * static_cast<double>(std::max(a.rows(), a.cols()));
  return static_cast<int>((sv.array() > threshold).count());
}

void check_square(const Eigen::MatrixXd& phi, int cap, const char* who) {
  if (phi.rows() != phi.cols()) throw Error(ErrorCode::ContractViolation, std::string(who) + ": matrix not square");
  if (phi.rows() > cap)
    throw Error(ErrorCode::ContractViolation, std::string(who) + ": dimension " + std::to_string(phi.rows()) +
                                                  " above cap " + std::to_string(cap));
  if (!phi.allFinite()) throw Error(ErrorCode::NumericFailure, std::string(who) + ": non-finite entry");
}

}  // namespace

DriverResult nd_ect_numeric(const Eigen::MatrixXd& phi, const EctTolerances& tol) {
  check_square(phi, tol.dim_cap, "nd_ect_numeric");
  const int n = static_cast<int>(phi.rows());
  DriverResult out;
  out.method = DriverMethod::ECT_NUMERIC;
  out.dim = n;
  out.n_nodes = n;
  if (n == 0) return out;

  Eigen::EigenSolver<Eigen::MatrixXd> solver(phi, false);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::NumericFailure, "eigensolver did not converge");
  const Eigen::VectorXcd eig = solver.eigenvalues();
  const double radius = eig.cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, radius);
  const double tau = tol.cluster_rel * scale;

  // A defective eigenvalue of multiplicity m comes back scattered over a
  // radius near eps^(1/m), so clusters are formed at several widths; the
  // cluster mean stays accurate. Nullity at a non-eigenvalue is 0, so extra
  // centres cannot raise the maximum.
  std::set<std::vector<int>> seen;
  int best = 0;
  std::complex<double> best_value;
  for (double width = tau; width <= std::max(tau, tol.cluster_rel_max * scale) * (1 + 1e-9); width *= 10) {
    UnionFind uf(n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (std::abs(eig(i) - eig(j)) <= width) uf.unite(i, j);
    std::vector<std::vector<int>> clusters(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) clusters[static_cast<std::size_t>(uf.find(i))].push_back(i);

    for (const auto& members : clusters) {
      if (members.empty() || !seen.insert(members).second) continue;
      if (members.size() == 1 && width > tau) continue;  // already seen as a singleton
      std::complex<double> centre = 0.0;
      for (int i : members) centre += eig(i);
      centre /= static_cast<double>(members.size());
      int mu = 1;  // a simple eigenvalue has geometric multiplicity 1
      if (members.size() > 1) {
        if (std::abs(centre.imag()) <= tau) {
          Eigen::MatrixXd shifted = -phi;
          shifted.diagonal().array() += centre.real();
          mu = n - rank_fp(shifted, tol.rank_rel);
          centre = centre.real();
        } else {
          Eigen::MatrixXcd shifted = -phi.cast<std::complex<double>>();
          shifted.diagonal().array() += centre;
          mu = n - rank_fp_complex(shifted, tol.rank_rel);
        }
      }
      if (mu > best || (mu == best && complex_less(centre, best_value))) {
        best = mu;
        best_value = centre;
      }
    }
  }
  out.n_d = std::max(1, best);
  out.achieving_value = best_value;
  return out;
}

DriverResult nd_ect_symmetric(const Eigen::MatrixXd& phi, const EctTolerances& tol) {
  check_square(phi, tol.dim_cap, "nd_ect_symmetric");
  const double scale = std::max(1.0, phi.cwiseAbs().maxCoeff());
  if ((phi - phi.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw Error(ErrorCode::ContractViolation, "nd_ect_symmetric: matrix is not symmetric");
  const int n = static_cast<int>(phi.rows());
  DriverResult out;
  out.method = DriverMethod::ECT_SYMMETRIC;
  out.dim = n;
  out.n_nodes = n;
  if (n == 0) return out;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(phi, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::NumericFailure, "symmetric eigensolver did not converge");
  const Eigen::VectorXd& eig = solver.eigenvalues();  // ascending
  const double tau = tol.cluster_rel * std::max(1.0, eig.cwiseAbs().maxCoeff());
  int best = 0;
  double best_value = 0.0;
  for (int start = 0; start < n;) {
    int end = start + 1;
    while (end < n && eig(end) - eig(end - 1) <= tau) ++end;
    if (end - start > best) {
      best = end - start;
      best_value = eig.segment(start, end - start).mean();
    }
    start = end;
  }
  out.n_d = std::max(1, best);
  out.achieving_value = best_value;
  return out;
}

DriverResult nd_sct_matching(const Topology& t, const std::vector<bool>& self_loops) {
  if (!self_loops.empty() && self_loops.size() != static_cast<std::size_t>(t.n_nodes))
    throw Error(ErrorCode::ContractViolation, "self-loop mask must cover every node");
  std::vector<std::vector<int>> adjacency(static_cast<std::size_t>(t.n_nodes));
  for (const Edge& e : t.edges) {
    adjacency[static_cast<std::size_t>(e.source)].push_back(e.target);
    if (!t.directed) adjacency[static_cast<std::size_t>(e.target)].push_back(e.source);
  }
  for (std::size_t i = 0; i < self_loops.size(); ++i)
    if (self_loops[i]) adjacency[i].push_back(static_cast<int>(i));
  const Matching matching = hopcroft_karp(t.n_nodes, t.n_nodes, adjacency);
  DriverResult out;
  out.method = DriverMethod::SCT_MATCHING;
  out.dim = t.n_nodes;
  out.n_nodes = t.n_nodes;
  out.n_d = std::max(1, t.n_nodes - matching.size);
  return out;
}

DriverResult nd_sct_matching(const StateMatrix& m) {
  // Edge col -> row of the state graph: left copy = column, right copy = row.
  std::vector<std::vector<int>> adjacency(static_cast<std::size_t>(m.dim));
  for (const MatrixEntry& e : m.entries)
    if (std::holds_alternative<FreeParam>(e.value) || std::get<Rational>(e.value) != 0)
      adjacency[static_cast<std::size_t>(e.col)].push_back(e.row);
  const Matching matching = hopcroft_karp(m.dim, m.dim, adjacency);
  DriverResult out;
  out.method = DriverMethod::SCT_MATCHING;
  out.dim = m.dim;
  out.n_nodes = m.n_nodes;
  out.n_d = std::max(1, m.dim - matching.size);
  return out;
}

Eigen::MatrixXd instantiate_real(const StateMatrix& m, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> params(static_cast<std::size_t>(m.n_params));
  for (auto& v : params) v = rng.uniform(0.5, 1.5);
  Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(m.dim, m.dim);
  for (const MatrixEntry& e : m.entries) {
    if (const auto* p = std::get_if<FreeParam>(&e.value))
      phi(e.row, e.col) += params[static_cast<std::size_t>(p->id)];
    else
      phi(e.row, e.col) += to_double(std::get<Rational>(e.value));
  }
  return phi;
}

RationalMatrix instantiate_integer(const StateMatrix& m, std::uint64_t seed, std::int64_t lo, std::int64_t hi) {
  Rng rng(seed);
  std::vector<Rational> params(static_cast<std::size_t>(m.n_params));
  for (auto& v : params) v = Rational(static_cast<long>(rng.range(lo, hi)));
  RationalMatrix out(m.dim, m.dim);
  out.data = to_dense(m, params);
  return out;
}

RationalMatrix kalman_matrix(const RationalMatrix& a, const RationalMatrix& b) {
  if (a.rows != a.cols || b.rows != a.rows) throw Error(ErrorCode::ContractViolation, "kalman_matrix: shape mismatch");
  const int n = a.rows;
  const int m = b.cols;
  RationalMatrix k(n, n * m);
  RationalMatrix block = b;
  for (int power = 0; power < n; ++power) {
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < m; ++c) k.at(r, power * m + c) = block.at(r, c);
    if (power + 1 == n) break;
    RationalMatrix next(n, m);
    for (int r = 0; r < n; ++r)
      for (int j = 0; j < n; ++j) {
        const Rational& arj = a.at(r, j);
        if (arj == 0) continue;
        for (int c = 0; c < m; ++c) next.at(r, c) += arj * block.at(j, c);
      }
    block = std::move(next);
  }
  return k;
}

DriverResult nd_oracle(const StateMatrix& m, std::uint64_t seed, int cap) {
  if (m.dim > cap)
    throw Error(ErrorCode::OracleTooLarge, "oracle dimension " + std::to_string(m.dim) + " above cap " + std::to_string(cap));
  DriverResult out;
  out.method = DriverMethod::ORACLE;
  out.dim = m.dim;
  out.n_nodes = m.n_nodes;
  if (m.dim == 0) return out;
  const RationalMatrix phi = instantiate_integer(m, derive_seed({seed, 0}));
  for (int inputs = 1; inputs <= m.dim; ++inputs) {
    for (int draw = 0; draw < 3; ++draw) {
      Rng rng(derive_seed({seed, 1, static_cast<std::uint64_t>(inputs), static_cast<std::uint64_t>(draw)}));
      RationalMatrix b(m.dim, inputs);
      for (auto& v : b.data) v = Rational(static_cast<long>(rng.range(-1000000, 1000000)));
      if (rank_exact(kalman_matrix(phi, b), cap) == m.dim) {
        out.n_d = inputs;
        return out;
      }
    }
  }
  // Unreachable for a generic instantiation: B = I always works.
  out.n_d = m.dim;
  return out;
}

bool kalman_shift_check(const StateMatrix& m, const RationalMatrix& b, const Rational& w, std::uint64_t seed, int cap) {
  if (m.order != 1) throw Error(ErrorCode::ContractViolation, "kalman_shift_check needs first-order dynamics");
  if (m.dim > cap)
    throw Error(ErrorCode::OracleTooLarge, "dimension " + std::to_string(m.dim) + " above cap " + std::to_string(cap));
  for (const MatrixEntry& e : m.entries)
    if (e.row == e.col && std::get<Rational>(e.value) != 0)
      throw Error(ErrorCode::ContractViolation, "kalman_shift_check expects a matrix without self-dynamics");
  const RationalMatrix a = instantiate_integer(m, seed);
  RationalMatrix shifted = a;
  for (int i = 0; i < a.rows; ++i) shifted.at(i, i) += w;
  return rank_exact(kalman_matrix(a, b), cap) == rank_exact(kalman_matrix(shifted, b), cap);
}

}  // namespace ectrl
