#include "ectrl/validation.hpp"

#include <algorithm>
#include <sstream>

#include "ectrl/control.hpp"
#include "ectrl/error.hpp"
#include "ectrl/rng.hpp"

namespace ectrl {

StateMatrix random_small_system(std::uint64_t seed, int max_dim, int order) {
  if (order < 1 || max_dim < order) throw Error(ErrorCode::ContractViolation, "random_small_system: max_dim < order");
  Rng rng(seed);
  const int n = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_dim / order)));
  const bool directed = rng.below(2) == 0;
  const double k_max = n > 1 ? (directed ? 2.0 * (n - 1) : n - 1.0) : 0.0;
  const double k = std::min(rng.uniform(0.0, 3.0), k_max);
  const Topology t = generate_er(GraphSpec{GraphModel::ER, n, k, 3.0, directed, rng.next()});

  // Roughly a quarter of instances carry no self-dynamics at all.
  std::vector<std::vector<Rational>> spectra;
  if (rng.below(4) == 0) {
    spectra.push_back(std::vector<Rational>(static_cast<std::size_t>(order), Rational(0)));
  } else {
    const int ns = 1 + static_cast<int>(rng.below(3));
    std::vector<long> pool{0, 1, 2, 3, -1, -2, 4, 5};
    rng.shuffle(pool);
    for (int i = 0; i < ns; ++i) {
      std::vector<Rational> eig;
      for (int j = 0; j < order; ++j) eig.emplace_back(pool[static_cast<std::size_t>(i * order + j) % pool.size()]);
      spectra.push_back(eig);
    }
  }
  std::vector<UnitType> types;
  for (std::size_t i = 0; i < spectra.size(); ++i) {
    UnitType u = make_unit_type(order, spectra[i], static_cast<int>(i));
    bool duplicate = false;
    for (const UnitType& v : types) duplicate = duplicate || v.same_spectrum(u);
    if (!duplicate) types.push_back(u);
  }
  std::vector<long> weights(types.size());
  long total = 0;
  for (auto& w : weights) total += (w = rng.range(1, 3));
  std::vector<Rational> rho;
  for (long w : weights) {
    Rational r(w, static_cast<unsigned long>(total));
    r.canonicalize();
    rho.push_back(r);
  }
  return assemble(t, assign_types(types, rho, n, rng.next()));
}

std::vector<OracleRecord> run_oracle_suite(int instances, int max_dim, std::uint64_t seed) {
  if (instances < 1) throw Error(ErrorCode::InvalidConfig, "instances must be >= 1");
  if (max_dim < 2 || max_dim > kOracleCap)
    throw Error(ErrorCode::OracleTooLarge, "max dimension must lie in [2, " + std::to_string(kOracleCap) + "]");
  std::vector<OracleRecord> records;
  for (int i = 0; i < instances; ++i) {
    OracleRecord rec;
    rec.index = i;
    rec.seed = derive_seed({seed, static_cast<std::uint64_t>(i)});
    rec.order = i % 2 + 1;
    const StateMatrix m = random_small_system(rec.seed, max_dim, rec.order);
    rec.dim = m.dim;
    rec.oracle = nd_oracle(m, derive_seed({rec.seed, 1})).n_d;
    rec.et = nd_et(m, derive_seed({rec.seed, 2})).n_d;
    rec.ect = nd_ect_numeric(instantiate_real(m, derive_seed({rec.seed, 3}))).n_d;
    records.push_back(rec);
  }
  return records;
}

std::vector<ShiftRecord> run_shift_suite(int instances, int max_n, std::uint64_t seed) {
  if (instances < 1) throw Error(ErrorCode::InvalidConfig, "instances must be >= 1");
  if (max_n < 1 || max_n > kOracleCap)
    throw Error(ErrorCode::OracleTooLarge, "max nodes must lie in [1, " + std::to_string(kOracleCap) + "]");
  std::vector<ShiftRecord> records;
  for (int i = 0; i < instances; ++i) {
    ShiftRecord rec;
    rec.index = i;
    rec.seed = derive_seed({seed, 1000003, static_cast<std::uint64_t>(i)});
    Rng rng(rec.seed);
    const int n = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_n)));
    const bool directed = rng.below(2) == 0;
    const double k = n > 1 ? std::min(rng.uniform(0.0, 3.0), directed ? 2.0 * (n - 1) : n - 1.0) : 0.0;
    const Topology t = generate_er(GraphSpec{GraphModel::ER, n, k, 3.0, directed, rng.next()});
    const StateMatrix m = assemble(t, assign_types({self_loop(0)}, {Rational(1)}, n, 0));
    RationalMatrix b(n, 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(std::min(n, 3)))));
    for (auto& v : b.data) v = Rational(rng.range(-5, 5));
    Rational w(rng.range(-20, 20), static_cast<unsigned long>(rng.range(1, 6)));
    w.canonicalize();
    rec.n_nodes = n;
    rec.shift = format_rational(w);
    rec.equal = kalman_shift_check(m, b, w, rng.next());
    records.push_back(rec);
  }
  return records;
}

std::string describe(const OracleRecord& r) {
  std::ostringstream out;
  out << "instance " << r.index << " seed " << r.seed << " order " << r.order << " dim " << r.dim << ": oracle "
      << r.oracle << " et " << r.et << " ect " << r.ect;
  return out.str();
}

std::string describe(const ShiftRecord& r) {
  std::ostringstream out;
  out << "instance " << r.index << " seed " << r.seed << " N " << r.n_nodes << " w " << r.shift << ": "
      << (r.equal ? "ranks equal" : "RANKS DIFFER");
  return out.str();
}

}  // namespace ectrl
