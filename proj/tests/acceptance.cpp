// Acceptance suite. One PASS/FAIL line per criterion on stdout, details on
// stderr. Usage: acceptance [--criterion N]   (all criteria when omitted)
//
// Every master seed below is fixed as 1000 + criterion number.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "CLI11.hpp"
#include "ectrl/control.hpp"
#include "ectrl/experiments.hpp"
#include "ectrl/netgen.hpp"
#include "ectrl/rank.hpp"
#include "ectrl/rng.hpp"
#include "ectrl/validation.hpp"

using namespace ectrl;

namespace {

// Pinned tolerances and limits.
constexpr double kBand = 2.0;                 // agreement band, in summed standard errors
constexpr double kShiftSeconds = 10;          // criterion 1
constexpr double kOracleAgreement = 0.99;     // criterion 2
constexpr double kOracleSeconds = 120;
constexpr double kRhoSeconds = 15 * 60;       // criterion 3
constexpr double kSimplexSeconds = 30 * 60;   // criterion 4
constexpr double kDeltaSeconds = 10 * 60;     // criterion 5
constexpr double kNsSeconds = 10 * 60;        // criterion 6
constexpr double kOrderSeconds = 15 * 60;     // criterion 7
constexpr double kRankSeconds = 60;           // criterion 8
constexpr double kGenericRankSeconds = 60;    // criterion 9
constexpr double kFpRelTol = 1e-10;

std::uint64_t seed_for(int criterion) { return 1000 + static_cast<std::uint64_t>(criterion); }

struct Outcome {
  bool pass = true;
  std::string summary;
};

class Stopwatch {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void note(const std::string& line) { std::cerr << "  " << line << '\n'; }

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}

bool within_band(const SweepRow& a, const SweepRow& b) {
  return std::abs(a.mean_nd - b.mean_nd) <= kBand * (a.stderr_ + b.stderr_);
}

std::string row_text(const SweepRow& r) { return fmt(r.mean_nd) + " +- " + fmt(r.stderr_); }

void progress_to_stderr(const std::string& line) { std::cerr << "  " << line << '\n'; }

std::vector<SweepRow> sweep(const ExperimentConfig& cfg) {
  return run_experiment(cfg, RunOptions{1, progress_to_stderr});
}

ExperimentConfig er_config(ExperimentKind kind, int n, double k, int criterion) {
  ExperimentConfig cfg;
  cfg.experiment = kind;
  cfg.graph = GraphSpec{GraphModel::ER, n, k, 3.0, false, 0};
  cfg.realizations = 30;
  cfg.master_seed = seed_for(criterion);
  cfg.methods = {DriverMethod::ET};
  return cfg;
}

// Checks mean(rho) against mean(1 - rho) for an 11-point grid block.
bool rho_symmetric(const std::vector<SweepRow>& rows, std::size_t offset, const std::string& label) {
  bool ok = true;
  for (std::size_t i = 0; i <= 5; ++i) {
    const SweepRow& a = rows[offset + i];
    const SweepRow& b = rows[offset + 10 - i];
    const bool pair_ok = within_band(a, b);
    ok = ok && pair_ok;
    note(label + " rho=" + fmt(*a.coord1) + " " + row_text(a) + " | rho=" + fmt(*b.coord1) + " " + row_text(b) +
         (pair_ok ? "" : "  OUTSIDE BAND"));
  }
  return ok;
}

Outcome criterion_1() {
  Stopwatch clock;
  const auto records = run_shift_suite(200, 8, seed_for(1));
  int equal = 0;
  for (const ShiftRecord& r : records) {
    if (r.equal) ++equal;
    else note("shift identity violated: " + describe(r));
  }
  const double t = clock.seconds();
  return {equal == 200 && t < kShiftSeconds,
          std::to_string(equal) + "/200 shift checks equal, " + fmt(t) + " s (limit " + fmt(kShiftSeconds) + " s)"};
}

Outcome criterion_2() {
  Stopwatch clock;
  const auto records = run_oracle_suite(200, 10, seed_for(2));
  int agree = 0, first_order = 0, second_order = 0;
  for (const OracleRecord& r : records) {
    (r.order == 1 ? first_order : second_order)++;
    if (r.agree()) ++agree;
    else note("disagreement: " + describe(r));
  }
  const double t = clock.seconds();
  const double rate = static_cast<double>(agree) / static_cast<double>(records.size());
  return {rate >= kOracleAgreement && first_order > 0 && second_order > 0 && t < kOracleSeconds,
          std::to_string(agree) + "/" + std::to_string(records.size()) + " agree (d=1: " + std::to_string(first_order) +
              ", d=2: " + std::to_string(second_order) + "), " + fmt(t) + " s"};
}

Outcome criterion_3() {
  Stopwatch clock;
  ExperimentConfig er = er_config(ExperimentKind::RHO_SWEEP, 500, 4.0, 3);
  er.mean_degrees = {4.0, 6.0};
  const auto er_rows = sweep(er);
  ExperimentConfig sf = er_config(ExperimentKind::RHO_SWEEP, 500, 6.0, 3);
  sf.graph.model = GraphModel::SF;
  sf.graph.gamma = 3.0;
  const auto sf_rows = sweep(sf);
  const bool ok4 = rho_symmetric(er_rows, 0, "ER k=4");
  const bool ok6 = rho_symmetric(er_rows, 11, "ER k=6");
  const bool ok_sf = rho_symmetric(sf_rows, 0, "SF k=6");
  const double t = clock.seconds();
  return {ok4 && ok6 && ok_sf && t < kRhoSeconds,
          std::string("ER k=4 ") + (ok4 ? "symmetric" : "asymmetric") + ", ER k=6 " + (ok6 ? "symmetric" : "asymmetric") +
              ", SF " + (ok_sf ? "symmetric" : "asymmetric") + " (endpoints included), " + fmt(t) + " s"};
}

Outcome criterion_4() {
  Stopwatch clock;
  ExperimentConfig cfg = er_config(ExperimentKind::SIMPLEX3, 300, 6.0, 4);
  cfg.simplex_step = Rational(1, 6);
  const auto rows = sweep(cfg);
  std::map<std::tuple<double, double, double>, const SweepRow*> by_point;
  for (const SweepRow& r : rows) by_point[{*r.coord1, *r.coord2, *r.coord3}] = &r;
  int pairs = 0, violations = 0;
  for (const SweepRow& r : rows) {
    std::array<double, 3> p{*r.coord1, *r.coord2, *r.coord3};
    std::sort(p.begin(), p.end());
    do {
      const SweepRow* other = by_point.at({p[0], p[1], p[2]});
      if (other == &r) continue;
      ++pairs;
      if (!within_band(r, *other)) {
        ++violations;
        note("(" + fmt(*r.coord1) + "," + fmt(*r.coord2) + "," + fmt(*r.coord3) + ") " + row_text(r) + " vs (" +
             fmt(p[0]) + "," + fmt(p[1]) + "," + fmt(p[2]) + ") " + row_text(*other));
      }
    } while (std::next_permutation(p.begin(), p.end()));
  }
  const double third = to_double(Rational(1, 3));
  const SweepRow& center = *by_point.at({third, third, third});
  const SweepRow* lowest = &rows.front();
  for (const SweepRow& r : rows)
    if (r.mean_nd < lowest->mean_nd) lowest = &r;
  const bool center_min = center.mean_nd <= lowest->mean_nd;
  note("center " + row_text(center) + ", grid minimum " + row_text(*lowest) + " at (" + fmt(*lowest->coord1) + "," +
       fmt(*lowest->coord2) + "," + fmt(*lowest->coord3) + ")");
  const double t = clock.seconds();
  return {violations == 0 && center_min && t < kSimplexSeconds,
          std::to_string(rows.size()) + " grid points, " + std::to_string(pairs - violations) + "/" +
              std::to_string(pairs) + " permutation pairs within band, center " +
              (center_min ? "is" : "is not") + " the minimum, " + fmt(t) + " s"};
}

Outcome criterion_5() {
  Stopwatch clock;
  ExperimentConfig cfg = er_config(ExperimentKind::DELTA_SWEEP, 300, 6.0, 5);
  cfg.n_types = 3;
  cfg.delta_points = 6;
  const auto rows = sweep(cfg);
  bool minimum_at_zero = true, monotone = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    note("delta=" + fmt(*rows[i].coord1) + " " + row_text(rows[i]));
    if (rows[i].mean_nd < rows[0].mean_nd) minimum_at_zero = false;
    if (i > 0 && rows[i].mean_nd < rows[i - 1].mean_nd - kBand * (rows[i].stderr_ + rows[i - 1].stderr_))
      monotone = false;
  }
  const double t = clock.seconds();
  return {rows.size() == 6 && minimum_at_zero && monotone && t < kDeltaSeconds,
          std::string("minimum ") + (minimum_at_zero ? "at" : "not at") + " delta=0, " +
              (monotone ? "nondecreasing" : "decreasing") + " within band, " + fmt(t) + " s"};
}

Outcome criterion_6() {
  Stopwatch clock;
  ExperimentConfig cfg = er_config(ExperimentKind::NS_SWEEP, 300, 4.0, 6);
  cfg.ns_grid = {1, 2, 3, 5, 10, 0};
  const auto rows = sweep(cfg);
  bool decreasing = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    note("N_s=" + fmt(*rows[i].coord1) + " " + row_text(rows[i]) + " (1/N_s = " + fmt(*rows[i].coord2) + ")");
    if (i > 0 && !(rows[i].mean_nd < rows[i - 1].mean_nd)) decreasing = false;
  }
  // Exact aggregation: zero spread at mean 1/N means every realization had N_D = 1.
  const SweepRow& last = rows.back();
  const bool all_one = last.std == 0.0 && last.mean_nd == to_double(Rational(1, 300));
  const double t = clock.seconds();
  return {decreasing && all_one && t < kNsSeconds,
          std::string(decreasing ? "strictly decreasing" : "not strictly decreasing") + ", N_s=N " +
              (all_one ? "N_D=1 on every realization" : "N_D != 1 somewhere") + ", " + fmt(t) + " s"};
}

Outcome criterion_7() {
  Stopwatch clock;
  ExperimentConfig cfg = er_config(ExperimentKind::ORDER_SWEEP, 200, 6.0, 7);
  cfg.order = 2;
  const auto all_rows = sweep(cfg);
  std::vector<SweepRow> rows;
  for (const SweepRow& r : all_rows)
    if (r.method == "ET") rows.push_back(r);
  const bool symmetric = rows.size() == 11 && rho_symmetric(rows, 0, "d=2");

  Rng rng(seed_for(7));
  int agree = 0;
  const int instances = 50;
  for (int i = 0; i < instances; ++i) {
    const int n = static_cast<int>(rng.range(5, 50));
    const double k = std::min<double>(n - 1, rng.uniform(1.0, 6.0));
    const Topology t = generate_er(GraphSpec{GraphModel::ER, n, k, 3.0, false, rng.next()});
    // Four distinct small integers split into two second-order spectra.
    std::vector<int> pool{-3, -2, -1, 0, 1, 2, 3, 4, 5};
    rng.shuffle(pool);
    const std::vector<UnitType> types{make_unit_type(2, {Rational(pool[0]), Rational(pool[1])}, 0),
                                      make_unit_type(2, {Rational(pool[2]), Rational(pool[3])}, 1)};
    Rational rho(static_cast<long>(rng.range(1, 9)), 10);
    rho.canonicalize();
    const Assignment a = assign_types(types, {rho, Rational(1) - rho}, n, rng.next());
    const StateMatrix m = assemble(t, a);
    const DriverResult et = nd_et(m, rng.next());
    const DriverResult ect = nd_ect_numeric(instantiate_real(m, rng.next()));
    if (et.n_d == ect.n_d) ++agree;
    else note("instance " + std::to_string(i) + " N=" + std::to_string(n) + ": ET " + std::to_string(et.n_d) +
              " vs ECT " + std::to_string(ect.n_d));
  }
  const double t = clock.seconds();
  return {symmetric && agree == instances && t < kOrderSeconds,
          std::string("d=2 curve ") + (symmetric ? "symmetric" : "asymmetric") + ", ET = ECT on " +
              std::to_string(agree) + "/" + std::to_string(instances) + " instances, " + fmt(t) + " s"};
}

Outcome criterion_8() {
  Stopwatch clock;
  Rng rng(seed_for(8));
  int generic_ok = 0;
  for (int i = 0; i < 100; ++i) {
    const int d = static_cast<int>(rng.range(1, 2));
    const int n = static_cast<int>(rng.range(2, 20 / d));
    const StateMatrix m = [&] {
      const double k = std::min<double>(n - 1, rng.uniform(0.5, 4.0));
      const Topology t = generate_er(GraphSpec{GraphModel::ER, n, k, 3.0, rng.below(2) == 0, rng.next()});
      std::vector<int> pool{-2, -1, 0, 1, 2, 3};
      rng.shuffle(pool);
      std::vector<UnitType> types;
      for (int j = 0; j < 2; ++j) {
        std::vector<Rational> eig;
        for (int e = 0; e < d; ++e) eig.push_back(Rational(pool[static_cast<std::size_t>(j * d + e)]));
        types.push_back(make_unit_type(d, eig, j));
      }
      return assemble(t, assign_types(types, {Rational(1, 2), Rational(1, 2)}, n, rng.next()));
    }();
    std::vector<Rational> candidates{Rational(0)};
    candidates.insert(candidates.end(), m.candidates.begin(), m.candidates.end());
    const Rational lambda = candidates[rng.below(candidates.size())];
    const int generic = generic_rank(m, lambda, 3, rng.next()).rank;
    RationalMatrix exact = instantiate_integer(m, rng.next());
    for (int j = 0; j < m.dim; ++j) exact.at(j, j) -= lambda;
    const int reference = rank_exact(exact);
    if (generic == reference) ++generic_ok;
    else note("generic instance " + std::to_string(i) + " dim " + std::to_string(m.dim) + ": " +
              std::to_string(generic) + " vs exact " + std::to_string(reference));
  }

  int fp_ok = 0;
  for (int i = 0; i < 100; ++i) {
    const int n = static_cast<int>(rng.range(2, 30));
    const int r = static_cast<int>(rng.range(0, n));
    // Integer product of n x r and r x n factors: rank <= r, usually equal.
    std::vector<long> u(static_cast<std::size_t>(n * r)), v(static_cast<std::size_t>(r * n));
    for (long& x : u) x = rng.range(-9, 9);
    for (long& x : v) x = rng.range(-9, 9);
    RationalMatrix exact(n, n);
    Eigen::MatrixXd numeric(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        long s = 0;
        for (int c = 0; c < r; ++c) s += u[static_cast<std::size_t>(a * r + c)] * v[static_cast<std::size_t>(c * n + b)];
        exact.at(a, b) = Rational(s);
        numeric(a, b) = static_cast<double>(s);
      }
    const int reference = rank_exact(exact);
    const int fp = rank_fp(numeric, kFpRelTol);
    if (fp == reference) ++fp_ok;
    else note("fp instance " + std::to_string(i) + " n=" + std::to_string(n) + ": " + std::to_string(fp) +
              " vs exact " + std::to_string(reference));
  }
  const double t = clock.seconds();
  return {generic_ok == 100 && fp_ok == 100 && t < kRankSeconds,
          "generic = exact on " + std::to_string(generic_ok) + "/100, fp = exact on " + std::to_string(fp_ok) +
              "/100, " + fmt(t) + " s"};
}

std::string csv_text(const ExperimentConfig& cfg, int jobs) {
  std::ostringstream out;
  write_csv(out, run_experiment(cfg, RunOptions{jobs, {}}));
  return out.str();
}

Outcome criterion_9() {
  // Second-order units make generic rank fall short of term rank at lambda = 1,
  // so all three trials run.
  const Topology t = generate_er(GraphSpec{GraphModel::ER, 1000, 6.0, 3.0, false, seed_for(9)});
  const std::vector<UnitType> types{make_unit_type(2, {Rational(1), Rational(2)}, 0),
                                    make_unit_type(2, {Rational(3), Rational(4)}, 1)};
  const StateMatrix m = assemble(t, assign_types(types, {Rational(1, 2), Rational(1, 2)}, 1000, seed_for(9)));
  Stopwatch clock;
  const RankResult r = generic_rank(m, Rational(1), 3, seed_for(9));
  const double t_rank = clock.seconds();
  note("dim " + std::to_string(m.dim) + ", rank " + std::to_string(r.rank) + ", term rank " +
       std::to_string(r.term_rank) + ", trials " + std::to_string(r.trials) + ", " + fmt(t_rank) + " s");
  const bool fast = m.dim == 2000 && r.trials == 3 && t_rank <= kGenericRankSeconds;

  std::vector<ExperimentConfig> configs;
  for (ExperimentKind kind : {ExperimentKind::RHO_SWEEP, ExperimentKind::SIMPLEX3, ExperimentKind::DELTA_SWEEP,
                              ExperimentKind::NS_SWEEP, ExperimentKind::ORDER_SWEEP, ExperimentKind::LINKWEIGHT_SWEEP}) {
    ExperimentConfig cfg = er_config(kind, 80, 4.0, 9);
    cfg.realizations = 6;
    cfg.methods = {DriverMethod::ET, DriverMethod::SCT_MATCHING};
    if (kind == ExperimentKind::ORDER_SWEEP) cfg.order = 2;
    if (kind == ExperimentKind::SIMPLEX3) cfg.simplex_step = Rational(1, 4);
    configs.push_back(cfg);
  }
  int identical = 0;
  for (const ExperimentConfig& cfg : configs) {
    const std::string reference = csv_text(cfg, 1);
    bool same = true;
    for (int jobs : {2, 4}) same = same && csv_text(cfg, jobs) == reference;
    same = same && csv_text(cfg, 1) == reference;
    if (same) ++identical;
    else note(std::string(to_string(cfg.experiment)) + ": CSV differs across --jobs");
  }
  const bool deterministic = identical == static_cast<int>(configs.size());
  return {fast && deterministic,
          "generic_rank dim " + std::to_string(m.dim) + " x" + std::to_string(r.trials) + " trials in " + fmt(t_rank) +
              " s (limit " + fmt(kGenericRankSeconds) + " s), byte-identical CSV for " + std::to_string(identical) + "/" +
              std::to_string(configs.size()) + " sweeps at jobs 1,2,4"};
}

const std::vector<std::pair<std::string, std::function<Outcome()>>> kCriteria{
    {"shift identity", criterion_1},
    {"oracle equivalence", criterion_2},
    {"rho symmetry", criterion_3},
    {"simplex symmetry and center minimum", criterion_4},
    {"delta monotonicity", criterion_5},
    {"N_s sweep", criterion_6},
    {"second-order symmetry", criterion_7},
    {"rank engine soundness", criterion_8},
    {"performance and determinism", criterion_9},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance suite"};
  int only = 0;
  app.add_option("--criterion", only, "Run a single criterion (1-9)")->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);

  bool all_pass = true;
  for (std::size_t i = 0; i < kCriteria.size(); ++i) {
    const int number = static_cast<int>(i) + 1;
    if (only != 0 && only != number) continue;
    std::cerr << "criterion " << number << " (" << kCriteria[i].first << ")\n";
    Outcome outcome;
    try {
      outcome = kCriteria[i].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    std::cout << "criterion " << number << " " << (outcome.pass ? "PASS" : "FAIL") << ": " << kCriteria[i].first
              << ": " << outcome.summary << std::endl;
    all_pass = all_pass && outcome.pass;
  }
  return all_pass ? 0 : 1;
}
