#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ectrl/control.hpp"
#include "ectrl/dynamics.hpp"
#include "ectrl/netgen.hpp"

namespace ectrl {

enum class ExperimentKind { RHO_SWEEP, SIMPLEX3, DELTA_SWEEP, NS_SWEEP, ORDER_SWEEP, LINKWEIGHT_SWEEP };
const char* to_string(ExperimentKind k);
ExperimentKind parse_experiment_kind(const std::string& name);

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::RHO_SWEEP;
  GraphSpec graph;  // graph.seed is ignored; every realization derives its own
  int order = 1;
  // One eigenvalue list (length `order`) per unit type. Empty means the
  // experiment's default table.
  std::vector<std::vector<Rational>> unit_types;

  std::vector<Rational> rho_grid;          // RHO_SWEEP, ORDER_SWEEP (two types)
  Rational simplex_step{1, 10};            // SIMPLEX3, ORDER_SWEEP (three types)
  int n_types = 3;                         // DELTA_SWEEP
  std::vector<Rational> delta_grid;        // DELTA_SWEEP; empty means delta_points evenly spaced
  int delta_points = 6;
  std::vector<int> ns_grid;                // NS_SWEEP; 0 stands for N
  std::vector<Rational> q_grid;            // LINKWEIGHT_SWEEP
  Rational shared_weight{1};               // LINKWEIGHT_SWEEP
  std::vector<double> mean_degrees;        // optional outer grid over <k>

  int realizations = 30;
  std::uint64_t master_seed = 0;
  std::vector<DriverMethod> methods{DriverMethod::ET};
  int trials = 3;
  EctTolerances tolerances;
  bool record_timing = false;

  // Throws InvalidConfig on any violated invariant.
  void validate() const;
};

struct SweepRow {
  std::string experiment;
  std::optional<double> coord1, coord2, coord3;
  std::string method;
  double mean_nd = 0.0;
  double std = 0.0;
  double stderr_ = 0.0;
  int realizations = 0;
  double seconds = 0.0;
};

// Seed of realization r at grid point g: derive_seed({master, g, r}).
std::uint64_t realization_seed(std::uint64_t master, std::size_t grid_index, int realization);

struct RunOptions {
  int jobs = 1;
  std::function<void(const std::string&)> progress;  // receives log lines, may be empty
};

std::vector<SweepRow> run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});

std::vector<SweepRow> run_rho_sweep(const ExperimentConfig& cfg, const RunOptions& options = {});
std::vector<SweepRow> run_simplex3(const ExperimentConfig& cfg, const RunOptions& options = {});
std::vector<SweepRow> run_delta_sweep(const ExperimentConfig& cfg, const RunOptions& options = {});
std::vector<SweepRow> run_ns_sweep(const ExperimentConfig& cfg, const RunOptions& options = {});
std::vector<SweepRow> run_order_sweep(const ExperimentConfig& cfg, const RunOptions& options = {});
std::vector<SweepRow> run_linkweight_sweep(const ExperimentConfig& cfg, const RunOptions& options = {});

// Densities for a target heterogeneity: start equal, then move mass from
// types 2..N_s onto type 1.
std::vector<Rational> densities_for_delta(int n_types, const Rational& target);

inline constexpr const char* kCsvHeader = "experiment,coord1,coord2,coord3,method,mean_nd,std,stderr,R,seconds";

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows);
void emit_csv(const std::vector<SweepRow>& rows, const std::string& path);
std::vector<SweepRow> read_csv(std::istream& in);

}  // namespace ectrl
