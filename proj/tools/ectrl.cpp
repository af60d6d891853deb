// ectrl command-line entry point: gen, analyze, sweep, oracle, schema.
//
// Exit codes: 0 success, 1 runtime or I/O failure, 2 usage or config error.
// Standard output carries only the machine-readable payload.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ectrl/config.hpp"
#include "ectrl/control.hpp"
#include "ectrl/error.hpp"
#include "ectrl/experiments.hpp"
#include "ectrl/netgen.hpp"
#include "ectrl/rng.hpp"
#include "ectrl/schema.hpp"
#include "ectrl/validation.hpp"
#include "json.hpp"

using namespace ectrl;
using nlohmann::json;

namespace {

constexpr int kRuntimeFailure = 1;
constexpr int kUsageFailure = 2;

int verbosity = 1;

void log(int level, const std::string& line) {
  if (level <= verbosity) std::cerr << line << '\n';
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidSpec:
    case ErrorCode::InvalidAssignment:
    case ErrorCode::InvalidConfig:
    case ErrorCode::OracleTooLarge:
    case ErrorCode::UnrepresentableConstant:
      return kUsageFailure;
    default:
      return kRuntimeFailure;
  }
}

json stats_json(const Topology& t) {
  const DegreeStats s = degree_stats(t);
  return {{"n_nodes", t.n_nodes},
          {"n_edges", t.edges.size()},
          {"directed", t.directed},
          {"mean_degree", s.mean},
          {"min_degree", s.min},
          {"max_degree", s.max},
          {"isolated", s.isolated}};
}

struct GenArgs {
  std::string model = "er";
  int n = 0;
  double k = 0;
  double gamma = 3.0;
  bool directed = false;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_gen(const GenArgs& a) {
  const GraphSpec spec{parse_graph_model(a.model), a.n, a.k, a.gamma, a.directed, a.seed};
  const Topology t = generate(spec);
  if (a.out.empty()) {
    write_edge_list(std::cout, t);
    log(1, stats_json(t).dump());
  } else {
    save_edge_list(a.out, t);
    std::cout << stats_json(t).dump() << '\n';
  }
  return 0;
}

struct AnalyzeArgs {
  std::string graph;
  std::string types = "0:1";
  int order = 1;
  std::string method = "et";
  std::uint64_t seed = 0;
  int trials = 3;
  std::string triplets;
};

int cmd_analyze(const AnalyzeArgs& a) {
  const DriverMethod method = parse_driver_method(a.method);
  const TypeTable table = parse_types_flag(a.types, a.order);
  const Topology t = load_edge_list(a.graph);
  const Assignment assignment = assign_types(table.types, table.densities, t.n_nodes, derive_seed({a.seed, 1}));
  const StateMatrix m = assemble(t, assignment);
  if (!a.triplets.empty()) {
    std::ofstream out(a.triplets);
    if (!out) throw Error(ErrorCode::Io, "cannot open '" + a.triplets + "' for writing");
    write_triplets(out, m);
  }
  const std::uint64_t method_seed = derive_seed({a.seed, 2});
  DriverResult r;
  switch (method) {
    case DriverMethod::ET: r = nd_et(m, method_seed, a.trials); break;
    case DriverMethod::ECT_NUMERIC: r = nd_ect_numeric(instantiate_real(m, method_seed)); break;
    case DriverMethod::ECT_SYMMETRIC: r = nd_ect_symmetric(instantiate_real(m, method_seed)); break;
    case DriverMethod::SCT_MATCHING: r = nd_sct_matching(m); break;
    case DriverMethod::ORACLE: r = nd_oracle(m, method_seed); break;
  }
  r.n_nodes = t.n_nodes;
  std::cout << to_json(r).dump() << '\n';
  return 0;
}

struct SweepArgs {
  std::string config;
  std::string out;
  int jobs = 1;
};

int cmd_sweep(const SweepArgs& a) {
  const ExperimentConfig cfg = load_experiment_config(a.config);
  log(1, std::string("sweep ") + to_string(cfg.experiment) + " with " + std::to_string(a.jobs) + " job(s)");
  RunOptions options{a.jobs, [](const std::string& line) { log(1, line); }};
  const auto rows = run_experiment(cfg, options);
  if (a.out.empty())
    write_csv(std::cout, rows);
  else
    emit_csv(rows, a.out);
  log(1, "wrote " + std::to_string(rows.size()) + " rows");
  return 0;
}

struct OracleArgs {
  int instances = 200;
  int max_n = 8;
  std::uint64_t seed = 1;
};

int cmd_oracle(const OracleArgs& a) {
  if (a.instances < 1) throw Error(ErrorCode::InvalidConfig, "--instances must be >= 1");
  if (a.max_n < 2 || a.max_n > kOracleCap)
    throw Error(ErrorCode::OracleTooLarge, "--max-n must lie in [2, " + std::to_string(kOracleCap) + "]");
  const auto shift = run_shift_suite(a.instances, a.max_n, a.seed);
  const auto oracle = run_oracle_suite(a.instances, a.max_n, derive_seed({a.seed, 1}));
  json failures = json::array();
  int shift_ok = 0, oracle_ok = 0;
  for (const ShiftRecord& r : shift) {
    if (r.equal) ++shift_ok;
    else {
      log(0, "shift FAIL " + describe(r));
      failures.push_back(describe(r));
    }
  }
  for (const OracleRecord& r : oracle) {
    if (r.agree()) ++oracle_ok;
    else {
      log(0, "oracle FAIL " + describe(r));
      failures.push_back(describe(r));
    }
    log(2, describe(r));
  }
  const bool pass = failures.empty();
  std::cout << json{{"instances", a.instances},
                    {"max_n", a.max_n},
                    {"seed", a.seed},
                    {"shift_pass", shift_ok},
                    {"oracle_pass", oracle_ok},
                    {"pass", pass},
                    {"failures", failures}}
                   .dump()
            << '\n';
  return pass ? 0 : kRuntimeFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ectrl: driver counts for networks of heterogeneous linear dynamic units"};
  app.require_subcommand(1);
  int verbose = 0;
  bool quiet = false;
  app.add_flag("-v,--verbose", verbose, "More log output on stderr (repeatable)");
  app.add_flag("-q,--quiet", quiet, "Only errors on stderr");

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a random topology as an edge list");
  gen_cmd->add_option("--model", gen.model, "er or sf")->check(CLI::IsMember({"er", "sf", "ER", "SF"}));
  gen_cmd->add_option("--n", gen.n, "Number of nodes")->required();
  gen_cmd->add_option("--k", gen.k, "Mean degree")->required();
  gen_cmd->add_option("--gamma", gen.gamma, "SF degree exponent");
  gen_cmd->add_flag("--directed", gen.directed, "Directed links");
  gen_cmd->add_option("--seed", gen.seed, "Random seed");
  gen_cmd->add_option("--out", gen.out, "Edge-list path (stdout when omitted)");

  AnalyzeArgs analyze;
  auto* analyze_cmd = app.add_subcommand("analyze", "Driver count of one system, as JSON");
  analyze_cmd->add_option("graph", analyze.graph, "Edge-list file")->required();
  analyze_cmd->add_option("--types", analyze.types, "Unit types, e.g. \"2:0.5,0:0.5\" or \"1|2:1/2,3|4:1/2\"");
  analyze_cmd->add_option("--order", analyze.order, "Order of every dynamic unit")->check(CLI::Range(1, 3));
  analyze_cmd->add_option("--method", analyze.method, "et, ect_numeric, ect_symmetric, sct_matching or oracle");
  analyze_cmd->add_option("--seed", analyze.seed, "Random seed");
  analyze_cmd->add_option("--trials", analyze.trials, "Generic-rank trials")->check(CLI::PositiveNumber);
  analyze_cmd->add_option("--triplets", analyze.triplets, "Also write the state matrix as sparse triplets");

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run an experiment config, write CSV");
  sweep_cmd->add_option("config", sweep.config, "JSON experiment config")->required();
  sweep_cmd->add_option("--out", sweep.out, "CSV path (stdout when omitted)");
  sweep_cmd->add_option("--jobs", sweep.jobs, "Worker threads")->envname("ECTRL_JOBS")->check(CLI::PositiveNumber);

  OracleArgs oracle;
  auto* oracle_cmd = app.add_subcommand("oracle", "Shift-identity and oracle-agreement suites");
  oracle_cmd->add_option("--instances", oracle.instances, "Instances per suite");
  oracle_cmd->add_option("--max-n", oracle.max_n, "Largest state dimension");
  oracle_cmd->add_option("--seed", oracle.seed, "Master seed");

  auto* schema_cmd = app.add_subcommand("schema", "Print the experiment-config JSON schema");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageFailure;
  }
  verbosity = quiet ? 0 : 1 + verbose;

  try {
    if (*gen_cmd) return cmd_gen(gen);
    if (*analyze_cmd) return cmd_analyze(analyze);
    if (*sweep_cmd) return cmd_sweep(sweep);
    if (*oracle_cmd) return cmd_oracle(oracle);
    if (*schema_cmd) {
      std::cout << experiment_config_schema_text();
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "ectrl: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "ectrl: " << e.what() << '\n';
    return kRuntimeFailure;
  }
  return kUsageFailure;
}
