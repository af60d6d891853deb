#include "ectrl/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "ectrl/error.hpp"
#include "ectrl/rng.hpp"

namespace ectrl {

const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::RHO_SWEEP: return "RHO_SWEEP";
    case ExperimentKind::SIMPLEX3: return "SIMPLEX3";
    case ExperimentKind::DELTA_SWEEP: return "DELTA_SWEEP";
    case ExperimentKind::NS_SWEEP: return "NS_SWEEP";
    case ExperimentKind::ORDER_SWEEP: return "ORDER_SWEEP";
    case ExperimentKind::LINKWEIGHT_SWEEP: return "LINKWEIGHT_SWEEP";
  }
  return "?";
}

ExperimentKind parse_experiment_kind(const std::string& name) {
  for (auto k : {ExperimentKind::RHO_SWEEP, ExperimentKind::SIMPLEX3, ExperimentKind::DELTA_SWEEP,
                 ExperimentKind::NS_SWEEP, ExperimentKind::ORDER_SWEEP, ExperimentKind::LINKWEIGHT_SWEEP})
    if (name == to_string(k)) return k;
  throw Error(ErrorCode::InvalidConfig, "unknown experiment '" + name + "'");
}

std::uint64_t realization_seed(std::uint64_t master, std::size_t grid_index, int realization) {
  return derive_seed({master, static_cast<std::uint64_t>(grid_index), static_cast<std::uint64_t>(realization)});
}

std::vector<Rational> densities_for_delta(int n_types, const Rational& target) {
  if (n_types < 1) throw Error(ErrorCode::InvalidConfig, "delta sweep needs at least one type");
  const Rational equal(1, static_cast<unsigned long>(n_types));
  const Rational max_delta = 2 * (1 - equal);
  if (target < 0 || target > max_delta)
    throw Error(ErrorCode::InvalidConfig, "delta " + format_rational(target) + " outside [0, " +
                                              format_rational(max_delta) + "]");
  std::vector<Rational> rho(static_cast<std::size_t>(n_types), equal);
  if (n_types == 1) return rho;
  // Type 1 gains t = delta/2; the rest lose t/(N_s-1) each.
  const Rational gain = target / 2;
  rho[0] += gain;
  for (std::size_t i = 1; i < rho.size(); ++i) rho[i] -= gain / (n_types - 1);
  return rho;
}

namespace {

std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ec == std::errc() ? end : buf);
}

std::vector<Rational> default_rho_grid() {
  std::vector<Rational> grid;
  for (int i = 0; i <= 10; ++i) {
    Rational r(i, 10);
    r.canonicalize();
    grid.push_back(r);
  }
  return grid;
}

std::vector<double> degree_grid(const ExperimentConfig& cfg) {
  return cfg.mean_degrees.empty() ? std::vector<double>{cfg.graph.mean_degree} : cfg.mean_degrees;
}

std::vector<UnitType> make_types(const std::vector<std::vector<Rational>>& table, int order) {
  std::vector<UnitType> types;
  for (std::size_t i = 0; i < table.size(); ++i) types.push_back(make_unit_type(order, table[i], static_cast<int>(i)));
  return types;
}

void check_distinct(const std::vector<UnitType>& types) {
  for (std::size_t i = 0; i < types.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (types[i].same_spectrum(types[j]))
        throw Error(ErrorCode::InvalidConfig, "unit types " + std::to_string(j) + " and " + std::to_string(i) +
                                                  " have the same spectrum");
}

struct GridPoint {
  std::optional<double> coord1, coord2, coord3;
  double mean_degree = 0.0;
  std::vector<UnitType> types;
  std::vector<Rational> densities;
  std::optional<Rational> fixed_fraction;  // LINKWEIGHT_SWEEP
};

std::vector<GridPoint> rho_points(const ExperimentConfig& cfg) {
  const Rational w = cfg.unit_types.empty() ? Rational(1) : cfg.unit_types.front().front();
  const std::vector<UnitType> types{self_loop(w, 0), self_loop(0, 1)};
  const auto rhos = cfg.rho_grid.empty() ? default_rho_grid() : cfg.rho_grid;
  std::vector<GridPoint> points;
  for (double k : degree_grid(cfg))
    for (const Rational& rho : rhos) points.push_back({to_double(rho), k, std::nullopt, k, types, {rho, 1 - rho}, {}});
  return points;
}

std::vector<GridPoint> simplex_points(const ExperimentConfig& cfg, const std::vector<UnitType>& types) {
  std::vector<GridPoint> points;
  for (double k : degree_grid(cfg))
    for (const auto& p : densities_on_simplex(cfg.simplex_step))
      points.push_back({to_double(p[0]), to_double(p[1]), to_double(p[2]), k, types, {p[0], p[1], p[2]}, {}});
  return points;
}

std::vector<std::vector<Rational>> integer_table(int count) {
  std::vector<std::vector<Rational>> table;
  for (int i = 1; i <= count; ++i) table.push_back({Rational(i)});
  return table;
}

std::vector<Rational> delta_values(const ExperimentConfig& cfg) {
  if (!cfg.delta_grid.empty()) return cfg.delta_grid;
  const Rational max_delta = 2 * (1 - Rational(1, static_cast<unsigned long>(cfg.n_types)));
  std::vector<Rational> grid;
  for (int i = 0; i < cfg.delta_points; ++i)
    grid.push_back(cfg.delta_points == 1 ? Rational(0) : max_delta * i / (cfg.delta_points - 1));
  return grid;
}

std::vector<int> ns_values(const ExperimentConfig& cfg) {
  std::vector<int> grid = cfg.ns_grid.empty() ? std::vector<int>{1, 2, 3, 5, 10, 0} : cfg.ns_grid;
  for (int& ns : grid)
    if (ns == 0) ns = cfg.graph.n_nodes;
  return grid;
}

std::vector<std::vector<Rational>> default_order_table(int order) {
  std::vector<std::vector<Rational>> table(2);
  for (int j = 0; j < order; ++j) {
    table[0].push_back(Rational(j + 1));
    table[1].push_back(Rational(order + j + 1));
  }
  return table;
}

std::vector<GridPoint> build_grid(const ExperimentConfig& cfg) {
  switch (cfg.experiment) {
    case ExperimentKind::RHO_SWEEP: return rho_points(cfg);
    case ExperimentKind::SIMPLEX3: {
      const auto table = cfg.unit_types.empty() ? std::vector<std::vector<Rational>>{{Rational(0)}, {Rational(1)}, {Rational(2)}}
                                                : cfg.unit_types;
      return simplex_points(cfg, make_types(table, 1));
    }
    case ExperimentKind::DELTA_SWEEP: {
      const auto table = cfg.unit_types.empty() ? integer_table(cfg.n_types) : cfg.unit_types;
      const auto types = make_types(table, 1);
      std::vector<GridPoint> points;
      for (double k : degree_grid(cfg))
        for (const Rational& target : delta_values(cfg)) {
          auto rho = densities_for_delta(cfg.n_types, target);
          points.push_back({delta(rho), static_cast<double>(cfg.n_types), k, k, types, rho, {}});
        }
      return points;
    }
    case ExperimentKind::NS_SWEEP: {
      std::vector<GridPoint> points;
      for (double k : degree_grid(cfg))
        for (int ns : ns_values(cfg)) {
          const auto types = make_types(integer_table(ns), 1);
          const Rational share(1, static_cast<unsigned long>(ns));
          points.push_back({static_cast<double>(ns), 1.0 / ns, k, k, types,
                            std::vector<Rational>(static_cast<std::size_t>(ns), share), {}});
        }
      return points;
    }
    case ExperimentKind::ORDER_SWEEP: {
      const auto table = cfg.unit_types.empty() ? default_order_table(cfg.order) : cfg.unit_types;
      const auto types = make_types(table, cfg.order);
      if (types.size() == 3) return simplex_points(cfg, types);
      const auto rhos = cfg.rho_grid.empty() ? default_rho_grid() : cfg.rho_grid;
      std::vector<GridPoint> points;
      for (double k : degree_grid(cfg))
        for (const Rational& rho : rhos)
          points.push_back({to_double(rho), static_cast<double>(cfg.order), k, k, types, {rho, 1 - rho}, {}});
      return points;
    }
    case ExperimentKind::LINKWEIGHT_SWEEP: {
      const std::vector<UnitType> types{self_loop(0)};
      const auto qs = cfg.q_grid.empty() ? default_rho_grid() : cfg.q_grid;
      std::vector<GridPoint> points;
      for (double k : degree_grid(cfg))
        for (const Rational& q : qs) points.push_back({to_double(q), k, std::nullopt, k, types, {Rational(1)}, q});
      return points;
    }
  }
  return {};
}

Rational ratio(int num, int den) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

struct Realized {
  std::vector<std::optional<Rational>> n_d_frac;  // per method, N_D/(dN)
  std::vector<std::optional<Rational>> per_node;  // per method, N_D/N
  std::vector<double> seconds;
};

Realized realize(const ExperimentConfig& cfg, const GridPoint& point, std::uint64_t seed) {
  GraphSpec spec = cfg.graph;
  spec.mean_degree = point.mean_degree;
  spec.seed = derive_seed({seed, 0});
  const Topology topology = generate(spec);
  const Assignment assignment = assign_types(point.types, point.densities, spec.n_nodes, derive_seed({seed, 1}));
  StateMatrix m;
  if (point.fixed_fraction) {
    std::vector<std::size_t> order(topology.edges.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(derive_seed({seed, 3}));
    rng.shuffle(order);
    // round(q * E), halves rounded up
    const Rational exact = *point.fixed_fraction * static_cast<long>(order.size()) + Rational(1, 2);
    const auto fixed = static_cast<std::size_t>(BigInt(exact.get_num() / exact.get_den()).get_ui());
    std::vector<std::optional<Rational>> weights(order.size());
    for (std::size_t i = 0; i < fixed && i < order.size(); ++i) weights[order[i]] = cfg.shared_weight;
    m = assemble(topology, assignment, weights);
  } else {
    m = assemble(topology, assignment);
  }

  Realized out;
  for (DriverMethod method : cfg.methods) {
    const auto started = std::chrono::steady_clock::now();
    const std::uint64_t method_seed = derive_seed({seed, 2, static_cast<std::uint64_t>(method)});
    std::optional<DriverResult> r;
    switch (method) {
      case DriverMethod::ET: r = nd_et(m, method_seed, cfg.trials); break;
      case DriverMethod::ECT_NUMERIC:
        if (m.dim <= cfg.tolerances.dim_cap) r = nd_ect_numeric(instantiate_real(m, method_seed), cfg.tolerances);
        break;
      case DriverMethod::ECT_SYMMETRIC:
        if (m.dim <= cfg.tolerances.dim_cap) r = nd_ect_symmetric(instantiate_real(m, method_seed), cfg.tolerances);
        break;
      case DriverMethod::SCT_MATCHING: r = nd_sct_matching(m); break;
      case DriverMethod::ORACLE: r = nd_oracle(m, method_seed); break;
    }
    out.seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count());
    out.n_d_frac.push_back(r ? std::optional<Rational>(ratio(r->n_d, r->dim)) : std::nullopt);
    out.per_node.push_back(r ? std::optional<Rational>(ratio(r->n_d, r->n_nodes)) : std::nullopt);
  }
  return out;
}

template <typename Task>
void run_parallel(std::size_t count, int jobs, Task&& task) {
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(std::max<std::size_t>(count, 1))));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
}

// Mean and sample variance are exact; only the final values are rounded.
void summarize(const std::vector<Rational>& values, SweepRow& row) {
  row.realizations = static_cast<int>(values.size());
  if (values.empty()) return;
  const long count = static_cast<long>(values.size());
  Rational sum = 0, squares = 0;
  for (const Rational& v : values) {
    sum += v;
    squares += v * v;
  }
  row.mean_nd = to_double(Rational(sum / count));
  const Rational variance = count > 1 ? Rational((count * squares - sum * sum) / (count * (count - 1))) : Rational(0);
  row.std = std::sqrt(to_double(variance));
  row.stderr_ = to_double(variance) == 0.0 ? 0.0 : std::sqrt(to_double(Rational(variance / count)));
}

std::vector<SweepRow> run_grid(const ExperimentConfig& cfg, const RunOptions& options) {
  cfg.validate();
  const std::vector<GridPoint> grid = build_grid(cfg);
  if (grid.empty()) throw Error(ErrorCode::InvalidConfig, "empty grid");
  const std::size_t r_count = static_cast<std::size_t>(cfg.realizations);
  const std::size_t tasks = grid.size() * r_count;
  std::vector<Realized> results(tasks);
  std::atomic<std::size_t> done{0};
  std::mutex log_mutex;
  if (options.progress)
    options.progress(std::string(to_string(cfg.experiment)) + ": " + std::to_string(grid.size()) + " grid points x " +
                     std::to_string(r_count) + " realizations");
  run_parallel(tasks, options.jobs, [&](std::size_t i) {
    const std::size_t g = i / r_count;
    const int r = static_cast<int>(i % r_count);
    results[i] = realize(cfg, grid[g], realization_seed(cfg.master_seed, g, r));
    const std::size_t finished = ++done;
    if (options.progress && finished % r_count == 0) {
      std::lock_guard lock(log_mutex);
      options.progress("  " + std::to_string(finished) + "/" + std::to_string(tasks) + " realizations");
    }
  });

  const bool per_node_rows = cfg.experiment == ExperimentKind::ORDER_SWEEP;
  std::vector<SweepRow> rows;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    for (std::size_t k = 0; k < cfg.methods.size(); ++k) {
      for (int variant = 0; variant < (per_node_rows ? 2 : 1); ++variant) {
        std::vector<Rational> values;
        double seconds = 0.0;
        for (std::size_t r = 0; r < r_count; ++r) {
          const Realized& res = results[g * r_count + r];
          const auto& v = variant == 0 ? res.n_d_frac[k] : res.per_node[k];
          if (v) values.push_back(*v);
          seconds += res.seconds[k];
        }
        if (values.empty()) {
          if (options.progress && g == 0 && variant == 0)
            options.progress(std::string("  ") + to_string(cfg.methods[k]) + " skipped: dimension above its cap");
          continue;
        }
        SweepRow row;
        row.experiment = to_string(cfg.experiment);
        row.coord1 = grid[g].coord1;
        row.coord2 = grid[g].coord2;
        row.coord3 = grid[g].coord3;
        row.method = std::string(to_string(cfg.methods[k])) + (variant == 1 ? "_PER_NODE" : "");
        summarize(values, row);
        row.seconds = cfg.record_timing ? seconds : 0.0;
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

std::vector<SweepRow> run_kind(ExperimentKind kind, const ExperimentConfig& cfg, const RunOptions& options) {
  if (cfg.experiment != kind)
    throw Error(ErrorCode::InvalidConfig, std::string("config is ") + to_string(cfg.experiment) + ", expected " + to_string(kind));
  return run_grid(cfg, options);
}

void check_rational_unit_interval(const std::vector<Rational>& values, const char* what) {
  for (const Rational& v : values)
    if (v < 0 || v > 1) throw Error(ErrorCode::InvalidConfig, std::string(what) + " value outside [0, 1]");
}

}  // namespace

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); };
  if (realizations < 1) fail("realizations must be >= 1");
  if (methods.empty()) fail("method list is empty");
  if (trials < 1) fail("trials must be >= 1");
  if (graph.n_nodes < 1) fail("graph.n_nodes must be >= 1");
  if (order < 1) fail("order must be >= 1");
  const double n1 = graph.n_nodes - 1;
  const double k_max = graph.model == GraphModel::ER && graph.directed ? 2 * n1 : n1;
  for (double k : degree_grid(*this)) {
    if (!(k >= 0.0)) fail("mean degree must be >= 0");
    if (k > k_max) fail("mean degree " + format_number(k) + " is not reachable with " + std::to_string(graph.n_nodes) + " nodes");
  }
  if (graph.model == GraphModel::SF && !(graph.gamma > 2.0)) fail("SF exponent gamma must exceed 2");
  for (const auto& eig : unit_types)
    if (eig.size() != static_cast<std::size_t>(order))
      fail("every unit type needs exactly " + std::to_string(order) + " eigenvalues");
  const bool symmetric_ok = !graph.directed && order == 1;
  for (DriverMethod m : methods) {
    if (m == DriverMethod::ECT_SYMMETRIC && !symmetric_ok) fail("ECT_SYMMETRIC needs an undirected first-order system");
    if (m == DriverMethod::ORACLE && graph.n_nodes * order > kOracleCap) fail("ORACLE is limited to small systems");
  }

  switch (experiment) {
    case ExperimentKind::RHO_SWEEP:
      if (order != 1) fail("RHO_SWEEP is first order");
      if (unit_types.size() > 1) fail("RHO_SWEEP takes a single nonzero self-loop weight");
      if (!unit_types.empty() && unit_types.front().front() == 0) fail("RHO_SWEEP self-loop weight must be nonzero");
      check_rational_unit_interval(rho_grid, "rho");
      break;
    case ExperimentKind::SIMPLEX3:
      if (order != 1) fail("SIMPLEX3 is first order");
      if (!unit_types.empty() && unit_types.size() != 3) fail("SIMPLEX3 needs three unit types");
      check_distinct(make_types(unit_types, order));
      densities_on_simplex(simplex_step);
      break;
    case ExperimentKind::DELTA_SWEEP:
      if (order != 1) fail("DELTA_SWEEP is first order");
      if (n_types < 1) fail("n_types must be >= 1");
      if (!unit_types.empty() && unit_types.size() != static_cast<std::size_t>(n_types))
        fail("DELTA_SWEEP needs n_types unit types");
      if (delta_grid.empty() && delta_points < 1) fail("delta_points must be >= 1");
      check_distinct(make_types(unit_types, order));
      for (const Rational& d : delta_values(*this)) densities_for_delta(n_types, d);
      break;
    case ExperimentKind::NS_SWEEP:
      if (order != 1) fail("NS_SWEEP is first order");
      for (int ns : ns_values(*this))
        if (ns < 1 || ns > graph.n_nodes) fail("N_s must lie in [1, N]");
      break;
    case ExperimentKind::ORDER_SWEEP: {
      if (order < 2 || order > 3) fail("ORDER_SWEEP needs order 2 or 3");
      const auto table = unit_types.empty() ? default_order_table(order) : unit_types;
      if (table.size() != 2 && table.size() != 3) fail("ORDER_SWEEP needs two or three unit types");
      check_distinct(make_types(table, order));
      if (table.size() == 2) check_rational_unit_interval(rho_grid, "rho");
      else densities_on_simplex(simplex_step);
      break;
    }
    case ExperimentKind::LINKWEIGHT_SWEEP:
      if (order != 1) fail("LINKWEIGHT_SWEEP is first order");
      check_rational_unit_interval(q_grid, "q");
      break;
  }
}

std::vector<SweepRow> run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
  return run_grid(cfg, options);
}

std::vector<SweepRow> run_rho_sweep(const ExperimentConfig& cfg, const RunOptions& options) {
  return run_kind(ExperimentKind::RHO_SWEEP, cfg, options);
}
std::vector<SweepRow> run_simplex3(const ExperimentConfig& cfg, const RunOptions& options) {
  return run_kind(ExperimentKind::SIMPLEX3, cfg, options);
}
std::vector<SweepRow> run_delta_sweep(const ExperimentConfig& cfg, const RunOptions& options) {
  return run_kind(ExperimentKind::DELTA_SWEEP, cfg, options);
}
std::vector<SweepRow> run_ns_sweep(const ExperimentConfig& cfg, const RunOptions& options) {
  return run_kind(ExperimentKind::NS_SWEEP, cfg, options);
}
std::vector<SweepRow> run_order_sweep(const ExperimentConfig& cfg, const RunOptions& options) {
  return run_kind(ExperimentKind::ORDER_SWEEP, cfg, options);
}
std::vector<SweepRow> run_linkweight_sweep(const ExperimentConfig& cfg, const RunOptions& options) {
  return run_kind(ExperimentKind::LINKWEIGHT_SWEEP, cfg, options);
}

namespace {

std::string format_optional(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

double parse_number(const std::string& text, const char* column) {
  double v = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size())
    throw Error(ErrorCode::Parse, std::string("csv: bad ") + column + " '" + text + "'");
  return v;
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kCsvHeader << '\n';
  for (const SweepRow& r : rows)
    out << r.experiment << ',' << format_optional(r.coord1) << ',' << format_optional(r.coord2) << ','
        << format_optional(r.coord3) << ',' << r.method << ',' << format_number(r.mean_nd) << ','
        << format_number(r.std) << ',' << format_number(r.stderr_) << ',' << r.realizations << ','
        << format_number(r.seconds) << '\n';
}

void emit_csv(const std::vector<SweepRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
  write_csv(out, rows);
  out.flush();
  if (!out) throw Error(ErrorCode::Io, "write failed for '" + path + "'");
}

std::vector<SweepRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw Error(ErrorCode::Parse, "csv: missing or unexpected header");
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() != 10) throw Error(ErrorCode::Parse, "csv: expected 10 columns in '" + line + "'");
    SweepRow r;
    r.experiment = cells[0];
    auto opt = [](const std::string& s, const char* col) {
      return s.empty() ? std::optional<double>() : std::optional<double>(parse_number(s, col));
    };
    r.coord1 = opt(cells[1], "coord1");
    r.coord2 = opt(cells[2], "coord2");
    r.coord3 = opt(cells[3], "coord3");
    r.method = cells[4];
    r.mean_nd = parse_number(cells[5], "mean_nd");
    r.std = parse_number(cells[6], "std");
    r.stderr_ = parse_number(cells[7], "stderr");
    r.realizations = static_cast<int>(parse_number(cells[8], "R"));
    r.seconds = parse_number(cells[9], "seconds");
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace ectrl
