#include "ectrl/config.hpp"

#include <fstream>
#include <sstream>

#include "ectrl/error.hpp"
#include "ectrl/schema.hpp"

namespace ectrl {

using nlohmann::json;

Rational rational_from_json(const json& j) {
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (j.is_number()) return rational_from_double(j.get<double>());
  if (j.is_string()) return parse_rational(j.get<std::string>());
  throw Error(ErrorCode::InvalidConfig, "expected a rational, got " + j.dump());
}

namespace {

std::vector<Rational> rational_list(const json& j) {
  std::vector<Rational> out;
  for (const json& v : j) out.push_back(rational_from_json(v));
  return out;
}

json rational_to_json(const Rational& q) { return format_rational(q); }

}  // namespace

ExperimentConfig parse_experiment_config(const json& j) {
  const auto errors = validate_json(j, experiment_config_schema());
  if (!errors.empty()) {
    std::string joined = "config does not match the schema:";
    for (const auto& e : errors) joined += "\n  " + e;
    throw Error(ErrorCode::InvalidConfig, joined);
  }
  try {
    ExperimentConfig cfg;
    cfg.experiment = parse_experiment_kind(j.at("experiment").get<std::string>());
    const json& g = j.at("graph");
    cfg.graph.model = parse_graph_model(g.at("model").get<std::string>());
    cfg.graph.n_nodes = g.at("n_nodes").get<int>();
    cfg.graph.mean_degree = g.at("mean_degree").get<double>();
    cfg.graph.gamma = g.value("gamma", 3.0);
    cfg.graph.directed = g.value("directed", false);
    cfg.order = j.value("order", 1);
    if (j.contains("unit_types"))
      for (const json& eig : j["unit_types"]) cfg.unit_types.push_back(rational_list(eig));
    if (j.contains("grid")) {
      const json& grid = j["grid"];
      if (grid.contains("rho")) cfg.rho_grid = rational_list(grid["rho"]);
      if (grid.contains("simplex_step")) cfg.simplex_step = rational_from_json(grid["simplex_step"]);
      cfg.n_types = grid.value("n_types", cfg.n_types);
      if (grid.contains("delta")) cfg.delta_grid = rational_list(grid["delta"]);
      cfg.delta_points = grid.value("delta_points", cfg.delta_points);
      if (grid.contains("ns"))
        for (const json& ns : grid["ns"]) cfg.ns_grid.push_back(ns.is_string() ? 0 : ns.get<int>());
      if (grid.contains("q")) cfg.q_grid = rational_list(grid["q"]);
      if (grid.contains("shared_weight")) cfg.shared_weight = rational_from_json(grid["shared_weight"]);
      if (grid.contains("mean_degrees")) cfg.mean_degrees = grid["mean_degrees"].get<std::vector<double>>();
    }
    cfg.realizations = j.value("realizations", cfg.realizations);
    cfg.master_seed = j.value("master_seed", cfg.master_seed);
    if (j.contains("methods")) {
      cfg.methods.clear();
      for (const json& m : j["methods"]) cfg.methods.push_back(parse_driver_method(m.get<std::string>()));
    }
    cfg.trials = j.value("trials", cfg.trials);
    cfg.record_timing = j.value("record_timing", false);
    if (j.contains("tolerances")) {
      const json& t = j["tolerances"];
      cfg.tolerances.cluster_rel = t.value("cluster_rel", cfg.tolerances.cluster_rel);
      cfg.tolerances.rank_rel = t.value("rank_rel", cfg.tolerances.rank_rel);
      cfg.tolerances.dim_cap = t.value("ect_dim_cap", cfg.tolerances.dim_cap);
    }
    cfg.validate();
    return cfg;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidConfig) throw;
    throw Error(ErrorCode::InvalidConfig, e.what());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, e.what());
  }
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, "'" + path + "' is not valid JSON: " + e.what());
  }
  return parse_experiment_config(j);
}

json to_json(const ExperimentConfig& cfg) {
  json j;
  j["experiment"] = to_string(cfg.experiment);
  j["graph"] = {{"model", to_string(cfg.graph.model)},
                {"n_nodes", cfg.graph.n_nodes},
                {"mean_degree", cfg.graph.mean_degree},
                {"gamma", cfg.graph.gamma},
                {"directed", cfg.graph.directed}};
  j["order"] = cfg.order;
  if (!cfg.unit_types.empty()) {
    json table = json::array();
    for (const auto& eig : cfg.unit_types) {
      json row = json::array();
      for (const Rational& q : eig) row.push_back(rational_to_json(q));
      table.push_back(row);
    }
    j["unit_types"] = table;
  }
  json grid = json::object();
  auto list = [](const std::vector<Rational>& v) {
    json out = json::array();
    for (const Rational& q : v) out.push_back(rational_to_json(q));
    return out;
  };
  if (!cfg.rho_grid.empty()) grid["rho"] = list(cfg.rho_grid);
  grid["simplex_step"] = rational_to_json(cfg.simplex_step);
  grid["n_types"] = cfg.n_types;
  if (!cfg.delta_grid.empty()) grid["delta"] = list(cfg.delta_grid);
  grid["delta_points"] = cfg.delta_points;
  if (!cfg.ns_grid.empty()) {
    json ns = json::array();
    for (int v : cfg.ns_grid) ns.push_back(v == 0 ? json("N") : json(v));
    grid["ns"] = ns;
  }
  if (!cfg.q_grid.empty()) grid["q"] = list(cfg.q_grid);
  grid["shared_weight"] = rational_to_json(cfg.shared_weight);
  if (!cfg.mean_degrees.empty()) grid["mean_degrees"] = cfg.mean_degrees;
  j["grid"] = grid;
  j["realizations"] = cfg.realizations;
  j["master_seed"] = cfg.master_seed;
  json methods = json::array();
  for (DriverMethod m : cfg.methods) methods.push_back(to_string(m));
  j["methods"] = methods;
  j["trials"] = cfg.trials;
  j["record_timing"] = cfg.record_timing;
  j["tolerances"] = {{"cluster_rel", cfg.tolerances.cluster_rel},
                     {"rank_rel", cfg.tolerances.rank_rel},
                     {"ect_dim_cap", cfg.tolerances.dim_cap}};
  return j;
}

json to_json(const UnitType& u) {
  json eig = json::array(), coef = json::array();
  for (const Rational& q : u.eigenvalues) eig.push_back(rational_to_json(q));
  for (const Rational& q : u.coefficients) coef.push_back(rational_to_json(q));
  return {{"type_id", u.type_id}, {"order", u.order}, {"eigenvalues", eig}, {"coefficients", coef}};
}

UnitType unit_type_from_json(const json& j) {
  try {
    return make_unit_type(j.at("order").get<int>(), rational_list(j.at("eigenvalues")), j.value("type_id", 0));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, e.what());
  }
}

json to_json(const Assignment& a) {
  json types = json::array(), densities = json::array();
  for (const UnitType& u : a.types) types.push_back(to_json(u));
  for (const Rational& q : a.densities) densities.push_back(rational_to_json(q));
  return {{"types", types}, {"densities", densities}, {"counts", a.counts}, {"node_type", a.node_type}, {"seed", a.seed}};
}

json to_json(const DriverResult& r) {
  json j;
  j["n_d"] = r.n_d;
  j["dim"] = r.dim;
  j["n_nodes"] = r.n_nodes;
  j["n_d_frac"] = r.n_d_frac();
  j["n_d_per_node"] = r.n_d_per_node();
  j["method"] = to_string(r.method);
  if (r.achieving_exact)
    j["achieving_eigenvalue"] = format_rational(*r.achieving_exact);
  else if (r.method == DriverMethod::ECT_NUMERIC || r.method == DriverMethod::ECT_SYMMETRIC)
    j["achieving_eigenvalue"] = {r.achieving_value.real(), r.achieving_value.imag()};
  if (!r.candidate_ranks.empty()) {
    json ranks = json::array();
    for (const CandidateRank& c : r.candidate_ranks)
      ranks.push_back({{"eigenvalue", format_rational(c.eigenvalue)}, {"rank", c.rank}, {"failure_bound", c.failure_bound}});
    j["candidate_ranks"] = ranks;
  }
  return j;
}

TypeTable parse_types_flag(const std::string& text, int order) {
  TypeTable table;
  std::stringstream items(text);
  int id = 0;
  for (std::string item; std::getline(items, item, ',');) {
    const auto colon = item.rfind(':');
    if (colon == std::string::npos) throw Error(ErrorCode::InvalidConfig, "type '" + item + "' needs <eigenvalues>:<density>");
    std::vector<Rational> eig;
    std::stringstream parts(item.substr(0, colon));
    for (std::string part; std::getline(parts, part, '|');) eig.push_back(parse_rational(part));
    if (eig.size() != static_cast<std::size_t>(order))
      throw Error(ErrorCode::InvalidConfig, "type '" + item + "' needs " + std::to_string(order) + " eigenvalues");
    table.types.push_back(make_unit_type(order, eig, id++));
    table.densities.push_back(parse_rational(item.substr(colon + 1)));
  }
  if (table.types.empty()) throw Error(ErrorCode::InvalidConfig, "no types given");
  return table;
}

}  // namespace ectrl
