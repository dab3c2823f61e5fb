#pragma once

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "plan/model.hpp"

namespace plan {

namespace detail {

using json = nlohmann::json;

// Unknown keys are rejected so typos cannot silently fall back to defaults.
inline void check_keys(const json& obj, const std::string& path,
                       std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) known |= item.key() == key;
    if (!known) {
      throw ValidationError("validation error: " + path + ": unknown field '" +
                            item.key() + "'");
    }
  }
}

inline const json& require(const json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ValidationError("validation error: " + path + ": missing required field '" +
                          std::string(key) + "'");
  }
  return *it;
}

template <typename T>
T as(const json& value, const std::string& path) {
  try {
    return value.get<T>();
  } catch (const json::exception&) {
    throw ValidationError("validation error: " + path + ": unexpected value type");
  }
}

inline std::vector<double> as_number_list(const json& value, const std::string& path) {
  if (!value.is_array()) {
    throw ValidationError("validation error: " + path + ": expected an array of numbers");
  }
  std::vector<double> out;
  out.reserve(value.size());
  for (std::size_t i = 0; i < value.size(); ++i) {
    out.push_back(as<double>(value[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

}  // namespace detail

/// Parses and fully validates the canonical config document.
inline RunConfig load_config(const std::string& text) {
  using detail::as;
  using detail::as_number_list;
  using detail::check_keys;
  using detail::json;
  using detail::require;

  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("parse error: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("parse error: top-level value must be an object");

  check_keys(doc, "config",
             {"assets", "scenarios", "space", "x_max", "ea", "positioning",
              "sensitivity", "seed"});

  RunConfig cfg;

  const json& assets = require(doc, "config", "assets");
  if (!assets.is_array()) throw ValidationError("validation error: assets: expected an array");
  for (std::size_t i = 0; i < assets.size(); ++i) {
    const std::string path = "assets[" + std::to_string(i) + "]";
    const json& a = assets[i];
    if (!a.is_object()) throw ValidationError("validation error: " + path + ": expected an object");
    check_keys(a, path, {"cost", "capability"});
    AssetType asset;
    asset.unit_cost = as<double>(require(a, path, "cost"), path + ".cost");
    asset.capability = as_number_list(require(a, path, "capability"), path + ".capability");
    cfg.catalog.assets.push_back(std::move(asset));
  }
  cfg.catalog.demand_type_count =
      cfg.catalog.assets.empty() ? 0 : static_cast<int>(cfg.catalog.assets[0].capability.size());

  const json& scenarios = require(doc, "config", "scenarios");
  if (!scenarios.is_array()) throw ValidationError("validation error: scenarios: expected an array");
  for (std::size_t j = 0; j < scenarios.size(); ++j) {
    const std::string path = "scenarios[" + std::to_string(j) + "]";
    const json& s = scenarios[j];
    if (!s.is_object()) throw ValidationError("validation error: " + path + ": expected an object");
    check_keys(s, path, {"mean", "stddev", "probability"});
    Scenario sc;
    sc.demand_mean = as_number_list(require(s, path, "mean"), path + ".mean");
    sc.demand_stddev = as_number_list(require(s, path, "stddev"), path + ".stddev");
    sc.probability = as<double>(require(s, path, "probability"), path + ".probability");
    cfg.space.scenarios.push_back(std::move(sc));
  }

  if (auto it = doc.find("space"); it != doc.end()) {
    const json& sp = *it;
    if (!sp.is_object()) throw ValidationError("validation error: space: expected an object");
    check_keys(sp, "space",
               {"beta_min", "beta_max", "time_points", "instances", "futures_per_instance"});
    if (sp.contains("beta_min")) cfg.space.beta_min = as<double>(sp["beta_min"], "space.beta_min");
    if (sp.contains("beta_max")) cfg.space.beta_max = as<double>(sp["beta_max"], "space.beta_max");
    if (sp.contains("time_points")) cfg.space.time_points = as<int>(sp["time_points"], "space.time_points");
    if (sp.contains("instances")) {
      cfg.space.instances_per_scenario = as<int>(sp["instances"], "space.instances");
    }
    if (sp.contains("futures_per_instance")) {
      cfg.space.futures_per_instance =
          as<int>(sp["futures_per_instance"], "space.futures_per_instance");
    }
  }

  if (auto it = doc.find("x_max"); it != doc.end()) {
    cfg.x_max = as<int>(*it, "x_max");
  }

  if (auto it = doc.find("ea"); it != doc.end()) {
    const json& ea = *it;
    if (!ea.is_object()) throw ValidationError("validation error: ea: expected an object");
    check_keys(ea, "ea", {"population", "evaluations", "mutation_stddev", "mutation_prob"});
    if (ea.contains("population")) cfg.ea.population = as<int>(ea["population"], "ea.population");
    if (ea.contains("evaluations")) cfg.ea.evaluations = as<int>(ea["evaluations"], "ea.evaluations");
    if (ea.contains("mutation_stddev")) {
      cfg.ea.mutation_stddev = as<double>(ea["mutation_stddev"], "ea.mutation_stddev");
    }
    if (ea.contains("mutation_prob")) {
      const json& mp = ea["mutation_prob"];
      if (mp.is_string()) {
        if (mp.get<std::string>() != "2/n") {
          throw ValidationError(
              "validation error: ea.mutation_prob: must be a number or the string \"2/n\"");
        }
        cfg.ea.mutation_prob.reset();
      } else {
        cfg.ea.mutation_prob = as<double>(mp, "ea.mutation_prob");
      }
    }
  }

  if (auto it = doc.find("positioning"); it != doc.end()) {
    const json& pos = *it;
    if (!pos.is_object()) throw ValidationError("validation error: positioning: expected an object");
    check_keys(pos, "positioning", {"w_cost", "w_success", "aspiration", "failure_threshold"});
    if (pos.contains("w_cost")) cfg.positioning.w_cost = as<double>(pos["w_cost"], "positioning.w_cost");
    if (pos.contains("w_success")) {
      cfg.positioning.w_success = as<double>(pos["w_success"], "positioning.w_success");
    }
    if (pos.contains("aspiration")) {
      cfg.positioning.aspiration = as<double>(pos["aspiration"], "positioning.aspiration");
    }
    if (pos.contains("failure_threshold")) {
      cfg.positioning.failure_threshold =
          as<double>(pos["failure_threshold"], "positioning.failure_threshold");
    }
  }

  if (auto it = doc.find("sensitivity"); it != doc.end()) {
    const json& sen = *it;
    if (!sen.is_object()) throw ValidationError("validation error: sensitivity: expected an object");
    check_keys(sen, "sensitivity", {"stddev", "samples"});
    if (sen.contains("stddev")) cfg.sensitivity.stddev = as<double>(sen["stddev"], "sensitivity.stddev");
    if (sen.contains("samples")) cfg.sensitivity.samples = as<int>(sen["samples"], "sensitivity.samples");
  }

  if (auto it = doc.find("seed"); it != doc.end()) {
    cfg.master_seed = as<std::uint64_t>(*it, "seed");
  }

  validate(cfg);
  return cfg;
}

inline RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("parse error: cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_config(buf.str());
}

/// Serializes a RunConfig back to the canonical document; load_config on the
/// result reproduces the config exactly.
inline std::string save_config(const RunConfig& cfg) {
  using detail::json;

  json doc;
  for (const AssetType& a : cfg.catalog.assets) {
    doc["assets"].push_back({{"cost", a.unit_cost}, {"capability", a.capability}});
  }
  for (const Scenario& sc : cfg.space.scenarios) {
    doc["scenarios"].push_back({{"mean", sc.demand_mean},
                                {"stddev", sc.demand_stddev},
                                {"probability", sc.probability}});
  }
  doc["space"] = {{"beta_min", cfg.space.beta_min},
                  {"beta_max", cfg.space.beta_max},
                  {"time_points", cfg.space.time_points},
                  {"instances", cfg.space.instances_per_scenario},
                  {"futures_per_instance", cfg.space.futures_per_instance}};
  doc["x_max"] = cfg.x_max;
  doc["ea"] = {{"population", cfg.ea.population},
               {"evaluations", cfg.ea.evaluations},
               {"mutation_stddev", cfg.ea.mutation_stddev}};
  if (cfg.ea.mutation_prob) {
    doc["ea"]["mutation_prob"] = *cfg.ea.mutation_prob;
  } else {
    doc["ea"]["mutation_prob"] = "2/n";
  }
  doc["positioning"] = {{"w_cost", cfg.positioning.w_cost},
                        {"w_success", cfg.positioning.w_success},
                        {"aspiration", cfg.positioning.aspiration},
                        {"failure_threshold", cfg.positioning.failure_threshold}};
  doc["sensitivity"] = {{"stddev", cfg.sensitivity.stddev},
                        {"samples", cfg.sensitivity.samples}};
  doc["seed"] = cfg.master_seed;
  return doc.dump(2) + "\n";
}

}  // namespace plan
