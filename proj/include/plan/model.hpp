#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace plan {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed configuration document (not valid JSON, wrong value types).
struct ParseError : ConfigError {
  using ConfigError::ConfigError;
};

/// Well-formed document violating a model invariant; the message names the
/// invariant and the offending path.
struct ValidationError : ConfigError {
  using ConfigError::ConfigError;
};

/// One investable asset type: a unit costs `unit_cost` and satisfies
/// `capability[k]` units of demand type k per asset unit.
struct AssetType {
  double unit_cost = 0.0;
  std::vector<double> capability;

  bool operator==(const AssetType&) const = default;
};

struct AssetCatalog {
  std::vector<AssetType> assets;
  int demand_type_count = 0;

  [[nodiscard]] int asset_count() const { return static_cast<int>(assets.size()); }

  bool operator==(const AssetCatalog&) const = default;
};

/// One demand environment: per demand type the Gaussian (mean, stddev) the
/// per-time-point demands are drawn from, plus the scenario's occurrence
/// probability.
struct Scenario {
  std::vector<double> demand_mean;
  std::vector<double> demand_stddev;
  double probability = 0.0;

  bool operator==(const Scenario&) const = default;
};

struct ScenarioSpace {
  std::vector<Scenario> scenarios;
  double beta_min = 1.0;
  double beta_max = 10.0;
  int time_points = 10;
  int instances_per_scenario = 10;
  int futures_per_instance = 10;

  [[nodiscard]] int scenario_count() const { return static_cast<int>(scenarios.size()); }

  /// r: simulated futures per scenario.
  [[nodiscard]] int futures_per_scenario() const {
    return instances_per_scenario * futures_per_instance;
  }

  bool operator==(const ScenarioSpace&) const = default;
};

/// Candidate plan. The search operates on a real-valued genotype in [0,1]^n;
/// the integer asset counts are the decoded phenotype, counts[i] =
/// round(genotype[i] * x_max).
struct Portfolio {
  std::vector<double> genotype;
  std::vector<int> counts;

  bool operator==(const Portfolio&) const = default;
};

inline int decode_gene(double gene, int x_max) {
  return static_cast<int>(std::lround(gene * x_max));
}

inline Portfolio make_portfolio(std::vector<double> genotype, int x_max) {
  Portfolio p;
  p.counts.reserve(genotype.size());
  for (double g : genotype) {
    p.counts.push_back(decode_gene(g, x_max));
  }
  p.genotype = std::move(genotype);
  return p;
}

/// Canonical genotype embedding of integer counts (counts/x_max decodes back
/// to the same counts).
inline Portfolio portfolio_from_counts(std::vector<int> counts, int x_max) {
  Portfolio p;
  p.genotype.reserve(counts.size());
  for (int c : counts) {
    p.genotype.push_back(static_cast<double>(c) / x_max);
  }
  p.counts = std::move(counts);
  return p;
}

struct EaSettings {
  int population = 20;
  int evaluations = 2000;
  double mutation_stddev = 0.1;
  /// Per-gene mutation probability; unset means the 2/n default.
  std::optional<double> mutation_prob;

  [[nodiscard]] double mutation_probability(int gene_count) const {
    return mutation_prob ? *mutation_prob : 2.0 / gene_count;
  }

  bool operator==(const EaSettings&) const = default;
};

struct PositioningSettings {
  double w_cost = 0.3;
  double w_success = 0.7;
  double aspiration = 0.8;
  double failure_threshold = 0.6;

  bool operator==(const PositioningSettings&) const = default;
};

struct SensitivitySettings {
  double stddev = 0.1;
  int samples = 1000;

  bool operator==(const SensitivitySettings&) const = default;
};

struct RunConfig {
  AssetCatalog catalog;
  ScenarioSpace space;
  int x_max = 500;
  EaSettings ea;
  PositioningSettings positioning;
  SensitivitySettings sensitivity;
  std::uint64_t master_seed = 0;

  bool operator==(const RunConfig&) const = default;
};

namespace detail {

[[noreturn]] inline void fail_validation(const std::string& path,
                                         const std::string& what) {
  throw ValidationError("validation error: " + path + ": " + what);
}

}  // namespace detail

inline void validate(const RunConfig& cfg) {
  using detail::fail_validation;

  const int n = cfg.catalog.asset_count();
  const int m = cfg.catalog.demand_type_count;
  if (n < 1) fail_validation("assets", "n >= 1 violated (asset list is empty)");
  if (m < 1) fail_validation("assets", "m >= 1 violated (no demand types)");

  for (int i = 0; i < n; ++i) {
    const AssetType& a = cfg.catalog.assets[i];
    const std::string path = "assets[" + std::to_string(i) + "]";
    if (!(a.unit_cost >= 0.0)) fail_validation(path + ".cost", "unit cost must be >= 0");
    if (static_cast<int>(a.capability.size()) != m) {
      fail_validation(path + ".capability",
                      "capability must have exactly m = " + std::to_string(m) + " entries");
    }
    bool any_positive = false;
    for (int k = 0; k < m; ++k) {
      if (!(a.capability[k] >= 0.0)) {
        fail_validation(path + ".capability[" + std::to_string(k) + "]",
                        "capability entries must be >= 0");
      }
      any_positive |= a.capability[k] > 0.0;
    }
    if (!any_positive) {
      fail_validation(path + ".capability",
                      "at least one capability entry must be > 0");
    }
  }
  for (int k = 0; k < m; ++k) {
    bool covered = false;
    for (const AssetType& a : cfg.catalog.assets) covered |= a.capability[k] > 0.0;
    if (!covered) {
      fail_validation("assets", "no asset has capability > 0 for demand type " +
                                    std::to_string(k));
    }
  }

  const ScenarioSpace& sp = cfg.space;
  if (sp.scenarios.empty()) fail_validation("scenarios", "Q >= 1 violated (scenario list is empty)");
  double prob_sum = 0.0;
  for (int j = 0; j < sp.scenario_count(); ++j) {
    const Scenario& sc = sp.scenarios[j];
    const std::string path = "scenarios[" + std::to_string(j) + "]";
    if (static_cast<int>(sc.demand_mean.size()) != m) {
      fail_validation(path + ".mean", "mean must have exactly m = " + std::to_string(m) + " entries");
    }
    if (static_cast<int>(sc.demand_stddev.size()) != m) {
      fail_validation(path + ".stddev", "stddev must have exactly m = " + std::to_string(m) + " entries");
    }
    for (int k = 0; k < m; ++k) {
      if (!(sc.demand_mean[k] >= 0.0)) {
        fail_validation(path + ".mean[" + std::to_string(k) + "]", "mean must be >= 0");
      }
      if (!(sc.demand_stddev[k] >= 0.0)) {
        fail_validation(path + ".stddev[" + std::to_string(k) + "]", "stddev must be >= 0");
      }
    }
    if (!(sc.probability >= 0.0 && sc.probability <= 1.0)) {
      fail_validation(path + ".probability", "probability must lie in [0, 1]");
    }
    prob_sum += sc.probability;
  }
  if (std::abs(prob_sum - 1.0) > 1e-9) {
    fail_validation("scenarios", "probabilities sum != 1 (got " + std::to_string(prob_sum) + ")");
  }

  if (!(sp.beta_min > 0.0)) fail_validation("space.beta_min", "beta range lower bound must be > 0");
  if (!(sp.beta_min <= sp.beta_max)) fail_validation("space", "beta_min must be <= beta_max");
  if (sp.time_points < 1) fail_validation("space.time_points", "must be >= 1");
  if (sp.instances_per_scenario < 1) fail_validation("space.instances", "must be >= 1");
  if (sp.futures_per_instance < 1) fail_validation("space.futures_per_instance", "must be >= 1");

  if (cfg.x_max < 1) fail_validation("x_max", "must be >= 1");

  if (cfg.ea.population < 1) fail_validation("ea.population", "must be >= 1");
  if (cfg.ea.evaluations < 1) fail_validation("ea.evaluations", "must be >= 1");
  if (!(cfg.ea.mutation_stddev >= 0.0)) fail_validation("ea.mutation_stddev", "must be >= 0");
  if (cfg.ea.mutation_prob &&
      !(*cfg.ea.mutation_prob >= 0.0 && *cfg.ea.mutation_prob <= 1.0)) {
    fail_validation("ea.mutation_prob", "must lie in [0, 1]");
  }

  const PositioningSettings& pos = cfg.positioning;
  if (!(pos.w_cost >= 0.0) || !(pos.w_success >= 0.0)) {
    fail_validation("positioning", "weights must be >= 0");
  }
  if (std::abs(pos.w_cost + pos.w_success - 1.0) > 1e-12) {
    fail_validation("positioning", "w_cost + w_success must equal 1");
  }
  if (!(pos.aspiration >= 0.0 && pos.aspiration <= 1.0)) {
    fail_validation("positioning.aspiration", "must lie in [0, 1]");
  }
  if (!(pos.failure_threshold >= 0.0 && pos.failure_threshold <= 1.0)) {
    fail_validation("positioning.failure_threshold", "must lie in [0, 1]");
  }

  if (!(cfg.sensitivity.stddev >= 0.0)) fail_validation("sensitivity.stddev", "must be >= 0");
  if (cfg.sensitivity.samples < 1) fail_validation("sensitivity.samples", "must be >= 1");
}

}  // namespace plan
