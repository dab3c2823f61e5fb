#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "plan/config.hpp"
#include "plan/model.hpp"

using namespace plan;
using Catch::Matchers::ContainsSubstring;

namespace {

const std::string kBaseConfig = R"({
  "assets": [
    {"cost": 1, "capability": [3, 3, 3, 3]},
    {"cost": 1, "capability": [1, 6, 5, 0]},
    {"cost": 1, "capability": [0, 0, 6, 6]},
    {"cost": 1, "capability": [10, 0, 0, 2]},
    {"cost": 1, "capability": [0, 4, 4, 4]}
  ],
  "scenarios": [
    {"mean": [2, 2, 3, 3], "stddev": [1, 3, 4, 2], "probability": 0.25},
    {"mean": [10, 6, 6, 7], "stddev": [4, 3, 2, 2], "probability": 0.25},
    {"mean": [0, 10, 9, 5], "stddev": [1, 1, 4, 4], "probability": 0.25},
    {"mean": [4, 6, 6, 5], "stddev": [2, 2, 3, 3], "probability": 0.25}
  ],
  "seed": 42
})";

}  // namespace

TEST_CASE("reference catalog and scenario space load with defaults") {
  const RunConfig cfg = load_config(kBaseConfig);

  REQUIRE(cfg.catalog.asset_count() == 5);
  REQUIRE(cfg.catalog.demand_type_count == 4);
  REQUIRE(cfg.catalog.assets[1].capability == std::vector<double>{1, 6, 5, 0});
  REQUIRE(cfg.catalog.assets[3].capability == std::vector<double>{10, 0, 0, 2});
  for (const AssetType& a : cfg.catalog.assets) REQUIRE(a.unit_cost == 1.0);

  REQUIRE(cfg.space.scenario_count() == 4);
  for (const Scenario& sc : cfg.space.scenarios) REQUIRE(sc.probability == 0.25);
  REQUIRE(cfg.space.scenarios[2].demand_mean == std::vector<double>{0, 10, 9, 5});
  REQUIRE(cfg.space.beta_min == 1.0);
  REQUIRE(cfg.space.beta_max == 10.0);
  REQUIRE(cfg.space.time_points == 10);
  REQUIRE(cfg.space.instances_per_scenario == 10);
  REQUIRE(cfg.space.futures_per_instance == 10);
  REQUIRE(cfg.space.futures_per_scenario() == 100);

  REQUIRE(cfg.x_max == 500);
  REQUIRE(cfg.ea.population == 20);
  REQUIRE(cfg.ea.evaluations == 2000);
  REQUIRE(cfg.ea.mutation_stddev == 0.1);
  REQUIRE_FALSE(cfg.ea.mutation_prob.has_value());
  REQUIRE(cfg.ea.mutation_probability(5) == 0.4);

  REQUIRE(cfg.positioning.w_cost == 0.3);
  REQUIRE(cfg.positioning.w_success == 0.7);
  REQUIRE(cfg.positioning.aspiration == 0.8);
  REQUIRE(cfg.positioning.failure_threshold == 0.6);
  REQUIRE(cfg.sensitivity.stddev == 0.1);
  REQUIRE(cfg.sensitivity.samples == 1000);
  REQUIRE(cfg.master_seed == 42);
}

TEST_CASE("malformed document raises a parse error") {
  REQUIRE_THROWS_AS(load_config("{ not json"), ParseError);
  REQUIRE_THROWS_AS(load_config("[1, 2, 3]"), ParseError);
}

TEST_CASE("probabilities must sum to one") {
  const std::string text = R"({
    "assets": [{"cost": 1, "capability": [1]}],
    "scenarios": [
      {"mean": [1], "stddev": [0], "probability": 0.5},
      {"mean": [2], "stddev": [0], "probability": 0.5},
      {"mean": [3], "stddev": [0], "probability": 0.25}
    ]
  })";
  REQUIRE_THROWS_WITH(load_config(text), ContainsSubstring("probabilities sum != 1"));
}

TEST_CASE("empty asset list is rejected") {
  const std::string text = R"({
    "assets": [],
    "scenarios": [{"mean": [1], "stddev": [0], "probability": 1.0}]
  })";
  REQUIRE_THROWS_WITH(load_config(text), ContainsSubstring("n >= 1 violated"));
}

TEST_CASE("unknown fields are rejected at every level") {
  REQUIRE_THROWS_WITH(
      load_config(R"({"assets": [{"cost": 1, "capability": [1]}],
                      "scenarios": [{"mean": [1], "stddev": [0], "probability": 1.0}],
                      "typo_field": 3})"),
      ContainsSubstring("unknown field 'typo_field'"));
  REQUIRE_THROWS_WITH(
      load_config(R"({"assets": [{"cost": 1, "capability": [1], "name": "a"}],
                      "scenarios": [{"mean": [1], "stddev": [0], "probability": 1.0}]})"),
      ContainsSubstring("unknown field 'name'"));
  REQUIRE_THROWS_WITH(
      load_config(R"({"assets": [{"cost": 1, "capability": [1]}],
                      "scenarios": [{"mean": [1], "stddev": [0], "probability": 1.0}],
                      "positioning": {"wcost": 0.3}})"),
      ContainsSubstring("unknown field 'wcost'"));
}

TEST_CASE("structural validation names the offending path") {
  const std::string ragged = R"({
    "assets": [{"cost": 1, "capability": [1, 2]}, {"cost": 1, "capability": [1]}],
    "scenarios": [{"mean": [1, 1], "stddev": [0, 0], "probability": 1.0}]
  })";
  REQUIRE_THROWS_WITH(load_config(ragged), ContainsSubstring("assets[1].capability"));

  const std::string bad_mean = R"({
    "assets": [{"cost": 1, "capability": [1]}],
    "scenarios": [{"mean": [-1], "stddev": [0], "probability": 1.0}]
  })";
  REQUIRE_THROWS_WITH(load_config(bad_mean), ContainsSubstring("scenarios[0].mean[0]"));

  const std::string uncovered = R"({
    "assets": [{"cost": 1, "capability": [1, 0]}],
    "scenarios": [{"mean": [1, 1], "stddev": [0, 0], "probability": 1.0}]
  })";
  REQUIRE_THROWS_WITH(load_config(uncovered),
                      ContainsSubstring("no asset has capability > 0 for demand type 1"));
}

TEST_CASE("weights must be complementary") {
  const std::string text = R"({
    "assets": [{"cost": 1, "capability": [1]}],
    "scenarios": [{"mean": [1], "stddev": [0], "probability": 1.0}],
    "positioning": {"w_cost": 0.4, "w_success": 0.7}
  })";
  REQUIRE_THROWS_WITH(load_config(text), ContainsSubstring("w_cost + w_success"));
}

TEST_CASE("mutation probability accepts a number or the 2/n marker") {
  const std::string numeric = R"({
    "assets": [{"cost": 1, "capability": [1]}],
    "scenarios": [{"mean": [1], "stddev": [0], "probability": 1.0}],
    "ea": {"mutation_prob": 0.25}
  })";
  REQUIRE(load_config(numeric).ea.mutation_probability(8) == 0.25);

  const std::string marker = R"({
    "assets": [{"cost": 1, "capability": [1]}],
    "scenarios": [{"mean": [1], "stddev": [0], "probability": 1.0}],
    "ea": {"mutation_prob": "2/n"}
  })";
  REQUIRE(load_config(marker).ea.mutation_probability(8) == 0.25);

  const std::string junk = R"({
    "assets": [{"cost": 1, "capability": [1]}],
    "scenarios": [{"mean": [1], "stddev": [0], "probability": 1.0}],
    "ea": {"mutation_prob": "half"}
  })";
  REQUIRE_THROWS_AS(load_config(junk), ValidationError);
}

TEST_CASE("save and reload reproduce the config exactly") {
  RunConfig cfg = load_config(kBaseConfig);
  cfg.positioning.w_cost = 0.45;
  cfg.positioning.w_success = 0.55;
  cfg.sensitivity.samples = 250;
  cfg.master_seed = 0xFFFFFFFFFFFFFFFFull;
  validate(cfg);

  const RunConfig reloaded = load_config(save_config(cfg));
  REQUIRE(reloaded == cfg);

  cfg.ea.mutation_prob = 0.125;
  const RunConfig reloaded2 = load_config(save_config(cfg));
  REQUIRE(reloaded2 == cfg);
}

TEST_CASE("gene decoding rounds at the midpoint") {
  REQUIRE(decode_gene(0.0, 500) == 0);
  REQUIRE(decode_gene(1.0, 500) == 500);
  REQUIRE(decode_gene(0.5, 500) == 250);
  REQUIRE(decode_gene(0.501, 500) == 251);
  REQUIRE(decode_gene(0.0009, 500) == 0);
  REQUIRE(decode_gene(0.001, 500) == 1);
}

TEST_CASE("portfolio construction round-trips counts") {
  const Portfolio p = portfolio_from_counts({3, 1, 0, 2, 0}, 500);
  REQUIRE(p.counts == std::vector<int>{3, 1, 0, 2, 0});
  const Portfolio q = make_portfolio(p.genotype, 500);
  REQUIRE(q.counts == p.counts);
}
