#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "plan/model.hpp"
#include "plan/positioning.hpp"
#include "plan/rng.hpp"

using namespace plan;

namespace {

Candidate candidate(std::vector<int> counts, double cost, std::vector<double> success) {
  Candidate c;
  c.portfolio = portfolio_from_counts(std::move(counts), 500);
  c.cost = cost;
  c.success = std::move(success);
  return c;
}

// Three candidates over four equiprobable scenarios; all downstream values
// derived by hand from the definitions.
struct Fixture {
  RunConfig cfg;
  CandidateSet set;

  Fixture() {
    cfg.catalog.assets = {{1.0, {1}}, {2.0, {1}}};
    cfg.catalog.demand_type_count = 1;
    for (int j = 0; j < 4; ++j) cfg.space.scenarios.push_back({{1}, {0}, 0.25});
    set.scenario_count = 4;
    set.candidates.push_back(candidate({4, 0}, 4.0, {0.5, 0.9, 1.0, 0.55}));
    set.candidates.push_back(candidate({1, 2}, 5.0, {0.7, 0.9, 0.8, 0.50}));
    set.candidates.push_back(candidate({0, 3}, 6.0, {1.0, 0.9, 0.2, 0.55}));
  }
};

bool dominates_ref(const MetricTriple& a, const MetricTriple& b) {
  const bool geq = a.robustness >= b.robustness && a.risk <= b.risk &&
                   a.adapt_cost <= b.adapt_cost;
  const bool strict = a.robustness > b.robustness || a.risk < b.risk ||
                      a.adapt_cost < b.adapt_cost;
  return geq && strict;
}

}  // namespace

TEST_CASE("aggregated score blends normalized cost and success") {
  CandidateSet set;
  set.scenario_count = 1;
  set.candidates.push_back(candidate({1}, 10.0, {0.5}));
  set.candidates.push_back(candidate({2}, 20.0, {1.0}));
  const std::vector<double> f = aggregate_scores(set, 0, PositioningSettings{});
  REQUIRE(f[0] == Catch::Approx(0.3).margin(1e-15));
  REQUIRE(f[1] == Catch::Approx(0.7).margin(1e-15));
}

TEST_CASE("degenerate objectives normalize to one") {
  CandidateSet set;
  set.scenario_count = 1;
  set.candidates.push_back(candidate({1}, 7.0, {0.4}));
  const std::vector<double> f = aggregate_scores(set, 0, PositioningSettings{});
  REQUIRE(f[0] == 1.0);

  set.candidates.push_back(candidate({2}, 7.0, {0.4}));
  const std::vector<double> g = aggregate_scores(set, 0, PositioningSettings{});
  REQUIRE(g[0] == 1.0);
  REQUIRE(g[1] == 1.0);
}

TEST_CASE("empty candidate set is rejected") {
  CandidateSet set;
  set.scenario_count = 1;
  REQUIRE_THROWS_AS(aggregate_scores(set, 0, PositioningSettings{}), std::invalid_argument);
  REQUIRE_THROWS_AS(select_best(set, std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("aspiration boundary counts as robust") {
  const std::vector<double> probs{0.25, 0.25, 0.25, 0.25};
  REQUIRE(robustness(std::vector<double>{0.8, 0.79, 0.99, 0.0}, probs, 0.8) == 0.5);
  REQUIRE(robustness(std::vector<double>{0.8, 0.8, 0.8, 0.8}, probs, 0.8) == 1.0);
}

TEST_CASE("failure threshold is strict") {
  const std::vector<double> probs{0.25, 0.25, 0.25, 0.25};
  REQUIRE(risk(std::vector<double>{0.6, 0.59, 1.0, 0.0}, probs, 0.6) == 0.5);
  REQUIRE(risk(std::vector<double>{0.6, 0.6, 0.6, 0.6}, probs, 0.6) == 0.0);
}

TEST_CASE("pass and fail probabilities partition the scenario space") {
  RandomStream gen = derive_stream(31, {{StreamLabel::prob_perturb, 0}});
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> scores(4), probs{0.1, 0.2, 0.3, 0.4};
    for (double& s : scores) s = gen.next_uniform();
    const double pass = robustness(scores, probs, 0.5);
    std::vector<double> inverted(4);
    for (int j = 0; j < 4; ++j) inverted[j] = 1.0 - scores[j];
    const double fail = robustness(inverted, probs, 0.5000000001);
    REQUIRE(pass + fail == Catch::Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("best selection breaks ties by cost then counts") {
  CandidateSet set;
  set.scenario_count = 1;
  set.candidates.push_back(candidate({5, 0}, 9.0, {0.5}));
  set.candidates.push_back(candidate({0, 4}, 7.0, {0.5}));
  set.candidates.push_back(candidate({2, 2}, 7.0, {0.5}));
  const std::vector<double> scores{0.4, 0.4, 0.4};
  REQUIRE(select_best(set, scores) == 1);

  const std::vector<double> scores2{0.5, 0.4, 0.4};
  REQUIRE(select_best(set, scores2) == 0);
}

TEST_CASE("adaptation charges only missing units") {
  AssetCatalog catalog;
  catalog.assets = {{1.0, {1}}, {2.0, {1}}};
  catalog.demand_type_count = 1;
  CandidateSet set;
  set.scenario_count = 2;
  set.candidates.push_back(candidate({4, 0}, 4.0, {1, 1}));
  set.candidates.push_back(candidate({1, 2}, 5.0, {1, 1}));
  const std::vector<int> best{1, 0};
  const std::vector<double> probs{0.5, 0.5};

  // (4,0) -> (1,2): buy 2 of asset 1 at cost 2. (4,0) -> itself: free.
  REQUIRE(adaptation_cost({4, 0}, best, set, catalog, probs) == 2.0);
  // (1,2) -> itself: free. (1,2) -> (4,0): buy 3 of asset 0.
  REQUIRE(adaptation_cost({1, 2}, best, set, catalog, probs) == 1.5);
  // From empty: 1+4=5 for scenario 0's best, 4 for scenario 1's.
  REQUIRE(adaptation_cost({0, 0}, best, set, catalog, probs) == 4.5);
}

TEST_CASE("hand-computed fixture reproduces every metric") {
  const Fixture fx;
  const PositioningReport report = compute_positioning(fx.set, fx.cfg);

  const std::vector<std::vector<double>> expected_f{
      {0.3, 0.43, 0.7}, {1.0, 0.85, 0.7}, {1.0, 0.675, 0.0}, {1.0, 0.15, 0.7}};
  for (int j = 0; j < 4; ++j) {
    for (int i = 0; i < 3; ++i) {
      REQUIRE(report.scores[j][i] == Catch::Approx(expected_f[j][i]).margin(1e-12));
    }
  }

  REQUIRE(report.best_index == std::vector<int>{2, 0, 0, 0});

  REQUIRE(report.metrics[0].robustness == Catch::Approx(0.75).margin(1e-12));
  REQUIRE(report.metrics[1].robustness == Catch::Approx(0.25).margin(1e-12));
  REQUIRE(report.metrics[2].robustness == Catch::Approx(0.0).margin(1e-12));

  REQUIRE(report.metrics[0].risk == Catch::Approx(0.5).margin(1e-12));
  REQUIRE(report.metrics[1].risk == Catch::Approx(0.25).margin(1e-12));
  REQUIRE(report.metrics[2].risk == Catch::Approx(0.5).margin(1e-12));

  REQUIRE(report.metrics[0].adapt_cost == Catch::Approx(1.5).margin(1e-12));
  REQUIRE(report.metrics[1].adapt_cost == Catch::Approx(2.75).margin(1e-12));
  REQUIRE(report.metrics[2].adapt_cost == Catch::Approx(3.0).margin(1e-12));

  REQUIRE(report.nondominated == std::vector<char>{1, 1, 0});

  REQUIRE(report.scaled[0].robustness == Catch::Approx(75.0).margin(1e-9));
  REQUIRE(report.scaled[1].risk == Catch::Approx(25.0).margin(1e-9));
  REQUIRE(report.scaled[0].adapt_cost == Catch::Approx(0.0).margin(1e-9));
  REQUIRE(report.scaled[1].adapt_cost == Catch::Approx(83.0 + 1.0 / 3.0).margin(1e-9));
  REQUIRE(report.scaled[2].adapt_cost == Catch::Approx(100.0).margin(1e-9));
}

TEST_CASE("single candidate is trivially robust and non-dominated") {
  RunConfig cfg;
  cfg.catalog.assets = {{1.0, {1}}};
  cfg.catalog.demand_type_count = 1;
  cfg.space.scenarios = {{{1}, {0}, 0.5}, {{2}, {0}, 0.5}};
  CandidateSet set;
  set.scenario_count = 2;
  set.candidates.push_back(candidate({3}, 3.0, {0.4, 0.9}));

  const PositioningReport report = compute_positioning(set, cfg);
  REQUIRE(report.scores[0][0] == 1.0);
  REQUIRE(report.scores[1][0] == 1.0);
  REQUIRE(report.metrics[0].robustness == 1.0);
  REQUIRE(report.metrics[0].adapt_cost == 0.0);
  REQUIRE(report.nondominated == std::vector<char>{1});
  REQUIRE(report.scaled[0].adapt_cost == 0.0);
}

TEST_CASE("three-way filter agrees with a quadratic reference scan") {
  RandomStream gen = derive_stream(77, {{StreamLabel::prob_perturb, 1}});
  std::vector<MetricTriple> metrics;
  metrics.reserve(1000);
  for (int i = 0; i < 1000; ++i) {
    MetricTriple t;
    t.robustness = static_cast<double>(gen.next_index(5)) / 4.0;
    t.risk = static_cast<double>(gen.next_index(5)) / 4.0;
    t.adapt_cost = static_cast<double>(gen.next_index(50));
    metrics.push_back(t);
  }
  const std::vector<char> flags = pareto_filter_3d(metrics);
  for (std::size_t i = 0; i < metrics.size(); ++i) {
    char expected = 1;
    for (std::size_t j = 0; j < metrics.size(); ++j) {
      if (i != j && dominates_ref(metrics[j], metrics[i])) {
        expected = 0;
        break;
      }
    }
    REQUIRE(flags[i] == expected);
  }
}

TEST_CASE("equal triples are mutually non-dominated") {
  const MetricTriple t{0.5, 0.25, 2.0};
  const std::vector<MetricTriple> metrics{t, t, t};
  REQUIRE(pareto_filter_3d(metrics) == std::vector<char>{1, 1, 1});
}

TEST_CASE("display scaling maps metrics onto a hundred-point scale") {
  std::vector<MetricTriple> metrics{{0.75, 0.5, 1.5}, {0.25, 0.25, 2.75}, {0.0, 0.5, 3.0}};
  const std::vector<MetricTriple> scaled = display_scale(metrics);
  REQUIRE(scaled[0].robustness == 75.0);
  REQUIRE(scaled[2].risk == 50.0);
  REQUIRE(scaled[0].adapt_cost == 0.0);
  REQUIRE(scaled[2].adapt_cost == 100.0);
  REQUIRE(scaled[1].adapt_cost == Catch::Approx(250.0 / 3.0).margin(1e-9));
}

TEST_CASE("pooling deduplicates portfolios by counts") {
  AssetCatalog catalog;
  catalog.assets = {{1.0, {1}}, {2.0, {1}}};
  catalog.demand_type_count = 1;
  Population front0 = {{portfolio_from_counts({1, 0}, 5), {1, 0.5}},
                       {portfolio_from_counts({0, 2}, 5), {4, 0.9}}};
  Population front1 = {{portfolio_from_counts({0, 2}, 5), {4, 0.8}},
                       {portfolio_from_counts({3, 0}, 5), {3, 0.7}}};
  const CandidateSet set = pool_candidates({front0, front1}, catalog);
  REQUIRE(set.scenario_count == 2);
  REQUIRE(set.size() == 3);
  REQUIRE(set.candidates[0].portfolio.counts == std::vector<int>{1, 0});
  REQUIRE(set.candidates[1].portfolio.counts == std::vector<int>{0, 2});
  REQUIRE(set.candidates[2].portfolio.counts == std::vector<int>{3, 0});
  REQUIRE(set.candidates[1].cost == 4.0);
  REQUIRE(set.candidates[2].cost == 3.0);
  for (const Candidate& c : set.candidates) REQUIRE(c.success.empty());
}
