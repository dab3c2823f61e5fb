#pragma once

#include <algorithm>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "plan/model.hpp"
#include "plan/moea.hpp"

namespace plan {

/// One pooled candidate: a deduplicated portfolio with its static cost and
/// its success rate in every scenario.
struct Candidate {
  Portfolio portfolio;
  double cost = 0.0;
  std::vector<double> success;  // one entry per scenario
};

/// Union of the per-scenario fronts, deduplicated by decoded counts, with all
/// cross-scenario evaluations attached.
struct CandidateSet {
  std::vector<Candidate> candidates;
  int scenario_count = 0;

  [[nodiscard]] int size() const { return static_cast<int>(candidates.size()); }
};

struct MetricTriple {
  double robustness = 0.0;  // maximize
  double risk = 0.0;        // minimize
  double adapt_cost = 0.0;  // minimize

  bool operator==(const MetricTriple&) const = default;
};

namespace detail {

// Min-max components used by the aggregated score; both map the best value
// to 1 and are weight-independent. A degenerate objective (max == min)
// normalizes to 1 for every candidate.
struct NormalizedComponents {
  std::vector<double> cost;     // lowest cost -> 1
  std::vector<double> success;  // highest success -> 1
};

inline NormalizedComponents normalized_components(const CandidateSet& set, int scenario) {
  if (set.candidates.empty()) {
    throw std::invalid_argument("empty candidate set");
  }
  double cost_min = set.candidates[0].cost, cost_max = set.candidates[0].cost;
  double succ_min = set.candidates[0].success[scenario];
  double succ_max = succ_min;
  for (const Candidate& c : set.candidates) {
    cost_min = std::min(cost_min, c.cost);
    cost_max = std::max(cost_max, c.cost);
    succ_min = std::min(succ_min, c.success[scenario]);
    succ_max = std::max(succ_max, c.success[scenario]);
  }
  NormalizedComponents out;
  out.cost.reserve(set.candidates.size());
  out.success.reserve(set.candidates.size());
  for (const Candidate& c : set.candidates) {
    out.cost.push_back(cost_max == cost_min ? 1.0 : (cost_max - c.cost) / (cost_max - cost_min));
    out.success.push_back(succ_max == succ_min
                              ? 1.0
                              : (c.success[scenario] - succ_min) / (succ_max - succ_min));
  }
  return out;
}

}  // namespace detail

/// Aggregated score of every candidate in one scenario: the weighted sum of
/// the min-max normalized objectives over the pooled candidate set.
inline std::vector<double> aggregate_scores(const CandidateSet& set, int scenario,
                                            const PositioningSettings& settings) {
  const detail::NormalizedComponents norm = detail::normalized_components(set, scenario);
  std::vector<double> scores(set.candidates.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    scores[i] = settings.w_cost * norm.cost[i] + settings.w_success * norm.success[i];
  }
  return scores;
}

/// Probability-weighted fraction of scenarios whose aggregated score meets
/// the aspiration level (>=, boundary counts as success).
inline double robustness(std::span<const double> scores_per_scenario,
                         std::span<const double> probabilities, double aspiration) {
  double total = 0.0;
  for (std::size_t j = 0; j < scores_per_scenario.size(); ++j) {
    if (scores_per_scenario[j] >= aspiration) total += probabilities[j];
  }
  return total;
}

/// Probability-weighted fraction of scenarios where the success rate falls
/// strictly below the failure threshold.
inline double risk(std::span<const double> success_per_scenario,
                   std::span<const double> probabilities, double threshold) {
  double total = 0.0;
  for (std::size_t j = 0; j < success_per_scenario.size(); ++j) {
    if (success_per_scenario[j] < threshold) total += probabilities[j];
  }
  return total;
}

/// Index of the scenario's best performer: argmax of the aggregated score,
/// ties broken by lower cost, then by lexicographically smaller counts.
inline int select_best(const CandidateSet& set, std::span<const double> scores) {
  if (set.candidates.empty()) {
    throw std::invalid_argument("empty candidate set");
  }
  int best = 0;
  for (int i = 1; i < set.size(); ++i) {
    if (scores[i] > scores[best]) {
      best = i;
    } else if (scores[i] == scores[best]) {
      const Candidate& a = set.candidates[i];
      const Candidate& b = set.candidates[best];
      if (a.cost < b.cost || (a.cost == b.cost && a.portfolio.counts < b.portfolio.counts)) {
        best = i;
      }
    }
  }
  return best;
}

/// Expected acquisition cost of morphing `counts` into each scenario's best
/// portfolio: only positive count deltas are charged, shedding assets is
/// free.
inline double adaptation_cost(const std::vector<int>& counts,
                              std::span<const int> best_per_scenario, const CandidateSet& set,
                              const AssetCatalog& catalog,
                              std::span<const double> probabilities) {
  double total = 0.0;
  for (std::size_t j = 0; j < best_per_scenario.size(); ++j) {
    const std::vector<int>& target = set.candidates[best_per_scenario[j]].portfolio.counts;
    double move_cost = 0.0;
    for (int i = 0; i < catalog.asset_count(); ++i) {
      const int delta = target[i] - counts[i];
      if (delta > 0) move_cost += catalog.assets[i].unit_cost * delta;
    }
    total += move_cost * probabilities[j];
  }
  return total;
}

/// Marks the rank-1 subset under (robustness max, risk min, adapt_cost min).
/// Equal triples never dominate each other, so duplicates are all retained.
inline std::vector<char> pareto_filter_3d(std::span<const MetricTriple> metrics) {
  auto dominates_3d = [](const MetricTriple& a, const MetricTriple& b) {
    if (a.robustness < b.robustness || a.risk > b.risk || a.adapt_cost > b.adapt_cost) {
      return false;
    }
    return a.robustness > b.robustness || a.risk < b.risk || a.adapt_cost < b.adapt_cost;
  };
  std::vector<char> nondominated(metrics.size(), 1);
  for (std::size_t i = 0; i < metrics.size(); ++i) {
    for (std::size_t j = 0; j < metrics.size(); ++j) {
      if (i != j && dominates_3d(metrics[j], metrics[i])) {
        nondominated[i] = 0;
        break;
      }
    }
  }
  return nondominated;
}

/// [0,100] display variants: robustness and risk scale by 100; adaptation
/// cost is min-max scaled over the set (all-equal degenerates to 0).
inline std::vector<MetricTriple> display_scale(std::span<const MetricTriple> metrics) {
  double adapt_min = 0.0, adapt_max = 0.0;
  if (!metrics.empty()) {
    adapt_min = adapt_max = metrics[0].adapt_cost;
    for (const MetricTriple& t : metrics) {
      adapt_min = std::min(adapt_min, t.adapt_cost);
      adapt_max = std::max(adapt_max, t.adapt_cost);
    }
  }
  std::vector<MetricTriple> scaled;
  scaled.reserve(metrics.size());
  for (const MetricTriple& t : metrics) {
    MetricTriple s;
    s.robustness = t.robustness * 100.0;
    s.risk = t.risk * 100.0;
    s.adapt_cost = adapt_max == adapt_min
                       ? 0.0
                       : (t.adapt_cost - adapt_min) / (adapt_max - adapt_min) * 100.0;
    scaled.push_back(s);
  }
  return scaled;
}

/// Full positioning evaluation of a pooled candidate set.
struct PositioningReport {
  std::vector<std::vector<double>> scores;  // [scenario][candidate] aggregated score
  std::vector<int> best_index;              // [scenario] index into candidates
  std::vector<MetricTriple> metrics;        // [candidate]
  std::vector<MetricTriple> scaled;         // [candidate], [0,100] display values
  std::vector<char> nondominated;           // [candidate]
};

inline PositioningReport compute_positioning(const CandidateSet& set, const RunConfig& cfg) {
  const int q = set.scenario_count;
  std::vector<double> probabilities(q);
  for (int j = 0; j < q; ++j) probabilities[j] = cfg.space.scenarios[j].probability;

  PositioningReport report;
  report.scores.reserve(q);
  report.best_index.reserve(q);
  for (int j = 0; j < q; ++j) {
    report.scores.push_back(aggregate_scores(set, j, cfg.positioning));
    report.best_index.push_back(select_best(set, report.scores.back()));
  }

  report.metrics.reserve(set.size());
  std::vector<double> per_scenario(q);
  for (int i = 0; i < set.size(); ++i) {
    const Candidate& c = set.candidates[i];
    MetricTriple t;
    for (int j = 0; j < q; ++j) per_scenario[j] = report.scores[j][i];
    t.robustness = robustness(per_scenario, probabilities, cfg.positioning.aspiration);
    t.risk = risk(c.success, probabilities, cfg.positioning.failure_threshold);
    t.adapt_cost =
        adaptation_cost(c.portfolio.counts, report.best_index, set, cfg.catalog, probabilities);
    report.metrics.push_back(t);
  }
  report.scaled = display_scale(report.metrics);
  report.nondominated = pareto_filter_3d(report.metrics);
  return report;
}

/// Pools per-scenario fronts into a candidate set deduplicated by decoded
/// counts (first occurrence wins); success columns are left empty for the
/// cross-evaluation step to fill.
inline CandidateSet pool_candidates(const std::vector<Population>& fronts,
                                    const AssetCatalog& catalog) {
  CandidateSet set;
  set.scenario_count = static_cast<int>(fronts.size());
  std::vector<std::vector<int>> seen;
  for (const Population& front : fronts) {
    for (const Evaluated& member : front) {
      if (std::find(seen.begin(), seen.end(), member.portfolio.counts) != seen.end()) {
        continue;
      }
      seen.push_back(member.portfolio.counts);
      Candidate c;
      c.portfolio = member.portfolio;
      c.cost = portfolio_cost(member.portfolio, catalog);
      set.candidates.push_back(std::move(c));
    }
  }
  return set;
}

}  // namespace plan
