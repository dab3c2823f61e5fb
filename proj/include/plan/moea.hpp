#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "plan/model.hpp"
#include "plan/rng.hpp"
#include "plan/simulate.hpp"

namespace plan {

/// The two per-scenario objectives: total investment cost (minimized) and the
/// rate of success over the scenario's simulated futures (maximized).
struct ObjectivePair {
  double cost = 0.0;
  double success_rate = 0.0;

  bool operator==(const ObjectivePair&) const = default;
};

/// Pareto dominance with cost minimized and success rate maximized; equal
/// pairs never dominate.
inline bool dominates(const ObjectivePair& a, const ObjectivePair& b) {
  if (a.cost > b.cost || a.success_rate < b.success_rate) return false;
  return a.cost < b.cost || a.success_rate > b.success_rate;
}

struct Evaluated {
  Portfolio portfolio;
  ObjectivePair objectives;
};

using Population = std::vector<Evaluated>;

inline double portfolio_cost(const Portfolio& portfolio, const AssetCatalog& catalog) {
  double cost = 0.0;
  for (int i = 0; i < catalog.asset_count(); ++i) {
    cost += catalog.assets[i].unit_cost * portfolio.counts[i];
  }
  return cost;
}

inline ObjectivePair evaluate(const Portfolio& portfolio, const ScenarioFutures& futures,
                              const AssetCatalog& catalog) {
  return {portfolio_cost(portfolio, catalog), success_rate(portfolio, futures, catalog)};
}

/// Uniform crossover gene by gene, then Gaussian mutation per gene with the
/// configured probability and stddev in genotype space, clamped to [0,1].
/// Counts are re-decoded from the child genotype.
inline Portfolio make_offspring(const Portfolio& p1, const Portfolio& p2,
                                const EaSettings& ea, int x_max, RandomStream& stream) {
  const int n = static_cast<int>(p1.genotype.size());
  const double mutation_prob = ea.mutation_probability(n);
  std::vector<double> genotype(n);
  for (int g = 0; g < n; ++g) {
    genotype[g] = stream.next_uniform() < 0.5 ? p1.genotype[g] : p2.genotype[g];
  }
  for (int g = 0; g < n; ++g) {
    if (stream.next_uniform() < mutation_prob) {
      genotype[g] = std::clamp(genotype[g] + stream.next_normal(0.0, ea.mutation_stddev), 0.0, 1.0);
    }
  }
  return make_portfolio(std::move(genotype), x_max);
}

namespace detail {

// Exact "dominated by some other member" flags for an arbitrary population.
inline std::vector<char> dominated_flags(const Population& pop) {
  std::vector<char> flags(pop.size(), 0);
  for (std::size_t a = 0; a < pop.size(); ++a) {
    for (std::size_t b = 0; b < pop.size(); ++b) {
      if (a != b && dominates(pop[b].objectives, pop[a].objectives)) {
        flags[a] = 1;
        break;
      }
    }
  }
  return flags;
}

}  // namespace detail

/// Steady-state replacement step. If any member dominates the child it is
/// discarded. Otherwise the child replaces exactly one dominated member
/// (preferring one the child itself dominates, remaining ties broken
/// uniformly at random), or is appended when no dominated member exists.
/// Returns true iff the child entered the population.
///
/// `flags` optionally carries externally maintained dominated-by-other-member
/// markers; it is updated in place. Flags never need clearing on replacement:
/// every removed member is dominated, and dominance is transitive, so
/// whatever it dominated stays dominated by a surviving member.
inline bool steady_state_update(Population& pop, Evaluated child, RandomStream& stream,
                                std::vector<char>* flags = nullptr) {
  std::vector<char> local;
  if (flags == nullptr) {
    local = detail::dominated_flags(pop);
    flags = &local;
  }

  std::vector<std::size_t> child_dominated;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    if (dominates(pop[i].objectives, child.objectives)) return false;
    if (dominates(child.objectives, pop[i].objectives)) child_dominated.push_back(i);
  }

  std::size_t victim;
  if (!child_dominated.empty()) {
    victim = child_dominated.size() == 1
                 ? child_dominated[0]
                 : child_dominated[stream.next_index(child_dominated.size())];
  } else {
    std::vector<std::size_t> other_dominated;
    for (std::size_t i = 0; i < pop.size(); ++i) {
      if ((*flags)[i]) other_dominated.push_back(i);
    }
    if (other_dominated.empty()) {
      pop.push_back(std::move(child));
      flags->push_back(0);
      return true;
    }
    victim = other_dominated.size() == 1
                 ? other_dominated[0]
                 : other_dominated[stream.next_index(other_dominated.size())];
  }

  pop[victim] = std::move(child);
  (*flags)[victim] = 0;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    if (i != victim && dominates(pop[victim].objectives, pop[i].objectives)) (*flags)[i] = 1;
  }
  return true;
}

/// Rank-1 subset: members no other member dominates.
inline Population nondominated_subset(const Population& pop) {
  const std::vector<char> flags = detail::dominated_flags(pop);
  Population front;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    if (!flags[i]) front.push_back(pop[i]);
  }
  return front;
}

/// Called every 100 evaluations with (evaluations so far, current rank-1 size).
using ProgressFn = std::function<void(int, int)>;

/// Full steady-state run against prebuilt scenario futures; returns the final
/// population (dominated initializers may survive if never replaced). The
/// evaluation budget is exact: initial members count against it.
inline Population run_ea(const ScenarioFutures& futures, const RunConfig& cfg,
                         const ProgressFn& progress = {}) {
  const int n = cfg.catalog.asset_count();
  const StreamKey scenario_key = StreamKey(cfg.master_seed)
                                     .child(StreamLabel::scenario,
                                            static_cast<std::uint64_t>(futures.scenario_id));
  const int budget = cfg.ea.evaluations;

  Population pop;
  std::vector<char> flags;
  int evals = 0;

  const int initial = std::min(cfg.ea.population, budget);
  for (int i = 0; i < initial; ++i) {
    RandomStream stream(scenario_key.child(StreamLabel::ea_init, i));
    std::vector<double> genotype(n);
    for (double& g : genotype) g = stream.next_uniform();
    Portfolio p = make_portfolio(std::move(genotype), cfg.x_max);
    ObjectivePair obj = evaluate(p, futures, cfg.catalog);
    pop.push_back({std::move(p), obj});
    ++evals;
  }
  flags = detail::dominated_flags(pop);

  auto report = [&] {
    if (progress && evals % 100 == 0) {
      const int front_size =
          static_cast<int>(std::count(flags.begin(), flags.end(), 0));
      progress(evals, front_size);
    }
  };
  report();

  for (std::uint64_t t = 0; evals < budget; ++t) {
    RandomStream stream(scenario_key.child(StreamLabel::ea_offspring, t));
    const Evaluated& p1 = pop[stream.next_index(pop.size())];
    const Evaluated& p2 = pop[stream.next_index(pop.size())];
    Portfolio child = make_offspring(p1.portfolio, p2.portfolio, cfg.ea, cfg.x_max, stream);
    ObjectivePair obj = evaluate(child, futures, cfg.catalog);
    ++evals;
    steady_state_update(pop, {std::move(child), obj}, stream, &flags);
    report();
  }
  return pop;
}

/// Evolves one scenario and returns the non-dominated set of the final
/// population.
inline Population solve_scenario(const Scenario& scenario, int scenario_id,
                                 const RunConfig& cfg, const ProgressFn& progress = {}) {
  const ScenarioFutures futures =
      build_futures(scenario, scenario_id, cfg.space, cfg.master_seed);
  return nondominated_subset(run_ea(futures, cfg, progress));
}

}  // namespace plan
