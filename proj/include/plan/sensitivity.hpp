#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "plan/model.hpp"
#include "plan/parallel.hpp"
#include "plan/positioning.hpp"
#include "plan/rng.hpp"

namespace plan {

struct Band {
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
};

struct MetricBands {
  Band robustness;
  Band risk;
  Band adapt_cost;
};

enum class PerturbationKind { probability, weight };

inline const char* to_string(PerturbationKind kind) {
  return kind == PerturbationKind::probability ? "probability" : "weight";
}

namespace detail {

// Quantile with linear interpolation between closest ranks.
inline double quantile_sorted(std::span<const double> sorted, double p) {
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

inline Band band_of(std::vector<double>& samples) {
  std::sort(samples.begin(), samples.end());
  return {quantile_sorted(samples, 0.25), quantile_sorted(samples, 0.5),
          quantile_sorted(samples, 0.75)};
}

// Unweighted per-scenario move cost of every candidate toward the given best
// indices; [candidate * Q + scenario].
inline std::vector<double> move_costs(const CandidateSet& set,
                                      std::span<const int> best_index,
                                      const AssetCatalog& catalog) {
  const int q = static_cast<int>(best_index.size());
  std::vector<double> costs(static_cast<std::size_t>(set.size()) * q, 0.0);
  for (int i = 0; i < set.size(); ++i) {
    const std::vector<int>& counts = set.candidates[i].portfolio.counts;
    for (int j = 0; j < q; ++j) {
      const std::vector<int>& target = set.candidates[best_index[j]].portfolio.counts;
      double cost = 0.0;
      for (int a = 0; a < catalog.asset_count(); ++a) {
        const int delta = target[a] - counts[a];
        if (delta > 0) cost += catalog.assets[a].unit_cost * delta;
      }
      costs[static_cast<std::size_t>(i) * q + j] = cost;
    }
  }
  return costs;
}

}  // namespace detail

/// Adds Normal(0, stddev) noise to every entry, clamps negatives to zero and
/// renormalizes to sum 1. An all-zero draw is resampled; after 1000 failed
/// attempts the perturbation is reported as degenerate.
inline std::vector<double> perturb_probabilities(std::span<const double> nominal,
                                                 RandomStream& stream, double stddev) {
  std::vector<double> out(nominal.size());
  for (int attempt = 0; attempt < 1000; ++attempt) {
    double sum = 0.0;
    for (std::size_t j = 0; j < nominal.size(); ++j) {
      out[j] = std::max(0.0, nominal[j] + stream.next_normal(0.0, stddev));
      sum += out[j];
    }
    if (sum > 0.0) {
      for (double& p : out) p /= sum;
      return out;
    }
  }
  throw std::runtime_error("degenerate perturbation");
}

/// Perturbed cost weight, clamped to [0,1]; the success weight is its
/// complement.
inline double perturb_weight(double nominal_w_cost, RandomStream& stream, double stddev) {
  return std::clamp(nominal_w_cost + stream.next_normal(0.0, stddev), 0.0, 1.0);
}

/// Quartile bands of the three metrics under scenario-probability bias.
/// Aggregated scores and per-scenario best portfolios do not depend on P and
/// are reused from the nominal report; nothing is re-simulated.
inline std::vector<MetricBands> probability_sensitivity(const CandidateSet& set,
                                                        const PositioningReport& report,
                                                        const RunConfig& cfg, int jobs = 1) {
  const int q = set.scenario_count;
  const int n = set.size();
  const int samples = cfg.sensitivity.samples;

  std::vector<double> nominal_p(q);
  for (int j = 0; j < q; ++j) nominal_p[j] = cfg.space.scenarios[j].probability;

  // P-independent indicators and move costs per (candidate, scenario).
  std::vector<char> passes(static_cast<std::size_t>(n) * q);
  std::vector<char> fails(static_cast<std::size_t>(n) * q);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < q; ++j) {
      passes[static_cast<std::size_t>(i) * q + j] =
          report.scores[j][i] >= cfg.positioning.aspiration ? 1 : 0;
      fails[static_cast<std::size_t>(i) * q + j] =
          set.candidates[i].success[j] < cfg.positioning.failure_threshold ? 1 : 0;
    }
  }
  const std::vector<double> moves = detail::move_costs(set, report.best_index, cfg.catalog);

  // values[(i * 3 + metric) * samples + s]
  std::vector<double> values(static_cast<std::size_t>(n) * 3 * samples);
  parallel_for(jobs, samples, [&](std::size_t s) {
    RandomStream stream = derive_stream(cfg.master_seed, {{StreamLabel::prob_perturb, s}});
    const std::vector<double> p = perturb_probabilities(nominal_p, stream, cfg.sensitivity.stddev);
    for (int i = 0; i < n; ++i) {
      double rob = 0.0, rsk = 0.0, adapt = 0.0;
      for (int j = 0; j < q; ++j) {
        const std::size_t ij = static_cast<std::size_t>(i) * q + j;
        if (passes[ij]) rob += p[j];
        if (fails[ij]) rsk += p[j];
        adapt += moves[ij] * p[j];
      }
      const std::size_t base = (static_cast<std::size_t>(i) * 3) * samples;
      values[base + s] = rob;
      values[base + samples + s] = rsk;
      values[base + 2 * static_cast<std::size_t>(samples) + s] = adapt;
    }
  });

  std::vector<MetricBands> bands(n);
  std::vector<double> scratch(samples);
  for (int i = 0; i < n; ++i) {
    for (int metric = 0; metric < 3; ++metric) {
      const std::size_t base = (static_cast<std::size_t>(i) * 3 + metric) * samples;
      std::copy(values.begin() + base, values.begin() + base + samples, scratch.begin());
      Band b = detail::band_of(scratch);
      if (metric == 0) bands[i].robustness = b;
      if (metric == 1) bands[i].risk = b;
      if (metric == 2) bands[i].adapt_cost = b;
    }
  }
  return bands;
}

/// Quartile bands under objective-weight bias. Each sample re-aggregates the
/// scores from the weight-independent normalized components, re-selects the
/// per-scenario bests and recomputes robustness and adaptation cost; risk
/// does not depend on the weights, so its bands always have zero width.
inline std::vector<MetricBands> weight_sensitivity(const CandidateSet& set,
                                                   const PositioningReport& report,
                                                   const RunConfig& cfg, int jobs = 1) {
  const int q = set.scenario_count;
  const int n = set.size();
  const int samples = cfg.sensitivity.samples;

  std::vector<double> probabilities(q);
  for (int j = 0; j < q; ++j) probabilities[j] = cfg.space.scenarios[j].probability;

  std::vector<detail::NormalizedComponents> norm;
  norm.reserve(q);
  for (int j = 0; j < q; ++j) norm.push_back(detail::normalized_components(set, j));

  std::vector<char> fails(static_cast<std::size_t>(n) * q);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < q; ++j) {
      fails[static_cast<std::size_t>(i) * q + j] =
          set.candidates[i].success[j] < cfg.positioning.failure_threshold ? 1 : 0;
    }
  }

  std::vector<double> values(static_cast<std::size_t>(n) * 3 * samples);
  parallel_for(jobs, samples, [&](std::size_t s) {
    RandomStream stream = derive_stream(cfg.master_seed, {{StreamLabel::weight_perturb, s}});
    const double w_cost = perturb_weight(cfg.positioning.w_cost, stream, cfg.sensitivity.stddev);
    const double w_success = 1.0 - w_cost;

    std::vector<std::vector<double>> scores(q, std::vector<double>(n));
    std::vector<int> best(q);
    for (int j = 0; j < q; ++j) {
      for (int i = 0; i < n; ++i) {
        scores[j][i] = w_cost * norm[j].cost[i] + w_success * norm[j].success[i];
      }
      best[j] = select_best(set, scores[j]);
    }
    const std::vector<double> moves = detail::move_costs(set, best, cfg.catalog);

    for (int i = 0; i < n; ++i) {
      double rob = 0.0, rsk = 0.0, adapt = 0.0;
      for (int j = 0; j < q; ++j) {
        if (scores[j][i] >= cfg.positioning.aspiration) rob += probabilities[j];
        if (fails[static_cast<std::size_t>(i) * q + j]) rsk += probabilities[j];
        adapt += moves[static_cast<std::size_t>(i) * q + j] * probabilities[j];
      }
      const std::size_t base = (static_cast<std::size_t>(i) * 3) * samples;
      values[base + s] = rob;
      values[base + samples + s] = rsk;
      values[base + 2 * static_cast<std::size_t>(samples) + s] = adapt;
    }
  });

  std::vector<MetricBands> bands(n);
  std::vector<double> scratch(samples);
  for (int i = 0; i < n; ++i) {
    for (int metric = 0; metric < 3; ++metric) {
      const std::size_t base = (static_cast<std::size_t>(i) * 3 + metric) * samples;
      std::copy(values.begin() + base, values.begin() + base + samples, scratch.begin());
      Band b = detail::band_of(scratch);
      if (metric == 0) bands[i].robustness = b;
      if (metric == 1) bands[i].risk = b;
      if (metric == 2) bands[i].adapt_cost = b;
    }
  }
  return bands;
}

}  // namespace plan
