#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "plan/model.hpp"
#include "plan/rng.hpp"

namespace plan {

/// Demand matrix of one simulated future: time_points x demand_types entries,
/// already clamped at zero and scaled by the instance's beta.
struct FutureDemands {
  int time_points = 0;
  int demand_types = 0;
  std::vector<double> values;  // row-major, [t * demand_types + k]

  FutureDemands() = default;
  FutureDemands(int t, int m) : time_points(t), demand_types(m), values(t * m, 0.0) {}

  double operator()(int t, int k) const { return values[t * demand_types + k]; }
  double& operator()(int t, int k) { return values[t * demand_types + k]; }
};

/// Demands are Normal(mean_k, stddev_k) per (time point, demand type), drawn
/// independently in row-major order, clamped at 0, then scaled by beta.
inline FutureDemands sample_future(const Scenario& scenario, double beta,
                                   RandomStream& stream, const ScenarioSpace& space) {
  const int m = static_cast<int>(scenario.demand_mean.size());
  FutureDemands fd(space.time_points, m);
  for (int t = 0; t < space.time_points; ++t) {
    for (int k = 0; k < m; ++k) {
      const double raw = stream.next_normal(scenario.demand_mean[k], scenario.demand_stddev[k]);
      fd(t, k) = std::max(0.0, raw) * beta;
    }
  }
  return fd;
}

struct Commitment {
  int time_point;
  int demand_type;
  int asset;
  int units;
};

struct AssignmentTrace {
  int time_points = 0;
  int demand_types = 0;
  std::vector<Commitment> commitments;
  std::vector<double> residuals;  // [t * demand_types + k]

  [[nodiscard]] double residual(int t, int k) const { return residuals[t * demand_types + k]; }

  [[nodiscard]] bool all_satisfied() const {
    return std::all_of(residuals.begin(), residuals.end(),
                       [](double r) { return r == 0.0; });
  }
};

namespace detail {

// Greedy assignment kernel. Availability resets to the portfolio counts at
// every time point; demand types are processed in ascending k; each pass
// commits the cheapest-per-satisfied-unit asset type unit by unit until the
// demand is met or the type runs out. Ties on cost ratio are broken uniformly
// at random (a draw is consumed only when two or more types are tied).
// Returns true iff every residual is zero; with stop_early the scan ends at
// the first positive residual, which cannot change the verdict.
inline bool assign_kernel(const std::vector<int>& counts, const FutureDemands& demands,
                          const AssetCatalog& catalog, RandomStream& stream,
                          AssignmentTrace* trace, bool stop_early) {
  const int n = catalog.asset_count();
  const int m = catalog.demand_type_count;
  bool ok = true;

  std::vector<int> avail(n);
  std::vector<int> tied;
  tied.reserve(n);

  for (int t = 0; t < demands.time_points; ++t) {
    std::copy(counts.begin(), counts.end(), avail.begin());
    for (int k = 0; k < m; ++k) {
      double d = demands(t, k);
      while (d > 0.0) {
        tied.clear();
        double best_ratio = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
          if (avail[i] <= 0) continue;
          const double w = catalog.assets[i].capability[k];
          if (w <= 0.0) continue;
          const double ratio = catalog.assets[i].unit_cost / w;
          if (ratio < best_ratio) {
            best_ratio = ratio;
            tied.clear();
            tied.push_back(i);
          } else if (ratio == best_ratio) {
            tied.push_back(i);
          }
        }
        if (tied.empty()) break;  // no capable assets left
        const int chosen =
            tied.size() == 1 ? tied[0] : static_cast<int>(tied[stream.next_index(tied.size())]);
        const double w = catalog.assets[chosen].capability[k];
        int units = 0;
        while (d > 0.0 && avail[chosen] > 0) {
          --avail[chosen];
          ++units;
          d -= w;
        }
        if (trace != nullptr && units > 0) {
          trace->commitments.push_back({t, k, chosen, units});
        }
      }
      const double residual = std::max(d, 0.0);
      if (trace != nullptr) trace->residuals[t * m + k] = residual;
      if (residual > 0.0) {
        ok = false;
        if (stop_early) return false;
      }
    }
  }
  return ok;
}

}  // namespace detail

inline AssignmentTrace assign_assets(const Portfolio& portfolio, const FutureDemands& demands,
                                     const AssetCatalog& catalog, RandomStream& stream) {
  AssignmentTrace trace;
  trace.time_points = demands.time_points;
  trace.demand_types = demands.demand_types;
  trace.residuals.assign(demands.time_points * demands.demand_types, 0.0);
  detail::assign_kernel(portfolio.counts, demands, catalog, stream, &trace, false);
  return trace;
}

/// True iff the portfolio covers every demand of the future.
inline bool future_success(const Portfolio& portfolio, const FutureDemands& demands,
                           const AssetCatalog& catalog, RandomStream& stream) {
  return detail::assign_kernel(portfolio.counts, demands, catalog, stream, nullptr, true);
}

/// Tabular trace dump: one line per commitment plus one per unmet demand.
inline std::string format_trace(const AssignmentTrace& trace) {
  std::ostringstream out;
  out << "time_point\tdemand_type\tasset\tunits\tresidual\n";
  for (const Commitment& c : trace.commitments) {
    out << c.time_point << '\t' << c.demand_type << '\t' << c.asset << '\t' << c.units
        << '\t' << trace.residual(c.time_point, c.demand_type) << '\n';
  }
  for (int t = 0; t < trace.time_points; ++t) {
    for (int k = 0; k < trace.demand_types; ++k) {
      if (trace.residual(t, k) > 0.0) {
        bool committed = false;
        for (const Commitment& c : trace.commitments) {
          committed |= c.time_point == t && c.demand_type == k;
        }
        if (!committed) {
          out << t << '\t' << k << "\t-\t0\t" << trace.residual(t, k) << '\n';
        }
      }
    }
  }
  return out.str();
}

/// All r simulated futures of one scenario, fixed once per (seed, scenario)
/// and shared by every portfolio evaluated in the run (common random numbers).
/// assign_keys seed the per-future tie-break streams so assignment draws are
/// also identical across portfolios and evaluation orders.
struct ScenarioFutures {
  int scenario_id = 0;
  std::vector<double> betas;           // one per problem instance
  std::vector<FutureDemands> futures;  // r = instances * futures_per_instance
  std::vector<StreamKey> assign_keys;  // parallel to futures
};

inline ScenarioFutures build_futures(const Scenario& scenario, int scenario_id,
                                     const ScenarioSpace& space, std::uint64_t master_seed) {
  ScenarioFutures sf;
  sf.scenario_id = scenario_id;
  const StreamKey scenario_key =
      StreamKey(master_seed).child(StreamLabel::scenario, static_cast<std::uint64_t>(scenario_id));
  for (int p = 0; p < space.instances_per_scenario; ++p) {
    const StreamKey instance_key = scenario_key.child(StreamLabel::instance, p);
    RandomStream beta_stream(instance_key.child(StreamLabel::beta, 0));
    const double beta = beta_stream.next_uniform(space.beta_min, space.beta_max);
    sf.betas.push_back(beta);
    for (int h = 0; h < space.futures_per_instance; ++h) {
      const StreamKey future_key = instance_key.child(StreamLabel::future, h);
      RandomStream demand_stream(future_key);
      sf.futures.push_back(sample_future(scenario, beta, demand_stream, space));
      sf.assign_keys.push_back(future_key.child(StreamLabel::assign, 0));
    }
  }
  return sf;
}

/// Fraction of prebuilt futures the portfolio succeeds in.
inline double success_rate(const Portfolio& portfolio, const ScenarioFutures& futures,
                           const AssetCatalog& catalog) {
  int successes = 0;
  for (std::size_t idx = 0; idx < futures.futures.size(); ++idx) {
    RandomStream stream(futures.assign_keys[idx]);
    successes += future_success(portfolio, futures.futures[idx], catalog, stream) ? 1 : 0;
  }
  return static_cast<double>(successes) / static_cast<double>(futures.futures.size());
}

inline double scenario_success_rate(const Portfolio& portfolio, const Scenario& scenario,
                                    int scenario_id, const ScenarioSpace& space,
                                    const AssetCatalog& catalog, std::uint64_t master_seed) {
  const ScenarioFutures futures = build_futures(scenario, scenario_id, space, master_seed);
  return success_rate(portfolio, futures, catalog);
}

}  // namespace plan
