#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "plan/csv.hpp"
#include "plan/moea.hpp"
#include "plan/model.hpp"
#include "plan/parallel.hpp"
#include "plan/positioning.hpp"
#include "plan/sensitivity.hpp"
#include "plan/simulate.hpp"
#include "plan/version.hpp"

namespace plan {

/// Optional sink for human-readable progress lines; artifacts never depend
/// on whether one is attached.
using LogFn = std::function<void(const std::string&)>;

inline std::string fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x00000100000001B3ull;
  }
  char hex[16];
  for (int i = 15; i >= 0; --i) {
    hex[i] = "0123456789abcdef"[h & 0xF];
    h >>= 4;
  }
  return "fnv1a64:" + std::string(hex, 16);
}

inline std::string front_filename(int scenario_id) {
  return "front_" + std::to_string(scenario_id) + ".csv";
}

inline std::string trace_filename(int scenario_id) {
  return "trace_" + std::to_string(scenario_id) + ".txt";
}

inline constexpr const char* kCrossevalFile = "crosseval.csv";
inline constexpr const char* kPositioningFile = "positioning.csv";
inline constexpr const char* kSensitivityFile = "sensitivity.csv";
inline constexpr const char* kManifestFile = "manifest.json";

namespace detail {

inline void append_count_columns(std::vector<std::string>& header, int n) {
  for (int i = 0; i < n; ++i) header.push_back("x_" + std::to_string(i));
}

inline std::vector<std::string> id_and_counts(long long id, const std::vector<int>& counts) {
  std::vector<std::string> cells;
  cells.reserve(counts.size() + 1);
  cells.push_back(std::to_string(id));
  for (int c : counts) cells.push_back(std::to_string(c));
  return cells;
}

inline std::vector<int> read_counts(const CsvTable& table, const std::vector<std::string>& row,
                                    int n, const std::string& where) {
  std::vector<int> counts(n);
  for (int i = 0; i < n; ++i) {
    const std::size_t col = table.column("x_" + std::to_string(i));
    const long long v = parse_int(row[col], where);
    if (v < 0) throw SchemaError("schema mismatch: " + where + ": negative asset count");
    counts[i] = static_cast<int>(v);
  }
  return counts;
}

inline std::filesystem::path ensure_out_dir(const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + out_dir.string() + "'");
  return out_dir;
}

// Canonical front order: cost ascending, success descending, counts
// lexicographic. Ids are assigned after sorting, so reruns agree byte for
// byte regardless of evaluation order.
inline void sort_front(Population& front) {
  std::sort(front.begin(), front.end(), [](const Evaluated& a, const Evaluated& b) {
    if (a.objectives.cost != b.objectives.cost) return a.objectives.cost < b.objectives.cost;
    if (a.objectives.success_rate != b.objectives.success_rate) {
      return a.objectives.success_rate > b.objectives.success_rate;
    }
    return a.portfolio.counts < b.portfolio.counts;
  });
}

inline void sort_candidates(CandidateSet& set) {
  std::sort(set.candidates.begin(), set.candidates.end(),
            [](const Candidate& a, const Candidate& b) {
              if (a.cost != b.cost) return a.cost < b.cost;
              return a.portfolio.counts < b.portfolio.counts;
            });
}

}  // namespace detail

/// Evolves every scenario and writes front_<j>.csv per scenario, rows in
/// canonical order. With trace enabled, also writes trace_<j>.txt holding the
/// assignment trace of the front's highest-success portfolio on every
/// simulated future of that scenario.
inline std::vector<std::string> solve_stage(const RunConfig& cfg,
                                            const std::filesystem::path& out_dir, int jobs = 1,
                                            bool trace = false, const LogFn& log = {}) {
  detail::ensure_out_dir(out_dir);
  const int q = cfg.space.scenario_count();
  const int n = cfg.catalog.asset_count();

  std::mutex log_mutex;
  auto emit = [&](const std::string& line) {
    if (!log) return;
    std::scoped_lock lock(log_mutex);
    log(line);
  };

  std::vector<Population> fronts(q);
  std::vector<ScenarioFutures> futures(q);
  parallel_for(jobs, static_cast<std::size_t>(q), [&](std::size_t j) {
    const int sid = static_cast<int>(j);
    futures[j] = build_futures(cfg.space.scenarios[j], sid, cfg.space, cfg.master_seed);
    ProgressFn progress;
    if (trace) {
      progress = [&, sid](int evals, int front_size) {
        emit("scenario " + std::to_string(sid) + ": " + std::to_string(evals) + "/" +
             std::to_string(cfg.ea.evaluations) + " evaluations, front size " +
             std::to_string(front_size));
      };
    }
    fronts[j] = nondominated_subset(run_ea(futures[j], cfg, progress));
    detail::sort_front(fronts[j]);
  });

  std::vector<std::string> files;
  for (int j = 0; j < q; ++j) {
    std::vector<std::string> header{"portfolio_id"};
    detail::append_count_columns(header, n);
    header.push_back("cost");
    header.push_back("succ_" + std::to_string(j));

    CsvWriter csv(header);
    for (std::size_t i = 0; i < fronts[j].size(); ++i) {
      const Evaluated& e = fronts[j][i];
      auto cells = detail::id_and_counts(static_cast<long long>(i), e.portfolio.counts);
      cells.push_back(format_double(e.objectives.cost));
      cells.push_back(format_double(e.objectives.success_rate));
      csv.add_row(std::move(cells));
    }
    const std::string name = front_filename(j);
    write_file((out_dir / name).string(), csv.to_string());
    files.push_back(name);
    emit("wrote " + name + " (" + std::to_string(fronts[j].size()) + " portfolios)");
  }

  if (trace) {
    for (int j = 0; j < q; ++j) {
      const Population& front = fronts[j];
      std::string body;
      if (!front.empty()) {
        std::size_t pick = 0;
        for (std::size_t i = 1; i < front.size(); ++i) {
          if (front[i].objectives.success_rate > front[pick].objectives.success_rate) pick = i;
        }
        const Portfolio& p = front[pick].portfolio;
        for (std::size_t idx = 0; idx < futures[j].futures.size(); ++idx) {
          RandomStream stream(futures[j].assign_keys[idx]);
          const AssignmentTrace t = assign_assets(p, futures[j].futures[idx], cfg.catalog, stream);
          body += "# future " + std::to_string(idx) + " portfolio " +
                  std::to_string(static_cast<long long>(pick)) + " satisfied " +
                  (t.all_satisfied() ? "1" : "0") + "\n";
          body += format_trace(t);
        }
      }
      const std::string name = trace_filename(j);
      write_file((out_dir / name).string(), body);
      files.push_back(name);
    }
  }
  return files;
}

/// Pools the per-scenario front files, deduplicates by counts, evaluates
/// every candidate on all scenarios under common random numbers and writes
/// crosseval.csv with canonical ids (cost ascending, counts lexicographic).
inline std::vector<std::string> crosseval_stage(const RunConfig& cfg,
                                                const std::filesystem::path& out_dir,
                                                int jobs = 1, const LogFn& log = {}) {
  detail::ensure_out_dir(out_dir);
  const int q = cfg.space.scenario_count();
  const int n = cfg.catalog.asset_count();

  std::vector<Population> fronts;
  fronts.reserve(q);
  for (int j = 0; j < q; ++j) {
    const std::string path = (out_dir / front_filename(j)).string();
    const CsvTable table = parse_csv(read_file(path), front_filename(j));
    static_cast<void>(table.column("portfolio_id"));
    static_cast<void>(table.column("cost"));
    static_cast<void>(table.column("succ_" + std::to_string(j)));
    Population front;
    for (const auto& row : table.rows) {
      const std::vector<int> counts = detail::read_counts(table, row, n, front_filename(j));
      front.push_back({portfolio_from_counts(counts, cfg.x_max), {}});
    }
    fronts.push_back(std::move(front));
  }

  CandidateSet set = pool_candidates(fronts, cfg.catalog);
  if (set.candidates.empty()) throw IoError("no candidates (all front files are empty)");
  detail::sort_candidates(set);

  std::vector<ScenarioFutures> futures;
  futures.reserve(q);
  for (int j = 0; j < q; ++j) {
    futures.push_back(build_futures(cfg.space.scenarios[j], j, cfg.space, cfg.master_seed));
  }

  for (Candidate& c : set.candidates) c.success.assign(q, 0.0);
  parallel_for(jobs, set.candidates.size(), [&](std::size_t i) {
    Candidate& c = set.candidates[i];
    for (int j = 0; j < q; ++j) {
      c.success[j] = success_rate(c.portfolio, futures[j], cfg.catalog);
    }
  });

  std::vector<std::string> header{"portfolio_id"};
  detail::append_count_columns(header, n);
  header.push_back("cost");
  for (int j = 0; j < q; ++j) header.push_back("succ_" + std::to_string(j));

  CsvWriter csv(header);
  for (std::size_t i = 0; i < set.candidates.size(); ++i) {
    const Candidate& c = set.candidates[i];
    auto cells = detail::id_and_counts(static_cast<long long>(i), c.portfolio.counts);
    cells.push_back(format_double(c.cost));
    for (int j = 0; j < q; ++j) cells.push_back(format_double(c.success[j]));
    csv.add_row(std::move(cells));
  }
  write_file((out_dir / kCrossevalFile).string(), csv.to_string());
  if (log) {
    log("wrote " + std::string(kCrossevalFile) + " (" + std::to_string(set.size()) +
        " candidates)");
  }
  return {kCrossevalFile};
}

/// Cross-evaluation table reloaded from disk, with the file's portfolio ids.
struct LoadedCandidates {
  CandidateSet set;
  std::vector<long long> ids;
};

inline LoadedCandidates read_crosseval(const std::filesystem::path& out_dir,
                                       const RunConfig& cfg) {
  const int q = cfg.space.scenario_count();
  const int n = cfg.catalog.asset_count();
  const std::string path = (out_dir / kCrossevalFile).string();
  const CsvTable table = parse_csv(read_file(path), kCrossevalFile);

  const std::size_t id_col = table.column("portfolio_id");
  const std::size_t cost_col = table.column("cost");
  std::vector<std::size_t> succ_cols(q);
  for (int j = 0; j < q; ++j) succ_cols[j] = table.column("succ_" + std::to_string(j));

  LoadedCandidates loaded;
  loaded.set.scenario_count = q;
  for (const auto& row : table.rows) {
    loaded.ids.push_back(parse_int(row[id_col], kCrossevalFile));
    Candidate c;
    c.portfolio = portfolio_from_counts(detail::read_counts(table, row, n, kCrossevalFile),
                                        cfg.x_max);
    c.cost = parse_double(row[cost_col], kCrossevalFile);
    c.success.reserve(q);
    for (int j = 0; j < q; ++j) {
      c.success.push_back(parse_double(row[succ_cols[j]], kCrossevalFile));
    }
    loaded.set.candidates.push_back(std::move(c));
  }
  if (loaded.set.candidates.empty()) throw IoError("no candidates (crosseval table is empty)");
  return loaded;
}

/// Scores the cross-evaluation table and writes positioning.csv: aggregated
/// scores, the three positioning metrics, their display-scaled values and the
/// non-dominated flag, preserving the input row order and ids.
inline std::vector<std::string> position_stage(const RunConfig& cfg,
                                               const std::filesystem::path& out_dir,
                                               const LogFn& log = {}) {
  detail::ensure_out_dir(out_dir);
  const int q = cfg.space.scenario_count();
  const int n = cfg.catalog.asset_count();
  const LoadedCandidates loaded = read_crosseval(out_dir, cfg);
  const PositioningReport report = compute_positioning(loaded.set, cfg);

  std::vector<std::string> header{"portfolio_id"};
  detail::append_count_columns(header, n);
  for (int j = 0; j < q; ++j) header.push_back("F_" + std::to_string(j));
  header.insert(header.end(), {"robustness", "risk", "adapt_cost", "robustness_scaled",
                               "risk_scaled", "adapt_cost_scaled", "nd_flag"});

  CsvWriter csv(header);
  for (int i = 0; i < loaded.set.size(); ++i) {
    auto cells = detail::id_and_counts(loaded.ids[i], loaded.set.candidates[i].portfolio.counts);
    for (int j = 0; j < q; ++j) cells.push_back(format_double(report.scores[j][i]));
    const MetricTriple& m = report.metrics[i];
    const MetricTriple& s = report.scaled[i];
    cells.push_back(format_double(m.robustness));
    cells.push_back(format_double(m.risk));
    cells.push_back(format_double(m.adapt_cost));
    cells.push_back(format_double(s.robustness));
    cells.push_back(format_double(s.risk));
    cells.push_back(format_double(s.adapt_cost));
    cells.push_back(report.nondominated[i] ? "1" : "0");
    csv.add_row(std::move(cells));
  }
  write_file((out_dir / kPositioningFile).string(), csv.to_string());
  if (log) log("wrote " + std::string(kPositioningFile));
  return {kPositioningFile};
}

/// Perturbs scenario probabilities and objective weights and writes
/// sensitivity.csv: one band row per (portfolio, perturbation kind, metric).
inline std::vector<std::string> sensitivity_stage(const RunConfig& cfg,
                                                  const std::filesystem::path& out_dir,
                                                  int jobs = 1, const LogFn& log = {}) {
  detail::ensure_out_dir(out_dir);
  const LoadedCandidates loaded = read_crosseval(out_dir, cfg);
  const PositioningReport report = compute_positioning(loaded.set, cfg);
  const std::vector<MetricBands> prob_bands =
      probability_sensitivity(loaded.set, report, cfg, jobs);
  const std::vector<MetricBands> weight_bands =
      weight_sensitivity(loaded.set, report, cfg, jobs);

  CsvWriter csv({"portfolio_id", "metric", "nominal", "q1", "median", "q3", "perturbation"});
  auto add_band = [&](long long id, const char* metric, double nominal, const Band& band,
                      PerturbationKind kind) {
    csv.add_row({std::to_string(id), metric, format_double(nominal), format_double(band.q1),
                 format_double(band.median), format_double(band.q3), to_string(kind)});
  };
  for (int i = 0; i < loaded.set.size(); ++i) {
    const long long id = loaded.ids[i];
    const MetricTriple& m = report.metrics[i];
    for (PerturbationKind kind : {PerturbationKind::probability, PerturbationKind::weight}) {
      const MetricBands& b =
          kind == PerturbationKind::probability ? prob_bands[i] : weight_bands[i];
      add_band(id, "robustness", m.robustness, b.robustness, kind);
      add_band(id, "risk", m.risk, b.risk, kind);
      add_band(id, "adapt_cost", m.adapt_cost, b.adapt_cost, kind);
    }
  }
  write_file((out_dir / kSensitivityFile).string(), csv.to_string());
  if (log) log("wrote " + std::string(kSensitivityFile));
  return {kSensitivityFile};
}

/// Inventory of one full pipeline run.
struct RunArtifacts {
  std::vector<std::pair<std::string, double>> timings;  // stage name, seconds
  std::map<std::string, std::string> files;             // file name -> content hash
};

/// Runs all four stages in order, each reading its inputs back from disk,
/// then writes manifest.json. The manifest is written last so its presence
/// signals a complete run; config_digest hashes the raw config bytes.
inline RunArtifacts run_all(const RunConfig& cfg, std::string_view config_bytes,
                            const std::filesystem::path& out_dir, int jobs = 1,
                            bool trace = false, const LogFn& log = {}) {
  detail::ensure_out_dir(out_dir);
  RunArtifacts artifacts;
  std::vector<std::string> names;

  auto timed = [&](const char* stage, auto&& fn) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<std::string> written = fn();
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    artifacts.timings.emplace_back(stage, elapsed.count());
    names.insert(names.end(), written.begin(), written.end());
  };
  timed("solve", [&] { return solve_stage(cfg, out_dir, jobs, trace, log); });
  timed("crosseval", [&] { return crosseval_stage(cfg, out_dir, jobs, log); });
  timed("position", [&] { return position_stage(cfg, out_dir, log); });
  timed("sensitivity", [&] { return sensitivity_stage(cfg, out_dir, jobs, log); });

  for (const std::string& name : names) {
    artifacts.files[name] = fnv1a64(read_file((out_dir / name).string()));
  }

  nlohmann::ordered_json manifest;
  manifest["tool"] = "plan";
  manifest["version"] = kVersion;
  manifest["config_digest"] = fnv1a64(config_bytes);
  manifest["seed"] = cfg.master_seed;
  nlohmann::ordered_json timings = nlohmann::ordered_json::object();
  for (const auto& [stage, seconds] : artifacts.timings) timings[stage] = seconds;
  manifest["timings"] = std::move(timings);
  nlohmann::ordered_json files = nlohmann::ordered_json::object();
  for (const auto& [name, hash] : artifacts.files) files[name] = hash;
  manifest["files"] = std::move(files);

  write_file((out_dir / kManifestFile).string(), manifest.dump(2) + "\n");
  if (log) log("wrote " + std::string(kManifestFile));
  return artifacts;
}

}  // namespace plan
