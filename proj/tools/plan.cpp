#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "plan/config.hpp"
#include "plan/pipeline.hpp"
#include "plan/version.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  bool trace = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "Configuration file (JSON)")->required();
  cmd->add_option("--out", args.out_dir, "Output directory for artifacts")->required();
  cmd->add_option("--seed", args.seed, "Master seed; overrides PLAN_SEED and the config");
  cmd->add_option("--jobs", args.jobs, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_flag("--trace", args.trace, "Emit progress lines and assignment traces");
}

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("PLAN_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  std::uint64_t value = 0;
  const char* end = raw + std::strlen(raw);
  const auto res = std::from_chars(raw, end, value);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw plan::ConfigError("invalid PLAN_SEED value '" + std::string(raw) + "'");
  }
  return value;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scenario-space portfolio planning toolkit"};
  app.set_version_flag("--version", std::string(plan::kVersion));
  app.require_subcommand(1);

  CommonArgs args;
  CLI::App* run = app.add_subcommand(
      "run", "Full pipeline: solve, crosseval, position, sensitivity, manifest");
  CLI::App* solve = app.add_subcommand("solve", "Evolve one front per scenario");
  CLI::App* crosseval =
      app.add_subcommand("crosseval", "Evaluate pooled front portfolios on every scenario");
  CLI::App* position =
      app.add_subcommand("position", "Score the cross-evaluation table and filter dominance");
  CLI::App* sensitivity =
      app.add_subcommand("sensitivity", "Quartile bands under probability and weight bias");
  for (CLI::App* cmd : {run, solve, crosseval, position, sensitivity}) add_common(cmd, args);

  CLI11_PARSE(app, argc, argv);

  try {
    const std::string config_bytes = plan::read_file(args.config_path);
    plan::RunConfig cfg = plan::load_config(config_bytes);
    if (args.seed.has_value()) {
      cfg.master_seed = *args.seed;
    } else if (const auto env = env_seed(); env.has_value()) {
      cfg.master_seed = *env;
    }

    const plan::LogFn log = [](const std::string& line) { std::cout << line << '\n'; };
    if (run->parsed()) {
      plan::run_all(cfg, config_bytes, args.out_dir, args.jobs, args.trace, log);
    } else if (solve->parsed()) {
      plan::solve_stage(cfg, args.out_dir, args.jobs, args.trace, log);
    } else if (crosseval->parsed()) {
      plan::crosseval_stage(cfg, args.out_dir, args.jobs, log);
    } else if (position->parsed()) {
      plan::position_stage(cfg, args.out_dir, log);
    } else if (sensitivity->parsed()) {
      plan::sensitivity_stage(cfg, args.out_dir, args.jobs, log);
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
