#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "aes/metrics.hpp"
#include "aes/scheduler.hpp"
#include "aes/softmdp.hpp"
#include "aes/trace.hpp"

namespace aes {

enum class AgentKind { Planner, Td };

struct MethodSpec {
  std::string name;
  AgentKind agent = AgentKind::Td;
  ScheduleConfig schedule;
};

struct TaskSpec {
  std::string name = "tabular";
  std::size_t states = 5;
  std::size_t actions = 3;
  double gamma = 0.9;
  double mu = 0.2;
  double r_max = 1.0;
  std::vector<DriftPattern> patterns{DriftPattern::Steady};
  DriftSpec drift;
  std::uint64_t seed = 0;  // mixed with the run seed to draw the base MDP
};

struct ExperimentConfig {
  TaskSpec task;
  std::vector<MethodSpec> methods;
  std::vector<std::int64_t> seeds{0};
  std::size_t horizon = 1000;
  std::size_t batch_size = 10;
  std::size_t eval_every = 10;
  std::size_t episode_len = 20;
  double learn_rate = 0.1;
  double epsilon = 1e-6;  // planner simplex floor
  std::size_t recovery_window = 5;
  std::size_t smoothing = 1;
  std::string baseline;  // method normalizing nAUC; default: first Fixed method
  std::filesystem::path output_dir = "out";
};

// Throws ConfigError naming the offending key(s).
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

// Applies `key = value` to the raw config document. Schedule keys go to every method.
// Throws ConfigError for keys the schema does not know.
std::string override_key(const std::string& json_text, const std::string& key,
                         const std::string& value);

SoftMdpSequence cell_sequence(const ExperimentConfig& cfg, DriftPattern pattern, std::int64_t seed);
RunTrace run_cell(const ExperimentConfig& cfg, const MethodSpec& method, DriftPattern pattern,
                  std::int64_t seed);

std::string trace_filename(const std::string& method, DriftPattern pattern, std::int64_t seed);

struct RunResult {
  std::vector<std::filesystem::path> traces;
  std::vector<SummaryRow> summary;
};

// Runs every (method, pattern, seed) cell on up to `jobs` threads and writes traces plus
// summary.csv into cfg.output_dir. Output bytes do not depend on `jobs`.
RunResult run_experiment(const ExperimentConfig& cfg, std::size_t jobs, bool write_summary = true);

// One run per value; summary.csv in cfg.output_dir gains a sweep_value column.
RunResult run_sweep(const std::string& json_text, const std::string& key,
                    const std::vector<std::string>& values, const std::filesystem::path& out_dir,
                    std::size_t jobs);

}  // namespace aes
