#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "aes/error.hpp"
#include "aes/experiment.hpp"
#include "aes/verify.hpp"
#include "aes/version.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kRuntime = 1;
constexpr int kConfig = 2;
constexpr int kVerifyFailed = 3;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw aes::Error(aes::ErrorCode::IoError, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_values(const std::string& csv) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(csv);
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive entropy scheduling: experiments and numerical checks"};
  app.set_version_flag("--version", std::string(aes::kVersion));
  app.require_subcommand(1);

  std::size_t jobs = 1;
  std::string out_dir;
  app.add_option("--jobs", jobs, "parallel cells")->check(CLI::PositiveNumber);
  app.add_option("--out", out_dir, "override output_dir");

  std::string config_path;
  auto* run = app.add_subcommand("run", "run every (method, pattern, seed) cell");
  run->add_option("config", config_path, "JSON config")->required();

  std::string sweep_config, sweep_key, sweep_values;
  auto* sweep = app.add_subcommand("sweep", "rerun a config once per value of one key");
  sweep->add_option("config", sweep_config, "JSON config")->required();
  sweep->add_option("--param", sweep_key, "key to override")->required();
  sweep->add_option("--values", sweep_values, "comma-separated values")->required();

  std::uint64_t seed = 0;
  bool as_json = false;
  auto* verify = app.add_subcommand("verify", "run the numerical check suite");
  verify->add_option("--seed", seed, "suite seed");
  verify->add_flag("--json", as_json, "emit reports as JSON");

  // options are accepted before or after the subcommand
  for (auto* sub : {run, sweep}) {
    sub->add_option("--jobs", jobs, "parallel cells")->check(CLI::PositiveNumber);
    sub->add_option("--out", out_dir, "override output_dir");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfig;
  }

  try {
    if (*run) {
      auto cfg = aes::load_config(config_path);
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      const auto res = aes::run_experiment(cfg, jobs);
      std::cout << res.traces.size() << " traces and summary.csv written to "
                << cfg.output_dir.string() << "\n";
    } else if (*sweep) {
      const std::string text = slurp(sweep_config);
      const auto values = split_values(sweep_values);
      std::filesystem::path dir = out_dir;
      if (dir.empty()) dir = aes::parse_config(text).output_dir;
      if (values.empty()) {
        std::cout << "no values; nothing to do\n";
        return kOk;
      }
      const auto res = aes::run_sweep(text, sweep_key, values, dir, jobs);
      std::cout << values.size() << " sweep blocks, " << res.traces.size()
                << " traces; summary.csv written to " << dir.string() << "\n";
    } else if (*verify) {
      const auto reports = aes::run_suite(seed);
      if (as_json)
        std::cout << aes::reports_to_json(reports) << "\n";
      else
        std::cout << aes::reports_table(reports);
      for (const auto& r : reports)
        if (!r.passed) return kVerifyFailed;
    }
  } catch (const aes::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == aes::ErrorCode::ConfigError ? kConfig : kRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kOk;
}
