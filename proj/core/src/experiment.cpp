#include "aes/experiment.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include "aes/agent.hpp"
#include "aes/error.hpp"

namespace aes {
namespace {

using json = nlohmann::json;

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

const std::set<std::string> kScheduleKeys{"mode",     "C1",         "C2",         "c",
                                          "lambda_min", "lambda_max", "quantile_q", "ema_beta",
                                          "fixed_value"};
const std::set<std::string> kTopKeys{"task",        "methods",         "seeds",     "horizon",
                                     "batch_size",  "eval_every",      "episode_len", "learn_rate",
                                     "epsilon",     "recovery_window", "smoothing", "baseline",
                                     "output_dir"};
const std::set<std::string> kTaskKeys{"name", "states", "actions", "gamma", "mu",
                                      "r_max", "patterns", "drift", "seed"};
const std::set<std::string> kDriftKeys{"change_times", "magnitude",    "period",
                                       "amplitude",    "reward_drift", "transition_drift"};
const std::set<std::string> kMethodKeys{"name", "agent", "schedule"};

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  if (!obj.is_object()) config_error(where + ": expected an object");
  for (const auto& [k, v] : obj.items())
    if (!known.count(k)) config_error("unknown key: " + (where.empty() ? k : where + "." + k));
}

template <class T>
void read(const json& obj, const char* key, const std::string& where, T& dst) {
  if (!obj.contains(key)) return;
  const std::string path = where.empty() ? key : where + "." + key;
  const auto& v = obj.at(key);
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) config_error(path + ": expected true/false");
    dst = v.get<bool>();
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) config_error(path + ": expected a string");
    dst = v.get<std::string>();
  } else if constexpr (std::is_floating_point_v<T>) {
    if (!v.is_number()) config_error(path + ": expected a number");
    dst = v.get<double>();
  } else {
    if (!v.is_number_integer()) config_error(path + ": expected an integer");
    if constexpr (std::is_unsigned_v<T>) {
      if (v.get<std::int64_t>() < 0) config_error(path + ": must be nonnegative");
    }
    dst = v.get<T>();
  }
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a * 0x9e3779b97f4a7c15ULL + b + 0x632be59bd9b4e019ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

bool safe_name(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
  });
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    config_error(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown(doc, kTopKeys, "");
  ExperimentConfig cfg;

  if (!doc.contains("task")) config_error("task: missing");
  const auto& task = doc.at("task");
  reject_unknown(task, kTaskKeys, "task");
  read(task, "name", "task", cfg.task.name);
  read(task, "states", "task", cfg.task.states);
  read(task, "actions", "task", cfg.task.actions);
  read(task, "gamma", "task", cfg.task.gamma);
  read(task, "mu", "task", cfg.task.mu);
  read(task, "r_max", "task", cfg.task.r_max);
  read(task, "seed", "task", cfg.task.seed);
  if (task.contains("patterns")) {
    const auto& ps = task.at("patterns");
    if (!ps.is_array() || ps.empty()) config_error("task.patterns: expected a nonempty list");
    cfg.task.patterns.clear();
    for (const auto& p : ps) {
      const auto parsed = p.is_string() ? parse_pattern(p.get<std::string>()) : std::nullopt;
      if (!parsed) config_error("task.patterns: unknown pattern " + p.dump());
      if (std::find(cfg.task.patterns.begin(), cfg.task.patterns.end(), *parsed) !=
          cfg.task.patterns.end())
        config_error("task.patterns: duplicate pattern " + p.dump());
      cfg.task.patterns.push_back(*parsed);
    }
  }
  if (task.contains("drift")) {
    const auto& d = task.at("drift");
    reject_unknown(d, kDriftKeys, "task.drift");
    if (d.contains("change_times")) {
      const auto& ct = d.at("change_times");
      if (!ct.is_array()) config_error("task.drift.change_times: expected a list");
      for (const auto& c : ct) {
        if (!c.is_number_integer() || c.get<std::int64_t>() < 1)
          config_error("task.drift.change_times: entries must be positive integers");
        cfg.task.drift.change_times.push_back(c.get<std::size_t>());
      }
    }
    read(d, "magnitude", "task.drift", cfg.task.drift.magnitude);
    read(d, "period", "task.drift", cfg.task.drift.period);
    read(d, "amplitude", "task.drift", cfg.task.drift.amplitude);
    read(d, "reward_drift", "task.drift", cfg.task.drift.reward_drift);
    read(d, "transition_drift", "task.drift", cfg.task.drift.transition_drift);
  }

  if (!doc.contains("methods") || !doc.at("methods").is_array() || doc.at("methods").empty())
    config_error("methods: expected a nonempty list");
  std::set<std::string> names;
  for (std::size_t i = 0; i < doc.at("methods").size(); ++i) {
    const auto& m = doc.at("methods")[i];
    const std::string where = "methods[" + std::to_string(i) + "]";
    reject_unknown(m, kMethodKeys, where);
    MethodSpec spec;
    read(m, "name", where, spec.name);
    if (!safe_name(spec.name)) config_error(where + ".name: must be nonempty [A-Za-z0-9_.-]");
    if (!names.insert(spec.name).second) config_error(where + ".name: duplicate method " + spec.name);
    std::string agent = "td";
    read(m, "agent", where, agent);
    if (agent == "planner") spec.agent = AgentKind::Planner;
    else if (agent == "td") spec.agent = AgentKind::Td;
    else config_error(where + ".agent: expected planner or td");
    if (m.contains("schedule")) {
      const auto& s = m.at("schedule");
      const std::string sw = where + ".schedule";
      reject_unknown(s, kScheduleKeys, sw);
      auto& sc = spec.schedule;
      if (s.contains("mode")) {
        std::string mode;
        read(s, "mode", sw, mode);
        const auto parsed = parse_mode(mode);
        if (!parsed) config_error(sw + ".mode: expected fixed, oracle, offline or online");
        sc.mode = *parsed;
      }
      read(s, "C1", sw, sc.C1);
      read(s, "C2", sw, sc.C2);
      read(s, "c", sw, sc.c);
      read(s, "lambda_min", sw, sc.lambda_min);
      read(s, "lambda_max", sw, sc.lambda_max);
      read(s, "quantile_q", sw, sc.quantile_q);
      read(s, "ema_beta", sw, sc.ema_beta);
      read(s, "fixed_value", sw, sc.fixed_value);
      try {
        sc.validate();
      } catch (const Error& e) {
        config_error(sw + ": " + e.what());
      }
      if (sc.mode == ScheduleMode::Offline)
        config_error(sw + ".mode: offline needs the drift total up front; not available to agents");
      if (sc.mode == ScheduleMode::Oracle && spec.agent == AgentKind::Td)
        config_error(sw + ".mode: oracle needs the true drift; only planner agents have it");
    }
    cfg.methods.push_back(std::move(spec));
  }

  if (doc.contains("seeds")) {
    const auto& s = doc.at("seeds");
    if (!s.is_array() || s.empty()) config_error("seeds: expected a nonempty list");
    cfg.seeds.clear();
    for (const auto& v : s) {
      if (!v.is_number_integer()) config_error("seeds: entries must be integers");
      cfg.seeds.push_back(v.get<std::int64_t>());
    }
  }
  read(doc, "horizon", "", cfg.horizon);
  read(doc, "batch_size", "", cfg.batch_size);
  read(doc, "eval_every", "", cfg.eval_every);
  read(doc, "episode_len", "", cfg.episode_len);
  read(doc, "learn_rate", "", cfg.learn_rate);
  read(doc, "epsilon", "", cfg.epsilon);
  read(doc, "recovery_window", "", cfg.recovery_window);
  read(doc, "smoothing", "", cfg.smoothing);
  read(doc, "baseline", "", cfg.baseline);
  std::string out_dir = cfg.output_dir.string();
  read(doc, "output_dir", "", out_dir);
  cfg.output_dir = out_dir;

  if (cfg.horizon < 2) config_error("horizon: must be at least 2");
  if (cfg.batch_size < 1) config_error("batch_size: must be at least 1");
  if (cfg.eval_every < 1) config_error("eval_every: must be at least 1");
  if (cfg.episode_len < 1) config_error("episode_len: must be at least 1");
  if (cfg.recovery_window < 1) config_error("recovery_window: must be at least 1");
  if (cfg.smoothing < 1) config_error("smoothing: must be at least 1");
  if (!(cfg.learn_rate > 0.0 && cfg.learn_rate <= 1.0)) config_error("learn_rate: must be in (0, 1]");
  if (!(cfg.epsilon > 0.0) || cfg.epsilon * static_cast<double>(cfg.task.actions) > 1.0)
    config_error("epsilon: must be in (0, 1/actions]");
  if (cfg.task.states < 1 || cfg.task.actions < 1) config_error("task.states, task.actions: must be >= 1");
  if (!(cfg.task.gamma >= 0.0 && cfg.task.gamma < 1.0)) config_error("task.gamma: must be in [0, 1)");
  if (!(cfg.task.mu > 0.0)) config_error("task.mu: must be positive");
  if (!(cfg.task.r_max > 0.0)) config_error("task.r_max: must be positive");
  for (std::size_t c : cfg.task.drift.change_times)
    if (c <= cfg.eval_every || c > cfg.horizon)
      config_error("task.drift.change_times: " + std::to_string(c) +
                   " must lie after the first eval point (eval_every) and within horizon");
  if (cfg.baseline.empty()) {
    const auto it = std::find_if(cfg.methods.begin(), cfg.methods.end(), [](const MethodSpec& m) {
      return m.schedule.mode == ScheduleMode::Fixed;
    });
    cfg.baseline = (it == cfg.methods.end() ? cfg.methods.front() : *it).name;
  } else if (!names.count(cfg.baseline)) {
    config_error("baseline: no method named " + cfg.baseline);
  }
  // the generator has its own invariants (e.g. peak weight <= 1)
  for (auto p : cfg.task.patterns) {
    try {
      validate_sequence(cell_sequence(cfg, p, cfg.seeds.front()));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ConfigError) throw;
      config_error(std::string("task.drift (") + pattern_name(p) + "): " + e.what());
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string override_key(const std::string& json_text, const std::string& key,
                         const std::string& value) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    config_error(std::string("config is not valid JSON: ") + e.what());
  }
  json v;
  try {
    v = json::parse(value);
  } catch (const json::parse_error&) {
    v = value;  // bare word, e.g. a mode name
  }
  if (kScheduleKeys.count(key)) {
    if (!doc.contains("methods") || !doc["methods"].is_array()) config_error("methods: missing");
    for (auto& m : doc["methods"]) m["schedule"][key] = v;
  } else if (kTopKeys.count(key) && key != "task" && key != "methods") {
    doc[key] = v;
  } else if (kTaskKeys.count(key) && key != "drift") {
    doc["task"][key] = v;
  } else if (kDriftKeys.count(key)) {
    doc["task"]["drift"][key] = v;
  } else {
    config_error("unknown key: " + key);
  }
  return doc.dump();
}

SoftMdpSequence cell_sequence(const ExperimentConfig& cfg, DriftPattern pattern, std::int64_t seed) {
  const std::uint64_t s = mix_seed(cfg.task.seed, static_cast<std::uint64_t>(seed));
  std::mt19937_64 rng(s);
  SoftMdpSequence seq;
  seq.base = random_mdp(cfg.task.states, cfg.task.actions, cfg.task.gamma, cfg.task.mu,
                        cfg.task.r_max, rng);
  seq.pattern = pattern;
  seq.horizon = cfg.horizon;
  seq.drift = cfg.task.drift;
  seq.seed = s;
  return seq;
}

RunTrace run_cell(const ExperimentConfig& cfg, const MethodSpec& method, DriftPattern pattern,
                  std::int64_t seed) {
  const auto seq = cell_sequence(cfg, pattern, seed);
  RunTrace trace;
  if (method.agent == AgentKind::Planner) {
    trace = run_planner(seq, method.schedule, cfg.epsilon);
  } else {
    TdOptions opts;
    opts.batch_size = cfg.batch_size;
    opts.eval_every = cfg.eval_every;
    opts.episode_len = cfg.episode_len;
    opts.learn_rate = cfg.learn_rate;
    trace = td_train(seq, method.schedule, opts, static_cast<std::uint64_t>(seed));
  }
  trace.pattern = pattern_name(pattern);
  trace.seed = seed;
  return trace;
}

std::string trace_filename(const std::string& method, DriftPattern pattern, std::int64_t seed) {
  return "trace_" + method + "_" + pattern_name(pattern) + "_" + std::to_string(seed) + ".csv";
}

namespace {

struct Cell {
  std::size_t method;
  DriftPattern pattern;
  std::size_t seed;
  bool write;
};

bool has_changes(DriftPattern p) { return p == DriftPattern::Abrupt || p == DriftPattern::Mixed; }

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg, std::size_t jobs, bool write_summary) {
  // Configured cells first, then Steady runs that only feed normalization.
  std::vector<Cell> cells;
  std::map<std::tuple<std::size_t, DriftPattern, std::size_t>, std::size_t> index;
  auto add = [&](std::size_t m, DriftPattern p, std::size_t s, bool write) {
    const auto key = std::make_tuple(m, p, s);
    if (index.count(key)) return;
    index[key] = cells.size();
    cells.push_back({m, p, s, write});
  };
  for (std::size_t m = 0; m < cfg.methods.size(); ++m)
    for (auto p : cfg.task.patterns)
      for (std::size_t s = 0; s < cfg.seeds.size(); ++s) add(m, p, s, true);
  if (cfg.methods.empty()) config_error("methods: need at least one");
  // configs built in code may leave the baseline unset
  auto base_it = std::find_if(cfg.methods.begin(), cfg.methods.end(), [&](const MethodSpec& m) {
    return cfg.baseline.empty() ? m.schedule.mode == ScheduleMode::Fixed : m.name == cfg.baseline;
  });
  if (base_it == cfg.methods.end()) {
    if (!cfg.baseline.empty()) config_error("baseline: no method named " + cfg.baseline);
    base_it = cfg.methods.begin();
  }
  const std::size_t base_idx = static_cast<std::size_t>(base_it - cfg.methods.begin());
  for (std::size_t s = 0; s < cfg.seeds.size(); ++s) {
    add(base_idx, DriftPattern::Steady, s, false);
    for (std::size_t m = 0; m < cfg.methods.size(); ++m) add(m, DriftPattern::Steady, s, false);
  }

  std::vector<EvalCurve> curves(cells.size());
  std::vector<std::exception_ptr> errors(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      const Cell& c = cells[i];
      try {
        const auto& method = cfg.methods[c.method];
        const auto trace = run_cell(cfg, method, c.pattern, cfg.seeds[c.seed]);
        if (c.write)
          write_file_atomic(cfg.output_dir / trace_filename(method.name, c.pattern, cfg.seeds[c.seed]),
                            trace_csv(trace, true));
        curves[i] = moving_average(eval_curve(trace), cfg.smoothing);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::max<std::size_t>(1, std::min(jobs, cells.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  RunResult result;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const Cell& c = cells[i];
    if (!c.write) continue;
    const auto& method = cfg.methods[c.method];
    const std::int64_t seed = cfg.seeds[c.seed];
    result.traces.push_back(cfg.output_dir / trace_filename(method.name, c.pattern, seed));
    SummaryRow row;
    row.task = cfg.task.name;
    row.pattern = pattern_name(c.pattern);
    row.method = method.name;
    row.seed = seed;
    const auto& curve = curves[i];
    row.nauc = n_auc(curve, curves[index.at({base_idx, DriftPattern::Steady, c.seed})]);
    row.drop_ratio = drop_ratio(curve, curves[index.at({c.method, DriftPattern::Steady, c.seed})]);
    if (has_changes(c.pattern) && !cfg.task.drift.change_times.empty())
      row.recovery = recovery_time(curve, cfg.task.drift.change_times, cfg.recovery_window, cfg.horizon);
    result.summary.push_back(std::move(row));
  }
  if (write_summary) write_file_atomic(cfg.output_dir / "summary.csv", summary_csv(result.summary, false));
  return result;
}

RunResult run_sweep(const std::string& json_text, const std::string& key,
                    const std::vector<std::string>& values, const std::filesystem::path& out_dir,
                    std::size_t jobs) {
  RunResult all;
  if (values.empty()) return all;
  for (const auto& v : values) {
    ExperimentConfig cfg = parse_config(override_key(json_text, key, v));
    std::string tag = key + "_" + v;
    for (auto& ch : tag)
      if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '.' && ch != '-') ch = '_';
    cfg.output_dir = out_dir / ("sweep_" + tag);
    auto part = run_experiment(cfg, jobs, false);
    for (auto& r : part.summary) r.sweep_value = v;
    all.traces.insert(all.traces.end(), part.traces.begin(), part.traces.end());
    all.summary.insert(all.summary.end(), part.summary.begin(), part.summary.end());
  }
  write_file_atomic(out_dir / "summary.csv", summary_csv(all.summary, true));
  return all;
}

}  // namespace aes
