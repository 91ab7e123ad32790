#include "aes/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "aes/error.hpp"

namespace aes {

const char* mode_name(ScheduleMode mode) {
  switch (mode) {
    case ScheduleMode::Fixed: return "fixed";
    case ScheduleMode::Oracle: return "oracle";
    case ScheduleMode::Offline: return "offline";
    case ScheduleMode::Online: return "online";
  }
  return "unknown";
}

std::optional<ScheduleMode> parse_mode(const std::string& name) {
  for (auto m : {ScheduleMode::Fixed, ScheduleMode::Oracle, ScheduleMode::Offline,
                 ScheduleMode::Online})
    if (name == mode_name(m)) return m;
  return std::nullopt;
}

void ScheduleConfig::validate() const {
  auto bad = [](const std::string& msg) { throw Error(ErrorCode::InvalidSchedule, msg); };
  if (!(C1 > 0.0)) bad("C1 must be positive");
  if (!(C2 > 0.0)) bad("C2 must be positive");
  if (!(c > 0.0)) bad("c must be positive");
  if (!(lambda_min > 0.0)) bad("lambda_min must be positive");
  if (!(lambda_max >= lambda_min)) bad("lambda_min must not exceed lambda_max");
  if (!(quantile_q > 0.0 && quantile_q <= 1.0)) bad("quantile_q must lie in (0, 1]");
  if (!(ema_beta >= 0.0 && ema_beta < 1.0)) bad("ema_beta must lie in [0, 1)");
  if (mode == ScheduleMode::Fixed && !(fixed_value > 0.0)) bad("fixed_value must be positive");
}

double oracle_lambda(double alpha, const ScheduleConfig& cfg) {
  return std::sqrt(cfg.C1 * std::max(alpha, 0.0) / cfg.C2);
}

double offline_lambda(double drift_total, std::size_t horizon, const ScheduleConfig& cfg) {
  if (horizon == 0) throw Error(ErrorCode::InvalidSchedule, "horizon must be positive");
  return std::sqrt(cfg.C1 * std::max(drift_total, 0.0) /
                   (cfg.C2 * static_cast<double>(horizon)));
}

double clip_lambda(double lambda, const ScheduleConfig& cfg) {
  return std::clamp(lambda, cfg.lambda_min, cfg.lambda_max);
}

double online_lambda(const ProxyState& state, const ScheduleConfig& cfg) {
  if (state.t == 0) return cfg.lambda_min;
  const double raw = std::sqrt(cfg.C1 / cfg.C2) *
                     std::sqrt(state.a_hat_sum / static_cast<double>(state.t));
  return clip_lambda(raw, cfg);
}

double td_quantile_proxy(std::span<const double> abs_errors, double q) {
  if (abs_errors.empty()) throw Error(ErrorCode::EmptyBatch, "no TD errors in batch");
  if (!(q > 0.0 && q <= 1.0)) throw Error(ErrorCode::InvalidSchedule, "quantile_q outside (0, 1]");
  std::vector<double> v(abs_errors.begin(), abs_errors.end());
  for (double e : v)
    if (!(e >= 0.0)) throw Error(ErrorCode::NegativeError, "negative absolute TD error");
  const auto n = static_cast<double>(v.size());
  auto rank = static_cast<std::size_t>(std::ceil(q * n - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, v.size());
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(rank - 1), v.end());
  return v[rank - 1];
}

ProxyState update_proxy(ProxyState state, double raw, const ScheduleConfig& cfg) {
  raw = std::max(raw, 0.0);
  state.ema_value = state.t == 0 ? raw : cfg.ema_beta * state.ema_value + (1.0 - cfg.ema_beta) * raw;
  state.a_hat_sum += state.ema_value;
  state.t += 1;
  return state;
}

double eta_from_lambda(double lambda, double eta_prev, const ScheduleConfig& cfg) {
  return std::max(eta_prev, cfg.c * lambda);
}

ScheduleProvider::ScheduleProvider(ScheduleConfig cfg) : cfg_(cfg) { cfg_.validate(); }

ScheduleProvider::ScheduleProvider(ScheduleConfig cfg, double drift_total, std::size_t horizon)
    : cfg_(cfg), offline_(offline_lambda(drift_total, horizon, cfg)) {
  cfg_.validate();
}

double ScheduleProvider::next(double proxy) {
  switch (cfg_.mode) {
    case ScheduleMode::Fixed:
      return cfg_.fixed_value;
    case ScheduleMode::Oracle:
      return clip_lambda(oracle_lambda(proxy, cfg_), cfg_);
    case ScheduleMode::Offline:
      if (!offline_)
        throw Error(ErrorCode::InvalidSchedule, "offline schedule needs drift total and horizon");
      return clip_lambda(*offline_, cfg_);
    case ScheduleMode::Online:
      state_ = update_proxy(state_, proxy, cfg_);
      return online_lambda(state_, cfg_);
  }
  return cfg_.lambda_min;
}

}  // namespace aes
