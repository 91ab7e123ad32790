#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>

namespace aes {

enum class ScheduleMode { Fixed, Oracle, Offline, Online };

const char* mode_name(ScheduleMode mode);
std::optional<ScheduleMode> parse_mode(const std::string& name);

struct ScheduleConfig {
  double C1 = 1.0;
  double C2 = 1.0;
  double c = 1.0;  // eta = c * lambda
  double lambda_min = 0.05;
  double lambda_max = 1.0;
  double quantile_q = 0.9;
  double ema_beta = 0.95;
  ScheduleMode mode = ScheduleMode::Online;
  double fixed_value = 0.2;

  // Throws InvalidSchedule; the message names the offending keys.
  void validate() const;
};

struct ProxyState {
  double a_hat_sum = 0.0;
  std::size_t t = 0;
  double ema_value = 0.0;
};

double oracle_lambda(double alpha, const ScheduleConfig& cfg);
double offline_lambda(double drift_total, std::size_t horizon, const ScheduleConfig& cfg);
double clip_lambda(double lambda, const ScheduleConfig& cfg);
double online_lambda(const ProxyState& state, const ScheduleConfig& cfg);

// Nearest rank: sorted[ceil(q n) - 1].
double td_quantile_proxy(std::span<const double> abs_errors, double q);

ProxyState update_proxy(ProxyState state, double raw, const ScheduleConfig& cfg);
double eta_from_lambda(double lambda, double eta_prev, const ScheduleConfig& cfg);

// Emits lambda_t one round at a time from the observed drift proxy.
class ScheduleProvider {
 public:
  explicit ScheduleProvider(ScheduleConfig cfg);
  // Offline mode needs the total drift and horizon up front.
  ScheduleProvider(ScheduleConfig cfg, double drift_total, std::size_t horizon);

  double next(double proxy);

  const ScheduleConfig& config() const { return cfg_; }
  const ProxyState& proxy_state() const { return state_; }

 private:
  ScheduleConfig cfg_;
  ProxyState state_;
  std::optional<double> offline_;
};

}  // namespace aes
