#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "aes/scheduler.hpp"
#include "aes/softmdp.hpp"
#include "aes/trace.hpp"

namespace aes {

struct PlannerState {
  Policy policy;
  ProxyState proxy;
  std::optional<QTable> prev_q;
  double eta_prev = 0.0;
  std::size_t t = 0;
};

PlannerState planner_init(const TabularMdp& mdp, double eps);

struct PlannerRecord {
  double raw_proxy = 0.0;  // |Q*_t - Q*_{t-1}|_inf / mu
  double policy_drift = 0.0;  // max_s |pi*_t(.|s) - pi*_{t-1}(.|s)|_1
  double lambda = 0.0;
  double eta = 0.0;
  double played_return = 0.0;   // J_t(pi_t)
  double optimal_return = 0.0;  // J_t(pi*_t)
  double regret_rl_inc = 0.0;
};

std::pair<PlannerState, PlannerRecord> planner_step(const PlannerState& state,
                                                    const TabularMdp& mdp_t,
                                                    const QTable& q_star_t,
                                                    const ScheduleConfig& cfg, double eps);

struct TdLearnerState {
  QTable q;
  std::mt19937_64 rng;
  double learn_rate = 0.1;
  ProxyState proxy;
  std::size_t current_state = 0;
  std::size_t episode_len = 20;
  std::size_t episode_step = 0;
};

TdLearnerState td_init(const TabularMdp& mdp, std::uint64_t seed, double learn_rate = 0.1,
                       std::size_t episode_len = 20);

struct TdTransition {
  std::size_t state = 0;
  std::size_t action = 0;
  double reward = 0.0;
  std::size_t next_state = 0;
  double td_error = 0.0;  // signed
};

TdTransition td_step(TdLearnerState& state, const TabularMdp& mdp_t, double alpha_t);

struct TdOptions {
  std::size_t batch_size = 10;
  std::size_t eval_every = 10;
  std::size_t episode_len = 20;
  double learn_rate = 0.1;
  double solver_tol = 1e-8;
};

// One row per batch boundary or evaluation point. Rows carry the temperature in force
// after that step; eval rows carry J_t(softmax(q / alpha_t)) and the gap to J_t(pi*_t).
RunTrace td_train(const SoftMdpSequence& seq, const ScheduleConfig& cfg, const TdOptions& opts,
                  std::uint64_t seed);

// One row per round; eval_return is J_t(pi_t) of the played policy.
RunTrace run_planner(const SoftMdpSequence& seq, const ScheduleConfig& cfg, double eps,
                     double solver_tol = 1e-10);

// Sum over rows carrying eval_return of J_t(pi*_t) - eval_return.
double rl_dynamic_regret(const RunTrace& trace, std::span<const TabularMdp> seq, double tol);

std::size_t sample_index(std::span<const double> probs, std::mt19937_64& rng);

}  // namespace aes
