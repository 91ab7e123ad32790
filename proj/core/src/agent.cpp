#include "aes/agent.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aes/error.hpp"
#include "aes/omd.hpp"

namespace aes {

std::size_t sample_index(std::span<const double> probs, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    acc += probs[i];
    last = i;
    if (u < acc) return i;
  }
  return last;
}

namespace {

std::vector<double> row_of(const QTable& q, Eigen::Index s) {
  std::vector<double> out(static_cast<std::size_t>(q.cols()));
  for (Eigen::Index a = 0; a < q.cols(); ++a) out[static_cast<std::size_t>(a)] = q(s, a);
  return out;
}

double lambda_for(ScheduleMode mode, const ScheduleConfig& cfg, const ProxyState& proxy,
                  double true_drift) {
  switch (mode) {
    case ScheduleMode::Fixed: return cfg.fixed_value;
    case ScheduleMode::Online: return online_lambda(proxy, cfg);
    case ScheduleMode::Oracle: return clip_lambda(oracle_lambda(true_drift, cfg), cfg);
    case ScheduleMode::Offline: break;
  }
  throw Error(ErrorCode::InvalidSchedule, "offline mode needs the full drift total; not available here");
}

}  // namespace

PlannerState planner_init(const TabularMdp& mdp, double eps) {
  PlannerState st;
  st.policy.assign(mdp.n_states, truncate(SimplexVec::uniform(mdp.n_actions), eps));
  return st;
}

std::pair<PlannerState, PlannerRecord> planner_step(const PlannerState& state,
                                                    const TabularMdp& mdp_t,
                                                    const QTable& q_star_t,
                                                    const ScheduleConfig& cfg, double eps) {
  if (static_cast<std::size_t>(q_star_t.rows()) != mdp_t.n_states ||
      static_cast<std::size_t>(q_star_t.cols()) != mdp_t.n_actions ||
      state.policy.size() != mdp_t.n_states)
    throw Error(ErrorCode::ShapeMismatch, "planner state, MDP and Q* disagree in shape");
  const double mu = mdp_t.mu;
  PlannerRecord rec;
  const Policy target = soft_policy(q_star_t, mu);
  if (state.prev_q) {
    rec.raw_proxy = (q_star_t - *state.prev_q).cwiseAbs().maxCoeff() / mu;
    const Policy before = soft_policy(*state.prev_q, mu);
    for (std::size_t s = 0; s < target.size(); ++s)
      rec.policy_drift = std::max(rec.policy_drift, l1_distance(target[s], before[s]));
  }

  PlannerState next = state;
  next.proxy = update_proxy(state.proxy, rec.raw_proxy, cfg);
  rec.lambda = lambda_for(cfg.mode, cfg, next.proxy, rec.policy_drift);
  rec.eta = eta_from_lambda(rec.lambda, state.eta_prev, cfg);
  rec.played_return = soft_return(mdp_t, state.policy);
  rec.optimal_return = soft_return(mdp_t, target);
  rec.regret_rl_inc = rec.optimal_return - rec.played_return;

  for (std::size_t s = 0; s < mdp_t.n_states; ++s) {
    const auto& pi_s = state.policy[s];
    std::vector<double> g = row_of(q_star_t, static_cast<Eigen::Index>(s));
    for (std::size_t a = 0; a < g.size(); ++a) g[a] = -g[a] + mu * (1.0 + std::log(pi_s[a]));
    const auto full = regularized_grad(g, pi_s, rec.lambda);
    next.policy[s] = md_step(OmdState{pi_s, state.eta_prev, state.t}, full, rec.eta, eps).x;
  }
  next.prev_q = q_star_t;
  next.eta_prev = rec.eta;
  next.t = state.t + 1;
  return {std::move(next), rec};
}

TdLearnerState td_init(const TabularMdp& mdp, std::uint64_t seed, double learn_rate,
                       std::size_t episode_len) {
  TdLearnerState st;
  st.q = QTable::Zero(static_cast<Eigen::Index>(mdp.n_states), static_cast<Eigen::Index>(mdp.n_actions));
  st.rng.seed(seed);
  st.learn_rate = learn_rate;
  st.episode_len = std::max<std::size_t>(episode_len, 1);
  st.current_state = sample_index(mdp.rho.probs(), st.rng);
  return st;
}

TdTransition td_step(TdLearnerState& state, const TabularMdp& mdp_t, double alpha_t) {
  if (!(alpha_t > 0.0)) throw Error(ErrorCode::NonPositiveTemperature, "alpha_t must be positive");
  TdTransition tr;
  tr.state = state.current_state;
  const auto s = static_cast<Eigen::Index>(tr.state);
  const auto pi = softmax(row_of(state.q, s), alpha_t);
  tr.action = sample_index(pi.probs(), state.rng);
  tr.next_state = sample_index(mdp_t.row(tr.state, tr.action), state.rng);
  const auto a = static_cast<Eigen::Index>(tr.action);
  tr.reward = mdp_t.rewards(s, a);
  const double target =
      tr.reward + mdp_t.gamma * log_sum_exp(row_of(state.q, static_cast<Eigen::Index>(tr.next_state)), alpha_t);
  tr.td_error = target - state.q(s, a);
  state.q(s, a) += state.learn_rate * tr.td_error;
  if (!std::isfinite(state.q(s, a))) throw Error(ErrorCode::NonFiniteGradient, "Q-table diverged");
  if (++state.episode_step >= state.episode_len) {
    state.episode_step = 0;
    state.current_state = sample_index(mdp_t.rho.probs(), state.rng);
  } else {
    state.current_state = tr.next_state;
  }
  return tr;
}

namespace {

// Re-solves Q* only when the drift weight moves.
class OptimalCache {
 public:
  OptimalCache(const SoftMdpSequence& seq, double tol) : seq_(seq), alt_(alternate_config(seq)), tol_(tol) {}

  const TabularMdp& mdp(std::size_t t) {
    const double w = drift_weight(seq_, t);
    if (!have_mdp_ || w != weight_) {
      mdp_ = mix_instance(seq_, alt_, w);
      weight_ = w;
      have_mdp_ = true;
      solved_ = false;
    }
    return mdp_;
  }

  const QTable& q_star(std::size_t t) {
    mdp(t);
    if (!solved_) {
      q_ = solve_soft_q(mdp_, tol_, have_q_ ? &q_ : nullptr);
      optimal_return_ = soft_return(mdp_, soft_policy(q_, mdp_.mu));
      solved_ = have_q_ = true;
    }
    return q_;
  }

  double optimal_return(std::size_t t) {
    q_star(t);
    return optimal_return_;
  }

 private:
  const SoftMdpSequence& seq_;
  AlternateConfig alt_;
  double tol_;
  TabularMdp mdp_;
  double weight_ = 0.0;
  bool have_mdp_ = false;
  QTable q_;
  bool have_q_ = false;
  bool solved_ = false;
  double optimal_return_ = 0.0;
};

}  // namespace

RunTrace td_train(const SoftMdpSequence& seq, const ScheduleConfig& cfg, const TdOptions& opts,
                  std::uint64_t seed) {
  validate_sequence(seq);
  if (opts.batch_size == 0 || opts.eval_every == 0 || opts.episode_len == 0)
    throw Error(ErrorCode::InvalidSchedule, "batch_size, eval_every and episode_len must be positive");
  if (cfg.mode == ScheduleMode::Offline)
    throw Error(ErrorCode::InvalidSchedule, "offline mode needs the full drift total; not available for TD");
  ScheduleProvider schedule(cfg);
  OptimalCache env(seq, opts.solver_tol);

  TdLearnerState st = td_init(seq.base, seed, opts.learn_rate, opts.episode_len);
  double alpha = cfg.mode == ScheduleMode::Fixed ? cfg.fixed_value : cfg.lambda_min;
  double last_proxy = kNaN;
  std::vector<double> batch;
  batch.reserve(opts.batch_size);

  RunTrace trace;
  trace.dim = seq.base.n_actions;
  trace.pattern = pattern_name(seq.pattern);
  trace.seed = static_cast<std::int64_t>(seed);
  double regret_cum = 0.0;
  for (std::size_t t = 1; t <= seq.horizon; ++t) {
    const TabularMdp& mdp = env.mdp(t);
    const TdTransition tr = td_step(st, mdp, alpha);
    batch.push_back(std::abs(tr.td_error));
    bool emit = false;
    if (batch.size() == opts.batch_size) {
      last_proxy = td_quantile_proxy(batch, cfg.quantile_q);
      alpha = schedule.next(last_proxy);
      st.proxy = schedule.proxy_state();
      batch.clear();
      emit = true;
    }
    TraceRow row;
    row.t = t;
    if (t % opts.eval_every == 0) {
      row.eval_return = soft_return(mdp, soft_policy(st.q, alpha));
      row.regret_rl_inc = env.optimal_return(t) - row.eval_return;
      regret_cum += row.regret_rl_inc;
      row.regret_inc = row.regret_rl_inc;
      row.regret_cum = regret_cum;
      emit = true;
    }
    if (!emit) continue;
    row.lambda = alpha;
    row.proxy = last_proxy;
    trace.rows.push_back(row);
  }
  return trace;
}

RunTrace run_planner(const SoftMdpSequence& seq, const ScheduleConfig& cfg, double eps,
                     double solver_tol) {
  validate_sequence(seq);
  cfg.validate();
  OptimalCache env(seq, solver_tol);
  PlannerState st = planner_init(seq.base, eps);
  RunTrace trace;
  trace.dim = seq.base.n_actions;
  trace.pattern = pattern_name(seq.pattern);
  double cum = 0.0;
  for (std::size_t t = 1; t <= seq.horizon; ++t) {
    const QTable& q = env.q_star(t);
    auto [next, rec] = planner_step(st, env.mdp(t), q, cfg, eps);
    st = std::move(next);
    TraceRow row;
    row.t = t;
    row.lambda = rec.lambda;
    row.eta = rec.eta;
    row.alpha = rec.policy_drift;
    row.proxy = rec.raw_proxy;
    row.regret_inc = rec.regret_rl_inc;
    cum += rec.regret_rl_inc;
    row.regret_cum = cum;
    row.eval_return = rec.played_return;
    row.regret_rl_inc = rec.regret_rl_inc;
    trace.rows.push_back(row);
  }
  return trace;
}

double rl_dynamic_regret(const RunTrace& trace, std::span<const TabularMdp> seq, double tol) {
  double total = 0.0;
  std::size_t used = 0;
  const TabularMdp* cached = nullptr;
  double cached_return = 0.0;
  for (const auto& r : trace.rows) {
    if (std::isnan(r.eval_return)) continue;
    if (r.t < 1 || r.t > seq.size())
      throw Error(ErrorCode::AlignmentError, "trace step " + std::to_string(r.t) + " outside the sequence");
    const TabularMdp& m = seq[r.t - 1];
    const bool same = cached && cached->rewards == m.rewards && cached->transitions == m.transitions;
    if (!same) {
      cached_return = soft_return(m, soft_policy(solve_soft_q(m, tol), m.mu));
      cached = &m;
    }
    total += cached_return - r.eval_return;
    ++used;
  }
  if (used == 0) throw Error(ErrorCode::AlignmentError, "trace carries no evaluation returns");
  return total;
}

}  // namespace aes
