#include "aes/softmdp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "aes/error.hpp"

namespace aes {

namespace {

void require_shape(const TabularMdp& mdp, const QTable& q) {
  if (static_cast<std::size_t>(q.rows()) != mdp.n_states ||
      static_cast<std::size_t>(q.cols()) != mdp.n_actions)
    throw Error(ErrorCode::ShapeMismatch, "Q-table shape differs from the MDP");
}

void require_policy(const TabularMdp& mdp, const Policy& pi) {
  if (pi.size() != mdp.n_states) throw Error(ErrorCode::ShapeMismatch, "policy has wrong state count");
  for (const auto& row : pi)
    if (row.size() != mdp.n_actions)
      throw Error(ErrorCode::ShapeMismatch, "policy row has wrong action count");
}

std::size_t iteration_cap(double gamma, double tol, double scale) {
  scale = std::max(scale, 1e-300);
  const double target = tol * (1.0 - gamma) / (2.0 * scale);
  const double base = target >= 1.0 ? 0.0 : std::ceil(std::log(target) / std::log(gamma));
  // warm starts can sit up to twice as far from the fixed point as the zero table
  const double margin = std::ceil(std::log(2.0) / -std::log(gamma)) + 10.0;
  return static_cast<std::size_t>(base + margin);
}

double xlogx(double v) { return v > 0.0 ? v * std::log(v) : 0.0; }

}  // namespace

void TabularMdp::validate() const {
  auto bad = [](const std::string& m) { throw Error(ErrorCode::InvalidMdp, m); };
  if (n_states == 0 || n_actions == 0) bad("empty state or action set");
  if (static_cast<std::size_t>(rewards.rows()) != n_states ||
      static_cast<std::size_t>(rewards.cols()) != n_actions)
    bad("reward matrix shape");
  if (transitions.size() != n_states * n_actions * n_states) bad("transition tensor size");
  if (!(gamma > 0.0 && gamma < 1.0)) bad("gamma must lie in (0, 1)");
  if (!(mu > 0.0)) bad("mu must be positive");
  if (rho.size() != n_states) bad("rho has wrong length");
  for (Eigen::Index i = 0; i < rewards.size(); ++i)
    if (!(std::abs(rewards.data()[i]) <= r_max * (1.0 + 1e-12))) bad("reward exceeds r_max");
  for (std::size_t s = 0; s < n_states; ++s)
    for (std::size_t a = 0; a < n_actions; ++a) {
      double sum = 0.0;
      for (double p : row(s, a)) {
        if (!(p >= 0.0)) bad("negative transition probability");
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-10) bad("transition row does not sum to 1");
    }
}

TabularMdp random_mdp(std::size_t n_states, std::size_t n_actions, double gamma, double mu,
                      double r_max, std::mt19937_64& rng) {
  TabularMdp m;
  m.n_states = n_states;
  m.n_actions = n_actions;
  m.gamma = gamma;
  m.mu = mu;
  m.r_max = r_max;
  std::uniform_real_distribution<double> unif(-r_max, r_max);
  m.rewards.resize(static_cast<Eigen::Index>(n_states), static_cast<Eigen::Index>(n_actions));
  for (std::size_t s = 0; s < n_states; ++s)
    for (std::size_t a = 0; a < n_actions; ++a)
      m.rewards(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(a)) = unif(rng);
  m.transitions.reserve(n_states * n_actions * n_states);
  for (std::size_t i = 0; i < n_states * n_actions; ++i) {
    const auto row = sample_dirichlet(n_states, 1.0, rng);
    m.transitions.insert(m.transitions.end(), row.probs().begin(), row.probs().end());
  }
  m.rho = SimplexVec::uniform(n_states);
  return m;
}

double q_max_bound(const TabularMdp& mdp) {
  return (mdp.r_max + mdp.gamma * mdp.mu * std::log(static_cast<double>(mdp.n_actions))) /
         (1.0 - mdp.gamma);
}

double v_max_bound(const TabularMdp& mdp) {
  return (mdp.r_max + mdp.mu * std::log(static_cast<double>(mdp.n_actions))) / (1.0 - mdp.gamma);
}

Eigen::VectorXd soft_state_values(const QTable& q, double mu) {
  Eigen::VectorXd v(q.rows());
  std::vector<double> buf(static_cast<std::size_t>(q.cols()));
  for (Eigen::Index s = 0; s < q.rows(); ++s) {
    for (Eigen::Index a = 0; a < q.cols(); ++a) buf[static_cast<std::size_t>(a)] = q(s, a);
    v(s) = log_sum_exp(buf, mu);
  }
  return v;
}

namespace {

QTable backup(const TabularMdp& mdp, const Eigen::VectorXd& next_v) {
  QTable out(mdp.rewards.rows(), mdp.rewards.cols());
  for (std::size_t s = 0; s < mdp.n_states; ++s)
    for (std::size_t a = 0; a < mdp.n_actions; ++a) {
      const auto p = mdp.row(s, a);
      double ev = 0.0;
      for (std::size_t s2 = 0; s2 < mdp.n_states; ++s2) ev += p[s2] * next_v(static_cast<Eigen::Index>(s2));
      const auto si = static_cast<Eigen::Index>(s);
      const auto ai = static_cast<Eigen::Index>(a);
      out(si, ai) = mdp.rewards(si, ai) + mdp.gamma * ev;
    }
  return out;
}

}  // namespace

QTable soft_bellman_apply(const TabularMdp& mdp, const QTable& q) {
  require_shape(mdp, q);
  return backup(mdp, soft_state_values(q, mdp.mu));
}

QTable solve_soft_q(const TabularMdp& mdp, double tol, const QTable* warm) {
  if (!(tol > 0.0)) throw Error(ErrorCode::NoConvergence, "tolerance must be positive");
  QTable q = warm ? *warm : QTable::Zero(mdp.rewards.rows(), mdp.rewards.cols());
  require_shape(mdp, q);
  const std::size_t cap = iteration_cap(mdp.gamma, tol, q_max_bound(mdp));
  const double stop = tol * (1.0 - mdp.gamma);
  for (std::size_t k = 0; k < cap; ++k) {
    QTable next = soft_bellman_apply(mdp, q);
    const double diff = (next - q).cwiseAbs().maxCoeff();
    q = std::move(next);
    if (diff <= stop) return q;
  }
  throw Error(ErrorCode::NoConvergence, "soft value iteration hit " + std::to_string(cap) + " iterations");
}

Policy soft_policy(const QTable& q, double mu) {
  if (!(mu > 0.0)) throw Error(ErrorCode::NonPositiveTemperature, "mu must be positive");
  Policy pi;
  pi.reserve(static_cast<std::size_t>(q.rows()));
  std::vector<double> buf(static_cast<std::size_t>(q.cols()));
  for (Eigen::Index s = 0; s < q.rows(); ++s) {
    for (Eigen::Index a = 0; a < q.cols(); ++a) buf[static_cast<std::size_t>(a)] = q(s, a);
    pi.push_back(softmax(buf, mu));
  }
  return pi;
}

PolicyValues policy_eval(const TabularMdp& mdp, const Policy& pi, double tol) {
  require_policy(mdp, pi);
  if (!(tol > 0.0)) throw Error(ErrorCode::NoConvergence, "tolerance must be positive");
  const auto S = static_cast<Eigen::Index>(mdp.n_states);
  // per-state expected reward plus entropy bonus under pi
  Eigen::VectorXd bonus(S);
  for (Eigen::Index s = 0; s < S; ++s) {
    double b = 0.0;
    for (std::size_t a = 0; a < mdp.n_actions; ++a) {
      const double p = pi[static_cast<std::size_t>(s)][a];
      b += p * mdp.rewards(s, static_cast<Eigen::Index>(a)) - mdp.mu * xlogx(p);
    }
    bonus(s) = b;
  }
  Eigen::VectorXd v = Eigen::VectorXd::Zero(S);
  const std::size_t cap = iteration_cap(mdp.gamma, tol, v_max_bound(mdp));
  const double stop = tol * (1.0 - mdp.gamma);
  for (std::size_t k = 0;; ++k) {
    if (k >= cap) throw Error(ErrorCode::NoConvergence, "policy evaluation did not converge");
    Eigen::VectorXd next = bonus;
    for (Eigen::Index s = 0; s < S; ++s) {
      double ev = 0.0;
      for (std::size_t a = 0; a < mdp.n_actions; ++a) {
        const double p = pi[static_cast<std::size_t>(s)][a];
        if (p == 0.0) continue;
        const auto row = mdp.row(static_cast<std::size_t>(s), a);
        double e = 0.0;
        for (Eigen::Index s2 = 0; s2 < S; ++s2) e += row[static_cast<std::size_t>(s2)] * v(s2);
        ev += p * e;
      }
      next(s) += mdp.gamma * ev;
    }
    const double diff = (next - v).cwiseAbs().maxCoeff();
    v = std::move(next);
    if (diff <= stop) break;
  }
  return {backup(mdp, v), v};
}

SimplexVec occupancy(const TabularMdp& mdp, const Policy& pi) {
  require_policy(mdp, pi);
  const auto S = static_cast<Eigen::Index>(mdp.n_states);
  Eigen::MatrixXd p_pi = Eigen::MatrixXd::Zero(S, S);
  for (Eigen::Index s = 0; s < S; ++s)
    for (std::size_t a = 0; a < mdp.n_actions; ++a) {
      const double w = pi[static_cast<std::size_t>(s)][a];
      const auto row = mdp.row(static_cast<std::size_t>(s), a);
      for (Eigen::Index s2 = 0; s2 < S; ++s2) p_pi(s, s2) += w * row[static_cast<std::size_t>(s2)];
    }
  const Eigen::MatrixXd system =
      Eigen::MatrixXd::Identity(S, S) - mdp.gamma * p_pi.transpose();
  Eigen::VectorXd rhs(S);
  for (Eigen::Index s = 0; s < S; ++s) rhs(s) = (1.0 - mdp.gamma) * mdp.rho[static_cast<std::size_t>(s)];
  const Eigen::VectorXd d = system.partialPivLu().solve(rhs);
  std::vector<double> out(static_cast<std::size_t>(S));
  for (Eigen::Index s = 0; s < S; ++s) {
    if (!std::isfinite(d(s)) || d(s) < -1e-12)
      throw Error(ErrorCode::SingularSystem, "occupancy solve produced an invalid entry");
    out[static_cast<std::size_t>(s)] = std::max(d(s), 0.0);
  }
  double sum = 0.0;
  for (double v : out) sum += v;
  if (std::abs(sum - 1.0) > 1e-8) throw Error(ErrorCode::SingularSystem, "occupancy does not sum to 1");
  return SimplexVec(std::move(out));
}

double soft_return(const TabularMdp& mdp, const Policy& pi) {
  const SimplexVec d = occupancy(mdp, pi);
  double total = 0.0;
  for (std::size_t s = 0; s < mdp.n_states; ++s) {
    double inner = 0.0;
    for (std::size_t a = 0; a < mdp.n_actions; ++a) {
      const double p = pi[s][a];
      inner += p * mdp.rewards(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(a)) -
               mdp.mu * xlogx(p);
    }
    total += d[s] * inner;
  }
  return total / (1.0 - mdp.gamma);
}

const char* pattern_name(DriftPattern p) {
  switch (p) {
    case DriftPattern::Steady: return "steady";
    case DriftPattern::Abrupt: return "abrupt";
    case DriftPattern::Linear: return "linear";
    case DriftPattern::Periodic: return "periodic";
    case DriftPattern::Mixed: return "mixed";
  }
  return "unknown";
}

std::optional<DriftPattern> parse_pattern(const std::string& name) {
  std::string lower;
  for (char ch : name) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  for (auto p : {DriftPattern::Steady, DriftPattern::Abrupt, DriftPattern::Linear,
                 DriftPattern::Periodic, DriftPattern::Mixed})
    if (lower == pattern_name(p)) return p;
  return std::nullopt;
}

namespace {

double switch_state(const std::vector<std::size_t>& changes, std::size_t t) {
  std::size_t n = 0;
  for (std::size_t c : changes)
    if (c <= t) ++n;
  return (n % 2 == 1) ? 1.0 : 0.0;
}

double periodic_wave(const DriftSpec& d, std::size_t t) {
  return 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(t - 1) / d.period));
}

}  // namespace

double drift_weight(const SoftMdpSequence& spec, std::size_t t) {
  const auto& d = spec.drift;
  switch (spec.pattern) {
    case DriftPattern::Steady:
      return 0.0;
    case DriftPattern::Abrupt:
      return d.magnitude * switch_state(d.change_times, t);
    case DriftPattern::Linear:
      return spec.horizon <= 1 ? 0.0
                               : d.magnitude * static_cast<double>(t - 1) /
                                     static_cast<double>(spec.horizon - 1);
    case DriftPattern::Periodic:
      return d.amplitude * periodic_wave(d, t);
    case DriftPattern::Mixed:
      return d.magnitude * switch_state(d.change_times, t) + d.amplitude * periodic_wave(d, t);
  }
  return 0.0;
}

void validate_sequence(const SoftMdpSequence& spec) {
  auto bad = [](const std::string& m) { throw Error(ErrorCode::InvalidSpec, m); };
  try {
    spec.base.validate();
  } catch (const Error& e) {
    bad(std::string("base MDP: ") + e.what());
  }
  const auto& d = spec.drift;
  if (spec.horizon == 0) bad("horizon must be positive");
  if (!(d.magnitude >= 0.0)) bad("magnitude must be nonnegative");
  if (!(d.amplitude >= 0.0)) bad("amplitude must be nonnegative");
  const bool abrupt = spec.pattern == DriftPattern::Abrupt || spec.pattern == DriftPattern::Mixed;
  const bool periodic = spec.pattern == DriftPattern::Periodic || spec.pattern == DriftPattern::Mixed;
  if (periodic && !(d.period > 0.0)) bad("period must be positive");
  if (abrupt) {
    for (std::size_t i = 0; i < d.change_times.size(); ++i) {
      const std::size_t c = d.change_times[i];
      if (c < 1 || c > spec.horizon) bad("change time " + std::to_string(c) + " outside [1, T]");
      if (i > 0 && c <= d.change_times[i - 1]) bad("change times must be strictly increasing");
    }
  }
  double peak = 0.0;
  switch (spec.pattern) {
    case DriftPattern::Steady: break;
    case DriftPattern::Abrupt: peak = d.change_times.empty() ? 0.0 : d.magnitude; break;
    case DriftPattern::Linear: peak = d.magnitude; break;
    case DriftPattern::Periodic: peak = d.amplitude; break;
    case DriftPattern::Mixed: peak = d.magnitude + d.amplitude; break;
  }
  if (peak > 1.0 + 1e-12)
    bad("drift weights exceed 1; rewards or rows would leave the admissible range");
}

AlternateConfig alternate_config(const SoftMdpSequence& spec) {
  // Cyclic action relabeling a -> a+1 of both rewards and kernel rows: a full switch yields an
  // isomorphic MDP (same optimal return, different optimal actions).
  const auto& b = spec.base;
  AlternateConfig alt;
  alt.rewards.resize(b.rewards.rows(), b.rewards.cols());
  const auto A = b.n_actions;
  for (std::size_t s = 0; s < b.n_states; ++s)
    for (std::size_t a = 0; a < A; ++a)
      alt.rewards(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(a)) =
          b.rewards(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>((a + 1) % A));
  alt.transitions.reserve(b.transitions.size());
  for (std::size_t s = 0; s < b.n_states; ++s)
    for (std::size_t a = 0; a < A; ++a) {
      const auto row = b.row(s, (a + 1) % A);
      alt.transitions.insert(alt.transitions.end(), row.begin(), row.end());
    }
  return alt;
}

TabularMdp mix_instance(const SoftMdpSequence& spec, const AlternateConfig& alt, double weight) {
  TabularMdp m = spec.base;
  if (weight == 0.0) return m;
  if (spec.drift.reward_drift) m.rewards = (1.0 - weight) * spec.base.rewards + weight * alt.rewards;
  if (spec.drift.transition_drift)
    for (std::size_t i = 0; i < m.transitions.size(); ++i)
      m.transitions[i] = (1.0 - weight) * spec.base.transitions[i] + weight * alt.transitions[i];
  return m;
}

TabularMdp instance_at(const SoftMdpSequence& spec, std::size_t t) {
  validate_sequence(spec);
  if (t < 1 || t > spec.horizon) throw Error(ErrorCode::InvalidSpec, "step outside [1, T]");
  return mix_instance(spec, alternate_config(spec), drift_weight(spec, t));
}

std::vector<TabularMdp> generate_sequence(const SoftMdpSequence& spec) {
  validate_sequence(spec);
  const AlternateConfig alt = alternate_config(spec);
  std::vector<TabularMdp> out;
  out.reserve(spec.horizon);
  for (std::size_t t = 1; t <= spec.horizon; ++t)
    out.push_back(mix_instance(spec, alt, drift_weight(spec, t)));
  return out;
}

VariationBudget variation_budget(std::span<const TabularMdp> seq) {
  if (seq.empty()) throw Error(ErrorCode::ShapeMismatch, "empty sequence");
  VariationBudget vb;
  vb.reward_delta.assign(seq.size(), 0.0);
  vb.transition_delta.assign(seq.size(), 0.0);
  const auto& first = seq.front();
  const double vmax = v_max_bound(first);
  for (std::size_t t = 1; t < seq.size(); ++t) {
    const auto& cur = seq[t];
    const auto& prev = seq[t - 1];
    if (cur.n_states != first.n_states || cur.n_actions != first.n_actions ||
        cur.transitions.size() != first.transitions.size())
      throw Error(ErrorCode::ShapeMismatch, "sequence changes shape at step " + std::to_string(t + 1));
    vb.reward_delta[t] = (cur.rewards - prev.rewards).cwiseAbs().maxCoeff();
    double worst = 0.0;
    for (std::size_t s = 0; s < cur.n_states; ++s)
      for (std::size_t a = 0; a < cur.n_actions; ++a)
        worst = std::max(worst, l1_distance(cur.row(s, a), prev.row(s, a)));
    vb.transition_delta[t] = worst;
    vb.budget += vb.reward_delta[t] + cur.gamma * vmax * worst;
  }
  return vb;
}

}  // namespace aes
