#include "aes/verify.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>

#include "aes/omd.hpp"
#include "aes/scheduler.hpp"
#include "aes/simplex.hpp"
#include "aes/softmdp.hpp"

namespace aes {
namespace {

using Rng = std::mt19937_64;
using json = nlohmann::json;

constexpr double kIneqTol = 1e-8;

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double unif(Rng& r, double a, double b) { return std::uniform_real_distribution<double>(a, b)(r); }
double log_unif(Rng& r, double a, double b) { return std::exp(unif(r, std::log(a), std::log(b))); }
std::size_t pick(Rng& r, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(r);
}

SimplexVec interior(Rng& r, std::size_t k) { return truncate(sample_dirichlet(k, 1.0, r), 1e-9); }

std::vector<double> uniform_vec(Rng& r, std::size_t k, double a, double b) {
  std::vector<double> v(k);
  for (auto& x : v) x = unif(r, a, b);
  return v;
}

double sup_norm(const Eigen::MatrixXd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double xlogx(double p) { return p > 0.0 ? p * std::log(p) : 0.0; }

// ---- MDP samples are rebuilt from (dims, seed) so the worst case is replayable.

struct MdpSample {
  std::uint64_t seed = 0;
  std::size_t S = 0, A = 0;
  double gamma = 0.0, mu = 0.0;
  TabularMdp mdp;
};

MdpSample draw_mdp(Rng& r, std::size_t s_lo, std::size_t s_hi, std::size_t a_lo, std::size_t a_hi,
                   double g_hi = 0.95) {
  MdpSample m;
  m.seed = r();
  m.S = pick(r, s_lo, s_hi);
  m.A = pick(r, a_lo, a_hi);
  m.gamma = unif(r, 0.5, g_hi);
  m.mu = log_unif(r, 0.05, 1.0);
  Rng inner(m.seed);
  m.mdp = random_mdp(m.S, m.A, m.gamma, m.mu, 1.0, inner);
  m.mdp.rho = sample_dirichlet(m.S, 1.0, inner);
  return m;
}

json mdp_json(const MdpSample& m) {
  return {{"mdp_seed", m.seed}, {"states", m.S}, {"actions", m.A}, {"gamma", m.gamma}, {"mu", m.mu}};
}

Policy random_policy(Rng& r, std::size_t S, std::size_t A) {
  Policy pi;
  for (std::size_t s = 0; s < S; ++s) pi.push_back(interior(r, A));
  return pi;
}

// Consecutive pair from the drift generator: step 1 is the base, step 2 is after a change.
struct MdpPair {
  MdpSample base;
  double weight = 0.0;
  bool reward_drift = true, transition_drift = true;
  TabularMdp next;
};

MdpPair draw_pair(Rng& r) {
  MdpPair p;
  p.base = draw_mdp(r, 2, 6, 2, 4);
  p.weight = unif(r, 0.0, 1.0);
  const int flags = static_cast<int>(pick(r, 1, 3));
  p.reward_drift = flags & 1;
  p.transition_drift = flags & 2;
  SoftMdpSequence seq;
  seq.base = p.base.mdp;
  seq.pattern = DriftPattern::Abrupt;
  seq.horizon = 2;
  seq.drift.change_times = {2};
  seq.drift.magnitude = p.weight;
  seq.drift.reward_drift = p.reward_drift;
  seq.drift.transition_drift = p.transition_drift;
  seq.seed = p.base.seed;
  const auto both = generate_sequence(seq);
  p.next = both[1];
  return p;
}

json pair_json(const MdpPair& p) {
  json j = mdp_json(p.base);
  j["weight"] = p.weight;
  j["reward_drift"] = p.reward_drift;
  j["transition_drift"] = p.transition_drift;
  return j;
}

double reward_change(const TabularMdp& a, const TabularMdp& b) { return sup_norm(b.rewards - a.rewards); }
double kernel_change(const TabularMdp& a, const TabularMdp& b) {
  double w = 0.0;
  for (std::size_t s = 0; s < a.n_states; ++s)
    for (std::size_t x = 0; x < a.n_actions; ++x) w = std::max(w, l1_distance(a.row(s, x), b.row(s, x)));
  return w;
}

QTable random_q(Rng& r, const TabularMdp& m) {
  const double qm = q_max_bound(m);
  QTable q(m.n_states, m.n_actions);
  for (Eigen::Index i = 0; i < q.size(); ++i) q(i) = unif(r, -qm, qm);
  return q;
}

std::vector<double> row_of(const QTable& q, std::size_t s) {
  std::vector<double> v(static_cast<std::size_t>(q.cols()));
  for (Eigen::Index a = 0; a < q.cols(); ++a) v[static_cast<std::size_t>(a)] = q(static_cast<Eigen::Index>(s), a);
  return v;
}

double max_policy_l1(const Policy& a, const Policy& b) {
  double m = 0.0;
  for (std::size_t s = 0; s < a.size(); ++s) m = std::max(m, l1_distance(a[s], b[s]));
  return m;
}

// f_s(p) = -<q_s, p> + mu sum p log p
double surrogate(std::span<const double> q, const SimplexVec& p, double mu) {
  double v = 0.0;
  for (std::size_t a = 0; a < p.size(); ++a) v += -q[a] * p[a] + mu * xlogx(p[a]);
  return v;
}

constexpr double kSolveTol = 1e-11;

// ---- OCO streams with piecewise-constant comparators.

struct OcoStream {
  std::uint64_t seed = 0;
  std::size_t K = 0;
  std::size_t T = 0;
  double c = 0.0;
  std::vector<std::size_t> switches;
  std::vector<LinearLoss> losses;
  std::vector<SimplexVec> comparators;
};

constexpr double kStreamEps = 1e-6;
constexpr double kLambdaMin = 0.05;
constexpr double kLambdaMax = 1.0;

OcoStream draw_stream(Rng& r, std::size_t horizon) {
  OcoStream st;
  st.seed = r();
  st.K = pick(r, 2, 16);
  st.T = horizon;
  st.c = log_unif(r, 0.003, 0.3);
  Rng in(st.seed);
  const std::size_t n_switch = pick(in, 0, 8);
  for (std::size_t i = 0; i < n_switch; ++i) st.switches.push_back(pick(in, 2, horizon));
  std::sort(st.switches.begin(), st.switches.end());
  st.switches.erase(std::unique(st.switches.begin(), st.switches.end()), st.switches.end());

  auto fresh = [&] {
    if (std::bernoulli_distribution(0.5)(in))
      return truncate(SimplexVec::vertex(st.K, pick(in, 0, st.K - 1)), kStreamEps);
    return truncate(sample_dirichlet(st.K, 0.5, in), kStreamEps);
  };
  SimplexVec u = fresh();
  std::size_t next_switch = 0;
  for (std::size_t t = 1; t <= horizon; ++t) {
    if (next_switch < st.switches.size() && st.switches[next_switch] == t) {
      u = fresh();
      ++next_switch;
    }
    const auto best = static_cast<std::size_t>(
        std::max_element(u.probs().begin(), u.probs().end()) - u.probs().begin());
    LinearLoss loss;
    loss.grad = uniform_vec(in, st.K, 0.0, 1.0);
    loss.grad[best] *= 0.25;
    st.losses.push_back(std::move(loss));
    st.comparators.push_back(u);
  }
  return st;
}

json stream_json(const OcoStream& s) {
  return {{"stream_seed", s.seed}, {"K", s.K}, {"T", s.T}, {"c", s.c}, {"switches", s.switches}};
}

ScheduleConfig stream_schedule(const ExplicitConstants& k, ScheduleMode mode) {
  ScheduleConfig cfg;
  cfg.C1 = k.C1;
  cfg.C2 = k.C2;
  cfg.c = k.c;
  cfg.lambda_min = kLambdaMin;
  cfg.lambda_max = kLambdaMax;
  cfg.ema_beta = 0.0;  // proxy equals the true drift
  cfg.mode = mode;
  return cfg;
}

ExplicitConstants stream_constants(const OcoStream& s) {
  return explicit_constants(s.K, 1.0, kStreamEps, s.c, kLambdaMin, kLambdaMax);
}

struct StreamRun {
  OcoStream stream;
  ExplicitConstants k;
  RunTrace trace;
  double regret = 0.0;
  double drift_sum = 0.0;  // sum of the proxy = A_T
};

StreamRun run_stream(Rng& r, std::size_t horizon, ScheduleMode mode) {
  StreamRun run;
  run.stream = draw_stream(r, horizon);
  run.k = stream_constants(run.stream);
  ScheduleProvider sched(stream_schedule(run.k, mode));
  run.trace = run_dynamic(run.stream.losses, run.stream.comparators, sched, kStreamEps,
                          SimplexVec::uniform(run.stream.K));
  run.regret = run.trace.rows.back().regret_cum;
  for (const auto& row : run.trace.rows) run.drift_sum += row.proxy;
  return run;
}

// ---- drift-proxy sequences for the square-root summation checks.

struct ProxySeq {
  std::vector<double> a;
};

ProxySeq draw_proxy_seq(Rng& r) {
  ProxySeq p;
  const std::size_t T = pick(r, 1, 500);
  const std::size_t lead_zeros = pick(r, 0, T / 2);
  const double p_zero = unif(r, 0.0, 0.9);
  for (std::size_t t = 0; t < T; ++t) {
    if (t < lead_zeros || std::bernoulli_distribution(p_zero)(r))
      p.a.push_back(0.0);
    else
      p.a.push_back(log_unif(r, 1e-4, 2.0));
  }
  return p;
}

std::string dump(const json& j) { return j.dump(); }

std::string proxy_json(const ProxySeq& p) { return dump({{"proxy", p.a}}); }

}  // namespace

// ============================================================ identities

std::vector<CheckReport> identity_checks(std::uint64_t seed) {
  std::vector<CheckReport> out;
  std::uint64_t salt = 0;
  auto next_seed = [&] { return mix_seed(seed, 100 + salt++); };

  {
    struct Pt { SimplexVec x, y; };
    out.push_back(check_identity(
        "bregman_equals_kl",
        [](const Pt& p) { return bregman_neg_entropy(p.x, p.y); },
        [](const Pt& p) { return kl_div(p.x, p.y); },
        [](Rng& r) { const auto k = pick(r, 2, 10); return Pt{interior(r, k), interior(r, k)}; },
        1000, 1e-10, next_seed(),
        [](const Pt& p) { return dump({{"x", p.x.probs()}, {"y", p.y.probs()}}); }));
  }
  {
    struct Pt { std::vector<double> q; double mu; SimplexVec pi; };
    out.push_back(check_identity(
        "fenchel_young_gap",
        [](const Pt& p) {
          const SimplexVec star = softmax(p.q, p.mu);
          return surrogate(p.q, p.pi, p.mu) - surrogate(p.q, star, p.mu);
        },
        [](const Pt& p) { return p.mu * kl_div(p.pi, softmax(p.q, p.mu)); },
        [](Rng& r) {
          const auto k = pick(r, 2, 10);
          Pt p{uniform_vec(r, k, -5.0, 5.0), unif(r, 0.1, 2.0), SimplexVec{}};
          p.pi = interior(r, k);
          return p;
        },
        1000, 1e-10, next_seed(),
        [](const Pt& p) { return dump({{"q", p.q}, {"mu", p.mu}, {"pi", p.pi.probs()}}); }));
  }
  {
    struct Pt { MdpSample m; std::uint64_t policy_seed; Policy pi, pi2; };
    auto sampler = [](Rng& r) {
      Pt p{draw_mdp(r, 4, 4, 3, 3), r(), {}, {}};
      Rng in(p.policy_seed);
      p.pi = random_policy(in, 4, 3);
      p.pi2 = random_policy(in, 4, 3);
      return p;
    };
    out.push_back(check_identity(
        "soft_performance_difference",
        [](const Pt& p) { return soft_return(p.m.mdp, p.pi2) - soft_return(p.m.mdp, p.pi); },
        [](const Pt& p) {
          const auto& mdp = p.m.mdp;
          const auto ev = policy_eval(mdp, p.pi, 1e-12);
          const SimplexVec d2 = occupancy(mdp, p.pi2);
          double total = 0.0;
          for (std::size_t s = 0; s < mdp.n_states; ++s) {
            double inner = -ev.v(static_cast<Eigen::Index>(s));
            for (std::size_t a = 0; a < mdp.n_actions; ++a) {
              const double w = p.pi2[s][a];
              inner += w * ev.q(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(a)) -
                       mdp.mu * xlogx(w);
            }
            total += d2[s] * inner;
          }
          return total / (1.0 - mdp.gamma);
        },
        sampler, 200, 1e-7, next_seed(),
        [](const Pt& p) {
          json j = mdp_json(p.m);
          j["policy_seed"] = p.policy_seed;
          return dump(j);
        }));
  }
  {
    struct Pt { MdpSample m; std::uint64_t policy_seed; Policy pi; };
    auto sampler = [](Rng& r) {
      Pt p{draw_mdp(r, 2, 6, 2, 4), r(), {}};
      Rng in(p.policy_seed);
      p.pi = random_policy(in, p.m.S, p.m.A);
      return p;
    };
    auto describe = [](const Pt& p) {
      json j = mdp_json(p.m);
      j["policy_seed"] = p.policy_seed;
      return dump(j);
    };
    // J* - J(pi) against mu/(1-gamma) E_{d^pi} KL(pi || pi*)
    out.push_back(check_identity(
        "soft_suboptimality",
        [](const Pt& p) {
          const auto& mdp = p.m.mdp;
          const auto vstar = soft_state_values(solve_soft_q(mdp, 1e-12), mdp.mu);
          double jstar = 0.0;
          for (std::size_t s = 0; s < mdp.n_states; ++s) jstar += mdp.rho[s] * vstar(static_cast<Eigen::Index>(s));
          return jstar - soft_return(mdp, p.pi);
        },
        [](const Pt& p) {
          const auto& mdp = p.m.mdp;
          const Policy star = soft_policy(solve_soft_q(mdp, 1e-12), mdp.mu);
          const SimplexVec d = occupancy(mdp, p.pi);
          double e = 0.0;
          for (std::size_t s = 0; s < mdp.n_states; ++s) e += d[s] * kl_div(p.pi[s], star[s]);
          return mdp.mu * e / (1.0 - mdp.gamma);
        },
        sampler, 200, 1e-8, next_seed(), describe));
    // planning objective under the optimal occupancy, J~(pi*) - J~(pi)
    out.push_back(check_identity(
        "planning_main_term",
        [](const Pt& p) {
          const auto& mdp = p.m.mdp;
          const QTable qs = solve_soft_q(mdp, 1e-12);
          const Policy star = soft_policy(qs, mdp.mu);
          const SimplexVec d = occupancy(mdp, star);
          auto planned = [&](const Policy& pi) {
            double total = 0.0;
            for (std::size_t s = 0; s < mdp.n_states; ++s) {
              double inner = 0.0;
              for (std::size_t a = 0; a < mdp.n_actions; ++a)
                inner += pi[s][a] * qs(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(a)) -
                         mdp.mu * xlogx(pi[s][a]);
              total += d[s] * inner;
            }
            return total / (1.0 - mdp.gamma);
          };
          return planned(star) - planned(p.pi);
        },
        [](const Pt& p) {
          const auto& mdp = p.m.mdp;
          const Policy star = soft_policy(solve_soft_q(mdp, 1e-12), mdp.mu);
          const SimplexVec d = occupancy(mdp, star);
          double e = 0.0;
          for (std::size_t s = 0; s < mdp.n_states; ++s) e += d[s] * kl_div(p.pi[s], star[s]);
          return mdp.mu * e / (1.0 - mdp.gamma);
        },
        sampler, 200, 1e-8, next_seed(), describe));
  }
  {
    // exponentiated-gradient step satisfies the prox first-order condition
    struct Pt { SimplexVec x; std::vector<double> g; double eta; };
    out.push_back(check_identity(
        "mirror_step_optimality",
        [](const Pt& p) {
          const auto nx = md_step(OmdState{p.x, 0.0, 0}, p.g, p.eta, 0.0).x;
          double lo = INFINITY, hi = -INFINITY;
          for (std::size_t i = 0; i < p.x.size(); ++i) {
            const double v = p.eta * p.g[i] + std::log(nx[i]) - std::log(p.x[i]);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
          }
          return hi - lo;
        },
        [](const Pt&) { return 0.0; },
        [](Rng& r) {
          const auto k = pick(r, 2, 10);
          const double G = log_unif(r, 0.1, 10.0);
          return Pt{interior(r, k), uniform_vec(r, k, -G, G), log_unif(r, 1e-3, 10.0)};
        },
        1000, 1e-10, next_seed(),
        [](const Pt& p) { return dump({{"x", p.x.probs()}, {"g", p.g}, {"eta", p.eta}}); }));
  }
  return out;
}

// ============================================================ inequalities

std::vector<CheckReport> inequality_checks(std::uint64_t seed) {
  std::vector<CheckReport> out;
  std::uint64_t salt = 0;
  auto next_seed = [&] { return mix_seed(seed, 200 + salt++); };
  const std::size_t n = 1000;

  {
    struct Pt { SimplexVec x; double conc; };
    out.push_back(check_inequality(
        "entropy_range",
        [](const Pt& p) {
          const double h = neg_entropy(p.x);
          return std::max(h, -std::log(static_cast<double>(p.x.size())) - h);
        },
        [](const Pt&) { return 0.0; },
        [](Rng& r) {
          const auto k = pick(r, 1, 16);
          const double conc = log_unif(r, 0.01, 100.0);
          return Pt{sample_dirichlet(k, conc, r), conc};
        },
        n, 1e-12, next_seed(), [](const Pt& p) { return dump({{"x", p.x.probs()}}); }));
  }
  {
    struct Pt { SimplexVec x; double eps; };
    out.push_back(check_inequality(
        "mirror_gradient_bound",
        [](const Pt& p) {
          double m = 0.0;
          for (double v : p.x.probs()) m = std::max(m, std::abs(1.0 + std::log(v)));
          return m;
        },
        [](const Pt& p) { return entropy_grad_bound(p.eps); },
        [](Rng& r) {
          const auto k = pick(r, 2, 16);
          const double eps = log_unif(r, 1e-8, 1.0 / static_cast<double>(k));
          return Pt{truncate(sample_dirichlet(k, log_unif(r, 0.01, 10.0), r), eps), eps};
        },
        n, 1e-12, next_seed(),
        [](const Pt& p) { return dump({{"x", p.x.probs()}, {"eps", p.eps}}); }));
  }
  {
    struct Pt { SimplexVec x, y; };
    out.push_back(check_inequality(
        "pinsker_strong_convexity",
        [](const Pt& p) { const double d = l1_distance(p.x, p.y); return 0.5 * d * d; },
        [](const Pt& p) { return bregman_neg_entropy(p.x, p.y); },
        [](Rng& r) {
          const auto k = pick(r, 2, 10);
          const double conc = log_unif(r, 0.05, 5.0);
          return Pt{truncate(sample_dirichlet(k, conc, r), 1e-9), truncate(sample_dirichlet(k, conc, r), 1e-9)};
        },
        n, 1e-10, next_seed(),
        [](const Pt& p) { return dump({{"x", p.x.probs()}, {"y", p.y.probs()}}); }));
  }
  {
    struct Pt { std::vector<double> q, q2; double mu; };
    out.push_back(check_inequality(
        "log_sum_exp_lipschitz",
        [](const Pt& p) { return std::abs(log_sum_exp(p.q, p.mu) - log_sum_exp(p.q2, p.mu)); },
        [](const Pt& p) {
          double m = 0.0;
          for (std::size_t i = 0; i < p.q.size(); ++i) m = std::max(m, std::abs(p.q[i] - p.q2[i]));
          return m;
        },
        [](Rng& r) {
          const auto k = pick(r, 1, 10);
          const double scale = log_unif(r, 1e-3, 10.0);
          Pt p{uniform_vec(r, k, -10.0, 10.0), {}, log_unif(r, 0.01, 5.0)};
          p.q2 = p.q;
          for (auto& v : p.q2) v += unif(r, -scale, scale);
          return p;
        },
        n, 1e-10, next_seed(),
        [](const Pt& p) { return dump({{"q", p.q}, {"q2", p.q2}, {"mu", p.mu}}); }));
  }
  {
    struct Pt { MdpSample m; QTable q, q2; };
    out.push_back(check_inequality(
        "bellman_contraction",
        [](const Pt& p) {
          return sup_norm(soft_bellman_apply(p.m.mdp, p.q) - soft_bellman_apply(p.m.mdp, p.q2));
        },
        [](const Pt& p) { return p.m.gamma * sup_norm(p.q - p.q2); },
        [](Rng& r) {
          Pt p{draw_mdp(r, 2, 6, 2, 4), {}, {}};
          p.q = random_q(r, p.m.mdp);
          p.q2 = random_q(r, p.m.mdp);
          return p;
        },
        n, kIneqTol, next_seed(), [](const Pt& p) { return dump(mdp_json(p.m)); }));
  }
  {
    struct Pt { MdpPair pair; QTable q; };
    out.push_back(check_inequality(
        "operator_drift",
        [](const Pt& p) {
          return sup_norm(soft_bellman_apply(p.pair.next, p.q) - soft_bellman_apply(p.pair.base.mdp, p.q));
        },
        [](const Pt& p) {
          const auto& m = p.pair.base.mdp;
          const double vq = sup_norm(soft_state_values(p.q, m.mu));
          return reward_change(m, p.pair.next) + m.gamma * vq * kernel_change(m, p.pair.next);
        },
        [](Rng& r) {
          Pt p{draw_pair(r), {}};
          p.q = random_q(r, p.pair.base.mdp);
          return p;
        },
        n, kIneqTol, next_seed(), [](const Pt& p) { return dump(pair_json(p.pair)); }));
  }
  {
    // fixed points of consecutive instances
    struct Pt { MdpPair pair; QTable q_prev, q_next; };
    auto sampler = [](Rng& r) {
      Pt p{draw_pair(r), {}, {}};
      p.q_prev = solve_soft_q(p.pair.base.mdp, kSolveTol);
      p.q_next = solve_soft_q(p.pair.next, kSolveTol, &p.q_prev);
      return p;
    };
    auto describe = [](const Pt& p) { return dump(pair_json(p.pair)); };
    // each solve is within kSolveTol of its fixed point
    out.push_back(check_inequality(
        "fixed_point_sensitivity",
        [](const Pt& p) { return sup_norm(p.q_next - p.q_prev); },
        [](const Pt& p) {
          const auto& m = p.pair.base.mdp;
          const double v = sup_norm(soft_state_values(p.q_prev, m.mu));
          return (reward_change(m, p.pair.next) + m.gamma * v * kernel_change(m, p.pair.next)) /
                     (1.0 - m.gamma) +
                 4.0 * kSolveTol / (1.0 - m.gamma);
        },
        sampler, n, kIneqTol, next_seed(), describe));
    out.push_back(check_inequality(
        "value_uniform_bounds",
        [](const Pt& p) {
          const auto& m = p.pair.base.mdp;
          return std::max(sup_norm(p.q_prev) - q_max_bound(m),
                          sup_norm(soft_state_values(p.q_prev, m.mu)) - v_max_bound(m));
        },
        [](const Pt&) { return 0.0; }, sampler, n, kIneqTol, next_seed(), describe));
    out.push_back(check_inequality(
        "softmax_policy_drift",
        [](const Pt& p) {
          const double mu = p.pair.base.mdp.mu;
          return max_policy_l1(soft_policy(p.q_next, mu), soft_policy(p.q_prev, mu));
        },
        [](const Pt& p) { return sup_norm(p.q_next - p.q_prev) / p.pair.base.mdp.mu; },
        sampler, n, kIneqTol, next_seed(), describe));
  }
  {
    // sup over sign vectors of ||J h||_1, J = (diag(pi) - pi pi^T)/mu
    struct Pt { std::vector<double> q; double mu; };
    out.push_back(check_inequality(
        "softmax_jacobian_norm",
        [](const Pt& p) {
          const auto pi = softmax(p.q, p.mu);
          const std::size_t k = p.q.size();
          double best = 0.0;
          for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
            double mean = 0.0;
            std::vector<double> h(k);
            for (std::size_t i = 0; i < k; ++i) {
              h[i] = (mask >> i) & 1 ? 1.0 : -1.0;
              mean += pi[i] * h[i];
            }
            double norm = 0.0;
            for (std::size_t i = 0; i < k; ++i) norm += pi[i] * std::abs(h[i] - mean);
            best = std::max(best, norm / p.mu);
          }
          return best;
        },
        [](const Pt& p) { return 1.0 / p.mu; },
        [](Rng& r) {
          const auto k = pick(r, 2, 8);
          return Pt{uniform_vec(r, k, -3.0, 3.0), log_unif(r, 0.05, 5.0)};
        },
        n, 1e-10, next_seed(), [](const Pt& p) { return dump({{"q", p.q}, {"mu", p.mu}}); }));
  }
  {
    // K = 2 at uniform logits: central differences against 1/mu
    struct Pt { double level; double mu; };
    out.push_back(check_inequality(
        "softmax_jacobian_tightness",
        [](const Pt& p) { return 1.0 / p.mu - 1e-6; },
        [](const Pt& p) {
          const double h = 1e-5 * p.mu;
          double jac[2][2];
          for (int j = 0; j < 2; ++j) {
            std::vector<double> up{p.level, p.level}, dn{p.level, p.level};
            up[j] += h;
            dn[j] -= h;
            const auto a = softmax(up, p.mu), b = softmax(dn, p.mu);
            for (int i = 0; i < 2; ++i) jac[i][j] = (a[i] - b[i]) / (2.0 * h);
          }
          double best = 0.0;
          for (double s0 : {-1.0, 1.0})
            for (double s1 : {-1.0, 1.0})
              best = std::max(best, std::abs(jac[0][0] * s0 + jac[0][1] * s1) +
                                        std::abs(jac[1][0] * s0 + jac[1][1] * s1));
          return best;
        },
        [](Rng& r) { return Pt{unif(r, -5.0, 5.0), log_unif(r, 0.05, 5.0)}; }, n, 0.0,
        next_seed(), [](const Pt& p) { return dump({{"level", p.level}, {"mu", p.mu}}); }));
  }
  {
    out.push_back(check_inequality(
        "sqrt_potential_sum",
        [](const ProxySeq& p) {
          double prefix = 0.0, s = 0.0;
          for (double a : p.a) {
            prefix += a;
            if (prefix > 0.0) s += a / std::sqrt(prefix);
          }
          return s;
        },
        [](const ProxySeq& p) { return 2.0 * std::sqrt(std::accumulate(p.a.begin(), p.a.end(), 0.0)); },
        draw_proxy_seq, n, kIneqTol, next_seed(), proxy_json));
    out.push_back(check_inequality(
        "sqrt_average_sum",
        [](const ProxySeq& p) {
          double prefix = 0.0, s = 0.0;
          for (std::size_t t = 0; t < p.a.size(); ++t) {
            prefix += p.a[t];
            s += std::sqrt(prefix / static_cast<double>(t + 1));
          }
          return s;
        },
        [](const ProxySeq& p) {
          const double total = std::accumulate(p.a.begin(), p.a.end(), 0.0);
          return 2.0 * std::sqrt(static_cast<double>(p.a.size()) * total);
        },
        draw_proxy_seq, n, kIneqTol, next_seed(), proxy_json));
  }
  {
    // clipping a raw schedule costs at most C1 A_T / lmax + C2 T lmin
    struct Pt { ProxySeq seq; std::vector<double> raw; ScheduleConfig cfg; };
    auto cost = [](const Pt& p, bool clipped) {
      double s = 0.0;
      for (std::size_t t = 0; t < p.raw.size(); ++t) {
        const double lam = clipped ? clip_lambda(p.raw[t], p.cfg) : p.raw[t];
        s += p.cfg.C1 * p.seq.a[t] / lam + p.cfg.C2 * lam;
      }
      return s;
    };
    out.push_back(check_inequality(
        "clipping_compensation",
        [cost](const Pt& p) { return cost(p, true); },
        [cost](const Pt& p) {
          const double total = std::accumulate(p.seq.a.begin(), p.seq.a.end(), 0.0);
          return cost(p, false) + p.cfg.C1 * total / p.cfg.lambda_max +
                 p.cfg.C2 * static_cast<double>(p.raw.size()) * p.cfg.lambda_min;
        },
        [](Rng& r) {
          Pt p{draw_proxy_seq(r), {}, {}};
          p.cfg.C1 = log_unif(r, 0.1, 10.0);
          p.cfg.C2 = log_unif(r, 0.1, 10.0);
          p.cfg.lambda_min = log_unif(r, 1e-3, 0.1);
          p.cfg.lambda_max = log_unif(r, 0.2, 5.0);
          for (std::size_t t = 0; t < p.seq.a.size(); ++t)
            p.raw.push_back(log_unif(r, p.cfg.lambda_min / 10.0, 10.0 * p.cfg.lambda_max));
          return p;
        },
        n, kIneqTol, next_seed(), [](const Pt& p) {
          return dump({{"proxy", p.seq.a}, {"raw", p.raw}, {"C1", p.cfg.C1}, {"C2", p.cfg.C2},
                       {"lambda_min", p.cfg.lambda_min}, {"lambda_max", p.cfg.lambda_max}});
        }));
  }
  {
    // per-round oracle value 2 sqrt(C1 C2 alpha) is the minimum of C1 alpha / l + C2 l
    struct Pt { double alpha, lam; ScheduleConfig cfg; };
    auto phi = [](const Pt& p, double l) { return p.cfg.C1 * p.alpha / l + p.cfg.C2 * l; };
    out.push_back(check_inequality(
        "oracle_round_minimizer",
        [phi](const Pt& p) { return phi(p, oracle_lambda(p.alpha, p.cfg)); },
        [phi](const Pt& p) { return phi(p, p.lam); },
        [](Rng& r) {
          Pt p{log_unif(r, 1e-6, 2.0), log_unif(r, 1e-4, 10.0), {}};
          p.cfg.C1 = log_unif(r, 0.1, 10.0);
          p.cfg.C2 = log_unif(r, 0.1, 10.0);
          return p;
        },
        n, kIneqTol, next_seed(), [](const Pt& p) {
          return dump({{"alpha", p.alpha}, {"lambda", p.lam}, {"C1", p.cfg.C1}, {"C2", p.cfg.C2}});
        }));
  }
  {
    // squared drift of Q* is at most 2 Q_max times its drift, over generated sequences
    struct Pt { MdpSample m; DriftPattern pattern; std::size_t T; std::vector<double> drift; };
    out.push_back(check_inequality(
        "squared_drift_conversion",
        [](const Pt& p) {
          double s = 0.0;
          for (double d : p.drift) s += d * d;
          return s;
        },
        [](const Pt& p) {
          // solver error can add 2 tol to each recorded drift
          const double cq = 2.0 * (q_max_bound(p.m.mdp) + kSolveTol);
          return cq * std::accumulate(p.drift.begin(), p.drift.end(), 0.0);
        },
        [](Rng& r) {
          Pt p{draw_mdp(r, 2, 5, 2, 4, 0.9), DriftPattern::Steady, pick(r, 3, 10), {}};
          const DriftPattern all[] = {DriftPattern::Abrupt, DriftPattern::Linear,
                                      DriftPattern::Periodic, DriftPattern::Mixed};
          p.pattern = all[pick(r, 0, 3)];
          SoftMdpSequence seq;
          seq.base = p.m.mdp;
          seq.pattern = p.pattern;
          seq.horizon = p.T;
          seq.seed = p.m.seed;
          seq.drift.magnitude = unif(r, 0.0, 0.5);
          seq.drift.amplitude = unif(r, 0.0, 0.5);
          seq.drift.period = unif(r, 2.0, 6.0);
          seq.drift.transition_drift = std::bernoulli_distribution(0.5)(r);
          for (std::size_t t = 2; t <= p.T; ++t)
            if (std::bernoulli_distribution(0.3)(r)) seq.drift.change_times.push_back(t);
          const auto mdps = generate_sequence(seq);
          QTable prev = solve_soft_q(mdps[0], kSolveTol);
          for (std::size_t t = 1; t < mdps.size(); ++t) {
            QTable cur = solve_soft_q(mdps[t], kSolveTol, &prev);
            p.drift.push_back(sup_norm(cur - prev));
            prev = std::move(cur);
          }
          return p;
        },
        n, kIneqTol, next_seed(), [](const Pt& p) {
          json j = mdp_json(p.m);
          j["pattern"] = pattern_name(p.pattern);
          j["horizon"] = p.T;
          j["q_drift"] = p.drift;
          return dump(j);
        }));
  }
  {
    // policy-level quantities on one MDP
    struct Pt {
      MdpSample m;
      std::uint64_t policy_seed;
      Policy pi, pi2, star;
      QTable q_star;
      SimplexVec d_sub;
      bool on_policy;
    };
    auto sampler = [](Rng& r) {
      Pt p{draw_mdp(r, 2, 6, 2, 4), r(), {}, {}, {}, {}, {}, false};
      Rng in(p.policy_seed);
      p.pi = random_policy(in, p.m.S, p.m.A);
      p.pi2 = random_policy(in, p.m.S, p.m.A);
      p.q_star = solve_soft_q(p.m.mdp, kSolveTol);
      p.star = soft_policy(p.q_star, p.m.mu);
      p.on_policy = std::bernoulli_distribution(0.5)(in);
      p.d_sub = p.on_policy ? occupancy(p.m.mdp, p.pi) : sample_dirichlet(p.m.S, 1.0, in);
      return p;
    };
    auto describe = [](const Pt& p) {
      json j = mdp_json(p.m);
      j["policy_seed"] = p.policy_seed;
      j["on_policy"] = p.on_policy;
      return dump(j);
    };
    auto gap = [](const Pt& p, std::size_t s) {
      const auto q = row_of(p.q_star, s);
      return surrogate(q, p.pi[s], p.m.mu) - surrogate(q, p.star[s], p.m.mu);
    };
    out.push_back(check_inequality(
        "surrogate_gap_range",
        [gap](const Pt& p) {
          const double hi = 2.0 * q_max_bound(p.m.mdp) + p.m.mu * std::log(static_cast<double>(p.m.A));
          double worst = -INFINITY;
          for (std::size_t s = 0; s < p.m.S; ++s) {
            const double g = gap(p, s);
            worst = std::max({worst, -g, g - hi});
          }
          return worst;
        },
        [](const Pt&) { return 0.0; }, sampler, n, kIneqTol, next_seed(), describe));
    out.push_back(check_inequality(
        "occupancy_mismatch",
        [gap](const Pt& p) {
          const SimplexVec d_star = occupancy(p.m.mdp, p.star);
          double e = 0.0;
          for (std::size_t s = 0; s < p.m.S; ++s) e += (d_star[s] - p.d_sub[s]) * gap(p, s);
          return std::abs(e) / (1.0 - p.m.gamma);
        },
        [](const Pt& p) {
          const SimplexVec d_star = occupancy(p.m.mdp, p.star);
          const double width = 2.0 * q_max_bound(p.m.mdp) + p.m.mu * std::log(static_cast<double>(p.m.A));
          return width / (1.0 - p.m.gamma) * l1_distance(d_star, p.d_sub);
        },
        sampler, n, kIneqTol, next_seed(), describe));
    out.push_back(check_inequality(
        "occupancy_policy_lipschitz",
        [](const Pt& p) {
          const auto& mdp = p.m.mdp;
          const double lhs = l1_distance(occupancy(mdp, p.pi), occupancy(mdp, p.pi2));
          double kernel = 0.0;
          for (std::size_t s = 0; s < p.m.S; ++s) {
            std::vector<double> diff(p.m.S, 0.0);
            for (std::size_t a = 0; a < p.m.A; ++a) {
              const auto row = mdp.row(s, a);
              for (std::size_t s2 = 0; s2 < p.m.S; ++s2) diff[s2] += (p.pi[s][a] - p.pi2[s][a]) * row[s2];
            }
            double l1 = 0.0;
            for (double v : diff) l1 += std::abs(v);
            kernel = std::max(kernel, l1);
          }
          const double scale = p.m.gamma / (1.0 - p.m.gamma);
          // chain: lhs <= scale * kernel gap <= scale * ||pi - pi2||_{1,inf}
          return std::max(lhs - scale * kernel, scale * (kernel - max_policy_l1(p.pi, p.pi2)));
        },
        [](const Pt&) { return 0.0; }, sampler, n, kIneqTol, next_seed(), describe));
    out.push_back(check_inequality(
        "q_substitution_bias",
        [](const Pt& p) {
          const auto& mdp = p.m.mdp;
          const QTable q_pi = policy_eval(mdp, p.pi, kSolveTol).q;
          const SimplexVec d_star = occupancy(mdp, p.star);
          double played = 0.0, optimal = 0.0;
          for (std::size_t s = 0; s < p.m.S; ++s)
            for (std::size_t a = 0; a < p.m.A; ++a) {
              const double diff = p.q_star(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(a)) -
                                  q_pi(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(a));
              played += d_star[s] * p.pi[s][a] * diff;
              optimal += d_star[s] * p.star[s][a] * diff;
            }
          // both action weightings, against the same sup-norm bound
          return std::max(std::abs(played), std::abs(optimal)) / (1.0 - p.m.gamma) -
                 sup_norm(p.q_star - q_pi) / (1.0 - p.m.gamma);
        },
        [](const Pt&) { return 0.0; }, sampler, n, kIneqTol, next_seed(), describe));
  }
  return out;
}

// ============================================================ regret bounds

std::vector<CheckReport> regret_checks(std::uint64_t seed, const SuiteOptions& opts) {
  std::vector<CheckReport> out;
  std::uint64_t salt = 0;
  auto next_seed = [&] { return mix_seed(seed, 300 + salt++); };
  const std::size_t n = opts.oco_streams;
  const std::size_t T = opts.oco_horizon;
  auto describe = [](const StreamRun& r) {
    json j = stream_json(r.stream);
    j["regret"] = r.regret;
    return dump(j);
  };
  auto online = [T](Rng& r) { return run_stream(r, T, ScheduleMode::Online); };

  out.push_back(check_inequality(
      "dynamic_mirror_descent",
      [](const StreamRun& r) { return r.regret; },
      [](const StreamRun& r) { return master_rhs(r.trace, r.k); }, online, n, kIneqTol,
      next_seed(), describe));

  const double scale = opts.tradeoff_c2_scale;
  out.push_back(check_inequality(
      "tradeoff_bound",
      [](const StreamRun& r) { return std::max(r.regret, master_rhs(r.trace, r.k)); },
      [scale](const StreamRun& r) {
        ExplicitConstants k = r.k;
        k.C2 *= scale;
        return bound_rhs(r.trace, k);
      },
      online, n, kIneqTol, next_seed(), describe));

  out.push_back(check_inequality(
      "oracle_schedule_bound",
      [](const StreamRun& r) { return r.regret; },
      [](const StreamRun& r) {
        double root = 0.0;
        for (std::size_t i = 1; i < r.trace.rows.size(); ++i) root += std::sqrt(r.trace.rows[i].alpha);
        const double lam1 = r.trace.rows.front().eta / r.k.c;
        return r.k.C0(lam1) + 2.0 * std::sqrt(r.k.C1 * r.k.C2) * root +
               r.k.C1 * r.drift_sum / r.k.lambda_max +
               r.k.C2 * static_cast<double>(r.trace.rows.size()) * r.k.lambda_min;
      },
      [T](Rng& r) { return run_stream(r, T, ScheduleMode::Oracle); }, n, kIneqTol, next_seed(),
      describe));

  out.push_back(check_inequality(
      "online_schedule_bound",
      [](const StreamRun& r) { return r.regret; },
      [](const StreamRun& r) {
        const double Td = static_cast<double>(r.trace.rows.size());
        const double lam1 = r.trace.rows.front().eta / r.k.c;
        return r.k.C0(lam1) * std::log(static_cast<double>(r.k.dim)) +
               4.0 * std::sqrt(r.k.C1 * r.k.C2 * Td * r.drift_sum) +
               r.k.C1 * r.drift_sum / r.k.lambda_max + r.k.C2 * Td * r.k.lambda_min;
      },
      online, n, kIneqTol, next_seed(), describe));
  return out;
}

// ============================================================ offline constant

std::vector<CheckReport> offline_checks(std::uint64_t seed) {
  struct Pt { double drift; std::size_t T; ScheduleConfig cfg; };
  constexpr double lo = 1e-4, hi = 10.0;
  constexpr std::size_t grid = 200001;
  auto grid_min = [](const Pt& p) {
    const double td = static_cast<double>(p.T);
    double best_l = lo, best_v = INFINITY;
    for (std::size_t i = 0; i < grid; ++i) {
      const double l = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(grid - 1));
      const double v = p.cfg.C1 * p.drift / l + p.cfg.C2 * td * l;
      if (v < best_v) {
        best_v = v;
        best_l = l;
      }
    }
    return best_l;
  };
  return {check_identity(
      "offline_minimizer",
      [grid_min](const Pt& p) {
        return offline_lambda(p.drift, p.T, p.cfg) / grid_min(p);
      },
      [](const Pt&) { return 1.0; },
      [](Rng& r) {
        Pt p{0.0, pick(r, 1, 10000), {}};
        p.cfg.C1 = log_unif(r, 0.1, 10.0);
        p.cfg.C2 = log_unif(r, 0.1, 10.0);
        // keep the minimizer inside the grid: lambda* in [1e-3, 5]
        const double target = log_unif(r, 1e-3, 5.0);
        p.drift = target * target * p.cfg.C2 * static_cast<double>(p.T) / p.cfg.C1;
        return p;
      },
      50, 1e-3, mix_seed(seed, 400), [](const Pt& p) {
        return dump({{"drift_total", p.drift}, {"T", p.T}, {"C1", p.cfg.C1}, {"C2", p.cfg.C2}});
      })};
}

// ============================================================ suite

std::vector<CheckReport> run_suite(std::uint64_t seed, const SuiteOptions& opts) {
  std::vector<CheckReport> all;
  auto group = [&](const char* label, const std::function<std::vector<CheckReport>()>& fn) {
    try {
      auto part = fn();
      all.insert(all.end(), part.begin(), part.end());
    } catch (const std::exception& e) {
      CheckReport r;
      r.name = label;
      r.max_violation = INFINITY;
      r.worst_case = e.what();
      all.push_back(r);
    }
  };
  group("identities", [&] { return identity_checks(seed); });
  group("inequalities", [&] { return inequality_checks(seed); });
  group("regret", [&] { return regret_checks(seed, opts); });
  group("offline", [&] { return offline_checks(seed); });
  return all;
}

// ============================================================ serialization

namespace {

json encode_real(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double decode_real(const json& j) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  throw Error(ErrorCode::IoError, "bad real in report: " + s);
}

}  // namespace

std::string reports_to_json(const std::vector<CheckReport>& reports) {
  json arr = json::array();
  for (const auto& r : reports)
    arr.push_back({{"name", r.name},
                   {"samples", r.samples},
                   {"max_violation", encode_real(r.max_violation)},
                   {"tolerance", encode_real(r.tolerance)},
                   {"passed", r.passed},
                   {"worst_case", r.worst_case}});
  return arr.dump(2);
}

std::vector<CheckReport> reports_from_json(const std::string& text) {
  std::vector<CheckReport> out;
  try {
    for (const auto& j : json::parse(text)) {
      CheckReport r;
      r.name = j.at("name").get<std::string>();
      r.samples = j.at("samples").get<std::size_t>();
      r.max_violation = decode_real(j.at("max_violation"));
      r.tolerance = decode_real(j.at("tolerance"));
      r.passed = j.at("passed").get<bool>();
      r.worst_case = j.at("worst_case").get<std::string>();
      out.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::IoError, std::string("malformed report JSON: ") + e.what());
  }
  return out;
}

std::string reports_table(const std::vector<CheckReport>& reports) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-30s %8s %14s %10s  %s\n", "check", "samples", "max_violation",
                "tolerance", "result");
  os << line;
  std::size_t failed = 0;
  for (const auto& r : reports) {
    std::snprintf(line, sizeof line, "%-30s %8zu %14.3e %10.1e  %s\n", r.name.c_str(), r.samples,
                  r.max_violation, r.tolerance, r.passed ? "pass" : "FAIL");
    os << line;
    if (!r.passed) ++failed;
  }
  os << reports.size() - failed << "/" << reports.size() << " checks passed\n";
  return os.str();
}

}  // namespace aes
