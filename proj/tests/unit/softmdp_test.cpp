#include <aes/error.hpp>
#include <aes/softmdp.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace aes;

namespace {

TabularMdp single(double r, double gamma) {
  TabularMdp m;
  m.n_states = 1;
  m.n_actions = 1;
  m.rewards = Eigen::MatrixXd::Constant(1, 1, r);
  m.transitions = {1.0};
  m.gamma = gamma;
  m.mu = 1.0;
  m.rho = SimplexVec::uniform(1);
  return m;
}

TabularMdp zero_reward(std::size_t S, std::size_t A, double gamma, double mu) {
  std::mt19937_64 rng(4);
  auto m = random_mdp(S, A, gamma, mu, 1.0, rng);
  m.rewards.setZero();
  return m;
}

Policy uniform_policy(const TabularMdp& m) { return Policy(m.n_states, SimplexVec::uniform(m.n_actions)); }

}  // namespace

TEST(SoftMdp, BellmanExamples) {
  const auto m = single(1, 0.5);
  EXPECT_NEAR(soft_bellman_apply(m, QTable::Zero(1, 1))(0, 0), 1.0, 1e-15);
  const auto z = zero_reward(3, 4, 0.8, 0.3);
  const auto tq = soft_bellman_apply(z, QTable::Zero(3, 4));
  EXPECT_NEAR(tq.maxCoeff(), 0.8 * 0.3 * std::log(4.0), 1e-12);
  EXPECT_NEAR(tq.minCoeff(), 0.8 * 0.3 * std::log(4.0), 1e-12);
  EXPECT_THROW(soft_bellman_apply(z, QTable::Zero(2, 4)), Error);
}

TEST(SoftMdp, BellmanMatchesDirectSum) {
  std::mt19937_64 rng(8);
  const auto m = random_mdp(3, 2, 0.9, 0.4, 1.0, rng);
  QTable q = QTable::Random(3, 2);
  const auto tq = soft_bellman_apply(m, q);
  for (std::size_t s = 0; s < 3; ++s)
    for (std::size_t a = 0; a < 2; ++a) {
      long double acc = m.rewards(s, a);
      for (std::size_t n = 0; n < 3; ++n) {
        long double z = 0;
        for (std::size_t b = 0; b < 2; ++b) z += std::exp(static_cast<long double>(q(n, b)) / 0.4L);
        acc += 0.9L * m.row(s, a)[n] * 0.4L * std::log(z);
      }
      EXPECT_NEAR(tq(s, a), static_cast<double>(acc), 1e-12);
    }
}

TEST(SoftMdp, SolveExamples) {
  EXPECT_NEAR(solve_soft_q(single(1, 0.5), 1e-10)(0, 0), 2.0, 1e-9);
  const auto z = zero_reward(4, 3, 0.9, 0.2);
  const auto q = solve_soft_q(z, 1e-10);
  const double c = 0.9 * 0.2 * std::log(3.0) / 0.1;
  EXPECT_NEAR(q.maxCoeff(), c, 1e-8);
  EXPECT_NEAR(q.minCoeff(), c, 1e-8);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 20; ++i) {
    const auto m = random_mdp(5, 3, 0.9, 0.2, 1.0, rng);
    const auto qs = solve_soft_q(m, 1e-8);
    EXPECT_LE(qs.cwiseAbs().maxCoeff(), q_max_bound(m) + 1e-8);
    EXPECT_LE((soft_bellman_apply(m, qs) - qs).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(SoftMdp, SoftPolicy) {
  QTable q(2, 2);
  q << 0.4, 0.4, 1, 0;
  const auto pi = soft_policy(q, 1.0);
  EXPECT_NEAR(pi[0][0], 0.5, 1e-15);
  EXPECT_NEAR(pi[1][0], 0.731059, 1e-6);
  const auto flat = soft_policy(q, 1e6);
  EXPECT_LT(std::abs(flat[1][0] - 0.5), 1e-5);
  EXPECT_THROW(soft_policy(q, 0.0), Error);
}

TEST(SoftMdp, PolicyEvalExamples) {
  const auto m = single(1, 0.5);
  const auto pe = policy_eval(m, uniform_policy(m), 1e-12);
  EXPECT_NEAR(pe.v(0), 2.0, 1e-10);
  EXPECT_NEAR(pe.q(0, 0), 2.0, 1e-10);
  const auto z = zero_reward(3, 4, 0.7, 0.5);
  const auto pz = policy_eval(z, uniform_policy(z), 1e-12);
  for (Eigen::Index s = 0; s < 3; ++s) EXPECT_NEAR(pz.v(s), 0.5 * std::log(4.0) / 0.3, 1e-9);

  std::mt19937_64 rng(6);
  const auto r = random_mdp(5, 3, 0.9, 0.2, 1.0, rng);
  const double tol = 1e-9;
  const auto qs = solve_soft_q(r, tol);
  const auto pv = policy_eval(r, soft_policy(qs, r.mu), tol);
  const auto lse = soft_state_values(qs, r.mu);
  EXPECT_LE((pv.v - lse).cwiseAbs().maxCoeff(), 2 * tol / (1 - r.gamma));
}

TEST(SoftMdp, Occupancy) {
  const auto d1 = occupancy(single(0, 0.9), Policy{SimplexVec::uniform(1)});
  EXPECT_NEAR(d1[0], 1.0, 1e-15);

  TabularMdp m;
  m.n_states = 2;
  m.n_actions = 1;
  m.rewards = Eigen::MatrixXd::Zero(2, 1);
  m.transitions = {0, 1, 0, 1};
  m.gamma = 0.5;
  m.rho = SimplexVec::vertex(2, 0);
  const auto d = occupancy(m, Policy(2, SimplexVec::uniform(1)));
  EXPECT_NEAR(d[0], 0.5, 1e-12);
  EXPECT_NEAR(d[1], 0.5, 1e-12);
}

TEST(SoftMdp, SoftReturnAgreesWithRecursion) {
  EXPECT_NEAR(soft_return(single(1, 0.5), Policy{SimplexVec::uniform(1)}), 2.0, 1e-12);
  const auto z = zero_reward(3, 4, 0.8, 0.25);
  EXPECT_NEAR(soft_return(z, uniform_policy(z)), 0.25 * std::log(4.0) / 0.2, 1e-10);
  std::mt19937_64 rng(12);
  for (int i = 0; i < 10; ++i) {
    const auto m = random_mdp(4, 3, 0.85, 0.3, 1.0, rng);
    Policy pi;
    for (std::size_t s = 0; s < 4; ++s) pi.push_back(sample_dirichlet(3, 1.0, rng));
    const auto pe = policy_eval(m, pi, 1e-11);
    double rv = 0;
    for (std::size_t s = 0; s < 4; ++s) rv += m.rho[s] * pe.v(static_cast<Eigen::Index>(s));
    EXPECT_NEAR(soft_return(m, pi), rv, 1e-6);
  }
}

TEST(SoftMdp, SequencePatterns) {
  std::mt19937_64 rng(0);
  SoftMdpSequence spec;
  spec.base = random_mdp(5, 3, 0.9, 0.2, 1.0, rng);
  spec.horizon = 50;
  spec.seed = 3;
  const auto steady = generate_sequence(spec);
  ASSERT_EQ(steady.size(), 50u);
  for (const auto& m : steady) EXPECT_TRUE(m.rewards == spec.base.rewards);
  EXPECT_EQ(variation_budget(steady).budget, 0.0);

  spec.pattern = DriftPattern::Abrupt;
  spec.drift.change_times = {20};
  spec.drift.magnitude = 0.6;
  const auto abrupt = generate_sequence(spec);
  const auto vb = variation_budget(abrupt);
  for (std::size_t t = 2; t <= 50; ++t) {
    if (t == 20) EXPECT_GT(vb.reward_delta[t - 1], 0.0);
    else EXPECT_EQ(vb.reward_delta[t - 1], 0.0);
  }
  const double flip = (abrupt[19].rewards - abrupt[18].rewards).cwiseAbs().maxCoeff();
  EXPECT_NEAR(vb.budget, flip, 1e-12);

  spec.pattern = DriftPattern::Linear;
  const auto lin = generate_sequence(spec);
  const auto vl = variation_budget(lin);
  double sum = 0;
  for (double d : vl.reward_delta) sum += d;
  EXPECT_NEAR(sum, (lin.back().rewards - lin.front().rewards).cwiseAbs().maxCoeff(), 1e-10);

  // regenerating gives identical instances
  const auto again = generate_sequence(spec);
  for (std::size_t t = 0; t < lin.size(); ++t) EXPECT_TRUE(lin[t].rewards == again[t].rewards);
}

TEST(SoftMdp, TransitionDriftBudget) {
  std::mt19937_64 rng(2);
  SoftMdpSequence spec;
  spec.base = random_mdp(4, 3, 0.9, 0.2, 1.0, rng);
  spec.horizon = 30;
  spec.pattern = DriftPattern::Mixed;
  spec.drift.change_times = {10, 20};
  spec.drift.transition_drift = true;
  spec.drift.magnitude = 0.6;
  spec.drift.period = 12;
  spec.drift.amplitude = 0.3;
  const auto seq = generate_sequence(spec);
  for (const auto& m : seq) EXPECT_NO_THROW(m.validate());
  const auto vb = variation_budget(seq);
  const double vmax = v_max_bound(spec.base);
  double brute = 0;
  for (std::size_t t = 1; t < seq.size(); ++t) {
    const double dr = (seq[t].rewards - seq[t - 1].rewards).cwiseAbs().maxCoeff();
    double dp = 0;
    for (std::size_t s = 0; s < 4; ++s)
      for (std::size_t a = 0; a < 3; ++a) {
        double l1 = 0;
        for (std::size_t n = 0; n < 4; ++n) l1 += std::abs(seq[t].row(s, a)[n] - seq[t - 1].row(s, a)[n]);
        dp = std::max(dp, l1);
      }
    brute += dr + spec.base.gamma * vmax * dp;
  }
  EXPECT_NEAR(vb.budget, brute, 1e-10);
}

TEST(SoftMdp, InvalidSpecs) {
  std::mt19937_64 rng(2);
  SoftMdpSequence spec;
  spec.base = random_mdp(3, 2, 0.9, 0.2, 1.0, rng);
  spec.horizon = 10;
  spec.pattern = DriftPattern::Abrupt;
  spec.drift.change_times = {11};
  EXPECT_THROW(validate_sequence(spec), Error);
  spec.drift.change_times = {5};
  spec.drift.magnitude = 1.5;
  EXPECT_THROW(validate_sequence(spec), Error);
}

TEST(SoftMdp, SequenceJsonRoundTrip) {
  std::mt19937_64 rng(2);
  SoftMdpSequence spec;
  spec.base = random_mdp(3, 2, 0.9, 0.2, 1.0, rng);
  spec.horizon = 40;
  spec.pattern = DriftPattern::Periodic;
  spec.drift.period = 17;
  spec.seed = 99;
  const auto back = sequence_from_json(sequence_to_json(spec));
  const auto a = generate_sequence(spec), b = generate_sequence(back);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t t = 0; t < a.size(); ++t) {
    EXPECT_TRUE(a[t].rewards == b[t].rewards);
    EXPECT_EQ(a[t].transitions, b[t].transitions);
  }
}
