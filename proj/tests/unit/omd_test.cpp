#include <aes/error.hpp>
#include <aes/omd.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace aes;

TEST(Omd, ZeroGradientKeepsIterate) {
  const SimplexVec x({0.2, 0.3, 0.5});
  const std::vector<double> g(3, 0.0);
  const auto next = md_step(OmdState{x, 0.0, 0}, g, 0.7, 1e-6);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(next.x[i], x[i], 1e-15);
  EXPECT_EQ(next.t, 1u);
}

TEST(Omd, ExponentiatedGradientExample) {
  const std::vector<double> g{1, 0};
  const auto next = md_step(OmdState{SimplexVec::uniform(2), 0.0, 0}, g, 1.0, 0.0);
  const double e = std::exp(-1.0);
  EXPECT_NEAR(next.x[0], e / (e + 1), 1e-12);
  EXPECT_NEAR(next.x[0], 0.268941, 1e-6);
  EXPECT_DOUBLE_EQ(next.eta_prev, 1.0);
}

TEST(Omd, RejectsNonFiniteGradient) {
  const std::vector<double> g{NAN, 0};
  EXPECT_THROW(md_step(OmdState{SimplexVec::uniform(2), 0.0, 0}, g, 1.0, 0.0), Error);
}

// eta <g, x> + KL(x, x_t) minimized by brute force over a grid on the 3-simplex.
TEST(Omd, MatchesProximalGridSearch) {
  const SimplexVec x({0.2, 0.5, 0.3});
  const std::vector<double> g{0.8, -0.4, 0.1};
  const double eta = 0.9;
  const auto step = md_step(OmdState{x, 0.0, 0}, g, eta, 0.0);
  const int n = 2000;
  double best = INFINITY;
  std::array<double, 3> arg{};
  for (int i = 1; i < n; ++i)
    for (int j = 1; i + j < n; ++j) {
      const double a = double(i) / n, b = double(j) / n, c = 1 - a - b;
      const double v = eta * (g[0] * a + g[1] * b + g[2] * c) + a * std::log(a / x[0]) +
                       b * std::log(b / x[1]) + c * std::log(c / x[2]);
      if (v < best) best = v, arg = {a, b, c};
    }
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(step.x[i], arg[i], 1e-3);
  const double at_step = eta * (g[0] * step.x[0] + g[1] * step.x[1] + g[2] * step.x[2]) + kl_div(step.x, x);
  EXPECT_LE(at_step, best + 1e-4);
}

TEST(Omd, RegularizedGrad) {
  const std::vector<double> g{0.3, -0.2, 0.5};
  const auto x = SimplexVec::uniform(3);
  const auto same = regularized_grad(g, x, 0.0);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(same[i], g[i]);
  const std::vector<double> zero(3, 0.0);
  for (double v : regularized_grad(zero, x, 0.4)) EXPECT_NEAR(v, 0.4 * (1 - std::log(3.0)), 1e-14);
  EXPECT_THROW(regularized_grad(g, SimplexVec({0.5, 0.5, 0.0}), 0.1), Error);
}

TEST(Omd, IteratesRespectFloorAndEtaEnvelope) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  const std::size_t k = 6, T = 300;
  std::vector<LinearLoss> losses;
  std::vector<SimplexVec> comps;
  for (std::size_t t = 0; t < T; ++t) {
    LinearLoss l;
    for (std::size_t i = 0; i < k; ++i) l.grad.push_back(u(rng));
    losses.push_back(l);
    comps.push_back(truncate(SimplexVec::vertex(k, (t / 100) % k), 1e-6));
  }
  ScheduleConfig cfg;
  cfg.ema_beta = 0;
  ScheduleProvider sched(cfg);
  const auto tr = run_dynamic(losses, comps, sched, 1e-6, SimplexVec::uniform(k));
  ASSERT_EQ(tr.rows.size(), T);
  double prev_eta = 0, cum = 0;
  for (const auto& r : tr.rows) {
    EXPECT_GE(r.eta, prev_eta);
    prev_eta = r.eta;
    cum += r.regret_inc;
    EXPECT_NEAR(r.regret_cum, cum, 1e-9);
  }
  for (const auto& x : tr.iterates)
    for (double p : x.probs()) EXPECT_GE(p, 1e-6 * (1 - 1e-9));
  EXPECT_NEAR(tr.rows[100].alpha, l1_distance(comps[100], comps[99]), 1e-12);
  EXPECT_EQ(tr.rows[50].alpha, 0.0);
}

TEST(Omd, RunDynamicLengthMismatch) {
  std::vector<LinearLoss> losses(3, LinearLoss{{0.1, 0.2}, 0});
  std::vector<SimplexVec> comps(2, SimplexVec::uniform(2));
  ScheduleProvider sched(ScheduleConfig{});
  EXPECT_THROW(run_dynamic(losses, comps, sched, 0.0, SimplexVec::uniform(2)), Error);
}

TEST(Omd, BoundRhsPlugIn) {
  const auto k = explicit_constants(4, 1.0, 1e-6, 1.0, 0.05, 1.0);
  const double gpsi = 1 + std::abs(std::log(1e-6));
  EXPECT_NEAR(k.mirror_bound, gpsi, 1e-12);
  EXPECT_NEAR(k.C1, 2 * gpsi, 1e-12);
  EXPECT_NEAR(k.C2, 0.5 * std::pow(1 + gpsi, 2) + 2 * std::log(4.0), 1e-9);
  RunTrace tr;
  const double lam = 0.3;
  const std::size_t T = 10;
  for (std::size_t t = 1; t <= T; ++t) {
    TraceRow r;
    r.t = t;
    r.lambda = lam;
    r.eta = lam;
    r.alpha = 0;
    tr.rows.push_back(r);
  }
  EXPECT_NEAR(bound_rhs(tr, k), k.C0(lam) + k.C2 * lam * (T - 1), 1e-8);
  EXPECT_NEAR(k.C0(lam), std::log(4.0) / 0.05 + k.C2 * lam, 1e-9);
  RunTrace empty;
  empty.rows.push_back(TraceRow{});
  EXPECT_THROW(bound_rhs(empty, k), Error);
}
