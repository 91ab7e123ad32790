#include <aes/error.hpp>
#include <aes/scheduler.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace aes;

TEST(Schedule, OracleLambda) {
  ScheduleConfig cfg;
  cfg.C1 = 2;
  cfg.C2 = 3;
  EXPECT_EQ(oracle_lambda(0, cfg), 0.0);
  EXPECT_NEAR(oracle_lambda(cfg.C2 / cfg.C1, cfg), 1.0, 1e-15);
  cfg.C1 = 4;
  cfg.C2 = 1;
  EXPECT_NEAR(oracle_lambda(1, cfg), 2.0, 1e-15);
}

TEST(Schedule, OfflineLambdaMinimizesTradeoff) {
  ScheduleConfig cfg;
  cfg.C1 = 1.7;
  cfg.C2 = 0.4;
  EXPECT_EQ(offline_lambda(0, 10, cfg), 0.0);
  EXPECT_NEAR(offline_lambda(50 * cfg.C2 / cfg.C1, 50, cfg), 1.0, 1e-14);
  const double A = 12.0;
  const std::size_t T = 300;
  const double best = offline_lambda(A, T, cfg);
  auto phi = [&](double l) { return cfg.C1 * A / l + cfg.C2 * T * l; };
  double grid_best = INFINITY, grid_arg = 0;
  for (int i = 0; i <= 200000; ++i) {
    const double l = 1e-4 * std::pow(1e5, i / 200000.0);
    if (phi(l) < grid_best) grid_best = phi(l), grid_arg = l;
  }
  EXPECT_NEAR(best / grid_arg, 1.0, 1e-3);
}

TEST(Schedule, OnlineLambdaClips) {
  ScheduleConfig cfg;
  ProxyState st;
  st.t = 5;
  EXPECT_EQ(online_lambda(st, cfg), cfg.lambda_min);
  st.a_hat_sum = 5 * cfg.C2 / cfg.C1;
  EXPECT_NEAR(online_lambda(st, cfg), 1.0, 1e-15);
  st.a_hat_sum = 1e12;
  EXPECT_EQ(online_lambda(st, cfg), cfg.lambda_max);
}

TEST(Schedule, QuantileProxy) {
  const std::vector<double> same(7, 0.4);
  EXPECT_EQ(td_quantile_proxy(same, 0.9), 0.4);
  const std::vector<double> ten{3, 1, 2, 10, 9, 8, 4, 5, 7, 6};
  EXPECT_EQ(td_quantile_proxy(ten, 0.9), 9.0);
  EXPECT_EQ(td_quantile_proxy(ten, 1.0), 10.0);
  const std::vector<double> one{2.5};
  EXPECT_EQ(td_quantile_proxy(one, 0.1), 2.5);
  EXPECT_THROW(td_quantile_proxy(std::vector<double>{}, 0.9), Error);
  EXPECT_THROW(td_quantile_proxy(std::vector<double>{1, -1}, 0.9), Error);
}

TEST(Schedule, QuantileMonotoneInQ) {
  std::mt19937_64 rng(2);
  std::exponential_distribution<double> e(1.0);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> b(1 + rng() % 40);
    for (auto& v : b) v = e(rng);
    double prev = -1;
    for (double q = 0.05; q <= 1.0; q += 0.05) {
      const double v = td_quantile_proxy(b, q);
      EXPECT_GE(v, prev);
      EXPECT_GE(v, *std::min_element(b.begin(), b.end()));
      EXPECT_LE(v, *std::max_element(b.begin(), b.end()));
      prev = v;
    }
  }
}

TEST(Schedule, UpdateProxy) {
  ScheduleConfig cfg;
  cfg.ema_beta = 0;
  ProxyState st;
  st = update_proxy(st, 2.0, cfg);
  st = update_proxy(st, 0.5, cfg);
  EXPECT_EQ(st.ema_value, 0.5);
  EXPECT_EQ(st.a_hat_sum, 2.5);
  EXPECT_EQ(st.t, 2u);

  cfg.ema_beta = 0.9;
  ProxyState s2;
  double expect = 1.0, sum = 0;
  s2 = update_proxy(s2, 1.0, cfg);
  sum += 1.0;
  EXPECT_EQ(s2.ema_value, 1.0);
  for (int i = 0; i < 5; ++i) {
    s2 = update_proxy(s2, 0.0, cfg);
    expect *= 0.9;
    sum += expect;
    EXPECT_NEAR(s2.ema_value, expect, 1e-15);
  }
  EXPECT_NEAR(s2.a_hat_sum, sum, 1e-14);

  ProxyState s3;
  for (int i = 0; i < 4; ++i) s3 = update_proxy(s3, 0.7, cfg);
  EXPECT_NEAR(s3.a_hat_sum, 4 * 0.7, 1e-14);
}

TEST(Schedule, EtaEnvelope) {
  ScheduleConfig cfg;
  cfg.c = 2;
  EXPECT_EQ(eta_from_lambda(0.3, 0.0, cfg), 0.6);
  EXPECT_EQ(eta_from_lambda(0.1, 0.6, cfg), 0.6);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.01, 1);
  double eta = 0;
  for (int i = 0; i < 1000; ++i) {
    const double next = eta_from_lambda(u(rng), eta, cfg);
    EXPECT_GE(next, eta);
    eta = next;
  }
}

TEST(Schedule, ValidateNamesKey) {
  ScheduleConfig cfg;
  cfg.lambda_min = 2;
  try {
    cfg.validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidSchedule);
    EXPECT_NE(std::string(e.what()).find("lambda_min"), std::string::npos);
  }
  ScheduleConfig q;
  q.quantile_q = 0;
  EXPECT_THROW(q.validate(), Error);
}

TEST(Schedule, ProviderStaysInRange) {
  ScheduleConfig cfg;
  ScheduleProvider p(cfg);
  std::mt19937_64 rng(1);
  std::exponential_distribution<double> e(0.3);
  for (int i = 0; i < 500; ++i) {
    const double l = p.next(e(rng));
    EXPECT_GE(l, cfg.lambda_min);
    EXPECT_LE(l, cfg.lambda_max);
  }
  cfg.mode = ScheduleMode::Fixed;
  cfg.fixed_value = 0.37;
  ScheduleProvider f(cfg);
  EXPECT_EQ(f.next(5.0), 0.37);
}

TEST(Schedule, ModeNamesRoundTrip) {
  for (auto m : {ScheduleMode::Fixed, ScheduleMode::Oracle, ScheduleMode::Offline, ScheduleMode::Online})
    EXPECT_EQ(parse_mode(mode_name(m)), m);
  EXPECT_FALSE(parse_mode("adaptive").has_value());
}
