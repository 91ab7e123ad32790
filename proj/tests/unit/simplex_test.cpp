#include <aes/error.hpp>
#include <aes/simplex.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace aes;

TEST(Simplex, NegEntropyExamples) {
  EXPECT_NEAR(neg_entropy(SimplexVec::uniform(4)), -std::log(4.0), 1e-12);
  EXPECT_EQ(neg_entropy(SimplexVec::vertex(5, 0)), 0.0);
  EXPECT_NEAR(neg_entropy(SimplexVec({0.5, 0.5})), -std::log(2.0), 1e-12);
}

TEST(Simplex, RejectsInvalidVectors) {
  EXPECT_THROW(SimplexVec({0.5, 0.6}), Error);
  EXPECT_THROW(SimplexVec({-0.1, 1.1}), Error);
  EXPECT_THROW(SimplexVec({NAN, 1.0}), Error);
}

TEST(Simplex, KlExamples) {
  const SimplexVec x({0.3, 0.7});
  EXPECT_NEAR(kl_div(x, x), 0.0, 1e-15);
  EXPECT_NEAR(kl_div(SimplexVec::vertex(2, 0), SimplexVec::uniform(2)), std::log(2.0), 1e-12);
  // long double summation as the reference
  const long double ref = 0.3L * std::log(0.3L / 0.6L) + 0.7L * std::log(0.7L / 0.4L);
  EXPECT_NEAR(kl_div(x, SimplexVec({0.6, 0.4})), static_cast<double>(ref), 1e-14);
}

TEST(Simplex, KlSupportMismatch) {
  try {
    kl_div(SimplexVec::uniform(2), SimplexVec::vertex(2, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SupportMismatch);
  }
}

TEST(Simplex, BregmanMatchesKl) {
  std::mt19937_64 rng(3);
  EXPECT_NEAR(bregman_neg_entropy(SimplexVec::vertex(2, 0), SimplexVec::uniform(2)), std::log(2.0), 1e-12);
  for (int i = 0; i < 200; ++i) {
    const auto x = sample_dirichlet(8, 1.0, rng);
    const auto y = sample_dirichlet(8, 1.0, rng);
    EXPECT_NEAR(bregman_neg_entropy(x, y), kl_div(x, y), 1e-10);
    EXPECT_GE(kl_div(x, y), 0.5 * std::pow(l1_distance(x, y), 2) - 1e-12);
  }
}

TEST(Simplex, LogSumExp) {
  const std::vector<double> zero{0, 0};
  EXPECT_NEAR(log_sum_exp(zero, 1.0), std::log(2.0), 1e-14);
  const std::vector<double> flat{2.5, 2.5, 2.5};
  EXPECT_NEAR(log_sum_exp(flat, 0.3), 2.5 + 0.3 * std::log(3.0), 1e-12);
  const std::vector<double> q{3, 1};
  const long double ref = 0.5L * std::log(std::exp(6.0L) + std::exp(2.0L));
  EXPECT_NEAR(log_sum_exp(q, 0.5), static_cast<double>(ref), 1e-12);
  EXPECT_NEAR(log_sum_exp(q, 0.5), 3.009075, 1e-6);
  const std::vector<double> huge{1e6, -1e6};
  EXPECT_TRUE(std::isfinite(log_sum_exp(huge, 1e-3)));
  EXPECT_THROW(log_sum_exp(q, 0.0), Error);
}

TEST(Simplex, Softmax) {
  const std::vector<double> zero(4, 0.0);
  const auto u = softmax(zero, 0.7);
  for (double p : u.probs()) EXPECT_NEAR(p, 0.25, 1e-15);
  const std::vector<double> q{1, 0};
  const auto s = softmax(q, 1.0);
  EXPECT_NEAR(s[0], std::exp(1.0) / (std::exp(1.0) + 1.0), 1e-12);
  EXPECT_NEAR(s[0], 0.731059, 1e-6);
  const std::vector<double> dom{10, 0};
  EXPECT_GE(softmax(dom, 0.1)[0], 1.0 - 1e-40);
  std::vector<double> shifted{4, 3};
  const auto a = softmax(std::vector<double>{1, 0}, 0.4);
  const auto b = softmax(shifted, 0.4);
  EXPECT_NEAR(a[0], b[0], 1e-10);
  EXPECT_THROW(softmax(q, -1.0), Error);
}

TEST(Simplex, Truncate) {
  const SimplexVec x({0.2, 0.3, 0.5});
  const auto same = truncate(x, 1e-3);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(same[i], x[i]);
  const auto t = truncate(SimplexVec::vertex(2, 0), 0.01);
  EXPECT_NEAR(t[0], 0.99, 1e-14);
  EXPECT_NEAR(t[1], 0.01, 1e-14);
  const auto u = truncate(SimplexVec::uniform(4), 0.25);
  for (double p : u.probs()) EXPECT_NEAR(p, 0.25, 1e-15);
  EXPECT_THROW(truncate(SimplexVec::uniform(4), 0.3), Error);
}

// At K=2 the KL projection onto {y_i >= eps} is y = (1 - eps, eps) whenever x_2 < eps; scan the
// feasible segment to confirm nothing closer exists.
TEST(Simplex, TruncateIsKlProjectionAtK2) {
  const SimplexVec x({0.995, 0.005});
  const double eps = 0.02;
  const auto y = truncate(x, eps);
  double best = INFINITY, arg = 0;
  for (int i = 0; i <= 100000; ++i) {
    const double p = eps + (1 - 2 * eps) * i / 100000.0;
    const double d = kl_div(SimplexVec({1 - p, p}), x);
    if (d < best) best = d, arg = p;
  }
  EXPECT_NEAR(y[1], arg, 1e-4);
}

TEST(Simplex, EntropyBoundsAndGradientBound) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    const std::size_t k = 2 + rng() % 31;
    const auto x = sample_dirichlet(k, 0.5, rng);
    const double h = neg_entropy(x);
    EXPECT_LE(h, 1e-15);
    EXPECT_GE(h, -std::log(static_cast<double>(k)) - 1e-12);
    const double eps = 1e-4;
    const auto y = truncate(x, eps);
    double g = 0;
    for (double p : y.probs()) g = std::max(g, std::abs(1 + std::log(p)));
    EXPECT_LE(g, entropy_grad_bound(eps) + 1e-12);
  }
}
