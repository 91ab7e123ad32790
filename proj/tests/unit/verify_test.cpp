#include <aes/error.hpp>
#include <aes/verify.hpp>
#include <gtest/gtest.h>

#include <cmath>

using namespace aes;

TEST(Verify, ChecksAreDeterministicInSeed) {
  const auto a = identity_checks(3);
  const auto b = identity_checks(3);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].name, b[i].name);
    EXPECT_EQ(a[i].max_violation, b[i].max_violation);
    EXPECT_EQ(a[i].worst_case, b[i].worst_case);
  }
}

TEST(Verify, IdentityAndInequalityGroupsPass) {
  for (const auto& r : identity_checks(1)) EXPECT_TRUE(r.passed) << r.name << " " << r.max_violation;
  for (const auto& r : inequality_checks(1)) EXPECT_TRUE(r.passed) << r.name << " " << r.max_violation;
}

TEST(Verify, JsonRoundTrip) {
  auto reps = offline_checks(2);
  CheckReport odd;
  odd.name = "odd";
  odd.samples = 3;
  odd.max_violation = INFINITY;
  odd.tolerance = 0.0;
  odd.passed = false;
  odd.worst_case = "{\"k\": 1}";
  reps.push_back(odd);
  const auto back = reports_from_json(reports_to_json(reps));
  ASSERT_EQ(back.size(), reps.size());
  for (std::size_t i = 0; i < reps.size(); ++i) {
    EXPECT_EQ(back[i].name, reps[i].name);
    EXPECT_EQ(back[i].samples, reps[i].samples);
    EXPECT_EQ(back[i].max_violation, reps[i].max_violation);
    EXPECT_EQ(back[i].passed, reps[i].passed);
    EXPECT_EQ(back[i].worst_case, reps[i].worst_case);
  }
  EXPECT_FALSE(reports_table(reps).empty());
}

TEST(Verify, GenericHarness) {
  const auto ok = check_identity(
      "square", [](double x) { return x * x; }, [](double x) { return x * x; },
      [](std::mt19937_64& rng) { return std::uniform_real_distribution<double>(-1, 1)(rng); }, 50,
      0.0, 7, [](double x) { return std::to_string(x); });
  EXPECT_TRUE(ok.passed);
  EXPECT_EQ(ok.samples, 50u);

  const auto bad = check_inequality(
      "false_claim", [](double x) { return x; }, [](double) { return 0.0; },
      [](std::mt19937_64& rng) { return std::uniform_real_distribution<double>(-1, 1)(rng); }, 50,
      0.0, 7, [](double x) { return std::to_string(x); });
  EXPECT_FALSE(bad.passed);
  EXPECT_GT(bad.max_violation, 0.0);
  EXPECT_FALSE(bad.worst_case.empty());

  const auto nan = check_identity(
      "nan", [](double) { return NAN; }, [](double) { return 0.0; },
      [](std::mt19937_64&) { return 0.0; }, 5, 1.0, 7, [](double) { return std::string("x"); });
  EXPECT_FALSE(nan.passed);
  EXPECT_TRUE(std::isinf(nan.max_violation));

  try {
    check_identity(
        "sampler_throws", [](double x) { return x; }, [](double x) { return x; },
        [](std::mt19937_64&) -> double { throw std::runtime_error("boom"); }, 5, 1.0, 7,
        [](double) { return std::string("x"); });
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SamplerFailure);
  }
}

TEST(Verify, HalvedConstantOnlyBreaksTradeoffCheck) {
  SuiteOptions opts;
  opts.oco_streams = 20;
  opts.oco_horizon = 400;
  for (const auto& r : regret_checks(4, opts)) EXPECT_TRUE(r.passed) << r.name;
  opts.tradeoff_c2_scale = 0.5;
  for (const auto& r : regret_checks(4, opts)) EXPECT_EQ(r.passed, r.name != "tradeoff_bound") << r.name;
}
