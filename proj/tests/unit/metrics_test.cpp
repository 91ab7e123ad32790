#include <aes/error.hpp>
#include <aes/metrics.hpp>
#include <gtest/gtest.h>

using namespace aes;

TEST(Metrics, AucOfConstantCurve) {
  EvalCurve c{{0, 5, 10, 30}, {1.5, 1.5, 1.5, 1.5}};
  EXPECT_NEAR(auc(c), 1.5 * 30, 1e-9);
  EvalCurve ramp{{0, 1, 2}, {0, 1, 2}};
  EXPECT_NEAR(auc(ramp), 2.0, 1e-12);
  EXPECT_THROW(auc(EvalCurve{{0}, {1}}), Error);
}

TEST(Metrics, CurveValidation) {
  EXPECT_THROW(auc(EvalCurve{{0, 0}, {1, 1}}), Error);
  EXPECT_THROW(auc(EvalCurve{{0, 1}, {1}}), Error);
  EXPECT_THROW(auc(EvalCurve{{0, 1}, {1, NAN}}), Error);
}

TEST(Metrics, DropRatioCanBeNegative) {
  EvalCurve steady{{0, 1, 2}, {1, 1, 1}};
  EvalCurve better{{0, 1, 2}, {1.06, 1.06, 1.06}};
  EXPECT_NEAR(drop_ratio(better, steady), -0.06, 1e-9);
  EXPECT_NEAR(drop_ratio(steady, steady), 0.0, 1e-15);
  EvalCurve zero{{0, 1}, {0, 0}};
  EXPECT_THROW(drop_ratio(steady, zero), Error);
  EXPECT_NEAR(n_auc(better, steady), 1.06, 1e-12);
  EXPECT_THROW(n_auc(steady, zero), Error);
}

TEST(Metrics, RecoveryTime) {
  EvalCurve never{{0, 25, 49, 50, 75, 100}, {1, 1, 1, 0, 0, 0}};
  const std::vector<std::size_t> mid{50};
  EXPECT_NEAR(recovery_time(never, mid, 3, 100), 0.5, 1e-9);

  EvalCurve back{{0, 10, 20, 30, 40}, {1, 1, 0, 0.5, 1}};
  const std::vector<std::size_t> at20{20};
  EXPECT_NEAR(recovery_time(back, at20, 2, 40), 20.0 / 40, 1e-12);

  // first change runs out at the second; the second starts from the depressed level and
  // counts as recovered at once
  EvalCurve two{{0, 10, 20, 30, 40, 50, 60}, {1, 1, 0, 0, 0, 0, 0}};
  const std::vector<std::size_t> cps{20, 40};
  EXPECT_NEAR(recovery_time(two, cps, 1, 60), 20.0 / 60, 1e-12);

  const std::vector<std::size_t> early{0};
  EXPECT_THROW(recovery_time(back, early, 2, 40), Error);
  EXPECT_THROW(recovery_time(back, at20, 0, 40), Error);
}

TEST(Metrics, MovingAverage) {
  EvalCurve c{{1, 2, 3, 4}, {1, 3, 5, 7}};
  const auto m = moving_average(c, 2);
  EXPECT_EQ(m.returns, (std::vector<double>{1, 2, 4, 6}));
  EXPECT_EQ(moving_average(c, 1).returns, c.returns);
}

TEST(Metrics, EvalCurveSkipsMissingReturns) {
  RunTrace tr;
  for (std::size_t t = 1; t <= 6; ++t) {
    TraceRow r;
    r.t = t;
    if (t % 2 == 0) r.eval_return = double(t);
    tr.rows.push_back(r);
  }
  const auto c = eval_curve(tr);
  EXPECT_EQ(c.steps, (std::vector<double>{2, 4, 6}));
}

TEST(Metrics, SummaryCsvColumns) {
  SummaryRow r;
  r.task = "tabular";
  r.pattern = "Abrupt";
  r.method = "aes";
  r.nauc = 1.0;
  const std::vector<SummaryRow> rows{r};
  const auto csv = summary_csv(rows, false);
  EXPECT_NE(csv.find("task,pattern,method,seed,nauc,drop_ratio,recovery\n"), std::string::npos);
  EXPECT_NE(summary_csv(rows, true).find(",sweep_value\n"), std::string::npos);
}
