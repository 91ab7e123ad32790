#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "aes/trace.hpp"

namespace aes {

struct EvalCurve {
  std::vector<double> steps;
  std::vector<double> returns;

  // Throws InvalidCurve unless steps strictly increase and lengths match.
  void validate() const;
};

EvalCurve eval_curve(const RunTrace& trace);
EvalCurve moving_average(const EvalCurve& curve, std::size_t window);

double auc(const EvalCurve& curve);
double n_auc(const EvalCurve& curve, const EvalCurve& baseline);
double drop_ratio(const EvalCurve& ns_curve, const EvalCurve& steady_curve);

// Pre-change level is the mean of the last `window` eval points before each change.
double recovery_time(const EvalCurve& curve, std::span<const std::size_t> change_points,
                     std::size_t window, std::size_t total_steps);

struct SummaryRow {
  std::string task;
  std::string pattern;
  std::string method;
  std::int64_t seed = 0;
  double nauc = kNaN;
  double drop_ratio = kNaN;
  double recovery = kNaN;
  std::string sweep_value;  // empty outside sweeps
};

std::string summary_csv(std::span<const SummaryRow> rows, bool with_sweep);

}  // namespace aes
