#include "aes/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "aes/error.hpp"
#include "aes/version.hpp"

namespace aes {

void EvalCurve::validate() const {
  if (steps.size() != returns.size())
    throw Error(ErrorCode::InvalidCurve, "steps and returns differ in length");
  for (std::size_t i = 1; i < steps.size(); ++i)
    if (!(steps[i] > steps[i - 1])) throw Error(ErrorCode::InvalidCurve, "steps must strictly increase");
  for (double r : returns)
    if (!std::isfinite(r)) throw Error(ErrorCode::InvalidCurve, "non-finite return");
}

EvalCurve eval_curve(const RunTrace& trace) {
  EvalCurve c;
  for (const auto& r : trace.rows) {
    if (std::isnan(r.eval_return)) continue;
    c.steps.push_back(static_cast<double>(r.t));
    c.returns.push_back(r.eval_return);
  }
  return c;
}

EvalCurve moving_average(const EvalCurve& curve, std::size_t window) {
  if (window <= 1) return curve;
  EvalCurve out = curve;
  double acc = 0.0;
  for (std::size_t i = 0; i < curve.returns.size(); ++i) {
    acc += curve.returns[i];
    if (i >= window) acc -= curve.returns[i - window];
    out.returns[i] = acc / static_cast<double>(std::min(i + 1, window));
  }
  return out;
}

double auc(const EvalCurve& curve) {
  curve.validate();
  if (curve.steps.size() < 2) throw Error(ErrorCode::TooShort, "AUC needs at least two points");
  double area = 0.0;
  for (std::size_t i = 1; i < curve.steps.size(); ++i)
    area += 0.5 * (curve.returns[i] + curve.returns[i - 1]) * (curve.steps[i] - curve.steps[i - 1]);
  return area;
}

double n_auc(const EvalCurve& curve, const EvalCurve& baseline) {
  const double base = auc(baseline);
  if (base == 0.0) throw Error(ErrorCode::ZeroBaseline, "baseline AUC is zero");
  return auc(curve) / base;
}

double drop_ratio(const EvalCurve& ns_curve, const EvalCurve& steady_curve) {
  const double base = auc(steady_curve);
  if (base == 0.0) throw Error(ErrorCode::ZeroBaseline, "steady AUC is zero");
  return 1.0 - auc(ns_curve) / base;
}

double recovery_time(const EvalCurve& curve, std::span<const std::size_t> change_points,
                     std::size_t window, std::size_t total_steps) {
  curve.validate();
  if (window == 0) throw Error(ErrorCode::InvalidCurve, "window must be at least 1");
  if (total_steps == 0) throw Error(ErrorCode::InvalidCurve, "total_steps must be positive");
  if (curve.steps.empty()) throw Error(ErrorCode::TooShort, "empty curve");
  const double end = curve.steps.back();
  double total = 0.0;
  for (std::size_t k = 0; k < change_points.size(); ++k) {
    const auto tc = static_cast<double>(change_points[k]);
    if (tc < curve.steps.front() || tc > end)
      throw Error(ErrorCode::InvalidCurve, "change point outside the curve span");
    const double horizon_end = k + 1 < change_points.size() ? static_cast<double>(change_points[k + 1]) : end;
    const auto first_after = std::lower_bound(curve.steps.begin(), curve.steps.end(), tc);
    const auto n_before = static_cast<std::size_t>(first_after - curve.steps.begin());
    if (n_before == 0) throw Error(ErrorCode::NoPreWindow, "no eval point precedes a change point");
    const std::size_t lo = n_before > window ? n_before - window : 0;
    double level = 0.0;
    for (std::size_t i = lo; i < n_before; ++i) level += curve.returns[i];
    level /= static_cast<double>(n_before - lo);
    double contribution = horizon_end - tc;
    for (std::size_t i = n_before; i < curve.steps.size() && curve.steps[i] < horizon_end; ++i) {
      if (curve.returns[i] >= level) {
        contribution = curve.steps[i] - tc;
        break;
      }
    }
    total += contribution;
  }
  return total / static_cast<double>(total_steps);
}

std::string summary_csv(std::span<const SummaryRow> rows, bool with_sweep) {
  std::ostringstream out;
  out << "# aes " << kVersion << "\n";
  out << "task,pattern,method,seed,nauc,drop_ratio,recovery";
  if (with_sweep) out << ",sweep_value";
  out << "\n";
  for (const auto& r : rows) {
    out << r.task << ',' << r.pattern << ',' << r.method << ',' << r.seed << ','
        << format_double(r.nauc) << ',' << format_double(r.drop_ratio) << ','
        << format_double(r.recovery);
    if (with_sweep) out << ',' << r.sweep_value;
    out << "\n";
  }
  return out.str();
}

}  // namespace aes
