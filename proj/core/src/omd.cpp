#include "aes/omd.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aes/error.hpp"

namespace aes {

double LinearLoss::value(const SimplexVec& x) const {
  if (grad.size() != x.size()) throw Error(ErrorCode::ShapeMismatch, "loss and iterate differ in K");
  double s = offset;
  for (std::size_t i = 0; i < grad.size(); ++i) s += grad[i] * x[i];
  return s;
}

OmdState md_step(const OmdState& state, std::span<const double> g, double eta, double eps) {
  const auto& x = state.x;
  if (g.size() != x.size()) throw Error(ErrorCode::ShapeMismatch, "gradient and iterate differ in K");
  if (!(eta > 0.0) || !std::isfinite(eta))
    throw Error(ErrorCode::InvalidSchedule, "step size must be positive and finite");
  for (double v : g)
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteGradient, "gradient has non-finite entry");
  std::vector<double> logits(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    logits[i] = x[i] > 0.0 ? std::log(x[i]) - eta * g[i] : -INFINITY;
  OmdState next;
  next.x = truncate(normalized_exp(logits), eps);
  next.eta_prev = std::max(state.eta_prev, eta);
  next.t = state.t + 1;
  return next;
}

std::vector<double> regularized_grad(std::span<const double> g_f, const SimplexVec& x,
                                     double lambda) {
  if (g_f.size() != x.size()) throw Error(ErrorCode::ShapeMismatch, "gradient and iterate differ in K");
  std::vector<double> out(g_f.begin(), g_f.end());
  if (lambda == 0.0) return out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] <= 0.0)
      throw Error(ErrorCode::BoundaryIterate, "coordinate " + std::to_string(i) + " is zero");
    out[i] += lambda * (1.0 + std::log(x[i]));
  }
  return out;
}

RunTrace run_dynamic(std::span<const LinearLoss> stream, std::span<const SimplexVec> comparators,
                     ScheduleProvider& schedule, double eps, const SimplexVec& x0,
                     std::span<const double> proxy) {
  const std::size_t T = stream.size();
  if (T == 0 || comparators.size() != T)
    throw Error(ErrorCode::LengthMismatch, "stream and comparators must have equal nonzero length");
  if (!proxy.empty() && proxy.size() != T)
    throw Error(ErrorCode::LengthMismatch, "proxy length differs from stream length");

  RunTrace trace;
  trace.dim = x0.size();
  trace.rows.reserve(T);
  trace.iterates.reserve(T);

  OmdState state{truncate(x0, eps), 0.0, 0};
  trace.initial_bregman = bregman_neg_entropy(comparators[0], state.x);
  double cum = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    const auto& loss = stream[t];
    const auto& u = comparators[t];
    TraceRow row;
    row.t = t + 1;
    row.alpha = t == 0 ? 0.0 : l1_distance(u, comparators[t - 1]);
    row.proxy = proxy.empty() ? row.alpha : proxy[t];
    row.lambda = schedule.next(row.proxy);
    row.eta = eta_from_lambda(row.lambda, state.eta_prev, schedule.config());
    const auto g = regularized_grad(loss.grad, state.x, row.lambda);
    row.grad_norm = 0.0;
    for (double v : g) row.grad_norm = std::max(row.grad_norm, std::abs(v));
    row.regret_inc = loss.value(state.x) - loss.value(u);
    cum += row.regret_inc;
    row.regret_cum = cum;
    trace.rows.push_back(row);
    trace.iterates.push_back(state.x);
    state = md_step(state, g, row.eta, eps);
  }
  return trace;
}

double ExplicitConstants::C0(double lambda_first) const {
  return std::log(static_cast<double>(dim)) / (c * lambda_min) + C2 * lambda_first;
}

ExplicitConstants explicit_constants(std::size_t dim, double grad_bound, double eps, double c,
                                     double lambda_min, double lambda_max) {
  if (dim < 1 || !(eps > 0.0) || !(c > 0.0) || !(lambda_min > 0.0) || lambda_max < lambda_min)
    throw Error(ErrorCode::InvalidSchedule, "explicit constants need K >= 1, eps > 0, c > 0, "
                                            "0 < lambda_min <= lambda_max");
  ExplicitConstants k;
  k.dim = dim;
  k.grad_bound = grad_bound;
  k.eps = eps;
  k.c = c;
  k.lambda_min = lambda_min;
  k.lambda_max = lambda_max;
  k.mirror_bound = entropy_grad_bound(eps);
  k.C1 = 2.0 * k.mirror_bound / c;
  const double m = grad_bound + lambda_max * k.mirror_bound;
  k.C2 = 0.5 * c * m * m + 2.0 * std::log(static_cast<double>(dim));
  return k;
}

namespace {

void require_schedule_columns(const RunTrace& trace) {
  if (trace.rows.empty()) throw Error(ErrorCode::MissingScheduleMetadata, "empty trace");
  for (const auto& r : trace.rows)
    if (std::isnan(r.lambda) || std::isnan(r.alpha) || std::isnan(r.eta))
      throw Error(ErrorCode::MissingScheduleMetadata,
                  "row " + std::to_string(r.t) + " lacks lambda/eta/alpha");
}

}  // namespace

double bound_rhs(const RunTrace& trace, const ExplicitConstants& k) {
  require_schedule_columns(trace);
  const auto& rows = trace.rows;
  double total = k.C0(rows.front().eta / k.c);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double lam = rows[i].eta / k.c;
    total += k.C1 * rows[i].alpha / lam + k.C2 * lam;
  }
  return total;
}

double master_rhs(const RunTrace& trace, const ExplicitConstants& k) {
  require_schedule_columns(trace);
  if (std::isnan(trace.initial_bregman))
    throw Error(ErrorCode::MissingScheduleMetadata, "trace lacks the initial Bregman distance");
  const auto& rows = trace.rows;
  const double log_k = std::log(static_cast<double>(k.dim));
  double total = trace.initial_bregman / rows.front().eta;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    total += 0.5 * r.eta * r.grad_norm * r.grad_norm + 2.0 * log_k * r.lambda;
    if (i > 0) total += 2.0 * k.mirror_bound * r.alpha / r.eta;
  }
  return total;
}

}  // namespace aes
