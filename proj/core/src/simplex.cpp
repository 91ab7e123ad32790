#include "aes/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "aes/error.hpp"

namespace aes {

namespace {

double xlogx(double v) { return v > 0.0 ? v * std::log(v) : 0.0; }

void renormalize(std::vector<double>& p) {
  const double s = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& v : p) v /= s;
}

void require_same_size(const SimplexVec& x, const SimplexVec& y) {
  if (x.size() != y.size())
    throw Error(ErrorCode::ShapeMismatch, "simplex vectors of different length");
}

}  // namespace

SimplexVec::SimplexVec(std::vector<double> probs, double epsilon_floor)
    : p_(std::move(probs)), floor_(epsilon_floor) {
  if (p_.empty()) throw Error(ErrorCode::InvalidSimplex, "empty probability vector");
  if (!(floor_ >= 0.0) || floor_ * static_cast<double>(p_.size()) > 1.0 + 1e-12)
    throw Error(ErrorCode::InvalidEpsilon, "epsilon floor outside [0, 1/K]");
  double sum = 0.0;
  for (double v : p_) {
    if (!std::isfinite(v) || v < 0.0)
      throw Error(ErrorCode::InvalidSimplex, "negative or non-finite coordinate");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw Error(ErrorCode::InvalidSimplex, "coordinates sum to " + std::to_string(sum));
  renormalize(p_);
  for (double v : p_)
    if (v < floor_ * (1.0 - 1e-9))
      throw Error(ErrorCode::InvalidSimplex, "coordinate below epsilon floor");
}

SimplexVec::SimplexVec(Trusted, std::vector<double> p, double floor)
    : p_(std::move(p)), floor_(floor) {}

SimplexVec SimplexVec::uniform(std::size_t k) {
  if (k == 0) throw Error(ErrorCode::InvalidSimplex, "empty simplex");
  return SimplexVec(Trusted{}, std::vector<double>(k, 1.0 / static_cast<double>(k)), 0.0);
}

SimplexVec SimplexVec::vertex(std::size_t k, std::size_t i) {
  if (i >= k) throw Error(ErrorCode::InvalidSimplex, "vertex index out of range");
  std::vector<double> p(k, 0.0);
  p[i] = 1.0;
  return SimplexVec(Trusted{}, std::move(p), 0.0);
}

bool SimplexVec::interior() const {
  return std::all_of(p_.begin(), p_.end(), [](double v) { return v > 0.0; });
}

double neg_entropy(const SimplexVec& x) {
  double s = 0.0;
  for (double v : x.probs()) s += xlogx(v);
  return s;
}

double kl_div(const SimplexVec& x, const SimplexVec& y) {
  require_same_size(x, y);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) continue;
    if (y[i] == 0.0)
      throw Error(ErrorCode::SupportMismatch, "x_" + std::to_string(i) + " > 0 but y_i = 0");
    s += x[i] * std::log(x[i] / y[i]);
  }
  return std::max(s, 0.0);
}

double bregman_neg_entropy(const SimplexVec& x, const SimplexVec& y) {
  require_same_size(x, y);
  double inner = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (y[i] == 0.0) {
      if (x[i] > 0.0)
        throw Error(ErrorCode::SupportMismatch, "x_" + std::to_string(i) + " > 0 but y_i = 0");
      continue;
    }
    inner += (1.0 + std::log(y[i])) * (x[i] - y[i]);
  }
  return neg_entropy(x) - neg_entropy(y) - inner;
}

double log_sum_exp(std::span<const double> q, double mu) {
  if (!(mu > 0.0)) throw Error(ErrorCode::NonPositiveTemperature, "mu must be positive");
  if (q.empty()) throw Error(ErrorCode::ShapeMismatch, "log_sum_exp of empty vector");
  const double m = *std::max_element(q.begin(), q.end());
  double s = 0.0;
  for (double v : q) s += std::exp((v - m) / mu);
  return m + mu * std::log(s);
}

SimplexVec softmax(std::span<const double> q, double mu) {
  if (!(mu > 0.0)) throw Error(ErrorCode::NonPositiveTemperature, "mu must be positive");
  std::vector<double> logits(q.begin(), q.end());
  for (double& v : logits) v /= mu;
  return normalized_exp(logits);
}

SimplexVec normalized_exp(std::span<const double> logits) {
  if (logits.empty()) throw Error(ErrorCode::ShapeMismatch, "softmax of empty vector");
  const double m = *std::max_element(logits.begin(), logits.end());
  if (!std::isfinite(m)) throw Error(ErrorCode::NonFiniteGradient, "non-finite logits");
  std::vector<double> p(logits.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::exp(logits[i] - m);
  renormalize(p);
  return SimplexVec(SimplexVec::Trusted{}, std::move(p), 0.0);
}

SimplexVec truncate(const SimplexVec& x, double eps) {
  const std::size_t k = x.size();
  if (!(eps >= 0.0) || eps * static_cast<double>(k) > 1.0 + 1e-12)
    throw Error(ErrorCode::InvalidEpsilon, "eps must lie in [0, 1/K]");
  if (eps == 0.0) return SimplexVec(SimplexVec::Trusted{}, x.probs(), x.epsilon_floor());
  const auto& p = x.probs();
  if (std::all_of(p.begin(), p.end(), [eps](double v) { return v >= eps; }))
    return SimplexVec(SimplexVec::Trusted{}, p, eps);

  std::vector<bool> fixed(k, false);
  std::vector<double> y(k, eps);
  std::size_t n_fixed = 0;
  for (std::size_t pass = 0; pass <= k; ++pass) {
    double free_mass = 0.0;
    for (std::size_t i = 0; i < k; ++i)
      if (!fixed[i]) free_mass += p[i];
    const double budget = 1.0 - static_cast<double>(n_fixed) * eps;
    if (n_fixed == k || free_mass <= 0.0) {
      // every coordinate sits at the floor; only reachable when eps == 1/K
      std::fill(y.begin(), y.end(), 1.0 / static_cast<double>(k));
      break;
    }
    const double scale = budget / free_mass;
    bool changed = false;
    for (std::size_t i = 0; i < k; ++i) {
      if (fixed[i]) continue;
      y[i] = p[i] * scale;
      if (y[i] < eps) {
        fixed[i] = true;
        y[i] = eps;
        ++n_fixed;
        changed = true;
      }
    }
    if (!changed) break;
  }
  double s = std::accumulate(y.begin(), y.end(), 0.0);
  // push rounding error onto the largest coordinate so the floor stays exact
  auto top = std::max_element(y.begin(), y.end());
  *top += 1.0 - s;
  return SimplexVec(SimplexVec::Trusted{}, std::move(y), eps);
}

double l1_distance(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::ShapeMismatch, "l1 of different lengths");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += std::abs(x[i] - y[i]);
  return s;
}

double l1_distance(const SimplexVec& x, const SimplexVec& y) {
  return l1_distance(std::span<const double>(x.probs()), std::span<const double>(y.probs()));
}

double entropy_grad_bound(double eps) {
  if (!(eps > 0.0)) return std::numeric_limits<double>::infinity();
  return 1.0 + std::abs(std::log(eps));
}

SimplexVec sample_dirichlet(std::size_t k, double concentration, std::mt19937_64& rng) {
  std::gamma_distribution<double> gamma(concentration, 1.0);
  std::vector<double> p(k);
  double s = 0.0;
  do {
    s = 0.0;
    for (double& v : p) {
      v = gamma(rng);
      s += v;
    }
  } while (!(s > 0.0));
  for (double& v : p) v /= s;
  return SimplexVec(std::move(p));
}

}  // namespace aes
