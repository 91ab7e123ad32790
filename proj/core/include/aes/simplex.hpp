#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

namespace aes {

// Probability vector on the K-simplex, optionally floored at epsilon_floor.
class SimplexVec {
 public:
  SimplexVec() = default;
  // Validates (nonnegative, finite, sums to 1 within 1e-9), then renormalizes.
  explicit SimplexVec(std::vector<double> probs, double epsilon_floor = 0.0);

  static SimplexVec uniform(std::size_t k);
  static SimplexVec vertex(std::size_t k, std::size_t i);

  std::size_t size() const { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  const std::vector<double>& probs() const { return p_; }
  double epsilon_floor() const { return floor_; }
  bool interior() const;

 private:
  struct Trusted {};
  SimplexVec(Trusted, std::vector<double> p, double floor);

  friend SimplexVec truncate(const SimplexVec&, double);
  friend SimplexVec softmax(std::span<const double>, double);
  friend SimplexVec normalized_exp(std::span<const double>);

  std::vector<double> p_;
  double floor_ = 0.0;
};

double neg_entropy(const SimplexVec& x);
double kl_div(const SimplexVec& x, const SimplexVec& y);
double bregman_neg_entropy(const SimplexVec& x, const SimplexVec& y);

// mu * log sum exp(q / mu), max-shifted.
double log_sum_exp(std::span<const double> q, double mu);
SimplexVec softmax(std::span<const double> q, double mu);
// exp(logits) normalized; -inf entries map to 0.
SimplexVec normalized_exp(std::span<const double> logits);

// Bregman (KL) projection onto coordinates >= eps. eps == 0 returns x.
SimplexVec truncate(const SimplexVec& x, double eps);

double l1_distance(const SimplexVec& x, const SimplexVec& y);
double l1_distance(std::span<const double> x, std::span<const double> y);

// sup of |1 + log x_i| over the floored simplex
double entropy_grad_bound(double eps);

SimplexVec sample_dirichlet(std::size_t k, double concentration, std::mt19937_64& rng);

}  // namespace aes
