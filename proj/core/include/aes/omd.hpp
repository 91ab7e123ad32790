#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "aes/scheduler.hpp"
#include "aes/simplex.hpp"
#include "aes/trace.hpp"

namespace aes {

inline constexpr double kDefaultEpsilon = 1e-6;

// f(x) = <grad, x> + offset
struct LinearLoss {
  std::vector<double> grad;
  double offset = 0.0;

  double value(const SimplexVec& x) const;
};

struct OmdState {
  SimplexVec x;
  double eta_prev = 0.0;
  std::size_t t = 0;
};

// Exponentiated-gradient step followed by projection onto coordinates >= eps.
OmdState md_step(const OmdState& state, std::span<const double> g, double eta, double eps);

// g_f + lambda (1 + log x)
std::vector<double> regularized_grad(std::span<const double> g_f, const SimplexVec& x,
                                     double lambda);

// proxy empty: the schedule is fed the true drift ||u_t - u_{t-1}||_1.
RunTrace run_dynamic(std::span<const LinearLoss> stream, std::span<const SimplexVec> comparators,
                     ScheduleProvider& schedule, double eps, const SimplexVec& x0,
                     std::span<const double> proxy = {});

struct ExplicitConstants {
  std::size_t dim = 0;
  double grad_bound = 0.0;  // G
  double eps = 0.0;
  double c = 1.0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double mirror_bound = 0.0;  // 1 + |log eps|
  double C1 = 0.0;
  double C2 = 0.0;

  double C0(double lambda_first) const;
};

ExplicitConstants explicit_constants(std::size_t dim, double grad_bound, double eps, double c,
                                     double lambda_min, double lambda_max);

// C0 + sum_{t>=2} (C1 alpha_t / lambda_t + C2 lambda_t), with lambda_t read as eta_t / c so the
// step-size envelope is accounted for.
double bound_rhs(const RunTrace& trace, const ExplicitConstants& k);

// The pre-constant inequality evaluated on recorded quantities:
// D(u_1,x_1)/eta_1 + sum eta_t/2 |grad_t|^2 + sum_{t>=2} 2 G_psi alpha_t/eta_t + 2 log K sum lambda_t
double master_rhs(const RunTrace& trace, const ExplicitConstants& k);

}  // namespace aes
