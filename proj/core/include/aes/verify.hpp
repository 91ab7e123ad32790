#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <algorithm>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "aes/error.hpp"

namespace aes {

struct CheckReport {
  std::string name;
  std::size_t samples = 0;
  double max_violation = 0.0;  // > 0 violated by that much; <= 0 is slack
  double tolerance = 0.0;
  bool passed = false;
  std::string worst_case;  // JSON of the worst sample
};

namespace detail {

template <class Sampler, class Measure, class Describe>
CheckReport run_check(std::string name, Sampler&& sampler, Measure&& measure, Describe&& describe,
                      std::size_t n, double tol, std::uint64_t seed) {
  if (n == 0) throw Error(ErrorCode::SamplerFailure, name + ": needs at least one sample");
  std::mt19937_64 rng(seed);
  CheckReport rep;
  rep.name = std::move(name);
  rep.tolerance = tol;
  rep.max_violation = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    auto sample = [&] {
      try {
        return sampler(rng);
      } catch (const std::exception& e) {
        throw Error(ErrorCode::SamplerFailure, rep.name + ": " + e.what());
      }
    }();
    double v = measure(sample);
    if (std::isnan(v)) v = std::numeric_limits<double>::infinity();
    if (rep.worst_case.empty() || v > rep.max_violation) {
      rep.max_violation = v;
      rep.worst_case = describe(sample);
    }
    ++rep.samples;
  }
  rep.passed = rep.max_violation <= tol;
  return rep;
}

}  // namespace detail

// max |lhs - rhs| over n seeded samples.
template <class Lhs, class Rhs, class Sampler, class Describe>
CheckReport check_identity(std::string name, Lhs&& lhs, Rhs&& rhs, Sampler&& sampler,
                           std::size_t n, double tol, std::uint64_t seed, Describe&& describe) {
  return detail::run_check(
      std::move(name), sampler, [&](const auto& s) { return std::abs(lhs(s) - rhs(s)); },
      describe, n, tol, seed);
}

// max (lhs - rhs) over n seeded samples.
template <class Lhs, class Rhs, class Sampler, class Describe>
CheckReport check_inequality(std::string name, Lhs&& lhs, Rhs&& rhs, Sampler&& sampler,
                             std::size_t n, double tol, std::uint64_t seed, Describe&& describe) {
  return detail::run_check(
      std::move(name), sampler, [&](const auto& s) { return lhs(s) - rhs(s); }, describe, n, tol,
      seed);
}

struct SuiteOptions {
  double tradeoff_c2_scale = 1.0;  // scales C2 inside the tradeoff-bound check only
  std::size_t oco_streams = 100;
  std::size_t oco_horizon = 1000;
};

std::vector<CheckReport> identity_checks(std::uint64_t seed);
std::vector<CheckReport> inequality_checks(std::uint64_t seed);
std::vector<CheckReport> regret_checks(std::uint64_t seed, const SuiteOptions& opts = {});
std::vector<CheckReport> offline_checks(std::uint64_t seed);

// Every check above; failures are reported, never thrown.
std::vector<CheckReport> run_suite(std::uint64_t seed, const SuiteOptions& opts = {});

std::string reports_to_json(const std::vector<CheckReport>& reports);
std::vector<CheckReport> reports_from_json(const std::string& text);
std::string reports_table(const std::vector<CheckReport>& reports);

}  // namespace aes
