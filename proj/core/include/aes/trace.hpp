#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "aes/simplex.hpp"

namespace aes {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct TraceRow {
  std::size_t t = 0;
  double lambda = kNaN;
  double eta = kNaN;
  double alpha = kNaN;
  double proxy = kNaN;
  double regret_inc = kNaN;
  double regret_cum = kNaN;
  double grad_norm = kNaN;  // sup-norm of the regularized gradient at x_t
  double eval_return = kNaN;
  double regret_rl_inc = kNaN;
};

struct RunTrace {
  std::vector<TraceRow> rows;
  std::vector<SimplexVec> iterates;
  double initial_bregman = kNaN;  // D(u_1, x_1)
  std::size_t dim = 0;
  std::string pattern;
  std::int64_t seed = 0;
};

std::string format_double(double v);

// Base columns: t, lambda, eta, alpha, proxy, regret_inc, regret_cum.
// With rl_columns: eval_return, regret_rl_inc, pattern, seed appended.
std::string trace_csv(const RunTrace& trace, bool rl_columns);

// Writes to a sibling temp file, then renames over the target.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace aes
