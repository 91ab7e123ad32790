#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "aes/error.hpp"
#include "aes/trace.hpp"
#include "aes/version.hpp"

namespace aes {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trace_csv(const RunTrace& trace, bool rl_columns) {
  std::ostringstream out;
  out << "# aes " << kVersion << "\n";
  out << "t,lambda,eta,alpha,proxy,regret_inc,regret_cum";
  if (rl_columns) out << ",eval_return,regret_rl_inc,pattern,seed";
  out << "\n";
  for (const auto& r : trace.rows) {
    out << r.t << ',' << format_double(r.lambda) << ',' << format_double(r.eta) << ','
        << format_double(r.alpha) << ',' << format_double(r.proxy) << ','
        << format_double(r.regret_inc) << ',' << format_double(r.regret_cum);
    if (rl_columns)
      out << ',' << format_double(r.eval_return) << ',' << format_double(r.regret_rl_inc) << ','
          << trace.pattern << ',' << trace.seed;
    out << "\n";
  }
  return out.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + path.parent_path().string());
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::IoError, "cannot open " + tmp.string());
    f << contents;
    f.flush();
    if (!f) throw Error(ErrorCode::IoError, "write failed for " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::IoError, "rename to " + path.string() + " failed");
}

}  // namespace aes
