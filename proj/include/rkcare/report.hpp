#pragma once

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include <json.hpp>

#include "rkcare/matrix_market.hpp"
#include "rkcare/projector.hpp"

namespace rkcare {

namespace report_detail {

inline std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace report_detail

inline nlohmann::json history_to_json(const ConvergenceHistory& history) {
  nlohmann::json rows = nlohmann::json::array();
  for (const StepRecord& r : history) {
    nlohmann::json row;
    row["j"] = r.j;
    row["dim"] = r.dim;
    row["rel_residual"] = std::isfinite(r.rel_residual) ? nlohmann::json(r.rel_residual)
                                                        : nlohmann::json(nullptr);
    row["r"] = r.trunc_rank;
    row["trunc_rel_residual"] = std::isfinite(r.trunc_rel_residual)
                                    ? nlohmann::json(r.trunc_rel_residual)
                                    : nlohmann::json(nullptr);
    row["cond_LtK"] = std::isfinite(r.cond_LtK) ? nlohmann::json(r.cond_LtK)
                                                : nlohmann::json(nullptr);
    row["seconds"] = r.seconds;
    row["solve_failed"] = r.solve_failed;
    row["shift_skipped"] = r.shift_skipped;
    row["projection_failed"] = r.projection_failed;
    rows.push_back(row);
  }
  return rows;
}

inline void write_history_json(const std::string& path, const ConvergenceHistory& history,
                               const nlohmann::json& config_echo) {
  nlohmann::json doc;
  doc["schema"] = "rkcare-history-v1";
  doc["config"] = config_echo;
  doc["steps"] = history_to_json(history);
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path);
  os << doc.dump(2) << "\n";
}

// Deterministic CSV (timings excluded so reruns are byte-identical).
inline void write_history_csv(const std::string& path, const ConvergenceHistory& history,
                              const std::string& key = "") {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path);
  os << (key.empty() ? "" : "choice,") << "j,dim,rel_residual,r,trunc_rel_residual,cond_LtK\n";
  for (const StepRecord& r : history) {
    if (!key.empty()) os << key << ",";
    os << r.j << "," << r.dim << "," << report_detail::fmt(r.rel_residual) << "," << r.trunc_rank
       << "," << report_detail::fmt(r.trunc_rel_residual) << ","
       << report_detail::fmt(r.cond_LtK) << "\n";
  }
}

// Portable binary solution layout (documented in the README):
//   bytes 0..7   magic "RKSOLV01"
//   uint64 n, uint64 q
//   Z: n*q complex<double> column-major
//   Y: q*q complex<double> column-major
//   uint64 len, followed by len bytes of JSON metadata
inline void write_solution_binary(const std::string& path, const Matrix& Z, const Matrix& Y,
                                  const nlohmann::json& metadata) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path);
  os.write("RKSOLV01", 8);
  const std::uint64_t n = Z.rows(), q = Z.cols();
  os.write(reinterpret_cast<const char*>(&n), 8);
  os.write(reinterpret_cast<const char*>(&q), 8);
  os.write(reinterpret_cast<const char*>(Z.data()), static_cast<std::streamsize>(16 * n * q));
  os.write(reinterpret_cast<const char*>(Y.data()), static_cast<std::streamsize>(16 * q * q));
  const std::string meta = metadata.dump();
  const std::uint64_t len = meta.size();
  os.write(reinterpret_cast<const char*>(&len), 8);
  os.write(meta.data(), static_cast<std::streamsize>(len));
}

inline void write_solution_matrix_market(const std::string& z_path, const std::string& y_path,
                                         const Matrix& Z, const Matrix& Y) {
  write_matrix_market_dense(z_path, Z);
  write_matrix_market_dense(y_path, Y);
}

}  // namespace rkcare
