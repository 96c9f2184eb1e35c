#pragma once

#include <cstddef>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "otaform/engine.hpp"
#include "otaform/error.hpp"

namespace otaform {

// Trace CSV: one row per instant,
//   k,t,mse,delta,ota_count,n2n_count, p{i}_x,p{i}_y,r{i}_x,r{i}_y (i = 0..n-1),
//   H{i}_{j} row-major (empty on the final instant, which has no update).
// Path CSV: k,agent,sample,t_rel,x,y.
// Reals use 17 significant digits so a read-back is exact.

namespace csv {

inline std::string real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double to_real(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw ValidationError("malformed number '" + s + "' in trace");
  return v;
}

}  // namespace csv

inline void write_trace_csv(std::ostream& os, const SimTrace& trace) {
  const std::size_t n = trace.n;
  os << "k,t,mse,delta,ota_count,n2n_count";
  for (std::size_t i = 0; i < n; ++i) os << ",p" << i << "_x,p" << i << "_y,r" << i << "_x,r" << i << "_y";
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) os << ",H" << i << '_' << j;
  }
  os << '\n';
  for (const auto& r : trace.records) {
    os << r.k << ',' << csv::real(r.t) << ',' << csv::real(r.mse) << ',' << csv::real(r.delta) << ','
       << r.ledger.ota_count << ',' << r.ledger.n2n_count;
    for (std::size_t i = 0; i < n; ++i) {
      os << ',' << csv::real(r.positions[i].x()) << ',' << csv::real(r.positions[i].y()) << ','
         << csv::real(r.refs[i].x()) << ',' << csv::real(r.refs[i].y());
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        os << ',';
        if (r.h) os << csv::real((*r.h)(i, j));
      }
    }
    os << '\n';
  }
}

inline void write_paths_csv(std::ostream& os, const SimTrace& trace) {
  os << "k,agent,sample,t_rel,x,y\n";
  for (std::size_t k = 0; k < trace.paths.size(); ++k) {
    for (std::size_t i = 0; i < trace.paths[k].size(); ++i) {
      const auto& path = trace.paths[k][i];
      for (std::size_t s = 0; s < path.size(); ++s) {
        os << k << ',' << i << ',' << s << ',' << csv::real(path[s].t) << ',' << csv::real(path[s].p.x()) << ','
           << csv::real(path[s].p.y()) << '\n';
      }
    }
  }
}

/// Rebuilds a trace from the two CSV streams. The formation is not part of the
/// files; the stored mse and delta columns carry everything derived from it.
inline SimTrace read_trace_csv(std::istream& trace_in, std::istream& paths_in) {
  SimTrace trace;
  std::string line;
  if (!std::getline(trace_in, line)) throw ValidationError("trace CSV is empty");
  const auto header = csv::split(line);
  // 6 fixed columns + 4n agent columns + n^2 matrix columns.
  std::size_t n = 0;
  while (6 + 4 * n + n * n < header.size()) ++n;
  if (n == 0 || 6 + 4 * n + n * n != header.size()) throw ValidationError("trace CSV header has unexpected width");
  trace.n = n;

  while (std::getline(trace_in, line)) {
    if (line.empty()) continue;
    const auto cells = csv::split(line);
    if (cells.size() != header.size()) throw ValidationError("trace CSV row has wrong width");
    InstantRecord r;
    r.k = std::stoull(cells[0]);
    r.t = csv::to_real(cells[1]);
    r.mse = csv::to_real(cells[2]);
    r.delta = csv::to_real(cells[3]);
    r.ledger.ota_count = std::stoull(cells[4]);
    r.ledger.n2n_count = std::stoull(cells[5]);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t c = 6 + 4 * i;
      r.positions.emplace_back(csv::to_real(cells[c]), csv::to_real(cells[c + 1]));
      r.refs.emplace_back(csv::to_real(cells[c + 2]), csv::to_real(cells[c + 3]));
    }
    const std::size_t h0 = 6 + 4 * n;
    if (!cells[h0].empty()) {
      Eigen::MatrixXd h(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = csv::to_real(cells[h0 + i * n + j]);
        }
      }
      r.h = RowStochasticMatrix(std::move(h));
    }
    trace.records.push_back(std::move(r));
  }
  // The ledger counts updates; the instant count is recoverable from the matrices.
  std::uint64_t updates = 0;
  for (auto& r : trace.records) {
    if (r.h) ++updates;
    r.ledger.instants = updates;
  }

  trace.paths.resize(static_cast<std::size_t>(updates), std::vector<std::vector<PathSample>>(n));
  if (!std::getline(paths_in, line)) throw ValidationError("path CSV is empty");
  while (std::getline(paths_in, line)) {
    if (line.empty()) continue;
    const auto cells = csv::split(line);
    if (cells.size() != 6) throw ValidationError("path CSV row has wrong width");
    const std::size_t k = std::stoull(cells[0]);
    const std::size_t i = std::stoull(cells[1]);
    if (k >= trace.paths.size() || i >= n) throw ValidationError("path CSV row out of range");
    trace.paths[k][i].push_back({csv::to_real(cells[3]), Vec2(csv::to_real(cells[4]), csv::to_real(cells[5]))});
  }
  return trace;
}

}  // namespace otaform
