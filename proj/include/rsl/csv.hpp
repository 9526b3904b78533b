#pragma once
// csv.hpp -- comma-separated trajectory serialization.
//
// Numbers are written with 17 significant digits, enough to reproduce every
// double bit-exactly on re-read, so a write/read/write cycle yields
// byte-identical files.  The trajectory schema is fixed:
//   t, p[i].x|y|z ..., v[i].x|y|z ..., e[k] ..., mu_hat[k] ..., s[i] ...
// with agents and edges in index order (1-based labels) and the mu_hat block
// present only when the run tracked estimates.

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "rsl/graph.hpp"
#include "rsl/mat.hpp"
#include "rsl/sim.hpp"

namespace rsl {

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<Vec> rows;
};

inline std::string format_full(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_csv(std::ostream& os, const CsvTable& table) {
  for (std::size_t j = 0; j < table.columns.size(); ++j)
    os << (j ? "," : "") << table.columns[j];
  os << "\n";
  for (const Vec& row : table.rows) {
    if (row.size() != table.columns.size()) throw InvalidInput("write_csv: ragged row");
    for (std::size_t j = 0; j < row.size(); ++j) os << (j ? "," : "") << format_full(row[j]);
    os << "\n";
  }
}

inline CsvTable read_csv(std::istream& is) {
  CsvTable table;
  std::string line;
  if (!std::getline(is, line)) throw InvalidInput("read_csv: empty input");
  std::istringstream head(line);
  std::string cell;
  while (std::getline(head, cell, ',')) table.columns.push_back(cell);
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    Vec row;
    std::istringstream cells(line);
    while (std::getline(cells, cell, ',')) {
      char* end = nullptr;
      const double x = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0')
        throw InvalidInput("read_csv: line " + std::to_string(lineno) + ": bad number '" + cell +
                           "'");
      row.push_back(x);
    }
    if (row.size() != table.columns.size())
      throw InvalidInput("read_csv: line " + std::to_string(lineno) + ": wrong column count");
    table.rows.push_back(std::move(row));
  }
  return table;
}

inline int csv_column(const CsvTable& table, const std::string& name) {
  for (std::size_t j = 0; j < table.columns.size(); ++j)
    if (table.columns[j] == name) return static_cast<int>(j);
  throw InvalidInput("csv: no column named '" + name + "'");
}

// Lay a recorded trajectory out in the fixed schema above.
inline CsvTable trajectory_table(const FormationGraph& g, const ShapeSpec& shape,
                                 const Trajectory& traj) {
  static const char axis[3] = {'x', 'y', 'z'};
  CsvTable table;
  table.columns.push_back("t");
  for (int i = 0; i < traj.n; ++i)
    for (int d = 0; d < traj.m; ++d)
      table.columns.push_back("p[" + std::to_string(i + 1) + "]." + axis[d]);
  for (int i = 0; i < traj.n; ++i)
    for (int d = 0; d < traj.m; ++d)
      table.columns.push_back("v[" + std::to_string(i + 1) + "]." + axis[d]);
  for (int k = 0; k < traj.edge_count; ++k)
    table.columns.push_back("e[" + std::to_string(k + 1) + "]");
  if (traj.has_estimate)
    for (int k = 0; k < traj.edge_count; ++k)
      table.columns.push_back("mu_hat[" + std::to_string(k + 1) + "]");
  for (int i = 0; i < traj.n; ++i) table.columns.push_back("s[" + std::to_string(i + 1) + "]");

  for (std::size_t j = 0; j < traj.samples(); ++j) {
    Vec row;
    row.reserve(table.columns.size());
    row.push_back(traj.t[j]);
    for (double x : traj.p[j]) row.push_back(x);
    for (double x : traj.v[j]) row.push_back(x);
    const Vec e = distance_errors(g, shape, traj.p[j]);
    for (double x : e) row.push_back(x);
    if (traj.has_estimate)
      for (double x : traj.mu_hat[j]) row.push_back(x);
    for (int i = 0; i < traj.n; ++i)
      row.push_back(norm(segment(traj.v[j], static_cast<std::size_t>(i) * traj.m, traj.m)));
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace rsl
