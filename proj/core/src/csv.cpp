#include "dswgan/csv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dswgan {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_cells(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  cells.push_back(trim(cur));
  return cells;
}

bool parse_int64(const std::string& cell, std::int64_t& out) {
  if (cell.empty()) return false;
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(cell.c_str(), &end, 10);
  if (errno != 0 || end == cell.c_str() || *end != '\0') return false;
  out = v;
  return true;
}

}  // namespace

CountMatrix load_counts_csv(const std::string& path, double t_end) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open counts file: " + path);

  CountMatrix m;
  std::string line;
  std::size_t line_no = 0;
  std::size_t p = 0;
  bool first_data_row = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_cells(line);
    std::int64_t v = 0;
    if (first_data_row && !parse_int64(cells[0], v)) {
      // Header row; skip it.
      first_data_row = false;
      continue;
    }
    first_data_row = false;
    if (p == 0) p = cells.size();
    if (cells.size() != p)
      throw std::runtime_error(path + ": row " + std::to_string(line_no) + " has " +
                               std::to_string(cells.size()) + " columns, expected " +
                               std::to_string(p));
    CountVector row(p);
    for (std::size_t j = 0; j < p; ++j) {
      if (!parse_int64(cells[j], row[j]))
        throw std::runtime_error(path + ": row " + std::to_string(line_no) + ", column " +
                                 std::to_string(j + 1) + ": not an integer count: '" +
                                 cells[j] + "'");
      if (row[j] < 0)
        throw std::runtime_error(path + ": row " + std::to_string(line_no) + ", column " +
                                 std::to_string(j + 1) + ": negative count");
    }
    m.days.push_back(std::move(row));
  }
  if (m.days.empty()) throw std::runtime_error(path + ": no data rows");
  m.horizon.intervals = static_cast<int>(p);
  m.horizon.t_end = t_end > 0.0 ? t_end : static_cast<double>(p);
  m.validate();
  return m;
}

void save_counts_csv(const std::string& path, const CountMatrix& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (const auto& row : m.days) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out << ',';
      out << row[j];
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

EpochList load_epochs_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open epochs file: " + path);
  EpochList e;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string cell = trim(line);
    if (cell.empty()) continue;
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (errno != 0 || end == cell.c_str() || *end != '\0')
      throw std::runtime_error(path + ": row " + std::to_string(line_no) +
                               ": not a number: '" + cell + "'");
    e.times.push_back(v);
  }
  return e;
}

void save_epochs_csv(const std::string& path, const EpochList& epochs) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  char buf[40];
  for (double t : epochs.times) {
    std::snprintf(buf, sizeof buf, "%.17g", t);
    out << buf << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace dswgan
