#include "cpca/csv.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace cpca {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

bool looks_like_iso_date(const std::string& s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

PanelCsv read_panel_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");

  std::string line;
  std::size_t lineno = 0;
  // skip metadata comment lines
  do {
    if (!std::getline(in, line)) throw InvalidInput(path + ": empty file");
    ++lineno;
  } while (!line.empty() && line[0] == '#');

  const auto header = split_csv_line(line);
  if (header.empty() || header.size() < 1) throw InvalidInput(path + ": missing header row");
  const bool has_date = lower(header.front()) == "date";
  const std::size_t first_col = has_date ? 1 : 0;
  const std::size_t p = header.size() - first_col;
  if (p < 1) throw InvalidInput(path + ": no data columns in header");

  PanelCsv out;
  out.panel.column_ids.assign(header.begin() + static_cast<std::ptrdiff_t>(first_col), header.end());

  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw InvalidInput(path + ":" + std::to_string(lineno) + ": expected " +
                         std::to_string(header.size()) + " fields, got " +
                         std::to_string(cells.size()));
    }
    if (has_date) out.dates.push_back(cells[0]);
    for (std::size_t j = first_col; j < cells.size(); ++j) {
      double v = 0.0;
      const char* b = cells[j].data();
      const char* e = b + cells[j].size();
      auto [ptr, ec] = std::from_chars(b, e, v);
      if (ec != std::errc() || ptr != e || !std::isfinite(v)) {
        throw InvalidInput(path + ":" + std::to_string(lineno) + ": field " + std::to_string(j + 1) +
                           " ('" + cells[j] + "') is not a finite number");
      }
      values.push_back(v);
    }
    ++rows;
  }
  if (rows < 2) throw InvalidInput(path + ": need at least 2 data rows");

  out.panel.values = Matrix(rows, p);
  std::copy(values.begin(), values.end(), out.panel.values.data());
  out.panel.validate();
  return out;
}

void write_panel_csv(const std::string& path, const DataMatrix& panel,
                     const std::vector<std::string>& dates, const std::string& meta) {
  std::ofstream outf(path);
  if (!outf) throw InvalidInput("cannot write '" + path + "'");
  if (!meta.empty()) outf << "# " << meta << "\n";
  const bool has_date = !dates.empty();
  if (has_date && dates.size() != panel.values.rows()) {
    throw InvalidInput("write_panel_csv: date count mismatch");
  }
  if (has_date) outf << "date";
  for (std::size_t j = 0; j < panel.column_ids.size(); ++j) {
    if (has_date || j > 0) outf << ",";
    outf << panel.column_ids[j];
  }
  outf << "\n";
  for (std::size_t i = 0; i < panel.values.rows(); ++i) {
    if (has_date) outf << dates[i];
    for (std::size_t j = 0; j < panel.values.cols(); ++j) {
      if (has_date || j > 0) outf << ",";
      outf << format_double(panel.values(i, j));
    }
    outf << "\n";
  }
}

void write_matrix_csv(const std::string& path, const Matrix& m,
                      const std::vector<std::string>& col_ids, const std::string& meta) {
  std::ofstream outf(path);
  if (!outf) throw InvalidInput("cannot write '" + path + "'");
  if (!meta.empty()) outf << "# " << meta << "\n";
  for (std::size_t j = 0; j < col_ids.size(); ++j) {
    if (j > 0) outf << ",";
    outf << col_ids[j];
  }
  outf << "\n";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j > 0) outf << ",";
      outf << format_double(m(i, j));
    }
    outf << "\n";
  }
}

}  // namespace cpca
