#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cpca/matrix.hpp"
#include "cpca/pca.hpp"

namespace cpca {

struct PanelCsv {
  DataMatrix panel;
  std::vector<std::string> dates;  // empty when the file has no date column
};

// Header row required. A leading "date" column (by name, case-insensitive)
// holds row labels; every other cell must parse as a finite number.
// Parse failures name the line.
PanelCsv read_panel_csv(const std::string& path);

// `meta` becomes a single leading comment line ("# ...") when non-empty.
void write_panel_csv(const std::string& path, const DataMatrix& panel,
                     const std::vector<std::string>& dates, const std::string& meta);

void write_matrix_csv(const std::string& path, const Matrix& m,
                      const std::vector<std::string>& col_ids, const std::string& meta);

// ISO-8601 calendar date check (YYYY-MM-DD).
bool looks_like_iso_date(const std::string& s);

std::string format_double(double v);

}  // namespace cpca
