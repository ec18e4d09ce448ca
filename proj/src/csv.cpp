#include "ctmboost/csv.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace ctm {

bool CsvTable::has_column(const std::string& name) const {
  return column_index(name) >= 0;
}

int CsvTable::column_index(const std::string& name) const {
  for (std::size_t j = 0; j < header.size(); ++j)
    if (header[j] == name) return static_cast<int>(j);
  return -1;
}

namespace {

/// Split one logical CSV record starting at `pos`. Advances `pos` past the
/// record's newline. `line` tracks the physical line number for messages.
std::vector<std::string> next_record(const std::string& text, std::size_t* pos,
                                     std::size_t* line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  const std::size_t start_line = *line;
  std::size_t i = *pos;
  while (true) {
    if (i >= text.size()) {
      if (quoted)
        fail(ErrorKind::parse, "unterminated quoted field starting on line " +
                                   std::to_string(start_line));
      fields.push_back(field);
      break;
    }
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          i += 2;
          continue;
        }
        quoted = false;
        ++i;
        continue;
      }
      if (c == '\n') ++*line;
      field += c;
      ++i;
      continue;
    }
    if (c == '"' && field.empty()) {
      quoted = true;
      ++i;
      continue;
    }
    if (c == ',') {
      fields.push_back(field);
      field.clear();
      ++i;
      continue;
    }
    if (c == '\n') {
      if (!field.empty() && field.back() == '\r') field.pop_back();
      fields.push_back(field);
      ++i;
      ++*line;
      break;
    }
    field += c;
    ++i;
  }
  *pos = i;
  return fields;
}

}  // namespace

CsvTable parse_csv(const std::string& text) {
  if (text.empty()) fail(ErrorKind::parse, "empty document: a header row is required");
  CsvTable table;
  std::size_t pos = 0;
  std::size_t line = 1;
  table.header = next_record(text, &pos, &line);
  while (pos < text.size()) {
    // A lone trailing newline is not a row.
    if (text.compare(pos, std::string::npos, "\n") == 0) break;
    const std::size_t row_line = line;
    std::vector<std::string> fields = next_record(text, &pos, &line);
    if (fields.size() != table.header.size())
      fail(ErrorKind::parse,
           "line " + std::to_string(row_line) + " has " +
               std::to_string(fields.size()) + " fields, expected " +
               std::to_string(table.header.size()));
    table.rows.push_back(std::move(fields));
  }
  return table;
}

std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string quoted = "\"";
  for (char c : field) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

bool parse_double(const std::string& field, double* value) {
  if (field.empty()) return false;
  errno = 0;
  char* end = nullptr;
  const double parsed = std::strtod(field.c_str(), &end);
  if (end != field.c_str() + field.size() || errno == ERANGE) return false;
  *value = parsed;
  return true;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open '" + path + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) fail(ErrorKind::io, "read failure on '" + path + "'");
  return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io, "cannot open '" + path + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) fail(ErrorKind::io, "write failure on '" + path + "'");
}

namespace {

double parse_numeric_cell(const CsvTable& table, Eigen::Index row, int column,
                          const std::string& what) {
  const std::string& field = table.rows[row][column];
  double value = 0.0;
  if (!parse_double(field, &value)) {
    // Header is line 1, so data row r sits on file line r + 2.
    const std::string line = std::to_string(row + 2);
    if (field.empty())
      fail(ErrorKind::data,
           "missing value on line " + line + " in column '" + what + "'");
    fail(ErrorKind::data, "cannot parse '" + field + "' on line " + line +
                              " in column '" + what + "' as a number");
  }
  return value;
}

int require_column(const CsvTable& table, const std::string& name,
                   const std::string& role) {
  const int index = table.column_index(name);
  if (index < 0)
    // The name came from the configuration (or the model document), so a
    // mismatch is a configuration error, not bad data.
    fail(ErrorKind::config, "the data file has no column '" + name + "' (" +
                              role + "); available columns: " +
                              [&] {
                                std::string list;
                                for (std::size_t j = 0; j < table.header.size(); ++j) {
                                  if (j) list += ", ";
                                  list += "'" + table.header[j] + "'";
                                }
                                return list;
                              }());
  return index;
}

}  // namespace

Dataset dataset_from_table(const CsvTable& table,
                           const std::vector<ColumnRequest>& covariates,
                           const std::string& response,
                           const std::string& weight) {
  const Eigen::Index n = table.n_rows();
  if (n == 0) fail(ErrorKind::data, "the data file has no rows");

  Dataset data;
  for (const ColumnRequest& request : covariates) {
    const int index = require_column(table, request.name, "covariate");
    Column column;
    column.name = request.name;
    column.categorical = request.categorical;
    if (request.categorical) {
      column.labels.reserve(static_cast<std::size_t>(n));
      for (Eigen::Index i = 0; i < n; ++i) {
        const std::string& field = table.rows[i][index];
        if (field.empty())
          fail(ErrorKind::data, "missing value on line " + std::to_string(i + 2) +
                                    " in column '" + request.name + "'");
        column.labels.push_back(field);
      }
    } else {
      column.numeric.resize(n);
      for (Eigen::Index i = 0; i < n; ++i)
        column.numeric[i] = parse_numeric_cell(table, i, index, request.name);
    }
    data.columns.push_back(std::move(column));
  }

  if (response.empty()) {
    data.response = Eigen::VectorXd::Zero(n);
  } else {
    const int index = require_column(table, response, "response");
    data.response_name = response;
    data.response.resize(n);
    for (Eigen::Index i = 0; i < n; ++i)
      data.response[i] = parse_numeric_cell(table, i, index, response);
  }

  if (!weight.empty()) {
    const int index = require_column(table, weight, "weights");
    data.weights.resize(n);
    for (Eigen::Index i = 0; i < n; ++i)
      data.weights[i] = parse_numeric_cell(table, i, index, weight);
  }

  data.validate();
  return data;
}

}  // namespace ctm
