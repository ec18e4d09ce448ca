#pragma once

#include <string>
#include <vector>

#include "ctmboost/dataset.hpp"

namespace ctm {

/// A parsed delimiter-separated table: one header row plus data rows, all
/// fields as raw text.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  Eigen::Index n_rows() const { return static_cast<Eigen::Index>(rows.size()); }
  bool has_column(const std::string& name) const;
  int column_index(const std::string& name) const;  // -1 when absent
};

/// Parse comma-separated text with double-quote quoting: quoted fields may
/// contain commas, newlines, and doubled quotes. Every row must have as
/// many fields as the header; violations are parse errors naming the line.
CsvTable parse_csv(const std::string& text);

/// Quote one field for CSV output when it contains a delimiter, quote, or
/// newline; otherwise returns it unchanged.
std::string csv_quote(const std::string& field);

/// Whole-string numeric parse ('.' decimal); empty or trailing garbage is
/// a failure.
bool parse_double(const std::string& field, double* value);

/// File round trips (io errors name the path).
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

/// One requested covariate column: its name and whether the raw labels
/// should be kept as categorical levels instead of parsed as numbers.
struct ColumnRequest {
  std::string name;
  bool categorical = false;
};

/// Assemble a Dataset from a parsed table: the requested covariate columns,
/// a response column (optional: empty name fills a zero response for
/// covariate-only evaluation), and an optional weight column. Missing or
/// unparseable numeric entries are data errors naming the file line and
/// column. An absent column is a configuration error (the name came from a
/// configuration or model document) listing the columns the file does have.
Dataset dataset_from_table(const CsvTable& table,
                           const std::vector<ColumnRequest>& covariates,
                           const std::string& response,
                           const std::string& weight);

}  // namespace ctm
