#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace matchmarket {

/// Column-oriented numeric table with an optional leading text column and a
/// metadata block. Written as CSV with the metadata as '#' comment lines.
class ResultTable {
 public:
  ResultTable() = default;
  explicit ResultTable(std::vector<std::string> columns, std::optional<std::string> label = {});

  void add_row(std::vector<double> values);
  void add_row(std::string label, std::vector<double> values);

  void set_meta(const std::string& key, const std::string& value);
  std::optional<std::string> meta(const std::string& key) const;
  const std::vector<std::pair<std::string, std::string>>& metadata() const { return metadata_; }

  std::size_t rows() const { return rows_.size(); }
  const std::vector<std::string>& columns() const { return columns_; }
  const std::optional<std::string>& label_column() const { return label_; }

  std::size_t column_index(const std::string& name) const;
  double at(std::size_t row, const std::string& column) const;
  double at(std::size_t row, std::size_t column) const { return rows_[row][column]; }
  std::vector<double> column(const std::string& name) const;
  const std::string& label(std::size_t row) const { return labels_[row]; }
  /// Row whose label equals the given text; throws InvalidInput if absent.
  std::size_t find_label(const std::string& label) const;

 private:
  std::vector<std::string> columns_;
  std::optional<std::string> label_;
  std::vector<std::string> labels_;
  std::vector<std::vector<double>> rows_;
  std::vector<std::pair<std::string, std::string>> metadata_;
};

void write_csv(const ResultTable& table, std::ostream& out);
/// Throws Io with the path on failure.
void write_csv(const ResultTable& table, const std::filesystem::path& path);

/// Reads back what write_csv produced. A leading non-numeric column is
/// treated as the label column.
ResultTable read_csv(std::istream& in);

}  // namespace matchmarket
