#include "result_table.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "csv.hpp"
#include "error.hpp"

namespace matchmarket {

ResultTable::ResultTable(std::vector<std::string> columns, std::optional<std::string> label)
    : columns_(std::move(columns)), label_(std::move(label)) {}

void ResultTable::add_row(std::vector<double> values) {
  if (label_) fail(ErrorCode::InvalidInput, "table has a label column; row needs a label");
  if (values.size() != columns_.size()) fail(ErrorCode::InvalidInput, "row width mismatch");
  rows_.push_back(std::move(values));
}

void ResultTable::add_row(std::string label, std::vector<double> values) {
  if (!label_) fail(ErrorCode::InvalidInput, "table has no label column");
  if (values.size() != columns_.size()) fail(ErrorCode::InvalidInput, "row width mismatch");
  labels_.push_back(std::move(label));
  rows_.push_back(std::move(values));
}

void ResultTable::set_meta(const std::string& key, const std::string& value) {
  for (auto& [k, v] : metadata_) {
    if (k == key) {
      v = value;
      return;
    }
  }
  metadata_.emplace_back(key, value);
}

std::optional<std::string> ResultTable::meta(const std::string& key) const {
  for (const auto& [k, v] : metadata_) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::size_t ResultTable::column_index(const std::string& name) const {
  const auto it = std::find(columns_.begin(), columns_.end(), name);
  if (it == columns_.end()) fail(ErrorCode::InvalidInput, "no column named '" + name + "'");
  return static_cast<std::size_t>(it - columns_.begin());
}

double ResultTable::at(std::size_t row, const std::string& column) const {
  return rows_.at(row)[column_index(column)];
}

std::vector<double> ResultTable::column(const std::string& name) const {
  const std::size_t c = column_index(name);
  std::vector<double> out;
  out.reserve(rows_.size());
  for (const auto& r : rows_) out.push_back(r[c]);
  return out;
}

std::size_t ResultTable::find_label(const std::string& label) const {
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) fail(ErrorCode::InvalidInput, "no row labelled '" + label + "'");
  return static_cast<std::size_t>(it - labels_.begin());
}

void write_csv(const ResultTable& table, std::ostream& out) {
  for (const auto& [key, value] : table.metadata()) out << "# " << key << ": " << value << '\n';
  bool first = true;
  if (table.label_column()) {
    out << csv::quote(*table.label_column());
    first = false;
  }
  for (const auto& name : table.columns()) {
    if (!first) out << ',';
    out << csv::quote(name);
    first = false;
  }
  out << '\n';
  for (std::size_t r = 0; r < table.rows(); ++r) {
    first = true;
    if (table.label_column()) {
      out << csv::quote(table.label(r));
      first = false;
    }
    for (std::size_t c = 0; c < table.columns().size(); ++c) {
      if (!first) out << ',';
      out << csv::format_double(table.at(r, c));
      first = false;
    }
    out << '\n';
  }
}

void write_csv(const ResultTable& table, const std::filesystem::path& path) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) fail(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
  write_csv(table, file);
  file.flush();
  if (!file) fail(ErrorCode::Io, "failed writing '" + path.string() + "'");
}

ResultTable read_csv(std::istream& in) {
  std::string line;
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (line.rfind("# ", 0) == 0) {
      const auto colon = line.find(": ", 2);
      if (colon == std::string::npos) fail(ErrorCode::InvalidInput, "bad metadata line: " + line);
      meta.emplace_back(line.substr(2, colon - 2), line.substr(colon + 2));
      continue;
    }
    header = csv::split_record(line);
    break;
  }
  if (header.empty()) fail(ErrorCode::InvalidInput, "CSV has no header row");

  std::vector<std::vector<std::string>> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto rec = csv::split_record(line);
    if (rec.size() != header.size()) fail(ErrorCode::InvalidInput, "CSV row width mismatch");
    records.push_back(std::move(rec));
  }

  bool labelled = false;
  if (!records.empty()) {
    try {
      csv::parse_double(records.front().front());
    } catch (const Error&) {
      labelled = true;
    }
  } else {
    // Without rows, recognise the label column by the names write_csv uses.
    labelled = header.front() == "claim";
  }

  std::vector<std::string> columns(header.begin() + (labelled ? 1 : 0), header.end());
  ResultTable table(columns, labelled ? std::optional<std::string>(header.front()) : std::nullopt);
  for (const auto& [k, v] : meta) table.set_meta(k, v);
  for (const auto& rec : records) {
    std::vector<double> values;
    for (std::size_t i = labelled ? 1 : 0; i < rec.size(); ++i) {
      values.push_back(csv::parse_double(rec[i]));
    }
    if (labelled) {
      table.add_row(rec.front(), std::move(values));
    } else {
      table.add_row(std::move(values));
    }
  }
  return table;
}

}  // namespace matchmarket
