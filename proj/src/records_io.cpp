#include "subrh/records_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace subrh {

std::size_t RecordTable::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw std::out_of_range("no column named " + name);
  return static_cast<std::size_t>(it - columns.begin());
}

bool RecordTable::has_column(const std::string& name) const {
  return std::find(columns.begin(), columns.end(), name) != columns.end();
}

void RecordTable::add_row(std::vector<double> row) {
  if (row.size() != columns.size())
    throw std::invalid_argument("row has " + std::to_string(row.size()) + " values for " +
                                std::to_string(columns.size()) + " columns");
  rows.push_back(std::move(row));
}

RecordTable flow_table(std::span<const DiagnosticsRecord> records) {
  RecordTable t;
  t.columns = {"t", "E_H", "E_R", "E", "tau_l2", "tau_sup", "rho_l2"};
  if (records.empty()) return t;
  for (const auto& v : records.front().verdicts) t.columns.push_back(v.name);
  for (const auto& r : records) {
    if (r.verdicts.size() != records.front().verdicts.size())
      throw std::invalid_argument("records carry differing verdict sets");
    std::vector<double> row{r.t, r.e_h, r.e_r, r.e_total, r.tau_l2, r.tau_sup, r.rho_l2};
    for (const auto& v : r.verdicts) row.push_back(v.slack);
    t.add_row(std::move(row));
  }
  return t;
}

std::string format_number(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of −0
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const RecordTable& table) {
  for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << table.columns[c];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_number(row[c]);
    out << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const RecordTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_csv(out, table);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

RecordTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open records file " + path.string());
  RecordTable t;
  std::string line;
  if (!std::getline(in, line) || line.empty()) return t;
  t.columns = split(line);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != t.columns.size())
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": expected " +
                               std::to_string(t.columns.size()) + " values");
    std::vector<double> row;
    for (const auto& c : cells) {
      try {
        row.push_back(std::stod(c));
      } catch (const std::exception&) {
        throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": bad number '" + c + "'");
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace subrh
