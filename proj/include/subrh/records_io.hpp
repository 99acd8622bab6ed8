#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "subrh/records.hpp"

namespace subrh {

/// Named columns of doubles; the on-disk form of every scenario's samples.
struct RecordTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const;
  bool has_column(const std::string& name) const;
  void add_row(std::vector<double> row);
};

/// Flow records: t, E_H, E_R, E, tau_l2, tau_sup, rho_l2, then one column per
/// verdict of the first record (named after the verdict). Every record must
/// carry the same verdicts.
RecordTable flow_table(std::span<const DiagnosticsRecord> records);

/// Shortest decimal form that reads back to the same double.
std::string format_number(double v);

void write_csv(std::ostream& out, const RecordTable& table);
void write_csv(const std::filesystem::path& path, const RecordTable& table);

/// Throws std::runtime_error on missing files or ragged rows.
RecordTable read_csv(const std::filesystem::path& path);

}  // namespace subrh
