#pragma once

#include <string>
#include <vector>

#include "subrh/config.hpp"
#include "subrh/records.hpp"

namespace subrh {

struct RunOutcome {
  /// 0 when every verdict passes, 1 on a failed verdict or a runtime abort.
  int exit_status = 0;
  std::vector<Verdict> verdicts;
  std::string error;
};

/// Runs one scenario and writes records.csv, summary.json, manifest.json and
/// snapshots/ under config.out_dir. Outputs gathered before an abort are kept.
RunOutcome run(const RunConfig& config);

/// SHA-1 of "blob <size>\0<content>", as git computes object ids.
std::string git_blob_hash(const std::string& content);

}  // namespace subrh
