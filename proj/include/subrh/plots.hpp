#pragma once

#include <filesystem>
#include <vector>

namespace subrh {

/// Writes gnuplot scripts for a records.csv into out_dir: energy (or
/// homotopy profile) against t or s, log-log kernel decay and ball volume
/// with the fitted slope from the neighbouring summary.json, map distance
/// against t, and Picard ratios against the horizon. Nothing is rendered.
/// Throws when the records are missing, empty or have no plottable columns;
/// no file is left behind in that case.
std::vector<std::filesystem::path> emit_plots(const std::filesystem::path& records,
                                              const std::filesystem::path& out_dir);

}  // namespace subrh
