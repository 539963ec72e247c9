#pragma once

#include <string>

#include "fwstack/pipeline.hpp"

namespace fwstack {

/// Regenerate the derived report files (leaderboard.tsv, score_table_h*.tsv,
/// plot_*.tsv) from the raw files in a completed run directory, and return
/// the rendered text tables. A pure function of the directory contents:
/// rendering twice changes nothing. Throws IncompleteRun when raw files are
/// missing.
std::string render_report(const std::string& run_dir);

} // namespace fwstack
