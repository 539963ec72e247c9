#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fwstack/timeseries.hpp"

namespace fwstack {

/// One validated data row: a province (possibly empty) of a country plus the
/// integer cumulative counts, one per date column.
struct SnapshotRow {
    std::string province;
    std::string country;
    std::vector<long long> counts;
};

struct RawSnapshot {
    std::string path;
    std::vector<Days> dates;           // contiguous, chronological
    std::vector<SnapshotRow> rows;
    std::vector<std::string> diagnostics; // malformed rows, one message each

    std::vector<std::string> countries() const; // unique, in first-seen order
};

/// Parse the cumulative-confirmed CSV snapshot (quoted fields allowed).
/// Throws UnreadableFile or HeaderMismatch; malformed data rows go to
/// `diagnostics` instead of aborting the load.
RawSnapshot load_snapshot(const std::string& path);

/// Sum all province rows of one country into a national series (integer
/// arithmetic). Unknown regions raise UnknownRegion with a nearest-name
/// suggestion. Sets *monotonicity_warning when the cumulative series
/// decreases anywhere (upstream corrections).
TimeSeries country_series(const RawSnapshot& snapshot, const std::string& region_id,
                          bool* monotonicity_warning = nullptr);

/// Replace decreases with the previous value (optional repair pass for
/// upstream data corrections).
TimeSeries repair_monotonicity(const TimeSeries& series);

/// FNV-1a 64-bit checksum of a file, for the reproducibility manifest.
std::uint64_t file_checksum(const std::string& path);

} // namespace fwstack
