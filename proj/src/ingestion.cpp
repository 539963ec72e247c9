#include "fwstack/ingestion.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "fwstack/errors.hpp"

namespace fwstack {

namespace {

// RFC-4180 style field splitting; country names contain commas.
std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(current);
            current.clear();
        } else if (ch != '\r') {
            current += ch;
        }
    }
    fields.push_back(current);
    return fields;
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::size_t sub = prev[j - 1] + (std::tolower(a[i - 1]) == std::tolower(b[j - 1]) ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

} // namespace

std::vector<std::string> RawSnapshot::countries() const {
    std::vector<std::string> out;
    for (const auto& row : rows)
        if (std::find(out.begin(), out.end(), row.country) == out.end()) out.push_back(row.country);
    return out;
}

RawSnapshot load_snapshot(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UnreadableFile("cannot open snapshot: " + path);

    RawSnapshot snap;
    snap.path = path;

    std::string line;
    if (!std::getline(in, line)) throw HeaderMismatch("snapshot is empty: " + path);
    auto header = split_csv_line(line);
    const char* expected[4] = {"Province/State", "Country/Region", "Lat", "Long"};
    if (header.size() < 5) throw HeaderMismatch("snapshot header has no date columns");
    for (int i = 0; i < 4; ++i)
        if (header[static_cast<std::size_t>(i)] != expected[i])
            throw HeaderMismatch("snapshot header column " + std::to_string(i) + " is '" +
                                 header[static_cast<std::size_t>(i)] + "', expected '" + expected[i] + "'");

    snap.dates.reserve(header.size() - 4);
    for (std::size_t i = 4; i < header.size(); ++i) snap.dates.push_back(parse_date_mdy(header[i]));
    for (std::size_t i = 1; i < snap.dates.size(); ++i)
        if (snap.dates[i] != snap.dates[i - 1] + std::chrono::days(1))
            throw HeaderMismatch("snapshot date columns are not contiguous at column " +
                                 std::to_string(i + 4));

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            snap.diagnostics.push_back("line " + std::to_string(line_no) + ": expected " +
                                       std::to_string(header.size()) + " fields, got " +
                                       std::to_string(fields.size()));
            continue;
        }
        SnapshotRow row;
        row.province = fields[0];
        row.country = fields[1];
        row.counts.reserve(snap.dates.size());
        bool bad = false;
        for (std::size_t i = 4; i < fields.size(); ++i) {
            try {
                std::size_t used = 0;
                long long v = std::stoll(fields[i], &used);
                if (used != fields[i].size()) throw std::invalid_argument("trailing junk");
                if (v < 0) {
                    snap.diagnostics.push_back("line " + std::to_string(line_no) + " (" + row.country +
                                               "): negative count " + fields[i]);
                    bad = true;
                    break;
                }
                row.counts.push_back(v);
            } catch (const std::exception&) {
                snap.diagnostics.push_back("line " + std::to_string(line_no) + " (" + row.country +
                                           "): unparseable cell '" + fields[i] + "'");
                bad = true;
                break;
            }
        }
        if (!bad) snap.rows.push_back(std::move(row));
    }
    return snap;
}

TimeSeries country_series(const RawSnapshot& snapshot, const std::string& region_id,
                          bool* monotonicity_warning) {
    std::vector<long long> total(snapshot.dates.size(), 0);
    bool found = false;
    for (const auto& row : snapshot.rows) {
        if (row.country != region_id) continue;
        found = true;
        for (std::size_t i = 0; i < total.size(); ++i) total[i] += row.counts[i];
    }
    if (!found) {
        std::string best;
        std::size_t best_dist = static_cast<std::size_t>(-1);
        for (const auto& name : snapshot.countries()) {
            std::size_t d = edit_distance(name, region_id);
            if (d < best_dist) {
                best_dist = d;
                best = name;
            }
        }
        std::string msg = "unknown region '" + region_id + "'";
        if (!best.empty()) msg += " (did you mean '" + best + "'?)";
        throw UnknownRegion(msg);
    }

    if (monotonicity_warning) {
        *monotonicity_warning = false;
        for (std::size_t i = 1; i < total.size(); ++i)
            if (total[i] < total[i - 1]) {
                *monotonicity_warning = true;
                break;
            }
    }

    std::vector<double> values(total.begin(), total.end());
    return TimeSeries(region_id, snapshot.dates.front(), std::move(values));
}

TimeSeries repair_monotonicity(const TimeSeries& series) {
    std::vector<double> values = series.values();
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] < values[i - 1]) values[i] = values[i - 1];
    return series.with_values(std::move(values), series.transformed());
}

std::uint64_t file_checksum(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UnreadableFile("cannot open file for checksum: " + path);
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    char buf[8192];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            hash ^= static_cast<unsigned char>(buf[i]);
            hash *= 0x100000001b3ULL;
        }
    }
    return hash;
}

} // namespace fwstack
