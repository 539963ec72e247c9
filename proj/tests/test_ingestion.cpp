#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "fwstack/errors.hpp"
#include "fwstack/ingestion.hpp"

using namespace fwstack;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& content) {
    auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << content;
    return path;
}

const char* kHeader = "Province/State,Country/Region,Lat,Long,1/22/20,1/23/20,1/24/20\n";

} // namespace

TEST_CASE("load_snapshot parses quoted fields and dates") {
    auto path = write_temp("fwstack_snap1.csv", std::string(kHeader) +
                                                    ",Afghanistan,33.0,65.0,0,0,1\n"
                                                    "\"British Columbia\",Canada,49.3,-123.1,1,2,3\n"
                                                    ",\"Korea, South\",36.0,128.0,1,1,2\n");
    auto snap = load_snapshot(path.string());
    CHECK(snap.rows.size() == 3);
    CHECK(snap.diagnostics.empty());
    CHECK(snap.dates.size() == 3);
    CHECK(to_iso(snap.dates.front()) == "2020-01-22");
    CHECK(snap.rows[2].country == "Korea, South");
    CHECK(snap.countries().size() == 3);
    std::filesystem::remove(path);
}

TEST_CASE("load_snapshot validates the header") {
    auto bad = write_temp("fwstack_snap2.csv", "State,Country,Lat,Long,1/22/20\nx,y,0,0,1\n");
    CHECK_THROWS_AS(load_snapshot(bad.string()), HeaderMismatch);
    std::filesystem::remove(bad);

    auto gap = write_temp("fwstack_snap3.csv",
                          "Province/State,Country/Region,Lat,Long,1/22/20,1/25/20\nx,y,0,0,1,2\n");
    CHECK_THROWS_AS(load_snapshot(gap.string()), HeaderMismatch);
    std::filesystem::remove(gap);

    CHECK_THROWS_AS(load_snapshot("/nonexistent/snapshot.csv"), UnreadableFile);
}

TEST_CASE("malformed rows go to diagnostics, not the data") {
    auto path = write_temp("fwstack_snap4.csv", std::string(kHeader) +
                                                    ",Goodland,0,0,1,2,3\n"
                                                    ",Badland,0,0,1,-2,3\n"
                                                    ",Addland,0,0,1,two,3\n"
                                                    ",Shortland,0,0,1,2\n");
    auto snap = load_snapshot(path.string());
    CHECK(snap.rows.size() == 1);
    CHECK(snap.rows[0].country == "Goodland");
    CHECK(snap.diagnostics.size() == 3);
    std::filesystem::remove(path);
}

TEST_CASE("country_series sums provinces with integer arithmetic") {
    auto path = write_temp("fwstack_snap5.csv",
                           "Province/State,Country/Region,Lat,Long,1/22/20,1/23/20\n"
                           "A,Multi,0,0,1,2\n"
                           "B,Multi,0,0,0,1\n"
                           "C,Multi,0,0,4,4\n"
                           ",Single,0,0,9,11\n");
    auto snap = load_snapshot(path.string());
    auto multi = country_series(snap, "Multi");
    CHECK(multi.values() == std::vector<double>{5, 7});
    auto single = country_series(snap, "Single");
    CHECK(single.values() == std::vector<double>{9, 11});
    CHECK(single.start_date() == parse_date_iso("2020-01-22"));
    std::filesystem::remove(path);
}

TEST_CASE("unknown regions get a nearest-name suggestion") {
    auto path = write_temp("fwstack_snap6.csv",
                           "Province/State,Country/Region,Lat,Long,1/22/20\n,Germany,0,0,5\n");
    auto snap = load_snapshot(path.string());
    try {
        country_series(snap, "Germani");
        FAIL("expected UnknownRegion");
    } catch (const UnknownRegion& e) {
        CHECK(std::string(e.what()).find("Germany") != std::string::npos);
    }
    std::filesystem::remove(path);
}

TEST_CASE("monotonicity violations warn and repair") {
    auto path = write_temp("fwstack_snap7.csv",
                           "Province/State,Country/Region,Lat,Long,1/22/20,1/23/20,1/24/20\n"
                           ",Revisia,0,0,5,3,6\n");
    auto snap = load_snapshot(path.string());
    bool warn = false;
    auto series = country_series(snap, "Revisia", &warn);
    CHECK(warn);
    auto repaired = repair_monotonicity(series);
    CHECK(repaired.values() == std::vector<double>{5, 5, 6});
    std::filesystem::remove(path);
}

TEST_CASE("re-serializing the snapshot reproduces the numeric content") {
    std::string content = std::string(kHeader) + ",Aa,1.5,2.5,1,2,3\nP,Bb,0,0,10,20,30\n";
    auto path = write_temp("fwstack_snap8.csv", content);
    auto snap = load_snapshot(path.string());
    // rebuild the numeric table from the parsed snapshot
    std::string rebuilt;
    for (const auto& row : snap.rows) {
        rebuilt += row.province + "," + row.country;
        for (long long v : row.counts) rebuilt += "," + std::to_string(v);
        rebuilt += "\n";
    }
    CHECK(rebuilt == ",Aa,1,2,3\nP,Bb,10,20,30\n");
    CHECK(file_checksum(path.string()) == file_checksum(path.string()));
    std::filesystem::remove(path);
}
