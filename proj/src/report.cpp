#include "fwstack/report.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "fwstack/errors.hpp"

namespace fwstack {

namespace fs = std::filesystem;

namespace {

std::vector<std::vector<std::string>> read_tsv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IncompleteRun("missing raw file: " + path.string());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, '\t')) fields.push_back(field);
        rows.push_back(std::move(fields));
    }
    return rows;
}

std::map<std::string, std::string> read_manifest(const fs::path& dir) {
    std::ifstream in(dir / "manifest.txt");
    if (!in) throw IncompleteRun("missing manifest.txt in " + dir.string());
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        std::size_t eq = line.find('=');
        if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return kv;
}

std::vector<int> parse_horizons(const std::string& value) {
    std::vector<int> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
    return out;
}

std::string fmt3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UnreadableFile("cannot write " + path.string());
    return out;
}

} // namespace

std::string render_report(const std::string& run_dir) {
    const fs::path dir(run_dir);
    auto manifest = read_manifest(dir);
    if (manifest["format"] != "fwstack-run-v1")
        throw IncompleteRun("unrecognized run directory format in " + run_dir);
    const std::vector<int> horizons = parse_horizons(manifest.at("horizons"));

    std::string summary;

    // Leaderboard: mean of the per-run raw scores.
    {
        auto rows = read_tsv(dir / "raw_scores.tsv");
        // method -> horizon -> values in run order
        std::map<std::string, std::map<int, std::vector<double>>> cells;
        for (std::size_t i = 1; i < rows.size(); ++i)
            cells[rows[i][2]][std::stoi(rows[i][0])].push_back(std::stod(rows[i][3]));

        auto out = open_out(dir / "leaderboard.tsv");
        std::string header = "method";
        for (int h : horizons) header += "\t" + std::to_string(h) + "d";
        out << header << "\n";
        summary += "sMAPE leaderboard (" + manifest.at("smape_space") + " space, mean of " +
                   manifest.at("n_runs") + " runs)\n" + header + "\n";
        for (const auto* method : kMethodNames) {
            std::string line = method;
            for (int h : horizons) {
                const auto& vals = cells[method][h];
                if (vals.empty()) throw IncompleteRun("no raw scores for " + std::string(method));
                double acc = 0.0;
                for (double v : vals) acc += v;
                line += "\t" + fmt3(acc / static_cast<double>(vals.size()));
            }
            out << line << "\n";
            summary += line + "\n";
        }
        summary += "\n";
    }

    // Score tables: per-run Spearman tables recomputed from the raw window
    // scores, then averaged across runs.
    for (int h : horizons) {
        auto feat_rows = read_tsv(dir / ("features_h" + std::to_string(h) + ".tsv"));
        std::map<std::pair<std::string, std::string>, MetaFeatureVector> features;
        for (std::size_t i = 1; i < feat_rows.size(); ++i) {
            MetaFeatureVector v;
            v.cv = std::stod(feat_rows[i][2]);
            v.svd_entropy = std::stod(feat_rows[i][3]);
            v.kpss = std::stod(feat_rows[i][4]);
            v.acf1 = std::stod(feat_rows[i][5]);
            features[{feat_rows[i][0], feat_rows[i][1]}] = v;
        }

        auto score_rows = read_tsv(dir / ("window_scores_h" + std::to_string(h) + ".tsv"));
        // run -> window key order and per-model columns
        std::map<int, std::vector<std::pair<std::string, std::string>>> run_windows;
        std::map<int, std::map<std::string, std::vector<double>>> run_scores;
        for (std::size_t i = 1; i < score_rows.size(); ++i) {
            int run = std::stoi(score_rows[i][0]);
            std::pair<std::string, std::string> key{score_rows[i][1], score_rows[i][2]};
            const std::string& model = score_rows[i][3];
            if (model == to_string(ForecastKind::Arima)) run_windows[run].push_back(key);
            run_scores[run][model].push_back(std::stod(score_rows[i][4]));
        }

        ScoreTable mean_table;
        bool first = true;
        std::size_t n_runs = 0;
        for (const auto& [run, keys] : run_windows) {
            std::vector<MetaFeatureVector> feats;
            feats.reserve(keys.size());
            for (const auto& key : keys) feats.push_back(features.at(key));
            std::vector<std::pair<std::string, std::vector<double>>> model_scores;
            for (ForecastKind k : kAllForecastKinds)
                model_scores.emplace_back(to_string(k), run_scores.at(run).at(to_string(k)));
            ScoreTable table = build_score_table(feats, model_scores);
            if (first) {
                mean_table = table;
                for (auto& row : mean_table.cells) std::fill(row.begin(), row.end(), 0.0);
                first = false;
            }
            for (std::size_t r = 0; r < table.cells.size(); ++r)
                for (std::size_t c = 0; c < table.cells[r].size(); ++c)
                    mean_table.cells[r][c] += table.cells[r][c];
            ++n_runs;
        }
        if (n_runs == 0) throw IncompleteRun("no window scores for horizon " + std::to_string(h));
        for (auto& row : mean_table.cells)
            for (double& cell : row) cell /= static_cast<double>(n_runs);

        open_out(dir / ("score_table_h" + std::to_string(h) + ".tsv")) << mean_table.render();
        summary += "Spearman rho vs " + std::to_string(h) + "-day sMAPE (signed, mean of runs)\n" +
                   mean_table.render() + "\n";
    }

    // Plot data: formatted copies of the per-region forecast files.
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("forecasts_", 0) != 0 || entry.path().extension() != ".tsv") continue;
        auto rows = read_tsv(entry.path());
        auto out = open_out(dir / ("plot_" + name.substr(std::string("forecasts_").size())));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            std::string line;
            for (std::size_t j = 0; j < rows[i].size(); ++j) {
                if (j) line += "\t";
                if (i == 0 || j == 0 || rows[i][j] == "NA") {
                    line += rows[i][j];
                } else {
                    char buf[32];
                    std::snprintf(buf, sizeof(buf), "%.6g", std::stod(rows[i][j]));
                    line += buf;
                }
            }
            out << line << "\n";
        }
    }

    return summary;
}

} // namespace fwstack
