#include "fwstack/config.hpp"

#include <fstream>
#include <sstream>

#include "fwstack/errors.hpp"

namespace fwstack {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

int to_int(const std::string& key, const std::string& value) {
    try {
        return std::stoi(value);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' expects an integer, got '" + value + "'");
    }
}

double to_double(const std::string& key, const std::string& value) {
    try {
        return std::stod(value);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' expects a number, got '" + value + "'");
    }
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ConfigError("config key '" + key + "' expects true/false, got '" + value + "'");
}

} // namespace

void apply_config_entry(RunConfig& config, const std::string& key, const std::string& value) {
    if (key == "horizons") {
        config.horizons.clear();
        for (const auto& item : split_list(value)) config.horizons.push_back(to_int(key, item));
    } else if (key == "train_regions") {
        config.train_regions = split_list(value);
    } else if (key == "holdout_regions") {
        config.holdout_regions = split_list(value);
    } else if (key == "stride") {
        config.stride = to_int(key, value);
    } else if (key == "n_runs") {
        config.n_runs = to_int(key, value);
    } else if (key == "seed") {
        config.seed = static_cast<std::uint64_t>(std::stoull(value));
    } else if (key == "smooth_window") {
        config.smooth_window = to_int(key, value);
    } else if (key == "repair_monotonic") {
        config.repair_monotonic = to_bool(key, value);
    } else if (key == "svd_order") {
        config.features.svd_order = to_int(key, value);
    } else if (key == "svd_delay") {
        config.features.svd_delay = to_int(key, value);
    } else if (key == "acf_lag") {
        config.features.acf_lag = to_int(key, value);
    } else if (key == "prophet_changepoints") {
        config.prophet_changepoints = to_int(key, value);
    } else if (key == "lstm_widths") {
        config.lstm.widths.clear();
        for (const auto& item : split_list(value)) config.lstm.widths.push_back(to_int(key, item));
    } else if (key == "lstm_seq_len") {
        config.lstm.seq_len = to_int(key, value);
    } else if (key == "lstm_batch") {
        config.lstm.batch_size = to_int(key, value);
    } else if (key == "lstm_epochs") {
        config.lstm.epochs = to_int(key, value);
    } else if (key == "lstm_lr") {
        config.lstm.learning_rate = to_double(key, value);
    } else if (key == "mlp_hidden") {
        config.mlp.hidden_width = to_int(key, value);
    } else if (key == "mlp_epochs") {
        config.mlp.epochs = to_int(key, value);
    } else if (key == "mlp_lr") {
        config.mlp.learning_rate = to_double(key, value);
    } else if (key == "mlp_batch") {
        config.mlp.batch_size = to_int(key, value);
    } else if (key == "jobs") {
        config.jobs = to_int(key, value);
    } else if (key == "snapshot") {
        config.snapshot_path = value;
    } else if (key == "synthetic") {
        config.synthetic_path = value;
    } else if (key == "out_dir") {
        config.out_dir = value;
    } else {
        throw ConfigError("unknown config key '" + key + "'");
    }
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    RunConfig config;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + " is not key = value");
        apply_config_entry(config, trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
    }
    return config;
}

} // namespace fwstack
