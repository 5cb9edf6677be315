#include "driftband/cli_config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "driftband/csv.hpp"
#include "driftband/errors.hpp"

namespace driftband {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: bad numeric value for '" + key + "': " + value);
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        // stoull wraps negatives silently
        if (value.find('-') != std::string::npos) throw std::invalid_argument(value);
        std::size_t pos = 0;
        const auto v = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: bad integer value for '" + key + "': " + value);
    }
}

int parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const int v = std::stoi(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: bad integer value for '" + key + "': " + value);
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ConfigError("config: bad boolean value for '" + key + "': " + value);
}

std::vector<BaselineKind> parse_baselines(const std::string& value) {
    std::vector<BaselineKind> kinds;
    if (value.empty() || value == "none") return kinds;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item == "greedy-only") {
            kinds.push_back(BaselineKind::GreedyOnly);
        } else if (item == "ucb-no-incentive") {
            kinds.push_back(BaselineKind::UcbNoIncentive);
        } else {
            throw ConfigError("config: unknown baseline '" + item + "'");
        }
    }
    return kinds;
}

std::string baselines_to_string(const std::vector<BaselineKind>& kinds) {
    if (kinds.empty()) return "none";
    std::string out;
    for (const auto& k : kinds) {
        if (!out.empty()) out += ",";
        out += k == BaselineKind::GreedyOnly ? "greedy-only" : "ucb-no-incentive";
    }
    return out;
}

} // namespace

void apply_config_key(ExperimentConfig& config, const std::string& key,
                      const std::string& value) {
    if (key == "mode") {
        if (value == "stochastic") {
            config.mode = ExperimentConfig::Mode::Stochastic;
        } else if (value == "contextual") {
            config.mode = ExperimentConfig::Mode::Contextual;
        } else {
            throw ConfigError("config: mode must be 'stochastic' or 'contextual'");
        }
    } else if (key == "horizon") {
        config.horizon = parse_u64(key, value);
    } else if (key == "d") {
        // total dimension; the contextual mode splits it between arms and
        // contexts (arms take the extra axis when it is odd)
        const int d = parse_int(key, value);
        if (config.mode == ExperimentConfig::Mode::Contextual) {
            config.d_a = (d + 1) / 2;
            config.d_x = d / 2;
        } else {
            config.d_a = d;
            config.d_x = 0;
        }
    } else if (key == "d_a") {
        config.d_a = parse_int(key, value);
    } else if (key == "d_x") {
        config.d_x = parse_int(key, value);
    } else if (key == "lipschitz") {
        config.lipschitz = parse_double(key, value);
    } else if (key == "psi") {
        if (value == "auto") {
            config.psi_auto = true;
            config.psi_value = 0.0;
        } else {
            config.psi_auto = false;
            config.psi_value = parse_double(key, value);
        }
    } else if (key == "psi_c") {
        config.psi_c = parse_double(key, value);
    } else if (key == "noise_scale") {
        config.noise.scale_param = parse_double(key, value);
    } else if (key == "noise_interpretation") {
        if (value == "variance") {
            config.noise.interpretation = NoiseInterpretation::Variance;
        } else if (value == "stddev") {
            config.noise.interpretation = NoiseInterpretation::StdDev;
        } else {
            throw ConfigError("config: noise_interpretation must be 'variance' or 'stddev'");
        }
    } else if (key == "clip_to_unit") {
        config.noise.clip_to_unit = parse_bool(key, value);
    } else if (key == "ell_low") {
        config.drift.ell_low = parse_double(key, value);
    } else if (key == "ell_high") {
        config.drift.ell_high = parse_double(key, value);
    } else if (key == "trials") {
        config.trials = parse_int(key, value);
    } else if (key == "master_seed") {
        config.master_seed = parse_u64(key, value);
    } else if (key == "log_mode") {
        if (value == "log-t") {
            config.log_mode = LogMode::LogRound;
        } else if (value == "log-T") {
            config.log_mode = LogMode::LogHorizon;
        } else {
            throw ConfigError("config: log_mode must be 'log-t' or 'log-T'");
        }
    } else if (key == "baselines") {
        config.baselines = parse_baselines(value);
    } else if (key == "threads") {
        config.threads = parse_int(key, value);
    } else if (key == "bound_c") {
        config.bound_c = parse_double(key, value);
    } else if (key == "arm_budget") {
        config.arm_budget = parse_u64(key, value);
    } else {
        throw ConfigError("config: unknown key '" + key + "'");
    }
}

ExperimentConfig parse_config_text(const std::string& text) {
    struct Entry {
        std::string key, value;
        int line_no;
    };
    std::vector<Entry> entries;
    std::stringstream ss(text);
    std::string line;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config: line " + std::to_string(line_no)
                              + " is not 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("config: empty key on line " + std::to_string(line_no));
        }
        entries.push_back({key, value, line_no});
    }

    ExperimentConfig config;
    // 'mode' goes first whatever its position: the 'd' split depends on it
    auto apply = [&](const Entry& e) {
        try {
            apply_config_key(config, e.key, e.value);
        } catch (const ConfigError& err) {
            throw ConfigError(std::string(err.what()) + " (line " + std::to_string(e.line_no)
                              + ")");
        }
    };
    for (const auto& e : entries) {
        if (e.key == "mode") apply(e);
    }
    for (const auto& e : entries) {
        if (e.key != "mode") apply(e);
    }
    config.validate();
    return config;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config file: " + path);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string serialize_config(const ExperimentConfig& config) {
    std::ostringstream out;
    out << "mode = "
        << (config.mode == ExperimentConfig::Mode::Contextual ? "contextual" : "stochastic")
        << "\n";
    out << "horizon = " << config.horizon << "\n";
    out << "d_a = " << config.d_a << "\n";
    out << "d_x = " << config.d_x << "\n";
    out << "lipschitz = " << format_double(config.lipschitz) << "\n";
    out << "psi = " << (config.psi_auto ? "auto" : format_double(config.psi_value)) << "\n";
    out << "psi_c = " << format_double(config.psi_c) << "\n";
    out << "noise_scale = " << format_double(config.noise.scale_param) << "\n";
    out << "noise_interpretation = "
        << (config.noise.interpretation == NoiseInterpretation::Variance ? "variance"
                                                                         : "stddev")
        << "\n";
    out << "clip_to_unit = " << (config.noise.clip_to_unit ? "true" : "false") << "\n";
    out << "ell_low = " << format_double(config.drift.ell_low) << "\n";
    out << "ell_high = " << format_double(config.drift.ell_high) << "\n";
    out << "trials = " << config.trials << "\n";
    out << "master_seed = " << config.master_seed << "\n";
    out << "log_mode = " << (config.log_mode == LogMode::LogRound ? "log-t" : "log-T") << "\n";
    out << "baselines = " << baselines_to_string(config.baselines) << "\n";
    out << "threads = " << config.threads << "\n";
    out << "bound_c = " << format_double(config.bound_c) << "\n";
    out << "arm_budget = " << config.arm_budget << "\n";
    return out.str();
}

std::vector<std::string> config_preamble(const ExperimentConfig& config) {
    std::vector<std::string> lines;
    lines.push_back(std::string("# ") + kArtifactVersion);
    std::stringstream ss(serialize_config(config));
    std::string line;
    while (std::getline(ss, line)) {
        lines.push_back("# " + line);
    }
    return lines;
}

} // namespace driftband
