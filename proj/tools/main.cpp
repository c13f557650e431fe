// Experiment driver: runs seeded sweeps over the polling and
// synchronization periods and writes per-run and summary CSVs.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "viewsim/config.hpp"
#include "viewsim/experiment.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw viewsim::ConfigError(0, path, "cannot open config file");
    }
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::vector<double> parse_period_list(const std::string& flag, const std::string& text) {
    std::vector<double> out;
    std::istringstream ss(text);
    std::string token;
    while (std::getline(ss, token, ',')) {
        if (token == "inf") {
            out.push_back(viewsim::kNever);
            continue;
        }
        try {
            out.push_back(std::stod(token));
        } catch (const std::exception&) {
            throw viewsim::ConfigError(0, flag, "expected a number, got '" + token + "'");
        }
    }
    if (out.empty()) {
        throw viewsim::ConfigError(0, flag, "expected a comma-separated list");
    }
    return out;
}

// Drop any scenario line so a --scenario flag can take precedence.
std::string strip_scenario_key(const std::string& text) {
    std::istringstream in(text);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t");
        if (first != std::string::npos && line.compare(first, 8, "scenario") == 0) {
            continue;
        }
        out << line << "\n";
    }
    return out.str();
}

std::string join_list(const std::vector<double>& xs) {
    std::ostringstream os;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) {
            os << ",";
        }
        os << xs[i];
    }
    return os.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"viewsim: stale-network-view IDS experiment driver"};

    std::string config_path;
    std::string scenario_flag;
    std::string polling_flag;
    std::string sync_flag;
    std::string out_flag;
    std::int64_t runs_flag = -1;
    std::int64_t seed_flag = -1;
    unsigned jobs = 0;
    bool emit_staleness = false;
    bool dump_models = false;
    bool quiet = false;

    app.add_option("-c,--config", config_path, "configuration file (key = value sections)");
    app.add_option("--scenario", scenario_flag, "ddos | syn (overrides the config)")
        ->check(CLI::IsMember({"ddos", "syn"}));
    app.add_option("--polling", polling_flag, "comma-separated polling periods, seconds");
    app.add_option("--sync", sync_flag, "comma-separated synchronization periods, seconds");
    app.add_option("--runs", runs_flag, "seeded runs per sweep point");
    app.add_option("--seed", seed_flag, "base seed");
    app.add_option("--out", out_flag, "output directory");
    app.add_option("--jobs", jobs, "worker threads (0 = hardware default)");
    app.add_flag("--emit-staleness", emit_staleness, "emit per-tick staleness samples");
    app.add_flag("--dump-models", dump_models, "dump trained centroids/radii per run");
    app.add_flag("-q,--quiet", quiet, "suppress the summary table on stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        std::string text = config_path.empty() ? std::string() : read_file(config_path);
        if (!scenario_flag.empty()) {
            text = "scenario = " + scenario_flag + "\n" + strip_scenario_key(text);
        }

        viewsim::ScenarioConfig cfg = viewsim::parse_config(text);

        // Flag overrides beat config keys.
        if (!polling_flag.empty()) {
            cfg.polling_periods = parse_period_list("--polling", polling_flag);
        }
        if (!sync_flag.empty()) {
            cfg.sync_periods = parse_period_list("--sync", sync_flag);
        }
        if (runs_flag >= 0) {
            cfg.runs = static_cast<std::uint32_t>(runs_flag);
        }
        if (seed_flag >= 0) {
            cfg.base_seed = static_cast<std::uint64_t>(seed_flag);
        }
        if (!out_flag.empty()) {
            cfg.output_dir = out_flag;
        }
        cfg.emit_staleness = cfg.emit_staleness || emit_staleness;
        cfg.dump_models = cfg.dump_models || dump_models;
        cfg.validate();

        const viewsim::ExperimentResult result = viewsim::run_experiment(cfg, jobs);
        const std::string summary_path = viewsim::write_outputs(cfg, result);
        if (!quiet) {
            std::cout << result.text_table;
            std::cout << "polling periods: " << join_list(cfg.polling_periods) << "\n";
            std::cout << "wrote " << summary_path << "\n";
        }
        return 0;
    } catch (const viewsim::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const viewsim::InvariantViolation& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
