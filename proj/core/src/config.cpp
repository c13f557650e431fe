#include "viewsim/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace viewsim {

const char* to_string(Scenario s) {
    return s == Scenario::Ddos ? "ddos" : "syn";
}

ConfigError::ConfigError(std::size_t line, std::string field, const std::string& message)
    : std::runtime_error("config: line " + std::to_string(line) + ": " + field + ": " +
                         message),
      line_(line), field_(std::move(field)) {}

ScenarioConfig ScenarioConfig::defaults_for(Scenario s) {
    ScenarioConfig cfg;
    cfg.scenario = s;
    if (s == Scenario::Ddos) {
        cfg.controllers = 2;
        cfg.polling_periods = {2.0};
        cfg.sync_periods = {2.0, 4.0, 8.0, 16.0};
        cfg.attacks_per_run = 5;
        cfg.attack_length = 30.0;
        cfg.ids.weights = Weights{64.0, 4096.0, 1.0};
        cfg.horizon = 1200.0;
    } else {
        cfg.controllers = 1;
        cfg.polling_periods = {2.0, 4.0, 8.0, 16.0, 32.0};
        cfg.sync_periods.clear(); // single controller: no synchronization
        cfg.attacks_per_run = 1;
        cfg.attack_length = 60.0;
        cfg.ids.weights = Weights{16.0, 2046.0, 0.25};
        cfg.horizon = 900.0;
    }
    return cfg;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

struct KeyValue {
    std::size_t line;
    std::string section;
    std::string key;
    std::string value;
};

double parse_double(const KeyValue& kv, const std::string& token) {
    const auto t = trim(token);
    if (t == "inf") {
        return kNever;
    }
    try {
        std::size_t pos = 0;
        const double v = std::stod(std::string(t), &pos);
        if (pos != t.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return v;
    } catch (const std::exception&) {
        throw ConfigError(kv.line, kv.key, "expected a number, got '" + std::string(t) + "'");
    }
}

double parse_double(const KeyValue& kv) {
    return parse_double(kv, kv.value);
}

std::uint64_t parse_u64(const KeyValue& kv) {
    const auto t = trim(kv.value);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) {
        throw ConfigError(kv.line, kv.key,
                          "expected a non-negative integer, got '" + std::string(t) + "'");
    }
    return v;
}

bool parse_bool(const KeyValue& kv) {
    const auto t = trim(kv.value);
    if (t == "true" || t == "1") {
        return true;
    }
    if (t == "false" || t == "0") {
        return false;
    }
    throw ConfigError(kv.line, kv.key, "expected true or false, got '" + std::string(t) + "'");
}

std::vector<double> parse_list(const KeyValue& kv) {
    std::vector<double> out;
    std::string token;
    std::istringstream ss{kv.value};
    while (std::getline(ss, token, ',')) {
        if (trim(token).empty()) {
            throw ConfigError(kv.line, kv.key, "empty list element");
        }
        out.push_back(parse_double(kv, token));
    }
    if (out.empty()) {
        throw ConfigError(kv.line, kv.key, "expected a comma-separated list");
    }
    return out;
}

} // namespace

ScenarioConfig parse_config(std::string_view text) {
    std::vector<KeyValue> pairs;
    std::set<std::string> seen;
    std::string section;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    std::optional<Scenario> scenario;

    while (pos <= text.size()) {
        const std::size_t eol = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError(line_no, std::string(line), "malformed section header");
            }
            section = std::string(trim(line.substr(1, line.size() - 2)));
            static const std::set<std::string> kSections =
                {"topology", "traffic", "attack", "ids", "sweep", "run"};
            if (!kSections.count(section)) {
                throw ConfigError(line_no, section, "unknown section");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(line_no, std::string(line), "expected key = value");
        }
        KeyValue kv;
        kv.line = line_no;
        kv.section = section;
        kv.key = std::string(trim(line.substr(0, eq)));
        kv.value = std::string(trim(line.substr(eq + 1)));
        if (kv.key.empty()) {
            throw ConfigError(line_no, std::string(line), "missing key");
        }
        const std::string scoped = kv.section + "/" + kv.key;
        if (!seen.insert(scoped).second) {
            throw ConfigError(line_no, kv.key, "duplicate key");
        }
        if (kv.section.empty() && kv.key == "scenario") {
            if (kv.value == "ddos") {
                scenario = Scenario::Ddos;
            } else if (kv.value == "syn") {
                scenario = Scenario::Syn;
            } else {
                throw ConfigError(line_no, "scenario",
                                  "expected ddos or syn, got '" + kv.value + "'");
            }
            continue;
        }
        pairs.push_back(std::move(kv));
    }

    if (!scenario) {
        throw ConfigError(0, "scenario", "scenario is mandatory (ddos or syn)");
    }
    ScenarioConfig cfg = ScenarioConfig::defaults_for(*scenario);

    for (const KeyValue& kv : pairs) {
        const std::string id = kv.section + "/" + kv.key;
        if (id == "topology/controllers") {
            cfg.controllers = static_cast<std::uint32_t>(parse_u64(kv));
        } else if (id == "topology/clients_per_switch") {
            cfg.clients_per_switch = static_cast<std::uint32_t>(parse_u64(kv));
        } else if (id == "topology/enforce_capacity") {
            cfg.enforce_capacity = parse_bool(kv);
        } else if (id == "traffic/flow_rate_sw1") {
            cfg.traffic.flow_rate_sw1 = parse_double(kv);
        } else if (id == "traffic/flow_rate_sw2") {
            cfg.traffic.flow_rate_sw2 = parse_double(kv);
        } else if (id == "traffic/flow_ttl") {
            cfg.traffic.flow_ttl = parse_double(kv);
        } else if (id == "traffic/msg_rate_sw1") {
            cfg.traffic.msg_rate_sw1 = parse_double(kv);
        } else if (id == "traffic/msg_rate_sw2") {
            cfg.traffic.msg_rate_sw2 = parse_double(kv);
        } else if (id == "traffic/payload") {
            cfg.traffic.payload = parse_u64(kv);
        } else if (id == "traffic/active_client_fraction") {
            cfg.traffic.active_client_fraction = parse_double(kv);
        } else if (id == "attack/cbr_msg_rate") {
            cfg.ddos.cbr_msg_rate = parse_double(kv);
        } else if (id == "attack/cbr_payload") {
            cfg.ddos.cbr_payload = parse_u64(kv);
        } else if (id == "attack/syn_rate") {
            cfg.syn.syn_rate = parse_double(kv);
        } else if (id == "attack/syn_payload") {
            cfg.syn.syn_payload = parse_u64(kv);
        } else if (id == "attack/syn_flow_ttl") {
            cfg.syn.syn_flow_ttl = parse_double(kv);
        } else if (id == "attack/attacks_per_run") {
            cfg.attacks_per_run = static_cast<std::uint32_t>(parse_u64(kv));
        } else if (id == "attack/attack_length") {
            cfg.attack_length = parse_double(kv);
        } else if (id == "attack/attackers_min") {
            cfg.attackers_min = static_cast<std::uint32_t>(parse_u64(kv));
        } else if (id == "attack/attackers_max") {
            cfg.attackers_max = static_cast<std::uint32_t>(parse_u64(kv));
        } else if (id == "ids/clusters") {
            cfg.ids.clusters = static_cast<std::size_t>(parse_u64(kv));
        } else if (id == "ids/theta") {
            cfg.ids.theta = parse_double(kv);
        } else if (id == "ids/epsilon_r") {
            cfg.ids.epsilon_r = parse_double(kv);
        } else if (id == "ids/w_p") {
            cfg.ids.weights.w_p = parse_double(kv);
        } else if (id == "ids/w_b") {
            cfg.ids.weights.w_b = parse_double(kv);
        } else if (id == "ids/w_f") {
            cfg.ids.weights.w_f = parse_double(kv);
        } else if (id == "ids/continuous_update") {
            cfg.ids.continuous_update = parse_bool(kv);
        } else if (id == "sweep/polling_periods") {
            cfg.polling_periods = parse_list(kv);
        } else if (id == "sweep/sync_periods") {
            cfg.sync_periods = parse_list(kv);
        } else if (id == "run/runs") {
            cfg.runs = static_cast<std::uint32_t>(parse_u64(kv));
        } else if (id == "run/base_seed") {
            cfg.base_seed = parse_u64(kv);
        } else if (id == "run/training_duration") {
            cfg.training_duration = parse_double(kv);
        } else if (id == "run/horizon") {
            cfg.horizon = parse_double(kv);
        } else if (id == "run/output_dir") {
            cfg.output_dir = kv.value;
        } else if (id == "run/emit_staleness") {
            cfg.emit_staleness = parse_bool(kv);
        } else if (id == "run/dump_models") {
            cfg.dump_models = parse_bool(kv);
        } else {
            throw ConfigError(kv.line, kv.key,
                              kv.section.empty() ? "unknown key"
                                                 : "unknown key in [" + kv.section + "]");
        }
    }

    // Re-validate with line context lost; field names still point at the
    // offending setting.
    cfg.validate();
    return cfg;
}

void ScenarioConfig::validate() const {
    const auto fail = [](const std::string& field, const std::string& msg) {
        throw ConfigError(0, field, msg);
    };
    if (controllers != 1 && controllers != 2) {
        fail("controllers", "must be 1 or 2");
    }
    if (clients_per_switch == 0) {
        fail("clients_per_switch", "must be >= 1");
    }
    if (!(traffic.flow_rate_sw1 > 0.0) || traffic.flow_rate_sw1 == kNever) {
        fail("flow_rate_sw1", "must be a positive finite rate");
    }
    if (!(traffic.flow_rate_sw2 > 0.0) || traffic.flow_rate_sw2 == kNever) {
        fail("flow_rate_sw2", "must be a positive finite rate");
    }
    if (!(traffic.flow_ttl > 0.0)) {
        fail("flow_ttl", "must be > 0");
    }
    if (traffic.msg_rate_sw1 < 0.0 || traffic.msg_rate_sw2 < 0.0) {
        fail("msg_rate", "must be >= 0 (0 disables deliveries)");
    }
    if (traffic.active_client_fraction < 0.0 || traffic.active_client_fraction > 1.0) {
        fail("active_client_fraction", "must be in [0,1]");
    }
    if (scenario == Scenario::Ddos && traffic.active_client_fraction >= 1.0) {
        fail("active_client_fraction", "must be < 1 in the ddos scenario (attackers are dormant clients)");
    }
    if (!(ddos.cbr_msg_rate > 0.0)) {
        fail("cbr_msg_rate", "must be > 0");
    }
    if (!(syn.syn_rate > 0.0) || syn.syn_rate == kNever) {
        fail("syn_rate", "must be a positive finite rate");
    }
    if (!(syn.syn_flow_ttl > 0.0)) {
        fail("syn_flow_ttl", "must be > 0");
    }
    if (attacks_per_run == 0) {
        fail("attacks_per_run", "must be >= 1");
    }
    if (!(attack_length > 0.0)) {
        fail("attack_length", "must be > 0");
    }
    if (attackers_min == 0) {
        fail("attackers_min", "must be >= 1");
    }
    if (attackers_max != 0 && attackers_max < attackers_min) {
        fail("attackers_max", "must be 0 (all dormant) or >= attackers_min");
    }
    if (ids.clusters == 0) {
        fail("clusters", "must be >= 1");
    }
    if (!(ids.theta > 0.0)) {
        fail("theta", "must be > 0");
    }
    if (!(ids.epsilon_r > 0.0)) {
        fail("epsilon_r", "must be > 0");
    }
    if (!(ids.weights.w_p > 0.0) || !(ids.weights.w_b > 0.0) || !(ids.weights.w_f > 0.0)) {
        fail("weights", "must be strictly positive");
    }
    if (polling_periods.empty()) {
        fail("polling_periods", "must list at least one period");
    }
    for (double p : polling_periods) {
        if (!(p > 0.0) || p == kNever) {
            fail("polling_periods", "periods must be positive and finite");
        }
    }
    for (double s : sync_periods) {
        if (!(s > 0.0)) {
            fail("sync_periods", "periods must be positive (inf disables sync)");
        }
    }
    if (runs == 0) {
        fail("runs", "must be >= 1");
    }
    if (!(training_duration > 0.0)) {
        fail("training_duration", "must be > 0");
    }
    if (!(horizon > training_duration)) {
        fail("horizon", "must exceed training_duration");
    }
    const double span = horizon - training_duration;
    const double slot = span / static_cast<double>(attacks_per_run);
    if (slot < attack_length + 10.0) {
        fail("horizon", "detection span too short: each attack slot needs attack_length + 10 s");
    }
    for (double p : polling_periods) {
        if (training_duration / p < static_cast<double>(ids.clusters) + 1.0) {
            fail("training_duration", "too few polls to seed the clusters at the largest polling period");
        }
    }
}

} // namespace viewsim
