#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "viewsim/ids.hpp"
#include "viewsim/traffic.hpp"

namespace viewsim {

enum class Scenario : std::uint8_t { Ddos, Syn };

const char* to_string(Scenario s);

// Configuration error with the offending line and field.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::size_t line, std::string field, const std::string& message);
    std::size_t line() const { return line_; }
    const std::string& field() const { return field_; }

private:
    std::size_t line_;
    std::string field_;
};

struct IdsParams {
    std::size_t clusters = 4;
    double theta = 1.5;
    double epsilon_r = 0.1;
    Weights weights; // scenario-dependent defaults
    bool continuous_update = false;
};

// Full experiment description. Scenario defaults mirror the experiment
// setups: the distributed flood scenario fixes the polling period at 2 s
// and sweeps the synchronization period over {2,4,8,16}; the single
// controller flow-flood scenario sweeps the polling period over
// {2,4,8,16,32}. Ten seeded runs per sweep point.
struct ScenarioConfig {
    Scenario scenario = Scenario::Ddos;

    // topology
    std::uint32_t controllers = 2;
    std::uint32_t clients_per_switch = 32;
    bool enforce_capacity = false;

    LegitTrafficParams traffic;

    // attacks
    DdosParams ddos;
    SynFloodParams syn;
    std::uint32_t attacks_per_run = 5;
    double attack_length = 30.0;
    // Per-attack attacker resample for the flood scenario: a uniform count
    // in [attackers_min, attackers_max] drawn from the dormant clients;
    // attackers_max = 0 means "all dormant clients".
    std::uint32_t attackers_min = 10;
    std::uint32_t attackers_max = 20;

    IdsParams ids;

    // sweep
    std::vector<double> polling_periods = {2.0};
    std::vector<double> sync_periods = {2.0, 4.0, 8.0, 16.0};

    // run
    std::uint32_t runs = 10;
    std::uint64_t base_seed = 20220405;
    double training_duration = 600.0;
    double horizon = 1200.0;
    std::string output_dir = "out";
    bool emit_staleness = false;
    bool dump_models = false;

    static ScenarioConfig defaults_for(Scenario s);
    void validate() const; // throws ConfigError (line 0) on bad values
};

// Parse the key=value configuration text (see README for the format).
// Unknown sections or keys are rejected; omitted keys take the scenario
// defaults. The scenario key is mandatory.
ScenarioConfig parse_config(std::string_view text);

} // namespace viewsim
