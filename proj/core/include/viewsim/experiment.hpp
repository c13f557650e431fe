#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "viewsim/config.hpp"
#include "viewsim/metrics.hpp"

namespace viewsim {

// A simulation invariant (staleness bound, conservation, ...) failed at
// runtime. The CLI maps this to exit code 2.
class InvariantViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SweepPoint {
    double tau_p = 2.0;
    double tau_s = kNever; // kNever = no synchronization
    double sweep_value(Scenario s) const { return s == Scenario::Ddos ? tau_s : tau_p; }
};

// One (controller, subject) verdict stream matched against the run's
// ground truth.
struct StreamResult {
    ControllerId controller = 0;
    HostId subject = 0;
    bool remote_subject = false; // subject attached to a switch this controller does not own
    RunMetrics metrics;
};

struct StalenessSample {
    SimTime at = 0.0;
    ControllerId controller = 0;
    SwitchId sw = 0;
    bool local = false;
    double age = 0.0;
};

// Everything a single simulation run produces.
struct RunArtifacts {
    RunRecord record;
    std::vector<StreamResult> streams;
    std::vector<AttackWindow> attacks;
    std::uint64_t delivery_digest = 0;
    std::uint64_t staleness_violations = 0;
    double max_local_age = 0.0;
    double max_remote_age = 0.0;
    std::vector<StalenessSample> staleness; // populated when cfg.emit_staleness
    std::vector<std::pair<std::string, std::string>> model_dumps; // when cfg.dump_models
};

struct ExperimentResult {
    std::vector<RunRecord> runs;      // ordered by (sweep point, run)
    std::vector<SummaryRow> summary;  // one row per sweep point
    std::string per_run_csv;
    std::string summary_csv;
    std::string staleness_csv;        // empty unless emit_staleness
    std::string text_table;
    std::vector<std::pair<std::string, std::string>> model_dumps;
    std::vector<std::uint64_t> delivery_digests; // ordered like runs
};

// Seed for run `run_idx`; deliberately independent of the sweep point so
// the workload is identical while the control-plane periods vary.
std::uint64_t derive_run_seed(std::uint64_t base_seed, std::uint32_t run_idx);

std::vector<SweepPoint> sweep_points(const ScenarioConfig& cfg);

// Execute one seeded run at one sweep point.
RunArtifacts run_single(const ScenarioConfig& cfg, const SweepPoint& point,
                        std::uint32_t run_idx);

// Full sweep: every sweep point times cfg.runs seeded runs, aggregated
// into per-run and summary tables. Runs execute on a small worker pool
// (jobs = 0 picks the hardware default); outputs are byte-stable
// regardless of the worker count. Throws InvariantViolation if any run
// breaks a staleness bound.
ExperimentResult run_experiment(const ScenarioConfig& cfg, unsigned jobs = 0);

// Write per_run.csv, summary.csv and the optional extras under
// cfg.output_dir; creates the directory. Returns the summary path.
std::string write_outputs(const ScenarioConfig& cfg, const ExperimentResult& result);

} // namespace viewsim
