#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "viewsim/ids.hpp"
#include "viewsim/traffic.hpp"

namespace viewsim {

// Maximal run of consecutive anomalous verdicts for one subject. A single
// normal evaluation window closes an episode.
struct DetectionEpisode {
    HostId subject = 0;
    SimTime start = 0.0;
    SimTime end = 0.0;
};

// The evaluation grid: the detection-phase classification instants (one
// per poll) and their spacing.
struct EvalGrid {
    std::vector<SimTime> ticks;
    double step = 0.0;
};

std::vector<DetectionEpisode> episodes_from_verdicts(std::span<const Verdict> verdicts,
                                                     double grid_step);

struct RunMetrics {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    std::uint64_t tn = 0;
    // Per attack, in attack order: detection time, or nullopt when the
    // attack went undetected (those attacks are the false negatives).
    std::vector<std::optional<double>> t_delta;
    std::uint32_t run_id = 0;
    std::uint64_t seed = 0;
    double tau_p = 0.0;
    double tau_s = 0.0;
};

// Match one subject's episodes against the attack ground truth.
//
// An episode detects an attack when it begins inside [start, end + grace];
// an episode that begins earlier never counts as detecting the attack (it
// is a false positive instead), so detection times are >= 0. TP/FN
// partition the attacks; FP counts episodes that detect nothing; TN
// counts evaluation ticks outside every graced attack window and every
// episode.
RunMetrics match(const std::vector<AttackWindow>& attacks,
                 const std::vector<DetectionEpisode>& episodes, const EvalGrid& grid,
                 double grace);

// Eqs. of detection performance. nullopt when the denominator is zero;
// such runs are excluded from aggregation.
std::optional<double> precision(double tp, double fp);
std::optional<double> recall(double tp, double fn);
std::optional<double> accuracy(double tp, double tn, double fp, double fn);

// One run of one sweep point after stream aggregation; counts may be
// stream-averaged and hence fractional.
struct RunRecord {
    double sweep_value = 0.0;
    double tau_p = 0.0;
    double tau_s = 0.0;
    std::uint32_t run_id = 0;
    std::uint64_t seed = 0;
    double tp = 0.0;
    double fp = 0.0;
    double fn = 0.0;
    double tn = 0.0;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> accuracy;
    std::vector<double> detected_t_deltas;
    std::uint64_t excluded = 0; // undetected attacks (infinite detection time)
};

struct SummaryRow {
    double sweep_value = 0.0;
    double tau_p = 0.0;
    double tau_s = 0.0;
    std::size_t runs = 0;
    double mean_tp = 0.0, se_tp = 0.0;
    double mean_fp = 0.0, se_fp = 0.0;
    double mean_fn = 0.0, se_fn = 0.0;
    double mean_tn = 0.0, se_tn = 0.0;
    std::optional<double> mean_precision;
    std::optional<double> mean_recall;
    std::optional<double> mean_accuracy;
    // Pooled variants computed from summed counts, for comparison with
    // the per-run averages above.
    std::optional<double> pooled_precision;
    std::optional<double> pooled_recall;
    std::optional<double> pooled_accuracy;
    // Over detected attacks only; excluded counts the undetected ones.
    std::optional<double> mean_t_delta;
    std::optional<double> se_t_delta;
    std::uint64_t detected = 0;
    std::uint64_t excluded = 0;
};

// Aggregate the runs of a single sweep point. Detection times average
// over detected attacks only; undetected attacks are reported via
// `excluded` (they already count toward FN).
SummaryRow summarize(std::span<const RunRecord> runs);

} // namespace viewsim
