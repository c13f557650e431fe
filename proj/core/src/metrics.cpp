#include "viewsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace viewsim {

std::vector<DetectionEpisode> episodes_from_verdicts(std::span<const Verdict> verdicts,
                                                     double grid_step) {
    std::vector<DetectionEpisode> episodes;
    const double gap_limit = grid_step * 1.5; // adjacent ticks, with float slack
    for (const Verdict& v : verdicts) {
        if (!v.anomalous) {
            continue;
        }
        if (!episodes.empty() && episodes.back().subject == v.subject &&
            v.at - episodes.back().end <= gap_limit) {
            episodes.back().end = v.at;
        } else {
            episodes.push_back(DetectionEpisode{v.subject, v.at, v.at});
        }
    }
    return episodes;
}

RunMetrics match(const std::vector<AttackWindow>& attacks,
                 const std::vector<DetectionEpisode>& episodes, const EvalGrid& grid,
                 double grace) {
    for (std::size_t i = 0; i < attacks.size(); ++i) {
        for (std::size_t j = i + 1; j < attacks.size(); ++j) {
            const auto& a = attacks[i];
            const auto& b = attacks[j];
            if (a.start <= b.end && b.start <= a.end) {
                throw std::invalid_argument("match: overlapping attack windows");
            }
        }
    }

    RunMetrics m;
    std::vector<bool> episode_used(episodes.size(), false);
    for (const AttackWindow& attack : attacks) {
        std::optional<double> first_detection;
        for (std::size_t e = 0; e < episodes.size(); ++e) {
            const auto& ep = episodes[e];
            if (ep.start >= attack.start && ep.start <= attack.end + grace) {
                episode_used[e] = true;
                if (!first_detection || ep.start < *first_detection) {
                    first_detection = ep.start;
                }
            }
        }
        if (first_detection) {
            ++m.tp;
            m.t_delta.push_back(*first_detection - attack.start);
        } else {
            ++m.fn;
            m.t_delta.push_back(std::nullopt);
        }
    }
    for (std::size_t e = 0; e < episodes.size(); ++e) {
        if (!episode_used[e]) {
            ++m.fp;
        }
    }

    for (SimTime t : grid.ticks) {
        bool inside = false;
        for (const AttackWindow& attack : attacks) {
            inside = inside || (t >= attack.start && t <= attack.end + grace);
        }
        for (const DetectionEpisode& ep : episodes) {
            inside = inside || (t >= ep.start && t <= ep.end);
        }
        if (!inside) {
            ++m.tn;
        }
    }
    return m;
}

std::optional<double> precision(double tp, double fp) {
    const double den = tp + fp;
    if (!(den > 0.0)) {
        return std::nullopt;
    }
    return tp / den;
}

std::optional<double> recall(double tp, double fn) {
    const double den = tp + fn;
    if (!(den > 0.0)) {
        return std::nullopt;
    }
    return tp / den;
}

std::optional<double> accuracy(double tp, double tn, double fp, double fn) {
    const double den = tp + tn + fp + fn;
    if (!(den > 0.0)) {
        return std::nullopt;
    }
    return (tp + tn) / den;
}

namespace {

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& xs) {
    MeanSe out;
    if (xs.empty()) {
        return out;
    }
    double sum = 0.0;
    for (double x : xs) {
        sum += x;
    }
    out.mean = sum / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) {
            ss += (x - out.mean) * (x - out.mean);
        }
        const double var = ss / static_cast<double>(xs.size() - 1);
        out.se = std::sqrt(var / static_cast<double>(xs.size()));
    }
    return out;
}

std::optional<double> mean_defined(const std::vector<std::optional<double>>& xs) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& x : xs) {
        if (x) {
            sum += *x;
            ++n;
        }
    }
    if (n == 0) {
        return std::nullopt;
    }
    return sum / static_cast<double>(n);
}

} // namespace

SummaryRow summarize(std::span<const RunRecord> runs) {
    if (runs.empty()) {
        throw std::invalid_argument("summarize: no runs");
    }
    SummaryRow row;
    row.sweep_value = runs.front().sweep_value;
    row.tau_p = runs.front().tau_p;
    row.tau_s = runs.front().tau_s;
    row.runs = runs.size();

    std::vector<double> tps, fps, fns, tns, tds;
    std::vector<std::optional<double>> precs, recs, accs;
    double sum_tp = 0.0, sum_fp = 0.0, sum_fn = 0.0, sum_tn = 0.0;
    for (const RunRecord& r : runs) {
        tps.push_back(r.tp);
        fps.push_back(r.fp);
        fns.push_back(r.fn);
        tns.push_back(r.tn);
        precs.push_back(r.precision);
        recs.push_back(r.recall);
        accs.push_back(r.accuracy);
        sum_tp += r.tp;
        sum_fp += r.fp;
        sum_fn += r.fn;
        sum_tn += r.tn;
        for (double td : r.detected_t_deltas) {
            tds.push_back(td);
        }
        row.excluded += r.excluded;
    }
    const auto tp_ms = mean_se(tps);
    row.mean_tp = tp_ms.mean;
    row.se_tp = tp_ms.se;
    const auto fp_ms = mean_se(fps);
    row.mean_fp = fp_ms.mean;
    row.se_fp = fp_ms.se;
    const auto fn_ms = mean_se(fns);
    row.mean_fn = fn_ms.mean;
    row.se_fn = fn_ms.se;
    const auto tn_ms = mean_se(tns);
    row.mean_tn = tn_ms.mean;
    row.se_tn = tn_ms.se;

    row.mean_precision = mean_defined(precs);
    row.mean_recall = mean_defined(recs);
    row.mean_accuracy = mean_defined(accs);
    row.pooled_precision = precision(sum_tp, sum_fp);
    row.pooled_recall = recall(sum_tp, sum_fn);
    row.pooled_accuracy = accuracy(sum_tp, sum_tn, sum_fp, sum_fn);

    row.detected = tds.size();
    if (!tds.empty()) {
        const auto td_ms = mean_se(tds);
        row.mean_t_delta = td_ms.mean;
        row.se_t_delta = td_ms.se;
    }
    return row;
}

} // namespace viewsim
