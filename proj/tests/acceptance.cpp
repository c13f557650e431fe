// Acceptance suite: one criterion per function, one PASS/FAIL line each.
// Run all with no arguments or a single criterion by number.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "viewsim/config.hpp"
#include "viewsim/control_plane.hpp"
#include "viewsim/experiment.hpp"
#include "viewsim/ids.hpp"
#include "viewsim/metrics.hpp"
#include "viewsim/traffic.hpp"

using namespace viewsim;

namespace {

struct Check {
    bool ok = true;
    std::string detail;

    void expect(bool cond, const std::string& why) {
        if (!cond) {
            ok = false;
            detail += (detail.empty() ? "" : "; ") + why;
        }
    }
    void note(const std::string& info) {
        detail += (detail.empty() ? "" : "; ") + info;
    }
};

double elapsed_s(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

// ---- 1. detection time grows with the polling period -----------------------

Check criterion_1() {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    const auto cfg = parse_config("scenario = syn\n");
    const auto result = run_experiment(cfg);
    std::vector<double> means;
    for (const auto& row : result.summary) {
        c.expect(row.mean_t_delta.has_value(),
                 "no detections at polling period " + fmt(row.sweep_value));
        means.push_back(row.mean_t_delta.value_or(0.0));
    }
    for (std::size_t i = 1; i < means.size(); ++i) {
        c.expect(means[i] >= means[i - 1],
                 "mean detection time not non-decreasing at point " + std::to_string(i));
    }
    if (!means.empty() && means.front() > 0.0) {
        const double ratio = means.back() / means.front();
        c.expect(ratio >= 2.0, "T(32)/T(2) = " + fmt(ratio) + " < 2");
        c.note("T_delta means 2..32 = " + fmt(means[0]) + " " + fmt(means[1]) + " " +
               fmt(means[2]) + " " + fmt(means[3]) + " " + fmt(means[4]) +
               ", ratio " + fmt(means.back() / means.front()));
    }
    const double secs = elapsed_s(t0);
    c.expect(secs < 120.0, "runtime " + fmt(secs) + "s exceeds 2 min");
    c.note("runtime " + fmt(secs) + "s");
    return c;
}

// ---- 2. an attack strictly between polls is invisible until the next poll --

Check criterion_2() {
    Check c;
    const double tau_p = 8.0;
    Topology topo = Topology::two_domain(1);
    Simulator sim;
    Network net(topo, sim);
    RandomSource root(4242);
    auto rng_clients = root.derive(1);
    auto rng_traffic = root.derive(2);

    const auto active = sample_active_clients(topo, 0.5, rng_clients);
    const double horizon = 680.0;
    LegitTraffic legit(sim, net, LegitTrafficParams{}, active, horizon, rng_traffic);
    legit.start();

    // one-second flood placed strictly inside (608, 616)
    AttackWindow w;
    w.start = 611.0;
    w.end = 612.0;
    w.kind = AttackKind::SynFlood;
    w.attackers = {active.at(3)};
    schedule_syn_flood(sim, net, SynFloodParams{}, w, root.derive(1000));

    Controller ctrl(0, topo, net, tau_p, kNever);
    SourceFeatureExtractor extractor(tau_p);
    ClusterModel model(4, Weights{16, 2046, 0.25}, 1.5, 0.1);
    const double training_until = 600.0;
    std::vector<Verdict> attacker_verdicts;
    for (int k = 1; k * tau_p <= horizon; ++k) {
        const double t = k * tau_p;
        sim.schedule(t, EventKind::PollTick, [&ctrl, t] { ctrl.poll(t); });
        sim.schedule(t, EventKind::EvalTick, [&, t] {
            const auto points = extractor.extract(ctrl.merged_view(t));
            for (const auto& pt : points) {
                if (t <= training_until) {
                    model.insert(pt);
                    continue;
                }
                if (model.phase() == ClusterModel::Phase::Training) {
                    model.freeze();
                }
                const Verdict v = model.classify(pt);
                if (v.subject == w.attackers.front()) {
                    attacker_verdicts.push_back(v);
                }
            }
        });
    }
    sim.run_until(horizon);

    bool before_next_poll = false;
    bool at_next_poll = false;
    for (const auto& v : attacker_verdicts) {
        if (v.anomalous && v.at > w.start && v.at < 616.0) {
            before_next_poll = true;
        }
        if (v.anomalous && v.at == 616.0) {
            at_next_poll = true;
        }
    }
    c.expect(!before_next_poll, "anomalous verdict before the next poll tick");
    c.expect(at_next_poll, "flood not flagged at the 616 s poll (retention broken?)");
    return c;
}

// ---- 3. distributed flood: TP falls and FN rises with the sync period ------

Check criterion_3() {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    const auto cfg = parse_config("scenario = ddos\n");
    const auto result = run_experiment(cfg);
    std::vector<double> tp, fn, se;
    std::string shown;
    for (const auto& row : result.summary) {
        tp.push_back(row.mean_tp);
        fn.push_back(row.mean_fn);
        se.push_back(row.se_fn);
        shown += (shown.empty() ? "" : " ") + fmt(row.mean_tp);
    }
    c.note("mean TP at sync 2,4,8,16 = " + shown);
    c.expect(tp.front() - tp.back() >= 1.0,
             "TP(2) - TP(16) = " + fmt(tp.front() - tp.back()) + " < 1.0");
    for (std::size_t i = 1; i < tp.size(); ++i) {
        // monotone within one standard error of the difference
        const double slack = std::sqrt(se[i] * se[i] + se[i - 1] * se[i - 1]);
        c.expect(fn[i] >= fn[i - 1] - slack,
                 "FN not non-decreasing (within one SE) at point " + std::to_string(i));
        c.expect(tp[i] <= tp[i - 1] + slack,
                 "TP not non-increasing (within one SE) at point " + std::to_string(i));
    }
    const double secs = elapsed_s(t0);
    c.expect(secs < 180.0, "runtime " + fmt(secs) + "s exceeds 3 min");
    c.note("runtime " + fmt(secs) + "s");
    return c;
}

// ---- 4. sync period barely matters for a localized flood -------------------

Check criterion_4() {
    Check c;
    const auto cfg = parse_config("scenario = syn\n"
                                  "[topology]\ncontrollers = 2\n"
                                  "[sweep]\npolling_periods = 2\nsync_periods = 2,16\n");
    const auto result = run_experiment(cfg);
    const auto& a = result.summary.at(0);
    const auto& b = result.summary.at(1);
    c.expect(a.mean_t_delta.has_value() && b.mean_t_delta.has_value(),
             "missing detections");
    if (a.mean_t_delta && b.mean_t_delta) {
        const double rel =
            std::fabs(*a.mean_t_delta - *b.mean_t_delta) / *a.mean_t_delta;
        c.expect(rel < 0.15, "relative T_delta variation " + fmt(rel) + " >= 15%");
        c.note("T_delta " + fmt(*a.mean_t_delta) + " vs " + fmt(*b.mean_t_delta) +
               " (rel " + fmt(rel) + ")");
    }
    return c;
}

// ---- 5. exact quality formulas ---------------------------------------------

Check criterion_5() {
    Check c;
    c.expect(precision(3, 1) == 0.75, "precision(3,1) != 0.75");
    c.expect(recall(0, 5) == 0.0, "recall(0,5) != 0");
    c.expect(accuracy(1, 1, 1, 1) == 0.5, "accuracy(1,1,1,1) != 0.5");
    c.expect(!precision(0, 0).has_value(), "precision(0,0) should be undefined");
    return c;
}

// ---- 6. clustering equals its oracles --------------------------------------

Check criterion_6() {
    Check c;
    // sequential centroid == batch mean when a single cluster absorbs all
    RandomSource rng(7);
    ClusterModel single(1, Weights{1, 1, 1});
    double sp = 0, sb = 0, sf = 0;
    const int n = 1000;
    for (int i = 0; i < n; ++i) {
        FeaturePoint x{rng.uniform01() * 100, rng.uniform01() * 1e6, rng.uniform01() * 50,
                       0, 0};
        sp += x.p;
        sb += x.b;
        sf += x.f;
        single.insert(x);
    }
    const auto cen = single.centroid(0);
    c.expect(std::fabs(cen.p - sp / n) <= 1e-9 * std::fabs(sp / n), "p mean off");
    c.expect(std::fabs(cen.b - sb / n) <= 1e-9 * std::fabs(sb / n), "b mean off");
    c.expect(std::fabs(cen.f - sf / n) <= 1e-9 * std::fabs(sf / n), "f mean off");

    // well-separated blobs: assignments match a brute-force replay
    const Weights w{1, 1, 1};
    ClusterModel blobs(4, w);
    struct Oracle {
        double p, b, f;
        std::uint64_t n;
    };
    std::vector<Oracle> oracle;
    const double centers[4][3] = {{0, 0, 0}, {100, 0, 0}, {0, 100, 0}, {0, 0, 100}};
    RandomSource gen(8);
    for (int i = 0; i < 2000; ++i) {
        const std::size_t which = gen.uniform_index(4);
        FeaturePoint x{centers[which][0] + gen.uniform01(),
                       centers[which][1] + gen.uniform01(),
                       centers[which][2] + gen.uniform01(), 0, 0};
        const std::size_t got = blobs.insert(x);
        // replay: nearest oracle centroid, then the same running mean
        std::size_t want = 0;
        if (oracle.size() < 4) {
            want = oracle.size();
            oracle.push_back(Oracle{x.p, x.b, x.f, 1});
        } else {
            double best = -1;
            for (std::size_t k = 0; k < oracle.size(); ++k) {
                const double dp = x.p - oracle[k].p;
                const double db = x.b - oracle[k].b;
                const double df = x.f - oracle[k].f;
                const double d = std::sqrt(dp * dp + db * db + df * df);
                if (best < 0 || d < best) {
                    best = d;
                    want = k;
                }
            }
            auto& o = oracle[want];
            o.p = (o.p * o.n + x.p) / (o.n + 1);
            o.b = (o.b * o.n + x.b) / (o.n + 1);
            o.f = (o.f * o.n + x.f) / (o.n + 1);
            o.n += 1;
        }
        if (got != want) {
            c.expect(false, "assignment diverged from the oracle at point " +
                                std::to_string(i));
            break;
        }
    }
    return c;
}

// ---- 7. generated flow arrivals match the configured rates ------------------

Check criterion_7() {
    Check c;
    Topology topo = Topology::two_domain(2);
    Simulator sim;
    Network net(topo, sim);
    RandomSource root(20220405);
    auto rng_clients = root.derive(1);
    auto rng_traffic = root.derive(2);
    const auto active = sample_active_clients(topo, 0.5, rng_clients);
    LegitTrafficParams params;
    params.msg_rate_sw1 = 0.0; // arrivals-only dry run
    params.msg_rate_sw2 = 0.0;
    const double horizon = 100000.0;
    LegitTraffic gen(sim, net, params, active, horizon, rng_traffic);
    gen.start();
    // occasional polls keep the expired backlog drained
    for (double t = 5000.0; t <= horizon; t += 5000.0) {
        sim.schedule(t, EventKind::PollTick, [&net, t] {
            net.query_stats(0, t);
            net.query_stats(1, t);
        });
    }
    sim.run_until(horizon);
    const double r1 = static_cast<double>(gen.flows_started(0)) / horizon;
    const double r2 = static_cast<double>(gen.flows_started(1)) / horizon;
    c.expect(std::fabs(r1 - 3.0) / 3.0 < 0.02, "switch-1 arrival rate " + fmt(r1));
    c.expect(std::fabs(r2 - 4.0) / 4.0 < 0.02, "switch-2 arrival rate " + fmt(r2));
    c.note("rates " + fmt(r1) + " and " + fmt(r2) + " f/s");
    return c;
}

// ---- 8. the full default sweep is byte-reproducible -------------------------

Check criterion_8() {
    Check c;
    const auto cfg = parse_config("scenario = ddos\n");
    const auto a = run_experiment(cfg);
    const auto b = run_experiment(cfg);
    c.expect(a.per_run_csv == b.per_run_csv, "per-run CSVs differ");
    c.expect(a.summary_csv == b.summary_csv, "summary CSVs differ");
    c.note(std::to_string(a.runs.size()) + " runs compared");
    return c;
}

// ---- 9. staleness bounds hold at every evaluation tick ----------------------

Check criterion_9() {
    Check c;
    auto cfg = parse_config("scenario = ddos\n[run]\nruns = 2\n");
    std::uint64_t violations = 0;
    double worst_local = 0.0, worst_remote = 0.0;
    for (const auto& point : sweep_points(cfg)) {
        for (std::uint32_t run = 0; run < cfg.runs; ++run) {
            const auto art = run_single(cfg, point, run);
            violations += art.staleness_violations;
            worst_local = std::max(worst_local, art.max_local_age);
            worst_remote = std::max(worst_remote, art.max_remote_age - point.tau_s);
        }
    }
    c.expect(violations == 0, std::to_string(violations) + " staleness violations");
    c.note("max local age " + fmt(worst_local) + " <= tau_p; max remote age - tau_s " +
           fmt(worst_remote) + " <= tau_p");
    return c;
}

// ---- 10. undetected attacks are excluded from mean detection time ----------

Check criterion_10() {
    Check c;
    RunRecord r;
    r.sweep_value = 8.0;
    r.tp = 3;
    r.fn = 2;
    r.detected_t_deltas = {10.0, 10.0, 10.0};
    r.excluded = 2;
    const auto row = summarize(std::vector<RunRecord>{r});
    c.expect(row.mean_t_delta.has_value() && *row.mean_t_delta == 10.0,
             "mean over detected attacks should be 10");
    c.expect(row.excluded == 2, "excluded count should be 2");
    c.expect(row.mean_fn == 2.0, "the excluded attacks must count toward FN");

    RunRecord none;
    none.fn = 5;
    none.excluded = 5;
    const auto empty_row = summarize(std::vector<RunRecord>{none, none});
    c.expect(!empty_row.mean_t_delta.has_value(),
             "all-excluded sweep point must report no mean");
    c.expect(empty_row.excluded == 10, "all-excluded count wrong");
    return c;
}

} // namespace

int main(int argc, char** argv) {
    using CriterionFn = std::function<Check()>;
    const std::vector<std::pair<std::string, CriterionFn>> criteria = {
        {"detection time grows with the polling period", criterion_1},
        {"no verdict before the poll after a between-polls attack", criterion_2},
        {"TP falls and FN rises with the sync period (remote servers)", criterion_3},
        {"sync period is immaterial for a localized flood", criterion_4},
        {"precision/recall/accuracy formulas", criterion_5},
        {"sequential k-means equals batch-mean and replay oracles", criterion_6},
        {"Poisson flow arrival rates within 2%", criterion_7},
        {"byte-identical outputs across executions", criterion_8},
        {"staleness bounds at every evaluation tick", criterion_9},
        {"undetected attacks excluded from mean detection time", criterion_10},
    };

    int selected = 0;
    if (argc > 1) {
        selected = std::atoi(argv[1]);
        if (selected < 1 || selected > static_cast<int>(criteria.size())) {
            std::fprintf(stderr, "usage: %s [1..%zu]\n", argv[0], criteria.size());
            return 2;
        }
    }

    bool all_ok = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (selected != 0 && static_cast<int>(i + 1) != selected) {
            continue;
        }
        Check c;
        try {
            c = criteria[i].second();
        } catch (const std::exception& e) {
            c.ok = false;
            c.detail = std::string("exception: ") + e.what();
        }
        std::printf("[%s] criterion %2zu: %s%s%s\n", c.ok ? "PASS" : "FAIL", i + 1,
                    criteria[i].first.c_str(), c.detail.empty() ? "" : " -- ",
                    c.detail.c_str());
        std::fflush(stdout);
        all_ok = all_ok && c.ok;
    }
    return all_ok ? 0 : 1;
}
