#include <doctest.h>

#include <set>

#include "viewsim/csv.hpp"
#include "viewsim/experiment.hpp"

using namespace viewsim;

TEST_SUITE_BEGIN("experiment");

namespace {

// Small but complete scenarios so the suite stays fast.
ScenarioConfig small_ddos() {
    auto cfg = parse_config("scenario = ddos\n"
                            "[attack]\nattacks_per_run = 2\n"
                            "[sweep]\nsync_periods = 2,16\n"
                            "[run]\nruns = 2\ntraining_duration = 120\nhorizon = 240\n");
    return cfg;
}

ScenarioConfig small_syn() {
    auto cfg = parse_config("scenario = syn\n"
                            "[attack]\nattack_length = 30\n"
                            "[sweep]\npolling_periods = 2,8\n"
                            "[run]\nruns = 2\ntraining_duration = 120\nhorizon = 200\n");
    return cfg;
}

} // namespace

TEST_CASE("two executions produce byte-identical tables") {
    const auto cfg = small_ddos();
    const auto a = run_experiment(cfg, 2);
    const auto b = run_experiment(cfg, 1); // worker count must not matter
    CHECK(a.per_run_csv == b.per_run_csv);
    CHECK(a.summary_csv == b.summary_csv);
    CHECK(a.delivery_digests == b.delivery_digests);
}

TEST_CASE("workload draws are identical across sync-period sweep points") {
    const auto cfg = small_ddos();
    const auto result = run_experiment(cfg, 2);
    // digests ordered by (sweep, run): run k must match across points
    REQUIRE(result.delivery_digests.size() == 4);
    CHECK(result.delivery_digests[0] == result.delivery_digests[2]);
    CHECK(result.delivery_digests[1] == result.delivery_digests[3]);
    // and differ across runs
    CHECK(result.delivery_digests[0] != result.delivery_digests[1]);
}

TEST_CASE("attack plans are sweep-independent and slot-disjoint") {
    const auto cfg = small_ddos();
    const SweepPoint p1{2.0, 2.0};
    const SweepPoint p2{2.0, 16.0};
    const auto a = run_single(cfg, p1, 0);
    const auto b = run_single(cfg, p2, 0);
    REQUIRE(a.attacks.size() == 2);
    for (std::size_t i = 0; i < a.attacks.size(); ++i) {
        CHECK(a.attacks[i].start == b.attacks[i].start);
        CHECK(a.attacks[i].attackers == b.attacks[i].attackers);
        CHECK(a.attacks[i].end - a.attacks[i].start == cfg.attack_length);
        CHECK(a.attacks[i].start >= cfg.training_duration);
        CHECK(a.attacks[i].end < cfg.horizon);
        if (i > 0) {
            CHECK(a.attacks[i].start > a.attacks[i - 1].end);
        }
    }
}

TEST_CASE("ddos attackers are dormant clients resampled per attack") {
    const auto cfg = small_ddos();
    const auto art = run_single(cfg, SweepPoint{2.0, 2.0}, 1);
    for (const auto& w : art.attacks) {
        CHECK(w.attackers.size() >= cfg.attackers_min);
        CHECK(w.attackers.size() <= cfg.attackers_max);
    }
    // distinct attacks usually draw distinct sets
    CHECK(art.attacks[0].attackers != art.attacks[1].attackers);
}

TEST_CASE("remote streams are flagged against the owning controller") {
    const auto cfg = small_ddos();
    const auto art = run_single(cfg, SweepPoint{2.0, 2.0}, 0);
    std::set<std::pair<ControllerId, HostId>> remote;
    for (const auto& sr : art.streams) {
        if (sr.remote_subject) {
            remote.insert({sr.controller, sr.subject});
        }
        CHECK(sr.metrics.tp + sr.metrics.fn == art.attacks.size());
    }
    const Topology topo = Topology::two_domain(2);
    CHECK(remote == std::set<std::pair<ControllerId, HostId>>{
                        {0, topo.server_of(1)}, {1, topo.server_of(0)}});
}

TEST_CASE("staleness bounds hold at every evaluation tick") {
    const auto cfg = small_ddos();
    for (double tau_s : {2.0, 16.0}) {
        const auto art = run_single(cfg, SweepPoint{2.0, tau_s}, 0);
        CHECK(art.staleness_violations == 0);
        CHECK(art.max_local_age <= 2.0 + 1e-9);
        CHECK(art.max_remote_age <= tau_s + 2.0 + 1e-9);
    }
}

TEST_CASE("syn runs track the attacker stream and detection times") {
    const auto cfg = small_syn();
    const auto art = run_single(cfg, SweepPoint{2.0, kNever}, 0);
    REQUIRE(art.attacks.size() == 1);
    const HostId attacker = art.attacks[0].attackers.front();
    bool found = false;
    for (const auto& sr : art.streams) {
        if (sr.subject == attacker) {
            found = true;
            CHECK(sr.metrics.tp + sr.metrics.fn == 1);
        } else {
            CHECK(sr.metrics.tp + sr.metrics.fn == 0);
        }
    }
    CHECK(found);
    CHECK(art.record.tp + art.record.fn == 1.0);
    if (art.record.tp == 1.0) {
        REQUIRE(art.record.detected_t_deltas.size() == 1);
        CHECK(art.record.detected_t_deltas[0] >= 0.0);
    }
}

TEST_CASE("per-run csv round-trips through the reader") {
    const auto cfg = small_syn();
    const auto result = run_experiment(cfg, 2);
    const auto rows = csv::parse(result.per_run_csv);
    REQUIRE(rows.size() == 1 + 4); // header + 2 sweep x 2 runs
    REQUIRE(rows[0].size() == 16);
    CHECK(rows[0][0] == "scenario");
    for (std::size_t r = 1; r < rows.size(); ++r) {
        REQUIRE(rows[r].size() == rows[0].size());
        CHECK(rows[r][0] == "syn");
        // numeric fields re-render to the same bytes
        for (std::size_t c : {1u, 2u, 6u, 7u, 8u, 9u}) {
            const double v = std::stod(rows[r][c]);
            CHECK(csv::format_real(v) == rows[r][c]);
        }
    }
    const auto summary_rows = csv::parse(result.summary_csv);
    REQUIRE(summary_rows.size() == 1 + 2);
    CHECK(summary_rows[0].size() == 23);
}

TEST_CASE("staleness csv is emitted only on request") {
    auto cfg = small_ddos();
    cfg.runs = 1;
    cfg.sync_periods = {4.0};
    CHECK(run_experiment(cfg, 1).staleness_csv.empty());
    cfg.emit_staleness = true;
    const auto result = run_experiment(cfg, 1);
    const auto rows = csv::parse(result.staleness_csv);
    REQUIRE(rows.size() > 1);
    CHECK(rows[0][6] == "kind");
    bool saw_remote = false;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r][6] == "remote") {
            saw_remote = true;
            CHECK(std::stod(rows[r][7]) <= 4.0 + 2.0 + 1e-9);
        }
    }
    CHECK(saw_remote);
}

TEST_CASE("model dumps cover each controller when requested") {
    auto cfg = small_ddos();
    cfg.runs = 1;
    cfg.sync_periods = {2.0};
    cfg.dump_models = true;
    const auto result = run_experiment(cfg, 1);
    REQUIRE(result.model_dumps.size() == 2);
    CHECK(result.model_dumps[0].first == "model_sweep2_run0_ctrl0.txt");
    CHECK(result.model_dumps[0].second.find("phase detection") != std::string::npos);
}

TEST_CASE("csv quoting survives round trips") {
    CHECK(csv::quote("plain") == "plain");
    CHECK(csv::quote("a,b") == "\"a,b\"");
    const auto rows = csv::parse(csv::join_row({"a,b", "c\"d", "e"}));
    REQUIRE(rows.size() == 1);
    CHECK(rows[0][0] == "a,b");
    CHECK(rows[0][1] == "c\"d");
    CHECK(rows[0][2] == "e");
}

TEST_SUITE_END();
