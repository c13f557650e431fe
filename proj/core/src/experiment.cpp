#include "viewsim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <thread>

#include "viewsim/control_plane.hpp"
#include "viewsim/csv.hpp"

namespace viewsim {

namespace {

constexpr std::uint64_t kStreamClients = 1;
constexpr std::uint64_t kStreamTraffic = 2;
constexpr std::uint64_t kStreamAttackPlan = 3;
constexpr std::uint64_t kStreamAttackGenBase = 1000;
constexpr double kSlotMargin = 5.0;
constexpr double kAgeSlack = 1e-9;

std::string format_period(double v) {
    return v == kNever ? "inf" : csv::format_real(v);
}

std::vector<HostId> dormant_clients(const Topology& topo, const std::vector<HostId>& active) {
    std::vector<HostId> dormant;
    for (HostId c : topo.clients()) {
        if (!std::binary_search(active.begin(), active.end(), c)) {
            dormant.push_back(c);
        }
    }
    return dormant;
}

std::vector<AttackWindow> plan_attacks(const ScenarioConfig& cfg, const Topology& topo,
                                       const std::vector<HostId>& active,
                                       RandomSource& rng) {
    std::vector<AttackWindow> windows;
    const double span = cfg.horizon - cfg.training_duration;
    const double slot = span / static_cast<double>(cfg.attacks_per_run);

    std::optional<HostId> syn_attacker;
    if (cfg.scenario == Scenario::Syn) {
        const auto clients = topo.clients();
        syn_attacker = clients[rng.uniform_index(clients.size())];
    }

    for (std::uint32_t k = 0; k < cfg.attacks_per_run; ++k) {
        const double lo = cfg.training_duration + k * slot + kSlotMargin;
        const double hi =
            cfg.training_duration + (k + 1) * slot - cfg.attack_length - kSlotMargin;
        AttackWindow w;
        w.attack_id = k;
        w.start = lo + rng.uniform01() * std::max(hi - lo, 0.0);
        w.end = w.start + cfg.attack_length;
        if (cfg.scenario == Scenario::Ddos) {
            w.kind = AttackKind::Ddos;
            const auto dormant = dormant_clients(topo, active);
            if (dormant.empty()) {
                throw InvariantViolation("no dormant clients available as attackers");
            }
            const std::size_t max_att = cfg.attackers_max == 0
                                            ? dormant.size()
                                            : std::min<std::size_t>(cfg.attackers_max,
                                                                    dormant.size());
            const std::size_t min_att = std::min<std::size_t>(cfg.attackers_min, max_att);
            const std::size_t count = min_att + rng.uniform_index(max_att - min_att + 1);
            // Partial Fisher-Yates over a copy of the dormant set.
            std::vector<HostId> pool = dormant;
            for (std::size_t i = 0; i < count; ++i) {
                const std::size_t j = i + rng.uniform_index(pool.size() - i);
                std::swap(pool[i], pool[j]);
            }
            w.attackers.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(count));
            std::sort(w.attackers.begin(), w.attackers.end());
        } else {
            w.kind = AttackKind::SynFlood;
            w.attackers = {*syn_attacker};
        }
        windows.push_back(std::move(w));
    }
    return windows;
}

struct TickPlan {
    std::vector<double> instants; // ascending
    std::set<double> poll_instants;
    std::set<double> sync_instants;
};

TickPlan make_tick_plan(double tau_p, double tau_s, double horizon) {
    TickPlan plan;
    std::set<double> instants;
    for (std::uint64_t k = 1;; ++k) {
        const double t = static_cast<double>(k) * tau_p;
        if (t > horizon) {
            break;
        }
        instants.insert(t);
        plan.poll_instants.insert(t);
    }
    if (tau_s != kNever) {
        for (std::uint64_t k = 1;; ++k) {
            const double t = static_cast<double>(k) * tau_s;
            if (t > horizon) {
                break;
            }
            instants.insert(t);
            plan.sync_instants.insert(t);
        }
    }
    plan.instants.assign(instants.begin(), instants.end());
    return plan;
}

std::string compact_number(double v) {
    if (v == kNever) {
        return "inf";
    }
    std::ostringstream os;
    os << v;
    return os.str();
}

} // namespace

std::uint64_t derive_run_seed(std::uint64_t base_seed, std::uint32_t run_idx) {
    return splitmix64(base_seed + splitmix64(run_idx));
}

std::vector<SweepPoint> sweep_points(const ScenarioConfig& cfg) {
    std::vector<double> syncs = cfg.sync_periods;
    if (cfg.controllers < 2 || syncs.empty()) {
        syncs = {kNever};
    }
    std::vector<SweepPoint> points;
    for (double tp : cfg.polling_periods) {
        for (double ts : syncs) {
            points.push_back(SweepPoint{tp, ts});
        }
    }
    return points;
}

RunArtifacts run_single(const ScenarioConfig& cfg, const SweepPoint& point,
                        std::uint32_t run_idx) {
    const std::uint64_t run_seed = derive_run_seed(cfg.base_seed, run_idx);
    RandomSource root(run_seed);
    auto rng_clients = root.derive(kStreamClients);
    auto rng_traffic = root.derive(kStreamTraffic);
    auto rng_attacks = root.derive(kStreamAttackPlan);

    Topology topo = Topology::two_domain(cfg.controllers, cfg.clients_per_switch);
    Simulator sim;
    Network net(topo, sim, cfg.enforce_capacity);

    const auto active =
        sample_active_clients(topo, cfg.traffic.active_client_fraction, rng_clients);
    LegitTraffic legit(sim, net, cfg.traffic, active, cfg.horizon, rng_traffic);
    legit.start();

    RunArtifacts art;
    art.attacks = plan_attacks(cfg, topo, active, rng_attacks);
    for (const AttackWindow& w : art.attacks) {
        if (w.kind == AttackKind::Ddos) {
            schedule_ddos(sim, net, cfg.ddos, w);
        } else {
            schedule_syn_flood(sim, net, cfg.syn, w,
                               root.derive(kStreamAttackGenBase + w.attack_id));
        }
    }

    const double tau_p = point.tau_p;
    const double tau_s = cfg.controllers >= 2 ? point.tau_s : kNever;

    std::vector<Controller> controllers;
    std::vector<ControllerId> controller_ids;
    {
        std::set<ControllerId> ids;
        for (const auto& [sw, c] : topo.controller_assignment) {
            ids.insert(c);
        }
        controller_ids.assign(ids.begin(), ids.end());
        controllers.reserve(controller_ids.size());
        for (ControllerId c : controller_ids) {
            controllers.emplace_back(c, topo, net, tau_p, tau_s);
        }
    }

    const bool server_mode = cfg.scenario == Scenario::Ddos;
    std::vector<ClusterModel> models;
    std::vector<ServerFeatureExtractor> server_ex;
    std::vector<SourceFeatureExtractor> source_ex;
    for (std::size_t i = 0; i < controllers.size(); ++i) {
        models.emplace_back(cfg.ids.clusters, cfg.ids.weights, cfg.ids.theta,
                            cfg.ids.epsilon_r);
        if (server_mode) {
            server_ex.emplace_back(topo);
        } else {
            source_ex.emplace_back(tau_p);
        }
    }

    std::map<std::pair<ControllerId, HostId>, std::vector<Verdict>> verdict_logs;
    EvalGrid grid;
    grid.step = tau_p;

    const auto evaluate = [&](std::size_t ci) {
        const SimTime t = sim.now();
        Controller& ctrl = controllers[ci];
        const MergedView merged = ctrl.merged_view(t);

        // Staleness bounds: local data is at most one polling period old;
        // remote data at most sync + polling period old.
        for (const auto& [sw, entry] : merged.per_switch) {
            if (entry.never_synced) {
                continue;
            }
            const double age = t - entry.snapshot.captured_at;
            const bool local = ctrl.view().local.count(sw) > 0;
            if (local) {
                art.max_local_age = std::max(art.max_local_age, age);
                if (age > tau_p + kAgeSlack) {
                    ++art.staleness_violations;
                }
            } else {
                art.max_remote_age = std::max(art.max_remote_age, age);
                if (tau_s != kNever && age > tau_s + tau_p + kAgeSlack) {
                    ++art.staleness_violations;
                }
            }
            if (cfg.emit_staleness) {
                art.staleness.push_back(
                    StalenessSample{t, ctrl.id(), sw, local, age});
            }
        }

        const auto points = server_mode ? server_ex[ci].extract(merged)
                                        : source_ex[ci].extract(merged);
        const bool training = t <= cfg.training_duration;
        ClusterModel& model = models[ci];
        if (training) {
            for (const auto& pt : points) {
                model.insert(pt);
            }
            return;
        }
        if (!cfg.ids.continuous_update && model.phase() == ClusterModel::Phase::Training) {
            model.freeze();
        }
        if (ci == 0) {
            grid.ticks.push_back(t);
        }
        for (const auto& pt : points) {
            const Verdict v =
                cfg.ids.continuous_update ? model.score(pt) : model.classify(pt);
            verdict_logs[{ctrl.id(), pt.subject}].push_back(v);
            if (cfg.ids.continuous_update) {
                model.insert(pt);
            }
        }
    };

    // All control-plane ticks are laid out up front so that coincident
    // instants always process as poll, then sync, then evaluation.
    const TickPlan plan = make_tick_plan(tau_p, tau_s, cfg.horizon);
    for (double t : plan.instants) {
        const bool is_poll = plan.poll_instants.count(t) > 0;
        if (is_poll) {
            for (std::size_t ci = 0; ci < controllers.size(); ++ci) {
                sim.schedule(t, EventKind::PollTick,
                             [&controllers, ci, t] { controllers[ci].poll(t); });
            }
        }
        if (plan.sync_instants.count(t) && controllers.size() == 2) {
            sim.schedule(t, EventKind::SyncTick,
                         [&controllers, t] { sync_views(controllers[0], controllers[1], t); });
        }
        if (is_poll) {
            for (std::size_t ci = 0; ci < controllers.size(); ++ci) {
                sim.schedule(t, EventKind::EvalTick, [&evaluate, ci] { evaluate(ci); });
            }
        }
    }

    sim.run_until(cfg.horizon);

    // Build per-stream results.
    const double grace = tau_p;
    if (server_mode) {
        for (std::size_t ci = 0; ci < controllers.size(); ++ci) {
            for (HostId server : topo.servers()) {
                const auto key = std::make_pair(controllers[ci].id(), server);
                static const std::vector<Verdict> kEmpty;
                const auto it = verdict_logs.find(key);
                const auto& log = it == verdict_logs.end() ? kEmpty : it->second;
                StreamResult sr;
                sr.controller = controllers[ci].id();
                sr.subject = server;
                const auto owned = controllers[ci].owned();
                sr.remote_subject =
                    std::find(owned.begin(), owned.end(), topo.attached(server)) ==
                    owned.end();
                sr.metrics = match(art.attacks, episodes_from_verdicts(log, grid.step),
                                   grid, grace);
                sr.metrics.run_id = run_idx;
                sr.metrics.seed = run_seed;
                sr.metrics.tau_p = tau_p;
                sr.metrics.tau_s = tau_s;
                art.streams.push_back(std::move(sr));
            }
        }
    } else {
        std::set<std::pair<ControllerId, HostId>> keys;
        for (const auto& [key, log] : verdict_logs) {
            keys.insert(key);
        }
        for (const Controller& c : controllers) {
            for (const AttackWindow& w : art.attacks) {
                keys.insert({c.id(), w.attackers.front()});
            }
        }
        for (const auto& [ctrl, subject] : keys) {
            static const std::vector<Verdict> kEmpty;
            const auto it = verdict_logs.find({ctrl, subject});
            const auto& log = it == verdict_logs.end() ? kEmpty : it->second;
            std::vector<AttackWindow> subject_attacks;
            for (const AttackWindow& w : art.attacks) {
                if (w.attackers.front() == subject) {
                    subject_attacks.push_back(w);
                }
            }
            StreamResult sr;
            sr.controller = ctrl;
            sr.subject = subject;
            sr.remote_subject = false;
            sr.metrics = match(subject_attacks, episodes_from_verdicts(log, grid.step),
                               grid, grace);
            sr.metrics.run_id = run_idx;
            sr.metrics.seed = run_seed;
            sr.metrics.tau_p = tau_p;
            sr.metrics.tau_s = tau_s;
            art.streams.push_back(std::move(sr));
        }
    }

    // Aggregate the run row.
    RunRecord& rec = art.record;
    rec.sweep_value = point.sweep_value(cfg.scenario);
    rec.tau_p = tau_p;
    rec.tau_s = tau_s;
    rec.run_id = run_idx;
    rec.seed = run_seed;
    if (server_mode) {
        // Reported streams: the server remote to each controller (all
        // servers under a single controller).
        std::vector<const StreamResult*> reported;
        for (const auto& sr : art.streams) {
            if (cfg.controllers < 2 || sr.remote_subject) {
                reported.push_back(&sr);
            }
        }
        const auto n = static_cast<double>(reported.size());
        for (const StreamResult* sr : reported) {
            rec.tp += static_cast<double>(sr->metrics.tp) / n;
            rec.fp += static_cast<double>(sr->metrics.fp) / n;
            rec.fn += static_cast<double>(sr->metrics.fn) / n;
            rec.tn += static_cast<double>(sr->metrics.tn) / n;
            for (const auto& td : sr->metrics.t_delta) {
                if (td) {
                    rec.detected_t_deltas.push_back(*td);
                } else {
                    ++rec.excluded;
                }
            }
        }
    } else {
        // An attack counts as detected when any controller's stream for
        // the attacker catches it; its detection time is the earliest.
        for (std::size_t a = 0; a < art.attacks.size(); ++a) {
            std::optional<double> best;
            for (const auto& sr : art.streams) {
                if (sr.subject != art.attacks[a].attackers.front()) {
                    continue;
                }
                std::size_t idx = 0;
                for (std::size_t k = 0; k < a; ++k) {
                    if (art.attacks[k].attackers.front() == sr.subject) {
                        ++idx;
                    }
                }
                const auto& td = sr.metrics.t_delta.at(idx);
                if (td && (!best || *td < *best)) {
                    best = *td;
                }
            }
            if (best) {
                rec.tp += 1.0;
                rec.detected_t_deltas.push_back(*best);
            } else {
                rec.fn += 1.0;
                ++rec.excluded;
            }
        }
        // FP/TN sum over subjects, averaged over controllers.
        std::map<ControllerId, std::pair<double, double>> per_ctrl;
        for (const Controller& c : controllers) {
            per_ctrl[c.id()] = {0.0, 0.0};
        }
        for (const auto& sr : art.streams) {
            per_ctrl[sr.controller].first += static_cast<double>(sr.metrics.fp);
            per_ctrl[sr.controller].second += static_cast<double>(sr.metrics.tn);
        }
        for (const auto& [c, ft] : per_ctrl) {
            rec.fp += ft.first / static_cast<double>(per_ctrl.size());
            rec.tn += ft.second / static_cast<double>(per_ctrl.size());
        }
    }
    rec.precision = precision(rec.tp, rec.fp);
    rec.recall = recall(rec.tp, rec.fn);
    rec.accuracy = accuracy(rec.tp, rec.tn, rec.fp, rec.fn);

    art.delivery_digest = net.delivery_digest();

    if (cfg.dump_models) {
        for (std::size_t ci = 0; ci < controllers.size(); ++ci) {
            std::ostringstream name;
            name << "model_sweep" << compact_number(rec.sweep_value) << "_run" << run_idx
                 << "_ctrl" << controllers[ci].id() << ".txt";
            std::ostringstream body;
            models[ci].dump(body);
            art.model_dumps.emplace_back(name.str(), body.str());
        }
    }
    return art;
}

namespace {

std::string render_per_run_header() {
    return csv::join_row({"scenario", "sweep_value", "tau_p", "tau_s", "run", "seed", "tp",
                          "fp", "fn", "tn", "precision", "recall", "accuracy",
                          "mean_t_delta", "detected", "excluded"});
}

std::string render_per_run_row(Scenario scenario, const RunRecord& r) {
    std::optional<double> mean_td;
    if (!r.detected_t_deltas.empty()) {
        double s = 0.0;
        for (double v : r.detected_t_deltas) {
            s += v;
        }
        mean_td = s / static_cast<double>(r.detected_t_deltas.size());
    }
    return csv::join_row({to_string(scenario), csv::format_real(r.sweep_value),
                          csv::format_real(r.tau_p), format_period(r.tau_s),
                          std::to_string(r.run_id), std::to_string(r.seed),
                          csv::format_real(r.tp), csv::format_real(r.fp),
                          csv::format_real(r.fn), csv::format_real(r.tn),
                          csv::format_opt(r.precision), csv::format_opt(r.recall),
                          csv::format_opt(r.accuracy), csv::format_opt(mean_td),
                          std::to_string(r.detected_t_deltas.size()),
                          std::to_string(r.excluded)});
}

std::string render_summary_header() {
    return csv::join_row({"scenario", "sweep_value", "tau_p", "tau_s", "runs", "mean_tp",
                          "se_tp", "mean_fp", "se_fp", "mean_fn", "se_fn", "mean_tn",
                          "se_tn", "mean_precision", "mean_recall", "mean_accuracy",
                          "pooled_precision", "pooled_recall", "pooled_accuracy",
                          "mean_t_delta", "se_t_delta", "detected", "excluded"});
}

std::string render_summary_row(Scenario scenario, const SummaryRow& s) {
    return csv::join_row(
        {to_string(scenario), csv::format_real(s.sweep_value), csv::format_real(s.tau_p),
         format_period(s.tau_s), std::to_string(s.runs), csv::format_real(s.mean_tp),
         csv::format_real(s.se_tp), csv::format_real(s.mean_fp), csv::format_real(s.se_fp),
         csv::format_real(s.mean_fn), csv::format_real(s.se_fn),
         csv::format_real(s.mean_tn), csv::format_real(s.se_tn),
         csv::format_opt(s.mean_precision), csv::format_opt(s.mean_recall),
         csv::format_opt(s.mean_accuracy), csv::format_opt(s.pooled_precision),
         csv::format_opt(s.pooled_recall), csv::format_opt(s.pooled_accuracy),
         csv::format_opt(s.mean_t_delta), csv::format_opt(s.se_t_delta),
         std::to_string(s.detected), std::to_string(s.excluded)});
}

std::string render_text_table(Scenario scenario, const std::vector<SummaryRow>& rows) {
    std::ostringstream os;
    os << "scenario " << to_string(scenario) << "\n";
    os << "sweep      mean_tp  mean_fp  mean_fn  t_delta(mean+-se)   excluded  "
          "precision  recall  accuracy\n";
    for (const auto& s : rows) {
        char line[256];
        std::string td = "n/a";
        if (s.mean_t_delta) {
            td = csv::format_real(*s.mean_t_delta) + "+-" +
                 csv::format_real(s.se_t_delta.value_or(0.0));
        }
        td += " (" + std::to_string(s.excluded) + "/" +
              std::to_string(s.excluded + s.detected) + " excluded)";
        std::snprintf(line, sizeof(line), "%-10s %-8.3f %-8.3f %-8.3f %-28s %-9s %-9s %-8s\n",
                      format_period(s.sweep_value).c_str(), s.mean_tp, s.mean_fp, s.mean_fn,
                      td.c_str(),
                      s.mean_precision ? csv::format_real(*s.mean_precision).c_str() : "n/a",
                      s.mean_recall ? csv::format_real(*s.mean_recall).c_str() : "n/a",
                      s.mean_accuracy ? csv::format_real(*s.mean_accuracy).c_str() : "n/a");
        os << line;
    }
    return os.str();
}

} // namespace

ExperimentResult run_experiment(const ScenarioConfig& cfg, unsigned jobs) {
    cfg.validate();
    const auto points = sweep_points(cfg);
    const std::size_t total = points.size() * cfg.runs;
    std::vector<RunArtifacts> artifacts(total);

    if (jobs == 0) {
        jobs = std::max(1u, std::thread::hardware_concurrency());
    }
    jobs = std::min<unsigned>(jobs, static_cast<unsigned>(total));

    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    std::atomic<bool> failed{false};
    std::string failure;
    std::mutex failure_mu;
    for (unsigned w = 0; w < jobs; ++w) {
        workers.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= total || failed.load()) {
                    return;
                }
                const std::size_t p = i / cfg.runs;
                const auto run_idx = static_cast<std::uint32_t>(i % cfg.runs);
                try {
                    artifacts[i] = run_single(cfg, points[p], run_idx);
                } catch (const std::exception& e) {
                    failed.store(true);
                    std::lock_guard<std::mutex> lock(failure_mu);
                    if (failure.empty()) {
                        failure = e.what();
                    }
                    return;
                }
            }
        });
    }
    for (auto& t : workers) {
        t.join();
    }
    if (failed.load()) {
        throw InvariantViolation("run failed: " + failure);
    }

    ExperimentResult result;
    result.per_run_csv = render_per_run_header();
    std::uint64_t violations = 0;
    for (std::size_t i = 0; i < total; ++i) {
        const RunArtifacts& art = artifacts[i];
        violations += art.staleness_violations;
        result.runs.push_back(art.record);
        result.per_run_csv += render_per_run_row(cfg.scenario, art.record);
        result.delivery_digests.push_back(art.delivery_digest);
        for (const auto& dump : art.model_dumps) {
            result.model_dumps.push_back(dump);
        }
    }
    if (violations > 0) {
        throw InvariantViolation("staleness bound violated " + std::to_string(violations) +
                                 " times");
    }

    result.summary_csv = render_summary_header();
    for (std::size_t p = 0; p < points.size(); ++p) {
        const std::span<const RunRecord> slice(result.runs.data() + p * cfg.runs, cfg.runs);
        SummaryRow row = summarize(slice);
        result.summary_csv += render_summary_row(cfg.scenario, row);
        result.summary.push_back(std::move(row));
    }
    result.text_table = render_text_table(cfg.scenario, result.summary);

    if (cfg.emit_staleness) {
        result.staleness_csv = csv::join_row(
            {"scenario", "sweep_value", "run", "time", "controller", "switch", "kind", "age"});
        for (std::size_t i = 0; i < total; ++i) {
            const RunArtifacts& art = artifacts[i];
            for (const auto& s : art.staleness) {
                result.staleness_csv += csv::join_row(
                    {to_string(cfg.scenario), csv::format_real(art.record.sweep_value),
                     std::to_string(art.record.run_id), csv::format_real(s.at),
                     std::to_string(s.controller), std::to_string(s.sw),
                     s.local ? "local" : "remote", csv::format_real(s.age)});
            }
        }
    }
    return result;
}

std::string write_outputs(const ScenarioConfig& cfg, const ExperimentResult& result) {
    namespace fs = std::filesystem;
    const fs::path dir(cfg.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    const auto write = [&](const fs::path& p, const std::string& body) {
        std::ofstream os(p, std::ios::binary);
        if (!os) {
            throw std::runtime_error("cannot write " + p.string());
        }
        os << body;
    };
    write(dir / "per_run.csv", result.per_run_csv);
    write(dir / "summary.csv", result.summary_csv);
    if (!result.staleness_csv.empty()) {
        write(dir / "staleness.csv", result.staleness_csv);
    }
    for (const auto& [name, body] : result.model_dumps) {
        write(dir / name, body);
    }
    return (dir / "summary.csv").string();
}

} // namespace viewsim
