#include "viewsim/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace viewsim {

std::vector<HostId> sample_active_clients(const Topology& topo, double fraction,
                                          RandomSource& rng) {
    if (fraction < 0.0 || fraction > 1.0) {
        throw std::invalid_argument("active_client_fraction must be in [0,1]");
    }
    std::vector<HostId> active;
    for (HostId c : topo.clients()) {
        if (rng.bernoulli(fraction)) {
            active.push_back(c);
        }
    }
    return active;
}

LegitTraffic::LegitTraffic(Simulator& sim, Network& net, LegitTrafficParams params,
                           std::vector<HostId> active_clients, SimTime horizon,
                           RandomSource rng)
    : sim_(sim), net_(net), params_(params), active_(std::move(active_clients)),
      horizon_(horizon), rng_(rng) {
    const auto& topo = net_.topology();
    if (topo.switches.size() != 2) {
        throw std::invalid_argument("LegitTraffic expects the two-domain topology");
    }
    servers_ = topo.servers();
    const double rates[2] = {params_.flow_rate_sw1, params_.flow_rate_sw2};
    const double msg_rates[2] = {params_.msg_rate_sw1, params_.msg_rate_sw2};
    for (std::size_t i = 0; i < 2; ++i) {
        Domain d;
        d.sw = topo.switches[i];
        d.flow_rate = rates[i];
        d.msg_rate = msg_rates[i];
        for (HostId c : topo.clients_of(d.sw)) {
            if (std::binary_search(active_.begin(), active_.end(), c)) {
                d.active_clients.push_back(c);
            }
        }
        domains_.push_back(std::move(d));
    }
}

void LegitTraffic::start() {
    for (std::size_t i = 0; i < domains_.size(); ++i) {
        if (domains_[i].active_clients.empty() || !(domains_[i].flow_rate > 0.0)) {
            continue; // a domain with no active clients stays silent
        }
        schedule_next_arrival(i);
    }
}

void LegitTraffic::schedule_next_arrival(std::size_t domain_idx) {
    const SimTime at = sim_.now() + rng_.exponential(domains_[domain_idx].flow_rate);
    if (at > horizon_) {
        return;
    }
    sim_.schedule(at, EventKind::FlowStart, [this, domain_idx] {
        launch_flow(domain_idx, sim_.now());
        schedule_next_arrival(domain_idx);
    });
}

void LegitTraffic::launch_flow(std::size_t domain_idx, SimTime at) {
    auto& d = domains_[domain_idx];
    const HostId src = d.active_clients[rng_.uniform_index(d.active_clients.size())];
    const HostId dst = servers_[rng_.uniform_index(servers_.size())];

    Flow f;
    f.src = src;
    f.dst = dst;
    f.start = at;
    f.ttl = params_.flow_ttl;
    f.msg_rate = d.msg_rate;
    f.payload = params_.payload;
    f.origin = FlowOrigin::Legit;
    const FlowId id = net_.install_flow(f);
    ++d.flows;

    if (!(d.msg_rate > 0.0)) {
        return;
    }
    SimTime t = at;
    while (true) {
        t += rng_.exponential(d.msg_rate);
        if (t > at + params_.flow_ttl) {
            break;
        }
        sim_.schedule(t, EventKind::MessageDeliver,
                      [this, id, t] { net_.deliver_message(id, t); });
        ++messages_scheduled_;
    }
}

std::uint64_t LegitTraffic::flows_started(SwitchId sw) const {
    for (const auto& d : domains_) {
        if (d.sw == sw) {
            return d.flows;
        }
    }
    throw std::invalid_argument("unknown switch " + std::to_string(sw));
}

void schedule_ddos(Simulator& sim, Network& net, const DdosParams& params,
                   const AttackWindow& window) {
    if (window.attackers.empty()) {
        throw std::invalid_argument("schedule_ddos: empty attacker set");
    }
    if (window.end < window.start) {
        throw std::invalid_argument("schedule_ddos: window ends before it starts");
    }
    const DdosParams p = params;
    const AttackWindow w = window;
    sim.schedule(w.start, EventKind::AttackStart, [&sim, &net, p, w] {
        std::vector<HostId> targets;
        if (w.target) {
            targets.push_back(*w.target);
        } else {
            targets = net.topology().servers();
        }
        const double len = w.end - w.start;
        const auto messages = static_cast<std::uint64_t>(std::floor(p.cbr_msg_rate * len));
        for (HostId attacker : w.attackers) {
            for (HostId server : targets) {
                Flow f;
                f.src = attacker;
                f.dst = server;
                f.start = w.start;
                f.ttl = std::max(len, 1e-9);
                f.msg_rate = p.cbr_msg_rate;
                f.payload = p.cbr_payload;
                f.origin = FlowOrigin::Ddos;
                const FlowId id = net.install_flow(f);
                for (std::uint64_t k = 0; k < messages; ++k) {
                    const SimTime t = w.start + (static_cast<double>(k) + 0.5) / p.cbr_msg_rate;
                    sim.schedule(t, EventKind::MessageDeliver,
                                 [&net, id, t] { net.deliver_message(id, t); });
                }
            }
        }
    });
    sim.schedule(w.end, EventKind::AttackEnd, [] {});
}

void schedule_syn_flood(Simulator& sim, Network& net, const SynFloodParams& params,
                        const AttackWindow& window, RandomSource rng) {
    if (window.attackers.size() != 1) {
        throw std::invalid_argument("schedule_syn_flood: exactly one attacker expected");
    }
    if (window.end < window.start) {
        throw std::invalid_argument("schedule_syn_flood: window ends before it starts");
    }
    const SynFloodParams p = params;
    const AttackWindow w = window;
    // Shared state for the self-scheduling arrival chain.
    auto state = std::make_shared<RandomSource>(rng);
    struct Chain {
        static void next(Simulator& sim, Network& net, const SynFloodParams& p,
                         const AttackWindow& w, std::shared_ptr<RandomSource> rng) {
            const SimTime at = sim.now() + rng->exponential(p.syn_rate);
            if (at >= w.end) {
                return;
            }
            sim.schedule(at, EventKind::FlowStart, [&sim, &net, p, w, rng] {
                const auto servers = net.topology().servers();
                const HostId dst = servers[rng->uniform_index(servers.size())];
                Flow f;
                f.src = w.attackers.front();
                f.dst = dst;
                f.start = sim.now();
                f.ttl = p.syn_flow_ttl;
                f.msg_rate = 0.0;
                f.payload = p.syn_payload;
                f.origin = FlowOrigin::Syn;
                const FlowId id = net.install_flow(f);
                net.deliver_message(id, sim.now()); // the lone SYN packet
                next(sim, net, p, w, rng);
            });
        }
    };
    if (window.start >= window.end) {
        return;
    }
    sim.schedule(w.start, EventKind::AttackStart,
                 [&sim, &net, p, w, state] { Chain::next(sim, net, p, w, state); });
    sim.schedule(w.end, EventKind::AttackEnd, [] {});
}

} // namespace viewsim
