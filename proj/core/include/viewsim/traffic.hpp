#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "viewsim/net_model.hpp"
#include "viewsim/random.hpp"
#include "viewsim/sim_kernel.hpp"

namespace viewsim {

// Legitimate workload parameters. Flow starts per switch domain form a
// Poisson process; messages within a flow form another Poisson process
// for the flow's lifetime. A zero message rate disables deliveries
// (arrivals-only dry runs).
struct LegitTrafficParams {
    double flow_rate_sw1 = 3.0;  // flows/s, domain I
    double flow_rate_sw2 = 4.0;  // flows/s, domain II
    double flow_ttl = 2.0;       // s
    double msg_rate_sw1 = 34.0;  // msgs/s within a domain-I flow
    double msg_rate_sw2 = 30.0;  // msgs/s within a domain-II flow
    std::uint64_t payload = 512; // bytes per message
    double active_client_fraction = 0.5;
};

enum class AttackKind : std::uint8_t { Ddos, SynFlood };

struct AttackWindow {
    std::uint32_t attack_id = 0;
    SimTime start = 0.0;
    SimTime end = 0.0;
    AttackKind kind = AttackKind::Ddos;
    std::vector<HostId> attackers;
    std::optional<HostId> target; // nullopt = every server
};

// Low-and-slow flood: each attacker keeps one CBR flow per server open
// for the whole attack. The per-flow rate is deliberately small, so the
// detectable signature is the jump in persistent unique flows rather than
// volume; a hot flood is detected trivially at any staleness and tells
// the sweep nothing.
struct DdosParams {
    double cbr_msg_rate = 0.5;     // msgs/s per attacker toward each server
    std::uint64_t cbr_payload = 512;
};

struct SynFloodParams {
    double syn_rate = 100.0;       // new flows/s from the attacker
    std::uint64_t syn_payload = 64;
    double syn_flow_ttl = 1.0;
};

// Per-run active/dormant split: each client is active with probability
// `fraction` for the whole run. Returned ids are sorted.
std::vector<HostId> sample_active_clients(const Topology& topo, double fraction,
                                          RandomSource& rng);

// Self-scheduling legitimate traffic source. One arrival chain per switch
// domain; each flow picks a uniform active client of its domain and a
// uniform server, then schedules its own message deliveries.
class LegitTraffic {
public:
    LegitTraffic(Simulator& sim, Network& net, LegitTrafficParams params,
                 std::vector<HostId> active_clients, SimTime horizon, RandomSource rng);

    // Schedules the first arrival of each domain chain.
    void start();

    std::uint64_t flows_started(SwitchId sw) const;
    std::uint64_t messages_scheduled() const { return messages_scheduled_; }
    const std::vector<HostId>& active_clients() const { return active_; }

private:
    struct Domain {
        SwitchId sw;
        double flow_rate;
        double msg_rate;
        std::vector<HostId> active_clients;
        std::uint64_t flows = 0;
    };

    void schedule_next_arrival(std::size_t domain_idx);
    void launch_flow(std::size_t domain_idx, SimTime at);

    Simulator& sim_;
    Network& net_;
    LegitTrafficParams params_;
    std::vector<HostId> active_;
    SimTime horizon_;
    RandomSource rng_;
    std::vector<Domain> domains_;
    std::vector<HostId> servers_;
    std::uint64_t messages_scheduled_ = 0;
};

// CBR flood: at window.start each attacker opens one flow per target
// server and delivers evenly spaced cbr_payload-byte messages until
// window.end. Deliveries sit half a spacing off the window edges so they
// never coincide with poll instants. Scheduled as an AttackStart event.
void schedule_ddos(Simulator& sim, Network& net, const DdosParams& params,
                   const AttackWindow& window);

// Flow flood: the (single) attacker opens syn_rate new one-message flows
// per second toward uniformly random servers for the window's duration.
// Each flow delivers exactly one syn_payload-byte message and never
// continues.
void schedule_syn_flood(Simulator& sim, Network& net, const SynFloodParams& params,
                        const AttackWindow& window, RandomSource rng);

} // namespace viewsim
