#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "viewsim/sim_kernel.hpp"

namespace viewsim {

using HostId = std::uint32_t;
using SwitchId = std::uint32_t;
using ControllerId = std::uint32_t;
using FlowId = std::uint64_t;

enum class HostRole : std::uint8_t { Client, Server };
enum class FlowOrigin : std::uint8_t { Legit, Ddos, Syn };

struct Host {
    HostId id;
    HostRole role;
    SwitchId attached_switch;
};

struct Link {
    bool a_is_switch;
    std::uint32_t a;
    bool b_is_switch;
    std::uint32_t b;
    double capacity_bps;
};

// Static data plane: switches, attached hosts, links, and the
// switch-to-controller ownership map.
struct Topology {
    std::vector<SwitchId> switches;
    std::vector<Host> hosts;
    std::vector<Link> links;
    std::map<SwitchId, ControllerId> controller_assignment;

    const Host& host(HostId id) const;
    SwitchId attached(HostId id) const { return host(id).attached_switch; }
    std::vector<HostId> clients_of(SwitchId sw) const;
    std::vector<HostId> clients() const;
    HostId server_of(SwitchId sw) const;
    std::vector<HostId> servers() const;
    std::vector<SwitchId> owned_switches(ControllerId c) const;
    std::size_t controller_count() const;

    // Switches traversed by src->dst traffic, in path order. BFS over the
    // inter-switch links; the two-domain topology yields one- or two-hop
    // paths.
    std::vector<SwitchId> switch_path(HostId src, HostId dst) const;

    // The dumbbell used by both experiment scenarios: two switches joined
    // by a 1000 Mbps link, 100 Mbps edges, clients_per_switch clients and
    // one server per switch. controllers is 1 (one controller owns both
    // switches) or 2 (one controller per switch).
    static Topology two_domain(std::uint32_t controllers, std::uint32_t clients_per_switch = 32);
};

struct Flow {
    FlowId id = 0; // assigned by Network::install_flow
    HostId src = 0;
    HostId dst = 0;
    SimTime start = 0.0;
    double ttl = 0.0;
    double msg_rate = 0.0;
    std::uint64_t payload = 0;
    FlowOrigin origin = FlowOrigin::Legit;
};

// Per-flow counter as carried in a stats reply. src/dst mirror the flow's
// match fields; expired_at is set on entries reported one last time after
// flow removal.
struct FlowCounter {
    FlowId flow_id = 0;
    HostId src = 0;
    HostId dst = 0;
    std::uint64_t packets = 0;
    std::uint64_t bytes = 0;
    SimTime first_seen = 0.0;
    SimTime last_update = 0.0;
    std::optional<SimTime> expired_at;
};

// Immutable copy of one switch's counters at a poll instant. Counters are
// sorted by flow id.
struct StatsSnapshot {
    SwitchId switch_id = 0;
    SimTime captured_at = 0.0;
    std::vector<FlowCounter> counters;

    const FlowCounter* find(FlowId id) const;
};

// Hosts, switches and per-flow counters; answers simulated stats queries.
// Flow expiry follows flow-removed semantics: an expired flow stays
// visible in the next stats reply of each on-path switch (marked with its
// expiry time), then disappears. Without that, flows shorter than the
// polling period would be invisible to the control plane.
class Network {
public:
    Network(Topology topo, Simulator& sim, bool enforce_capacity = false);

    // Creates zeroed counters on every switch of the src->dst path and
    // schedules the flow's expiry at start+ttl. Returns the flow id.
    FlowId install_flow(Flow flow);

    // One message of flow.payload bytes at time `at`: bumps the counters
    // of every on-path switch. Deliveries after expiry (or beyond an edge
    // capacity when enforcement is on) are dropped and counted, not
    // errors.
    void deliver_message(FlowId id, SimTime at);

    // Stats reply for one switch: live counters plus flows expired since
    // this switch was last queried. Consumes the expired backlog, so a
    // finished flow is reported exactly once more.
    StatsSnapshot query_stats(SwitchId sw, SimTime at);

    const Topology& topology() const { return topo_; }
    const Flow& flow(FlowId id) const;

    std::uint64_t dropped_messages() const { return dropped_messages_; }
    std::uint64_t dropped_bytes() const { return dropped_bytes_; }
    std::uint64_t delivered_messages() const { return delivered_messages_; }

    // Cumulative per-switch (packets, bytes) over all accepted deliveries;
    // unaffected by expiry or polling. Conservation checks compare this
    // against an independent delivery log.
    std::map<SwitchId, std::pair<std::uint64_t, std::uint64_t>> cumulative_totals() const;

    // Order-sensitive digest over accepted deliveries; two runs with the
    // same workload produce the same digest regardless of control-plane
    // settings.
    std::uint64_t delivery_digest() const { return delivery_digest_; }

private:
    struct SwitchState {
        std::map<FlowId, FlowCounter> live;
        std::map<FlowId, FlowCounter> retained; // expired, pending one report
        std::uint64_t cum_packets = 0;
        std::uint64_t cum_bytes = 0;
    };

    void expire_flow(FlowId id);
    SwitchState& switch_state(SwitchId sw);

    Topology topo_;
    Simulator& sim_;
    bool enforce_capacity_;
    std::map<SwitchId, SwitchState> switches_;
    std::map<FlowId, Flow> flows_;
    std::map<FlowId, std::vector<SwitchId>> paths_;
    // (dst host, 1s bucket) -> bytes, only kept when enforcing capacity
    std::map<std::pair<HostId, std::int64_t>, std::uint64_t> edge_usage_;
    FlowId next_flow_id_ = 1;
    std::uint64_t delivered_messages_ = 0;
    std::uint64_t dropped_messages_ = 0;
    std::uint64_t dropped_bytes_ = 0;
    std::uint64_t delivery_digest_ = 1469598103934665603ULL; // FNV offset
};

} // namespace viewsim
