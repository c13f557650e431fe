#include "viewsim/net_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <set>
#include <stdexcept>

namespace viewsim {

namespace {

std::uint64_t fnv1a(std::uint64_t h, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        h ^= (v >> (i * 8)) & 0xFFu;
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace

const Host& Topology::host(HostId id) const {
    for (const auto& h : hosts) {
        if (h.id == id) {
            return h;
        }
    }
    throw std::invalid_argument("unknown host id " + std::to_string(id));
}

std::vector<HostId> Topology::clients_of(SwitchId sw) const {
    std::vector<HostId> out;
    for (const auto& h : hosts) {
        if (h.role == HostRole::Client && h.attached_switch == sw) {
            out.push_back(h.id);
        }
    }
    return out;
}

std::vector<HostId> Topology::clients() const {
    std::vector<HostId> out;
    for (const auto& h : hosts) {
        if (h.role == HostRole::Client) {
            out.push_back(h.id);
        }
    }
    return out;
}

HostId Topology::server_of(SwitchId sw) const {
    for (const auto& h : hosts) {
        if (h.role == HostRole::Server && h.attached_switch == sw) {
            return h.id;
        }
    }
    throw std::invalid_argument("switch " + std::to_string(sw) + " has no server");
}

std::vector<HostId> Topology::servers() const {
    std::vector<HostId> out;
    for (const auto& h : hosts) {
        if (h.role == HostRole::Server) {
            out.push_back(h.id);
        }
    }
    return out;
}

std::vector<SwitchId> Topology::owned_switches(ControllerId c) const {
    std::vector<SwitchId> out;
    for (const auto& [sw, ctrl] : controller_assignment) {
        if (ctrl == c) {
            out.push_back(sw);
        }
    }
    return out;
}

std::size_t Topology::controller_count() const {
    std::set<ControllerId> ids;
    for (const auto& [sw, ctrl] : controller_assignment) {
        ids.insert(ctrl);
    }
    return ids.size();
}

std::vector<SwitchId> Topology::switch_path(HostId src, HostId dst) const {
    const SwitchId from = attached(src);
    const SwitchId to = attached(dst);
    if (from == to) {
        return {from};
    }
    // BFS over switch-to-switch links.
    std::map<SwitchId, SwitchId> parent;
    std::deque<SwitchId> frontier{from};
    parent[from] = from;
    while (!frontier.empty()) {
        const SwitchId cur = frontier.front();
        frontier.pop_front();
        if (cur == to) {
            break;
        }
        for (const auto& l : links) {
            if (!l.a_is_switch || !l.b_is_switch) {
                continue;
            }
            for (const auto [x, y] : {std::pair{l.a, l.b}, std::pair{l.b, l.a}}) {
                if (x == cur && !parent.count(y)) {
                    parent[y] = cur;
                    frontier.push_back(y);
                }
            }
        }
    }
    if (!parent.count(to)) {
        throw std::invalid_argument("no switch path between hosts");
    }
    std::vector<SwitchId> path;
    for (SwitchId cur = to;; cur = parent[cur]) {
        path.push_back(cur);
        if (cur == from) {
            break;
        }
    }
    std::reverse(path.begin(), path.end());
    return path;
}

Topology Topology::two_domain(std::uint32_t controllers, std::uint32_t clients_per_switch) {
    if (controllers != 1 && controllers != 2) {
        throw std::invalid_argument("two_domain: controllers must be 1 or 2");
    }
    constexpr double kEdgeBps = 100e6;
    constexpr double kCoreBps = 1000e6;

    Topology t;
    t.switches = {0, 1};
    HostId next = 0;
    for (SwitchId sw : t.switches) {
        for (std::uint32_t i = 0; i < clients_per_switch; ++i) {
            t.hosts.push_back(Host{next, HostRole::Client, sw});
            t.links.push_back(Link{false, next, true, sw, kEdgeBps});
            ++next;
        }
    }
    for (SwitchId sw : t.switches) {
        t.hosts.push_back(Host{next, HostRole::Server, sw});
        t.links.push_back(Link{false, next, true, sw, kEdgeBps});
        ++next;
    }
    t.links.push_back(Link{true, 0, true, 1, kCoreBps});
    t.controller_assignment[0] = 0;
    t.controller_assignment[1] = controllers == 2 ? 1 : 0;
    return t;
}

const FlowCounter* StatsSnapshot::find(FlowId id) const {
    auto it = std::lower_bound(counters.begin(), counters.end(), id,
                               [](const FlowCounter& c, FlowId v) { return c.flow_id < v; });
    if (it == counters.end() || it->flow_id != id) {
        return nullptr;
    }
    return &*it;
}

Network::Network(Topology topo, Simulator& sim, bool enforce_capacity)
    : topo_(std::move(topo)), sim_(sim), enforce_capacity_(enforce_capacity) {
    for (SwitchId sw : topo_.switches) {
        switches_[sw];
    }
}

Network::SwitchState& Network::switch_state(SwitchId sw) {
    auto it = switches_.find(sw);
    if (it == switches_.end()) {
        throw std::invalid_argument("unknown switch " + std::to_string(sw));
    }
    return it->second;
}

FlowId Network::install_flow(Flow flow) {
    const auto path = topo_.switch_path(flow.src, flow.dst); // validates hosts
    if (!(flow.ttl > 0.0)) {
        throw std::invalid_argument("install_flow: ttl must be > 0");
    }
    flow.id = next_flow_id_++;
    for (SwitchId sw : path) {
        FlowCounter c;
        c.flow_id = flow.id;
        c.src = flow.src;
        c.dst = flow.dst;
        c.first_seen = flow.start;
        c.last_update = flow.start;
        switch_state(sw).live.emplace(flow.id, c);
    }
    paths_.emplace(flow.id, path);
    const FlowId id = flow.id;
    flows_.emplace(id, std::move(flow));
    sim_.schedule(flows_.at(id).start + flows_.at(id).ttl, EventKind::FlowExpire,
                  [this, id] { expire_flow(id); });
    return id;
}

void Network::expire_flow(FlowId id) {
    const auto pit = paths_.find(id);
    if (pit == paths_.end()) {
        return;
    }
    const SimTime at = sim_.now();
    for (SwitchId sw : pit->second) {
        auto& st = switch_state(sw);
        auto it = st.live.find(id);
        if (it == st.live.end()) {
            continue;
        }
        it->second.expired_at = at;
        st.retained.insert(st.live.extract(it));
    }
}

void Network::deliver_message(FlowId id, SimTime at) {
    const auto fit = flows_.find(id);
    if (fit == flows_.end()) {
        throw std::invalid_argument("deliver_message: unknown flow " + std::to_string(id));
    }
    const Flow& flow = fit->second;
    if (at < flow.start || at > flow.start + flow.ttl) {
        ++dropped_messages_;
        dropped_bytes_ += flow.payload;
        return;
    }
    if (enforce_capacity_) {
        double edge_bps = 0.0;
        for (const auto& l : topo_.links) {
            if (!l.a_is_switch && l.a == flow.dst) edge_bps = l.capacity_bps;
            if (!l.b_is_switch && l.b == flow.dst) edge_bps = l.capacity_bps;
        }
        if (edge_bps > 0.0) {
            const auto bucket = static_cast<std::int64_t>(std::floor(at));
            auto& used = edge_usage_[{flow.dst, bucket}];
            if ((used + flow.payload) * 8 > static_cast<std::uint64_t>(edge_bps)) {
                ++dropped_messages_;
                dropped_bytes_ += flow.payload;
                return;
            }
            used += flow.payload;
        }
    }
    for (SwitchId sw : paths_.at(id)) {
        auto& st = switch_state(sw);
        auto it = st.live.find(id);
        if (it == st.live.end()) {
            // Valid delivery racing the expiry event at the same instant:
            // credit the retained copy.
            it = st.retained.find(id);
            if (it == st.retained.end()) {
                continue;
            }
        }
        it->second.packets += 1;
        it->second.bytes += flow.payload;
        it->second.last_update = at;
        st.cum_packets += 1;
        st.cum_bytes += flow.payload;
    }
    ++delivered_messages_;
    delivery_digest_ = fnv1a(delivery_digest_, id);
    delivery_digest_ = fnv1a(delivery_digest_, std::bit_cast<std::uint64_t>(at));
}

StatsSnapshot Network::query_stats(SwitchId sw, SimTime at) {
    auto& st = switch_state(sw);
    StatsSnapshot snap;
    snap.switch_id = sw;
    snap.captured_at = at;
    snap.counters.reserve(st.live.size() + st.retained.size());
    auto live_it = st.live.begin();
    auto ret_it = st.retained.begin();
    while (live_it != st.live.end() || ret_it != st.retained.end()) {
        if (ret_it == st.retained.end() ||
            (live_it != st.live.end() && live_it->first < ret_it->first)) {
            snap.counters.push_back(live_it->second);
            ++live_it;
        } else {
            snap.counters.push_back(ret_it->second);
            ++ret_it;
        }
    }
    st.retained.clear();
    return snap;
}

const Flow& Network::flow(FlowId id) const {
    auto it = flows_.find(id);
    if (it == flows_.end()) {
        throw std::invalid_argument("unknown flow " + std::to_string(id));
    }
    return it->second;
}

std::map<SwitchId, std::pair<std::uint64_t, std::uint64_t>> Network::cumulative_totals() const {
    std::map<SwitchId, std::pair<std::uint64_t, std::uint64_t>> out;
    for (const auto& [sw, st] : switches_) {
        out[sw] = {st.cum_packets, st.cum_bytes};
    }
    return out;
}

} // namespace viewsim
