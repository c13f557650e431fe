#include "viewsim/control_plane.hpp"

#include <stdexcept>

namespace viewsim {

Controller::Controller(ControllerId id, const Topology& topo, Network& net,
                       double polling_period, double sync_period)
    : net_(net) {
    view_.id = id;
    view_.polling_period = polling_period;
    view_.sync_period = sync_period;
    owned_ = topo.owned_switches(id);
    all_switches_ = topo.switches;
    if (owned_.empty()) {
        throw std::invalid_argument("controller owns no switches");
    }
}

void Controller::poll(SimTime at) {
    for (SwitchId sw : owned_) {
        view_.local.insert_or_assign(sw, net_.query_stats(sw, at));
    }
}

MergedView Controller::merged_view(SimTime at) const {
    MergedView merged;
    merged.as_of = at;
    for (SwitchId sw : all_switches_) {
        if (auto it = view_.local.find(sw); it != view_.local.end()) {
            merged.per_switch.emplace(sw, MergedEntry{it->second, false});
        } else if (auto rit = view_.remote.find(sw); rit != view_.remote.end()) {
            merged.per_switch.emplace(sw, MergedEntry{rit->second, false});
        } else {
            StatsSnapshot empty;
            empty.switch_id = sw;
            empty.captured_at = 0.0;
            merged.per_switch.emplace(sw, MergedEntry{std::move(empty), true});
        }
    }
    return merged;
}

double Controller::staleness(SwitchId sw, SimTime at) const {
    if (auto it = view_.local.find(sw); it != view_.local.end()) {
        return at - it->second.captured_at;
    }
    if (auto rit = view_.remote.find(sw); rit != view_.remote.end()) {
        return at - rit->second.captured_at;
    }
    bool known = false;
    for (SwitchId s : all_switches_) {
        known = known || s == sw;
    }
    if (!known) {
        throw std::invalid_argument("staleness: unknown switch " + std::to_string(sw));
    }
    return kNever;
}

void sync_views(Controller& a, Controller& b, SimTime at) {
    a.view_.remote = b.view_.local;
    b.view_.remote = a.view_.local;
    a.view_.last_sync_at = at;
    b.view_.last_sync_at = at;
}

} // namespace viewsim
