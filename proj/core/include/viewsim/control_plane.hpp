#pragma once

#include <map>
#include <optional>

#include "viewsim/net_model.hpp"
#include "viewsim/sim_kernel.hpp"

namespace viewsim {

// A controller's possibly stale composite of its own polls and the peer's
// last-synced polls. Local entries age up to the polling period; remote
// entries age up to sync period + polling period.
struct ControllerView {
    ControllerId id = 0;
    std::map<SwitchId, StatsSnapshot> local;
    std::map<SwitchId, StatsSnapshot> remote;
    std::optional<SimTime> last_sync_at;
    double polling_period = 0.0;
    double sync_period = kNever; // kNever = synchronization disabled
};

struct MergedEntry {
    StatsSnapshot snapshot;
    bool never_synced = false; // remote switch seen before any sync
};

// Union of local and remote snapshots covering every switch.
struct MergedView {
    SimTime as_of = 0.0;
    std::map<SwitchId, MergedEntry> per_switch;
};

class Controller {
public:
    Controller(ControllerId id, const Topology& topo, Network& net, double polling_period,
               double sync_period);

    // Network state collection: refresh the local snapshot of every owned
    // switch at the poll instant.
    void poll(SimTime at);

    MergedView merged_view(SimTime at) const;

    // Age of the data merged_view would use for the switch; infinity when
    // the switch has never been synced.
    double staleness(SwitchId sw, SimTime at) const;

    const ControllerView& view() const { return view_; }
    ControllerId id() const { return view_.id; }
    const std::vector<SwitchId>& owned() const { return owned_; }

private:
    friend void sync_views(Controller& a, Controller& b, SimTime at);

    Network& net_;
    ControllerView view_;
    std::vector<SwitchId> owned_;
    std::vector<SwitchId> all_switches_;
};

// Controllers' state distribution: full-state exchange of the peers'
// current local maps. Both views record the sync instant.
void sync_views(Controller& a, Controller& b, SimTime at);

} // namespace viewsim
