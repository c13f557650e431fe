#include <doctest.h>

#include <algorithm>

#include "viewsim/ids.hpp"

using namespace viewsim;

TEST_SUITE_BEGIN("features");

namespace {

FlowCounter counter(FlowId id, HostId src, HostId dst, std::uint64_t packets,
                    std::uint64_t bytes, SimTime first, SimTime last) {
    FlowCounter c;
    c.flow_id = id;
    c.src = src;
    c.dst = dst;
    c.packets = packets;
    c.bytes = bytes;
    c.first_seen = first;
    c.last_update = last;
    return c;
}

StatsSnapshot snap(SwitchId sw, SimTime at, std::vector<FlowCounter> cs) {
    std::sort(cs.begin(), cs.end(),
              [](const FlowCounter& a, const FlowCounter& b) { return a.flow_id < b.flow_id; });
    return StatsSnapshot{sw, at, std::move(cs)};
}

MergedView view(SimTime at, StatsSnapshot s0, StatsSnapshot s1, bool s1_never = false) {
    MergedView v;
    v.as_of = at;
    v.per_switch.emplace(0, MergedEntry{std::move(s0), false});
    v.per_switch.emplace(1, MergedEntry{std::move(s1), s1_never});
    return v;
}

const FeaturePoint* find_subject(const std::vector<FeaturePoint>& pts, HostId subject) {
    for (const auto& p : pts) {
        if (p.subject == subject) {
            return &p;
        }
    }
    return nullptr;
}

} // namespace

TEST_CASE("server deltas come from the attached switch between views") {
    Topology topo = Topology::two_domain(2);
    const HostId s1 = topo.server_of(0);
    const HostId s2 = topo.server_of(1);
    const HostId c1 = topo.clients_of(0)[0];
    ServerFeatureExtractor ex(topo);

    // warm-up: the first window has no predecessor
    CHECK(ex.extract(view(2.0, snap(0, 2.0, {}), snap(1, 2.0, {}), true)).empty());

    SUBCASE("no traffic between polls gives the zero point") {
        const auto pts = ex.extract(view(4.0, snap(0, 4.0, {}), snap(1, 4.0, {}), true));
        REQUIRE(pts.size() == 2);
        for (const auto& p : pts) {
            CHECK(p.p == 0);
            CHECK(p.b == 0);
            CHECK(p.f == 0);
        }
    }

    SUBCASE("one local flow delivering 3x512 bytes in the window") {
        const auto pts = ex.extract(view(
            4.0, snap(0, 4.0, {counter(7, c1, s1, 3, 1536, 2.1, 3.9)}), snap(1, 4.0, {})));
        const auto* p1 = find_subject(pts, s1);
        REQUIRE(p1 != nullptr);
        CHECK(p1->p == 3);
        CHECK(p1->b == 1536);
        CHECK(p1->f == 1);
        CHECK(find_subject(pts, s2)->f == 0);
    }

    SUBCASE("a stale remote snapshot keeps pre-attack deltas until it changes") {
        // t=4: remote snapshot captured at 2 carries the pre-attack counter.
        auto stale = snap(1, 2.0, {counter(9, c1, s2, 10, 5120, 0.5, 1.9)});
        auto pts = ex.extract(view(4.0, snap(0, 4.0, {}), stale));
        CHECK(find_subject(pts, s2)->p == 10); // first sight of the counter
        // t=6..8: same stale snapshot repeats; deltas collapse to zero even
        // though the real switch kept counting.
        pts = ex.extract(view(6.0, snap(0, 6.0, {}), stale));
        CHECK(find_subject(pts, s2)->p == 0);
        CHECK(find_subject(pts, s2)->f == 0);
        // a sync finally ships the accumulated counter: the delta lumps
        pts = ex.extract(view(8.0, snap(0, 8.0, {}),
                              snap(1, 8.0, {counter(9, c1, s2, 70, 35840, 0.5, 7.9)})));
        CHECK(find_subject(pts, s2)->p == 60);
        CHECK(find_subject(pts, s2)->b == 30720);
        CHECK(find_subject(pts, s2)->f == 1);
    }
}

TEST_CASE("source rates divide by flow duration with a polling-period floor") {
    SourceFeatureExtractor ex(2.0);
    const auto none = ex.extract(view(2.0, snap(0, 2.0, {}), snap(1, 2.0, {}), true));
    CHECK(none.empty()); // warm-up

    SUBCASE("1024 bytes over a two-second flow is 512 B/s") {
        const auto pts =
            ex.extract(view(4.0, snap(0, 4.0, {counter(1, 3, 64, 4, 1024, 1.0, 3.0)}),
                            snap(1, 4.0, {}), true));
        REQUIRE(pts.size() == 1);
        CHECK(pts[0].subject == 3);
        CHECK(pts[0].b == doctest::Approx(512.0));
        CHECK(pts[0].p == doctest::Approx(2.0));
        CHECK(pts[0].f == 1);
    }

    SUBCASE("single-packet flows are floored at one polling period") {
        const auto pts =
            ex.extract(view(4.0, snap(0, 4.0, {counter(1, 3, 64, 1, 64, 2.5, 2.5)}),
                            snap(1, 4.0, {}), true));
        REQUIRE(pts.size() == 1);
        CHECK(pts[0].b == doctest::Approx(32.0)); // 64 B / 2 s floor
        CHECK(pts[0].f == 1);
    }

    SUBCASE("sources with no visible flows emit nothing") {
        const auto pts = ex.extract(view(4.0, snap(0, 4.0, {}), snap(1, 4.0, {}), true));
        CHECK(pts.empty());
    }
}

TEST_CASE("a flow flood dominates the weighted distance through the flow count") {
    SourceFeatureExtractor ex(2.0);
    ex.extract(view(2.0, snap(0, 2.0, {}), snap(1, 2.0, {}), true));

    std::vector<FlowCounter> burst;
    for (FlowId id = 100; id < 200; ++id) {
        burst.push_back(counter(id, 5, 64, 1, 64, 3.0, 3.0));
    }
    const auto pts = ex.extract(view(4.0, snap(0, 4.0, burst), snap(1, 4.0, {}), true));
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].f == 100);

    // Against a model trained on quiet per-source rates, the flow-count
    // coordinate alone pushes the distance far past any plausible radius.
    ClusterModel m(2, Weights{16, 2046, 0.25});
    m.insert(FeaturePoint{34, 17408, 1, 0, 0});
    m.insert(FeaturePoint{30, 15360, 2, 0, 0});
    const auto [idx, d] = m.nearest(pts[0]);
    CHECK(d > 390.0); // ~ (100-2)/0.25
}

TEST_CASE("duplicate flows across switches deduplicate toward the fresher copy") {
    SourceFeatureExtractor ex(2.0);
    ex.extract(view(2.0, snap(0, 2.0, {}), snap(1, 2.0, {}), true));
    // Same flow seen on both switches; the local copy has more packets.
    const auto pts = ex.extract(view(4.0,
                                     snap(0, 4.0, {counter(1, 3, 65, 8, 4096, 1.0, 3.0)}),
                                     snap(1, 2.0, {counter(1, 3, 65, 5, 2560, 1.0, 1.9)})));
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].f == 1);
    CHECK(pts[0].p == doctest::Approx(4.0)); // 8 packets / 2 s, not 5/2
}

TEST_CASE("unchanged flows do not count as active in later windows") {
    SourceFeatureExtractor ex(2.0);
    ex.extract(view(2.0, snap(0, 2.0, {}), snap(1, 2.0, {}), true));
    const auto first =
        ex.extract(view(4.0, snap(0, 4.0, {counter(1, 3, 64, 6, 3072, 1.0, 3.5)}),
                        snap(1, 4.0, {}), true));
    REQUIRE(first.size() == 1);
    const auto second =
        ex.extract(view(6.0, snap(0, 6.0, {counter(1, 3, 64, 6, 3072, 1.0, 3.5)}),
                        snap(1, 6.0, {}), true));
    CHECK(second.empty());
}

TEST_SUITE_END();
