#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <vector>

#include "viewsim/control_plane.hpp"
#include "viewsim/net_model.hpp"

namespace viewsim {

// A point in the (packets, bytes, unique-flows) feature space. Components
// are window deltas for server monitoring and per-flow rates for source
// monitoring, so they are reals here.
struct FeaturePoint {
    double p = 0.0;
    double b = 0.0;
    double f = 0.0;
    HostId subject = 0;
    SimTime at = 0.0;
};

// Per-coordinate distance weights; every coordinate difference is divided
// by its weight before squaring. Strictly positive.
struct Weights {
    double w_p = 64.0;
    double w_b = 4096.0;
    double w_f = 1.0;
};

struct Verdict {
    HostId subject = 0;
    SimTime at = 0.0;
    bool anomalous = false;
    double distance = 0.0;
    std::size_t cluster = 0;
};

// Online sequential k-means with a distance-threshold detection rule.
//
// Training inserts update the nearest centroid as a running mean; the
// first M points seed the M clusters. freeze() ends training, fixing
// centroids, counts and per-cluster radii (the maximum assignment-time
// distance seen in training). In the detection phase a point is anomalous
// iff its nearest-centroid distance exceeds theta * max(radius, epsilon);
// the epsilon floor keeps degenerate zero-radius clusters usable.
class ClusterModel {
public:
    enum class Phase : std::uint8_t { Training, Detection };

    ClusterModel(std::size_t cluster_count, Weights weights, double theta = 1.5,
                 double epsilon_r = 0.1);

    // Index and weighted distance of the nearest seeded centroid; ties
    // break toward the lowest index. Throws when no cluster is seeded.
    std::pair<std::size_t, double> nearest(const FeaturePoint& point) const;

    // Training-phase insert. Returns the seeded or assigned cluster index.
    std::size_t insert(const FeaturePoint& point);

    void freeze();

    // Detection-phase classification; the model is immutable here.
    Verdict classify(const FeaturePoint& point) const;

    // Threshold verdict against the current radii, usable in either phase;
    // this is what the continuous-update mode runs on.
    Verdict score(const FeaturePoint& point) const;

    Phase phase() const { return phase_; }
    std::uint64_t total_points() const { return total_; }
    std::size_t cluster_count() const { return clusters_.size(); }
    std::size_t seeded_count() const;
    FeaturePoint centroid(std::size_t i) const;
    std::uint64_t count(std::size_t i) const;
    double radius(std::size_t i) const;
    const Weights& weights() const { return weights_; }
    double theta() const { return theta_; }
    double epsilon_r() const { return epsilon_r_; }

    // Centroids, counts and radii as a small text table.
    void dump(std::ostream& os) const;

    // Digest of all mutable state; detection-phase purity checks compare
    // it before and after classification.
    std::uint64_t state_hash() const;

private:
    struct Cluster {
        double p = 0.0;
        double b = 0.0;
        double f = 0.0;
        std::uint64_t n = 0;
        double max_dist = 0.0;
    };

    double distance(const Cluster& c, const FeaturePoint& pt) const;

    std::vector<Cluster> clusters_;
    Weights weights_;
    double theta_;
    double epsilon_r_;
    std::uint64_t total_ = 0;
    Phase phase_ = Phase::Training;
};

// Per-server feature extraction for the distributed scenario: packets,
// bytes and active unique flows destined to each server, as deltas of the
// server's attached-switch snapshot between consecutive merged views.
// A stale remote snapshot repeats, so its deltas stay at zero until the
// next sync delivers fresh counters; that staleness is exactly what the
// experiments measure. The first window has no predecessor and emits
// nothing (warm-up).
class ServerFeatureExtractor {
public:
    explicit ServerFeatureExtractor(const Topology& topo);

    std::vector<FeaturePoint> extract(const MergedView& view);

private:
    std::vector<std::pair<HostId, SwitchId>> servers_; // (server, attached switch)
    std::map<SwitchId, StatsSnapshot> prev_;
    bool warmed_ = false;
};

// Per-source feature extraction for the flow-flood scenario: for every
// source with flows active in the current window, the mean packet and
// byte rates of those flows (cumulative count over flow duration, floored
// at one polling period) and the number of active unique flows. Flows
// visible on several switches are deduplicated toward the freshest copy.
class SourceFeatureExtractor {
public:
    explicit SourceFeatureExtractor(double polling_period);

    std::vector<FeaturePoint> extract(const MergedView& view);

private:
    double polling_period_;
    std::map<FlowId, std::uint64_t> prev_packets_;
    bool warmed_ = false;
};

} // namespace viewsim
