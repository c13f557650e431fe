#include "viewsim/ids.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace viewsim {

namespace {

std::uint64_t hash_mix(std::uint64_t h, std::uint64_t v) {
    h ^= v + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
    return h;
}

std::uint64_t hash_double(std::uint64_t h, double v) {
    return hash_mix(h, std::bit_cast<std::uint64_t>(v));
}

} // namespace

ClusterModel::ClusterModel(std::size_t cluster_count, Weights weights, double theta,
                           double epsilon_r)
    : weights_(weights), theta_(theta), epsilon_r_(epsilon_r) {
    if (cluster_count == 0) {
        throw std::invalid_argument("cluster_count must be >= 1");
    }
    if (!(weights.w_p > 0.0) || !(weights.w_b > 0.0) || !(weights.w_f > 0.0)) {
        throw std::invalid_argument("weights must be strictly positive");
    }
    if (!(theta > 0.0) || !(epsilon_r > 0.0)) {
        throw std::invalid_argument("theta and epsilon_r must be strictly positive");
    }
    clusters_.resize(cluster_count);
}

double ClusterModel::distance(const Cluster& c, const FeaturePoint& pt) const {
    const double dp = (pt.p - c.p) / weights_.w_p;
    const double db = (pt.b - c.b) / weights_.w_b;
    const double df = (pt.f - c.f) / weights_.w_f;
    return std::sqrt(dp * dp + db * db + df * df);
}

std::size_t ClusterModel::seeded_count() const {
    return static_cast<std::size_t>(std::min<std::uint64_t>(total_, clusters_.size()));
}

std::pair<std::size_t, double> ClusterModel::nearest(const FeaturePoint& point) const {
    const std::size_t seeded = seeded_count();
    if (seeded == 0) {
        throw std::logic_error("nearest: model has no seeded cluster");
    }
    std::size_t best = 0;
    double best_d = distance(clusters_[0], point);
    for (std::size_t i = 1; i < seeded; ++i) {
        const double d = distance(clusters_[i], point);
        if (d < best_d) {
            best = i;
            best_d = d;
        }
    }
    return {best, best_d};
}

std::size_t ClusterModel::insert(const FeaturePoint& point) {
    if (phase_ != Phase::Training) {
        throw std::logic_error("insert: model is frozen");
    }
    if (total_ < clusters_.size()) {
        // Seeding branch: the point becomes the centroid of cluster T.
        const auto idx = static_cast<std::size_t>(total_);
        Cluster& c = clusters_[idx];
        c.p = point.p;
        c.b = point.b;
        c.f = point.f;
        c.n += 1;
        ++total_;
        return idx;
    }
    const auto [idx, d] = nearest(point);
    Cluster& c = clusters_[idx];
    // Running mean: C <- (C*N + P) / (N+1).
    c.p = (c.p * static_cast<double>(c.n) + point.p) / static_cast<double>(c.n + 1);
    c.b = (c.b * static_cast<double>(c.n) + point.b) / static_cast<double>(c.n + 1);
    c.f = (c.f * static_cast<double>(c.n) + point.f) / static_cast<double>(c.n + 1);
    c.n += 1;
    c.max_dist = std::max(c.max_dist, d);
    ++total_;
    return idx;
}

void ClusterModel::freeze() {
    if (total_ < clusters_.size()) {
        throw std::logic_error("freeze: fewer training points than clusters");
    }
    phase_ = Phase::Detection;
}

Verdict ClusterModel::score(const FeaturePoint& point) const {
    const auto [idx, d] = nearest(point);
    const double threshold = theta_ * std::max(clusters_[idx].max_dist, epsilon_r_);
    Verdict v;
    v.subject = point.subject;
    v.at = point.at;
    v.anomalous = d > threshold;
    v.distance = d;
    v.cluster = idx;
    return v;
}

Verdict ClusterModel::classify(const FeaturePoint& point) const {
    if (phase_ != Phase::Detection) {
        throw std::logic_error("classify: model is still training");
    }
    return score(point);
}

FeaturePoint ClusterModel::centroid(std::size_t i) const {
    const Cluster& c = clusters_.at(i);
    return FeaturePoint{c.p, c.b, c.f, 0, 0.0};
}

std::uint64_t ClusterModel::count(std::size_t i) const {
    return clusters_.at(i).n;
}

double ClusterModel::radius(std::size_t i) const {
    return clusters_.at(i).max_dist;
}

void ClusterModel::dump(std::ostream& os) const {
    os << "clusters " << clusters_.size() << " total " << total_ << " phase "
       << (phase_ == Phase::Training ? "training" : "detection") << "\n";
    os << "weights " << weights_.w_p << " " << weights_.w_b << " " << weights_.w_f
       << " theta " << theta_ << " epsilon_r " << epsilon_r_ << "\n";
    for (std::size_t i = 0; i < clusters_.size(); ++i) {
        const Cluster& c = clusters_[i];
        os << i << " n " << c.n << " centroid " << c.p << " " << c.b << " " << c.f
           << " radius " << c.max_dist << "\n";
    }
}

std::uint64_t ClusterModel::state_hash() const {
    std::uint64_t h = 0;
    h = hash_mix(h, total_);
    h = hash_mix(h, static_cast<std::uint64_t>(phase_));
    for (const auto& c : clusters_) {
        h = hash_double(h, c.p);
        h = hash_double(h, c.b);
        h = hash_double(h, c.f);
        h = hash_mix(h, c.n);
        h = hash_double(h, c.max_dist);
    }
    return h;
}

ServerFeatureExtractor::ServerFeatureExtractor(const Topology& topo) {
    for (HostId s : topo.servers()) {
        servers_.emplace_back(s, topo.attached(s));
    }
}

std::vector<FeaturePoint> ServerFeatureExtractor::extract(const MergedView& view) {
    std::vector<FeaturePoint> points;
    if (warmed_) {
        for (const auto& [server, sw] : servers_) {
            const auto& entry = view.per_switch.at(sw);
            const StatsSnapshot& prev = prev_.at(sw);
            FeaturePoint pt;
            pt.subject = server;
            pt.at = view.as_of;
            for (const FlowCounter& c : entry.snapshot.counters) {
                if (c.dst != server) {
                    continue;
                }
                const FlowCounter* before = prev.find(c.flow_id);
                const std::uint64_t prev_packets = before ? before->packets : 0;
                const std::uint64_t prev_bytes = before ? before->bytes : 0;
                if (c.packets <= prev_packets) {
                    continue; // no activity in this window
                }
                pt.p += static_cast<double>(c.packets - prev_packets);
                pt.b += static_cast<double>(c.bytes - prev_bytes);
                pt.f += 1.0;
            }
            points.push_back(pt);
        }
    }
    prev_.clear();
    for (const auto& [sw, entry] : view.per_switch) {
        prev_.emplace(sw, entry.snapshot);
    }
    warmed_ = true;
    return points;
}

SourceFeatureExtractor::SourceFeatureExtractor(double polling_period)
    : polling_period_(polling_period) {
    if (!(polling_period > 0.0)) {
        throw std::invalid_argument("polling_period must be > 0");
    }
}

std::vector<FeaturePoint> SourceFeatureExtractor::extract(const MergedView& view) {
    // Deduplicate flows that appear on several switches: keep the copy
    // with the larger packet count (the fresher one; counters only grow).
    std::map<FlowId, const FlowCounter*> flows;
    for (const auto& [sw, entry] : view.per_switch) {
        for (const FlowCounter& c : entry.snapshot.counters) {
            auto [it, inserted] = flows.emplace(c.flow_id, &c);
            if (!inserted && c.packets > it->second->packets) {
                it->second = &c;
            }
        }
    }

    std::vector<FeaturePoint> points;
    if (warmed_) {
        struct Acc {
            double p_rate_sum = 0.0;
            double b_rate_sum = 0.0;
            double active_flows = 0.0;
        };
        std::map<HostId, Acc> by_source;
        for (const auto& [id, c] : flows) {
            auto pit = prev_packets_.find(id);
            const std::uint64_t prev = pit == prev_packets_.end() ? 0 : pit->second;
            if (c->packets <= prev) {
                continue;
            }
            const double duration =
                std::max(c->last_update - c->first_seen, polling_period_);
            Acc& acc = by_source[c->src];
            acc.p_rate_sum += static_cast<double>(c->packets) / duration;
            acc.b_rate_sum += static_cast<double>(c->bytes) / duration;
            acc.active_flows += 1.0;
        }
        for (const auto& [src, acc] : by_source) {
            FeaturePoint pt;
            pt.subject = src;
            pt.at = view.as_of;
            pt.p = acc.p_rate_sum / acc.active_flows;
            pt.b = acc.b_rate_sum / acc.active_flows;
            pt.f = acc.active_flows;
            points.push_back(pt);
        }
    }

    prev_packets_.clear();
    for (const auto& [id, c] : flows) {
        prev_packets_.emplace(id, c->packets);
    }
    warmed_ = true;
    return points;
}

} // namespace viewsim
