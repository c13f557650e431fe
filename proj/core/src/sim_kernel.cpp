#include "viewsim/sim_kernel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace viewsim {

const char* to_string(EventKind kind) {
    switch (kind) {
    case EventKind::FlowStart: return "FlowStart";
    case EventKind::MessageDeliver: return "MessageDeliver";
    case EventKind::FlowExpire: return "FlowExpire";
    case EventKind::PollTick: return "PollTick";
    case EventKind::SyncTick: return "SyncTick";
    case EventKind::AttackStart: return "AttackStart";
    case EventKind::AttackEnd: return "AttackEnd";
    case EventKind::EvalTick: return "EvalTick";
    }
    return "?";
}

EventHandle Simulator::schedule(SimTime fire_at, EventKind kind, Handler fn) {
    if (std::isnan(fire_at) || fire_at < 0.0 || fire_at == kNever) {
        throw std::logic_error("schedule: fire_at must be finite and non-negative");
    }
    if (fire_at < now_) {
        throw std::logic_error("schedule: fire_at " + std::to_string(fire_at) +
                               " precedes now() " + std::to_string(now_));
    }
    const std::uint64_t seq = next_seq_++;
    queue_.push(Entry{fire_at, seq, kind, std::move(fn)});
    pending_.insert(seq);
    ++scheduled_n_;
    return seq;
}

bool Simulator::cancel(EventHandle handle) {
    auto it = pending_.find(handle);
    if (it == pending_.end()) {
        return false;
    }
    pending_.erase(it);
    cancelled_.insert(handle);
    ++cancelled_n_;
    return true;
}

std::size_t Simulator::run_until(SimTime t_end) {
    if (std::isnan(t_end) || t_end < now_) {
        throw std::logic_error("run_until: t_end precedes now()");
    }
    std::size_t processed = 0;
    while (!queue_.empty() && queue_.top().at <= t_end) {
        Entry entry = queue_.top();
        queue_.pop();
        if (auto it = cancelled_.find(entry.seq); it != cancelled_.end()) {
            cancelled_.erase(it);
            continue;
        }
        pending_.erase(entry.seq);
        now_ = entry.at;
        if (trace_) {
            trace_(entry.at, entry.kind, entry.seq);
        }
        entry.fn();
        ++processed_n_;
        ++processed;
    }
    now_ = t_end;
    return processed;
}

Simulator::Counters Simulator::counters() const {
    return Counters{scheduled_n_, processed_n_, cancelled_n_, pending_.size()};
}

SimTime next_exponential(double rate, RandomSource& rng) {
    return rng.exponential(rate);
}

} // namespace viewsim
