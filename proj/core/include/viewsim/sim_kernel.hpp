#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <unordered_set>
#include <vector>

#include "viewsim/random.hpp"

namespace viewsim {

// Simulated time in seconds.
using SimTime = double;

inline constexpr SimTime kNever = std::numeric_limits<SimTime>::infinity();

enum class EventKind : std::uint8_t {
    FlowStart,
    MessageDeliver,
    FlowExpire,
    PollTick,
    SyncTick,
    AttackStart,
    AttackEnd,
    EvalTick,
};

const char* to_string(EventKind kind);

using EventHandle = std::uint64_t;

// Single-threaded discrete-event engine. Events fire in (fire_at, seq)
// order, where seq is the insertion ordinal; equal timestamps therefore
// process in the order they were scheduled. Virtual time never runs
// backwards and every scheduled event is eventually processed, cancelled,
// or still pending (see counters()).
class Simulator {
public:
    using Handler = std::function<void()>;

    // Hook invoked for every processed event; used by determinism tests
    // to capture the event trace.
    using TraceFn = std::function<void(SimTime fire_at, EventKind kind, std::uint64_t seq)>;

    Simulator() = default;
    Simulator(const Simulator&) = delete;
    Simulator& operator=(const Simulator&) = delete;

    // Enqueue an event. fire_at must be finite, non-negative and >= now();
    // scheduling into the past signals a logic bug and throws.
    EventHandle schedule(SimTime fire_at, EventKind kind, Handler fn);

    // Cancel a pending event. Returns false when the handle is not
    // pending (already processed, already cancelled, or unknown).
    bool cancel(EventHandle handle);

    // Process every event with fire_at <= t_end, then advance now() to
    // t_end. Events scheduled by handlers inside the window are processed
    // within the same call. Returns the number of events processed.
    std::size_t run_until(SimTime t_end);

    SimTime now() const { return now_; }

    struct Counters {
        std::uint64_t scheduled = 0;
        std::uint64_t processed = 0;
        std::uint64_t cancelled = 0;
        std::size_t pending = 0;
    };
    Counters counters() const;

    void set_trace(TraceFn fn) { trace_ = std::move(fn); }

private:
    struct Entry {
        SimTime at;
        std::uint64_t seq;
        EventKind kind;
        Handler fn;
    };
    struct Later {
        bool operator()(const Entry& a, const Entry& b) const {
            if (a.at != b.at) {
                return a.at > b.at;
            }
            return a.seq > b.seq;
        }
    };

    std::priority_queue<Entry, std::vector<Entry>, Later> queue_;
    std::unordered_set<std::uint64_t> pending_;
    std::unordered_set<std::uint64_t> cancelled_;
    SimTime now_ = 0.0;
    std::uint64_t next_seq_ = 0;
    std::uint64_t scheduled_n_ = 0;
    std::uint64_t processed_n_ = 0;
    std::uint64_t cancelled_n_ = 0;
    TraceFn trace_;
};

// Inter-arrival delta for a Poisson process of the given rate.
SimTime next_exponential(double rate, RandomSource& rng);

} // namespace viewsim
