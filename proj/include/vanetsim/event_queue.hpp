#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "vanetsim/errors.hpp"
#include "vanetsim/packet.hpp"
#include "vanetsim/sim_time.hpp"

namespace vanetsim {

enum class EventKind : std::uint8_t {
    mobility_tick,
    protocol_tick,
    tx_start,
    tx_end,
    wired_delivery,
    blockage_inject,
    blockage_clear,
    sim_end,
};

inline const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::mobility_tick: return "mobility_tick";
        case EventKind::protocol_tick: return "protocol_tick";
        case EventKind::tx_start: return "tx_start";
        case EventKind::tx_end: return "tx_end";
        case EventKind::wired_delivery: return "wired_delivery";
        case EventKind::blockage_inject: return "blockage_inject";
        case EventKind::blockage_clear: return "blockage_clear";
        case EventKind::sim_end: return "sim_end";
    }
    return "?";
}

// Reserved node slots for the total order: ticks run before any per-node
// event at the same instant, sim_end after everything.
constexpr NodeId kMobilityNode = -2;
constexpr NodeId kGlobalNode = -1;
constexpr NodeId kSimEndNode = std::numeric_limits<NodeId>::max();

struct Event {
    SimTime time = 0;
    NodeId node = kGlobalNode;
    PacketSeq seq = 0;
    std::uint64_t order = 0;  // insertion counter, breaks remaining ties
    EventKind kind = EventKind::sim_end;

    friend bool operator>(const Event& a, const Event& b) {
        if (a.time != b.time) return a.time > b.time;
        if (a.node != b.node) return a.node > b.node;
        if (a.seq != b.seq) return a.seq > b.seq;
        return a.order > b.order;
    }
};

/// Deterministic min-queue over (time, node, seq, insertion order).
class EventQueue {
public:
    void schedule(Event ev) {
        if (ev.time < now_)
            throw CausalityViolation("schedule at t=" + std::to_string(ev.time) +
                                     "ns before now=" + std::to_string(now_) + "ns");
        ev.order = next_order_++;
        heap_.push(ev);
    }

    bool empty() const { return heap_.empty(); }

    const Event& peek() const { return heap_.top(); }

    Event pop() {
        Event ev = heap_.top();
        heap_.pop();
        now_ = ev.time;
        return ev;
    }

    SimTime now() const { return now_; }

private:
    std::priority_queue<Event, std::vector<Event>, std::greater<Event>> heap_;
    std::uint64_t next_order_ = 0;
    SimTime now_ = 0;
};

} // namespace vanetsim
