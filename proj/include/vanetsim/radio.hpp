#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <vector>

#include "vanetsim/config.hpp"
#include "vanetsim/errors.hpp"
#include "vanetsim/geometry.hpp"
#include "vanetsim/packet.hpp"
#include "vanetsim/rng.hpp"
#include "vanetsim/sim_time.hpp"

namespace vanetsim {

// Frame time on air: PHY overhead plus (payload + MAC header) at the data
// rate, rounded to the nearest nanosecond.
inline SimTime airtime_ns(std::uint32_t size_bytes, std::uint64_t data_rate_bps,
                          std::uint32_t mac_header_bytes, SimTime phy_overhead_ns) {
    const std::uint64_t bits = static_cast<std::uint64_t>(size_bytes + mac_header_bytes) * 8ULL;
    const std::uint64_t ns = (bits * 1'000'000'000ULL + data_rate_bps / 2) / data_rate_bps;
    return phy_overhead_ns + static_cast<SimTime>(ns);
}

// Unit-disk connectivity, boundary inclusive.
inline bool in_range(const Point& a, const Point& b, double range) {
    return distance(a, b) <= range;
}

enum class Outcome : std::uint8_t { delivered, collision, random_loss, out_of_range };

inline const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::delivered: return "delivered";
        case Outcome::collision: return "collision";
        case Outcome::random_loss: return "random_loss";
        case Outcome::out_of_range: return "out_of_range";
    }
    return "?";
}

/// Per intended receiver result of one frame.
struct DeliveryOutcome {
    PacketSeq seq = 0;
    NodeId receiver = -1;
    Outcome outcome = Outcome::delivered;
    std::optional<SimTime> delivered_at;  // set iff delivered; equals the frame's t_end
};

/// One frame on the air. The intended receiver set is frozen at t_start;
/// displacement over sub-millisecond airtimes is negligible at road speeds.
struct Transmission {
    PacketSeq seq = 0;
    NodeId sender = -1;
    Point sender_pos;
    double sender_range = 0.0;
    SimTime t_start = 0;
    SimTime t_end = 0;
    std::uint32_t attempt = 1;

    struct Receiver {
        NodeId id;
        Point pos;  // position at t_start
    };
    std::vector<Receiver> intended;
};

/// A radio endpoint the channel knows about. Vehicles waiting off-road for
/// re-entry are kept in the directory but marked inactive.
struct RadioNode {
    NodeId id = -1;
    Point pos;
    double range = 0.0;
    bool is_vehicle = false;
    bool active = true;
};

/// Broadcast CSMA/CA channel without RTS/CTS or acks: one attempt per frame,
/// fixed contention window, defer-until-idle then slotted random backoff with
/// re-sensing each slot. Delivery uses the unit disk of the sender; a frame
/// interferes wherever its sender's disk reaches, so two senders hidden from
/// each other still collide at a common receiver, and a transmitting node
/// loses frames that overlap its own transmission.
class Channel {
public:
    using BackoffDraw = std::function<std::uint32_t(NodeId, std::uint32_t cw)>;

    Channel(const SimConfig& cfg, const std::vector<RadioNode>* nodes,
            const std::vector<Packet>* arena, std::uint64_t master_seed)
        : cfg_(&cfg),
          nodes_(nodes),
          arena_(arena),
          slot_ns_(seconds_to_ns(cfg.slot_time)),
          phy_ns_(seconds_to_ns(cfg.phy_overhead)),
          loss_rng_(RngStream::labeled(master_seed, "loss")) {
        states_.resize(nodes->size());
        for (std::size_t i = 0; i < nodes->size(); ++i)
            backoff_rngs_.push_back(RngStream::labeled(master_seed, "backoff", i));
    }

    // Test hook: replaces the per-node backoff streams.
    void set_backoff_draw(BackoffDraw draw) { draw_override_ = std::move(draw); }

    SimTime frame_airtime(const Packet& pkt) const {
        return airtime_ns(pkt.size_bytes, cfg_->data_rate, cfg_->mac_header_bytes, phy_ns_);
    }

    /// Queue a frame for transmission. Returns true when the caller must
    /// schedule an access attempt at `now` (node was idle).
    bool enqueue(PacketSeq seq, SimTime now) {
        (void)now;
        auto& st = states_[seq_node(seq)];
        st.queue.push_back(seq);
        if (st.transmitting || st.queue.size() > 1) return false;
        st.reset_access();
        return true;
    }

    struct AttemptResult {
        bool started = false;
        SimTime time = 0;          // t_end when started, else next attempt time
        PacketSeq seq = 0;
        std::uint32_t attempt = 1;
    };

    /// One carrier-sense decision point for the node's head-of-line frame.
    AttemptResult attempt(NodeId node, SimTime now) {
        auto& st = states_[static_cast<std::size_t>(node)];
        const PacketSeq seq = st.queue.front();
        st.attempt += 1;
        const bool busy = sensed_busy(node, now);

        AttemptResult res;
        res.seq = seq;
        res.attempt = st.attempt;
        if (!st.in_backoff) {
            if (!busy) return start_tx(node, now, res);
            st.in_backoff = true;
            st.remaining = draw_backoff(node);
            res.time = idle_at(node, now);
            return res;
        }
        if (busy) {
            res.time = idle_at(node, now);  // freeze the countdown until idle
            return res;
        }
        if (st.remaining == 0) return start_tx(node, now, res);
        st.remaining -= 1;
        res.time = now + slot_ns_;
        return res;
    }

    struct FinishResult {
        Transmission tx;
        std::vector<DeliveryOutcome> outcomes;
        std::optional<PacketSeq> next_seq;  // next queued frame, if any
    };

    /// Frame completed: resolve every intended receiver and advance the queue.
    FinishResult finish(NodeId node, SimTime now) {
        auto& st = states_[static_cast<std::size_t>(node)];
        FinishResult res;
        const std::size_t idx = st.active_index;
        res.tx = window_[idx];
        window_[idx].resolved = true;

        resolve(res.tx, res.outcomes);

        st.transmitting = false;
        st.queue.pop_front();
        if (!st.queue.empty()) {
            st.reset_access();
            res.next_seq = st.queue.front();
        }
        prune(now);
        return res;
    }

    /// Frames still on the air at sim end; their pairs are pending.
    std::vector<Transmission> in_flight() const {
        std::vector<Transmission> out;
        for (const auto& t : window_)
            if (!t.resolved) out.push_back(t);
        return out;
    }

    /// Frames created but never transmitted by sim end.
    std::vector<PacketSeq> queued_frames() const {
        std::vector<PacketSeq> out;
        for (const auto& st : states_) {
            auto it = st.queue.begin();
            if (st.transmitting && it != st.queue.end()) ++it;  // head is on the air
            for (; it != st.queue.end(); ++it) out.push_back(*it);
        }
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    struct WindowTx : Transmission {
        bool resolved = false;
    };

    struct NodeState {
        std::deque<PacketSeq> queue;
        bool transmitting = false;
        bool in_backoff = false;
        std::uint32_t remaining = 0;
        std::uint32_t attempt = 0;
        std::size_t active_index = 0;

        void reset_access() {
            in_backoff = false;
            remaining = 0;
            attempt = 0;
        }
    };

    NodeId seq_node(PacketSeq seq) const { return (*arena_)[seq].src; }

    std::uint32_t draw_backoff(NodeId node) {
        if (draw_override_) return draw_override_(node, cfg_->contention_window);
        return static_cast<std::uint32_t>(
            backoff_rngs_[static_cast<std::size_t>(node)].uniform_int(cfg_->contention_window));
    }

    // A frame is sensed while strictly inside its air interval: a frame that
    // starts at this exact instant is not detectable yet, which is what lets
    // two expiring backoffs collide.
    bool sensed_busy(NodeId node, SimTime now) const {
        const Point& here = (*nodes_)[static_cast<std::size_t>(node)].pos;
        for (const auto& t : window_)
            if (!t.resolved && t.t_start < now && now < t.t_end &&
                in_range(t.sender_pos, here, t.sender_range))
                return true;
        return false;
    }

    SimTime idle_at(NodeId node, SimTime now) const {
        const Point& here = (*nodes_)[static_cast<std::size_t>(node)].pos;
        SimTime idle = now;
        for (const auto& t : window_)
            if (!t.resolved && t.t_start < now && now < t.t_end &&
                in_range(t.sender_pos, here, t.sender_range))
                idle = std::max(idle, t.t_end);
        return idle;
    }

    AttemptResult start_tx(NodeId node, SimTime now, AttemptResult res) {
        auto& st = states_[static_cast<std::size_t>(node)];
        const Packet& pkt = (*arena_)[st.queue.front()];
        const auto& self = (*nodes_)[static_cast<std::size_t>(node)];

        WindowTx tx;
        tx.seq = pkt.seq;
        tx.sender = node;
        tx.sender_pos = self.pos;
        tx.sender_range = self.range;
        tx.t_start = now;
        tx.t_end = now + frame_airtime(pkt);
        tx.attempt = st.attempt;
        for (const auto& n : *nodes_) {
            if (n.id == node || !n.active) continue;
            if (in_range(self.pos, n.pos, self.range)) tx.intended.push_back({n.id, n.pos});
        }

        st.transmitting = true;
        st.active_index = window_.size();
        window_.push_back(std::move(tx));

        res.started = true;
        res.time = window_.back().t_end;
        return res;
    }

    void resolve(const Transmission& tx, std::vector<DeliveryOutcome>& out) {
        for (const auto& rcv : tx.intended) {
            DeliveryOutcome oc;
            oc.seq = tx.seq;
            oc.receiver = rcv.id;

            bool collided = false;
            for (const auto& other : window_) {
                if (other.seq == tx.seq) continue;
                if (other.t_start < tx.t_end && other.t_end > tx.t_start &&
                    in_range(other.sender_pos, rcv.pos, other.sender_range)) {
                    collided = true;
                    break;
                }
            }
            if (collided) {
                oc.outcome = Outcome::collision;
            } else if (cfg_->p_loss > 0.0 && loss_rng_.uniform01() < cfg_->p_loss) {
                oc.outcome = Outcome::random_loss;
            } else {
                oc.outcome = Outcome::delivered;
                oc.delivered_at = tx.t_end;
            }
            out.push_back(oc);
        }
    }

    // Drop transmissions nothing unresolved can overlap anymore.
    void prune(SimTime now) {
        (void)now;
        bool any_active = false;
        SimTime horizon = 0;
        for (const auto& t : window_)
            if (!t.resolved) {
                horizon = any_active ? std::min(horizon, t.t_start) : t.t_start;
                any_active = true;
            }
        std::vector<WindowTx> next;
        next.reserve(window_.size());
        for (auto& t : window_) {
            if (!t.resolved || (any_active && t.t_end > horizon)) {
                if (!t.resolved) states_[static_cast<std::size_t>(t.sender)].active_index = next.size();
                next.push_back(std::move(t));
            }
        }
        window_ = std::move(next);
    }

    const SimConfig* cfg_;
    const std::vector<RadioNode>* nodes_;
    const std::vector<Packet>* arena_;
    SimTime slot_ns_;
    SimTime phy_ns_;
    RngStream loss_rng_;
    std::vector<RngStream> backoff_rngs_;
    BackoffDraw draw_override_;
    std::vector<NodeState> states_;
    std::vector<WindowTx> window_;
};

} // namespace vanetsim
