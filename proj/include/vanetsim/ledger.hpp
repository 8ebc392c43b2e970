#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "vanetsim/packet.hpp"
#include "vanetsim/radio.hpp"
#include "vanetsim/sim_time.hpp"

namespace vanetsim {

/// Aggregate accounting for one packet kind. Pair counters are over intended
/// (frame, receiver) pairs; sums are integers so recomputation from a dump
/// reproduces them exactly.
struct KindTotals {
    std::uint64_t created_frames = 0;
    std::uint64_t sent_frames = 0;
    std::uint64_t queued_frames = 0;   // created, never on the air by sim end
    std::uint64_t intended_pairs = 0;
    std::uint64_t delivered_pairs = 0;
    std::uint64_t collision_pairs = 0;
    std::uint64_t random_loss_pairs = 0;
    std::uint64_t pending_pairs = 0;   // frame in flight at sim end
    std::uint64_t delivered_bytes = 0; // payload bytes over delivered pairs
    SimTime delay_sum_ns = 0;          // over delivered pairs

    std::uint64_t dropped_pairs() const { return collision_pairs + random_loss_pairs; }
    std::uint64_t dropped_bytes = 0;

    bool conserved() const {
        return intended_pairs == delivered_pairs + dropped_pairs() + pending_pairs;
    }
};

/// Full per-pair record, kept only when a ledger dump was requested.
struct PairRecord {
    PacketSeq seq = 0;
    NodeId receiver = -1;
    Outcome outcome = Outcome::delivered;
    std::optional<SimTime> delivered_at;
};

/// Per-frame record for dumps: radio frames and wired reports.
struct FrameRecord {
    PacketSeq seq = 0;
    PacketKind kind = PacketKind::beacon;
    std::uint32_t size_bytes = 0;
    NodeId src = -1;
    SimTime created_at = 0;
    std::optional<SimTime> t_start;
    std::optional<SimTime> t_end;
    std::uint32_t attempts = 0;
    std::optional<std::uint32_t> episode;  // warnings only
    bool wired = false;
};

/// Every message's lifecycle, aggregated for QoS math. Radio kinds (beacons,
/// warnings) make up the headline numbers; wired RSU->TCU reports are
/// conserved per kind but kept out of the radio QoS aggregates, since they
/// never touch the channel under test.
struct PacketLedger {
    std::array<KindTotals, 3> by_kind{};  // indexed by PacketKind

    std::vector<std::uint64_t> rx_by_vehicle;  // delivered pairs, vehicle receivers

    // Per blockage episode: vehicle -> first warning delivery time.
    std::vector<std::map<NodeId, SimTime>> episode_first_rx;

    bool keep_records = false;
    std::vector<FrameRecord> frames;
    std::vector<PairRecord> pairs;
    std::vector<std::pair<PacketSeq, NodeId>> pending_pair_records;  // frames in flight at sim end

    KindTotals& kind(PacketKind k) { return by_kind[static_cast<std::size_t>(k)]; }
    const KindTotals& kind(PacketKind k) const { return by_kind[static_cast<std::size_t>(k)]; }

    // Radio-kind sums.
    std::uint64_t radio_intended() const { return radio_sum(&KindTotals::intended_pairs); }
    std::uint64_t radio_delivered() const { return radio_sum(&KindTotals::delivered_pairs); }
    std::uint64_t radio_pending() const { return radio_sum(&KindTotals::pending_pairs); }
    std::uint64_t radio_dropped() const {
        return kind(PacketKind::beacon).dropped_pairs() + kind(PacketKind::warning).dropped_pairs();
    }
    std::uint64_t radio_dropped_bytes() const { return radio_sum(&KindTotals::dropped_bytes); }
    std::uint64_t radio_delivered_bytes() const { return radio_sum(&KindTotals::delivered_bytes); }
    SimTime radio_delay_sum() const {
        return kind(PacketKind::beacon).delay_sum_ns + kind(PacketKind::warning).delay_sum_ns;
    }

    bool conserved() const {
        for (const auto& k : by_kind)
            if (!k.conserved()) return false;
        return true;
    }

private:
    std::uint64_t radio_sum(std::uint64_t KindTotals::* member) const {
        return kind(PacketKind::beacon).*member + kind(PacketKind::warning).*member;
    }
};

} // namespace vanetsim
