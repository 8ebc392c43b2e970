#pragma once

#include <cstdint>
#include <variant>

#include "vanetsim/geometry.hpp"
#include "vanetsim/sim_time.hpp"

namespace vanetsim {

using NodeId = std::int32_t;
using PacketSeq = std::uint64_t;

enum class PacketKind : std::uint8_t { beacon, warning, report };

inline const char* to_string(PacketKind k) {
    switch (k) {
        case PacketKind::beacon: return "beacon";
        case PacketKind::warning: return "warning";
        case PacketKind::report: return "report";
    }
    return "?";
}

/// Periodic vehicle status broadcast.
struct BeaconPayload {
    NodeId vehicle = -1;
    Point position;
    double speed = 0.0;
    Direction approach = Direction::N;
};

/// RSU broadcast telling an approach whether the box ahead is blocked.
struct WarningPayload {
    std::uint32_t intersection = 0;
    bool blocked = false;
    Direction affected_approach = Direction::N;
    SimTime issued_at = 0;
    SimTime expiry = 0;
    std::uint32_t episode = 0;  // blockage episode ordinal, for delay accounting
};

/// RSU -> TCU traffic count over the wired link.
struct ReportPayload {
    Direction approach = Direction::N;
    std::uint32_t detected_on_approach = 0;
};

struct Packet {
    PacketSeq seq = 0;
    PacketKind kind = PacketKind::beacon;
    std::uint32_t size_bytes = 0;
    NodeId src = -1;
    SimTime created_at = 0;
    std::variant<BeaconPayload, WarningPayload, ReportPayload> payload;
};

} // namespace vanetsim
