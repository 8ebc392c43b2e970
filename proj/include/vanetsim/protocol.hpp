#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <vector>

#include "vanetsim/config.hpp"
#include "vanetsim/mobility.hpp"
#include "vanetsim/packet.hpp"
#include "vanetsim/road_network.hpp"
#include "vanetsim/sim_time.hpp"

namespace vanetsim {

enum class ActiveAxis : std::uint8_t { NS_green, EW_green };
enum class SignalStage : std::uint8_t { green, yellow, all_red };

inline const char* to_string(ActiveAxis a) { return a == ActiveAxis::NS_green ? "NS_green" : "EW_green"; }

inline const char* to_string(SignalStage s) {
    switch (s) {
        case SignalStage::green: return "green";
        case SignalStage::yellow: return "yellow";
        case SignalStage::all_red: return "all_red";
    }
    return "?";
}

struct SignalPhase {
    ActiveAxis active = ActiveAxis::NS_green;
    SignalStage stage = SignalStage::green;
    SimTime stage_started_at = 0;
    SimTime stage_duration = 0;
    SimTime green_started_at = 0;  // start of the current green, for the adaptive cap
};

struct PhaseRecord {
    SimTime t;
    ActiveAxis active;
    SignalStage stage;
};

// NS and EW are never simultaneously green; a non-active axis is red in
// every stage, and the active one is red during all_red.
inline SignalColor approach_color(const SignalPhase& ph, Direction d) {
    const bool on_active_axis = ns_axis(d) == (ph.active == ActiveAxis::NS_green);
    if (!on_active_axis) return SignalColor::red;
    switch (ph.stage) {
        case SignalStage::green: return SignalColor::green;
        case SignalStage::yellow: return SignalColor::yellow;
        case SignalStage::all_red: return SignalColor::red;
    }
    return SignalColor::red;
}

struct TcuState {
    SignalPhase phase;
    std::array<std::uint32_t, 4> queue_estimates{};  // latest report per approach
    TcuMode mode = TcuMode::fixed;
};

/// Advance the signal controller to time t. Fixed mode cycles
/// green -> yellow -> all_red -> other axis; adaptive mode extends an
/// expiring green in 5 s increments while its axis out-queues the red one
/// and the green has run less than green_max_duration.
inline bool tcu_tick(TcuState& tcu, SimTime t, const SimConfig& cfg) {
    auto& ph = tcu.phase;
    bool changed = false;
    while (t - ph.stage_started_at >= ph.stage_duration) {
        const SimTime boundary = ph.stage_started_at + ph.stage_duration;
        switch (ph.stage) {
            case SignalStage::green: {
                if (tcu.mode == TcuMode::adaptive) {
                    const bool ns = tcu.phase.active == ActiveAxis::NS_green;
                    const std::uint32_t green_q = ns
                        ? tcu.queue_estimates[0] + tcu.queue_estimates[1]
                        : tcu.queue_estimates[2] + tcu.queue_estimates[3];
                    const std::uint32_t red_q = ns
                        ? tcu.queue_estimates[2] + tcu.queue_estimates[3]
                        : tcu.queue_estimates[0] + tcu.queue_estimates[1];
                    const SimTime elapsed = boundary - ph.green_started_at;
                    if (green_q > red_q && elapsed < seconds_to_ns(cfg.green_max_duration)) {
                        ph.stage_duration += seconds_to_ns(5.0);
                        continue;
                    }
                }
                ph.stage = SignalStage::yellow;
                ph.stage_started_at = boundary;
                ph.stage_duration = seconds_to_ns(cfg.yellow_duration);
                changed = true;
                break;
            }
            case SignalStage::yellow:
                ph.stage = SignalStage::all_red;
                ph.stage_started_at = boundary;
                ph.stage_duration = seconds_to_ns(cfg.all_red_duration);
                changed = true;
                break;
            case SignalStage::all_red:
                ph.active = ph.active == ActiveAxis::NS_green ? ActiveAxis::EW_green : ActiveAxis::NS_green;
                ph.stage = SignalStage::green;
                ph.stage_started_at = boundary;
                ph.stage_duration = seconds_to_ns(cfg.green_duration);
                ph.green_started_at = boundary;
                changed = true;
                break;
        }
    }
    return changed;
}

struct RsuState {
    NodeId node_id = -1;
    Direction approach = Direction::N;
    Point position;
    std::vector<NodeId> detected;
    std::optional<SimTime> box_blocked_since;
    std::optional<SimTime> last_warning_at;
    std::optional<SimTime> last_report_at;
    bool episode_open = false;       // blocked interval being tracked
    bool episode_warned = false;     // first warning of this episode sent
    std::uint32_t episode_id = 0;    // global index once opened
};

/// Maximal blocked interval seen by one RSU. `first_issue` is the first
/// warning's issue time; warnings only exist once the blockage outlasted the
/// confirmation delay.
struct EpisodeRecord {
    std::uint32_t id = 0;
    Direction approach = Direction::N;
    SimTime onset = 0;
    std::optional<SimTime> first_issue;
    std::optional<SimTime> cleared_at;
    std::uint32_t warnings_emitted = 0;
    std::uint32_t clears_emitted = 0;
};

/// Refresh detection and the blocked flag from ground-truth vehicle state.
/// The box counts as blocked when a detected vehicle sits stationary on it,
/// or when the stopped queue on the RSU's exit lane leaves less than one
/// vehicle of space beyond the box.
inline void rsu_sense(RsuState& rsu, const TrafficWorld& world, const SimConfig& cfg, SimTime t) {
    rsu.detected.clear();
    bool blocked = false;
    const auto& fleet = world.vehicles();
    for (const auto& veh : fleet) {
        if (veh.off_road) continue;
        if (distance(world.position(veh.id), rsu.position) > cfg.sensor_range) continue;
        rsu.detected.push_back(veh.id);
        if (veh.v < 0.5 && world.footprint_in_box(veh)) blocked = true;
    }
    if (!blocked) {
        const double free_space = world.exit_free_space(rsu.approach, rsu.position, cfg.sensor_range);
        blocked = free_space < cfg.vehicle_length + cfg.min_gap;
    }
    if (blocked && !rsu.box_blocked_since) rsu.box_blocked_since = t;
    if (!blocked) rsu.box_blocked_since.reset();
}

/// What the RSU wants to send this tick; the engine owns packet numbering.
struct RsuActions {
    bool send_warning = false;
    bool send_clear = false;
    bool send_report = false;
    std::uint32_t report_count = 0;
    bool episode_started = false;
};

inline RsuActions rsu_tick(RsuState& rsu, SimTime t, const SimConfig& cfg, bool warnings_enabled) {
    RsuActions act;
    const SimTime confirm = seconds_to_ns(cfg.blockage_confirm_time);
    const SimTime repeat = seconds_to_ns(cfg.warning_repeat_period);

    if (rsu.box_blocked_since && t - *rsu.box_blocked_since >= confirm) {
        if (!rsu.episode_open) {
            rsu.episode_open = true;
            rsu.episode_warned = false;
            rsu.last_warning_at.reset();
            act.episode_started = true;
        }
        if (warnings_enabled && (!rsu.last_warning_at || t - *rsu.last_warning_at >= repeat)) {
            act.send_warning = true;
            rsu.last_warning_at = t;
            rsu.episode_warned = true;
        }
    } else if (rsu.episode_open && !rsu.box_blocked_since) {
        rsu.episode_open = false;
        if (warnings_enabled && rsu.episode_warned) act.send_clear = true;
    }

    if (!rsu.last_report_at || t - *rsu.last_report_at >= seconds_to_ns(cfg.report_period)) {
        act.send_report = true;  // caller fills report_count from the world
        rsu.last_report_at = t;
    }
    return act;
}

// Count of detected vehicles still approaching on the RSU's own lane.
inline std::uint32_t rsu_approach_count(const RsuState& rsu, const TrafficWorld& world) {
    std::uint32_t count = 0;
    for (NodeId id : rsu.detected) {
        const auto& veh = world.vehicles()[static_cast<std::size_t>(id)];
        if (veh.heading == rsu.approach && world.on_approach(veh)) count += 1;
    }
    return count;
}

/// OBU reception. Beacons only feed the receive counter; warnings latch or
/// clear the stop flag for the vehicle's own approach while still valid.
inline void obu_receive(VehicleState& veh, const Packet& pkt, SimTime t, bool protocol_mode) {
    veh.rx_packets += 1;
    if (pkt.kind != PacketKind::warning || !protocol_mode) return;
    const auto& w = std::get<WarningPayload>(pkt.payload);
    if (w.affected_approach != veh.heading) return;
    if (w.blocked) {
        if (t >= w.expiry) return;  // stale
        veh.warning_flag = true;
        veh.warning_until = std::max(veh.warning_until, w.expiry);
        if (!veh.warning_received_at || t < *veh.warning_received_at) veh.warning_received_at = t;
    } else {
        veh.warning_flag = false;
        veh.warning_until = 0;
    }
}

/// Blind iff some decision-zone entry on a blocked approach happened inside
/// a blockage interval with no active warning on board.
inline bool classify_blind_entry(const ZoneEntryEvent& ze, const std::vector<EpisodeRecord>& episodes) {
    if (ze.warned) return false;
    for (const auto& ep : episodes) {
        if (ep.approach != ze.approach) continue;
        const SimTime end = ep.cleared_at ? *ep.cleared_at : std::numeric_limits<SimTime>::max();
        if (ze.t >= ep.onset && ze.t < end) return true;
    }
    return false;
}

inline std::uint32_t count_blind(const std::vector<ZoneEntryEvent>& zone_entries,
                                 const std::vector<EpisodeRecord>& episodes) {
    std::set<NodeId> blind;
    for (const auto& ze : zone_entries)
        if (classify_blind_entry(ze, episodes)) blind.insert(ze.vehicle);
    return static_cast<std::uint32_t>(blind.size());
}

} // namespace vanetsim
