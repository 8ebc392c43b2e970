#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <vector>

#include "vanetsim/config.hpp"
#include "vanetsim/errors.hpp"
#include "vanetsim/road_network.hpp"
#include "vanetsim/rng.hpp"
#include "vanetsim/sim_time.hpp"

namespace vanetsim {

enum class VehicleMode : std::uint8_t { cruising, braking, stopped, crossing, exited };

inline const char* to_string(VehicleMode m) {
    switch (m) {
        case VehicleMode::cruising: return "cruising";
        case VehicleMode::braking: return "braking";
        case VehicleMode::stopped: return "stopped";
        case VehicleMode::crossing: return "crossing";
        case VehicleMode::exited: return "exited";
    }
    return "?";
}

enum class SignalColor : std::uint8_t { green, yellow, red };

inline const char* to_string(SignalColor c) {
    switch (c) {
        case SignalColor::green: return "green";
        case SignalColor::yellow: return "yellow";
        case SignalColor::red: return "red";
    }
    return "?";
}

/// Vehicle kinematics plus the OBU protocol flags. `s` is the front-bumper
/// arc length measured from the approach-lane start; the exit lane continues
/// the same axis, so one coordinate covers the whole pass through the
/// intersection.
struct VehicleState {
    NodeId id = -1;
    Direction heading = Direction::N;
    double s = 0.0;          // front bumper, chain coordinate
    double v = 0.0;
    double v_desired = 0.0;
    double length = 4.5;
    VehicleMode mode = VehicleMode::cruising;

    bool warning_flag = false;     // latched by a blocked warning, cleared explicitly
    SimTime warning_until = 0;     // validity horizon of the latest warning
    std::optional<SimTime> warning_received_at;
    std::uint64_t rx_packets = 0;

    SimTime spawn_time = 0;
    std::optional<SimTime> exit_time;
    std::optional<SimTime> entered_box_at;

    bool fixture_halted = false;   // scenario fixtures pin a vehicle in place
    bool injection_halted = false; // blockage injection halt

    bool off_road = false;         // waiting for re-entry room
    bool crossed_line_warned = false;
    double stationary_in_box_s = 0.0;
    bool violation_counted = false;

    double rear() const { return s - length; }
    bool halted() const { return fixture_halted || injection_halted; }

    bool warning_active(SimTime t) const { return warning_flag && t < warning_until; }
};

// Simplified safe-speed rule: the speed that can be held for one reaction
// time without eating into the available gap. The leader's speed enters only
// through the gap, which is measured against its already-updated position.
inline double safe_speed(double gap, double v_leader, double reaction_time, double v_desired_cap) {
    (void)v_leader;
    if (gap <= 0.0) return 0.0;
    return std::min(v_desired_cap, gap / reaction_time);
}

/// Stop-line position the vehicle must not pass, if any. Vehicles already
/// past the line are committed and always clear the box.
inline std::optional<double> stop_target(double front_s, double stop_line_s,
                                         SignalColor color, bool warning_active) {
    if (front_s > stop_line_s) return std::nullopt;
    if (color != SignalColor::green || warning_active) return stop_line_s;
    return std::nullopt;
}

struct StepResult {
    double s = 0.0;
    double v = 0.0;
};

// One synchronous update. `gap_lead` and `gap_stop` are the distances the
// front bumper may still advance (already net of min_gap for the leader).
inline StepResult step_vehicle(const VehicleState& veh, double gap_lead,
                               std::optional<double> gap_stop, const SimConfig& cfg, double dt) {
    if (veh.halted()) return {veh.s, 0.0};

    double v_tgt = safe_speed(gap_lead, 0.0, cfg.reaction_time, veh.v_desired);
    if (gap_stop)
        v_tgt = std::min(v_tgt, safe_speed(*gap_stop, 0.0, cfg.reaction_time, veh.v_desired));

    double v = std::clamp(v_tgt, veh.v - cfg.brake_max * dt, veh.v + cfg.accel_max * dt);
    v = std::clamp(v, 0.0, veh.v_desired);

    double advance = v * dt;
    advance = std::min(advance, std::max(0.0, gap_lead));
    if (gap_stop) advance = std::min(advance, std::max(0.0, *gap_stop));
    return {veh.s + advance, dt > 0.0 ? advance / dt : 0.0};
}

// Per-tick observations the engine folds into its logs.
struct CrossingEvent {
    NodeId vehicle;
    SimTime t;
    Direction approach;
    SignalColor color;
    bool warned;
};

struct ZoneEntryEvent {
    NodeId vehicle;
    SimTime t;
    Direction approach;
    bool warned;
};

struct JourneyRecord {
    NodeId vehicle;
    SimTime spawn_time;
    SimTime exit_time;
};

enum class ViolationKind : std::uint8_t { stationary_in_box, warned_entry };

struct BoxViolationEvent {
    NodeId vehicle;
    SimTime t;
    ViolationKind kind;
};

struct TickEvents {
    std::vector<CrossingEvent> crossings;
    std::vector<ZoneEntryEvent> zone_entries;
    std::vector<JourneyRecord> journeys;
    std::vector<BoxViolationEvent> violations;
};

inline std::uint32_t approach_capacity(const SimConfig& cfg, const LaneSegment& approach) {
    const double usable = approach.stop_line_s - cfg.vehicle_length;
    if (usable < 0.0) return 0;
    return static_cast<std::uint32_t>(usable / (cfg.vehicle_length + cfg.min_gap)) + 1;
}

/// Deterministic initial fleet: vehicles dealt round-robin over the four
/// approaches, spread evenly behind the stop lines, desired speeds drawn
/// uniformly from [speed_min, speed_max] in id order.
inline std::vector<VehicleState> spawn_fleet(const SimConfig& cfg, const RoadNetwork& net,
                                             RngStream& rng) {
    constexpr std::array<Direction, 4> order{Direction::N, Direction::S, Direction::E, Direction::W};

    std::array<std::uint32_t, 4> per_lane{};
    for (std::uint32_t i = 0; i < cfg.num_vehicles; ++i) per_lane[i % 4] += 1;

    for (int a = 0; a < 4; ++a) {
        const auto cap = approach_capacity(cfg, net.approach(order[a]));
        if (per_lane[a] > cap)
            throw SpawnOverflow("approach " + std::string(to_string(order[a])) + " holds " +
                                std::to_string(cap) + " vehicles, needs " + std::to_string(per_lane[a]));
    }

    std::vector<VehicleState> fleet(cfg.num_vehicles);
    std::array<std::uint32_t, 4> placed{};
    for (std::uint32_t i = 0; i < cfg.num_vehicles; ++i) {
        const int a = static_cast<int>(i % 4);
        const auto& lane = net.approach(order[a]);
        const double usable = lane.stop_line_s - cfg.vehicle_length;
        const double spacing = per_lane[a] > 1 ? usable / (per_lane[a] - 1) : 0.0;

        VehicleState& veh = fleet[i];
        veh.id = static_cast<NodeId>(i);
        veh.heading = order[a];
        veh.length = cfg.vehicle_length;
        veh.s = lane.stop_line_s - spacing * placed[a];
        veh.v_desired = rng.uniform(cfg.speed_min, cfg.speed_max);
        veh.v = veh.v_desired;
        placed[a] += 1;
    }
    return fleet;
}

/// Owns the fleet and the per-heading ordered chains, and advances them one
/// mobility tick at a time. Update order is front-to-back per chain, so each
/// vehicle brakes against its leader's already-updated position; that makes
/// the no-collision argument a one-line induction.
class TrafficWorld {
public:
    TrafficWorld(const SimConfig& cfg, const RoadNetwork& net, std::vector<VehicleState> fleet,
                 std::uint64_t master_seed)
        : cfg_(&cfg), net_(&net), fleet_(std::move(fleet)),
          recycle_rng_(RngStream::labeled(master_seed, "recycle")) {
        for (int d = 0; d < 4; ++d) {
            const auto dir = static_cast<Direction>(d);
            const auto& ap = net.approach(dir);
            const auto& ex = net.exit_lane(dir);
            axis_origin_[d] = ap.start;
            const double len = ap.length();
            axis_unit_[d] = {(ap.end.x - ap.start.x) / len, (ap.end.y - ap.start.y) / len};
            approach_len_[d] = len;
            chain_len_[d] = len + ex.length();
            box_enter_[d] = len + net.box_enter_s(dir);
            box_leave_[d] = box_enter_[d] + 2.0 * net.box.half_width;
        }
        for (std::size_t i = 0; i < fleet_.size(); ++i)
            chains_[static_cast<int>(fleet_[i].heading)].push_back(static_cast<NodeId>(i));
        for (auto& chain : chains_)
            std::sort(chain.begin(), chain.end(), [this](NodeId a, NodeId b) {
                return fleet_[static_cast<std::size_t>(a)].s > fleet_[static_cast<std::size_t>(b)].s;
            });
    }

    const std::vector<VehicleState>& vehicles() const { return fleet_; }
    std::vector<VehicleState>& vehicles() { return fleet_; }
    const std::vector<NodeId>& chain(Direction d) const { return chains_[static_cast<int>(d)]; }

    Point position(NodeId id) const {
        const auto& veh = fleet_[static_cast<std::size_t>(id)];
        const int d = static_cast<int>(veh.heading);
        const double s = std::clamp(veh.s, 0.0, chain_len_[d]);
        return {axis_origin_[d].x + axis_unit_[d].x * s, axis_origin_[d].y + axis_unit_[d].y * s};
    }

    Point rear_position(NodeId id) const {
        const auto& veh = fleet_[static_cast<std::size_t>(id)];
        const int d = static_cast<int>(veh.heading);
        const double s = std::clamp(veh.rear(), 0.0, chain_len_[d]);
        return {axis_origin_[d].x + axis_unit_[d].x * s, axis_origin_[d].y + axis_unit_[d].y * s};
    }

    bool on_approach(const VehicleState& veh) const {
        return veh.s <= approach_len_[static_cast<int>(veh.heading)];
    }

    double stop_line(Direction d) const { return approach_len_[static_cast<int>(d)]; }
    double chain_length(Direction d) const { return chain_len_[static_cast<int>(d)]; }
    double box_enter(Direction d) const { return box_enter_[static_cast<int>(d)]; }
    double box_leave(Direction d) const { return box_leave_[static_cast<int>(d)]; }

    bool footprint_in_box(const VehicleState& veh) const {
        const int d = static_cast<int>(veh.heading);
        return veh.s >= box_enter_[d] && veh.rear() <= box_leave_[d];
    }

    // Free exit-lane distance beyond the box before the first stopped
    // vehicle, as seen from `within` meters around `rsu`. Infinity when no
    // stopped vehicle is in sight.
    double exit_free_space(Direction d, const Point& rsu, double within) const {
        const int di = static_cast<int>(d);
        double free = std::numeric_limits<double>::infinity();
        for (NodeId id : chains_[di]) {
            const auto& veh = fleet_[static_cast<std::size_t>(id)];
            if (veh.s <= approach_len_[di]) continue;           // still approaching
            if (veh.v >= 0.5) continue;                         // moving
            if (!in_sensor_range(id, rsu, within)) continue;
            free = std::min(free, veh.rear() - box_leave_[di]);
        }
        return free;
    }

    /// Advance every vehicle by one tick. `t` is the time being advanced to.
    TickEvents step_all(const std::array<SignalColor, 4>& colors, SimTime t, bool protocol_mode,
                        bool check_invariants) {
        TickEvents ev;
        const double dt = cfg_->mobility_dt;

        for (int d = 0; d < 4; ++d) {
            auto& chain = chains_[d];
            const VehicleState* leader = nullptr;
            for (std::size_t ci = 0; ci < chain.size();) {
                auto& veh = fleet_[static_cast<std::size_t>(chain[ci])];
                const double prev_s = veh.s;
                const double prev_v = veh.v;

                const bool warned = protocol_mode && veh.warning_active(t);
                const auto stop =
                    stop_target(veh.s, approach_len_[d], colors[static_cast<std::size_t>(d)], warned);

                const double gap_lead =
                    leader ? leader->rear() - cfg_->min_gap - veh.s : std::numeric_limits<double>::infinity();
                std::optional<double> gap_stop;
                if (stop) gap_stop = *stop - veh.s;

                const auto next = step_vehicle(veh, gap_lead, gap_stop, *cfg_, dt);
                veh.s = next.s;
                veh.v = next.v;

                if (check_invariants && leader && leader->rear() - veh.s < -1e-9)
                    throw RuntimeFault("same-lane overlap on chain " +
                                       std::string(to_string(static_cast<Direction>(d))));

                note_transitions(veh, prev_s, t, colors[static_cast<std::size_t>(d)], warned, ev);
                update_mode(veh, prev_v, dt, t, ev);

                if (veh.rear() > chain_len_[d]) {
                    complete_journey(veh, t, ev);
                    chain.erase(chain.begin() + static_cast<std::ptrdiff_t>(ci));
                    continue;  // removed; leader unchanged for the next vehicle
                }
                leader = &veh;
                ++ci;
            }
        }
        process_reentries(t);
        return ev;
    }

    // Blockage injection: halt the vehicle nearest the box on the exit lane
    // that has fully cleared it, so it becomes the head of the queue forming
    // behind the intersection. Returns false when no vehicle qualifies yet.
    bool inject_halt(Direction d, NodeId& halted_id) {
        const int di = static_cast<int>(d);
        NodeId best = -1;
        double best_s = std::numeric_limits<double>::infinity();
        for (NodeId id : chains_[di]) {
            const auto& veh = fleet_[static_cast<std::size_t>(id)];
            if (veh.rear() < box_leave_[di]) continue;
            if (veh.s < best_s) {
                best_s = veh.s;
                best = id;
            }
        }
        if (best < 0) return false;
        fleet_[static_cast<std::size_t>(best)].injection_halted = true;
        halted_id = best;
        return true;
    }

    void release_halt(NodeId id) {
        if (id >= 0) fleet_[static_cast<std::size_t>(id)].injection_halted = false;
    }

private:
    bool in_sensor_range(NodeId id, const Point& rsu, double within) const {
        return distance(position(id), rsu) <= within;
    }

    void note_transitions(VehicleState& veh, double prev_s, SimTime t, SignalColor color,
                          bool warned, TickEvents& ev) {
        const int d = static_cast<int>(veh.heading);
        const double zone_start = approach_len_[d] - cfg_->decision_zone;

        if (prev_s < zone_start && veh.s >= zone_start)
            ev.zone_entries.push_back({veh.id, t, veh.heading, warned});

        if (prev_s <= approach_len_[d] && veh.s > approach_len_[d]) {
            ev.crossings.push_back({veh.id, t, veh.heading, color, warned});
            veh.crossed_line_warned = warned;
        }

        if (prev_s < box_enter_[d] && veh.s >= box_enter_[d]) {
            veh.entered_box_at = t;
            if (veh.crossed_line_warned)
                ev.violations.push_back({veh.id, t, ViolationKind::warned_entry});
        }
    }

    void update_mode(VehicleState& veh, double prev_v, double dt, SimTime t, TickEvents& ev) {
        if (footprint_in_box(veh) && veh.v < 0.5) {
            veh.stationary_in_box_s += dt;
            if (veh.stationary_in_box_s > 2.0 && !veh.violation_counted) {
                veh.violation_counted = true;
                ev.violations.push_back({veh.id, t, ViolationKind::stationary_in_box});
            }
        } else {
            veh.stationary_in_box_s = 0.0;
            veh.violation_counted = false;
        }

        const int d = static_cast<int>(veh.heading);
        if (veh.s >= box_enter_[d] && veh.s <= box_leave_[d])
            veh.mode = VehicleMode::crossing;
        else if (veh.v < 1e-9)
            veh.mode = VehicleMode::stopped;
        else if (veh.v < prev_v - 1e-9)
            veh.mode = VehicleMode::braking;
        else
            veh.mode = VehicleMode::cruising;
    }

    void complete_journey(VehicleState& veh, SimTime t, TickEvents& ev) {
        veh.exit_time = t;
        veh.mode = VehicleMode::exited;
        ev.journeys.push_back({veh.id, veh.spawn_time, t});
        veh.off_road = true;
        const auto dir = static_cast<Direction>(recycle_rng_.uniform_int(4));
        reentry_.push_back({veh.id, dir});
    }

    void process_reentries(SimTime t) {
        for (std::size_t i = 0; i < reentry_.size();) {
            const auto [id, dir] = reentry_[i];
            const int d = static_cast<int>(dir);
            auto& chain = chains_[d];
            const double entry_front = cfg_->vehicle_length;
            bool fits = true;
            if (!chain.empty()) {
                const auto& last = fleet_[static_cast<std::size_t>(chain.back())];
                fits = last.rear() - cfg_->min_gap >= entry_front;
            }
            if (!fits) {
                ++i;
                continue;
            }
            auto& veh = fleet_[static_cast<std::size_t>(id)];
            veh.heading = dir;
            veh.s = entry_front;
            veh.v = veh.v_desired;
            veh.mode = VehicleMode::cruising;
            veh.off_road = false;
            veh.spawn_time = t;
            veh.exit_time.reset();
            veh.entered_box_at.reset();
            veh.warning_flag = false;
            veh.warning_until = 0;
            veh.warning_received_at.reset();
            veh.crossed_line_warned = false;
            veh.stationary_in_box_s = 0.0;
            veh.violation_counted = false;
            chain.push_back(id);
            reentry_.erase(reentry_.begin() + static_cast<std::ptrdiff_t>(i));
        }
    }

    struct Reentry {
        NodeId id;
        Direction dir;
    };

    const SimConfig* cfg_;
    const RoadNetwork* net_;
    std::vector<VehicleState> fleet_;
    std::array<std::vector<NodeId>, 4> chains_;
    std::vector<Reentry> reentry_;
    RngStream recycle_rng_;

    std::array<Point, 4> axis_origin_;
    std::array<Point, 4> axis_unit_;
    std::array<double, 4> approach_len_;
    std::array<double, 4> chain_len_;
    std::array<double, 4> box_enter_;
    std::array<double, 4> box_leave_;
};

} // namespace vanetsim
