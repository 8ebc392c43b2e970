#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "vanetsim/config.hpp"
#include "vanetsim/errors.hpp"
#include "vanetsim/geometry.hpp"

namespace vanetsim {

enum class LaneRole : std::uint8_t { approach, exit };

using LaneId = std::uint32_t;

/// Straight lane segment. Approaches run from the scenario edge to their
/// stop line; exit lanes continue from the stop line through the junction
/// box to the far edge, so the box transit happens on the exit segment.
struct LaneSegment {
    LaneId id = 0;
    Point start;
    Point end;
    double width = 3.5;
    Direction approach_direction = Direction::N;
    LaneRole role = LaneRole::approach;
    double stop_line_s = 0.0;  // longitudinal stop-line offset from start

    double length() const { return distance(start, end); }
};

// Arc-length interpolation along the segment.
inline Point lane_point(const LaneSegment& lane, double s) {
    const double len = lane.length();
    if (s < -1e-9 || s > len + 1e-9)
        throw OutOfLane("s=" + std::to_string(s) + " outside [0, " + std::to_string(len) +
                        "] on lane " + std::to_string(lane.id));
    if (s < 0.0) s = 0.0;
    if (s > len) s = len;
    const double f = len > 0.0 ? s / len : 0.0;
    return {lane.start.x + (lane.end.x - lane.start.x) * f,
            lane.start.y + (lane.end.y - lane.start.y) * f};
}

/// One four-way crossing: two perpendicular roads, one lane per direction,
/// a junction box between the stop lines, one RSU per approach and a TCU at
/// the box center.
struct RoadNetwork {
    std::vector<LaneSegment> lanes;
    YellowBox box;
    std::vector<Point> signal_positions;  // one per approach, at its stop line
    std::vector<Point> rsu_positions;     // one per approach, at its stop line
    Point tcu_position;

    // Lane layout is fixed: approach then exit, in Direction order N,S,E,W.
    const LaneSegment& approach(Direction d) const { return lanes[2 * static_cast<int>(d)]; }
    const LaneSegment& exit_lane(Direction d) const { return lanes[2 * static_cast<int>(d) + 1]; }

    // Box span in exit-lane arc length: [near edge, far edge].
    double box_enter_s(Direction d) const {
        (void)d;
        return setback;
    }
    double box_leave_s(Direction d) const { (void)d; return setback + 2.0 * box.half_width; }

    double setback = 1.0;
};

inline RoadNetwork build_cross_network(const SimConfig& cfg) {
    const double w = cfg.scenario_width;
    const double h = cfg.scenario_height;
    const double spacing = cfg.signal_spacing;

    if (spacing >= std::min(w, h))
        throw GeometryError("signal_spacing " + std::to_string(spacing) +
                            " does not fit the scenario " + std::to_string(w) + "x" + std::to_string(h));
    const double side = spacing - 2.0 * cfg.stop_line_setback;
    if (side <= 0.0)
        throw GeometryError("stop_line_setback leaves no junction box inside the signal spacing");

    const double cx = w / 2.0;
    const double cy = h / 2.0;
    const double off = cfg.lane_width / 2.0;  // right-hand traffic offset
    const double half_spacing = spacing / 2.0;

    RoadNetwork net;
    net.setback = cfg.stop_line_setback;
    net.box = {{cx, cy}, side / 2.0, side / 2.0};
    net.tcu_position = {cx, cy};

    struct Def {
        Direction dir;
        Point approach_start, stop_point, exit_end;
    };
    const std::array<Def, 4> defs{{
        {Direction::N, {cx + off, 0.0}, {cx + off, cy - half_spacing}, {cx + off, h}},
        {Direction::S, {cx - off, h}, {cx - off, cy + half_spacing}, {cx - off, 0.0}},
        {Direction::E, {0.0, cy - off}, {cx - half_spacing, cy - off}, {w, cy - off}},
        {Direction::W, {w, cy + off}, {cx + half_spacing, cy + off}, {0.0, cy + off}},
    }};

    LaneId next_id = 0;
    for (const auto& d : defs) {
        LaneSegment ap;
        ap.id = next_id++;
        ap.start = d.approach_start;
        ap.end = d.stop_point;
        ap.width = cfg.lane_width;
        ap.approach_direction = d.dir;
        ap.role = LaneRole::approach;
        ap.stop_line_s = ap.length();

        LaneSegment ex;
        ex.id = next_id++;
        ex.start = d.stop_point;
        ex.end = d.exit_end;
        ex.width = cfg.lane_width;
        ex.approach_direction = d.dir;
        ex.role = LaneRole::exit;
        ex.stop_line_s = 0.0;

        net.lanes.push_back(ap);
        net.lanes.push_back(ex);
        net.signal_positions.push_back(d.stop_point);
        net.rsu_positions.push_back(d.stop_point);
    }
    return net;
}

} // namespace vanetsim
