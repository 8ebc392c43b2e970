#pragma once

#include <cmath>
#include <cstdint>
#include <string>

namespace vanetsim {

/// Planar scenario coordinates, meters.
struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point& a, const Point& b) {
        return a.x == b.x && a.y == b.y;
    }
};

inline double distance(const Point& a, const Point& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

/// Compass heading of travel. Approaches and their exit lanes are named by
/// the heading vehicles drive, e.g. heading N runs from the south edge up.
enum class Direction : std::uint8_t { N, S, E, W };

inline const char* to_string(Direction d) {
    switch (d) {
        case Direction::N: return "N";
        case Direction::S: return "S";
        case Direction::E: return "E";
        case Direction::W: return "W";
    }
    return "?";
}

inline bool ns_axis(Direction d) {
    return d == Direction::N || d == Direction::S;
}

/// Axis-aligned junction box vehicles must not block.
struct YellowBox {
    Point center;
    double half_width = 0.0;
    double half_height = 0.0;
};

// Boundary inclusive: a front bumper touching the edge counts as inside.
inline bool point_in_box(const Point& p, const YellowBox& box) {
    return std::abs(p.x - box.center.x) <= box.half_width &&
           std::abs(p.y - box.center.y) <= box.half_height;
}

} // namespace vanetsim
