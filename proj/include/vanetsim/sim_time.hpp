#pragma once

#include <cmath>
#include <cstdint>

namespace vanetsim {

// Simulation clock in integer nanoseconds. Keeping time integral makes event
// ordering exact and lets metric sums reproduce bit-for-bit when recomputed
// from a dumped ledger.
using SimTime = std::int64_t;

constexpr SimTime kNsPerSec = 1'000'000'000;

inline SimTime seconds_to_ns(double s) {
    return static_cast<SimTime>(std::llround(s * 1e9));
}

inline double ns_to_seconds(SimTime t) {
    return static_cast<double>(t) / 1e9;
}

inline double ns_to_ms(SimTime t) {
    return static_cast<double>(t) / 1e6;
}

} // namespace vanetsim
