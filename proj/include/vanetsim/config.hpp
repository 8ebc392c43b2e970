#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vanetsim/geometry.hpp"

namespace vanetsim {

enum class RunMode : std::uint8_t { protocol, baseline };
enum class TcuMode : std::uint8_t { fixed, adaptive };

/// Which exit lane the blockage-injection scenario obstructs. `none`
/// disables injection.
enum class BlockExit : std::uint8_t { none, N, S, E, W };

inline const char* to_string(RunMode m) { return m == RunMode::protocol ? "protocol" : "baseline"; }
inline const char* to_string(TcuMode m) { return m == TcuMode::fixed ? "fixed" : "adaptive"; }

inline const char* to_string(BlockExit b) {
    switch (b) {
        case BlockExit::none: return "none";
        case BlockExit::N: return "N";
        case BlockExit::S: return "S";
        case BlockExit::E: return "E";
        case BlockExit::W: return "W";
    }
    return "?";
}

/// Full parameter bundle for one run. Field names double as the config-file
/// keys, see config_io.hpp.
struct SimConfig {
    // Core scenario parameters.
    std::uint32_t num_vehicles = 200;
    double speed_min = 5.0;           // m/s
    double speed_max = 20.0;          // m/s
    double scenario_width = 800.0;    // m
    double scenario_height = 800.0;   // m
    double vehicle_length = 4.5;      // m
    std::uint32_t green_crossing_target = 175;
    double signal_spacing = 50.0;     // m, between opposing stop lines
    std::uint32_t normal_packet_bytes = 512;
    std::uint32_t warning_packet_bytes = 256;
    double duration = 300.0;          // s
    double sensor_range = 75.0;       // m, RSU radio/detection radius
    double vehicle_range = 200.0;     // m, OBU radio radius
    std::uint64_t data_rate = 6'000'000;  // bit/s
    double beacon_period = 0.5;       // s
    double warning_repeat_period = 0.1;  // s
    double mobility_dt = 0.1;         // s
    std::uint64_t seed = 1;
    RunMode mode = RunMode::protocol;

    // Road geometry.
    double lane_width = 3.5;          // m
    double stop_line_setback = 1.0;   // m between stop line and box edge

    // Car following.
    double reaction_time = 1.0;       // s, tau in the safe-speed rule
    double accel_max = 2.5;           // m/s^2
    double brake_max = 4.5;           // m/s^2
    double min_gap = 2.0;             // m clear gap when queued

    // Medium access.
    double slot_time = 13e-6;         // s
    std::uint32_t contention_window = 16;  // backoff slots, fixed
    std::uint32_t mac_header_bytes = 36;
    double phy_overhead = 40e-6;      // s per frame
    double p_loss = 0.0;              // random per-receiver loss probability

    // Infrastructure.
    double wired_link_delay = 1e-3;   // s, RSU -> TCU report link
    double report_period = 1.0;       // s
    double blockage_confirm_time = 1.0;  // s blocked before first warning
    double warning_expiry = 1.0;      // s warning validity after issue
    double decision_zone = 50.0;      // m before the stop line

    // Signal plan.
    double green_duration = 30.0;     // s
    double yellow_duration = 3.0;     // s
    double all_red_duration = 2.0;    // s
    double green_max_duration = 60.0; // s cap for adaptive extension
    TcuMode tcu_mode = TcuMode::fixed;

    // Blockage injection scenario.
    BlockExit block_exit = BlockExit::none;
    double block_start = 0.0;         // s
    double block_end = 0.0;           // s

    // Spectrum facts carried as metadata only; no PHY simulation behind them.
    double carrier_freq_ghz = 5.9;
    double band_mhz = 75.0;

    friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

/// One violated invariant. validate_config reports every violation, not just
/// the first.
struct ConfigError {
    std::string field;
    std::string reason;
};

inline std::vector<ConfigError> validate_config(const SimConfig& c) {
    std::vector<ConfigError> errs;
    auto bad = [&errs](const char* field, const std::string& reason) {
        errs.push_back({field, reason});
    };
    auto positive = [&](const char* field, double v) {
        if (!(v > 0.0)) bad(field, "must be strictly positive");
    };

    if (!(c.speed_min > 0.0)) bad("speed_min", "must be strictly positive");
    if (!(c.speed_min <= c.speed_max)) bad("speed_min", "must not exceed speed_max");

    positive("speed_max", c.speed_max);
    positive("scenario_width", c.scenario_width);
    positive("scenario_height", c.scenario_height);
    positive("vehicle_length", c.vehicle_length);
    positive("signal_spacing", c.signal_spacing);
    positive("duration", c.duration);
    positive("sensor_range", c.sensor_range);
    positive("vehicle_range", c.vehicle_range);
    positive("beacon_period", c.beacon_period);
    positive("warning_repeat_period", c.warning_repeat_period);
    positive("mobility_dt", c.mobility_dt);
    positive("lane_width", c.lane_width);
    positive("reaction_time", c.reaction_time);
    positive("accel_max", c.accel_max);
    positive("brake_max", c.brake_max);
    positive("min_gap", c.min_gap);
    positive("slot_time", c.slot_time);
    positive("report_period", c.report_period);
    positive("warning_expiry", c.warning_expiry);
    positive("decision_zone", c.decision_zone);
    positive("green_duration", c.green_duration);
    positive("yellow_duration", c.yellow_duration);
    positive("all_red_duration", c.all_red_duration);
    positive("green_max_duration", c.green_max_duration);
    positive("carrier_freq_ghz", c.carrier_freq_ghz);
    positive("band_mhz", c.band_mhz);

    if (c.normal_packet_bytes == 0) bad("normal_packet_bytes", "must be strictly positive");
    if (c.warning_packet_bytes == 0) bad("warning_packet_bytes", "must be strictly positive");
    if (c.contention_window == 0) bad("contention_window", "must be at least 1 slot");
    if (c.data_rate < 1000) bad("data_rate", "must be at least 1000 bit/s");

    if (c.stop_line_setback < 0.0) bad("stop_line_setback", "must be non-negative");
    if (c.phy_overhead < 0.0) bad("phy_overhead", "must be non-negative");
    if (c.wired_link_delay < 0.0) bad("wired_link_delay", "must be non-negative");
    if (c.blockage_confirm_time < 0.0) bad("blockage_confirm_time", "must be non-negative");
    if (c.p_loss < 0.0 || c.p_loss > 1.0) bad("p_loss", "must lie in [0, 1]");

    if (c.mobility_dt > c.beacon_period) bad("mobility_dt", "must not exceed beacon_period");
    if (c.mobility_dt > c.warning_repeat_period) bad("mobility_dt", "must not exceed warning_repeat_period");

    if (c.block_exit != BlockExit::none) {
        if (c.block_end < c.block_start) bad("block_end", "must be >= block_start");
        if (c.block_start < 0.0) bad("block_start", "must be non-negative");
    }
    return errs;
}

inline bool config_valid(const SimConfig& c) {
    return validate_config(c).empty();
}

} // namespace vanetsim
