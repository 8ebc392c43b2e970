#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "vanetsim/config.hpp"

namespace vanetsim {

namespace detail {

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return std::string(s.substr(b, e - b));
}

inline std::string double_to_string(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

inline bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

inline bool parse_u64(const std::string& s, std::uint64_t& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtoull(s.c_str(), &end, 10);
    return end == s.c_str() + s.size();
}

// Integer fields accept scientific notation ("1.5e6") as long as the value
// is integral; Table-style sweeps are written that way.
template <typename UInt>
inline bool parse_uint_field(const std::string& s, UInt& out) {
    double v = 0.0;
    if (!parse_double(s, v)) return false;
    if (v < 0.0 || v != static_cast<double>(static_cast<std::uint64_t>(v))) return false;
    out = static_cast<UInt>(v);
    return true;
}

struct FieldDef {
    const char* name;
    std::function<std::string(const SimConfig&)> render;
    std::function<bool(SimConfig&, const std::string&)> parse;
};

inline const std::vector<FieldDef>& config_fields() {
    auto d = [](double SimConfig::* m) {
        return FieldDef{nullptr,
                        [m](const SimConfig& c) { return double_to_string(c.*m); },
                        [m](SimConfig& c, const std::string& s) { return parse_double(s, c.*m); }};
    };
    auto u32 = [](std::uint32_t SimConfig::* m) {
        return FieldDef{nullptr,
                        [m](const SimConfig& c) { return std::to_string(c.*m); },
                        [m](SimConfig& c, const std::string& s) { return parse_uint_field(s, c.*m); }};
    };
    static const std::vector<FieldDef> fields = [&] {
        std::vector<FieldDef> f;
        auto add = [&f](const char* name, FieldDef fd) {
            fd.name = name;
            f.push_back(std::move(fd));
        };
        add("num_vehicles", u32(&SimConfig::num_vehicles));
        add("speed_min", d(&SimConfig::speed_min));
        add("speed_max", d(&SimConfig::speed_max));
        add("scenario_width", d(&SimConfig::scenario_width));
        add("scenario_height", d(&SimConfig::scenario_height));
        add("vehicle_length", d(&SimConfig::vehicle_length));
        add("green_crossing_target", u32(&SimConfig::green_crossing_target));
        add("signal_spacing", d(&SimConfig::signal_spacing));
        add("normal_packet_bytes", u32(&SimConfig::normal_packet_bytes));
        add("warning_packet_bytes", u32(&SimConfig::warning_packet_bytes));
        add("duration", d(&SimConfig::duration));
        add("sensor_range", d(&SimConfig::sensor_range));
        add("vehicle_range", d(&SimConfig::vehicle_range));
        add("data_rate", {nullptr,
                          [](const SimConfig& c) { return std::to_string(c.data_rate); },
                          [](SimConfig& c, const std::string& s) { return parse_uint_field(s, c.data_rate); }});
        add("beacon_period", d(&SimConfig::beacon_period));
        add("warning_repeat_period", d(&SimConfig::warning_repeat_period));
        add("mobility_dt", d(&SimConfig::mobility_dt));
        add("seed", {nullptr,
                     [](const SimConfig& c) { return std::to_string(c.seed); },
                     [](SimConfig& c, const std::string& s) { return parse_u64(s, c.seed); }});
        add("mode", {nullptr,
                     [](const SimConfig& c) { return std::string(to_string(c.mode)); },
                     [](SimConfig& c, const std::string& s) {
                         if (s == "protocol") c.mode = RunMode::protocol;
                         else if (s == "baseline") c.mode = RunMode::baseline;
                         else return false;
                         return true;
                     }});
        add("lane_width", d(&SimConfig::lane_width));
        add("stop_line_setback", d(&SimConfig::stop_line_setback));
        add("reaction_time", d(&SimConfig::reaction_time));
        add("accel_max", d(&SimConfig::accel_max));
        add("brake_max", d(&SimConfig::brake_max));
        add("min_gap", d(&SimConfig::min_gap));
        add("slot_time", d(&SimConfig::slot_time));
        add("contention_window", u32(&SimConfig::contention_window));
        add("mac_header_bytes", u32(&SimConfig::mac_header_bytes));
        add("phy_overhead", d(&SimConfig::phy_overhead));
        add("p_loss", d(&SimConfig::p_loss));
        add("wired_link_delay", d(&SimConfig::wired_link_delay));
        add("report_period", d(&SimConfig::report_period));
        add("blockage_confirm_time", d(&SimConfig::blockage_confirm_time));
        add("warning_expiry", d(&SimConfig::warning_expiry));
        add("decision_zone", d(&SimConfig::decision_zone));
        add("green_duration", d(&SimConfig::green_duration));
        add("yellow_duration", d(&SimConfig::yellow_duration));
        add("all_red_duration", d(&SimConfig::all_red_duration));
        add("green_max_duration", d(&SimConfig::green_max_duration));
        add("tcu_mode", {nullptr,
                         [](const SimConfig& c) { return std::string(to_string(c.tcu_mode)); },
                         [](SimConfig& c, const std::string& s) {
                             if (s == "fixed") c.tcu_mode = TcuMode::fixed;
                             else if (s == "adaptive") c.tcu_mode = TcuMode::adaptive;
                             else return false;
                             return true;
                         }});
        add("block_exit", {nullptr,
                           [](const SimConfig& c) { return std::string(to_string(c.block_exit)); },
                           [](SimConfig& c, const std::string& s) {
                               if (s == "none") c.block_exit = BlockExit::none;
                               else if (s == "N") c.block_exit = BlockExit::N;
                               else if (s == "S") c.block_exit = BlockExit::S;
                               else if (s == "E") c.block_exit = BlockExit::E;
                               else if (s == "W") c.block_exit = BlockExit::W;
                               else return false;
                               return true;
                           }});
        add("block_start", d(&SimConfig::block_start));
        add("block_end", d(&SimConfig::block_end));
        add("carrier_freq_ghz", d(&SimConfig::carrier_freq_ghz));
        add("band_mhz", d(&SimConfig::band_mhz));
        return f;
    }();
    return fields;
}

inline const FieldDef* find_field(const std::string& name) {
    for (const auto& f : config_fields())
        if (name == f.name) return &f;
    return nullptr;
}

} // namespace detail

inline bool is_config_key(const std::string& name) {
    return detail::find_field(name) != nullptr;
}

/// Set one field from its textual value; false when the key is unknown or
/// the value does not parse.
inline bool set_config_field(SimConfig& cfg, const std::string& key, const std::string& value) {
    const auto* f = detail::find_field(key);
    return f != nullptr && f->parse(cfg, value);
}

/// The line-oriented `key = value` form of a config; parses back exactly.
inline std::string render_config(const SimConfig& cfg) {
    std::string out;
    for (const auto& f : detail::config_fields()) {
        out += f.name;
        out += " = ";
        out += f.render(cfg);
        out += "\n";
    }
    return out;
}

struct ParseIssue {
    int line = 0;  // 0 for whole-config problems
    std::string message;
};

struct ParseResult {
    std::optional<SimConfig> config;
    std::vector<ParseIssue> issues;

    bool ok() const { return config.has_value() && issues.empty(); }
};

/// Parse `key = value` lines over the defaults; `#` starts a comment.
/// Unknown keys, bad values, duplicates, and violated invariants are all
/// reported, each once.
inline ParseResult parse_config(const std::string& text) {
    ParseResult res;
    SimConfig cfg;
    std::vector<std::string> seen;

    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        const std::string line = detail::trim(raw);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            res.issues.push_back({lineno, "expected 'key = value'"});
            continue;
        }
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        const auto* field = detail::find_field(key);
        if (field == nullptr) {
            res.issues.push_back({lineno, "unknown key '" + key + "'"});
            continue;
        }
        if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
            res.issues.push_back({lineno, "duplicate key '" + key + "'"});
            continue;
        }
        seen.push_back(key);
        if (!field->parse(cfg, value))
            res.issues.push_back({lineno, "bad value '" + value + "' for key '" + key + "'"});
    }

    for (const auto& err : validate_config(cfg))
        res.issues.push_back({0, "invalid " + err.field + ": " + err.reason});
    if (res.issues.empty()) res.config = cfg;
    return res;
}

} // namespace vanetsim
