#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "vanetsim/engine.hpp"
#include "vanetsim/errors.hpp"
#include "vanetsim/rng.hpp"

namespace vanetsim {

inline std::string fmt_fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

inline std::string opt_fixed(const std::optional<double>& v, int decimals) {
    return v ? fmt_fixed(*v, decimals) : std::string();
}

inline constexpr const char* kMetricsCsvHeader =
    "run_id,seed,mode,num_vehicles,data_rate,packet_bytes,pdr_pct,e2e_delay_ms,throughput_bps,"
    "loss_count,loss_bytes,blind_count,warn_delay_mean_ms,warn_delay_p95_ms,box_violations,"
    "travel_time_s,green_crossings";

/// The config-echo columns of a metrics row; small enough to survive a
/// ledger dump round trip without the full config.
struct RowMeta {
    std::uint32_t run_id = 0;
    std::uint64_t seed = 0;
    std::string mode = "protocol";
    std::uint32_t num_vehicles = 0;
    std::uint64_t data_rate = 0;
    std::uint32_t packet_bytes = 0;
    SimTime duration_ns = 0;
};

inline RowMeta row_meta(std::uint32_t run_id, const SimResult& res) {
    return {run_id,        res.seed,
            to_string(res.config.mode), res.config.num_vehicles,
            res.config.data_rate,       res.config.normal_packet_bytes,
            seconds_to_ns(res.config.duration)};
}

inline std::string metrics_csv_row(const RowMeta& meta, const MetricsReport& m) {
    std::string row;
    row += std::to_string(meta.run_id);
    row += ',' + std::to_string(meta.seed);
    row += ',' + meta.mode;
    row += ',' + std::to_string(meta.num_vehicles);
    row += ',' + std::to_string(meta.data_rate);
    row += ',' + std::to_string(meta.packet_bytes);
    row += ',' + opt_fixed(m.pdr_pct, 6);
    row += ',' + opt_fixed(m.e2e_delay_ms, 6);
    row += ',' + fmt_fixed(m.throughput_bps, 3);
    row += ',' + std::to_string(m.loss_count);
    row += ',' + std::to_string(m.loss_bytes);
    row += ',' + std::to_string(m.blind_count);
    row += ',' + opt_fixed(m.warn_delay ? std::optional<double>(m.warn_delay->mean_ms) : std::nullopt, 6);
    row += ',' + opt_fixed(m.warn_delay ? std::optional<double>(m.warn_delay->p95_ms) : std::nullopt, 6);
    row += ',' + std::to_string(m.box_violations);
    row += ',' + (m.travel_time_s ? fmt_fixed(*m.travel_time_s, 3) : std::string());
    row += ',' + std::to_string(m.green_crossings);
    return row;
}

// --- human-readable summary ------------------------------------------------

inline std::string summary_block(const RowMeta& meta, const SimResult& res) {
    const auto& m = res.metrics;
    std::ostringstream out;
    out << "run " << meta.run_id << "  seed=" << meta.seed << " mode=" << meta.mode
        << " vehicles=" << meta.num_vehicles << " data_rate=" << meta.data_rate
        << " packet_bytes=" << meta.packet_bytes << "\n";
    auto line = [&out](const std::string& k, const std::string& v) {
        out << "  " << k;
        for (std::size_t i = k.size(); i < 14; ++i) out << ' ';
        out << "= " << v << "\n";
    };
    auto pct = [](const std::optional<double>& v) { return v ? fmt_fixed(*v, 3) + " %" : std::string("n/a"); };
    line("pdr", pct(m.pdr_pct) + "  (beacon " + pct(m.per_kind[0].pdr_pct) + ", warning " +
                    pct(m.per_kind[1].pdr_pct) + ")");
    line("e2e delay", m.e2e_delay_ms ? fmt_fixed(*m.e2e_delay_ms, 3) + " ms" : "n/a");
    line("throughput", fmt_fixed(m.throughput_bps, 1) + " bit/s");
    line("loss", std::to_string(m.loss_count) + " pairs / " + std::to_string(m.loss_bytes) + " bytes");
    line("blind", std::to_string(m.blind_count));
    line("warn delay",
         m.warn_delay ? "mean " + fmt_fixed(m.warn_delay->mean_ms, 3) + " ms, p95 " +
                            fmt_fixed(m.warn_delay->p95_ms, 3) + " ms, max " +
                            fmt_fixed(m.warn_delay->max_ms, 3) + " ms"
                      : "n/a");
    line("violations", std::to_string(m.box_violations));
    line("travel time", m.travel_time_s ? fmt_fixed(*m.travel_time_s, 2) + " s" : "n/a");
    std::string greens = std::to_string(m.green_crossings);
    if (m.green_phase_count > 0)
        greens += " (" + fmt_fixed(static_cast<double>(m.green_crossings) / m.green_phase_count, 2) +
                  " per green phase, " + std::to_string(m.green_phase_count) + " phases)";
    line("green xings", greens);
    line("episodes", std::to_string(res.episodes.size()));
    line("wall time", fmt_fixed(res.wall_time_s, 2) + " s");
    return out.str();
}

// --- ledger dump -------------------------------------------------------------

namespace detail {
inline std::string opt_ns(const std::optional<SimTime>& t) {
    return t ? std::to_string(*t) : std::string("-");
}
} // namespace detail

/// Frame and pair rows plus the meta header; formats documented in the README
/// and stable across runs.
inline std::string packets_csv(const RowMeta& meta, const SimResult& res) {
    std::string out;
    out += "# run_id=" + std::to_string(meta.run_id) + "\n";
    out += "# seed=" + std::to_string(meta.seed) + "\n";
    out += "# mode=" + meta.mode + "\n";
    out += "# num_vehicles=" + std::to_string(meta.num_vehicles) + "\n";
    out += "# data_rate=" + std::to_string(meta.data_rate) + "\n";
    out += "# packet_bytes=" + std::to_string(meta.packet_bytes) + "\n";
    out += "# duration_ns=" + std::to_string(meta.duration_ns) + "\n";
    out += "# columns frame: seq,kind,size,src,created_ns,t_start_ns,t_end_ns,attempts,episode,wired\n";
    out += "# columns pair: seq,receiver,outcome,delivered_ns\n";
    for (const auto& fr : res.ledger.frames) {
        out += "frame," + std::to_string(fr.seq) + ',' + to_string(fr.kind) + ',' +
               std::to_string(fr.size_bytes) + ',' + std::to_string(fr.src) + ',' +
               std::to_string(fr.created_at) + ',' + detail::opt_ns(fr.t_start) + ',' +
               detail::opt_ns(fr.t_end) + ',' + std::to_string(fr.attempts) + ',' +
               (fr.episode ? std::to_string(*fr.episode) : std::string("-")) + ',' +
               (fr.wired ? "1" : "0") + "\n";
    }
    for (const auto& pr : res.ledger.pairs) {
        out += "pair," + std::to_string(pr.seq) + ',' + std::to_string(pr.receiver) + ',' +
               to_string(pr.outcome) + ',' + detail::opt_ns(pr.delivered_at) + "\n";
    }
    for (const auto& [seq, rcv] : res.ledger.pending_pair_records)
        out += "pair," + std::to_string(seq) + ',' + std::to_string(rcv) + ",pending,-\n";
    return out;
}

inline std::string mobility_csv(const SimResult& res) {
    std::string out = "# columns crossing: vehicle,t_ns,approach,color,warned\n";
    out += "# columns zone: vehicle,t_ns,approach,warned\n";
    out += "# columns journey: vehicle,spawn_ns,exit_ns\n";
    out += "# columns violation: vehicle,t_ns,kind\n";
    for (const auto& c : res.crossing_log)
        out += "crossing," + std::to_string(c.vehicle) + ',' + std::to_string(c.t) + ',' +
               to_string(c.approach) + ',' + to_string(c.color) + ',' + (c.warned ? "1" : "0") + "\n";
    for (const auto& z : res.zone_log)
        out += "zone," + std::to_string(z.vehicle) + ',' + std::to_string(z.t) + ',' +
               to_string(z.approach) + ',' + (z.warned ? "1" : "0") + "\n";
    for (const auto& j : res.journey_log)
        out += "journey," + std::to_string(j.vehicle) + ',' + std::to_string(j.spawn_time) + ',' +
               std::to_string(j.exit_time) + "\n";
    for (const auto& v : res.violation_log)
        out += "violation," + std::to_string(v.vehicle) + ',' + std::to_string(v.t) + ',' +
               (v.kind == ViolationKind::stationary_in_box ? "stationary_in_box" : "warned_entry") + "\n";
    return out;
}

inline std::string episodes_csv(const SimResult& res) {
    std::string out = "# columns: id,approach,onset_ns,first_issue_ns,cleared_ns,warnings,clears\n";
    for (const auto& ep : res.episodes)
        out += std::to_string(ep.id) + ',' + to_string(ep.approach) + ',' + std::to_string(ep.onset) +
               ',' + detail::opt_ns(ep.first_issue) + ',' + detail::opt_ns(ep.cleared_at) + ',' +
               std::to_string(ep.warnings_emitted) + ',' + std::to_string(ep.clears_emitted) + "\n";
    return out;
}

inline std::string phases_csv(const SimResult& res) {
    std::string out = "# columns: t_ns,active,stage\n";
    for (const auto& ph : res.phase_log)
        out += std::to_string(ph.t) + ',' + to_string(ph.active) + ',' + to_string(ph.stage) + "\n";
    return out;
}

inline std::string events_trace(const SimResult& res) {
    std::string out;
    for (const auto& line : res.trace) out += line + "\n";
    return out;
}

// --- digest ------------------------------------------------------------------

/// Canonical fingerprint of everything the determinism contract covers.
inline std::string ledger_digest(const SimResult& res) {
    std::string blob;
    for (const auto& k : res.ledger.by_kind) {
        for (std::uint64_t v : {k.created_frames, k.sent_frames, k.queued_frames, k.intended_pairs,
                                k.delivered_pairs, k.collision_pairs, k.random_loss_pairs,
                                k.pending_pairs, k.delivered_bytes, k.dropped_bytes,
                                static_cast<std::uint64_t>(k.delay_sum_ns)})
            blob += std::to_string(v) + ";";
    }
    for (auto v : res.ledger.rx_by_vehicle) blob += std::to_string(v) + ";";
    for (const auto& ep_map : res.ledger.episode_first_rx)
        for (const auto& [veh, t] : ep_map) blob += std::to_string(veh) + ":" + std::to_string(t) + ";";
    for (const auto& c : res.crossing_log)
        blob += "c" + std::to_string(c.vehicle) + "," + std::to_string(c.t) + "," + to_string(c.color) + ";";
    for (const auto& z : res.zone_log)
        blob += "z" + std::to_string(z.vehicle) + "," + std::to_string(z.t) + "," + (z.warned ? "w" : "u") + ";";
    for (const auto& j : res.journey_log)
        blob += "j" + std::to_string(j.vehicle) + "," + std::to_string(j.spawn_time) + "," +
                std::to_string(j.exit_time) + ";";
    for (const auto& v : res.violation_log)
        blob += "v" + std::to_string(v.vehicle) + "," + std::to_string(v.t) + ";";
    for (const auto& ph : res.phase_log)
        blob += "p" + std::to_string(ph.t) + "," + to_string(ph.active) + "," + to_string(ph.stage) + ";";
    for (const auto& ep : res.episodes)
        blob += "e" + std::to_string(ep.id) + "," + std::to_string(ep.onset) + "," +
                detail::opt_ns(ep.cleared_at) + "," + std::to_string(ep.warnings_emitted) + ";";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(blob)));
    return buf;
}

// --- file I/O ----------------------------------------------------------------

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw IoError("write failed for " + path.string());
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// --- recompute from a dump -----------------------------------------------------

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

inline std::optional<SimTime> parse_opt_ns(const std::string& s) {
    if (s == "-" || s.empty()) return std::nullopt;
    return static_cast<SimTime>(std::stoll(s));
}

inline Direction parse_direction(const std::string& s) {
    if (s == "N") return Direction::N;
    if (s == "S") return Direction::S;
    if (s == "E") return Direction::E;
    return Direction::W;
}

inline PacketKind parse_kind(const std::string& s) {
    if (s == "beacon") return PacketKind::beacon;
    if (s == "warning") return PacketKind::warning;
    return PacketKind::report;
}

inline SignalColor parse_color(const std::string& s) {
    if (s == "green") return SignalColor::green;
    if (s == "yellow") return SignalColor::yellow;
    return SignalColor::red;
}

} // namespace detail

struct RecomputeResult {
    RowMeta meta;
    MetricsReport metrics;
};

/// Rebuild the MetricsReport from a packets.csv dump and its sibling
/// mobility/episodes/phases files; byte-identical to the original row.
inline RecomputeResult recompute_from_dump(const std::filesystem::path& packets_path) {
    const auto dir = packets_path.parent_path();
    RecomputeResult rr;

    struct FrameInfo {
        PacketKind kind;
        std::uint32_t size = 0;
        SimTime created = 0;
        std::optional<std::uint32_t> episode;
        bool wired = false;
        bool sent = false;
    };
    std::map<PacketSeq, FrameInfo> frames;
    PacketLedger led;

    std::istringstream pk(read_text_file(packets_path));
    std::string line;
    while (std::getline(pk, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = line.substr(2, eq - 2);
            const std::string val = line.substr(eq + 1);
            if (key == "run_id") rr.meta.run_id = static_cast<std::uint32_t>(std::stoul(val));
            else if (key == "seed") rr.meta.seed = std::stoull(val);
            else if (key == "mode") rr.meta.mode = val;
            else if (key == "num_vehicles") rr.meta.num_vehicles = static_cast<std::uint32_t>(std::stoul(val));
            else if (key == "data_rate") rr.meta.data_rate = std::stoull(val);
            else if (key == "packet_bytes") rr.meta.packet_bytes = static_cast<std::uint32_t>(std::stoul(val));
            else if (key == "duration_ns") rr.meta.duration_ns = std::stoll(val);
            continue;
        }
        const auto f = detail::split_csv(line);
        if (f[0] == "frame") {
            FrameInfo fi;
            const PacketSeq seq = std::stoull(f[1]);
            fi.kind = detail::parse_kind(f[2]);
            fi.size = static_cast<std::uint32_t>(std::stoul(f[3]));
            fi.created = std::stoll(f[5]);
            fi.sent = f[6] != "-";
            if (f[9] != "-") fi.episode = static_cast<std::uint32_t>(std::stoul(f[9]));
            fi.wired = f[10] == "1";
            frames.emplace(seq, fi);
        }
    }

    led.rx_by_vehicle.assign(rr.meta.num_vehicles, 0);
    for (const auto& [seq, fi] : frames) {
        (void)seq;
        auto& kt = led.kind(fi.kind);
        kt.created_frames += 1;
        if (fi.sent) kt.sent_frames += 1;
        else kt.queued_frames += 1;
    }

    // Episodes before pairs: the first-rx table is per episode.
    std::vector<EpisodeRecord> episodes;
    {
        std::istringstream ep_in(read_text_file(dir / "episodes.csv"));
        while (std::getline(ep_in, line)) {
            if (line.empty() || line[0] == '#') continue;
            const auto f = detail::split_csv(line);
            EpisodeRecord ep;
            ep.id = static_cast<std::uint32_t>(std::stoul(f[0]));
            ep.approach = detail::parse_direction(f[1]);
            ep.onset = std::stoll(f[2]);
            ep.first_issue = detail::parse_opt_ns(f[3]);
            ep.cleared_at = detail::parse_opt_ns(f[4]);
            ep.warnings_emitted = static_cast<std::uint32_t>(std::stoul(f[5]));
            ep.clears_emitted = static_cast<std::uint32_t>(std::stoul(f[6]));
            episodes.push_back(ep);
        }
    }
    led.episode_first_rx.resize(episodes.size());

    std::istringstream pk2(read_text_file(packets_path));
    while (std::getline(pk2, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto f = detail::split_csv(line);
        if (f[0] != "pair") continue;
        const PacketSeq seq = std::stoull(f[1]);
        const NodeId rcv = static_cast<NodeId>(std::stol(f[2]));
        const auto& fi = frames.at(seq);
        auto& kt = led.kind(fi.kind);
        if (f[3] == "delivered") {
            const SimTime at = std::stoll(f[4]);
            kt.delivered_pairs += 1;
            kt.delivered_bytes += fi.size;
            kt.delay_sum_ns += at - fi.created;
            if (rcv >= 0 && rcv < static_cast<NodeId>(rr.meta.num_vehicles))
                led.rx_by_vehicle[static_cast<std::size_t>(rcv)] += 1;
            if (fi.episode && rcv < static_cast<NodeId>(rr.meta.num_vehicles)) {
                auto& m = led.episode_first_rx[*fi.episode];
                auto it = m.find(rcv);
                if (it == m.end() || at < it->second) m[rcv] = at;
            }
        } else if (f[3] == "collision") {
            kt.collision_pairs += 1;
            kt.dropped_bytes += fi.size;
        } else if (f[3] == "random_loss") {
            kt.random_loss_pairs += 1;
            kt.dropped_bytes += fi.size;
        } else {  // pending
            kt.pending_pairs += 1;
        }
        kt.intended_pairs += 1;
    }

    std::vector<CrossingEvent> crossings;
    std::vector<ZoneEntryEvent> zones;
    std::vector<JourneyRecord> journeys;
    std::vector<BoxViolationEvent> violations;
    {
        std::istringstream mo(read_text_file(dir / "mobility.csv"));
        while (std::getline(mo, line)) {
            if (line.empty() || line[0] == '#') continue;
            const auto f = detail::split_csv(line);
            if (f[0] == "crossing") {
                crossings.push_back({static_cast<NodeId>(std::stol(f[1])), std::stoll(f[2]),
                                     detail::parse_direction(f[3]), detail::parse_color(f[4]),
                                     f[5] == "1"});
            } else if (f[0] == "zone") {
                zones.push_back({static_cast<NodeId>(std::stol(f[1])), std::stoll(f[2]),
                                 detail::parse_direction(f[3]), f[4] == "1"});
            } else if (f[0] == "journey") {
                journeys.push_back({static_cast<NodeId>(std::stol(f[1])), std::stoll(f[2]),
                                    std::stoll(f[3])});
            } else if (f[0] == "violation") {
                violations.push_back({static_cast<NodeId>(std::stol(f[1])), std::stoll(f[2]),
                                      f[3] == "stationary_in_box" ? ViolationKind::stationary_in_box
                                                                  : ViolationKind::warned_entry});
            }
        }
    }

    std::vector<PhaseRecord> phases;
    {
        std::istringstream ph(read_text_file(dir / "phases.csv"));
        while (std::getline(ph, line)) {
            if (line.empty() || line[0] == '#') continue;
            const auto f = detail::split_csv(line);
            PhaseRecord rec;
            rec.t = std::stoll(f[0]);
            rec.active = f[1] == "NS_green" ? ActiveAxis::NS_green : ActiveAxis::EW_green;
            rec.stage = f[2] == "green"    ? SignalStage::green
                        : f[2] == "yellow" ? SignalStage::yellow
                                           : SignalStage::all_red;
            phases.push_back(rec);
        }
    }

    rr.metrics = compute_metrics(led, crossings, zones, journeys, violations, episodes, phases,
                                 rr.meta.duration_ns);
    return rr;
}

} // namespace vanetsim
