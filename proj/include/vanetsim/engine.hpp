#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vanetsim/config.hpp"
#include "vanetsim/errors.hpp"
#include "vanetsim/event_queue.hpp"
#include "vanetsim/ledger.hpp"
#include "vanetsim/metrics.hpp"
#include "vanetsim/mobility.hpp"
#include "vanetsim/packet.hpp"
#include "vanetsim/protocol.hpp"
#include "vanetsim/radio.hpp"
#include "vanetsim/road_network.hpp"

namespace vanetsim {

/// Hand-built micro scenarios: explicit vehicle placements, fixed beacon
/// phases, and an RSU subset. Used by oracle tests; normal runs spawn the
/// fleet from the config.
struct ScenarioFixture {
    std::vector<VehicleState> vehicles;
    std::vector<double> beacon_phase_s;  // per vehicle; empty -> seeded jitter
    std::optional<std::vector<Direction>> rsus;
};

struct RunOptions {
    bool keep_records = false;     // retain per-frame/per-pair ledger rows
    bool keep_trace = false;       // retain the event trace
    bool check_invariants = false; // per-tick overlap and bounds checks
    std::optional<ScenarioFixture> fixture;
};

struct SimResult {
    SimConfig config;  // echo of the validated input
    std::uint64_t seed = 0;
    MetricsReport metrics;
    PacketLedger ledger;
    std::vector<PhaseRecord> phase_log;
    std::vector<CrossingEvent> crossing_log;
    std::vector<ZoneEntryEvent> zone_log;
    std::vector<JourneyRecord> journey_log;
    std::vector<BoxViolationEvent> violation_log;
    std::vector<EpisodeRecord> episodes;
    std::vector<std::string> trace;
    double wall_time_s = 0.0;
};

class Engine {
public:
    Engine(const SimConfig& cfg, RunOptions opt = {}) : cfg_(cfg), opt_(std::move(opt)) {}

    SimResult run() {
        const auto wall_start = std::chrono::steady_clock::now();
        if (auto errs = validate_config(cfg_); !errs.empty()) {
            std::string msg = "config invalid:";
            for (const auto& e : errs) msg += " [" + e.field + ": " + e.reason + "]";
            throw RuntimeFault(msg);
        }
        setup();

        while (!queue_.empty() && queue_.peek().time <= duration_ns_) {
            const Event ev = queue_.pop();
            if (ev.time > duration_ns_) throw RuntimeFault("event beyond sim end");
            dispatch(ev);
        }
        finalize();

        SimResult res;
        res.config = cfg_;
        res.seed = cfg_.seed;
        res.ledger = std::move(ledger_);
        res.phase_log = std::move(phase_log_);
        res.crossing_log = std::move(crossing_log_);
        res.zone_log = std::move(zone_log_);
        res.journey_log = std::move(journey_log_);
        res.violation_log = std::move(violation_log_);
        res.episodes = std::move(episodes_);
        res.trace = std::move(trace_);
        res.metrics = compute_metrics(res.ledger, res.crossing_log, res.zone_log, res.journey_log,
                                      res.violation_log, res.episodes, res.phase_log, duration_ns_);
        res.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
        return res;
    }

private:
    // --- setup -----------------------------------------------------------

    void setup() {
        duration_ns_ = seconds_to_ns(cfg_.duration);
        dt_ns_ = seconds_to_ns(cfg_.mobility_dt);
        net_ = build_cross_network(cfg_);

        std::vector<VehicleState> fleet;
        if (opt_.fixture && !opt_.fixture->vehicles.empty()) {
            fleet = opt_.fixture->vehicles;
            for (std::size_t i = 0; i < fleet.size(); ++i) {
                if (fleet[i].id != static_cast<NodeId>(i))
                    throw RuntimeFault("fixture vehicle ids must be 0..n-1 in order");
                if (fleet[i].length <= 0.0) fleet[i].length = cfg_.vehicle_length;
            }
        } else {
            auto rng = RngStream::labeled(cfg_.seed, "spawn");
            fleet = spawn_fleet(cfg_, net_, rng);
        }
        num_vehicles_ = static_cast<std::uint32_t>(fleet.size());
        world_.emplace(cfg_, net_, std::move(fleet), cfg_.seed);

        std::vector<Direction> rsu_dirs{Direction::N, Direction::S, Direction::E, Direction::W};
        if (opt_.fixture && opt_.fixture->rsus) rsu_dirs = *opt_.fixture->rsus;
        for (std::size_t i = 0; i < rsu_dirs.size(); ++i) {
            RsuState rsu;
            rsu.node_id = static_cast<NodeId>(num_vehicles_ + i);
            rsu.approach = rsu_dirs[i];
            rsu.position = net_.rsu_positions[static_cast<std::size_t>(rsu_dirs[i])];
            rsus_.push_back(rsu);
        }

        directory_.resize(num_vehicles_ + rsus_.size());
        for (std::uint32_t v = 0; v < num_vehicles_; ++v)
            directory_[v] = {static_cast<NodeId>(v), world_->position(static_cast<NodeId>(v)),
                             cfg_.vehicle_range, true, !world_->vehicles()[v].off_road};
        for (std::size_t i = 0; i < rsus_.size(); ++i)
            directory_[num_vehicles_ + i] = {rsus_[i].node_id, rsus_[i].position, cfg_.sensor_range,
                                             false, true};

        channel_.emplace(cfg_, &directory_, &arena_, cfg_.seed);
        ledger_.rx_by_vehicle.assign(num_vehicles_, 0);
        ledger_.keep_records = opt_.keep_records;

        tcu_.mode = cfg_.tcu_mode;
        tcu_.phase = {ActiveAxis::NS_green, SignalStage::green, 0, seconds_to_ns(cfg_.green_duration), 0};
        log_phase(0);

        // Tick grid. Mobility advances to t at each k*dt; protocol follows.
        for (SimTime t = dt_ns_; t <= duration_ns_; t += dt_ns_)
            queue_.schedule({t, kMobilityNode, 0, 0, EventKind::mobility_tick});
        for (SimTime t = 0; t <= duration_ns_; t += dt_ns_)
            queue_.schedule({t, kGlobalNode, 0, 0, EventKind::protocol_tick});

        // Per-vehicle beacon timers with jittered phase.
        auto jitter_rng = RngStream::labeled(cfg_.seed, "jitter");
        const SimTime period = seconds_to_ns(cfg_.beacon_period);
        for (std::uint32_t v = 0; v < num_vehicles_; ++v) {
            SimTime phase;
            if (opt_.fixture && v < opt_.fixture->beacon_phase_s.size()) {
                phase = seconds_to_ns(opt_.fixture->beacon_phase_s[v]);
            } else {
                phase = static_cast<SimTime>(jitter_rng.uniform01() * static_cast<double>(period));
            }
            if (phase <= duration_ns_)
                queue_.schedule({phase, static_cast<NodeId>(v), 0, 0, EventKind::protocol_tick});
        }

        if (cfg_.block_exit != BlockExit::none) {
            const SimTime t0 = seconds_to_ns(cfg_.block_start);
            const SimTime t1 = seconds_to_ns(cfg_.block_end);
            if (t0 <= duration_ns_) queue_.schedule({t0, kGlobalNode, 0, 0, EventKind::blockage_inject});
            if (t1 <= duration_ns_) queue_.schedule({t1, kGlobalNode, 0, 0, EventKind::blockage_clear});
        }
        queue_.schedule({duration_ns_, kSimEndNode, 0, 0, EventKind::sim_end});
    }

    // --- dispatch --------------------------------------------------------

    void dispatch(const Event& ev) {
        switch (ev.kind) {
            case EventKind::mobility_tick: on_mobility(ev.time); break;
            case EventKind::protocol_tick:
                if (ev.node == kGlobalNode)
                    on_protocol(ev.time);
                else
                    on_beacon_timer(static_cast<NodeId>(ev.node), ev.time);
                break;
            case EventKind::tx_start: on_tx_start(ev.node, ev.time); break;
            case EventKind::tx_end: on_tx_end(ev.node, ev.time); break;
            case EventKind::wired_delivery: on_wired(ev.seq, ev.time); break;
            case EventKind::blockage_inject:
                inject_armed_ = true;
                try_inject(ev.time);
                break;
            case EventKind::blockage_clear:
                inject_armed_ = false;
                if (injected_vehicle_ >= 0) {
                    world_->release_halt(injected_vehicle_);
                    trace(ev.time, "release vehicle=" + std::to_string(injected_vehicle_));
                    injected_vehicle_ = -1;
                }
                break;
            case EventKind::sim_end: trace(ev.time, "sim_end"); break;
        }
    }

    void on_mobility(SimTime t) {
        std::array<SignalColor, 4> colors{};
        for (int d = 0; d < 4; ++d)
            colors[static_cast<std::size_t>(d)] = approach_color(tcu_.phase, static_cast<Direction>(d));

        auto ev = world_->step_all(colors, t, cfg_.mode == RunMode::protocol, opt_.check_invariants);
        append(crossing_log_, ev.crossings);
        append(zone_log_, ev.zone_entries);
        append(journey_log_, ev.journeys);
        append(violation_log_, ev.violations);

        for (std::uint32_t v = 0; v < num_vehicles_; ++v) {
            directory_[v].pos = world_->position(static_cast<NodeId>(v));
            directory_[v].active = !world_->vehicles()[v].off_road;
        }
        if (inject_armed_ && injected_vehicle_ < 0) try_inject(t);
        if (opt_.check_invariants) check_vehicle_invariants(t);
    }

    void on_protocol(SimTime t) {
        for (auto& rsu : rsus_) {
            const bool was_blocked = rsu.box_blocked_since.has_value();
            rsu_sense(rsu, *world_, cfg_, t);
            if (!was_blocked && rsu.box_blocked_since) {
                rsu.episode_id = static_cast<std::uint32_t>(episodes_.size());
                EpisodeRecord ep;
                ep.id = rsu.episode_id;
                ep.approach = rsu.approach;
                ep.onset = t;
                episodes_.push_back(ep);
                ledger_.episode_first_rx.emplace_back();
                trace(t, "blockage_onset approach=" + std::string(to_string(rsu.approach)) +
                             " episode=" + std::to_string(ep.id));
            }
            if (was_blocked && !rsu.box_blocked_since) {
                episodes_[rsu.episode_id].cleared_at = t;
                trace(t, "blockage_clear approach=" + std::string(to_string(rsu.approach)) +
                             " episode=" + std::to_string(rsu.episode_id));
            }
        }

        for (auto& rsu : rsus_) {
            const auto act = rsu_tick(rsu, t, cfg_, cfg_.mode == RunMode::protocol);
            if (act.send_warning || act.send_clear) {
                auto& ep = episodes_[rsu.episode_id];
                WarningPayload wp;
                wp.blocked = act.send_warning;
                wp.affected_approach = rsu.approach;
                wp.issued_at = t;
                wp.expiry = t + seconds_to_ns(cfg_.warning_expiry);
                wp.episode = rsu.episode_id;
                send_radio(make_packet(PacketKind::warning, cfg_.warning_packet_bytes, rsu.node_id, t, wp),
                           t);
                if (act.send_warning) {
                    ep.warnings_emitted += 1;
                    if (!ep.first_issue) ep.first_issue = t;
                } else {
                    ep.clears_emitted += 1;
                }
            }
            if (act.send_report) {
                ReportPayload rp{rsu.approach, rsu_approach_count(rsu, *world_)};
                Packet pkt = make_packet(PacketKind::report, cfg_.normal_packet_bytes, rsu.node_id, t, rp);
                auto& kt = ledger_.kind(PacketKind::report);
                kt.created_frames += 1;
                kt.sent_frames += 1;
                kt.intended_pairs += 1;
                wired_outstanding_ += 1;
                if (ledger_.keep_records) {
                    auto& fr = ledger_.frames.emplace_back();
                    fr.seq = pkt.seq;
                    fr.kind = pkt.kind;
                    fr.size_bytes = pkt.size_bytes;
                    fr.src = pkt.src;
                    fr.created_at = t;
                    fr.t_start = t;
                    fr.wired = true;
                }
                trace(t, "wired_send seq=" + std::to_string(pkt.seq) +
                             " src=" + std::to_string(rsu.node_id) +
                             " count=" + std::to_string(rp.detected_on_approach));
                queue_.schedule({t + seconds_to_ns(cfg_.wired_link_delay), kGlobalNode, pkt.seq, 0,
                                 EventKind::wired_delivery});
            }
        }

        if (tcu_tick(tcu_, t, cfg_)) log_phase(t);
    }

    void on_beacon_timer(NodeId v, SimTime t) {
        const auto& veh = world_->vehicles()[static_cast<std::size_t>(v)];
        if (!veh.off_road) {
            BeaconPayload bp{v, world_->position(v), veh.v, veh.heading};
            send_radio(make_packet(PacketKind::beacon, cfg_.normal_packet_bytes, v, t, bp), t);
        }
        const SimTime next = t + seconds_to_ns(cfg_.beacon_period);
        if (next <= duration_ns_) queue_.schedule({next, v, 0, 0, EventKind::protocol_tick});
    }

    void on_tx_start(NodeId node, SimTime t) {
        const auto res = channel_->attempt(node, t);
        if (res.started) {
            auto& kt = ledger_.kind(arena_[res.seq].kind);
            kt.sent_frames += 1;
            if (ledger_.keep_records) {
                auto& fr = frame_record(res.seq);
                fr.t_start = t;
                fr.attempts = res.attempt;
            }
            trace(t, "tx_start seq=" + std::to_string(res.seq) + " kind=" +
                         to_string(arena_[res.seq].kind) + " src=" + std::to_string(node) +
                         " attempt=" + std::to_string(res.attempt));
            queue_.schedule({res.time, node, res.seq, 0, EventKind::tx_end});
        } else {
            queue_.schedule({res.time, node, res.seq, 0, EventKind::tx_start});
        }
    }

    void on_tx_end(NodeId node, SimTime t) {
        auto fin = channel_->finish(node, t);
        const Packet& pkt = arena_[fin.tx.seq];
        auto& kt = ledger_.kind(pkt.kind);
        kt.intended_pairs += fin.tx.intended.size();

        std::string outcomes_str;
        for (const auto& oc : fin.outcomes) {
            switch (oc.outcome) {
                case Outcome::delivered: {
                    kt.delivered_pairs += 1;
                    kt.delivered_bytes += pkt.size_bytes;
                    kt.delay_sum_ns += *oc.delivered_at - pkt.created_at;
                    deliver(oc.receiver, pkt, *oc.delivered_at);
                    break;
                }
                case Outcome::collision: {
                    kt.collision_pairs += 1;
                    kt.dropped_bytes += pkt.size_bytes;
                    break;
                }
                case Outcome::random_loss: {
                    kt.random_loss_pairs += 1;
                    kt.dropped_bytes += pkt.size_bytes;
                    break;
                }
                case Outcome::out_of_range: break;  // not emitted by the channel
            }
            if (ledger_.keep_records) ledger_.pairs.push_back({pkt.seq, oc.receiver, oc.outcome, oc.delivered_at});
            if (opt_.keep_trace) {
                if (!outcomes_str.empty()) outcomes_str += ",";
                outcomes_str += std::to_string(oc.receiver) + ":" + to_string(oc.outcome);
            }
        }
        if (ledger_.keep_records) frame_record(pkt.seq).t_end = t;
        trace(t, "tx_end seq=" + std::to_string(pkt.seq) + " src=" + std::to_string(node) +
                     " rx=" + (outcomes_str.empty() ? "none" : outcomes_str));

        if (fin.next_seq) queue_.schedule({t, node, *fin.next_seq, 0, EventKind::tx_start});
    }

    void deliver(NodeId receiver, const Packet& pkt, SimTime t) {
        if (receiver < static_cast<NodeId>(num_vehicles_)) {
            ledger_.rx_by_vehicle[static_cast<std::size_t>(receiver)] += 1;
            auto& veh = world_->vehicles()[static_cast<std::size_t>(receiver)];
            obu_receive(veh, pkt, t, cfg_.mode == RunMode::protocol);
            if (pkt.kind == PacketKind::warning) {
                const auto& wp = std::get<WarningPayload>(pkt.payload);
                auto& first_rx = ledger_.episode_first_rx[wp.episode];
                if (!first_rx.count(receiver)) first_rx.emplace(receiver, t);
            }
        }
        // RSU receivers only contribute to ledger accounting.
    }

    void on_wired(PacketSeq seq, SimTime t) {
        const Packet& pkt = arena_[seq];
        const auto& rp = std::get<ReportPayload>(pkt.payload);
        tcu_.queue_estimates[static_cast<std::size_t>(rp.approach)] = rp.detected_on_approach;
        auto& kt = ledger_.kind(PacketKind::report);
        kt.delivered_pairs += 1;
        kt.delivered_bytes += pkt.size_bytes;
        kt.delay_sum_ns += t - pkt.created_at;
        wired_outstanding_ -= 1;
        if (ledger_.keep_records) {
            ledger_.pairs.push_back({seq, tcu_node_id(), Outcome::delivered, t});
            frame_record(seq).t_end = t;
        }
        trace(t, "wired_delivery seq=" + std::to_string(seq) + " approach=" +
                     to_string(rp.approach) + " count=" + std::to_string(rp.detected_on_approach));
    }

    // --- helpers ---------------------------------------------------------

    NodeId tcu_node_id() const { return static_cast<NodeId>(num_vehicles_ + rsus_.size()); }

    template <typename T>
    static void append(std::vector<T>& dst, const std::vector<T>& src) {
        dst.insert(dst.end(), src.begin(), src.end());
    }

    template <typename PayloadT>
    Packet make_packet(PacketKind kind, std::uint32_t size, NodeId src, SimTime t, PayloadT payload) {
        Packet pkt;
        pkt.seq = arena_.size();
        pkt.kind = kind;
        pkt.size_bytes = size;
        pkt.src = src;
        pkt.created_at = t;
        pkt.payload = payload;
        arena_.push_back(pkt);
        return pkt;
    }

    void send_radio(const Packet& pkt, SimTime t) {
        auto& kt = ledger_.kind(pkt.kind);
        kt.created_frames += 1;
        if (ledger_.keep_records) {
            auto& fr = ledger_.frames.emplace_back();
            fr.seq = pkt.seq;
            fr.kind = pkt.kind;
            fr.size_bytes = pkt.size_bytes;
            fr.src = pkt.src;
            fr.created_at = pkt.created_at;
            if (pkt.kind == PacketKind::warning)
                fr.episode = std::get<WarningPayload>(pkt.payload).episode;
        }
        if (channel_->enqueue(pkt.seq, t))
            queue_.schedule({t, pkt.src, pkt.seq, 0, EventKind::tx_start});
    }

    FrameRecord& frame_record(PacketSeq seq) {
        // Frames are appended in seq order, one record per packet.
        return ledger_.frames[seq];
    }

    void try_inject(SimTime t) {
        NodeId id = -1;
        const auto dir = static_cast<Direction>(static_cast<int>(cfg_.block_exit) - 1);
        if (world_->inject_halt(dir, id)) {
            injected_vehicle_ = id;
            inject_armed_ = false;
            trace(t, "halt vehicle=" + std::to_string(id));
        }
    }

    void check_vehicle_invariants(SimTime t) {
        for (const auto& veh : world_->vehicles()) {
            if (veh.off_road) continue;
            if (veh.v < -1e-9 || veh.v > veh.v_desired + 1e-9 || veh.v_desired > cfg_.speed_max + 1e-9)
                throw RuntimeFault("speed bounds violated for vehicle " + std::to_string(veh.id) +
                                   " at t=" + std::to_string(t));
        }
    }

    void log_phase(SimTime t) {
        phase_log_.push_back({t, tcu_.phase.active, tcu_.phase.stage});
        trace(t, std::string("phase active=") + to_string(tcu_.phase.active) +
                     " stage=" + to_string(tcu_.phase.stage));
    }

    void trace(SimTime t, const std::string& line) {
        if (opt_.keep_trace) trace_.push_back(std::to_string(t) + " " + line);
    }

    void finalize() {
        for (const auto& tx : channel_->in_flight()) {
            auto& kt = ledger_.kind(arena_[tx.seq].kind);
            kt.intended_pairs += tx.intended.size();
            kt.pending_pairs += tx.intended.size();
            if (ledger_.keep_records)
                for (const auto& rcv : tx.intended)
                    ledger_.pending_pair_records.emplace_back(tx.seq, rcv.id);
        }
        for (const PacketSeq seq : channel_->queued_frames())
            ledger_.kind(arena_[seq].kind).queued_frames += 1;
        ledger_.kind(PacketKind::report).pending_pairs += wired_outstanding_;
        if (ledger_.keep_records && wired_outstanding_ > 0) {
            for (const auto& fr : ledger_.frames)
                if (fr.wired && !fr.t_end) ledger_.pending_pair_records.emplace_back(fr.seq, tcu_node_id());
        }

        if (!ledger_.conserved()) throw RuntimeFault("pair accounting does not conserve");
    }

    SimConfig cfg_;
    RunOptions opt_;
    RoadNetwork net_;
    std::optional<TrafficWorld> world_;
    std::vector<RsuState> rsus_;
    TcuState tcu_;
    EventQueue queue_;
    std::optional<Channel> channel_;
    std::vector<Packet> arena_;
    std::vector<RadioNode> directory_;
    PacketLedger ledger_;

    std::vector<PhaseRecord> phase_log_;
    std::vector<CrossingEvent> crossing_log_;
    std::vector<ZoneEntryEvent> zone_log_;
    std::vector<JourneyRecord> journey_log_;
    std::vector<BoxViolationEvent> violation_log_;
    std::vector<EpisodeRecord> episodes_;
    std::vector<std::string> trace_;

    SimTime duration_ns_ = 0;
    SimTime dt_ns_ = 0;
    std::uint32_t num_vehicles_ = 0;
    bool inject_armed_ = false;
    NodeId injected_vehicle_ = -1;
    std::uint64_t wired_outstanding_ = 0;
};

inline SimResult run_sim(const SimConfig& cfg, RunOptions opt = {}) {
    Engine engine(cfg, std::move(opt));
    return engine.run();
}

} // namespace vanetsim
