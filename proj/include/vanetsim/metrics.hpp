#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "vanetsim/ledger.hpp"
#include "vanetsim/mobility.hpp"
#include "vanetsim/protocol.hpp"

namespace vanetsim {

struct KindMetrics {
    std::optional<double> pdr_pct;
    std::optional<double> delay_ms;
    double throughput_bps = 0.0;
    std::uint64_t loss_count = 0;
    std::uint64_t loss_bytes = 0;
};

struct WarnDelayStats {
    double mean_ms = 0.0;
    double p95_ms = 0.0;
    double max_ms = 0.0;
};

/// The QoS and safety outputs of one run. Metrics with an empty denominator
/// are absent, never zero.
struct MetricsReport {
    std::optional<double> pdr_pct;
    std::optional<double> e2e_delay_ms;
    double throughput_bps = 0.0;
    std::uint64_t loss_count = 0;
    std::uint64_t loss_bytes = 0;
    std::array<KindMetrics, 3> per_kind{};  // indexed by PacketKind
    std::uint32_t blind_count = 0;
    std::optional<WarnDelayStats> warn_delay;
    std::vector<std::uint64_t> per_vehicle_rx;
    std::uint32_t box_violations = 0;
    std::optional<double> travel_time_s;  // mean completed journey time
    std::uint32_t green_crossings = 0;
    std::uint32_t green_phase_count = 0;  // green stages begun, for per-phase reporting
};

// PDR over non-pending intended pairs, percent.
inline std::optional<double> pdr_of(std::uint64_t delivered, std::uint64_t intended,
                                    std::uint64_t pending) {
    const std::uint64_t denom = intended - pending;
    if (denom == 0) return std::nullopt;
    return 100.0 * static_cast<double>(delivered) / static_cast<double>(denom);
}

inline std::optional<double> pdr(const PacketLedger& led) {
    return pdr_of(led.radio_delivered(), led.radio_intended(), led.radio_pending());
}

inline std::optional<double> mean_delay_ms(SimTime delay_sum_ns, std::uint64_t delivered) {
    if (delivered == 0) return std::nullopt;
    return static_cast<double>(delay_sum_ns) / static_cast<double>(delivered) / 1e6;
}

inline std::optional<double> mean_e2e_delay(const PacketLedger& led) {
    return mean_delay_ms(led.radio_delay_sum(), led.radio_delivered());
}

// Payload bits delivered per second of simulated time; overhead excluded.
inline double throughput_bps(std::uint64_t delivered_bytes, SimTime duration_ns) {
    if (duration_ns <= 0) return 0.0;
    return static_cast<double>(delivered_bytes * 8ULL) * 1e9 / static_cast<double>(duration_ns);
}

struct LossFigures {
    std::uint64_t count = 0;
    std::uint64_t bytes = 0;
};

inline LossFigures packet_loss(const PacketLedger& led) {
    return {led.radio_dropped(), led.radio_dropped_bytes()};
}

// p95 as the ceil(0.95 n)-th order statistic.
inline double percentile95(std::vector<SimTime> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    std::size_t idx = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
    idx = std::clamp<std::size_t>(idx, 1, n);
    return ns_to_ms(values[idx - 1]);
}

/// Warning propagation over (episode, vehicle) pairs: first delivery of an
/// episode's warning minus that episode's first issue time.
inline std::optional<WarnDelayStats> warning_propagation(const PacketLedger& led,
                                                         const std::vector<EpisodeRecord>& episodes) {
    std::vector<SimTime> delays;
    SimTime sum = 0;
    for (const auto& ep : episodes) {
        if (!ep.first_issue) continue;
        if (ep.id >= led.episode_first_rx.size()) continue;
        for (const auto& [veh, t] : led.episode_first_rx[ep.id]) {
            (void)veh;
            const SimTime d = t - *ep.first_issue;
            delays.push_back(d);
            sum += d;
        }
    }
    if (delays.empty()) return std::nullopt;
    WarnDelayStats st;
    st.mean_ms = static_cast<double>(sum) / static_cast<double>(delays.size()) / 1e6;
    st.p95_ms = percentile95(delays);
    st.max_ms = ns_to_ms(*std::max_element(delays.begin(), delays.end()));
    return st;
}

inline std::uint32_t count_green_crossings(const std::vector<CrossingEvent>& crossings) {
    std::uint32_t n = 0;
    for (const auto& c : crossings)
        if (c.color == SignalColor::green) n += 1;
    return n;
}

inline std::optional<double> mean_travel_time_s(const std::vector<JourneyRecord>& journeys) {
    if (journeys.empty()) return std::nullopt;
    SimTime sum = 0;
    for (const auto& j : journeys) sum += j.exit_time - j.spawn_time;
    return static_cast<double>(sum) / static_cast<double>(journeys.size()) / 1e9;
}

inline MetricsReport compute_metrics(const PacketLedger& led,
                                     const std::vector<CrossingEvent>& crossings,
                                     const std::vector<ZoneEntryEvent>& zone_entries,
                                     const std::vector<JourneyRecord>& journeys,
                                     const std::vector<BoxViolationEvent>& violations,
                                     const std::vector<EpisodeRecord>& episodes,
                                     const std::vector<PhaseRecord>& phases,
                                     SimTime duration_ns) {
    MetricsReport rep;
    rep.pdr_pct = pdr(led);
    rep.e2e_delay_ms = mean_e2e_delay(led);
    rep.throughput_bps = throughput_bps(led.radio_delivered_bytes(), duration_ns);
    const auto loss = packet_loss(led);
    rep.loss_count = loss.count;
    rep.loss_bytes = loss.bytes;

    for (int k = 0; k < 3; ++k) {
        const auto& kt = led.by_kind[static_cast<std::size_t>(k)];
        auto& km = rep.per_kind[static_cast<std::size_t>(k)];
        km.pdr_pct = pdr_of(kt.delivered_pairs, kt.intended_pairs, kt.pending_pairs);
        km.delay_ms = mean_delay_ms(kt.delay_sum_ns, kt.delivered_pairs);
        km.throughput_bps = throughput_bps(kt.delivered_bytes, duration_ns);
        km.loss_count = kt.dropped_pairs();
        km.loss_bytes = kt.dropped_bytes;
    }

    rep.blind_count = count_blind(zone_entries, episodes);
    rep.warn_delay = warning_propagation(led, episodes);
    rep.per_vehicle_rx = led.rx_by_vehicle;
    rep.box_violations = static_cast<std::uint32_t>(violations.size());
    rep.travel_time_s = mean_travel_time_s(journeys);
    rep.green_crossings = count_green_crossings(crossings);
    for (const auto& ph : phases)
        if (ph.stage == SignalStage::green) rep.green_phase_count += 1;
    return rep;
}

} // namespace vanetsim
