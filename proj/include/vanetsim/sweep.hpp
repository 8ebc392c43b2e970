#pragma once

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "vanetsim/config_io.hpp"
#include "vanetsim/engine.hpp"
#include "vanetsim/reports.hpp"

namespace vanetsim {

/// One CLI invocation: a single run or the cross product of sweep axes,
/// each point repeated over `seeds` consecutive seeds.
struct RunSpec {
    SimConfig base;
    std::string out_dir = "out";
    std::vector<std::pair<std::string, std::vector<std::string>>> sweeps;
    std::uint32_t seeds = 1;
    bool trace_packets = false;
    bool trace_events = false;
};

struct SweepPoint {
    SimConfig cfg;
    std::string label;
};

/// Expand the sweep cross product in declaration order. Throws RuntimeFault
/// on unknown keys or unparsable values; the caller maps that to exit 2.
inline std::vector<SweepPoint> expand_sweep(const RunSpec& spec) {
    std::vector<SweepPoint> points{{spec.base, ""}};
    for (const auto& [key, values] : spec.sweeps) {
        if (!is_config_key(key)) throw RuntimeFault("unknown sweep key '" + key + "'");
        if (values.empty()) throw RuntimeFault("empty sweep value list for '" + key + "'");
        std::vector<SweepPoint> next;
        for (const auto& p : points) {
            for (const auto& v : values) {
                SweepPoint np = p;
                if (!set_config_field(np.cfg, key, v))
                    throw RuntimeFault("bad sweep value '" + v + "' for '" + key + "'");
                np.label += (np.label.empty() ? "" : " ") + key + "=" + v;
                next.push_back(std::move(np));
            }
        }
        points = std::move(next);
    }
    return points;
}

/// Run every (point, seed) pair and write metrics.csv plus summary.txt under
/// out_dir; per-run trace files go to out_dir/run_<id>/. Returns a process
/// exit code: 0 on success, 3 on a runtime or I/O fault.
inline int run_sweep(const RunSpec& spec, std::ostream& err = std::cerr) {
    namespace fs = std::filesystem;
    try {
        const auto points = expand_sweep(spec);
        for (const auto& p : points) {
            if (auto errs = validate_config(p.cfg); !errs.empty()) {
                std::string msg = "sweep point '" + p.label + "' invalid:";
                for (const auto& e : errs) msg += " [" + e.field + ": " + e.reason + "]";
                throw RuntimeFault(msg);
            }
        }

        fs::create_directories(spec.out_dir);
        std::string csv = std::string(kMetricsCsvHeader) + "\n";
        std::string summary;

        std::uint32_t run_id = 0;
        for (const auto& p : points) {
            for (std::uint32_t j = 0; j < spec.seeds; ++j, ++run_id) {
                SimConfig cfg = p.cfg;
                cfg.seed = p.cfg.seed + j;

                RunOptions opt;
                opt.keep_records = spec.trace_packets;
                opt.keep_trace = spec.trace_events;
                const SimResult res = run_sim(cfg, opt);

                const RowMeta meta = row_meta(run_id, res);
                csv += metrics_csv_row(meta, res.metrics) + "\n";
                summary += summary_block(meta, res) + "\n";

                if (spec.trace_packets || spec.trace_events) {
                    char dir_name[32];
                    std::snprintf(dir_name, sizeof dir_name, "run_%03u", run_id);
                    const fs::path run_dir = fs::path(spec.out_dir) / dir_name;
                    fs::create_directories(run_dir);
                    write_text_file(run_dir / "run.cfg", render_config(res.config));
                    if (spec.trace_packets) {
                        write_text_file(run_dir / "packets.csv", packets_csv(meta, res));
                        write_text_file(run_dir / "mobility.csv", mobility_csv(res));
                        write_text_file(run_dir / "episodes.csv", episodes_csv(res));
                        write_text_file(run_dir / "phases.csv", phases_csv(res));
                    }
                    if (spec.trace_events)
                        write_text_file(run_dir / "events.trace", events_trace(res));
                }
            }
        }

        write_text_file(fs::path(spec.out_dir) / "metrics.csv", csv);
        write_text_file(fs::path(spec.out_dir) / "summary.txt", summary);
        return 0;
    } catch (const SimError& e) {
        err << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    }
}

/// `recompute` subcommand: rebuild the metrics row from a dumped ledger.
inline int run_recompute(const std::filesystem::path& packets_path, const std::string& out_dir,
                         std::ostream& err = std::cerr) {
    namespace fs = std::filesystem;
    try {
        const auto rr = recompute_from_dump(packets_path);
        fs::create_directories(out_dir);
        const std::string csv =
            std::string(kMetricsCsvHeader) + "\n" + metrics_csv_row(rr.meta, rr.metrics) + "\n";
        write_text_file(fs::path(out_dir) / "metrics.csv", csv);
        return 0;
    } catch (const SimError& e) {
        err << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    }
}

} // namespace vanetsim
