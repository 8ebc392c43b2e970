// Command-line front end: single runs, parameter sweeps, and metric
// recomputation from dumped ledgers.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vanetsim/vanetsim.hpp"

namespace {

// "key=v1,v2,..." -> (key, values)
bool parse_sweep_arg(const std::string& arg,
                     std::pair<std::string, std::vector<std::string>>& out) {
    const auto eq = arg.find('=');
    if (eq == std::string::npos || eq == 0) return false;
    out.first = arg.substr(0, eq);
    out.second.clear();
    std::string cur;
    for (char ch : arg.substr(eq + 1)) {
        if (ch == ',') {
            out.second.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.second.push_back(cur);
    for (const auto& v : out.second)
        if (v.empty()) return false;
    return true;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"VANET intersection congestion-control simulator"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "run a simulation or a parameter sweep");
    std::string config_path;
    std::string out_dir = "out";
    std::string mode_override;
    std::vector<std::string> sweep_args;
    std::vector<std::string> trace_args;
    std::uint64_t seed_override = 0;
    bool seed_given = false;
    std::uint32_t seeds = 1;
    run->add_option("--config", config_path, "config file (key = value lines)");
    run->add_option("--seed", seed_override, "base seed override")->each([&](const std::string&) {
        seed_given = true;
    });
    run->add_option("--out", out_dir, "output directory (default out)");
    run->add_option("--mode", mode_override, "protocol|baseline override");
    run->add_option("--sweep", sweep_args, "sweep axis key=v1,v2,... (repeatable)");
    run->add_option("--seeds", seeds, "seeds per sweep point (base_seed + index)");
    run->add_option("--trace", trace_args, "packets|events (repeatable)");

    // recompute
    auto* rec = app.add_subcommand("recompute", "rebuild metrics from a dumped ledger");
    std::string ledger_path;
    std::string rec_out = "out";
    rec->add_option("--ledger", ledger_path, "path to packets.csv of a traced run")->required();
    rec->add_option("--out", rec_out, "output directory (default out)");

    CLI11_PARSE(app, argc, argv);

    if (rec->parsed()) return vanetsim::run_recompute(ledger_path, rec_out);

    vanetsim::RunSpec spec;
    if (!config_path.empty()) {
        std::string text;
        try {
            text = vanetsim::read_text_file(config_path);
        } catch (const vanetsim::IoError& e) {
            std::cerr << e.what() << "\n";
            return 2;
        }
        const auto parsed = vanetsim::parse_config(text);
        if (!parsed.ok()) {
            for (const auto& issue : parsed.issues)
                std::cerr << config_path << ":" << issue.line << ": " << issue.message << "\n";
            return 2;
        }
        spec.base = *parsed.config;
    }
    if (seed_given) spec.base.seed = seed_override;
    if (!mode_override.empty()) {
        if (mode_override == "protocol") {
            spec.base.mode = vanetsim::RunMode::protocol;
        } else if (mode_override == "baseline") {
            spec.base.mode = vanetsim::RunMode::baseline;
        } else {
            std::cerr << "bad --mode '" << mode_override << "'\n";
            return 2;
        }
    }
    for (const auto& arg : sweep_args) {
        std::pair<std::string, std::vector<std::string>> axis;
        if (!parse_sweep_arg(arg, axis)) {
            std::cerr << "bad --sweep '" << arg << "' (want key=v1,v2,...)\n";
            return 2;
        }
        if (!vanetsim::is_config_key(axis.first)) {
            std::cerr << "unknown sweep key '" << axis.first << "'\n";
            return 2;
        }
        spec.sweeps.push_back(std::move(axis));
    }
    for (const auto& t : trace_args) {
        if (t == "packets") {
            spec.trace_packets = true;
        } else if (t == "events") {
            spec.trace_events = true;
        } else {
            std::cerr << "bad --trace '" << t << "' (packets|events)\n";
            return 2;
        }
    }
    if (seeds == 0) {
        std::cerr << "--seeds must be at least 1\n";
        return 2;
    }
    spec.seeds = seeds;
    spec.out_dir = out_dir;

    if (auto errs = vanetsim::validate_config(spec.base); !errs.empty()) {
        for (const auto& e : errs) std::cerr << "invalid " << e.field << ": " << e.reason << "\n";
        return 2;
    }
    return vanetsim::run_sweep(spec);
}
