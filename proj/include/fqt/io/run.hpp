// Run orchestration: config -> sweeps -> files + one-line summary.
//
// Exit codes: 0 ok, 1 config error, 2 solver failure, 3 --check failure.

#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "fqt/currents.hpp"
#include "fqt/io/config.hpp"
#include "fqt/io/output.hpp"
#include "fqt/io/presets.hpp"
#include "fqt/log.hpp"

namespace fqt::io {

enum ExitCode : int { exit_ok = 0, exit_config = 1, exit_solver = 2, exit_check = 3 };

struct RunOptions {
    bool check{false};
};

struct PlannedRun {
    std::string path;
    SweepConfig sweep;
    bool single_point{false};
};

inline std::string insert_suffix(const std::string& path, const std::string& suffix) {
    if (suffix.empty()) return path;
    const auto slash = path.find_last_of('/');
    const auto dot = path.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
        return path + suffix;
    }
    return path.substr(0, dot) + suffix + path.substr(dot);
}

inline std::vector<PlannedRun> plan(const RunConfig& cfg) {
    const std::string ext = cfg.format == OutputFormat::csv ? ".csv" : ".json";
    const std::string base =
        !cfg.output_path.empty() ? cfg.output_path
                                 : (cfg.mode == RunMode::preset ? cfg.preset : std::string("fqt")) + ext;
    std::vector<PlannedRun> out;
    if (cfg.mode == RunMode::preset) {
        for (PresetRun& p : preset_runs(cfg.preset)) {
            p.sweep.weights = cfg.weights;
            p.sweep.threads = cfg.threads;
            out.push_back({insert_suffix(base, p.suffix), p.sweep, false});
        }
        return out;
    }
    SweepConfig s;
    s.params = cfg.system;
    s.baths = cfg.baths;
    s.weights = cfg.weights;
    s.threads = cfg.threads;
    s.grid = cfg.grid;
    s.axis = cfg.mode == RunMode::sweep_nu ? SweepAxis::nu : SweepAxis::tb;
    out.push_back({base, s, cfg.mode == RunMode::point});
    return out;
}

inline Table execute(const PlannedRun& r) {
    if (!r.single_point) return to_table(run_sweep(r.sweep));
    Table t;
    t.axis = SweepAxis::tb;
    t.rows.push_back(sweep_point(r.sweep, r.sweep.baths.t_b));
    t.beta_plus.emplace_back();
    t.beta_minus.emplace_back();
    return t;
}

// Criteria checked row-wise by --check: J_E + J_B + J_C = 0 and beta_+ + beta_- = -1.
struct CheckTally {
    std::size_t conservation_failures{0};
    std::size_t beta_failures{0};
    bool ok() const noexcept { return conservation_failures == 0 && beta_failures == 0; }
};

inline CheckTally check_table(const Table& t) {
    CheckTally c;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        if (!t.rows[i].ok()) continue;
        if (!(std::abs(t.rows[i].report->conservation_residual) < 1e-10)) ++c.conservation_failures;
        const auto& bp = t.beta_plus[i];
        const auto& bm = t.beta_minus[i];
        if (bp && bm && std::isfinite(*bp) && std::isfinite(*bm) &&
            !(std::abs(*bp + *bm + 1.0) < 1e-6)) {
            ++c.beta_failures;
        }
    }
    return c;
}

inline int run(const RunConfig& cfg, const RunOptions& opt, std::ostream& out, std::ostream& err) {
    std::vector<PlannedRun> runs;
    try {
        runs = plan(cfg);
    } catch (const std::exception& e) {
        err << "fqt: config error: " << e.what() << '\n';
        return exit_config;
    }

    std::size_t points = 0, errors = 0, bm_flags = 0;
    double max_residual = 0.0;
    CheckTally tally;
    std::vector<std::string> files;
    for (const PlannedRun& r : runs) {
        Table t;
        try {
            t = execute(r);
        } catch (const ModelError& e) {
            err << "fqt: config error: " << e.what() << '\n';
            return exit_config;
        }
        for (const SweepRow& row : t.rows) {
            ++points;
            if (!row.ok()) {
                ++errors;
                log::warn("point " + format_double(row.s) + " failed: " + row.error_message);
                continue;
            }
            max_residual = std::max(max_residual, std::abs(row.report->conservation_residual));
            if (row.report->born_markov.flag) ++bm_flags;
        }
        if (opt.check) {
            const CheckTally c = check_table(t);
            tally.conservation_failures += c.conservation_failures;
            tally.beta_failures += c.beta_failures;
        }

        std::ofstream f(r.path, std::ios::binary);
        if (!f) {
            err << "fqt: cannot open output file " << r.path << '\n';
            return exit_solver;
        }
        if (cfg.format == OutputFormat::csv) {
            write_csv(f, t);
        } else {
            const std::string_view mode =
                cfg.mode == RunMode::preset ? std::string_view(cfg.preset) : to_string(cfg.mode);
            write_json(f, t, config_json(r.sweep, mode));
        }
        if (!f) {
            err << "fqt: write failed for " << r.path << '\n';
            return exit_solver;
        }
        files.push_back(r.path);
    }

    std::ostringstream files_list;
    for (std::size_t i = 0; i < files.size(); ++i) files_list << (i ? "," : "") << files[i];
    out << "fqt: mode=" << (cfg.mode == RunMode::preset ? cfg.preset : std::string(to_string(cfg.mode)))
        << " points=" << points << " errors=" << errors
        << " max_residual=" << format_double(max_residual) << " bm_flags=" << bm_flags
        << " files=" << files_list.str();
    if (opt.check) {
        out << " check=" << (tally.ok() ? "pass" : "fail");
    }
    out << '\n';

    if (errors > 0) return exit_solver;
    if (opt.check && !tally.ok()) {
        err << "fqt: check failed: " << tally.conservation_failures
            << " rows with |J_E+J_B+J_C| >= 1e-10, " << tally.beta_failures
            << " rows with |beta_+ + beta_- + 1| >= 1e-6\n";
        return exit_check;
    }
    return exit_ok;
}

} // namespace fqt::io
