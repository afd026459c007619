// fqt: command-line driver for points, sweeps and figure presets.
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "fqt/io/config.hpp"
#include "fqt/io/run.hpp"
#include "fqt/version.hpp"

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw fqt::io::ConfigError("cannot read config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Floquet quantum thermal transistor simulator"};
    app.set_version_flag("--version", std::string(fqt::version));
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "evaluate a config file or a figure preset");
    std::string config_path, preset, out, format, weights;
    unsigned threads = 0;
    int qmax = -1;
    bool check = false;
    auto* cfg_opt = run->add_option("--config", config_path, "configuration file");
    auto* preset_opt = run->add_option("--preset", preset, "fig4 | fig5 | fig6 | fig8 | fig10 | fig11");
    cfg_opt->excludes(preset_opt);
    run->add_option("--out", out, "output path (two-scheme presets add _<scheme> before the extension)");
    run->add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    auto* threads_opt = run->add_option("--threads", threads, "worker threads (default: all cores)");
    run->add_flag("--check", check, "verify conservation and the beta identity row by row");
    run->add_option("--weights", weights, "closed | quadrature")
        ->check(CLI::IsMember({"closed", "quadrature"}));
    run->add_option("--qmax", qmax, "harmonic truncation order")->check(CLI::Range(0, 10));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : fqt::io::exit_config;
    }

    fqt::io::RunConfig cfg;
    try {
        if (!config_path.empty()) {
            cfg = fqt::io::parse_config(slurp(config_path));
        } else if (!preset.empty()) {
            if (!fqt::io::is_preset_name(preset)) {
                throw fqt::io::ConfigError("unknown preset '" + preset + "'");
            }
            cfg.mode = fqt::io::RunMode::preset;
            cfg.preset = preset;
        } else {
            throw fqt::io::ConfigError("one of --config or --preset is required");
        }
        if (!out.empty()) cfg.output_path = out;
        if (!format.empty()) cfg.format = fqt::io::parse_format(format);
        if (!threads_opt->empty()) cfg.threads = threads;
        if (!weights.empty()) cfg.weights.backend = fqt::io::parse_backend(weights);
        if (qmax >= 0) cfg.weights.q_max = qmax;
    } catch (const std::exception& e) {
        std::cerr << "fqt: config error: " << e.what() << '\n';
        return fqt::io::exit_config;
    }
    return fqt::io::run(cfg, fqt::io::RunOptions{check}, std::cout, std::cerr);
}
