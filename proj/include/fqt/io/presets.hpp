// Figure presets: the caption parameter sets, canonical configuration,
// T_E = 0.2, T_C = 0.02, kappa = 1, lambda = 0.8.
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "fqt/currents.hpp"
#include "fqt/error.hpp"
#include "fqt/model.hpp"

namespace fqt::io {

struct PresetRun {
    std::string suffix;  // appended to the output stem; empty for single-run presets
    SweepConfig sweep;
};

inline constexpr double preset_t_b = 0.118;
inline constexpr double preset_lambda = 0.8;

inline std::vector<PresetRun> preset_runs(std::string_view name) {
    BathSpec baths{0.2, preset_t_b, 0.02, 1.0};
    auto tb_sweep = [&](double lo, double hi) {
        SweepConfig c;
        c.axis = SweepAxis::tb;
        c.grid = GridSpec{lo, hi, 200, Spacing::log};
        c.params = SystemParams::canonical();
        c.baths = baths;
        return std::vector<PresetRun>{{"", c}};
    };
    auto nu_sweeps = [&](double t_b) {
        std::vector<PresetRun> out;
        for (const ModulationScheme& m :
             {ModulationScheme{Sinusoidal{preset_lambda, 1.0}}, ModulationScheme{PiFlip{1.0}}}) {
            SweepConfig c;
            c.axis = SweepAxis::nu;
            c.grid = GridSpec{0.1, 4.0, 200, Spacing::linear};
            c.params = SystemParams::canonical(1.0, m);
            c.baths = baths;
            c.baths.t_b = t_b;
            out.push_back({"_" + std::string(scheme_name(m)), c});
        }
        return out;
    };
    if (name == "fig4") return tb_sweep(0.01, 0.2);
    if (name == "fig5") return tb_sweep(0.02, 0.15);
    if (name == "fig6" || name == "fig8") return nu_sweeps(preset_t_b);
    if (name == "fig10" || name == "fig11") return nu_sweeps(0.0);
    throw ModelError("unknown preset '" + std::string(name) +
                     "' (expected fig4, fig5, fig6, fig8, fig10 or fig11)");
}

} // namespace fqt::io
