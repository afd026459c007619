// model.hpp: three-qubit transistor parameters, quasi-energy spectrum and
// the bath-driven transition graph of the cycle-averaged Hamiltonian.
//
// Units: hbar = k_B = 1. Frequencies and energies are measured in units of the
// coupling Delta, temperatures in hbar*Delta/k_B.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "fqt/error.hpp"

namespace fqt {

enum class Bath { emitter, base, collector };

inline constexpr std::array<Bath, 3> all_baths{Bath::emitter, Bath::base, Bath::collector};

inline constexpr std::string_view to_string(Bath b) noexcept {
    switch (b) {
    case Bath::emitter: return "E";
    case Bath::base: return "B";
    case Bath::collector: return "C";
    }
    return "?";
}

// ------------------------------ modulation ---------------------------------

struct Unmodulated {};

// omega_B(t) = omega_0 + lambda * nu * sin(nu t)
struct Sinusoidal {
    double lambda{0.0};
    double nu{1.0};
};

// Two alternating pi phase kicks per period, at tau/4 and 3tau/4.
struct PiFlip {
    double nu{1.0};
};

// omega_B(t) sampled uniformly over one period, t_k = k tau / n.
struct Tabulated {
    std::vector<double> waveform;
    double nu{1.0};
};

using ModulationScheme = std::variant<Unmodulated, Sinusoidal, PiFlip, Tabulated>;

inline std::string_view scheme_name(const ModulationScheme& s) noexcept {
    switch (s.index()) {
    case 0: return "unmodulated";
    case 1: return "sinusoidal";
    case 2: return "pi_flip";
    case 3: return "tabulated";
    }
    return "?";
}

// Modulation angular frequency; zero when unmodulated.
inline double modulation_frequency(const ModulationScheme& s) noexcept {
    return std::visit(
        [](const auto& m) -> double {
            if constexpr (std::is_same_v<std::decay_t<decltype(m)>, Unmodulated>) {
                return 0.0;
            } else {
                return m.nu;
            }
        },
        s);
}

// Returns a copy of `s` with its modulation frequency replaced (no-op when unmodulated).
inline ModulationScheme with_frequency(ModulationScheme s, double nu) {
    std::visit(
        [nu](auto& m) {
            if constexpr (!std::is_same_v<std::decay_t<decltype(m)>, Unmodulated>) {
                m.nu = nu;
            }
        },
        s);
    return s;
}

inline void validate(const ModulationScheme& scheme, double omega_0) {
    std::visit(
        [omega_0](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (!std::is_same_v<T, Unmodulated>) {
                if (!std::isfinite(m.nu) || !(m.nu > 0.0)) {
                    throw ModelError("modulation: nu must be finite and > 0");
                }
            }
            if constexpr (std::is_same_v<T, Sinusoidal>) {
                if (!std::isfinite(m.lambda) || m.lambda < 0.0 || m.lambda > 1.0) {
                    throw ModelError("modulation: lambda violates 0 <= lambda <= 1");
                }
            }
            if constexpr (std::is_same_v<T, Tabulated>) {
                if (m.waveform.size() < 2) {
                    throw ModelError("modulation: tabulated waveform needs at least 2 samples");
                }
                double scale = std::abs(omega_0);
                for (double w : m.waveform) {
                    if (!std::isfinite(w)) {
                        throw ModelError("modulation: tabulated waveform has a non-finite sample");
                    }
                    scale = std::max(scale, std::abs(w));
                }
                const double mean = std::accumulate(m.waveform.begin(), m.waveform.end(), 0.0) /
                                    static_cast<double>(m.waveform.size());
                if (std::abs(mean - omega_0) > 1e-9 * scale) {
                    std::ostringstream os;
                    os.precision(17);
                    os << "modulation: tabulated waveform period average " << mean
                       << " differs from omega_0 = " << omega_0;
                    throw ModelError(os.str());
                }
            }
        },
        scheme);
}

// ------------------------------- parameters --------------------------------

struct SystemParams {
    double omega_e{0.0};
    double omega_0{0.0};  // period average of omega_B(t)
    double omega_c{0.0};
    double omega_eb{1.0};
    double omega_bc{1.0};
    double omega_ce{0.0};
    ModulationScheme modulation{Unmodulated{}};

    // omega_E = omega_0 = omega_C = omega_CE = 0, omega_EB = omega_BC = delta.
    static SystemParams canonical(double delta = 1.0, ModulationScheme m = Unmodulated{}) {
        SystemParams p;
        p.omega_eb = delta;
        p.omega_bc = delta;
        p.modulation = std::move(m);
        return p;
    }

    bool is_canonical() const noexcept {
        return omega_e == 0.0 && omega_0 == 0.0 && omega_c == 0.0 && omega_ce == 0.0 &&
               omega_eb == omega_bc && omega_eb > 0.0;
    }

    // The coupling scale Delta of the canonical configuration.
    double delta() const noexcept { return omega_eb; }
};

inline void validate(const SystemParams& p) {
    const std::array<std::pair<const char*, double>, 6> fields{{{"omega_e", p.omega_e},
                                                                {"omega_0", p.omega_0},
                                                                {"omega_c", p.omega_c},
                                                                {"omega_eb", p.omega_eb},
                                                                {"omega_bc", p.omega_bc},
                                                                {"omega_ce", p.omega_ce}}};
    for (const auto& [name, v] : fields) {
        if (!std::isfinite(v)) {
            throw ModelError(std::string("system: ") + name + " must be finite");
        }
    }
    validate(p.modulation, p.omega_0);
}

struct BathSpec {
    double t_e{0.2};
    double t_b{0.118};
    double t_c{0.02};
    double kappa{1.0};

    double temperature(Bath b) const noexcept {
        switch (b) {
        case Bath::emitter: return t_e;
        case Bath::base: return t_b;
        case Bath::collector: return t_c;
        }
        return 0.0;
    }
};

inline void validate(const BathSpec& b) {
    if (!std::isfinite(b.t_e) || !(b.t_e > 0.0)) throw ModelError("baths: t_e must be > 0");
    if (!std::isfinite(b.t_c) || !(b.t_c > 0.0)) throw ModelError("baths: t_c must be > 0");
    if (!std::isfinite(b.t_b) || b.t_b < 0.0) throw ModelError("baths: t_b must be >= 0");
    if (!std::isfinite(b.kappa) || !(b.kappa > 0.0)) throw ModelError("baths: kappa must be > 0");
}

// ------------------------------ level table --------------------------------

inline constexpr std::size_t level_count = 8;
inline constexpr std::size_t transition_count = 12;
inline constexpr double degeneracy_tolerance = 1e-12;

// +1 = up, -1 = down.
struct Spins {
    int e{1};
    int b{1};
    int c{1};

    friend bool operator==(const Spins&, const Spins&) = default;
};

// Levels are stored 0-based; |1> = |up up up> ... |8> = |down down down>, emitter
// spin most significant.
inline constexpr Spins spins_of(std::size_t index) noexcept {
    return Spins{(index & 4u) ? -1 : 1, (index & 2u) ? -1 : 1, (index & 1u) ? -1 : 1};
}

inline constexpr unsigned flip_mask(Bath b) noexcept {
    switch (b) {
    case Bath::emitter: return 4u;
    case Bath::base: return 2u;
    case Bath::collector: return 1u;
    }
    return 0u;
}

struct Level {
    std::size_t index{0};
    Spins spins;
    double energy{0.0};

    std::size_t label() const noexcept { return index + 1; }
};

// A bath-driven transition between `upper` and `lower` (0-based) with gap
// energy(upper) - energy(lower) >= 0.
struct Transition {
    Bath bath{Bath::emitter};
    std::size_t upper{0};
    std::size_t lower{0};
    double gap{0.0};

    bool degenerate() const noexcept { return std::abs(gap) <= degeneracy_tolerance; }
};

struct LevelTable {
    std::array<Level, level_count> levels{};
    std::array<Transition, transition_count> transitions{};

    double energy(std::size_t index) const { return levels.at(index).energy; }
};

inline double quasi_energy(const SystemParams& p, Spins s) noexcept {
    return 0.5 * (p.omega_e * s.e + p.omega_0 * s.b + p.omega_c * s.c + p.omega_eb * s.e * s.b +
                  p.omega_bc * s.b * s.c + p.omega_ce * s.c * s.e);
}

inline LevelTable build_level_table(const SystemParams& params) {
    LevelTable t;
    for (std::size_t i = 0; i < level_count; ++i) {
        const Spins s = spins_of(i);
        t.levels[i] = Level{i, s, quasi_energy(params, s)};
    }
    std::size_t k = 0;
    for (Bath bath : all_baths) {
        const unsigned mask = flip_mask(bath);
        for (std::size_t i = 0; i < level_count; ++i) {
            if (i & mask) continue;
            const std::size_t j = i | mask;
            const double ei = t.levels[i].energy;
            const double ej = t.levels[j].energy;
            // Ties keep the lower index as the upper level.
            t.transitions[k++] = ej > ei ? Transition{bath, j, i, ej - ei}
                                         : Transition{bath, i, j, ei - ej};
        }
    }
    return t;
}

struct DegeneracyClass {
    double energy{0.0};
    std::vector<std::size_t> levels;  // 0-based, ascending
};

// True when every level is degenerate with its global spin flip (i <-> 7 - i),
// which holds whenever the local fields omega_E, omega_0, omega_C vanish.
inline bool spin_flip_symmetric(const LevelTable& table, double tol = degeneracy_tolerance) {
    for (std::size_t i = 0; i < level_count / 2; ++i) {
        if (std::abs(table.energy(i) - table.energy(level_count - 1 - i)) > tol) return false;
    }
    return true;
}

// Groups levels whose quasi-energies agree within `tol`. Under global spin-flip
// symmetry an energy shell is further split into flip pairs {i, 7 - i}: levels of
// different pairs then sit at different positions of the transition graph (the
// canonical II = {2,7} and IV = {4,5} share E = 0). Classes are ordered by their
// smallest member, so the canonical configuration yields I..IV in order.
inline std::vector<DegeneracyClass> degeneracy_classes(const LevelTable& table,
                                                       double tol = degeneracy_tolerance) {
    const bool flip = spin_flip_symmetric(table, tol);
    std::vector<DegeneracyClass> classes;
    for (const Level& lv : table.levels) {
        auto it = std::find_if(classes.begin(), classes.end(), [&](const DegeneracyClass& c) {
            if (std::abs(c.energy - lv.energy) > tol) return false;
            return !flip || c.levels.front() == level_count - 1 - lv.index;
        });
        if (it == classes.end()) {
            classes.push_back(DegeneracyClass{lv.energy, {lv.index}});
        } else {
            it->levels.push_back(lv.index);
        }
    }
    return classes;
}

inline constexpr std::array<std::string_view, 4> class_names{"I", "II", "III", "IV"};

} // namespace fqt
