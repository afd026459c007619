// currents.hpp: steady-state heat currents, amplification factors and sweeps.
//
// Sign convention: a current is positive when heat flows from the bath into the
// system. Units are kappa * Delta^2.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fqt/error.hpp"
#include "fqt/floquet.hpp"
#include "fqt/lindblad.hpp"
#include "fqt/model.hpp"

namespace fqt {

inline constexpr double born_markov_threshold = 0.1;

struct BornMarkovDiagnostic {
    double ratio{0.0};
    bool flag{false};
};

struct CurrentsReport {
    double j_e{0.0};
    double j_b{0.0};
    double j_c{0.0};
    double conservation_residual{0.0};  // J_E + J_B + J_C
    double drive_power{0.0};            // energy injected by the modulation per unit time
    double first_law_residual{0.0};     // J_E + J_B + J_C + drive_power
    Populations populations;
    std::vector<double> level_decay;  // per level: sum of |net flow| over its channels
    BornMarkovDiagnostic born_markov;
    SystemParams params;
    BathSpec baths;
    HarmonicWeights weights;
};

// Net downward flow of each channel at the given populations.
inline std::vector<double> channel_flows(const RateGenerator& gen, const Populations& rho) {
    std::vector<double> out;
    out.reserve(gen.channels.size());
    for (const ChannelRate& c : gen.channels) out.push_back(c.net_flow(rho.values));
    return out;
}

inline BornMarkovDiagnostic born_markov_guard(const std::vector<double>& level_decay,
                                              double delta) {
    BornMarkovDiagnostic d;
    for (double v : level_decay) d.ratio = std::max(d.ratio, std::abs(v) / delta);
    d.flag = d.ratio > born_markov_threshold;
    return d;
}

inline BornMarkovDiagnostic born_markov_guard(const CurrentsReport& r, double delta) {
    return born_markov_guard(r.level_decay, delta);
}

// J_{E,C} = -sum w_ij Gamma_ij and J_B = -sum_q sum (w_ij + q nu) Gamma_ij,q over
// the non-degenerate base transitions. Degenerate base channels move population
// but carry no base heat; their sideband energy stays in the drive bookkeeping.
inline CurrentsReport heat_currents(const RateGenerator& gen, const Populations& rho,
                                    const LevelTable& table, const HarmonicWeights& weights,
                                    const BathSpec& baths) {
    if (rho.size() != gen.dimension || gen.dimension != level_count) {
        throw ModelError("heat currents: populations must be the 8-level steady state");
    }
    CurrentsReport r;
    r.populations = rho;
    r.weights = weights;
    r.baths = baths;
    r.level_decay.assign(level_count, 0.0);

    for (const ChannelRate& c : gen.channels) {
        const double net = c.net_flow(rho.values);
        r.level_decay[c.upper] += std::abs(net);
        r.level_decay[c.lower] += std::abs(net);
        switch (c.bath) {
        case Bath::emitter: r.j_e -= c.gap * net; break;
        case Bath::collector: r.j_c -= c.gap * net; break;
        case Bath::base:
            if (std::abs(c.gap) > degeneracy_tolerance) {
                r.j_b -= c.effective * net;
                r.drive_power += c.q * net;
            }
            break;
        }
    }
    r.drive_power *= gen.nu;
    r.conservation_residual = r.j_e + r.j_b + r.j_c;
    r.first_law_residual = r.conservation_residual + r.drive_power;

    const double floor = baths.kappa * std::exp(-1.0 / baths.t_e);
    const double scale = std::max({std::abs(r.j_e), std::abs(r.j_c), std::abs(r.j_b), floor});
    if (!(std::abs(r.first_law_residual) <= 1e-10 * scale)) {
        std::ostringstream os;
        os << "heat currents: energy balance residual " << r.first_law_residual
           << " exceeds tolerance at " << gen.point;
        throw SolverError(os.str());
    }
    (void)table;
    r.born_markov = born_markov_guard(r.level_decay, 1.0);
    return r;
}

// weights -> generator -> steady state -> currents.
inline CurrentsReport evaluate_point(const SystemParams& params, const BathSpec& baths,
                                     const WeightOptions& wopt = {}) {
    validate(params);
    validate(baths);
    const HarmonicWeights w = harmonic_weights(params, wopt);
    const LevelTable table = build_level_table(params);
    const RateGenerator gen = build_generator(table, baths, w);
    const Populations rho = steady_state(gen);
    CurrentsReport r = heat_currents(gen, rho, table, w, baths);
    r.params = params;
    r.born_markov = born_markov_guard(r.level_decay, params.omega_eb > 0.0 ? params.omega_eb : 1.0);
    return r;
}

// ----------------------------- amplification -------------------------------

// Interior beta values. nullopt = undefined (missing neighbour or 0/0);
// +-infinity = divergent (dJ_B/ds vanishes).
struct Amplification {
    std::vector<std::optional<double>> beta_plus;
    std::vector<std::optional<double>> beta_minus;
};

namespace detail {

// Second-order derivative on a non-uniform three-point stencil.
inline double stencil(double hm, double hp, double fm, double f0, double fp) {
    return (hm * hm * fp - hp * hp * fm + (hp * hp - hm * hm) * f0) / (hm * hp * (hm + hp));
}

inline std::optional<double> ratio(double num, double den, double scale) {
    if (!std::isfinite(num) || !std::isfinite(den)) return std::nullopt;
    if (std::abs(den) < 1e-14 * scale) {
        if (num == 0.0) return std::nullopt;
        const double sign = std::signbit(den) ? -1.0 : 1.0;
        return sign * std::copysign(std::numeric_limits<double>::infinity(), num);
    }
    return num / den;
}

} // namespace detail

// beta_+ = dJ_C/dJ_B, beta_- = dJ_E/dJ_B along the sweep parameter s. NaN
// entries in the current arrays mark failed points.
inline Amplification amplification(const std::vector<double>& s, const std::vector<double>& j_e,
                                   const std::vector<double>& j_b,
                                   const std::vector<double>& j_c) {
    const std::size_t n = s.size();
    if (n < 3) throw ModelError("amplification: need at least 3 grid points");
    if (j_e.size() != n || j_b.size() != n || j_c.size() != n) {
        throw ModelError("amplification: current arrays do not match the grid");
    }
    const bool up = s[1] > s[0];
    for (std::size_t i = 1; i < n; ++i) {
        if (!(up ? s[i] > s[i - 1] : s[i] < s[i - 1])) {
            throw ModelError("amplification: grid is not strictly monotone");
        }
    }
    Amplification a;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double hm = s[i] - s[i - 1];
        const double hp = s[i + 1] - s[i];
        const double de = detail::stencil(hm, hp, j_e[i - 1], j_e[i], j_e[i + 1]);
        const double db = detail::stencil(hm, hp, j_b[i - 1], j_b[i], j_b[i + 1]);
        const double dc = detail::stencil(hm, hp, j_c[i - 1], j_c[i], j_c[i + 1]);
        const double scale = std::max(std::abs(de), std::abs(dc));
        a.beta_plus.push_back(detail::ratio(dc, db, scale));
        a.beta_minus.push_back(detail::ratio(de, db, scale));
    }
    return a;
}

// --------------------------------- sweeps ----------------------------------

enum class SweepAxis { tb, nu };
enum class Spacing { linear, log };

inline std::string_view to_string(SweepAxis a) noexcept { return a == SweepAxis::tb ? "tb" : "nu"; }

struct GridSpec {
    double min{0.0};
    double max{1.0};
    std::size_t points{200};
    Spacing spacing{Spacing::linear};
};

inline std::vector<double> make_grid(const GridSpec& g) {
    if (g.points == 0) throw ModelError("grid: points must be > 0");
    if (g.points < 3) throw ModelError("grid: a sweep needs at least 3 points");
    if (!std::isfinite(g.min) || !std::isfinite(g.max) || !(g.max > g.min)) {
        throw ModelError("grid: need finite min < max");
    }
    if (g.spacing == Spacing::log && !(g.min > 0.0)) {
        throw ModelError("grid: log spacing needs min > 0");
    }
    std::vector<double> out(g.points);
    const double last = static_cast<double>(g.points - 1);
    for (std::size_t i = 0; i < g.points; ++i) {
        const double f = static_cast<double>(i) / last;
        out[i] = g.spacing == Spacing::linear
                     ? g.min + (g.max - g.min) * f
                     : std::exp(std::log(g.min) + (std::log(g.max) - std::log(g.min)) * f);
    }
    out.front() = g.min;
    out.back() = g.max;
    return out;
}

struct SweepConfig {
    SweepAxis axis{SweepAxis::tb};
    GridSpec grid;
    SystemParams params;
    BathSpec baths;
    WeightOptions weights;
    unsigned threads{0};  // 0 = hardware concurrency
};

struct SweepRow {
    double s{0.0};
    std::optional<CurrentsReport> report;
    std::string error_code;  // empty when ok
    std::string error_message;

    bool ok() const noexcept { return report.has_value(); }
};

struct SweepResult {
    SweepAxis axis{SweepAxis::tb};
    std::vector<double> grid;
    std::vector<SweepRow> rows;
    Amplification beta;  // interior points, grid.size() - 2 entries

    std::optional<double> beta_plus_at(std::size_t i) const {
        if (i == 0 || i + 1 >= grid.size()) return std::nullopt;
        return beta.beta_plus[i - 1];
    }
    std::optional<double> beta_minus_at(std::size_t i) const {
        if (i == 0 || i + 1 >= grid.size()) return std::nullopt;
        return beta.beta_minus[i - 1];
    }
    std::size_t error_count() const {
        return static_cast<std::size_t>(
            std::count_if(rows.begin(), rows.end(), [](const SweepRow& r) { return !r.ok(); }));
    }
};

inline SweepRow sweep_point(const SweepConfig& cfg, double s) {
    SweepRow row;
    row.s = s;
    SystemParams p = cfg.params;
    BathSpec b = cfg.baths;
    if (cfg.axis == SweepAxis::tb) {
        b.t_b = s;
    } else {
        p.modulation = with_frequency(p.modulation, s);
    }
    try {
        row.report = evaluate_point(p, b, cfg.weights);
    } catch (const QuadratureError& e) {
        row.error_code = "quadrature";
        row.error_message = e.what();
    } catch (const SolverError& e) {
        row.error_code = "solver";
        row.error_message = e.what();
    } catch (const ModelError& e) {
        row.error_code = "model";
        row.error_message = e.what();
    }
    return row;
}

inline SweepResult run_sweep(const SweepConfig& cfg) {
    if (cfg.axis == SweepAxis::nu && std::holds_alternative<Unmodulated>(cfg.params.modulation)) {
        throw ModelError("sweep: a nu sweep needs a modulated scheme");
    }
    SweepResult res;
    res.axis = cfg.axis;
    res.grid = make_grid(cfg.grid);
    const std::size_t n = res.grid.size();
    res.rows.resize(n);

    unsigned threads = cfg.threads != 0 ? cfg.threads : std::thread::hardware_concurrency();
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) res.rows[i] = sweep_point(cfg, res.grid[i]);
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> je(n, nan), jb(n, nan), jc(n, nan);
    for (std::size_t i = 0; i < n; ++i) {
        if (!res.rows[i].ok()) continue;
        je[i] = res.rows[i].report->j_e;
        jb[i] = res.rows[i].report->j_b;
        jc[i] = res.rows[i].report->j_c;
    }
    res.beta = amplification(res.grid, je, jb, jc);
    return res;
}

} // namespace fqt
