// approx.hpp: closed-form leading-order populations, currents and decay rates
// of the canonical configuration, valid to first order in exp(-Delta/T_E) with
// harmonics |q| <= 1. Used only as an independent check of the numerics.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "fqt/currents.hpp"
#include "fqt/error.hpp"
#include "fqt/floquet.hpp"
#include "fqt/model.hpp"

namespace fqt {

// (e^{nu/T} + 1) / (e^{nu/T} - 1); 1 at T = 0, +inf at nu = 0.
inline double coth_factor(double nu, double t_b) noexcept {
    if (t_b == 0.0) return 1.0;
    if (nu == 0.0) return std::numeric_limits<double>::infinity();
    const double x = nu / t_b;
    return (1.0 + std::exp(-x)) / -std::expm1(-x);
}

// A = P_0 T_B + P_1 nu coth(nu / 2T_B), with the nu -> 0 limit 2 P_1 T_B.
inline double sideband_activity(double p0, double p1, double nu, double t_b) noexcept {
    const double side = nu == 0.0 ? 2.0 * t_b : nu * coth_factor(nu, t_b);
    return p0 * t_b + (p1 > 0.0 ? p1 * side : 0.0);
}

enum class Regime { general, unmodulated, tb_zero };

inline std::string_view to_string(Regime r) noexcept {
    switch (r) {
    case Regime::general: return "general";
    case Regime::unmodulated: return "unmodulated";
    case Regime::tb_zero: return "tb_zero";
    }
    return "?";
}

struct ApproxDecayRates {
    double e_i_iv{0.0};
    double e_ii_iii{0.0};
    double c_iv_iii{0.0};
    double c_i_ii{0.0};
    double b_i_iii{0.0};
    double b_iv_ii{0.0};

    std::array<double, 6> values() const {
        return {e_i_iv, e_ii_iii, c_iv_iii, c_i_ii, b_i_iii, b_iv_ii};
    }
};

struct ApproxReport {
    std::array<double, 4> populations{};  // I, II, III, IV
    double j_e{0.0};
    double j_b{0.0};
    double j_c{0.0};
    ApproxDecayRates decay_rates;
    Regime regime{Regime::general};
};

namespace detail {

struct ApproxInputs {
    double p0{0.0}, p1{0.0}, nu{0.0}, delta{1.0};
    double a{0.0};       // sideband activity A
    double e1{0.0};      // exp(-Delta/T_E)
    double e2{0.0};      // exp(-2 Delta/T_E)
    double norm{1.0};    // 1 + P_0 + 2 P_1
};

inline ApproxInputs approx_inputs(const BathSpec& baths, const HarmonicWeights& w, double delta) {
    validate(baths);
    if (!(delta > 0.0)) throw ModelError("approx: delta must be > 0");
    for (int q = -w.q_max; q <= w.q_max; ++q) {
        if (std::abs(q) > 1 && w(q) != 0.0) {
            throw ModelError("approx: closed forms cover only harmonics |q| <= 1");
        }
    }
    ApproxInputs in;
    in.p0 = w(0);
    in.p1 = w(1);
    in.nu = w.nu;
    in.delta = delta;
    in.a = sideband_activity(in.p0, in.p1, in.nu, baths.t_b);
    in.e1 = std::exp(-delta / baths.t_e);
    in.e2 = std::exp(-2.0 * delta / baths.t_e);
    in.norm = 1.0 + in.p0 + 2.0 * in.p1;
    return in;
}

inline double boltzmann_or_zero(double gap, double t) {
    return t == 0.0 ? 0.0 : std::exp(-gap / t);
}

} // namespace detail

inline std::array<double, 4> approx_populations(const BathSpec& baths, const HarmonicWeights& w,
                                                double delta = 1.0) {
    const auto in = detail::approx_inputs(baths, w, delta);
    const double den = 2.0 * in.a + delta;
    return {in.a / (2.0 * in.norm * den) * in.e2, (in.a + delta) / den * in.e1, 1.0 - in.e1,
            in.a / den * in.e1};
}

// J_E = -J_C = kappa Delta^2 rho_IV, J_B = kappa sum_q P_q (2Delta+q nu)^2 [e^{-(2Delta+q nu)/T_B} - rho_I].
inline std::array<double, 3> approx_currents(const BathSpec& baths, const HarmonicWeights& w,
                                             double delta = 1.0) {
    const auto rho = approx_populations(baths, w, delta);
    const double j_e = baths.kappa * delta * delta * rho[3];
    double j_b = 0.0;
    for (int q = -1; q <= 1; ++q) {
        const double p = w(q);
        if (p == 0.0) continue;
        const double g = 2.0 * delta + q * w.nu;
        j_b += p * g * g * (detail::boltzmann_or_zero(g, baths.t_b) - rho[0]);
    }
    return {j_e, baths.kappa * j_b, -j_e};
}

inline ApproxDecayRates approx_decay_rates(const BathSpec& baths, const HarmonicWeights& w,
                                           double delta = 1.0) {
    const auto in = detail::approx_inputs(baths, w, delta);
    const auto rho = approx_populations(baths, w, delta);
    const double k = baths.kappa;
    const double share = in.a / (2.0 * in.a + delta);

    ApproxDecayRates r;
    r.e_i_iv = -k * delta * (1.0 + 2.0 * in.p0 + 4.0 * in.p1) / (2.0 * in.norm) * share * in.e2;
    r.e_ii_iii = -k * delta * share * in.e1;
    r.c_iv_iii = k * delta * share * in.e1;
    r.c_i_ii = k * delta * rho[0];
    for (int q = -1; q <= 1; ++q) {
        const double p = w(q);
        if (p == 0.0) continue;
        const double g = 2.0 * delta + q * w.nu;
        r.b_i_iii += k * p * g * (rho[0] - detail::boltzmann_or_zero(g, baths.t_b));
    }
    r.b_iv_ii = -k * delta * share * in.e1;
    return r;
}

inline Regime classify_regime(const BathSpec& baths, const HarmonicWeights& w) {
    if (w(0) == 1.0 && w(1) == 0.0) return Regime::unmodulated;
    if (baths.t_b == 0.0) return Regime::tb_zero;
    return Regime::general;
}

inline ApproxReport approximate(const BathSpec& baths, const HarmonicWeights& w,
                                double delta = 1.0) {
    ApproxReport r;
    r.populations = approx_populations(baths, w, delta);
    const auto j = approx_currents(baths, w, delta);
    r.j_e = j[0];
    r.j_b = j[1];
    r.j_c = j[2];
    r.decay_rates = approx_decay_rates(baths, w, delta);
    r.regime = classify_regime(baths, w);
    return r;
}

// Per-level totals: each class total is shared by its two levels.
inline BornMarkovDiagnostic born_markov_guard(const ApproxReport& r, double delta) {
    const auto& g = r.decay_rates;
    const std::array<double, 4> per_class{
        std::abs(g.e_i_iv) + std::abs(g.c_i_ii) + std::abs(g.b_i_iii),
        std::abs(g.e_ii_iii) + std::abs(g.c_i_ii) + std::abs(g.b_iv_ii),
        std::abs(g.e_ii_iii) + std::abs(g.c_iv_iii) + std::abs(g.b_i_iii),
        std::abs(g.e_i_iv) + std::abs(g.c_iv_iii) + std::abs(g.b_iv_ii)};
    std::vector<double> per_level;
    for (double v : per_class) per_level.push_back(0.5 * v);
    return born_markov_guard(per_level, delta);
}

} // namespace fqt
