// floquet.hpp: Floquet sideband weights P_q of the modulated base qubit.
//
// P_q = |xi(q)|^2 with
//     xi(q) = (1/tau) \int_0^tau exp(-i phi(t)) exp(i q nu t) dt,
//     phi(t) = \int_0^t (omega_B(s) - omega_0) ds.
// Two backends: the leading-harmonic closed forms used for figure reproduction,
// and a refined trapezoidal quadrature of xi(q).

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <sstream>
#include <type_traits>
#include <vector>

#include "fqt/error.hpp"
#include "fqt/model.hpp"

namespace fqt {

inline constexpr int max_harmonic_order = 10;

struct HarmonicWeights {
    int q_max{0};
    std::vector<double> p{1.0};  // p[q + q_max]
    double normalization_defect{0.0};
    double nu{0.0};  // sideband spacing

    double operator()(int q) const noexcept {
        if (q < -q_max || q > q_max) return 0.0;
        return p[static_cast<std::size_t>(q + q_max)];
    }

    double sum() const noexcept {
        double s = 0.0;
        for (double v : p) s += v;
        return s;
    }

    // Divides by the truncated sum; opt-in, never applied implicitly.
    HarmonicWeights renormalized() const {
        const double s = sum();
        if (!(s > 0.0)) throw ModelError("harmonic weights: cannot renormalize a zero sum");
        HarmonicWeights w = *this;
        for (double& v : w.p) v /= s;
        w.normalization_defect = 1.0 - w.sum();
        return w;
    }

    static HarmonicWeights unmodulated() { return HarmonicWeights{}; }
};

namespace detail {

inline HarmonicWeights make_weights(int q_max, std::vector<double> p, double nu) {
    HarmonicWeights w{q_max, std::move(p), 0.0, nu};
    w.normalization_defect = 1.0 - w.sum();
    return w;
}

inline void check_order(int q_max) {
    if (q_max < 0 || q_max > max_harmonic_order) {
        throw ModelError("harmonic weights: q_max must lie in [0, 10]");
    }
}

} // namespace detail

inline HarmonicWeights closed_form_weights(const ModulationScheme& scheme, int q_max = 1) {
    detail::check_order(q_max);
    if (std::holds_alternative<Unmodulated>(scheme)) return HarmonicWeights::unmodulated();
    if (std::holds_alternative<Tabulated>(scheme)) {
        throw ModelError("closed-form weights: no closed form for a tabulated waveform; "
                         "use the quadrature backend");
    }
    if (q_max < 1) throw ModelError("closed-form weights: modulated schemes need q_max >= 1");

    double p0 = 0.0;
    double p1 = 0.0;
    if (const auto* s = std::get_if<Sinusoidal>(&scheme)) {
        if (s->lambda < 0.0 || s->lambda > 1.0) {
            throw ModelError("closed-form weights: lambda violates 0 <= lambda <= 1");
        }
        const double l2 = s->lambda * s->lambda;
        p0 = 1.0 - l2 / 2.0;
        p1 = l2 / 4.0;
    } else {
        p1 = 4.0 / (std::numbers::pi * std::numbers::pi);
    }
    std::vector<double> p(static_cast<std::size_t>(2 * q_max + 1), 0.0);
    p[static_cast<std::size_t>(q_max)] = p0;
    p[static_cast<std::size_t>(q_max - 1)] = p1;
    p[static_cast<std::size_t>(q_max + 1)] = p1;
    return detail::make_weights(q_max, std::move(p), modulation_frequency(scheme));
}

// ------------------------------- quadrature --------------------------------

namespace detail {

// exp(-i phi(t)) over one period, t expressed as the cycle fraction u = t / tau.
class PhaseFactor {
public:
    explicit PhaseFactor(const ModulationScheme& scheme, double omega_0 = 0.0)
        : scheme_(&scheme) {
        if (const auto* tab = std::get_if<Tabulated>(&scheme)) {
            // Cumulative phase at the sample nodes of the periodic linear interpolant.
            const std::size_t n = tab->waveform.size();
            const double dt = (2.0 * std::numbers::pi / tab->nu) / static_cast<double>(n);
            node_phase_.assign(n + 1, 0.0);
            for (std::size_t k = 0; k < n; ++k) {
                const double a = tab->waveform[k] - omega_0;
                const double b = tab->waveform[(k + 1) % n] - omega_0;
                node_phase_[k + 1] = node_phase_[k] + 0.5 * dt * (a + b);
            }
            omega_0_ = omega_0;
        }
    }

    std::complex<double> operator()(double u) const {
        return std::visit([&](const auto& m) { return eval(m, u); }, *scheme_);
    }

private:
    static std::complex<double> eval(const Unmodulated&, double) { return {1.0, 0.0}; }

    static std::complex<double> eval(const Sinusoidal& s, double u) {
        const double phi = s.lambda * (1.0 - std::cos(2.0 * std::numbers::pi * u));
        return std::polar(1.0, -phi);
    }

    // Phase is 0 outside (1/4, 3/4) and pi inside; jumps take the mean of both sides.
    static std::complex<double> eval(const PiFlip&, double u) {
        if (u == 0.25 || u == 0.75) return {0.0, 0.0};
        return (u > 0.25 && u < 0.75) ? std::complex<double>{-1.0, 0.0}
                                      : std::complex<double>{1.0, 0.0};
    }

    std::complex<double> eval(const Tabulated& tab, double u) const {
        const std::size_t n = tab.waveform.size();
        const double x = u * static_cast<double>(n);
        std::size_t k = static_cast<std::size_t>(std::floor(x));
        if (k >= n) k = n - 1;
        const double f = x - static_cast<double>(k);
        const double dt = (2.0 * std::numbers::pi / tab.nu) / static_cast<double>(n);
        const double a = tab.waveform[k] - omega_0_;
        const double b = tab.waveform[(k + 1) % n] - omega_0_;
        const double phi = node_phase_[k] + dt * (a * f + 0.5 * (b - a) * f * f);
        return std::polar(1.0, -phi);
    }

    const ModulationScheme* scheme_;
    std::vector<double> node_phase_;
    double omega_0_{0.0};
};

// Composite trapezoid of xi(q) for q in [-q_max, q_max] on n uniform steps.
inline std::vector<double> trapezoid_weights(const PhaseFactor& phase, int q_max, std::size_t n) {
    const std::size_t m = static_cast<std::size_t>(2 * q_max + 1);
    std::vector<std::complex<double>> xi(m, {0.0, 0.0});
    const double h = 1.0 / static_cast<double>(n);
    for (std::size_t k = 0; k <= n; ++k) {
        const double u = static_cast<double>(k) * h;
        const double w = (k == 0 || k == n) ? 0.5 * h : h;
        const std::complex<double> g = phase(u) * w;
        const std::complex<double> step = std::polar(1.0, 2.0 * std::numbers::pi * u);
        std::complex<double> rot = std::pow(std::conj(step), q_max);
        for (std::size_t j = 0; j < m; ++j) {
            xi[j] += g * rot;
            rot *= step;
        }
    }
    std::vector<double> p(m);
    for (std::size_t j = 0; j < m; ++j) p[j] = std::norm(xi[j]);
    // Enforce exact P_q = P_-q by averaging the two quadrature estimates.
    for (std::size_t j = 0; j < m / 2; ++j) {
        const double avg = 0.5 * (p[j] + p[m - 1 - j]);
        p[j] = avg;
        p[m - 1 - j] = avg;
    }
    return p;
}

} // namespace detail

struct QuadratureOptions {
    std::size_t initial_steps{1024};
    std::size_t max_steps{std::size_t{1} << 20};
    double tolerance{1e-10};
    double omega_0{0.0};
};

// Doubles the step count until successive P_q differ by less than the tolerance.
inline HarmonicWeights quadrature_weights(const ModulationScheme& scheme, int q_max,
                                          const QuadratureOptions& opt = {}) {
    detail::check_order(q_max);
    if (opt.initial_steps < 1024) {
        throw ModelError("quadrature weights: n_steps must be >= 1024");
    }
    if (std::holds_alternative<Unmodulated>(scheme)) {
        return closed_form_weights(scheme, q_max);
    }
    const detail::PhaseFactor phase(scheme, opt.omega_0);
    // Multiple of 4 so the pi-flip kicks land on nodes.
    std::size_t n = (opt.initial_steps + 3) / 4 * 4;
    std::vector<double> prev = detail::trapezoid_weights(phase, q_max, n);
    while (true) {
        if (2 * n > opt.max_steps) {
            std::ostringstream os;
            os << "quadrature weights: step cap " << opt.max_steps << " below initial refinement";
            throw QuadratureError(os.str(), prev, prev);
        }
        n *= 2;
        std::vector<double> next = detail::trapezoid_weights(phase, q_max, n);
        double diff = 0.0;
        for (std::size_t j = 0; j < next.size(); ++j) {
            diff = std::max(diff, std::abs(next[j] - prev[j]));
        }
        if (diff < opt.tolerance) {
            return detail::make_weights(q_max, std::move(next), modulation_frequency(scheme));
        }
        if (2 * n > opt.max_steps) {
            std::ostringstream os;
            os << "quadrature weights: no convergence to " << opt.tolerance << " within "
               << opt.max_steps << " steps (last change " << diff << ")";
            throw QuadratureError(os.str(), std::move(prev), std::move(next));
        }
        prev = std::move(next);
    }
}

enum class WeightsBackend { closed_form, quadrature };

struct WeightOptions {
    WeightsBackend backend{WeightsBackend::closed_form};
    int q_max{1};
    bool renormalize{false};
};

inline HarmonicWeights harmonic_weights(const SystemParams& params, const WeightOptions& opt) {
    HarmonicWeights w;
    if (opt.backend == WeightsBackend::closed_form) {
        w = closed_form_weights(params.modulation, opt.q_max);
    } else {
        QuadratureOptions q;
        q.omega_0 = params.omega_0;
        w = quadrature_weights(params.modulation, opt.q_max, q);
    }
    return opt.renormalize ? w.renormalized() : w;
}

} // namespace fqt
