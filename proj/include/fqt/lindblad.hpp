// lindblad.hpp: population-space Floquet–Lindblad generator and its steady state.
//
// After the secular approximation the master equation closes on the level
// populations: d rho / dt = L rho with L[j][i] the rate i -> j (i != j) and
// L[i][i] = -sum_j L[j][i]. Three solution routes are provided: a trace-augmented
// dense solve of the 8-level generator, the 4-class reduced system of the
// canonical (degenerate) configuration, and ODE relaxation used as an oracle.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

#include "fqt/error.hpp"
#include "fqt/floquet.hpp"
#include "fqt/model.hpp"

namespace fqt {

// Ohmic emission rate G(w) = kappa w (1 + nbar(w)), continued to w <= 0 and T = 0.
// G(-w) = exp(-w/T) G(w).
inline double spectral_function(double omega, double T, double kappa) noexcept {
    if (omega == 0.0) return kappa * T;
    if (T == 0.0) return omega > 0.0 ? kappa * omega : 0.0;
    const double den = -std::expm1(-omega / T);
    return kappa * omega / den;
}

struct ChannelRate {
    Bath bath{Bath::emitter};
    std::size_t upper{0};
    std::size_t lower{0};
    int q{0};
    double gap{0.0};        // bare w_ij
    double effective{0.0};  // w_ij + q nu
    double down{0.0};       // upper -> lower
    double up{0.0};         // lower -> upper

    double net_flow(const Eigen::VectorXd& rho) const {
        return down * rho[static_cast<Eigen::Index>(upper)] -
               up * rho[static_cast<Eigen::Index>(lower)];
    }
};

struct RateGenerator {
    std::size_t dimension{level_count};
    Eigen::MatrixXd matrix;
    std::vector<ChannelRate> channels;
    double max_escape_rate{0.0};  // max_i -L[i][i]
    double nu{0.0};
    std::string point;  // parameter echo for diagnostics
};

struct Populations {
    Eigen::VectorXd values;
    double residual_norm{0.0};
    std::vector<std::string> labels;
    std::string method;

    double operator[](std::size_t i) const { return values[static_cast<Eigen::Index>(i)]; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(values.size()); }
};

inline std::string describe(const BathSpec& baths, const HarmonicWeights& w) {
    std::ostringstream os;
    os.precision(17);
    os << "T_E=" << baths.t_e << " T_B=" << baths.t_b << " T_C=" << baths.t_c
       << " kappa=" << baths.kappa << " nu=" << w.nu << " q_max=" << w.q_max;
    return os.str();
}

inline RateGenerator build_generator(const LevelTable& table, const BathSpec& baths,
                                     const HarmonicWeights& weights) {
    validate(baths);
    if (weights.q_max < 0 || weights.p.size() != static_cast<std::size_t>(2 * weights.q_max + 1)) {
        throw ModelError("generator: harmonic weight vector does not match q_max");
    }
    for (double v : weights.p) {
        if (!std::isfinite(v) || v < 0.0) {
            throw ModelError("generator: harmonic weights must be finite and >= 0");
        }
    }

    RateGenerator g;
    g.nu = weights.nu;
    g.point = describe(baths, weights);
    g.matrix = Eigen::MatrixXd::Zero(level_count, level_count);

    auto add = [&](const Transition& t, int q, double p) {
        const double T = baths.temperature(t.bath);
        const double omega = t.gap + q * weights.nu;
        ChannelRate c{t.bath, t.upper, t.lower, q, t.gap, omega,
                      p * spectral_function(omega, T, baths.kappa),
                      p * spectral_function(-omega, T, baths.kappa)};
        const auto u = static_cast<Eigen::Index>(t.upper);
        const auto l = static_cast<Eigen::Index>(t.lower);
        g.matrix(l, u) += c.down;
        g.matrix(u, u) -= c.down;
        g.matrix(u, l) += c.up;
        g.matrix(l, l) -= c.up;
        g.channels.push_back(c);
    };

    for (const Transition& t : table.transitions) {
        if (t.bath != Bath::base) {
            add(t, 0, 1.0);
            continue;
        }
        for (int q = -weights.q_max; q <= weights.q_max; ++q) {
            const double p = weights(q);
            if (p > 0.0) add(t, q, p);
        }
    }
    g.max_escape_rate = (-g.matrix.diagonal()).maxCoeff();
    return g;
}

// ------------------------------ steady state -------------------------------

namespace detail {

// Grassmann–Taksar–Heyman state reduction. Subtraction-free, so it keeps full
// relative accuracy on nearly decomposable chains where LU loses it.
inline Eigen::VectorXd gth_stationary(const Eigen::MatrixXd& L, const std::string& point) {
    const Eigen::Index n = L.rows();
    Eigen::MatrixXd Q = L.transpose();  // Q(i, j) = rate i -> j
    Q.diagonal().setZero();
    for (Eigen::Index k = n - 1; k > 0; --k) {
        const double s = Q.row(k).head(k).sum();
        if (!(s > 0.0)) {
            throw SolverError("steady state: generator is reducible (no unique steady state) at " +
                              point);
        }
        for (Eigen::Index i = 0; i < k; ++i) {
            const double f = Q(i, k) / s;
            if (f == 0.0) continue;
            for (Eigen::Index j = 0; j < k; ++j) {
                if (j != i) Q(i, j) += f * Q(k, j);
            }
        }
        Q.col(k).head(k) /= s;
    }
    Eigen::VectorXd pi = Eigen::VectorXd::Zero(n);
    pi[0] = 1.0;
    for (Eigen::Index k = 1; k < n; ++k) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < k; ++i) acc += pi[i] * Q(i, k);
        pi[k] = acc;
    }
    return pi / pi.sum();
}

inline std::vector<std::string> level_labels(std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 1; i <= n; ++i) out.push_back(std::to_string(i));
    return out;
}

inline void finalize(Populations& pop, const Eigen::MatrixXd& L, const std::string& point) {
    Eigen::VectorXd& v = pop.values;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i])) {
            throw SolverError("steady state: non-finite population at " + point);
        }
        if (v[i] < 0.0) {
            if (v[i] < -1e-12) {
                std::ostringstream os;
                os << "steady state: negative population rho_" << i + 1 << " = " << v[i]
                   << " at " << point;
                throw SolverError(os.str());
            }
            v[i] = 0.0;
        }
    }
    v /= v.sum();
    pop.residual_norm = (L * v).cwiseAbs().maxCoeff();
    if (!(pop.residual_norm < 1e-10)) {
        std::ostringstream os;
        os << "steady state: residual " << pop.residual_norm << " exceeds 1e-10 at " << point;
        throw SolverError(os.str());
    }
}

} // namespace detail

// Above this condition estimate the LU answer is handed over to GTH.
inline constexpr double lu_condition_limit = 1e8;

inline Populations steady_state(const RateGenerator& gen) {
    const Eigen::MatrixXd& L = gen.matrix;
    const Eigen::Index n = L.rows();
    if (n == 0 || L.cols() != n) throw ModelError("steady state: generator must be square");

    Eigen::MatrixXd A = L;
    A.row(n - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs[n - 1] = 1.0;

    Populations pop;
    pop.labels = detail::level_labels(static_cast<std::size_t>(n));
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    const double rcond = lu.rcond();
    if (rcond > 0.0 && 1.0 / rcond <= lu_condition_limit) {
        pop.values = lu.solve(rhs);
        pop.method = "lu";
    } else {
        pop.values = detail::gth_stationary(L, gen.point);
        pop.method = "gth";
    }
    detail::finalize(pop, L, gen.point);
    return pop;
}

// Class sums rho_I..rho_IV (or one entry per degeneracy class in general).
inline Populations class_populations(const Populations& full, const LevelTable& table) {
    const auto classes = degeneracy_classes(table);
    Populations out;
    out.values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(classes.size()));
    for (std::size_t k = 0; k < classes.size(); ++k) {
        for (std::size_t i : classes[k].levels) out.values[static_cast<Eigen::Index>(k)] += full[i];
        out.labels.push_back(k < class_names.size() ? std::string(class_names[k])
                                                    : std::to_string(k + 1));
    }
    out.residual_norm = full.residual_norm;
    out.method = full.method;
    return out;
}

// Class-level rates of the canonical configuration.
struct ClassRates {
    double a{0.0}, a_up{0.0};  // emitter, gap Delta
    double c{0.0}, c_up{0.0};  // collector, gap Delta
    double b{0.0}, b_up{0.0};  // base I <-> III, gap 2 Delta + q nu
    double d{0.0};             // base II <-> IV, gap q nu (symmetric)
};

inline ClassRates class_rates(double delta, const BathSpec& baths, const HarmonicWeights& w) {
    ClassRates r;
    r.a = spectral_function(delta, baths.t_e, baths.kappa);
    r.a_up = spectral_function(-delta, baths.t_e, baths.kappa);
    r.c = spectral_function(delta, baths.t_c, baths.kappa);
    r.c_up = spectral_function(-delta, baths.t_c, baths.kappa);
    for (int q = -w.q_max; q <= w.q_max; ++q) {
        const double p = w(q);
        if (p <= 0.0) continue;
        const double gap = 2.0 * delta + q * w.nu;
        r.b += p * spectral_function(gap, baths.t_b, baths.kappa);
        r.b_up += p * spectral_function(-gap, baths.t_b, baths.kappa);
        r.d += p * spectral_function(q * w.nu, baths.t_b, baths.kappa);
    }
    return r;
}

// Balance equations for I, II, III plus the trace row, solved for
// (rho_I, rho_II, rho_III, rho_IV). Requires the canonical configuration.
inline Populations reduced_steady_state(const SystemParams& params, const BathSpec& baths,
                                        const HarmonicWeights& weights) {
    if (!params.is_canonical()) {
        throw ModelError("reduced steady state: parameters are not the canonical degenerate "
                         "configuration; use the full 8-level solver");
    }
    validate(baths);
    const ClassRates r = class_rates(params.delta(), baths, weights);

    Eigen::Matrix4d M;
    M << -(r.a + r.c + r.b), r.c_up, r.b_up, r.a_up,
         r.c, -(r.c_up + r.a + r.d), r.a_up, r.d,
         r.b, r.a, -(r.a_up + r.b_up + r.c_up), r.c,
         1.0, 1.0, 1.0, 1.0;
    const Eigen::Vector4d rhs(0.0, 0.0, 0.0, 1.0);

    Eigen::Matrix4d L = M;
    L.row(3) << r.a, r.d, r.c_up, -(r.a_up + r.d + r.c);

    Populations pop;
    pop.values = Eigen::PartialPivLU<Eigen::Matrix4d>(M).solve(rhs);
    pop.labels = {"I", "II", "III", "IV"};
    pop.method = "reduced";
    detail::finalize(pop, L, describe(baths, weights));
    return pop;
}

// ------------------------------ ODE oracle ---------------------------------

struct RelaxOptions {
    double t_max{1e7};
    double tol{1e-13};
    double abs_err{1e-15};
    double rel_err{1e-13};
};

// Integrates d rho/dt = L rho (adaptive Dormand–Prince) until max|L rho| < tol.
inline Populations relax_to_steady_state(const RateGenerator& gen, const Populations& rho0,
                                         const RelaxOptions& opt = {}) {
    using State = std::vector<double>;
    namespace ode = boost::numeric::odeint;

    const Eigen::MatrixXd& L = gen.matrix;
    const auto n = static_cast<std::size_t>(L.rows());
    if (rho0.size() != n) throw ModelError("relaxation: initial state has the wrong dimension");
    const double total = rho0.values.sum();
    if (std::abs(total - 1.0) > 1e-12 || rho0.values.minCoeff() < 0.0) {
        throw ModelError("relaxation: initial state is not a probability vector");
    }

    auto rhs = [&L, n](const State& x, State& dxdt, double) {
        const Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(n));
        Eigen::Map<Eigen::VectorXd> dv(dxdt.data(), static_cast<Eigen::Index>(n));
        dv.noalias() = L * xv;
    };
    auto residual = [&L, n](const State& x) {
        const Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(n));
        return (L * xv).cwiseAbs().maxCoeff();
    };

    State x(rho0.values.data(), rho0.values.data() + n);
    auto stepper = ode::make_controlled(opt.abs_err, opt.rel_err, ode::runge_kutta_dopri5<State>{});
    double t = 0.0;
    double dt = 1e-3;
    double res = residual(x);
    while (res >= opt.tol) {
        if (t >= opt.t_max) {
            std::ostringstream os;
            os << "relaxation: t_max " << opt.t_max << " reached with residual " << res << " at "
               << gen.point;
            throw SolverError(os.str());
        }
        dt = std::min(dt, opt.t_max - t);
        if (stepper.try_step(rhs, x, t, dt) == ode::success) res = residual(x);
    }

    Populations pop;
    pop.values = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(n));
    pop.values /= pop.values.sum();
    pop.residual_norm = residual(x);
    pop.labels = rho0.labels.empty() ? detail::level_labels(n) : rho0.labels;
    pop.method = "relax";
    return pop;
}

inline Populations uniform_populations(std::size_t n = level_count) {
    Populations p;
    p.values = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n));
    p.labels = detail::level_labels(n);
    return p;
}

} // namespace fqt
