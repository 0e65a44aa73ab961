#ifndef TORUSNS_PARABOLIC_HPP
#define TORUSNS_PARABOLIC_HPP

#include <cmath>
#include <stdexcept>

#include "torusns/derham.hpp"
#include "torusns/spacetime.hpp"

namespace torusns {

enum class DuhamelQuadrature { exact_mode, trapezoid };

/// Parameters of the parabolic operator L_mu = d/dt + mu * Delta and of its
/// discrete solution operators.
struct ParabolicConfig {
    double mu = 1.0;
    double horizon = 1.0;
    int steps = 1;
    DuhamelQuadrature quadrature = DuhamelQuadrature::exact_mode;

    void validate() const {
        if (mu <= 0.0) throw std::invalid_argument("ParabolicConfig: mu must be positive");
        if (horizon <= 0.0) throw std::invalid_argument("ParabolicConfig: horizon must be positive");
        if (steps < 1) throw std::invalid_argument("ParabolicConfig: need at least one step");
    }
};

/// Heat semigroup Psi^{(in)}: mode-wise decay factor exp(-mu omega_k t).
/// Solves L_mu u = 0 with u(0) = u0; t = 0 is the identity.
inline FormField heat_semigroup(const FormField& u0, double mu, double t) {
    if (t < 0.0) throw std::invalid_argument("heat_semigroup: negative time");
    const Grid& g = u0.grid();
    FormField out = u0.to(Repr::spectral);
    for (int c = 0; c < out.ncomp(); ++c) {
        auto& data = out.comp(c);
        for_each_mode(g, [&](size_t p, const std::array<int, 3>& k) {
            data[p] *= std::exp(-mu * laplace_multiplier(k, g.dim()) * t);
        });
    }
    return out.to(u0.repr());
}

/// Full semigroup trajectory Psi^{(in)} u0 on the solver time grid.
inline SpaceTimeField heat_trajectory(const FormField& u0, const ParabolicConfig& cfg) {
    cfg.validate();
    return SpaceTimeField::sample(cfg.horizon, cfg.steps,
                                  [&](double t) { return heat_semigroup(u0, cfg.mu, t); });
}

namespace detail {

// Exact per-step Duhamel weights for f piecewise linear in time:
// integral over one step of exp(-a (h - s)) * {left, right} hat functions.
struct EtdWeights {
    double decay;  // exp(-a h)
    double wleft;  // weight of f(t_m)
    double wright; // weight of f(t_{m+1})
};

inline EtdWeights etd2_weights(double a, double h) {
    EtdWeights w{};
    const double ah = a * h;
    w.decay = std::exp(-ah);
    if (ah < 1e-5) {
        // series to avoid cancellation: I0 = h(1 - ah/2 + (ah)^2/6 - ...),
        // I1 = h(1/2 - ah/6 + (ah)^2/24 - ...)
        const double i0 = h * (1.0 - ah / 2 + ah * ah / 6 - ah * ah * ah / 24);
        const double i1 = h * (0.5 - ah / 6 + ah * ah / 24 - ah * ah * ah / 120);
        w.wleft = i0 - i1;
        w.wright = i1;
    } else {
        const double i0 = (1.0 - w.decay) / a;                  // int_0^h e^{-a(h-s)} ds
        const double i1 = (1.0 / a) * (1.0 - i0 / h);           // int_0^h e^{-a(h-s)} s/h ds
        w.wleft = i0 - i1;
        w.wright = i1;
    }
    return w;
}

} // namespace detail

/// Duhamel volume potential Psi^{(v)}: u(t) = int_0^t Psi^{(in)}(f(t'), t-t') dt'.
/// Default quadrature integrates each step in closed form with f linear in
/// time between nodes (ETD2); trapezoid quadrature is kept for cross-checks.
/// The accumulation is causal: each node is advanced from the previous one.
inline SpaceTimeField duhamel(const SpaceTimeField& f, const ParabolicConfig& cfg) {
    cfg.validate();
    if (f.steps() != cfg.steps || std::abs(f.horizon() - cfg.horizon) > 1e-14 * cfg.horizon)
        throw std::invalid_argument("duhamel: forcing not sampled on the solver time grid");
    const Grid& g = f.grid();
    const double h = f.dt();
    SpaceTimeField out(g, f.degree(), f.horizon(), f.steps(), Repr::spectral);
    SpaceTimeField fs = f.map([](const FormField& u) { return u.to(Repr::spectral); });
    for (int m = 0; m < f.steps(); ++m) {
        for (int c = 0; c < out.frame(0).ncomp(); ++c) {
            const auto& prev = out.frame(m).comp(c);
            auto& next = out.frame(m + 1).comp(c);
            const auto& fl = fs.frame(m).comp(c);
            const auto& fr = fs.frame(m + 1).comp(c);
            for_each_mode(g, [&](size_t p, const std::array<int, 3>& k) {
                const double a = cfg.mu * laplace_multiplier(k, g.dim());
                if (cfg.quadrature == DuhamelQuadrature::exact_mode) {
                    const auto w = detail::etd2_weights(a, h);
                    next[p] = w.decay * prev[p] + w.wleft * fl[p] + w.wright * fr[p];
                } else {
                    const double decay = std::exp(-a * h);
                    next[p] = decay * (prev[p] + 0.5 * h * fl[p]) + 0.5 * h * fr[p];
                }
            });
        }
    }
    return out;
}

/// Cauchy solution operator Psi(f, u0) = Psi^{(v)} f + Psi^{(in)} u0.
inline SpaceTimeField cauchy_solve(const SpaceTimeField& f, const FormField& u0,
                                   const ParabolicConfig& cfg) {
    SpaceTimeField out = duhamel(f, cfg);
    out += heat_trajectory(u0.to(Repr::spectral), cfg);
    return out;
}

/// Discrete parabolic operator L_mu u = du/dt + mu Delta u (finite differences
/// in time, exact multiplier in space).
inline SpaceTimeField parabolic_operator(const SpaceTimeField& u, double mu) {
    SpaceTimeField lu = time_derivative(u, 1);
    lu += u.map([&](const FormField& v) { return mu * laplacian(v.to(Repr::spectral)); });
    return lu;
}

struct GreenReconstruction {
    SpaceTimeField reconstructed;
    double max_error = 0.0; // sup over nodes of spatial L2 error
};

/// Green-formula identity u = Psi(L_mu u, u(0)): evaluates the right-hand side
/// discretely and reports the reconstruction error.
inline GreenReconstruction green_reconstruct(const SpaceTimeField& u, const ParabolicConfig& cfg) {
    GreenReconstruction rep;
    SpaceTimeField us = u.map([](const FormField& v) { return v.to(Repr::spectral); });
    rep.reconstructed = cauchy_solve(parabolic_operator(us, cfg.mu), us.frame(0), cfg);
    rep.max_error = (rep.reconstructed - us).sup_l2_norm();
    return rep;
}

} // namespace torusns

#endif
