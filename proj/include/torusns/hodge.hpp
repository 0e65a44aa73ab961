#ifndef TORUSNS_HODGE_HPP
#define TORUSNS_HODGE_HPP

#include <stdexcept>
#include <tuple>

#include "torusns/derham.hpp"
#include "torusns/form_field.hpp"

namespace torusns {

/// Orthonormal basis of the harmonic space H^i: the constant unit forms, one
/// per increasing multi-index.
inline std::vector<FormField> harmonic_basis(const Grid& g, int degree) {
    std::vector<FormField> basis;
    const int rank = binomial(g.dim(), degree);
    for (int q = 0; q < rank; ++q) {
        FormField b(g, degree, Repr::spectral);
        b.comp(q)[0] = 1.0;
        basis.push_back(std::move(b));
    }
    return basis;
}

/// Harmonic projection Pi^i: the k = 0 spectral mode of every component.
inline FormField harmonic_projection(const FormField& u) {
    const FormField us = u.to(Repr::spectral);
    FormField out(u.grid(), u.degree(), Repr::spectral);
    for (int c = 0; c < us.ncomp(); ++c) out.comp(c)[0] = us.comp(c)[0];
    return out.to(u.repr());
}

/// Green operator phi^i of the Laplacian: multiplier 1/omega_k off the
/// harmonic mode, zero on k = 0. Satisfies phi Delta = Delta phi = I - Pi.
inline FormField green_operator(const FormField& u) {
    const Grid& g = u.grid();
    FormField out = u.to(Repr::spectral);
    for (int c = 0; c < out.ncomp(); ++c) {
        auto& data = out.comp(c);
        for_each_mode(g, [&](size_t p, const std::array<int, 3>& k) {
            const double w = laplace_multiplier(k, g.dim());
            data[p] = w > 0.0 ? data[p] / w : 0.0;
        });
    }
    return out.repr() == u.repr() ? out : out.to(u.repr());
}

/// Potential Phi_i = (A^i)^* phi^{i+1} mapping degree i+1 to degree i; its
/// output is co-closed.
inline FormField potential_phi(const FormField& u) {
    if (u.degree() == 0) throw std::invalid_argument("potential_phi: needs degree >= 1");
    return codifferential(green_operator(u));
}

/// Potential Phi-hat^i = A^i phi^i mapping degree i to degree i+1; its output
/// is closed.
inline FormField potential_phi_hat(const FormField& u) {
    return differential(green_operator(u));
}

/// Leray-Helmholtz projector pi^i = (A^i)^* A^i phi^i + Pi^i. Annihilates
/// exact forms; output is co-closed; for 1-forms this is the classical
/// mode-wise I - k k^T / |k|^2 deflection.
inline FormField leray_projection(const FormField& u) {
    const Grid& g = u.grid();
    FormField out = harmonic_projection(u.to(Repr::spectral));
    if (u.degree() < g.dim()) out += codifferential(differential(green_operator(u)));
    return out.to(u.repr());
}

/// Hodge decomposition u = exact + coexact + harmonic with
/// exact = A^{i-1} Phi_{i-1} u and coexact = Phi_i A^i u.
inline std::tuple<FormField, FormField, FormField> hodge_decompose(const FormField& u) {
    const Grid& g = u.grid();
    const FormField us = u.to(Repr::spectral);
    FormField exact(g, u.degree(), Repr::spectral);
    FormField coexact(g, u.degree(), Repr::spectral);
    if (u.degree() > 0) exact = differential(potential_phi(us));
    if (u.degree() < g.dim()) coexact = potential_phi(differential(us));
    FormField harmonic = harmonic_projection(us);
    return {exact.to(u.repr()), coexact.to(u.repr()), harmonic.to(u.repr())};
}

struct RangeCompatibility {
    bool compatible = false;
    double max_pairing = 0.0;       // worst harmonic pairing defect
    double closedness_defect = 0.0; // precondition residual
};

/// Range condition for the system A^i u = f, (A^{i-1})^* u = g: the pairings
/// (f, h) + (g, h-hat) must vanish for all harmonic h, h-hat. Here f has
/// degree i+1 (closed) and g degree i-1 (co-closed).
inline RangeCompatibility range_compatibility(const FormField& f, const FormField& g_form,
                                              double tol = 1e-10) {
    RangeCompatibility rep;
    const Grid& g = f.grid();
    double fnorm = std::max(1.0, f.l2_norm());
    double gnorm = std::max(1.0, g_form.l2_norm());
    if (f.degree() < g.dim())
        rep.closedness_defect = differential(f).l2_norm() / fnorm;
    if (g_form.degree() > 0)
        rep.closedness_defect =
            std::max(rep.closedness_defect, codifferential(g_form).l2_norm() / gnorm);
    if (rep.closedness_defect > tol)
        throw std::invalid_argument("range_compatibility: f must be closed and g co-closed");
    // On the flat torus the harmonic pairings are just the k = 0 coefficients.
    const FormField fs = f.to(Repr::spectral);
    const FormField gs = g_form.to(Repr::spectral);
    for (int c = 0; c < fs.ncomp(); ++c)
        rep.max_pairing = std::max(rep.max_pairing, std::abs(fs.comp(c)[0]));
    for (int c = 0; c < gs.ncomp(); ++c)
        rep.max_pairing = std::max(rep.max_pairing, std::abs(gs.comp(c)[0]));
    rep.compatible = rep.max_pairing <= tol * std::max(fnorm, gnorm);
    return rep;
}

} // namespace torusns

#endif
