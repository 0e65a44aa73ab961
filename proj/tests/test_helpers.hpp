#ifndef TORUSNS_TEST_HELPERS_HPP
#define TORUSNS_TEST_HELPERS_HPP

#include <random>

#include "torusns/hodge.hpp"

namespace torusns::testing {

inline std::mt19937_64 rng(uint64_t seed) { return std::mt19937_64(seed); }

/// Field with a single spatial profile g(x) = sin(2 pi x_axis) in one component.
inline FormField sine_field(const Grid& g, int degree, int comp, int axis) {
    FormField u(g, degree, Repr::physical);
    for (size_t p = 0; p < g.size(); ++p) {
        const auto idx = g.unflat(p);
        u.comp(comp)[p] = std::sin(two_pi * g.coord(axis, idx[static_cast<size_t>(axis)]));
    }
    return u;
}

inline FormField cosine_field(const Grid& g, int degree, int comp, int axis) {
    FormField u(g, degree, Repr::physical);
    for (size_t p = 0; p < g.size(); ++p) {
        const auto idx = g.unflat(p);
        u.comp(comp)[p] = std::cos(two_pi * g.coord(axis, idx[static_cast<size_t>(axis)]));
    }
    return u;
}

inline FormField constant_field(const Grid& g, int degree, double value) {
    FormField u(g, degree, Repr::physical);
    for (int c = 0; c < u.ncomp(); ++c)
        for (size_t p = 0; p < g.size(); ++p) u.comp(c)[p] = value;
    return u;
}

inline FormField random_solenoidal(const Grid& g, std::mt19937_64& r, int kmax = -1,
                                   double amplitude = 1.0) {
    return leray_projection(remove_mean(random_band_limited(g, 1, r, kmax, amplitude)));
}

/// Largest relative deviation of spectral conjugate symmetry
/// u_hat(-k) = conj(u_hat(k)) of a field that should be real.
inline double conjugate_symmetry_defect(const FormField& u) {
    const FormField us = u.to(Repr::spectral);
    const Grid& g = us.grid();
    double defect = 0.0;
    for (int c = 0; c < us.ncomp(); ++c) {
        for (size_t p = 0; p < g.size(); ++p) {
            auto idx = g.unflat(p);
            std::array<int, 3> neg{0, 0, 0};
            for (int a = 0; a < g.dim(); ++a)
                neg[static_cast<size_t>(a)] =
                    (g.res(a) - idx[static_cast<size_t>(a)]) % g.res(a);
            const auto z = us.comp(c)[p];
            const auto w = us.comp(c)[g.flat(neg)];
            defect = std::max(defect, std::abs(z - std::conj(w)));
        }
    }
    return defect;
}

} // namespace torusns::testing

#endif
