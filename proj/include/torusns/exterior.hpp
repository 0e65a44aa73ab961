#ifndef TORUSNS_EXTERIOR_HPP
#define TORUSNS_EXTERIOR_HPP

#include <stdexcept>

#include "torusns/form_field.hpp"

namespace torusns {

/// Pointwise exterior product of a degree-p and a degree-q form (physical
/// representation). No dealiasing here; callers forming nonlinear terms
/// truncate inputs and outputs themselves.
inline FormField wedge(const FormField& a, const FormField& b) {
    if (a.grid() != b.grid()) throw std::invalid_argument("wedge: grid mismatch");
    if (a.repr() != Repr::physical || b.repr() != Repr::physical)
        throw std::invalid_argument("wedge: operands must be physical");
    const int n = a.grid().dim();
    if (a.degree() + b.degree() > n)
        throw std::invalid_argument("wedge: degree overflow");
    FormField out(a.grid(), a.degree() + b.degree(), Repr::physical);
    for (int ca = 0; ca < a.ncomp(); ++ca) {
        const IndexMask mi = a.masks()[static_cast<size_t>(ca)];
        for (int cb = 0; cb < b.ncomp(); ++cb) {
            const IndexMask mj = b.masks()[static_cast<size_t>(cb)];
            const int sign = wedge_sign(mi, mj);
            if (sign == 0) continue;
            const int co = mask_position(n, mi | mj);
            auto& dst = out.comp(co);
            const auto& pa = a.comp(ca);
            const auto& pb = b.comp(cb);
            const double s = static_cast<double>(sign);
            for (size_t p = 0; p < dst.size(); ++p) dst[p] += s * pa[p] * pb[p];
        }
    }
    return out;
}

/// Euclidean Hodge star: *(dx^I) = sign(I, I^c) dx^{I^c}. Acts componentwise
/// by permutation and sign, in either representation.
inline FormField hodge_star(const FormField& a) {
    const int n = a.grid().dim();
    FormField out(a.grid(), n - a.degree(), a.repr());
    for (int c = 0; c < a.ncomp(); ++c) {
        const IndexMask mi = a.masks()[static_cast<size_t>(c)];
        const IndexMask mc = ((IndexMask{1} << n) - 1) & ~mi;
        const double s = static_cast<double>(star_sign(n, mi));
        auto& dst = out.comp(mask_position(n, mc));
        const auto& src = a.comp(c);
        for (size_t p = 0; p < src.size(); ++p) dst[p] = s * src[p];
    }
    return out;
}

/// L2 pairing (u, v)_i on the unit-volume torus. Parseval in spectral
/// representation, trapezoidal (= exact for band-limited fields) in physical.
inline double inner_product(const FormField& a, const FormField& b) {
    if (a.grid() != b.grid() || a.degree() != b.degree())
        throw std::invalid_argument("inner_product: degree/grid mismatch");
    const FormField ar = a.repr() == b.repr() ? a : a.to(b.repr());
    double s = 0.0;
    for (int c = 0; c < ar.ncomp(); ++c) {
        const auto& pa = ar.comp(c);
        const auto& pb = b.comp(c);
        for (size_t p = 0; p < pa.size(); ++p)
            s += pa[p].real() * pb[p].real() + pa[p].imag() * pb[p].imag();
    }
    if (b.repr() == Repr::physical) s /= static_cast<double>(a.grid().size());
    return s;
}

} // namespace torusns

#endif
