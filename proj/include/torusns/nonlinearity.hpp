#ifndef TORUSNS_NONLINEARITY_HPP
#define TORUSNS_NONLINEARITY_HPP

#include <optional>
#include <stdexcept>
#include <vector>

#include "torusns/hodge.hpp"

namespace torusns {

/// One entry of an explicit bilinear coefficient table:
/// out[out_index] += coeff * in1[in1_index] * in2[in2_index] pointwise.
struct BilinearEntry {
    int out_index;
    int in1_index;
    int in2_index;
    double coeff;
};

/// The pair of bilinear fiber maps (M_1, M_2) defining the nonlinearity, with
/// their pointwise bound constants. The default is the wedge/star table of
/// the de Rham complex at degree 1 (the Navier-Stokes case); arbitrary maps
/// are accepted as explicit coefficient tables over the multi-index bases.
struct BilinearSpec {
    // M_1 : E^{i+1} x E^i -> E^i,  M_2 : E^i x E^i -> E^{i-1}
    std::optional<std::vector<BilinearEntry>> m1_table;
    std::optional<std::vector<BilinearEntry>> m2_table;
    double c1 = 1.0;
    double c2 = 0.5;
};

namespace detail {

inline FormField apply_table(const std::vector<BilinearEntry>& table, const FormField& a,
                             const FormField& b, int out_degree) {
    FormField out(a.grid(), out_degree, Repr::physical);
    for (const auto& e : table) {
        auto& dst = out.comp(e.out_index);
        const auto& pa = a.comp(e.in1_index);
        const auto& pb = b.comp(e.in2_index);
        for (size_t p = 0; p < dst.size(); ++p) dst[p] += e.coeff * pa[p] * pb[p];
    }
    return out;
}

} // namespace detail

/// M_1(w, u) = *( *w ^ u ) for w of degree i+1 and u of degree i. In the de
/// Rham picture at i = 1 this is (rot v) x u, the active part of the Lamb
/// form. Operands must be dealiased by the caller; the product itself is
/// pointwise.
inline FormField m1(const FormField& w, const FormField& u, const BilinearSpec& spec = {}) {
    if (w.grid() != u.grid()) throw std::invalid_argument("m1: grid mismatch");
    if (w.degree() != u.degree() + 1) throw std::invalid_argument("m1: degree mismatch");
    const FormField wp = w.to(Repr::physical);
    const FormField up = u.to(Repr::physical);
    if (spec.m1_table) return detail::apply_table(*spec.m1_table, wp, up, u.degree());
    if (u.degree() != 1)
        throw std::invalid_argument("m1: de Rham default defined for degree 1; supply a table");
    // *( *w ^ u ): degrees (n-2) + 1 -> n-1 -> 1.
    return hodge_star(wedge(hodge_star(wp), up));
}

/// M_2(v, u) = *( u ^ *v ) / 2 for u, v of degree i. At i = 1 this is the
/// 0-form (u . v)/2, the gradient part of the Lamb form.
inline FormField m2(const FormField& v, const FormField& u, const BilinearSpec& spec = {}) {
    if (v.grid() != u.grid()) throw std::invalid_argument("m2: grid mismatch");
    if (v.degree() != u.degree()) throw std::invalid_argument("m2: degree mismatch");
    const FormField vp = v.to(Repr::physical);
    const FormField up = u.to(Repr::physical);
    if (spec.m2_table) return detail::apply_table(*spec.m2_table, vp, up, u.degree() - 1);
    if (u.degree() != 1)
        throw std::invalid_argument("m2: de Rham default defined for degree 1; supply a table");
    FormField res = hodge_star(wedge(up, hodge_star(vp)));
    res *= 0.5;
    return res;
}

/// The nonlinearity N(v) = M_1(Av, v) + A^{i-1} M_2(v, v). Derivatives are
/// spectral; products are formed in physical space with 2/3 dealiasing of
/// inputs and outputs.
inline FormField advect(const FormField& v, const BilinearSpec& spec = {}) {
    const FormField vd = dealias(v).to(Repr::physical);
    const FormField av = dealias(differential(v)).to(Repr::physical);
    FormField out = dealias(m1(av, vd, spec));
    if (v.degree() > 0) {
        const FormField q = dealias(m2(vd, vd, spec));
        out += differential(q).to(out.repr());
    }
    return out;
}

/// Frechet derivative of the nonlinearity at u0:
/// N'|_{u0} v = M_1(Av, u0) + M_1(A u0, v) + A^{i-1}( M_2(v, u0) + M_2(u0, v) ).
inline FormField advect_derivative(const FormField& u0, const FormField& v,
                                   const BilinearSpec& spec = {}) {
    if (u0.grid() != v.grid() || u0.degree() != v.degree())
        throw std::invalid_argument("advect_derivative: operand mismatch");
    const FormField u0d = dealias(u0).to(Repr::physical);
    const FormField vd = dealias(v).to(Repr::physical);
    const FormField au0 = dealias(differential(u0)).to(Repr::physical);
    const FormField av = dealias(differential(v)).to(Repr::physical);
    FormField out = dealias(m1(av, u0d, spec) + m1(au0, vd, spec));
    if (v.degree() > 0) {
        const FormField q = dealias(m2(vd, u0d, spec) + m2(u0d, vd, spec));
        out += differential(q).to(out.repr());
    }
    return out;
}

/// pi N(v): the Leray projection kills the exact M_2 term, so only
/// pi M_1(Av, v) survives. Both routes agree; the short form is used.
inline FormField projected_advect(const FormField& v, const BilinearSpec& spec = {}) {
    const FormField vd = dealias(v).to(Repr::physical);
    const FormField av = dealias(differential(v)).to(Repr::physical);
    return leray_projection(dealias(m1(av, vd, spec)).to(Repr::spectral));
}

/// pi N'|_{u0} v, the projected linearization (only the M_1 terms survive).
inline FormField projected_advect_derivative(const FormField& u0, const FormField& v,
                                             const BilinearSpec& spec = {}) {
    const FormField u0d = dealias(u0).to(Repr::physical);
    const FormField vd = dealias(v).to(Repr::physical);
    const FormField au0 = dealias(differential(u0)).to(Repr::physical);
    const FormField av = dealias(differential(v)).to(Repr::physical);
    return leray_projection(dealias(m1(av, u0d, spec) + m1(au0, vd, spec)).to(Repr::spectral));
}

} // namespace torusns

#endif
