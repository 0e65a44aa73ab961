#ifndef TORUSNS_DERHAM_HPP
#define TORUSNS_DERHAM_HPP

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "torusns/exterior.hpp"
#include "torusns/form_field.hpp"

namespace torusns {

/// Static description of the de Rham complex on the n-torus.
struct ComplexSpec {
    int dim;
    int fiber_rank(int degree) const { return binomial(dim, degree); }
    /// Euler characteristic of the fiber ranks vanishes for n >= 1.
    int rank_alternating_sum() const {
        int s = 0;
        for (int i = 0; i <= dim; ++i) s += (i % 2 == 0 ? 1 : -1) * fiber_rank(i);
        return s;
    }
};

/// Positive Laplace multiplier 4 pi^2 |k|^2 (derivative-convention k).
inline double laplace_multiplier(const std::array<int, 3>& k, int n) {
    double s = 0.0;
    for (int a = 0; a < n; ++a) s += static_cast<double>(k[static_cast<size_t>(a)]) * k[static_cast<size_t>(a)];
    return two_pi * two_pi * s;
}

/// Exterior derivative d^i, exact Fourier multiplier per mode:
/// (du)_J = sum over j in J of insert_sign * (2 pi i k_j) u_{J \ j}.
inline FormField differential(const FormField& u) {
    const Grid& g = u.grid();
    const int n = g.dim();
    if (u.degree() >= n)
        throw std::invalid_argument("differential: top-degree form");
    const FormField us = u.to(Repr::spectral);
    FormField out(g, u.degree() + 1, Repr::spectral);
    for (int co = 0; co < out.ncomp(); ++co) {
        const IndexMask mj = out.masks()[static_cast<size_t>(co)];
        auto& dst = out.comp(co);
        for (int axis = 0; axis < n; ++axis) {
            if (!(mj & (IndexMask{1} << axis))) continue;
            const IndexMask mi = mj & ~(IndexMask{1} << axis);
            const double sign = static_cast<double>(insert_sign(mi, axis));
            const auto& src = us.comp(mask_position(n, mi));
            for_each_mode(g, [&](size_t p, const std::array<int, 3>& k) {
                const std::complex<double> mult(0.0, sign * two_pi * k[static_cast<size_t>(axis)]);
                dst[p] += mult * src[p];
            });
        }
    }
    return out;
}

/// Formal adjoint (A^i)^*: conjugate-transpose multiplier of the differential.
/// The codifferential of a 0-form is conventionally zero.
inline FormField codifferential(const FormField& u) {
    const Grid& g = u.grid();
    const int n = g.dim();
    if (u.degree() == 0) return FormField(g, 0, Repr::spectral);
    const FormField us = u.to(Repr::spectral);
    FormField out(g, u.degree() - 1, Repr::spectral);
    for (int co = 0; co < out.ncomp(); ++co) {
        const IndexMask mi = out.masks()[static_cast<size_t>(co)];
        auto& dst = out.comp(co);
        for (int axis = 0; axis < n; ++axis) {
            if (mi & (IndexMask{1} << axis)) continue;
            const double sign = static_cast<double>(insert_sign(mi, axis));
            const auto& src = us.comp(mask_position(n, mi | (IndexMask{1} << axis)));
            for_each_mode(g, [&](size_t p, const std::array<int, 3>& k) {
                const std::complex<double> mult(0.0, -sign * two_pi * k[static_cast<size_t>(axis)]);
                dst[p] += mult * src[p];
            });
        }
    }
    return out;
}

/// Hodge Laplacian Delta^i = (A^i)^* A^i + A^{i-1} (A^{i-1})^*. On the flat
/// torus this is the componentwise positive Laplacian; evaluated here as the
/// diagonal multiplier.
inline FormField laplacian(const FormField& u) {
    const Grid& g = u.grid();
    FormField out = u.to(Repr::spectral);
    for (int c = 0; c < out.ncomp(); ++c) {
        auto& data = out.comp(c);
        for_each_mode(g, [&](size_t p, const std::array<int, 3>& k) {
            data[p] *= laplace_multiplier(k, g.dim());
        });
    }
    return out.repr() == u.repr() ? out : out.to(u.repr());
}

/// Laplacian via operator composition (used to cross-check the multiplier form).
inline FormField laplacian_composed(const FormField& u) {
    const Grid& g = u.grid();
    const int n = g.dim();
    FormField out(g, u.degree(), Repr::spectral);
    if (u.degree() < n) out += codifferential(differential(u));
    if (u.degree() > 0) out += differential(codifferential(u));
    return out;
}

struct EllipticityReport {
    bool elliptic = true;
    double min_eigenvalue_ratio = 0.0; // min over samples of lambda_min / |xi|^2
    double max_deviation = 0.0;        // max | lambda - |xi|^2 | / |xi|^2
};

/// Checks the principal symbol sigma^2(Delta^i)(xi) = |xi|^2 I on sampled
/// nonzero directions. The symbol is assembled from the wedge combinatorics
/// (sigma(d)(xi) = xi ^ ., sigma(d^*)(xi) = interior product), so the check is
/// independent of the Fourier-multiplier implementation.
inline EllipticityReport check_ellipticity(int n, int degree,
                                           const std::vector<std::array<double, 3>>& directions) {
    EllipticityReport rep;
    rep.min_eigenvalue_ratio = 1e300;
    const auto masks_i = degree_masks(n, degree);
    const auto masks_up = degree < n ? degree_masks(n, degree + 1) : std::vector<IndexMask>{};
    const auto masks_dn = degree > 0 ? degree_masks(n, degree - 1) : std::vector<IndexMask>{};
    for (const auto& xi : directions) {
        double xi2 = 0.0;
        for (int a = 0; a < n; ++a) xi2 += xi[static_cast<size_t>(a)] * xi[static_cast<size_t>(a)];
        if (xi2 == 0.0) throw std::invalid_argument("check_ellipticity: xi must be nonzero");
        const int r = static_cast<int>(masks_i.size());
        // sigma(d): rows masks_up, cols masks_i
        std::vector<std::vector<double>> dup(masks_up.size(), std::vector<double>(static_cast<size_t>(r), 0.0));
        for (size_t row = 0; row < masks_up.size(); ++row)
            for (int col = 0; col < r; ++col) {
                const IndexMask mi = masks_i[static_cast<size_t>(col)];
                const IndexMask mj = masks_up[row];
                if ((mj & ~mi) == 0 || mask_degree(mj & ~mi) != 1) continue;
                const int axis = std::countr_zero(mj & ~mi);
                if ((mi | (IndexMask{1} << axis)) != mj) continue;
                dup[row][static_cast<size_t>(col)] =
                    insert_sign(mi, axis) * xi[static_cast<size_t>(axis)];
            }
        // sigma(d) one level down: rows masks_i, cols masks_dn
        std::vector<std::vector<double>> ddn(static_cast<size_t>(r), std::vector<double>(masks_dn.size(), 0.0));
        for (int row = 0; row < r; ++row)
            for (size_t col = 0; col < masks_dn.size(); ++col) {
                const IndexMask mi = masks_dn[col];
                const IndexMask mj = masks_i[static_cast<size_t>(row)];
                if ((mj & ~mi) == 0 || mask_degree(mj & ~mi) != 1) continue;
                const int axis = std::countr_zero(mj & ~mi);
                if ((mi | (IndexMask{1} << axis)) != mj) continue;
                ddn[static_cast<size_t>(row)][col] =
                    insert_sign(mi, axis) * xi[static_cast<size_t>(axis)];
            }
        // symbol = dup^T dup + ddn ddn^T; compare to xi2 * I
        for (int a = 0; a < r; ++a)
            for (int b = 0; b < r; ++b) {
                double s = 0.0;
                for (size_t row = 0; row < masks_up.size(); ++row)
                    s += dup[row][static_cast<size_t>(a)] * dup[row][static_cast<size_t>(b)];
                for (size_t col = 0; col < masks_dn.size(); ++col)
                    s += ddn[static_cast<size_t>(a)][col] * ddn[static_cast<size_t>(b)][col];
                const double expected = a == b ? xi2 : 0.0;
                rep.max_deviation = std::max(rep.max_deviation, std::abs(s - expected) / xi2);
                if (a == b) rep.min_eigenvalue_ratio = std::min(rep.min_eigenvalue_ratio, s / xi2);
            }
    }
    rep.elliptic = rep.max_deviation < 1e-12 && rep.min_eigenvalue_ratio > 0.0;
    return rep;
}

} // namespace torusns

#endif
