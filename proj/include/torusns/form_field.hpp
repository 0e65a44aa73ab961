#ifndef TORUSNS_FORM_FIELD_HPP
#define TORUSNS_FORM_FIELD_HPP

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "torusns/fft.hpp"
#include "torusns/grid.hpp"
#include "torusns/multi_index.hpp"

namespace torusns {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

enum class Repr { physical, spectral };

/// A degree-i differential form on the discrete torus. Components live on
/// increasing multi-indices only (C(n,i) of them); each is a scalar lattice
/// stored as complex values in both representations. Physical data of a real
/// form has zero imaginary part by construction.
class FormField {
public:
    FormField() = default;

    FormField(Grid grid, int degree, Repr repr = Repr::physical)
        : grid_(std::move(grid)), degree_(degree), repr_(repr) {
        if (degree < 0 || degree > grid_.dim())
            throw std::invalid_argument("FormField: degree out of range");
        masks_ = degree_masks(grid_.dim(), degree);
        comps_.assign(masks_.size(), std::vector<std::complex<double>>(grid_.size(), 0.0));
    }

    const Grid& grid() const { return grid_; }
    int degree() const { return degree_; }
    Repr repr() const { return repr_; }
    int ncomp() const { return static_cast<int>(comps_.size()); }
    const std::vector<IndexMask>& masks() const { return masks_; }

    std::vector<std::complex<double>>& comp(int c) { return comps_[static_cast<size_t>(c)]; }
    const std::vector<std::complex<double>>& comp(int c) const { return comps_[static_cast<size_t>(c)]; }

    /// Switch representation; idempotent.
    FormField to(Repr target) const {
        if (repr_ == target) return *this;
        FormField out = *this;
        auto& fft = FftEngine::instance();
        for (auto& c : out.comps_) {
            if (target == Repr::spectral) {
                fft.forward(grid_, c);
            } else {
                fft.inverse(grid_, c);
                for (auto& z : c) z = std::complex<double>(z.real(), 0.0); // real field
            }
        }
        out.repr_ = target;
        return out;
    }

    FormField& operator+=(const FormField& other) {
        check_compatible(other);
        for (int c = 0; c < ncomp(); ++c)
            for (size_t p = 0; p < grid_.size(); ++p) comps_[static_cast<size_t>(c)][p] += other.comp(c)[p];
        return *this;
    }
    FormField& operator-=(const FormField& other) {
        check_compatible(other);
        for (int c = 0; c < ncomp(); ++c)
            for (size_t p = 0; p < grid_.size(); ++p) comps_[static_cast<size_t>(c)][p] -= other.comp(c)[p];
        return *this;
    }
    FormField& operator*=(double s) {
        for (auto& c : comps_)
            for (auto& z : c) z *= s;
        return *this;
    }

    friend FormField operator+(FormField a, const FormField& b) { return a += b; }
    friend FormField operator-(FormField a, const FormField& b) { return a -= b; }
    friend FormField operator*(double s, FormField a) { return a *= s; }

    /// L2 norm on the unit-volume torus (quadrature or Parseval, depending on repr).
    double l2_norm() const {
        double s = 0.0;
        for (const auto& c : comps_)
            for (const auto& z : c) s += std::norm(z);
        if (repr_ == Repr::physical) s /= static_cast<double>(grid_.size());
        return std::sqrt(s);
    }

    /// Pointwise-max fiber norm (physical representation).
    double sup_norm() const {
        const FormField u = to(Repr::physical);
        double m = 0.0;
        for (size_t p = 0; p < grid_.size(); ++p) {
            double f = 0.0;
            for (int c = 0; c < u.ncomp(); ++c) f += std::norm(u.comp(c)[p]);
            m = std::max(m, f);
        }
        return std::sqrt(m);
    }

    void check_compatible(const FormField& other) const {
        if (grid_ != other.grid_ || degree_ != other.degree_ || repr_ != other.repr_)
            throw std::invalid_argument("FormField: incompatible operands");
    }

private:
    Grid grid_;
    int degree_ = 0;
    Repr repr_ = Repr::physical;
    std::vector<IndexMask> masks_;
    std::vector<std::vector<std::complex<double>>> comps_;
};

/// Visit every spectral mode; f(flat_index, k[]) with k the derivative-convention
/// wavenumbers (Nyquist mapped to zero).
template <typename F>
inline void for_each_mode(const Grid& g, F&& f) {
    std::array<int, 3> idx{0, 0, 0};
    std::array<int, 3> k{0, 0, 0};
    const int n = g.dim();
    for (size_t p = 0; p < g.size(); ++p) {
        for (int a = 0; a < n; ++a) k[static_cast<size_t>(a)] = g.wavenumber_d(a, idx[static_cast<size_t>(a)]);
        f(p, k);
        // row-major increment, last axis fastest
        for (int a = n - 1; a >= 0; --a) {
            auto& ia = idx[static_cast<size_t>(a)];
            if (++ia < g.res(a)) break;
            ia = 0;
        }
    }
}

/// True if any axis index sits on its Nyquist bin.
inline bool on_nyquist(const Grid& g, size_t p) {
    const auto idx = g.unflat(p);
    for (int a = 0; a < g.dim(); ++a)
        if (idx[static_cast<size_t>(a)] == g.res(a) / 2) return true;
    return false;
}

/// 2/3-rule truncation: zero all modes with |k_a| > res_a/3 on any axis, plus
/// the Nyquist bins. Applied to inputs and outputs of nonlinear products only.
inline FormField dealias(const FormField& u) {
    FormField v = u.to(Repr::spectral);
    const Grid& g = v.grid();
    std::vector<char> kill(g.size(), 0);
    std::array<int, 3> idx{0, 0, 0};
    for (size_t p = 0; p < g.size(); ++p) {
        idx = g.unflat(p);
        for (int a = 0; a < g.dim(); ++a) {
            const int m = idx[static_cast<size_t>(a)];
            if (m == g.res(a) / 2 || std::abs(g.wavenumber(a, m)) > g.res(a) / 3) {
                kill[p] = 1;
                break;
            }
        }
    }
    for (int c = 0; c < v.ncomp(); ++c)
        for (size_t p = 0; p < g.size(); ++p)
            if (kill[p]) v.comp(c)[p] = 0.0;
    return v.to(u.repr());
}

/// Zero the spectral mean (k = 0) of every component.
inline FormField remove_mean(const FormField& u) {
    FormField v = u.to(Repr::spectral);
    for (int c = 0; c < v.ncomp(); ++c) v.comp(c)[0] = 0.0;
    return v.to(u.repr());
}

/// Random real band-limited form: iid normal physical samples, truncated to
/// |k_a| <= kmax and rescaled to unit L2 norm. Deterministic for a fixed rng
/// state (fixed traversal order).
inline FormField random_band_limited(const Grid& g, int degree, std::mt19937_64& rng,
                                     int kmax = -1, double amplitude = 1.0) {
    FormField u(g, degree, Repr::physical);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int c = 0; c < u.ncomp(); ++c)
        for (size_t p = 0; p < g.size(); ++p) u.comp(c)[p] = gauss(rng);
    FormField v = u.to(Repr::spectral);
    for (int c = 0; c < v.ncomp(); ++c) {
        auto& data = v.comp(c);
        for_each_mode(g, [&](size_t p, const std::array<int, 3>& k) {
            bool keep = !on_nyquist(g, p);
            for (int a = 0; a < g.dim() && keep; ++a) {
                const int cap = kmax >= 0 ? std::min(kmax, g.res(a) / 3) : g.res(a) / 3;
                if (std::abs(k[static_cast<size_t>(a)]) > cap) keep = false;
            }
            if (!keep) data[p] = 0.0;
        });
    }
    const double norm = v.l2_norm();
    if (norm > 0.0) v *= amplitude / norm;
    return v;
}

} // namespace torusns

#endif
