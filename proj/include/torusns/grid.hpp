#ifndef TORUSNS_GRID_HPP
#define TORUSNS_GRID_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace torusns {

/// Uniform lattice on the flat torus [0,1)^n.
///
/// Conventions used throughout the library:
///   - period L = 1 on every axis, spacing h_a = 1/res_a;
///   - wavenumbers k_a in {-res_a/2+1, ..., res_a/2};
///   - derivatives act as Fourier multipliers 2*pi*i*k_a, with the Nyquist
///     column (k_a = res_a/2) annihilated so real fields stay real.
/// All operators are exact on the resolved band |k_a| < res_a/2.
class Grid {
public:
    Grid() = default;

    /// Isotropic grid: res points per axis.
    Grid(int dim, int res) : Grid(std::vector<int>(static_cast<size_t>(dim), res)) {}

    /// Anisotropic grid, one resolution per axis.
    explicit Grid(std::vector<int> res_per_axis) : res_(std::move(res_per_axis)) {
        if (res_.size() < 2 || res_.size() > 3)
            throw std::invalid_argument("Grid: spatial dimension must be 2 or 3");
        for (int r : res_) {
            if (r < 4 || (r & (r - 1)) != 0)
                throw std::invalid_argument(
                    "Grid: resolution must be a power of two >= 4, got " + std::to_string(r));
        }
        npoints_ = 1;
        for (int r : res_) npoints_ *= static_cast<size_t>(r);
    }

    int dim() const { return static_cast<int>(res_.size()); }
    int res(int axis) const { return res_[static_cast<size_t>(axis)]; }
    const std::vector<int>& res() const { return res_; }
    size_t size() const { return npoints_; }
    double spacing(int axis) const { return 1.0 / res(axis); }

    /// Row-major flattening, axis 0 slowest.
    size_t flat(const std::array<int, 3>& idx) const {
        size_t f = 0;
        for (int a = 0; a < dim(); ++a) f = f * static_cast<size_t>(res(a)) + static_cast<size_t>(idx[static_cast<size_t>(a)]);
        return f;
    }

    std::array<int, 3> unflat(size_t f) const {
        std::array<int, 3> idx{0, 0, 0};
        for (int a = dim() - 1; a >= 0; --a) {
            idx[static_cast<size_t>(a)] = static_cast<int>(f % static_cast<size_t>(res(a)));
            f /= static_cast<size_t>(res(a));
        }
        return idx;
    }

    /// Physical coordinate of a lattice index along one axis.
    double coord(int axis, int i) const { return static_cast<double>(i) / res(axis); }

    /// Signed wavenumber of FFT bin m along one axis.
    int wavenumber(int axis, int m) const {
        const int r = res(axis);
        return m <= r / 2 ? m : m - r;
    }

    /// Wavenumber with the Nyquist bin mapped to zero (derivative convention).
    int wavenumber_d(int axis, int m) const {
        const int r = res(axis);
        if (m == r / 2) return 0;
        return m <= r / 2 ? m : m - r;
    }

    bool operator==(const Grid& other) const { return res_ == other.res_; }
    bool operator!=(const Grid& other) const { return !(*this == other); }

private:
    std::vector<int> res_;
    size_t npoints_ = 0;
};

/// Geodesic distance on the unit torus, capped by the injectivity radius 1/2.
inline double torus_distance(const Grid& g, size_t pa, size_t pb) {
    const auto ia = g.unflat(pa);
    const auto ib = g.unflat(pb);
    double d2 = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
        double d = g.coord(a, ia[static_cast<size_t>(a)]) - g.coord(a, ib[static_cast<size_t>(a)]);
        if (d > 0.5) d -= 1.0;
        if (d < -0.5) d += 1.0;
        d2 += d * d;
    }
    return std::sqrt(d2);
}

} // namespace torusns

#endif
