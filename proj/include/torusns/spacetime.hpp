#ifndef TORUSNS_SPACETIME_HPP
#define TORUSNS_SPACETIME_HPP

#include <functional>
#include <stdexcept>
#include <vector>

#include "torusns/form_field.hpp"

namespace torusns {

/// A time-sampled FormField trajectory on [0, T], uniform grid
/// t_m = m T / M, m = 0..M.
class SpaceTimeField {
public:
    SpaceTimeField() = default;

    SpaceTimeField(Grid grid, int degree, double horizon, int steps,
                   Repr repr = Repr::spectral)
        : horizon_(horizon) {
        if (steps < 1) throw std::invalid_argument("SpaceTimeField: need at least one step");
        if (horizon <= 0.0) throw std::invalid_argument("SpaceTimeField: horizon must be positive");
        frames_.assign(static_cast<size_t>(steps) + 1, FormField(grid, degree, repr));
    }

    /// Sample a time-dependent field builder at every node.
    static SpaceTimeField sample(double horizon, int steps,
                                 const std::function<FormField(double)>& make) {
        SpaceTimeField out;
        out.horizon_ = horizon;
        out.frames_.reserve(static_cast<size_t>(steps) + 1);
        for (int m = 0; m <= steps; ++m)
            out.frames_.push_back(make(horizon * m / steps));
        return out;
    }

    int steps() const { return static_cast<int>(frames_.size()) - 1; }
    double horizon() const { return horizon_; }
    double dt() const { return horizon_ / steps(); }
    double time(int m) const { return horizon_ * m / steps(); }

    FormField& frame(int m) { return frames_[static_cast<size_t>(m)]; }
    const FormField& frame(int m) const { return frames_[static_cast<size_t>(m)]; }

    const Grid& grid() const { return frames_.front().grid(); }
    int degree() const { return frames_.front().degree(); }

    SpaceTimeField& operator+=(const SpaceTimeField& other) {
        check_compatible(other);
        for (size_t m = 0; m < frames_.size(); ++m) frames_[m] += other.frames_[m];
        return *this;
    }
    SpaceTimeField& operator-=(const SpaceTimeField& other) {
        check_compatible(other);
        for (size_t m = 0; m < frames_.size(); ++m) frames_[m] -= other.frames_[m];
        return *this;
    }
    SpaceTimeField& operator*=(double s) {
        for (auto& f : frames_) f *= s;
        return *this;
    }
    friend SpaceTimeField operator+(SpaceTimeField a, const SpaceTimeField& b) { return a += b; }
    friend SpaceTimeField operator-(SpaceTimeField a, const SpaceTimeField& b) { return a -= b; }
    friend SpaceTimeField operator*(double s, SpaceTimeField a) { return a *= s; }

    /// Apply a spatial operation frame by frame.
    SpaceTimeField map(const std::function<FormField(const FormField&)>& op) const {
        SpaceTimeField out;
        out.horizon_ = horizon_;
        out.frames_.reserve(frames_.size());
        for (const auto& f : frames_) out.frames_.push_back(op(f));
        return out;
    }

    /// sup over time nodes of the spatial L2 norm.
    double sup_l2_norm() const {
        double m = 0.0;
        for (const auto& f : frames_) m = std::max(m, f.l2_norm());
        return m;
    }

    void check_compatible(const SpaceTimeField& other) const {
        if (frames_.size() != other.frames_.size() || horizon_ != other.horizon_)
            throw std::invalid_argument("SpaceTimeField: time grid mismatch");
    }

private:
    double horizon_ = 0.0;
    std::vector<FormField> frames_;
};

/// j-th time derivative at every node by finite differences. Uses 4th-order
/// stencils for j = 1 when the grid allows, 2nd-order otherwise; higher j by
/// repeated differentiation.
inline SpaceTimeField time_derivative(const SpaceTimeField& u, int order = 1) {
    if (order == 0) return u;
    if (order > 1) return time_derivative(time_derivative(u, order - 1), 1);
    const int M = u.steps();
    if (M < 2) throw std::invalid_argument("time_derivative: time grid too coarse");
    const double h = u.dt();
    SpaceTimeField out = u;
    auto combine = [&](int m, const std::vector<std::pair<int, double>>& stencil) {
        FormField acc(u.grid(), u.degree(), u.frame(0).repr());
        for (const auto& [off, w] : stencil) acc += (w / h) * u.frame(m + off);
        out.frame(m) = acc;
    };
    if (M >= 5) {
        // 4th-order stencils
        for (int m = 0; m <= M; ++m) {
            if (m >= 2 && m <= M - 2)
                combine(m, {{-2, 1.0 / 12}, {-1, -8.0 / 12}, {1, 8.0 / 12}, {2, -1.0 / 12}});
            else if (m == 0)
                combine(m, {{0, -25.0 / 12}, {1, 4.0}, {2, -3.0}, {3, 4.0 / 3}, {4, -0.25}});
            else if (m == 1)
                combine(m, {{-1, -0.25}, {0, -5.0 / 6}, {1, 1.5}, {2, -0.5}, {3, 1.0 / 12}});
            else if (m == M - 1)
                combine(m, {{1, 0.25}, {0, 5.0 / 6}, {-1, -1.5}, {-2, 0.5}, {-3, -1.0 / 12}});
            else
                combine(m, {{0, 25.0 / 12}, {-1, -4.0}, {-2, 3.0}, {-3, -4.0 / 3}, {-4, 0.25}});
        }
    } else {
        for (int m = 0; m <= M; ++m) {
            if (m >= 1 && m <= M - 1)
                combine(m, {{-1, -0.5}, {1, 0.5}});
            else if (m == 0)
                combine(m, {{0, -1.5}, {1, 2.0}, {2, -0.5}});
            else
                combine(m, {{0, 1.5}, {-1, -2.0}, {-2, 0.5}});
        }
    }
    return out;
}

} // namespace torusns

#endif
