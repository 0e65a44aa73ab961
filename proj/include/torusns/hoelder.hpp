#ifndef TORUSNS_HOELDER_HPP
#define TORUSNS_HOELDER_HPP

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "torusns/spacetime.hpp"

namespace torusns {

/// Index set of the anisotropic norm ||.||_{C^{2s+k, lambda, s, gamma}} and of
/// the combined two-exponent norm (lambda' present).
struct HoelderIndex {
    int s = 0;
    int k = 0;
    double lambda = 0.5;
    double gamma = 0.0; // 0 or lambda/2
    std::optional<double> lambda_prime;

    void validate() const {
        if (s < 0 || k < 0) throw std::invalid_argument("HoelderIndex: s, k must be nonnegative");
        if (lambda <= 0.0 || lambda >= 1.0)
            throw std::invalid_argument("HoelderIndex: lambda must lie in (0,1)");
        if (gamma != 0.0 && std::abs(gamma - lambda / 2) > 1e-12)
            throw std::invalid_argument("HoelderIndex: gamma must be 0 or lambda/2");
        if (lambda_prime && (*lambda_prime <= lambda || *lambda_prime >= 1.0))
            throw std::invalid_argument("HoelderIndex: lambda' must lie in (lambda,1)");
    }
};

enum class PairMode { automatic, exhaustive, sampled };

namespace detail {

/// Weighted m-th gradient stack: one field per multi-index alpha with
/// |alpha| = m, scaled by sqrt(m!/alpha!) so that the stacked fiber norm is
/// |grad^m u|. Derivatives are spectral; output is physical.
inline std::vector<FormField> gradient_stack(const FormField& u, int m) {
    const Grid& g = u.grid();
    const int n = g.dim();
    const FormField us = u.to(Repr::spectral);
    std::vector<FormField> stack;
    std::vector<int> alpha(static_cast<size_t>(n), 0);
    auto factorial = [](int v) {
        double r = 1.0;
        for (int i = 2; i <= v; ++i) r *= i;
        return r;
    };
    std::function<void(int, int)> emit = [&](int axis, int left) {
        if (axis == n - 1) {
            alpha[static_cast<size_t>(axis)] = left;
            double weight = factorial(m);
            for (int a = 0; a < n; ++a) weight /= factorial(alpha[static_cast<size_t>(a)]);
            weight = std::sqrt(weight);
            FormField d = us;
            for (int c = 0; c < d.ncomp(); ++c) {
                auto& data = d.comp(c);
                for_each_mode(g, [&](size_t p, const std::array<int, 3>& kk) {
                    std::complex<double> mult(weight, 0.0);
                    for (int a = 0; a < n; ++a)
                        for (int r = 0; r < alpha[static_cast<size_t>(a)]; ++r)
                            mult *= std::complex<double>(0.0, two_pi * kk[static_cast<size_t>(a)]);
                    data[p] *= mult;
                });
            }
            stack.push_back(d.to(Repr::physical));
            return;
        }
        for (int v = 0; v <= left; ++v) {
            alpha[static_cast<size_t>(axis)] = v;
            emit(axis + 1, left - v);
        }
    };
    emit(0, m);
    return stack;
}

inline double stack_fiber(const std::vector<FormField>& stack, size_t p) {
    double s = 0.0;
    for (const auto& f : stack)
        for (int c = 0; c < f.ncomp(); ++c) s += std::norm(f.comp(c)[p]);
    return std::sqrt(s);
}

inline double stack_pair_fiber(const std::vector<FormField>& stack, size_t p, size_t q) {
    double s = 0.0;
    for (const auto& f : stack)
        for (int c = 0; c < f.ncomp(); ++c) s += std::norm(f.comp(c)[p] - f.comp(c)[q]);
    return std::sqrt(s);
}

inline double stack_sup(const std::vector<FormField>& stack) {
    const size_t npts = stack.front().grid().size();
    double m = 0.0;
    for (size_t p = 0; p < npts; ++p) m = std::max(m, stack_fiber(stack, p));
    return m;
}

inline bool exhaustive_feasible(const Grid& g) {
    for (int a = 0; a < g.dim(); ++a)
        if (g.res(a) > 16) return false;
    return true;
}

/// Per-axis index offsets used for pairing. Exhaustive: all offsets. Sampled:
/// a geometric ladder (deterministic, a lower bound of the exhaustive sup).
inline std::vector<int> pairing_offsets(int res, bool exhaustive) {
    std::vector<int> offs;
    if (exhaustive) {
        for (int o = 0; o < res; ++o) offs.push_back(o);
        return offs;
    }
    offs.push_back(0);
    for (int o = 1; o < res; o = o < 4 ? o + 1 : o * 2) {
        offs.push_back(o);
        if (res - o > o) offs.push_back(res - o);
    }
    return offs;
}

/// Sup over point pairs of |u(x) - u(y)| / d(x,y)^lambda. Distances depend
/// only on the index offset on a uniform periodic lattice, so the offset
/// weight d^{-2 lambda} is computed once per offset and the inner loop reduces
/// to a max of weighted squared fiber differences over base points.
inline double stack_seminorm(const std::vector<FormField>& stack, double lambda, PairMode mode) {
    if (lambda <= 0.0 || lambda >= 1.0)
        throw std::invalid_argument("spatial_seminorm: lambda must lie in (0,1)");
    const Grid& g = stack.front().grid();
    const int n = g.dim();
    constexpr double d0 = 0.5; // injectivity-radius cap of the unit torus
    const bool exhaustive =
        mode == PairMode::exhaustive || (mode == PairMode::automatic && exhaustive_feasible(g));
    if (mode == PairMode::exhaustive && !exhaustive_feasible(g))
        throw std::invalid_argument("spatial_seminorm: grid too large for exhaustive pairs");

    std::vector<const std::complex<double>*> comps;
    for (const auto& f : stack)
        for (int c = 0; c < f.ncomp(); ++c) comps.push_back(f.comp(c).data());

    std::array<std::vector<int>, 3> offs;
    std::array<int, 3> res{1, 1, 1};
    for (int a = 0; a < n; ++a) {
        res[static_cast<size_t>(a)] = g.res(a);
        offs[static_cast<size_t>(a)] = pairing_offsets(g.res(a), exhaustive);
    }
    if (n == 2) offs[2] = {0};
    const int base_stride =
        exhaustive ? 1 : std::max(1, static_cast<int>(std::cbrt(g.size() / 2048.0)));

    double sup2 = 0.0;
    for (int ox : offs[0])
        for (int oy : offs[1])
            for (int oz : offs[2]) {
                if (ox == 0 && oy == 0 && oz == 0) continue;
                double d2 = 0.0;
                const int dd[3] = {std::min(ox, res[0] - ox), std::min(oy, res[1] - oy),
                                   std::min(oz, res[2] - oz)};
                for (int a = 0; a < n; ++a) {
                    const double da = static_cast<double>(dd[a]) / res[static_cast<size_t>(a)];
                    d2 += da * da;
                }
                if (d2 > d0 * d0) continue;
                const double inv = 1.0 / std::pow(d2, lambda); // = d^{-2 lambda}
                double best = 0.0;
                for (int bx = 0; bx < res[0]; bx += base_stride)
                    for (int by = 0; by < res[1]; by += base_stride)
                        for (int bz = 0; bz < res[2]; bz += base_stride) {
                            const size_t p = (static_cast<size_t>(bx) * res[1] + by) *
                                                 static_cast<size_t>(res[2]) + static_cast<size_t>(bz);
                            const size_t q =
                                (static_cast<size_t>((bx + ox) % res[0]) * res[1] +
                                 static_cast<size_t>((by + oy) % res[1])) *
                                    static_cast<size_t>(res[2]) +
                                static_cast<size_t>((bz + oz) % res[2]);
                            double s = 0.0;
                            for (const auto* data : comps) s += std::norm(data[p] - data[q]);
                            best = std::max(best, s);
                        }
                sup2 = std::max(sup2, best * inv);
            }
    return std::sqrt(sup2);
}

} // namespace detail

/// Spatial Hoelder seminorm <u>_lambda: sup over point pairs of
/// |u(x) - u(y)| / d(x,y)^lambda with periodic distance capped at 1/2.
/// Exhaustive over all pairs on grids up to 16 per axis; a deterministic
/// stratified pair sample (a lower bound of the sup) otherwise.
inline double spatial_seminorm(const FormField& u, double lambda,
                               PairMode mode = PairMode::automatic) {
    return detail::stack_seminorm({u.to(Repr::physical)}, lambda, mode);
}

/// Spatial C^{0,lambda} norm: sup norm plus the lambda seminorm.
inline double spatial_norm(const FormField& u, double lambda,
                           PairMode mode = PairMode::automatic) {
    const FormField up = u.to(Repr::physical);
    return detail::stack_sup({up}) + detail::stack_seminorm({up}, lambda, mode);
}

/// Anisotropic norm ||u||_{C^{2s+k, lambda, s, gamma}}: for every l <= k and
/// m + 2j <= 2s, the sup over time nodes of the spatial C^{0,lambda} norm of
/// d_t^j grad^{m+l} u, plus (when gamma > 0) the gamma-weighted time Hoelder
/// seminorms of the top parabolic-order terms over all node pairs.
inline double anisotropic_norm(const SpaceTimeField& u, const HoelderIndex& idx,
                               PairMode mode = PairMode::automatic) {
    idx.validate();
    if (idx.s > 0 && u.steps() < 2 * idx.s)
        throw std::invalid_argument("anisotropic_norm: time grid too coarse for s derivatives");
    std::vector<SpaceTimeField> dt;
    dt.push_back(u.map([](const FormField& f) { return f.to(Repr::spectral); }));
    for (int j = 1; j <= idx.s; ++j) dt.push_back(time_derivative(dt.back(), 1));

    double total = 0.0;
    for (int l = 0; l <= idx.k; ++l) {
        for (int j = 0; j <= idx.s; ++j) {
            for (int m = 0; m + 2 * j <= 2 * idx.s; ++m) {
                const int order = m + l;
                std::vector<std::vector<FormField>> stacks;
                stacks.reserve(static_cast<size_t>(u.steps()) + 1);
                for (int t = 0; t <= u.steps(); ++t)
                    stacks.push_back(detail::gradient_stack(dt[static_cast<size_t>(j)].frame(t), order));
                double space_sup = 0.0;
                for (const auto& st : stacks)
                    space_sup = std::max(space_sup,
                                         detail::stack_sup(st) + detail::stack_seminorm(st, idx.lambda, mode));
                total += space_sup;
                if (idx.gamma > 0.0 && m + 2 * j == 2 * idx.s) {
                    double tsem = 0.0;
                    const size_t npts = u.grid().size();
                    for (int t1 = 0; t1 <= u.steps(); ++t1)
                        for (int t2 = t1 + 1; t2 <= u.steps(); ++t2) {
                            const double dtpow = std::pow(u.time(t2) - u.time(t1), idx.gamma);
                            for (size_t p = 0; p < npts; ++p) {
                                double s = 0.0;
                                for (size_t fidx = 0; fidx < stacks[0].size(); ++fidx)
                                    for (int c = 0; c < stacks[0][fidx].ncomp(); ++c)
                                        s += std::norm(
                                            stacks[static_cast<size_t>(t1)][fidx].comp(c)[p] -
                                            stacks[static_cast<size_t>(t2)][fidx].comp(c)[p]);
                                tsem = std::max(tsem, std::sqrt(s) / dtpow);
                            }
                        }
                    total += tsem;
                }
            }
        }
    }
    return total;
}

/// Combined two-exponent norm: ||u||_{C^{2s+k+1, lambda}} + ||u||_{C^{2s+k, lambda'}}.
inline double combined_norm(const SpaceTimeField& u, const HoelderIndex& idx,
                            PairMode mode = PairMode::automatic) {
    idx.validate();
    if (!idx.lambda_prime)
        throw std::invalid_argument("combined_norm: lambda' required");
    HoelderIndex first = idx;
    first.k = idx.k + 1;
    first.lambda_prime.reset();
    HoelderIndex second = idx;
    second.lambda = *idx.lambda_prime;
    second.gamma = idx.gamma > 0.0 ? *idx.lambda_prime / 2 : 0.0;
    second.lambda_prime.reset();
    return anisotropic_norm(u, first, mode) + anisotropic_norm(u, second, mode);
}

struct EmbeddingReport {
    bool applicable = false;
    double from_norm = 0.0;
    double to_norm = 0.0;
    double observed_constant = 0.0; // to_norm / from_norm
    bool holds = false;
};

/// Numeric check of the continuous embedding C^{2s,lambda} into C^{2s',lambda'}
/// for s + lambda >= s' + lambda': asserts norm(s',lambda') <= C norm(s,lambda)
/// with a caller-supplied (empirically calibrated) constant.
inline EmbeddingReport embedding_check(const SpaceTimeField& u, const HoelderIndex& from,
                                       const HoelderIndex& to, double C,
                                       PairMode mode = PairMode::automatic) {
    from.validate();
    to.validate();
    EmbeddingReport rep;
    if (from.s + from.lambda < to.s + to.lambda - 1e-12) return rep;
    rep.applicable = true;
    rep.from_norm = anisotropic_norm(u, from, mode);
    rep.to_norm = anisotropic_norm(u, to, mode);
    rep.observed_constant = rep.from_norm > 0.0 ? rep.to_norm / rep.from_norm
                                                : (rep.to_norm > 0.0 ? 1e300 : 0.0);
    rep.holds = rep.to_norm <= C * rep.from_norm + 1e-14;
    return rep;
}

} // namespace torusns

#endif
