#include <catch2/catch_amalgamated.hpp>

#include "test_helpers.hpp"

using namespace torusns;
using namespace torusns::testing;

TEST_CASE("harmonic projection: constants, oscillations, idempotence") {
    const Grid g(3, 8);
    const FormField c = constant_field(g, 1, 2.0);
    CHECK((harmonic_projection(c) - c).l2_norm() < 1e-13);

    const FormField s = sine_field(g, 1, 0, 0);
    CHECK(harmonic_projection(s).l2_norm() < 1e-13);

    auto r = rng(31);
    for (int deg = 0; deg <= 3; ++deg) {
        const FormField u = random_band_limited(g, deg, r);
        const FormField pu = harmonic_projection(u);
        CHECK((harmonic_projection(pu) - pu).l2_norm() < 1e-13);
    }

    const auto basis = harmonic_basis(g, 2);
    REQUIRE(basis.size() == 3u);
    for (size_t i = 0; i < basis.size(); ++i)
        for (size_t j = 0; j < basis.size(); ++j)
            CHECK(inner_product(basis[i], basis[j]) ==
                  Catch::Approx(i == j ? 1.0 : 0.0).margin(1e-13));
}

TEST_CASE("green operator: eigenfunctions and the resolvent identity") {
    const Grid g(3, 8);
    CHECK(green_operator(constant_field(g, 0, 5.0)).l2_norm() < 1e-13);

    const FormField s = sine_field(g, 0, 0, 0);
    const FormField u = (two_pi * two_pi) * s;
    CHECK((green_operator(u.to(Repr::spectral)).to(Repr::physical) - s).l2_norm() < 1e-12);

    auto r = rng(37);
    for (int deg = 0; deg <= 3; ++deg) {
        const FormField v = random_band_limited(g, deg, r);
        const FormField lhs1 = laplacian(green_operator(v)) + harmonic_projection(v);
        const FormField lhs2 = green_operator(laplacian(v)) + harmonic_projection(v);
        CHECK((lhs1 - v).l2_norm() <= 1e-11 * v.l2_norm());
        CHECK((lhs2 - v).l2_norm() <= 1e-11 * v.l2_norm());
        // the Green operator and the projection annihilate each other
        CHECK(green_operator(harmonic_projection(v)).l2_norm() < 1e-13);
        CHECK(harmonic_projection(green_operator(v)).l2_norm() < 1e-13);
    }
}

TEST_CASE("green operator commutes with d and d*") {
    const Grid g(3, 16);
    auto r = rng(41);
    for (int deg = 0; deg < 3; ++deg) {
        const FormField u = random_band_limited(g, deg, r);
        CHECK((green_operator(differential(u)) - differential(green_operator(u))).l2_norm() <=
              1e-11 * u.l2_norm());
        if (deg > 0)
            CHECK((green_operator(codifferential(u)) - codifferential(green_operator(u)))
                      .l2_norm() <= 1e-11 * u.l2_norm());
    }
}

TEST_CASE("potentials: harmonic kernel, homotopy, inverse of d on potentials") {
    const Grid g(3, 8);
    CHECK(potential_phi(constant_field(g, 1, 3.0)).l2_norm() < 1e-13);
    CHECK(potential_phi_hat(constant_field(g, 0, 3.0)).l2_norm() < 1e-13);
    CHECK_THROWS_AS(potential_phi(constant_field(g, 0, 1.0)), std::invalid_argument);

    auto r = rng(43);
    for (int deg = 0; deg <= 3; ++deg) {
        const FormField u = random_band_limited(g, deg, r);
        // homotopy: Phi d u + d Phi u = u - Pi u (with the missing side absent
        // at the ends of the complex)
        FormField homotopy(g, deg, Repr::spectral);
        if (deg < 3) homotopy += potential_phi(differential(u));
        if (deg > 0) homotopy += differential(potential_phi(u));
        const FormField target = u - harmonic_projection(u);
        CHECK((homotopy - target).l2_norm() <= 1e-11 * u.l2_norm());
        if (deg > 0) CHECK(codifferential(potential_phi(u)).l2_norm() < 1e-11);
        if (deg < 2) CHECK(differential(potential_phi_hat(u)).l2_norm() < 1e-11);
    }

    // Phi_0 applied to an exact 1-form recovers the mean-free potential.
    const FormField gpot = remove_mean(random_band_limited(g, 0, r));
    const FormField back = potential_phi(differential(gpot));
    CHECK((back - gpot).l2_norm() <= 1e-11 * gpot.l2_norm());
}

TEST_CASE("leray projection: kernel, fixed points, mode-wise oracle") {
    const Grid g(3, 8);
    auto r = rng(47);
    const FormField gpot = random_band_limited(g, 0, r);
    CHECK(leray_projection(differential(gpot)).l2_norm() <= 1e-11 * gpot.l2_norm());

    const FormField v = random_solenoidal(g, r);
    CHECK((leray_projection(v) - v).l2_norm() <= 1e-11 * v.l2_norm());
    CHECK(codifferential(leray_projection(random_band_limited(g, 1, r))).l2_norm() < 1e-11);

    // independent oracle for 1-forms: mode-wise I - k k^T / |k|^2
    const FormField u = random_band_limited(g, 1, r);
    const FormField pu = leray_projection(u);
    FormField oracle(g, 1, Repr::spectral);
    for_each_mode(g, [&](size_t p, const std::array<int, 3>& k) {
        const double k2 = static_cast<double>(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
        std::complex<double> dot = 0.0;
        for (int a = 0; a < 3; ++a)
            dot += static_cast<double>(k[static_cast<size_t>(a)]) * u.comp(a)[p];
        for (int a = 0; a < 3; ++a) {
            const double ka = static_cast<double>(k[static_cast<size_t>(a)]);
            oracle.comp(a)[p] = k2 > 0.0 ? u.comp(a)[p] - ka * dot / k2 : u.comp(a)[p];
        }
    });
    CHECK((pu - oracle).l2_norm() <= 1e-12 * u.l2_norm());

    // self-adjointness
    const FormField w = random_band_limited(g, 1, r);
    CHECK(std::abs(inner_product(leray_projection(u), w) -
                   inner_product(u, leray_projection(w))) < 1e-11);
}

TEST_CASE("hodge decomposition: pure pieces, reconstruction, orthogonality") {
    const Grid g(3, 8);
    auto r = rng(53);

    const FormField grad = differential(remove_mean(random_band_limited(g, 0, r)));
    {
        auto [e, c, h] = hodge_decompose(grad);
        CHECK((e - grad).l2_norm() <= 1e-11 * grad.l2_norm());
        CHECK(c.l2_norm() <= 1e-11 * grad.l2_norm());
        CHECK(h.l2_norm() <= 1e-11 * grad.l2_norm());
    }
    {
        const FormField cst = constant_field(g, 1, 2.5);
        auto [e, c, h] = hodge_decompose(cst);
        CHECK(e.l2_norm() < 1e-12);
        CHECK(c.l2_norm() < 1e-12);
        CHECK((h - cst).l2_norm() < 1e-12);
    }
    for (int deg = 0; deg <= 3; ++deg) {
        const FormField u = random_band_limited(g, deg, r);
        auto [e, c, h] = hodge_decompose(u);
        CHECK((e + c + h - u).l2_norm() <= 1e-11 * u.l2_norm());
        CHECK(std::abs(inner_product(e, c)) < 1e-10);
        CHECK(std::abs(inner_product(e, h)) < 1e-10);
        CHECK(std::abs(inner_product(c, h)) < 1e-10);
    }
}

TEST_CASE("range compatibility of the first-order system") {
    const Grid g(3, 8);
    auto r = rng(59);
    const FormField alpha = random_band_limited(g, 1, r);
    const FormField beta = random_band_limited(g, 1, r);
    const FormField f = differential(alpha);       // closed 2-form
    const FormField g0 = codifferential(beta);     // co-closed 0-form
    const auto rep = range_compatibility(f, g0);
    CHECK(rep.compatible);

    const FormField fconst = constant_field(g, 2, 1.0);
    const auto rep2 = range_compatibility(fconst, FormField(g, 0, Repr::spectral));
    CHECK_FALSE(rep2.compatible);
    CHECK(rep2.max_pairing == Catch::Approx(1.0).margin(1e-13));

    // the reported pairing matches exhaustive pairing against the harmonic basis
    FormField mixed = differential(alpha);
    mixed += 0.3 * constant_field(g, 2, 1.0).to(Repr::spectral);
    const auto rep3 = range_compatibility(mixed, g0);
    double worst = 0.0;
    for (const auto& h : harmonic_basis(g, 2))
        worst = std::max(worst, std::abs(inner_product(mixed, h)));
    CHECK(rep3.max_pairing == Catch::Approx(worst).margin(1e-12));
    CHECK_FALSE(rep3.compatible);

    // precondition: f must be closed
    CHECK_THROWS_AS(range_compatibility(random_band_limited(g, 2, r), g0),
                    std::invalid_argument);
}
