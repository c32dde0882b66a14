#include <cmath>
#include <random>

#include "choquard/extremals.hpp"
#include "choquard/functional.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace choquard;

namespace {

struct Setup {
    GridPtr grid;
    RieszKernel kernel;
    NonlinearityParams params;
};

Setup make_setup(int M = 400) {
    GridPtr grid = build_grid(GridSpec{7, 40.0, M, 2.0});
    RieszOptions opts;
    opts.quadrature_order = 192;
    opts.threads = 2;
    return {grid, build_kernel(grid, 2.0, opts),
            NonlinearityParams::doubly_critical(7, 2.0)};
}

}  // namespace

TEST_CASE("exponent pair invariants") {
    const NonlinearityParams p = NonlinearityParams::doubly_critical(7, 2.0);
    CHECK(p.p() == doctest::Approx(9.0 / 7.0).epsilon(1e-15));
    CHECK(p.q() == doctest::Approx(9.0 / 5.0).epsilon(1e-15));
    CHECK(p.p() > 1.0);
    CHECK(p.p() < p.q());
    CHECK(p.q() <= p.p() * 7.0 / 5.0 + 1e-12);
    CHECK(p.coeff_p() == doctest::Approx(7.0 / 9.0));
    CHECK(p.coeff_q() == doctest::Approx(5.0 / 9.0));
    CHECK(p.is_doubly_critical());

    CHECK_THROWS_AS(NonlinearityParams::doubly_critical(7, -1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(NonlinearityParams::doubly_critical(7, 7.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(NonlinearityParams::single_power(7, 2.0, 1.1),
                    std::invalid_argument);  // below the admissible window
    CHECK_THROWS_AS(NonlinearityParams::single_power(7, 2.0, 1.9),
                    std::invalid_argument);  // above it
    CHECK_FALSE(NonlinearityParams::single_power(7, 2.0, 1.5).is_doubly_critical());
}

TEST_CASE("F_eval values and symmetry") {
    const NonlinearityParams p = NonlinearityParams::doubly_critical(7, 2.0);
    const FValue zero = F_eval(p, 0.0);
    CHECK(zero.F == 0.0);
    CHECK(zero.Fprime == 0.0);

    const FValue one = F_eval(p, 1.0);
    CHECK(one.F == doctest::Approx(7.0 / 9.0 + 5.0 / 9.0).epsilon(1e-15));
    CHECK(one.Fprime == doctest::Approx(2.0).epsilon(1e-15));

    // direct arithmetic: F(2) = (7/9) 2^{9/7} + (5/9) 2^{9/5}
    const double expected =
        (7.0 / 9.0) * std::pow(2.0, 9.0 / 7.0) + (5.0 / 9.0) * std::pow(2.0, 9.0 / 5.0);
    CHECK(expected == doctest::Approx(3.8308).epsilon(1e-4));
    CHECK(F_eval(p, 2.0).F == doctest::Approx(expected).epsilon(1e-14));

    const FValue plus = F_eval(p, 0.7), minus = F_eval(p, -0.7);
    CHECK(plus.F == minus.F);
    CHECK(plus.Fprime == -minus.Fprime);
}

TEST_CASE("energy of zero and evenness") {
    const Setup s = make_setup();
    const EnergyBreakdown zero = energy(s.kernel, s.params, RadialFunction::zero(s.grid));
    CHECK(zero.dirichlet == 0.0);
    CHECK(zero.mass == 0.0);
    CHECK(zero.D_pp == 0.0);
    CHECK(zero.D_qq == 0.0);
    CHECK(zero.D_pq == 0.0);
    CHECK(zero.total == 0.0);

    std::mt19937_64 rng(31);
    const RadialFunction u = testsupport::random_profile(s.grid, rng);
    const EnergyBreakdown plus = energy(s.kernel, s.params, u);
    const EnergyBreakdown minus =
        energy(s.kernel, s.params, u.with_values(-u.values()));
    CHECK(plus.total == minus.total);
    CHECK(plus.D_pq == minus.D_pq);
}

TEST_CASE("normalized mu bubble equates mass and D_pp") {
    const Setup s = make_setup(600);
    const Amplitudes amps = normalize_amplitudes(s.kernel, s.params);
    const RadialFunction mu =
        sample_extremal(s.grid, {ExtremalKind::Mu, 1.0, amps.A});
    const EnergyBreakdown e = energy(s.kernel, s.params, mu);
    CHECK(e.mass == doctest::Approx(e.D_pp).epsilon(1e-6));
}

TEST_CASE("ray profile reconstructs scaled energies") {
    const Setup s = make_setup();
    std::mt19937_64 rng(37);
    const RadialFunction u = testsupport::random_profile(s.grid, rng, 0.05);
    const RayProfile ray = ray_profile(s.kernel, s.params, u);
    CHECK(ray.A > 0.0);
    CHECK(ray.B > 0.0);
    CHECK(ray.C > 0.0);
    CHECK(ray.D > 0.0);
    for (double t : {0.1, 0.5, 1.0, 2.0, 5.0}) {
        const double direct =
            energy(s.kernel, s.params, u.with_values(t * u.values())).total;
        CHECK(direct == doctest::Approx(ray.value(t)).epsilon(1e-10));
    }
    // mountain-pass shape of the ray: positive for small t, negative past t0
    const double t0 = ray_max(ray);
    CHECK(ray.value(1e-3 * t0) > 0.0);
    CHECK(ray.value(64.0 * t0) < 0.0);
}

TEST_CASE("derivative_action on zero and at the ray maximum") {
    const Setup s = make_setup();
    std::mt19937_64 rng(41);
    const RadialFunction phi = testsupport::random_profile(s.grid, rng);
    CHECK(derivative_action(s.kernel, s.params, RadialFunction::zero(s.grid),
                            phi) == 0.0);

    const RadialFunction u = testsupport::random_profile(s.grid, rng, 0.05);
    const double t0 = ray_max(ray_profile(s.kernel, s.params, u));
    const double at_max = derivative_action(
        s.kernel, s.params, u.with_values(t0 * u.values()), u);
    CHECK(std::abs(at_max) <= 1e-8 * h1_norm(u) * (1.0 + t0 * h1_norm(u)));
}

TEST_CASE("derivative matches central differences at second order") {
    const Setup s = make_setup();
    std::mt19937_64 rng(43);
    for (int rep = 0; rep < 10; ++rep) {
        const RadialFunction u = testsupport::random_profile(s.grid, rng, 0.3);
        RadialFunction phi = testsupport::random_profile(s.grid, rng);
        phi = phi.with_values(5.0 * phi.values());  // keeps u + h phi > 0
        const double exact = derivative_action(s.kernel, s.params, u, phi);
        const double e_scale = std::abs(energy(s.kernel, s.params, u).total);
        double err[3];
        const double hs[3] = {1e-2, 1e-3, 1e-4};
        for (int k = 0; k < 3; ++k) {
            const double h = hs[k];
            const double ep =
                energy(s.kernel, s.params,
                       u.with_values(u.values() + h * phi.values()))
                    .total;
            const double em =
                energy(s.kernel, s.params,
                       u.with_values(u.values() - h * phi.values()))
                    .total;
            err[k] = std::abs((ep - em) / (2.0 * h) - exact);
        }
        // rungs below the roundoff floor of the energy difference carry no
        // order information
        auto floor_at = [&](double h) {
            return 32.0 * std::numeric_limits<double>::epsilon() * e_scale /
                   (2.0 * h);
        };
        double order = -1.0;
        for (int k = 0; k + 1 < 3; ++k)
            if (err[k] > floor_at(hs[k]) && err[k + 1] > floor_at(hs[k + 1]))
                order = std::max(order, std::log10(err[k] /
                                                   std::max(err[k + 1], 1e-300)));
        if (order >= 0.0) CHECK(order >= 1.9);
    }
}

TEST_CASE("h1_gradient represents the derivative and descends") {
    const Setup s = make_setup();
    std::mt19937_64 rng(47);
    CHECK(h1_gradient(s.kernel, s.params, RadialFunction::zero(s.grid))
              .values()
              .norm() == 0.0);

    for (int rep = 0; rep < 20; ++rep) {
        const RadialFunction u = testsupport::random_profile(s.grid, rng, 0.05);
        const RadialFunction phi = testsupport::random_profile(s.grid, rng);
        const RadialFunction g = h1_gradient(s.kernel, s.params, u);
        const H1Products gp = h1_products(g, phi);
        const double lhs = gp.dirichlet + gp.mass;
        const double rhs = derivative_action(s.kernel, s.params, u, phi);
        CHECK(std::abs(lhs - rhs) <=
              1e-8 * std::max(1.0, h1_norm(g) * h1_norm(phi)));
    }

    for (int rep = 0; rep < 20; ++rep) {
        const RadialFunction u = testsupport::random_profile(s.grid, rng, 0.05);
        const RadialFunction g = h1_gradient(s.kernel, s.params, u);
        const double gn = h1_norm(g);
        REQUIRE(gn > 0.0);
        const double e0 = energy(s.kernel, s.params, u).total;
        bool descended = false;
        for (double sigma = 1e-2; sigma >= 1e-8; sigma *= 0.25) {
            const double e1 =
                energy(s.kernel, s.params,
                       u.with_values(u.values() - sigma * g.values()))
                    .total;
            if (e1 < e0) {
                descended = true;
                break;
            }
        }
        CHECK(descended);
    }
}

TEST_CASE("energy_and_gradient agrees with the separate paths") {
    const Setup s = make_setup();
    std::mt19937_64 rng(53);
    const RadialFunction u = testsupport::random_profile(s.grid, rng, 0.05);
    const EnergyGradient eg = energy_and_gradient(s.kernel, s.params, u);
    const EnergyBreakdown e = energy(s.kernel, s.params, u);
    CHECK(eg.energy.total == doctest::Approx(e.total).epsilon(1e-14));
    const RadialFunction g = h1_gradient(s.kernel, s.params, u);
    CHECK((eg.gradient.values() - g.values()).cwiseAbs().maxCoeff() <=
          1e-14 * (1.0 + g.values().cwiseAbs().maxCoeff()));
    CHECK(eg.gradient_norm == doctest::Approx(h1_norm(g)).epsilon(1e-12));
}

TEST_CASE("ray_max closed forms and root-finder self-check") {
    const NonlinearityParams p = NonlinearityParams::doubly_critical(7, 2.0);
    RayProfile one_term;
    one_term.p = p.p();
    one_term.q = p.q();
    one_term.A = 1.0;
    one_term.B = 1.0;
    // t0 = (A/(pB))^{1/(2p-2)} = (7/9)^{7/4}
    CHECK(ray_max(one_term) ==
          doctest::Approx(std::pow(7.0 / 9.0, 7.0 / 4.0)).epsilon(1e-12));
    CHECK(std::pow(7.0 / 9.0, 7.0 / 4.0) == doctest::Approx(0.6442).epsilon(1e-4));

    RayProfile q_term;
    q_term.p = p.p();
    q_term.q = p.q();
    q_term.A = 2.0;
    q_term.C = 0.7;
    const double expected =
        std::pow(2.0 / (p.q() * 0.7), 1.0 / (2.0 * p.q() - 2.0));
    CHECK(ray_max(q_term) == doctest::Approx(expected).epsilon(1e-12));

    std::mt19937_64 rng(59);
    std::uniform_real_distribution<double> coeff(0.05, 4.0);
    for (int rep = 0; rep < 100; ++rep) {
        RayProfile ray;
        ray.p = p.p();
        ray.q = p.q();
        ray.A = coeff(rng);
        ray.B = coeff(rng);
        ray.C = coeff(rng);
        ray.D = coeff(rng);
        const double t0 = ray_max(ray);
        CHECK(ray.g(t0) == doctest::Approx(2.0 * ray.A).epsilon(1e-10));
        const double h = 1e-6 * t0;
        CHECK(ray.g(t0 + h) > ray.g(t0 - h));  // strictly increasing g
    }

    RayProfile degenerate;
    degenerate.p = p.p();
    degenerate.q = p.q();
    degenerate.A = 1.0;
    CHECK_THROWS_AS(ray_max(degenerate), std::invalid_argument);
}
