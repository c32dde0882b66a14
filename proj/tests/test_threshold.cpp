#include <cmath>

#include "choquard/threshold.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace choquard;

namespace {

RieszOptions test_options() {
    RieszOptions opts;
    opts.quadrature_order = 160;
    opts.threads = 2;
    return opts;
}

}  // namespace

TEST_CASE("threshold exponent identities for N=7, alpha=2") {
    const NonlinearityParams params = NonlinearityParams::doubly_critical(7, 2.0);
    CHECK(params.p() / (params.p() - 1.0) == doctest::Approx(4.5).epsilon(1e-14));
    CHECK(params.q() / (params.q() - 1.0) == doctest::Approx(2.25).epsilon(1e-14));
}

TEST_CASE("the two threshold forms agree to machine precision") {
    const NonlinearityParams params = NonlinearityParams::doubly_critical(7, 2.0);
    for (double S1 : {0.5, 1.0, 2.0, 11.7}) {
        for (double S2 : {0.5, 1.0, 2.0, 137.2}) {
            const ThresholdForms f = compute_threshold(params, S1, S2);
            CHECK(f.threshold_p ==
                  doctest::Approx(f.product_form_p).epsilon(1e-12));
            CHECK(f.threshold_q ==
                  doctest::Approx(f.product_form_q).epsilon(1e-12));
            CHECK(f.threshold == std::min(f.threshold_p, f.threshold_q));
        }
    }
    CHECK_THROWS_AS(compute_threshold(params, -1.0, 1.0), std::invalid_argument);
}

TEST_CASE("thresholds are strictly increasing in the sharp constants") {
    const NonlinearityParams params = NonlinearityParams::doubly_critical(7, 2.0);
    double prev_p = 0.0, prev_q = 0.0;
    for (double s : {0.5, 1.0, 2.0}) {
        const ThresholdForms f = compute_threshold(params, s, s);
        CHECK(f.threshold_p > prev_p);
        CHECK(f.threshold_q > prev_q);
        prev_p = f.threshold_p;
        prev_q = f.threshold_q;
    }
}

TEST_CASE("dimension gate") {
    const DimensionGate g7 = dimension_gate(7, 2.0);
    CHECK(g7.open);
    CHECK(g7.mu_cross_exponent == doctest::Approx(1.8).epsilon(1e-14));
    CHECK(g7.mu_cross_exponent < 2.0);
    CHECK(g7.nu_cross_exponent == doctest::Approx(9.0 / 7.0).epsilon(1e-14));
    CHECK(g7.nu_cross_exponent < 2.0);

    CHECK_FALSE(dimension_gate(6, 2.0).open);   // 6 = 4 + 2, not strict
    CHECK_FALSE(dimension_gate(5, 1.5).open);   // 5 < 5.5
    CHECK(dimension_gate(6, 2.0).mu_cross_exponent >= 2.0);
    CHECK_THROWS_AS(dimension_gate(2, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(dimension_gate(7, 9.0), std::invalid_argument);
}

TEST_CASE("sweep rows approach the analytic scale limits") {
    const NonlinearityParams params = NonlinearityParams::doubly_critical(7, 2.0);
    const GridSpec base{7, 60.0, 700, 2.0};
    const auto rows =
        path_energy_sweep(base, params, {1e-3, 1.0, 1e3}, test_options());
    REQUIRE(rows.size() == 3);
    CHECK(rows.front().lambda == doctest::Approx(1e-3));
    CHECK(rows.back().lambda == doctest::Approx(1e3));

    const double t_inf = std::pow(9.0 / 7.0, 7.0 / 4.0);
    const double s_0 = std::pow(9.0 / 5.0, 1.0 / 1.6);
    CHECK(t_inf == doctest::Approx(1.5524).epsilon(1e-4));
    CHECK(s_0 == doctest::Approx(1.4440).epsilon(1e-4));
    CHECK(std::abs(rows.back().t_lambda - t_inf) / t_inf <= 0.01);
    CHECK(std::abs(rows.front().s_lambda - s_0) / s_0 <= 0.01);

    for (const SweepRow& row : rows) {
        CHECK(row.J_mu > 0.0);
        CHECK(row.J_nu > 0.0);
        CHECK(row.t_lambda > 0.0);
        CHECK(row.s_lambda > 0.0);
    }
    CHECK_THROWS_AS(path_energy_sweep(base, params, {}, test_options()),
                    std::invalid_argument);
    CHECK_THROWS_AS(path_energy_sweep(base, params, {-2.0}, test_options()),
                    std::invalid_argument);
}

TEST_CASE("verify_theorem at desk scale establishes the strict inequality") {
    const NonlinearityParams params = NonlinearityParams::doubly_critical(7, 2.0);
    const GridSpec base{7, 60.0, 600, 2.0};
    const ThresholdReport report = verify_theorem(
        base, params, {0.25, 1.0, 4.0, 16.0, 64.0}, test_options());
    CHECK(report.gate_open);
    CHECK(report.verdict == Verdict::BelowThreshold);
    CHECK(report.margin > 0.0);
    CHECK(report.margin > 3.0 * report.richardson_error);
    CHECK(report.c0_upper > 0.0);
    CHECK(report.threshold == std::min(report.threshold_p, report.threshold_q));
    // the sweep minimum is what bounds the mountain-pass level
    double sweep_min = 1e300;
    for (const SweepRow& row : report.sweep)
        sweep_min = std::min(sweep_min, std::min(row.J_mu, row.J_nu));
    CHECK(report.c0_upper == doctest::Approx(sweep_min));
}

TEST_CASE("closed dimension gate yields no verdict") {
    const NonlinearityParams params = NonlinearityParams::doubly_critical(6, 2.0);
    const GridSpec base{6, 60.0, 400, 2.0};
    const ThresholdReport report =
        verify_theorem(base, params, {0.5, 1.0, 2.0}, test_options());
    CHECK_FALSE(report.gate_open);
    CHECK(report.verdict == Verdict::NotEstablished);
    CHECK(report.sweep.size() == 3);  // the report itself is still emitted
}

TEST_CASE("a single-lambda sweep still gives a valid, looser bound") {
    const NonlinearityParams params = NonlinearityParams::doubly_critical(7, 2.0);
    const GridSpec base{7, 60.0, 500, 2.0};
    const ThresholdReport single =
        verify_theorem(base, params, {1.0}, test_options());
    const ThresholdReport fuller =
        verify_theorem(base, params, {0.25, 1.0, 4.0}, test_options());
    CHECK(single.c0_upper >= fuller.c0_upper - 1e-12 * fuller.c0_upper);
}

TEST_CASE("Brezis-Lieb gap vanishes exactly in the degenerate cases") {
    const NonlinearityParams params = NonlinearityParams::doubly_critical(7, 2.0);
    const GridSpec base{7, 60.0, 500, 2.0};
    auto zero = [](double) { return 0.0; };
    CHECK(brezis_lieb_gap(base, params, zero, ExtremalKind::Nu, 0.1, 1.0, true,
                          test_options()) == 0.0);
    auto u = [](double r) { return std::exp(-r * r); };
    CHECK(brezis_lieb_gap(base, params, u, ExtremalKind::Nu, 0.1, 0.0, true,
                          test_options()) == 0.0);
}

TEST_CASE("Brezis-Lieb gap decays along nu concentration") {
    const NonlinearityParams params = NonlinearityParams::doubly_critical(7, 2.0);
    const GridSpec base{7, 60.0, 1000, 2.0};
    auto u = [](double r) { return std::exp(-r * r); };
    double prev = 1e300;
    for (double lambda : {1e-1, 1e-2, 1e-3}) {
        const double gap = brezis_lieb_gap(base, params, u, ExtremalKind::Nu,
                                           lambda, 1.0, true, test_options());
        CHECK(gap < prev / 2.0);
        prev = gap;
    }
}

TEST_CASE("Brezis-Lieb gap decays along mu flattening") {
    const NonlinearityParams params = NonlinearityParams::doubly_critical(7, 2.0);
    const GridSpec base{7, 60.0, 1000, 2.0};
    auto u = [](double r) { return std::exp(-r * r); };
    double prev = 1e300;
    for (double lambda : {1e1, 1e2, 1e3}) {
        const double gap = brezis_lieb_gap(base, params, u, ExtremalKind::Mu,
                                           lambda, 1.0, false, test_options());
        CHECK(gap < prev / 2.0);
        prev = gap;
    }
}

TEST_CASE("mu-branch sweep energies stay below the p-threshold at large lambda") {
    const NonlinearityParams params = NonlinearityParams::doubly_critical(7, 2.0);
    const GridSpec base{7, 60.0, 700, 2.0};
    const auto rows =
        path_energy_sweep(base, params, {8.0, 32.0, 128.0}, test_options());
    double S1 = 0.0;
    {
        GridPtr grid = build_grid(base);
        const RieszKernel kernel = build_kernel(grid, 2.0, test_options());
        S1 = sharp_constant_S1(kernel, params);
    }
    const double threshold_p =
        compute_threshold(params, S1, 1.0).threshold_p;
    double prev_gap = 1e300;
    for (const SweepRow& row : rows) {
        const double gap = threshold_p - row.J_mu;
        CHECK(gap > 0.0);
        CHECK(gap < prev_gap);  // approach from below as lambda grows
        prev_gap = gap;
    }
    // log-log slope of the gap recovers the cross-term exponent 1.8 (the
    // lambda^{-2} Dirichlet correction pushes the fit slightly high)
    const double slope = std::log(
        (threshold_p - rows[0].J_mu) / (threshold_p - rows[2].J_mu)) /
                         std::log(128.0 / 8.0);
    CHECK(slope == doctest::Approx(1.8).epsilon(0.2));
}
