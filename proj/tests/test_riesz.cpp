#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "choquard/riesz.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace choquard;

namespace {

RieszOptions test_options() {
    RieszOptions opts;
    opts.quadrature_order = 192;
    opts.threads = 2;
    return opts;
}

Eigen::VectorXd abs_pow(const Eigen::VectorXd& u, double p) {
    return u.unaryExpr([p](double x) {
        const double a = std::abs(x);
        return a == 0.0 ? 0.0 : std::pow(a, p);
    });
}

double lp_norm(const RadialFunction& f, double p) {
    return std::pow(
        f.grid()->volume_weights().dot(abs_pow(f.values(), p)), 1.0 / p);
}

}  // namespace

TEST_CASE("normalization constant matches the Gamma formula") {
    CHECK(riesz_normalization(3, 2.0) ==
          doctest::Approx(1.0 / (4.0 * M_PI)).epsilon(1e-14));
    CHECK(riesz_normalization(7, 2.0) ==
          doctest::Approx(3.0 / (16.0 * std::pow(M_PI, 3.0))).epsilon(1e-14));
    CHECK_THROWS_AS(riesz_normalization(7, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(riesz_normalization(7, 7.0), std::invalid_argument);
}

TEST_CASE("build_kernel rejects alpha outside (0, N)") {
    GridPtr grid = build_grid(GridSpec{3, 5.0, 32, 2.0});
    CHECK_THROWS_AS(build_kernel(grid, -1.0, test_options()),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_kernel(grid, 3.0, test_options()),
                    std::invalid_argument);
}

TEST_CASE("Newtonian potential of the unit ball") {
    GridPtr grid = build_grid(GridSpec{3, 5.0, 1400, 2.0});
    const RieszKernel kernel = build_kernel(grid, 2.0, test_options());
    const double eps = 0.005;
    const RadialFunction ball = RadialFunction::sample(
        grid, [eps](double r) { return 0.5 * std::erfc((r - 1.0) / eps); });
    const RadialFunction pot = convolve(kernel, ball);
    double worst = 0.0;
    for (int i = 0; i < grid->size(); ++i) {
        const double r = grid->nodes()[i];
        const double exact = r <= 1.0 ? (3.0 - r * r) / 6.0 : 1.0 / (3.0 * r);
        worst = std::max(worst, std::abs(pot[i] - exact) / exact);
    }
    CHECK(worst <= 1e-4);
}

TEST_CASE("kernel is entrywise nonnegative and weight-symmetric") {
    GridPtr grid = build_grid(GridSpec{5, 20.0, 200, 2.0});
    const RieszKernel kernel = build_kernel(grid, 1.5, test_options());
    const Eigen::MatrixXd& K = kernel.matrix();
    CHECK(K.minCoeff() >= 0.0);
    const Eigen::VectorXd& w = grid->volume_weights();
    double worst = 0.0;
    for (int i = 0; i < grid->size(); i += 7)
        for (int j = 0; j < grid->size(); j += 5) {
            const double a = K(i, j) * w[i], b = K(j, i) * w[j];
            worst = std::max(worst, std::abs(a - b) / std::max(std::abs(a), 1e-300));
        }
    CHECK(worst <= 1e-13);
}

TEST_CASE("convolve is linear, positive and grid-checked") {
    GridPtr grid = build_grid(GridSpec{7, 40.0, 300, 2.0});
    const RieszKernel kernel = build_kernel(grid, 2.0, test_options());
    CHECK(convolve(kernel, RadialFunction::zero(grid)).values().norm() == 0.0);

    std::mt19937_64 rng(5);
    const RadialFunction f = testsupport::random_profile(grid, rng);
    const RadialFunction g = testsupport::random_profile(grid, rng);
    const Eigen::VectorXd lhs =
        convolve(kernel, f.with_values(3.0 * f.values() - 0.5 * g.values())).values();
    const Eigen::VectorXd rhs =
        3.0 * convolve(kernel, f).values() - 0.5 * convolve(kernel, g).values();
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <=
          1e-12 * rhs.cwiseAbs().maxCoeff());

    for (int rep = 0; rep < 20; ++rep) {
        const RadialFunction h = testsupport::random_profile(grid, rng, 0.05);
        CHECK(convolve(kernel, h).values().minCoeff() >= 0.0);
    }

    GridPtr other = build_grid(GridSpec{7, 50.0, 300, 2.0});
    CHECK_THROWS_AS(convolve(kernel, RadialFunction::zero(other)),
                    std::invalid_argument);
}

TEST_CASE("hls_pairing is symmetric and nonnegative on nonnegative inputs") {
    GridPtr grid = build_grid(GridSpec{7, 40.0, 300, 2.0});
    const RieszKernel kernel = build_kernel(grid, 2.0, test_options());
    std::mt19937_64 rng(17);
    CHECK(hls_pairing(kernel, RadialFunction::zero(grid),
                      testsupport::random_profile(grid, rng)) == 0.0);
    for (int rep = 0; rep < 100; ++rep) {
        const RadialFunction f = testsupport::random_profile(grid, rng, 0.02);
        CHECK(hls_pairing(kernel, f, f) >= 0.0);
    }
    for (int rep = 0; rep < 10; ++rep) {
        const RadialFunction f = testsupport::random_profile(grid, rng);
        const RadialFunction g = testsupport::random_profile(grid, rng);
        const double fg = hls_pairing(kernel, f, g);
        const double gf = hls_pairing(kernel, g, f);
        CHECK(fg == doctest::Approx(gf).epsilon(1e-12));
    }
}

TEST_CASE("extremal bubble maps to the conjugate bubble") {
    // I_alpha * (1+r^2)^{-(N+alpha)/2} is proportional to (1+r^2)^{-(N-alpha)/2}
    const int N = 7;
    const double alpha = 2.0;
    GridPtr grid = build_grid(GridSpec{N, 60.0, 1500, 2.0});
    const RieszKernel kernel = build_kernel(grid, alpha, test_options());
    const RadialFunction phi = RadialFunction::sample(grid, [&](double r) {
        return std::pow(1.0 + r * r, -0.5 * (N + alpha));
    });
    const RadialFunction conv = convolve(kernel, phi);

    double lo = 1e300, hi = -1e300;
    for (int i = 0; i < grid->size(); ++i) {
        const double r = grid->nodes()[i];
        if (r > grid->radius() / 4.0) break;
        const double ratio = conv[i] * std::pow(1.0 + r * r, 0.5 * (N - alpha));
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    CHECK((hi - lo) / (0.5 * (hi + lo)) <= 1e-3);

    // independent nested-quadrature oracle at 10 node radii
    for (int k = 1; k <= 10; ++k) {
        const int i = k * grid->size() / 20;  // nodes spread over (0, R/4]
        const double r = grid->nodes()[i];
        const double expect = testsupport::oracle_riesz(
            N, alpha, r,
            [&](double s) { return std::pow(1.0 + s * s, -0.5 * (N + alpha)); },
            grid->radius());
        CHECK(conv[i] == doctest::Approx(expect).epsilon(1e-3));
    }
}

TEST_CASE("dilation scaling law of the diagonal pairing") {
    const int N = 7;
    const double alpha = 2.0, lambda = 0.5, beta = 1.3;
    GridPtr grid = build_grid(GridSpec{N, 60.0, 1000, 2.0});
    const RieszKernel kernel = build_kernel(grid, alpha, test_options());
    const RadialFunction f = RadialFunction::sample(
        grid, [](double r) { return std::exp(-r * r); });
    const RadialFunction fl = RadialFunction::sample(grid, [&](double r) {
        return std::pow(lambda, beta) * std::exp(-lambda * lambda * r * r);
    });
    const double lhs = hls_pairing(kernel, fl, fl);
    const double rhs =
        std::pow(lambda, 2.0 * beta - N - alpha) * hls_pairing(kernel, f, f);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-4));
}

TEST_CASE("pairing bound with constant calibrated from the extremal pair") {
    const int N = 7;
    const double alpha = 2.0;
    GridPtr grid = build_grid(GridSpec{N, 40.0, 400, 2.0});
    const RieszKernel kernel = build_kernel(grid, alpha, test_options());
    const double p = 2.0 * N / (N + alpha);
    const RadialFunction ext = RadialFunction::sample(grid, [&](double r) {
        return std::pow(1.0 + r * r, -0.5 * (N + alpha));
    });
    const double C =
        1.05 * hls_pairing(kernel, ext, ext) / std::pow(lp_norm(ext, p), 2);
    std::mt19937_64 rng(23);
    for (int rep = 0; rep < 100; ++rep) {
        const RadialFunction f = testsupport::random_profile(grid, rng, 0.02);
        const RadialFunction g = testsupport::random_profile(grid, rng, 0.02);
        CHECK(hls_pairing(kernel, f, g) <=
              C * lp_norm(f, p) * lp_norm(g, p) * (1.0 + 1e-9));
    }
}

TEST_CASE("Riesz potential estimate with a calibrated constant") {
    const int N = 7;
    const double alpha = 2.0;
    GridPtr grid = build_grid(GridSpec{N, 40.0, 400, 2.0});
    const RieszKernel kernel = build_kernel(grid, alpha, test_options());
    const double p = 2.0 * N / (N + alpha);
    const double s = 2.0 * N / (N - alpha);  // 1/p - 1/s = alpha/N
    std::mt19937_64 rng(29);
    double C = 0.0;
    const RadialFunction ext = RadialFunction::sample(grid, [&](double r) {
        return std::pow(1.0 + r * r, -0.5 * (N + alpha));
    });
    C = std::max(C, lp_norm(convolve(kernel, ext), s) / lp_norm(ext, p));
    for (int rep = 0; rep < 5; ++rep) {
        const RadialFunction f = testsupport::random_profile(grid, rng, 0.02);
        C = std::max(C, lp_norm(convolve(kernel, f), s) / lp_norm(f, p));
    }
    C *= 1.1;  // frozen calibration margin
    for (int rep = 0; rep < 100; ++rep) {
        const RadialFunction f = testsupport::random_profile(grid, rng, 0.02);
        CHECK(lp_norm(convolve(kernel, f), s) <= C * lp_norm(f, p));
    }
}

TEST_CASE("kernel cache round-trips bit-exactly") {
    GridPtr grid = build_grid(GridSpec{5, 10.0, 64, 2.0});
    const RieszKernel kernel = build_kernel(grid, 2.0, test_options());
    const auto dir = std::filesystem::temp_directory_path() / "choquard_cache_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "kernel.bin";
    kernel.save(path.string());
    const RieszKernel loaded = RieszKernel::load(path.string());
    CHECK(loaded.grid()->spec() == grid->spec());
    CHECK(loaded.alpha() == kernel.alpha());
    CHECK(loaded.quadrature_order() == kernel.quadrature_order());
    CHECK((loaded.matrix() - kernel.matrix()).cwiseAbs().maxCoeff() == 0.0);

    // build_or_load writes the cache on first use and reads it back after
    const RieszKernel first =
        build_or_load_kernel(grid, 1.25, test_options(), dir.string());
    const std::string key =
        kernel_cache_key(grid->spec(), 1.25, test_options().quadrature_order);
    CHECK(std::filesystem::exists(dir / (key + ".bin")));
    const RieszKernel second =
        build_or_load_kernel(grid, 1.25, test_options(), dir.string());
    CHECK((first.matrix() - second.matrix()).cwiseAbs().maxCoeff() == 0.0);
    std::filesystem::remove_all(dir);
}
