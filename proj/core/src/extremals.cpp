#include "choquard/extremals.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace choquard {

namespace {

double profile_exponent(ExtremalKind kind, int dimension) {
    return kind == ExtremalKind::Mu ? 0.5 * dimension : 0.5 * (dimension - 2);
}

Eigen::VectorXd abs_pow(const Eigen::VectorXd& u, double p) {
    return u.unaryExpr([p](double x) {
        const double a = std::abs(x);
        return a == 0.0 ? 0.0 : std::exp(p * std::log(a));
    });
}

// action of the Dirichlet form matrix (cell difference quotients)
Eigen::VectorXd apply_stiffness(const RadialGrid& grid,
                                const Eigen::VectorXd& u) {
    const Eigen::VectorXd& r = grid.nodes();
    const Eigen::VectorXd& cell = grid.cell_masses();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(u.size());
    for (int i = 0; i + 1 < grid.size(); ++i) {
        const double dr = r[i + 1] - r[i];
        const double flux = cell[i] * (u[i + 1] - u[i]) / (dr * dr);
        out[i] -= flux;
        out[i + 1] += flux;
    }
    return out;
}

}  // namespace

double extremal_value(const ExtremalFamily& family, int dimension, double r) {
    const double e = profile_exponent(family.kind, dimension);
    const double l = family.lambda;
    return family.amplitude * std::pow(l, e) * std::pow(l * l + r * r, -e);
}

RadialFunction sample_extremal(GridPtr grid, const ExtremalFamily& family) {
    if (!(family.lambda > 0.0))
        throw std::invalid_argument("sample_extremal: lambda must be positive");
    const int N = grid->dimension();
    return RadialFunction::sample(
        std::move(grid), [&](double r) { return extremal_value(family, N, r); });
}

Amplitudes normalize_amplitudes(const RieszKernel& kernel,
                                const NonlinearityParams& params) {
    const GridPtr& grid = kernel.grid();
    Amplitudes out;
    {
        const RadialFunction mu =
            sample_extremal(grid, {ExtremalKind::Mu, 1.0, 1.0});
        const double m = h1_products(mu, mu).mass;
        const RadialFunction mu_p =
            mu.with_values(abs_pow(mu.values(), params.p()));
        const double dpp = hls_pairing(kernel, mu_p, mu_p);
        if (!(m > 0.0) || !(dpp > 0.0))
            throw std::runtime_error("normalize_amplitudes: degenerate quadrature");
        // mass scales as A^2 and D_pp as A^{2p}
        out.A = std::pow(m / dpp, 1.0 / (2.0 * params.p() - 2.0));
    }
    {
        const RadialFunction nu =
            sample_extremal(grid, {ExtremalKind::Nu, 1.0, 1.0});
        const double dir = h1_products(nu, nu).dirichlet;
        const RadialFunction nu_q =
            nu.with_values(abs_pow(nu.values(), params.q()));
        const double dqq = hls_pairing(kernel, nu_q, nu_q);
        if (!(dir > 0.0) || !(dqq > 0.0))
            throw std::runtime_error("normalize_amplitudes: degenerate quadrature");
        out.B = std::pow(dir / dqq, 1.0 / (2.0 * params.q() - 2.0));
    }
    return out;
}

double sharp_constant_S1(const RieszKernel& kernel,
                         const NonlinearityParams& params) {
    const RadialFunction mu =
        sample_extremal(kernel.grid(), {ExtremalKind::Mu, 1.0, 1.0});
    const double m = h1_products(mu, mu).mass;
    const RadialFunction mu_p = mu.with_values(abs_pow(mu.values(), params.p()));
    const double dpp = hls_pairing(kernel, mu_p, mu_p);
    return m / std::pow(dpp, 1.0 / params.p());
}

double sharp_constant_S2(const RieszKernel& kernel,
                         const NonlinearityParams& params) {
    const RadialFunction nu =
        sample_extremal(kernel.grid(), {ExtremalKind::Nu, 1.0, 1.0});
    const double dir = h1_products(nu, nu).dirichlet;
    const RadialFunction nu_q = nu.with_values(abs_pow(nu.values(), params.q()));
    const double dqq = hls_pairing(kernel, nu_q, nu_q);
    return dir / std::pow(dqq, 1.0 / params.q());
}

namespace {

struct QuotientPair {
    double S1 = 0.0;
    double S2 = 0.0;
};

QuotientPair constants_at_lambda(const GridSpec& base,
                                 const NonlinearityParams& params,
                                 const RieszOptions& options, double lambda) {
    const GridSpec spec = refit_for_scale(base, lambda);
    GridPtr grid = build_grid(spec);
    const RieszKernel kernel = build_kernel(grid, params.alpha(), options);
    QuotientPair out;
    {
        const RadialFunction mu =
            sample_extremal(grid, {ExtremalKind::Mu, lambda, 1.0});
        const double m = h1_products(mu, mu).mass;
        const RadialFunction mu_p =
            mu.with_values(abs_pow(mu.values(), params.p()));
        out.S1 = m / std::pow(hls_pairing(kernel, mu_p, mu_p), 1.0 / params.p());
    }
    {
        const RadialFunction nu =
            sample_extremal(grid, {ExtremalKind::Nu, lambda, 1.0});
        const double dir = h1_products(nu, nu).dirichlet;
        const RadialFunction nu_q =
            nu.with_values(abs_pow(nu.values(), params.q()));
        out.S2 =
            dir / std::pow(hls_pairing(kernel, nu_q, nu_q), 1.0 / params.q());
    }
    return out;
}

}  // namespace

SharpConstants measure_sharp_constants(const GridSpec& base,
                                       const NonlinearityParams& params,
                                       const RieszOptions& options,
                                       const std::vector<double>& lambdas) {
    SharpConstants out;
    out.grid = base;
    GridPtr grid = build_grid(base);
    const RieszKernel kernel = build_kernel(grid, params.alpha(), options);
    out.S1 = sharp_constant_S1(kernel, params);
    out.S2 = sharp_constant_S2(kernel, params);

    for (double lambda : lambdas) {
        if (lambda == 1.0) continue;
        const QuotientPair at = constants_at_lambda(base, params, options, lambda);
        out.lambda_spread_S1 =
            std::max(out.lambda_spread_S1, std::abs(at.S1 - out.S1) / out.S1);
        out.lambda_spread_S2 =
            std::max(out.lambda_spread_S2, std::abs(at.S2 - out.S2) / out.S2);
    }

    GridSpec fine = base;
    fine.node_count = 2 * base.node_count;
    GridPtr fine_grid = build_grid(fine);
    const RieszKernel fine_kernel =
        build_kernel(fine_grid, params.alpha(), options);
    const double S1f = sharp_constant_S1(fine_kernel, params);
    const double S2f = sharp_constant_S2(fine_kernel, params);
    // the Dirichlet form is the lowest-order (2nd) piece: error(M) ~ 4/3 gap
    out.estimated_accuracy =
        (4.0 / 3.0) * std::max(std::abs(S1f - out.S1) / S1f,
                               std::abs(S2f - out.S2) / S2f);
    return out;
}

namespace {

Eigen::VectorXd random_positive_profile(const RadialGrid& grid,
                                        std::mt19937_64& rng) {
    std::uniform_real_distribution<double> amp(0.2, 1.0);
    std::uniform_real_distribution<double> logw(std::log(0.3), std::log(3.0));
    Eigen::VectorXd v = Eigen::VectorXd::Zero(grid.size());
    for (int k = 0; k < 4; ++k) {
        const double a = amp(rng);
        const double w = std::exp(logw(rng));
        v += grid.nodes().unaryExpr([&](double r) {
            return a * std::exp(-(r / w) * (r / w));
        });
    }
    return v;
}

// Projected descent of a degree-zero quotient in the H^1-preconditioned
// metric; `use_mass_numerator` picks mass/D_pp^{1/p} vs dirichlet/D_qq^{1/q}.
double descend_quotient(const RieszKernel& kernel,
                        const NonlinearityParams& params,
                        bool use_mass_numerator, std::uint64_t seed,
                        int max_iters) {
    const RadialGrid& grid = *kernel.grid();
    const Eigen::VectorXd& w = grid.volume_weights();
    const double exponent = use_mass_numerator ? params.p() : params.q();

    std::mt19937_64 rng(seed);
    Eigen::VectorXd u = random_positive_profile(grid, rng);

    auto quotient = [&](const Eigen::VectorXd& v, double* numerator,
                        double* pairing, Eigen::VectorXd* conv) {
        const RadialFunction f(kernel.grid(), v);
        const H1Products h1 = h1_products(f, f);
        const double num = use_mass_numerator ? h1.mass : h1.dirichlet;
        const Eigen::VectorXd fp = abs_pow(v, exponent);
        Eigen::VectorXd cv = kernel.matrix() * fp;
        const double D = (cv.array() * fp.array() * w.array()).sum();
        if (numerator) *numerator = num;
        if (pairing) *pairing = D;
        if (conv) *conv = std::move(cv);
        return num / std::pow(D, 1.0 / exponent);
    };

    double num = 0.0, D = 0.0;
    Eigen::VectorXd conv;
    double Q = quotient(u, &num, &D, &conv);
    double step = 1.0;
    int slow_steps = 0;  // stop only after sustained stagnation
    int stalls = 0;      // line-search stalls get a fresh step before giving up
    Eigen::VectorXd prev_u, prev_dir;
    for (int it = 0; it < max_iters; ++it) {
        // euclidean gradient of num(u) D(u)^{-1/exponent}
        Eigen::VectorXd grad_num =
            use_mass_numerator
                ? Eigen::VectorXd(2.0 * (w.array() * u.array()))
                : Eigen::VectorXd(2.0 * apply_stiffness(grid, u));
        Eigen::VectorXd grad_D =
            2.0 * exponent *
            (w.array() * conv.array() *
             abs_pow(u, exponent - 1.0).array() * u.array().sign())
                .matrix();
        const double Dpow = std::pow(D, 1.0 / exponent);
        Eigen::VectorXd grad_Q =
            grad_num / Dpow -
            (num / (exponent * D * Dpow)) * grad_D;
        // precondition with (-Delta + 1)^{-1}: one tridiagonal solve
        const Eigen::VectorXd dir =
            solve_helmholtz(
                RadialFunction(kernel.grid(),
                               Eigen::VectorXd(grad_Q.array() / w.array())))
                .values();
        const double slope = grad_Q.dot(dir);
        if (!(slope > 0.0)) break;

        // Barzilai-Borwein step through the flat dilation direction
        if (prev_u.size() > 0) {
            const Eigen::VectorXd s = u - prev_u;
            const Eigen::VectorXd y = dir - prev_dir;
            const double sy = s.dot(y);
            if (sy > 0.0) step = std::clamp(s.dot(s) / sy, 1e-10, 1e8);
        }
        prev_u = u;
        prev_dir = dir;

        bool improved = false;
        for (int trial = 0; trial < 60; ++trial) {
            Eigen::VectorXd cand = (u - step * dir).cwiseMax(0.0);
            if (cand.maxCoeff() <= 0.0) {
                step *= 0.5;
                continue;
            }
            double cn = 0.0, cD = 0.0;
            Eigen::VectorXd cconv;
            const double cQ = quotient(cand, &cn, &cD, &cconv);
            if (cQ < Q - 1e-14 * std::abs(Q)) {
                const double rel = (Q - cQ) / std::abs(Q);
                u = std::move(cand);
                Q = cQ;
                num = cn;
                D = cD;
                conv = std::move(cconv);
                improved = true;
                slow_steps = rel < 1e-12 ? slow_steps + 1 : 0;
                break;
            }
            step *= 0.5;
        }
        if (!improved) {
            if (++stalls >= 3) break;
            step = 1.0;
            prev_u.resize(0);
            continue;
        }
        if (slow_steps >= 5) break;
        // scale invariance: renormalize to keep magnitudes tame
        const double norm = std::sqrt((w.array() * u.array().square()).sum());
        u /= norm;
        prev_u /= norm;
    }
    return Q;
}

}  // namespace

double descend_quotient_S1(const RieszKernel& kernel,
                           const NonlinearityParams& params, std::uint64_t seed,
                           int max_iters) {
    return descend_quotient(kernel, params, true, seed, max_iters);
}

double descend_quotient_S2(const RieszKernel& kernel,
                           const NonlinearityParams& params, std::uint64_t seed,
                           int max_iters) {
    return descend_quotient(kernel, params, false, seed, max_iters);
}

}  // namespace choquard
