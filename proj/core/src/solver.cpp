#include "choquard/solver.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>
#include <vector>

#include "choquard/extremals.hpp"

namespace choquard {

void SolverConfig::validate() const {
    if (path_nodes < 8)
        throw std::invalid_argument("SolverConfig: path_nodes must be >= 8");
    if (max_outer_iters < 1)
        throw std::invalid_argument("SolverConfig: max_outer_iters must be >= 1");
    if (!(gradient_tol > 0.0))
        throw std::invalid_argument("SolverConfig: gradient_tol must be positive");
    if (!(backtrack_factor > 0.0) || !(backtrack_factor < 1.0))
        throw std::invalid_argument(
            "SolverConfig: backtrack_factor must lie in (0, 1)");
    if (backtrack_max_trials < 1)
        throw std::invalid_argument(
            "SolverConfig: backtrack_max_trials must be >= 1");
    if (!(endpoint_scale_cap > 0.0))
        throw std::invalid_argument(
            "SolverConfig: endpoint_scale_cap must be positive");
    if (redistribute_every < 1)
        throw std::invalid_argument(
            "SolverConfig: redistribute_every must be >= 1");
    if (!(seed.lambda > 0.0) || !(seed.width > 0.0))
        throw std::invalid_argument("SolverConfig: seed scale must be positive");
}

namespace {

RadialFunction sample_seed(GridPtr grid, const SeedProfile& seed) {
    switch (seed.kind) {
        case SeedProfile::Kind::Mu:
            return sample_extremal(std::move(grid),
                                   {ExtremalKind::Mu, seed.lambda, 1.0});
        case SeedProfile::Kind::Nu:
            return sample_extremal(std::move(grid),
                                   {ExtremalKind::Nu, seed.lambda, 1.0});
        case SeedProfile::Kind::Gaussian: {
            const double w = seed.width;
            return RadialFunction::sample(std::move(grid), [w](double r) {
                return std::exp(-(r / w) * (r / w));
            });
        }
    }
    throw std::logic_error("sample_seed: unknown seed kind");
}

// Endpoint scale past the ray maximum: smallest doubling of t0 with
// negative energy.
double endpoint_scale(const RayProfile& ray, double t0, double scale_cap) {
    double T = 2.0 * t0;
    while (true) {
        if (T > scale_cap * std::max(1.0, t0))
            throw std::runtime_error(
                "make_endpoint: scale cap exceeded before the energy turned "
                "negative");
        if (ray.value(T) < 0.0) return T;
        T *= 2.0;
    }
}

}  // namespace

RadialFunction make_endpoint(const RieszKernel& kernel,
                             const NonlinearityParams& params,
                             const RadialFunction& seed, double scale_cap) {
    const RayProfile ray = ray_profile(kernel, params, seed);
    const double T = endpoint_scale(ray, ray_max(ray), scale_cap);
    return seed.with_values(T * seed.values());
}

double nehari_residual(const RieszKernel& kernel,
                       const NonlinearityParams& params,
                       const RadialFunction& u) {
    const double n2 = std::pow(h1_norm(u), 2);
    if (!(n2 > 0.0))
        throw std::invalid_argument("nehari_residual: u must be nonzero");
    return derivative_action(kernel, params, u, u) / n2;
}

double pohozaev_residual(const RieszKernel& kernel,
                         const NonlinearityParams& params,
                         const RadialFunction& u) {
    const EnergyBreakdown e = energy(kernel, params, u);
    const double n2 = e.dirichlet + e.mass;
    if (!(n2 > 0.0))
        throw std::invalid_argument("pohozaev_residual: u must be nonzero");
    const double N = params.dimension(), alpha = params.alpha();
    const double cp = params.coeff_p(), cq = params.coeff_q();
    const double nonlocal =
        0.5 * cp * cp * e.D_pp + 0.5 * cq * cq * e.D_qq + cp * cq * e.D_pq;
    const double residual = 0.5 * (N - 2.0) * e.dirichlet + 0.5 * N * e.mass -
                            (N + alpha) * nonlocal;
    return residual / n2;
}

// The path family is kept inside the ray class gamma(t) = t T u: these are
// admissible paths (gamma(0) = 0, J(gamma(1)) < 0), and for the even,
// ray-unimodal nonlinearity the minimax over rays equals the mountain-pass
// level. The max-energy node of a ray path sits at the ray maximum, so the
// descent step moves the crest shape down the landscape of
//   Jhat(u) := max_{t>0} J(t u) = J(t0(u) u),
// whose H^1 gradient is t0 * grad J(t0 u) (the t-derivative vanishes at t0).
// Jhat is scale invariant and bounded below by the mountain-pass level, so
// backtracking descent is monotone; free polyline paths at this node budget
// pin the crossing level to segment interpolation instead.
SolveResult mpa_solve(const RieszKernel& kernel,
                      const NonlinearityParams& params,
                      const SolverConfig& config, double threshold_level,
                      SolveTrace* trace) {
    config.validate();
    GridPtr grid = kernel.grid();

    RadialFunction shape = sample_seed(grid, config.seed);
    shape = shape.with_values(shape.values() / h1_norm(shape));

    RayProfile ray = ray_profile(kernel, params, shape);
    double t0 = ray_max(ray);
    double endpoint = endpoint_scale(ray, t0, config.endpoint_scale_cap);
    double crest = ray.value(t0);

    SolveStatus status = SolveStatus::MaxIterations;
    bool converged = false;
    double step = 1.0;
    int iterations = 0;
    std::deque<double> recent_max;
    EnergyGradient eg =
        energy_and_gradient(kernel, params,
                            shape.with_values(t0 * shape.values()));

    for (int outer = 1; outer <= config.max_outer_iters; ++outer) {
        iterations = outer;

        if (eg.gradient_norm <= config.gradient_tol) {
            converged = true;
            status = SolveStatus::Converged;
            break;
        }

        // Armijo backtracking on the crest shape; the slope of Jhat along
        // the direction t0 * g is t0^2 ||g||^2.
        const double slope =
            t0 * t0 * eg.gradient_norm * eg.gradient_norm;
        bool moved = false;
        step = std::min(2.0 * step, 1.0 / std::max(t0 * eg.gradient_norm, 1e-12));
        for (int trial = 0; trial < config.backtrack_max_trials; ++trial) {
            RadialFunction cand = shape.with_values(
                shape.values() - (step * t0) * eg.gradient.values());
            if (!(h1_norm(cand) > 0.0)) {
                step *= config.backtrack_factor;
                continue;
            }
            const RayProfile cand_ray = ray_profile(kernel, params, cand);
            if (!(cand_ray.B > 0.0 || cand_ray.C > 0.0 || cand_ray.D > 0.0)) {
                step *= config.backtrack_factor;
                continue;
            }
            const double cand_t0 = ray_max(cand_ray);
            const double cand_crest = cand_ray.value(cand_t0);
            if (std::isfinite(cand_crest) &&
                cand_crest <= crest - 1e-4 * step * slope) {
                shape = cand.with_values(cand.values() / h1_norm(cand));
                ray = ray_profile(kernel, params, shape);
                t0 = ray_max(ray);
                crest = ray.value(t0);
                moved = true;
                break;
            }
            step *= config.backtrack_factor;
        }
        if (!moved) {
            status = SolveStatus::LineSearchFailed;
            break;
        }

        // re-anchor the ray path through the new crest shape
        endpoint = endpoint_scale(ray, t0, config.endpoint_scale_cap);
        if (trace) {
            trace->path_max.push_back(crest);
            trace->redistributed.push_back(
                outer % config.redistribute_every == 0 ? 1 : 0);
        }

        eg = energy_and_gradient(kernel, params,
                                 shape.with_values(t0 * shape.values()));

        recent_max.push_back(crest);
        if (static_cast<int>(recent_max.size()) > config.stagnation_window)
            recent_max.pop_front();
        if (static_cast<int>(recent_max.size()) == config.stagnation_window) {
            const double oldest = recent_max.front(), newest = recent_max.back();
            const double scale =
                std::max({std::abs(oldest), std::abs(newest), 1e-300});
            if (std::abs(oldest - newest) / scale < config.stagnation_rel_change &&
                eg.gradient_norm > config.gradient_tol) {
                status = SolveStatus::Stagnated;
                break;
            }
        }
    }

    RadialFunction u_star = shape.with_values(t0 * shape.values());
    SolveResult result{u_star,
                       crest,
                       eg.gradient_norm,
                       0.0,
                       0.0,
                       iterations,
                       converged,
                       false,
                       status};
    result.nehari_residual = nehari_residual(kernel, params, u_star);
    result.pohozaev_residual = pohozaev_residual(kernel, params, u_star);
    if (std::isfinite(threshold_level))
        result.below_threshold =
            result.energy_level > 0.0 && result.energy_level < threshold_level;
    return result;
}

}  // namespace choquard
