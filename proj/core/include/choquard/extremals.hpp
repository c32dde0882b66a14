// The two extremal bubble families, their normalized amplitudes, and the
// sharp constants S1, S2 of the diagonal convolution inequalities.
#pragma once

#include <cstdint>

#include "choquard/functional.hpp"
#include "choquard/grid.hpp"
#include "choquard/riesz.hpp"

namespace choquard {

enum class ExtremalKind { Mu, Nu };

// Mu: amplitude lambda^{N/2} (lambda^2 + r^2)^{-N/2}       (L^2-invariant)
// Nu: amplitude lambda^{(N-2)/2} (lambda^2 + r^2)^{-(N-2)/2} (Dirichlet-invariant)
struct ExtremalFamily {
    ExtremalKind kind = ExtremalKind::Mu;
    double lambda = 1.0;
    double amplitude = 1.0;
};

double extremal_value(const ExtremalFamily& family, int dimension, double r);
RadialFunction sample_extremal(GridPtr grid, const ExtremalFamily& family);

// Amplitudes fixed at lambda = 1 so that
//   mass(mu_1) = D_pp(mu_1)   and   dirichlet(nu_1) = D_qq(nu_1);
// with phi the unit-amplitude profile, A = (mass(phi)/D_pp(phi))^{1/(2p-2)}
// and B = (dirichlet(phi)/D_qq(phi))^{1/(2q-2)}.
struct Amplitudes {
    double A = 0.0;
    double B = 0.0;
};
Amplitudes normalize_amplitudes(const RieszKernel& kernel,
                                const NonlinearityParams& params);

// S1 = mass(mu_1) / D_pp(mu_1)^{1/p}, S2 = dirichlet(nu_1) / D_qq(nu_1)^{1/q}.
// Both quotients are homogeneous of degree zero in the amplitude.
double sharp_constant_S1(const RieszKernel& kernel,
                         const NonlinearityParams& params);
double sharp_constant_S2(const RieszKernel& kernel,
                         const NonlinearityParams& params);

struct SharpConstants {
    double S1 = 0.0;
    double S2 = 0.0;
    GridSpec grid;                 // provenance
    double lambda_spread_S1 = 0.0; // max relative spread over tested lambdas
    double lambda_spread_S2 = 0.0;
    double estimated_accuracy = 0.0; // Richardson M vs 2M relative estimate
};

// Evaluates S1, S2 on the base grid, certifies lambda-invariance on refitted
// grids (default lambdas {0.5, 1, 2}) and attaches a Richardson M vs 2M
// accuracy estimate.
SharpConstants measure_sharp_constants(const GridSpec& base,
                                       const NonlinearityParams& params,
                                       const RieszOptions& options = {},
                                       const std::vector<double>& lambdas = {
                                           0.5, 1.0, 2.0});

// Slow cross-check of the extremal quotients: projected gradient descent of
// mass(u)/D_pp(u)^{1/p} (S1) or dirichlet(u)/D_qq(u)^{1/q} (S2) from a random
// positive start. Returns the stationary quotient value; the caller compares
// it against the extremal quotient.
double descend_quotient_S1(const RieszKernel& kernel,
                           const NonlinearityParams& params, std::uint64_t seed,
                           int max_iters = 2000);
double descend_quotient_S2(const RieszKernel& kernel,
                           const NonlinearityParams& params, std::uint64_t seed,
                           int max_iters = 2000);

}  // namespace choquard
