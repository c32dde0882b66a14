// Numerical mountain-pass solver: discretize a path from 0 past the mountain
// ridge, repeatedly descend its maximal node in the H^1 gradient, and report
// the saddle candidate with Nehari and Pohozaev diagnostics.
#pragma once

#include <limits>
#include <vector>

#include "choquard/functional.hpp"

namespace choquard {

struct SeedProfile {
    enum class Kind { Mu, Nu, Gaussian };
    Kind kind = Kind::Mu;
    double lambda = 1.0;  // dilation for Mu / Nu seeds
    double width = 1.0;   // for Gaussian seeds

    bool operator==(const SeedProfile&) const = default;
};

struct SolverConfig {
    int path_nodes = 32;          // K >= 8: path has K+1 nodes from 0 to endpoint
    int max_outer_iters = 20000;
    double gradient_tol = 1e-6;   // absolute H^1 norm at the max node
    double backtrack_factor = 0.5;
    int backtrack_max_trials = 40;
    SeedProfile seed;
    double endpoint_scale_cap = 1e6;
    int redistribute_every = 10;  // arc-length redistribution period
    double stagnation_rel_change = 1e-12;
    int stagnation_window = 50;

    void validate() const;
    bool operator==(const SolverConfig&) const = default;
};

enum class SolveStatus {
    Converged,
    MaxIterations,
    Stagnated,
    LineSearchFailed,  // no descent at machine precision
};

struct SolveResult {
    RadialFunction u_star;
    double energy_level = 0.0;
    double gradient_norm = 0.0;       // H^1
    double nehari_residual = 0.0;
    double pohozaev_residual = 0.0;
    int iterations = 0;
    bool converged = false;
    bool below_threshold = false;     // set when a threshold level was given
    SolveStatus status = SolveStatus::MaxIterations;
};

// T * seed with T past the ray maximum and J(T seed) < 0; T found by doubling
// from t0. Throws if the scale cap is exceeded.
RadialFunction make_endpoint(const RieszKernel& kernel,
                             const NonlinearityParams& params,
                             const RadialFunction& seed,
                             double scale_cap = 1e6);

// Per-iteration record of the node maximum. Descent steps never raise it;
// an arc-length redistribution may, when it re-captures a ridge crossing
// that had slipped inside a path segment.
struct SolveTrace {
    std::vector<double> path_max;              // after the descent step
    std::vector<unsigned char> redistributed;  // this iteration ended in one
};

// threshold_level, when finite, is only used to fill below_threshold.
SolveResult mpa_solve(const RieszKernel& kernel,
                      const NonlinearityParams& params,
                      const SolverConfig& config,
                      double threshold_level =
                          std::numeric_limits<double>::quiet_NaN(),
                      SolveTrace* trace = nullptr);

// J'(u)u / ||u||_{H^1}^2; zero at critical points and at ray maximizers.
double nehari_residual(const RieszKernel& kernel,
                       const NonlinearityParams& params,
                       const RadialFunction& u);

// Dilation stationarity d/dsigma J(u(./sigma)) at sigma = 1, assembled from
// the known scaling powers of each energy term (dirichlet ~ sigma^{N-2},
// mass ~ sigma^N, interactions ~ sigma^{N+alpha}), normalized by ||u||^2.
double pohozaev_residual(const RieszKernel& kernel,
                         const NonlinearityParams& params,
                         const RadialFunction& u);

}  // namespace choquard
