// Compactness threshold in terms of S1, S2, the dilation sweep of test-path
// energies bounding the mountain-pass level, and the Brezis-Lieb gap probe.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "choquard/extremals.hpp"
#include "choquard/functional.hpp"

namespace choquard {

struct ThresholdForms {
    // 1/2 (1 - 1/p) p^{1/(p-1)} S1^{p/(p-1)} and the q-analogue.
    double threshold_p = 0.0;
    double threshold_q = 0.0;
    double threshold = 0.0;  // min of the two
    // Equivalent product forms (1/(2p) - 1/(2p^2)) (p S1)^{(N+alpha)/alpha}
    // and (1/(2q) - 1/(2q^2)) (q S2)^{(N+alpha)/(alpha+2)}; identical to the
    // above since p/(p-1) = (N+alpha)/alpha and q/(q-1) = (N+alpha)/(alpha+2).
    double product_form_p = 0.0;
    double product_form_q = 0.0;
};

ThresholdForms compute_threshold(const NonlinearityParams& params, double S1,
                                 double S2);

struct DimensionGate {
    bool open = false;              // N > 4 + alpha, strictly
    double mu_cross_exponent = 0.0; // N(p+q)/2 - (N+alpha); < 2 iff open
    double nu_cross_exponent = 0.0; // (N+alpha)/N; always < 2
};

DimensionGate dimension_gate(int dimension, double alpha);

struct SweepRow {
    double lambda = 0.0;
    double t_lambda = 0.0;  // ray maximizer of J(t mu_lambda)
    double J_mu = 0.0;      // max_t J(t mu_lambda)
    double s_lambda = 0.0;  // ray maximizer of J(t nu_lambda)
    double J_nu = 0.0;      // max_t J(t nu_lambda)
};

// One grid refit + kernel per lambda; amplitudes are normalized once on the
// base grid (they are lambda-independent). Rows come back sorted by lambda.
std::vector<SweepRow> path_energy_sweep(const GridSpec& base,
                                        const NonlinearityParams& params,
                                        std::vector<double> lambdas,
                                        const RieszOptions& options = {});

enum class Verdict { BelowThreshold, NotEstablished };

struct ThresholdReport {
    int dimension = 0;
    double alpha = 0.0;
    double p = 0.0, q = 0.0;
    GridSpec grid;
    double S1 = 0.0, S2 = 0.0;
    double threshold_p = 0.0, threshold_q = 0.0, threshold = 0.0;
    std::vector<SweepRow> sweep;
    double c0_upper = 0.0;           // min over the sweep of both path maxima
    double richardson_error = 0.0;   // discretization estimate of c0_upper
    double margin = 0.0;             // threshold - c0_upper
    bool gate_open = false;          // N > 4 + alpha
    Verdict verdict = Verdict::NotEstablished;
};

// 25 log-spaced lambdas in [1e-3, 1e3] by default.
std::vector<double> default_lambda_sweep();

// Assembles the full report. BelowThreshold requires margin > 0, margin
// > 3x the Richardson error estimate, and the dimension gate open;
// NotEstablished is a valid outcome, not an error.
ThresholdReport verify_theorem(const GridSpec& base,
                               const NonlinearityParams& params,
                               std::vector<double> lambdas,
                               const RieszOptions& options = {});

// |D(u + b) - D(b) - D(u)| where D is the diagonal pairing at exponent p or
// q and b is a concentrating (Nu, lambda small) or flattening (Mu, lambda
// large) bump; evaluated on the refit grid for the bump scale. The fixed
// profile u is sampled on that grid.
double brezis_lieb_gap(const GridSpec& base, const NonlinearityParams& params,
                       const std::function<double(double)>& u_profile,
                       ExtremalKind bump_kind, double bump_lambda,
                       double bump_amplitude, bool use_q_exponent,
                       const RieszOptions& options = {});

}  // namespace choquard
