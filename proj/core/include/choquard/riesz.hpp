// Riesz potential I_alpha * f for radial f: dense kernel matrix with the
// Gamma-function normalization, singularity-aware angular quadrature, and
// an optional binary cache.
#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>

#include "choquard/grid.hpp"

namespace choquard {

struct RieszOptions {
    int quadrature_order = 256;  // Gauss-Legendre points for regular pairs
    int threads = 0;             // 0 = hardware concurrency
};

// Dense realization of f -> I_alpha * f on a radial grid:
//   (I_alpha * f)(r_i) ~ sum_j K_ij f(r_j),  K_ij = c w_j k(r_i, r_j) / omega,
// where k(r, s) integrates |r e_1 - s sigma|^{-(N-alpha)} over the unit
// sphere and c = Gamma((N-alpha)/2) / (Gamma(alpha/2) pi^{N/2} 2^alpha).
// K has nonnegative entries and W K is symmetric, so the convolution is
// self-adjoint against the volume weights.
class RieszKernel {
  public:
    RieszKernel(GridPtr grid, double alpha, int quadrature_order,
                Eigen::MatrixXd matrix);

    const GridPtr& grid() const { return grid_; }
    double alpha() const { return alpha_; }
    double normalization() const { return normalization_; }
    int quadrature_order() const { return quadrature_order_; }
    const Eigen::MatrixXd& matrix() const { return matrix_; }

    // Binary cache: header int64 N, f64 alpha, int64 M, f64 R, f64 gamma,
    // int64 quadrature order, then M*M row-major f64 entries.
    void save(const std::string& path) const;
    static RieszKernel load(const std::string& path);

  private:
    GridPtr grid_;
    double alpha_ = 0.0;
    double normalization_ = 0.0;
    int quadrature_order_ = 0;
    Eigen::MatrixXd matrix_;
};

double riesz_normalization(int dimension, double alpha);

RieszKernel build_kernel(GridPtr grid, double alpha,
                         const RieszOptions& options = {});

// Filename-safe cache key for (grid spec, alpha, quadrature order).
std::string kernel_cache_key(const GridSpec& spec, double alpha,
                             int quadrature_order);

// Loads a matching kernel from `cache_dir` if present, otherwise builds and
// stores it. Empty cache_dir means build without caching.
RieszKernel build_or_load_kernel(GridPtr grid, double alpha,
                                 const RieszOptions& options,
                                 const std::string& cache_dir);

RadialFunction convolve(const RieszKernel& kernel, const RadialFunction& f);

// int (I_alpha * f) g dx; symmetric in (f, g), nonnegative for f, g >= 0.
double hls_pairing(const RieszKernel& kernel, const RadialFunction& f,
                   const RadialFunction& g);

}  // namespace choquard
