#include "choquard/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace choquard {

namespace {

// Composite quadrature coefficients on M uniform intervals of [0, 1]:
// Simpson for even M, Simpson + a closing 3/8 panel for odd M. Coefficients
// multiply f(s_i), i = 0..M, and all are positive.
std::vector<double> composite_coefficients(int intervals) {
    const double h = 1.0 / intervals;
    std::vector<double> c(intervals + 1, 0.0);
    int simpson_end = intervals;  // Simpson covers [0, s_simpson_end]
    if (intervals % 2 == 1) simpson_end = intervals - 3;
    for (int k = 0; k + 2 <= simpson_end; k += 2) {
        c[k] += h / 3.0;
        c[k + 1] += 4.0 * h / 3.0;
        c[k + 2] += h / 3.0;
    }
    if (simpson_end != intervals) {
        c[simpson_end] += 3.0 * h / 8.0;
        c[simpson_end + 1] += 9.0 * h / 8.0;
        c[simpson_end + 2] += 9.0 * h / 8.0;
        c[simpson_end + 3] += 3.0 * h / 8.0;
    }
    return c;
}

}  // namespace

void GridSpec::validate() const {
    if (dimension < 3)
        throw std::invalid_argument("GridSpec: dimension must be >= 3, got " +
                                    std::to_string(dimension));
    if (!(radius > 0.0) || !std::isfinite(radius))
        throw std::invalid_argument("GridSpec: radius must be positive");
    if (node_count < 16)
        throw std::invalid_argument("GridSpec: node_count must be >= 16, got " +
                                    std::to_string(node_count));
    if (!(grading >= 1.0) || !std::isfinite(grading))
        throw std::invalid_argument("GridSpec: grading must be >= 1");
}

RadialGrid::RadialGrid(const GridSpec& spec) : spec_(spec) {
    spec.validate();
    const int N = spec.dimension;
    const int M = spec.node_count;
    const double R = spec.radius;
    const double gamma = spec.grading;

    surface_area_ = 2.0 * std::pow(M_PI, 0.5 * N) / std::tgamma(0.5 * N);

    nodes_.resize(M);
    weights_.resize(M);
    const auto coeff = composite_coefficients(M);
    for (int i = 1; i <= M; ++i) {
        const double s = static_cast<double>(i) / M;
        const double r = R * std::pow(s, gamma);
        nodes_[i - 1] = r;
        // measure omega r^{N-1} dr = omega r^{N-1} R gamma s^{gamma-1} ds;
        // the s = 0 endpoint carries zero measure (gamma N > 1).
        const double jac =
            surface_area_ * std::pow(r, N - 1) * R * gamma * std::pow(s, gamma - 1.0);
        weights_[i - 1] = coeff[i] * jac;
    }

    // exact cell integrals of omega r^{N-1}: omega (b^N - a^N)/N
    cell_masses_.resize(M - 1);
    for (int i = 0; i + 1 < M; ++i) {
        const double a = nodes_[i], b = nodes_[i + 1];
        cell_masses_[i] =
            surface_area_ * (std::pow(b, N) - std::pow(a, N)) / N;
    }
}

GridPtr build_grid(const GridSpec& spec) {
    return std::make_shared<const RadialGrid>(spec);
}

GridSpec refit_for_scale(const GridSpec& base, double lambda,
                         double finest_feature) {
    if (!(lambda > 0.0))
        throw std::invalid_argument("refit_for_scale: lambda must be positive");
    GridSpec spec = base;
    spec.radius = base.radius * std::max(1.0, lambda);
    const double finest = finest_feature > 0.0 ? finest_feature : lambda;
    // Deepen the grading so the node fraction below the finest feature scale
    // matches the base grid's fraction below scale 1:
    //   (finest/R)^{1/gamma} = (1/R0)^{1/gamma0}.
    // For lambda >= 1 this reduces to gamma0 and the nodes are exact dilates
    // of the base nodes.
    const double log_base = std::max(std::log(base.radius), 1.0);
    const double needed =
        base.grading * std::log(spec.radius / finest) / log_base;
    spec.grading = std::clamp(std::max(base.grading, needed), 1.0, 8.0);
    return spec;
}

RadialFunction::RadialFunction(GridPtr grid, Eigen::VectorXd values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) throw std::invalid_argument("RadialFunction: null grid");
    if (values_.size() != grid_->size())
        throw std::invalid_argument(
            "RadialFunction: value count does not match grid node count");
    if (!values_.allFinite())
        throw std::invalid_argument("RadialFunction: values must be finite");
}

RadialFunction RadialFunction::zero(GridPtr grid) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(grid->size());
    return RadialFunction(std::move(grid), std::move(v));
}

void require_same_grid(const RadialFunction& a, const RadialFunction& b) {
    if (a.grid() == b.grid()) return;
    if (a.grid()->spec() == b.grid()->spec()) return;  // equal reconstruction
    throw std::invalid_argument("grid mismatch between radial functions");
}

void require_on_grid(const RadialGrid& grid, const RadialFunction& f) {
    if (f.grid().get() == &grid) return;
    if (f.grid()->spec() == grid.spec()) return;
    throw std::invalid_argument("radial function does not live on this grid");
}

double integrate(const RadialFunction& f) {
    return f.grid()->volume_weights().dot(f.values());
}

double integrate(const RadialGrid& grid, const RadialFunction& f) {
    require_on_grid(grid, f);
    return grid.volume_weights().dot(f.values());
}

H1Products h1_products(const RadialFunction& u, const RadialFunction& v) {
    require_same_grid(u, v);
    const RadialGrid& grid = *u.grid();
    const Eigen::VectorXd& r = grid.nodes();
    const Eigen::VectorXd& cu = u.values();
    const Eigen::VectorXd& cv = v.values();
    H1Products out;
    out.mass = (grid.volume_weights().array() * cu.array() * cv.array()).sum();
    double dir = 0.0;
    const Eigen::VectorXd& cell = grid.cell_masses();
    for (int i = 0; i + 1 < grid.size(); ++i) {
        const double dr = r[i + 1] - r[i];
        dir += cell[i] * (cu[i + 1] - cu[i]) * (cv[i + 1] - cv[i]) / (dr * dr);
    }
    // The cell [0, r_1] contributes nothing: even symmetry gives u'(0) = 0.
    out.dirichlet = dir;
    return out;
}

double h1_norm(const RadialFunction& u) {
    const H1Products p = h1_products(u, u);
    return std::sqrt(p.dirichlet + p.mass);
}

RadialFunction solve_helmholtz(const RadialFunction& rhs) {
    const RadialGrid& grid = *rhs.grid();
    const int M = grid.size();
    const int n = M - 1;  // conforming unknowns; v_M = v(R) = 0
    const Eigen::VectorXd& r = grid.nodes();
    const Eigen::VectorXd& w = grid.volume_weights();
    const Eigen::VectorXd& cell = grid.cell_masses();

    // Tridiagonal rows of K + diag(w):
    //   A_ii = c_{i-1}/dr_{i-1}^2 + c_i/dr_i^2 + w_i (no left flux at i = 1).
    Eigen::VectorXd diag(n), lower(n), upper(n), b(n);
    for (int i = 0; i < n; ++i) {
        double d = w[i];
        if (i > 0) {
            const double dr = r[i] - r[i - 1];
            const double k = cell[i - 1] / (dr * dr);
            d += k;
            lower[i] = -k;
        } else {
            lower[i] = 0.0;
        }
        {
            const double dr = r[i + 1] - r[i];
            const double k = cell[i] / (dr * dr);
            d += k;
            upper[i] = (i + 1 < n) ? -k : 0.0;  // flux into the boundary node
        }
        diag[i] = d;
        b[i] = w[i] * rhs[i];
    }

    // Thomas algorithm; the matrix is SPD and strictly diagonally dominant.
    Eigen::VectorXd cp(n), dp(n);
    cp[0] = upper[0] / diag[0];
    dp[0] = b[0] / diag[0];
    for (int i = 1; i < n; ++i) {
        const double m = diag[i] - lower[i] * cp[i - 1];
        cp[i] = (i + 1 < n) ? upper[i] / m : 0.0;
        dp[i] = (b[i] - lower[i] * dp[i - 1]) / m;
    }
    Eigen::VectorXd x(n);
    x[n - 1] = dp[n - 1];
    for (int i = n - 2; i >= 0; --i) x[i] = dp[i] - cp[i] * x[i + 1];

    // componentwise backward-error guard; failure would mean a broken
    // factorization, which the sign-definite operator rules out
    double backward_error = 0.0;
    for (int i = 0; i < n; ++i) {
        double ax = diag[i] * x[i];
        double scale = std::abs(diag[i] * x[i]) + std::abs(b[i]);
        if (i > 0) {
            ax += lower[i] * x[i - 1];
            scale += std::abs(lower[i] * x[i - 1]);
        }
        if (i + 1 < n) {
            ax += upper[i] * x[i + 1];
            scale += std::abs(upper[i] * x[i + 1]);
        }
        if (scale > 0.0)
            backward_error = std::max(backward_error, std::abs(ax - b[i]) / scale);
    }
    if (backward_error > 1e-12)
        throw std::runtime_error(
            "solve_helmholtz: tridiagonal solve residual too large");

    Eigen::VectorXd v = Eigen::VectorXd::Zero(M);
    v.head(n) = x;
    return RadialFunction(rhs.grid(), std::move(v));
}

}  // namespace choquard
