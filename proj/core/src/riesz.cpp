#include "choquard/riesz.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "choquard/quadrature.hpp"

namespace choquard {

namespace {

inline double ipow(double base, int e) {
    double result = 1.0;
    while (e > 0) {
        if (e & 1) result *= base;
        base *= base;
        e >>= 1;
    }
    return result;
}

// t -> t^{-(N-alpha)/2} with a multiply/sqrt fast path when N - alpha is an
// integer (the common case for integer N, integer alpha).
struct KernelPow {
    double exponent = 0.0;
    int half_steps = -1;

    KernelPow(int dimension, double alpha) {
        const double e = dimension - alpha;
        exponent = -0.5 * e;
        const double rounded = std::round(e);
        if (std::abs(e - rounded) < 1e-12 && rounded >= 1.0 && rounded <= 64.0)
            half_steps = static_cast<int>(rounded);
    }

    double operator()(double t) const {
        if (half_steps < 0) return std::pow(t, exponent);
        if ((half_steps & 1) == 0) return ipow(1.0 / t, half_steps / 2);
        return ipow(1.0 / std::sqrt(t), half_steps);
    }
};

// Angular factor integrals k(r, s) = omega_{N-2} *
//   int_0^pi (r^2 + s^2 - 2 r s cos t)^{-(N-alpha)/2} sin^{N-2} t dt.
class AngularKernel {
  public:
    AngularKernel(int dimension, double alpha, int order)
        : dim_(dimension), pw_(dimension, alpha) {
        sphere_factor_ = 2.0 * std::pow(M_PI, 0.5 * (dimension - 1)) /
                         std::tgamma(0.5 * (dimension - 1));
        const GaussLegendre& gl = gauss_legendre(order);
        const auto rule = gl.mapped(0.0, M_PI);
        const int n = static_cast<int>(rule.nodes.size());
        cos_.resize(n);
        wsin_.resize(n);
        for (int q = 0; q < n; ++q) {
            cos_[q] = std::cos(rule.nodes[q]);
            wsin_[q] =
                rule.weights[q] * ipow(std::sin(rule.nodes[q]), dimension - 2);
        }
        panel16_ = &gauss_legendre(16);
        panel32_ = &gauss_legendre(32);
    }

    // Regular pairs: plain Gauss-Legendre; the integrand peak has width
    // |r-s|/sqrt(rs), well resolved whenever the pair is not near-diagonal.
    double regular(double r, double s) const {
        const double a = r * r + s * s, b = 2.0 * r * s;
        double sum = 0.0;
        for (std::size_t q = 0; q < cos_.size(); ++q)
            sum += wsin_[q] * pw_(a - b * cos_[q]);
        return sphere_factor_ * sum;
    }

    // Near-diagonal pairs: an innermost panel at the peak scale plus
    // geometrically growing panels absorb the (d^2 + r s t^2)^{-(N-alpha)/2}
    // concentration; the d^2 + 4 r s sin^2(t/2) form avoids cancellation.
    double near(double r, double s) const {
        const double d = std::abs(r - s);
        const double d2 = d * d, b4 = 4.0 * r * s;
        auto integrand = [&](double theta) {
            const double sh = std::sin(0.5 * theta);
            return pw_(d2 + b4 * sh * sh) * ipow(std::sin(theta), dim_ - 2);
        };
        const double width = std::min(d / std::sqrt(r * s), 0.5);
        double sum = panel_sum(*panel16_, 0.0, width, integrand);
        double lo = width;
        while (lo < M_PI_2) {
            const double hi = std::min(4.0 * lo, M_PI_2);
            sum += panel_sum(*panel16_, lo, hi, integrand);
            lo = hi;
        }
        sum += panel_sum(*panel32_, M_PI_2, M_PI, integrand);
        return sphere_factor_ * sum;
    }

    double pick(double r, double s) const {
        return std::abs(r - s) <= 0.05 * (r + s) ? near(r, s) : regular(r, s);
    }

  private:
    template <class F>
    static double panel_sum(const GaussLegendre& gl, double a, double b, F&& f) {
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        double sum = 0.0;
        for (std::size_t q = 0; q < gl.nodes.size(); ++q)
            sum += gl.weights[q] * f(mid + half * gl.nodes[q]);
        return sum * half;
    }

    int dim_;
    KernelPow pw_;
    double sphere_factor_ = 0.0;  // area of S^{N-2}
    std::vector<double> cos_, wsin_;
    const GaussLegendre* panel16_ = nullptr;
    const GaussLegendre* panel32_ = nullptr;
};

// Diagonal entries carry the kernel averaged over the node's cell against
// the s^{N-1} measure; the graded substitution s = r -/+ L v^m with
// m = max(2, 2/alpha) absorbs the |r-s|^{alpha-1} concentration, so the
// entry stays accurate (and finite) down to alpha <= 1 where the pointwise
// kernel diverges on the diagonal.
double diagonal_cell_average(const AngularKernel& ang, int dimension,
                             double alpha, double r, double a, double b) {
    const double m = std::max(2.0, 2.0 / alpha);
    const GaussLegendre& gl = gauss_legendre(24);
    double sum = 0.0;
    for (int side = 0; side < 2; ++side) {
        const double length = side == 0 ? r - a : b - r;
        if (!(length > 0.0)) continue;
        for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
            const double v = 0.5 + 0.5 * gl.nodes[q];
            const double offset = length * std::pow(v, m);
            const double s = side == 0 ? r - offset : r + offset;
            const double jac = length * m * std::pow(v, m - 1.0);
            sum += 0.5 * gl.weights[q] * ang.near(r, s) *
                   std::pow(s, dimension - 1) * jac;
        }
    }
    const double measure =
        (std::pow(b, dimension) - std::pow(a, dimension)) / dimension;
    return sum / measure;
}

void parallel_rows(int rows, int threads, const std::function<void(int)>& body) {
    int t = threads > 0 ? threads
                        : static_cast<int>(std::thread::hardware_concurrency());
    t = std::max(1, std::min(t, rows));
    if (t == 1) {
        for (int i = 0; i < rows; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(t);
    for (int id = 0; id < t; ++id)
        pool.emplace_back([&, id] {
            for (int i = id; i < rows; i += t) body(i);
        });
    for (auto& th : pool) th.join();
}

template <class T>
void write_pod(std::ostream& os, const T& value) {
    os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T read_pod(std::istream& is) {
    T value{};
    is.read(reinterpret_cast<char*>(&value), sizeof(T));
    return value;
}

}  // namespace

double riesz_normalization(int dimension, double alpha) {
    if (!(alpha > 0.0) || !(alpha < dimension))
        throw std::invalid_argument("riesz: alpha must lie in (0, N)");
    return std::tgamma(0.5 * (dimension - alpha)) /
           (std::tgamma(0.5 * alpha) * std::pow(M_PI, 0.5 * dimension) *
            std::pow(2.0, alpha));
}

RieszKernel::RieszKernel(GridPtr grid, double alpha, int quadrature_order,
                         Eigen::MatrixXd matrix)
    : grid_(std::move(grid)),
      alpha_(alpha),
      normalization_(riesz_normalization(grid_->dimension(), alpha)),
      quadrature_order_(quadrature_order),
      matrix_(std::move(matrix)) {}

RieszKernel build_kernel(GridPtr grid, double alpha,
                         const RieszOptions& options) {
    const int N = grid->dimension();
    if (!(alpha > 0.0) || !(alpha < N))
        throw std::invalid_argument("build_kernel: alpha must lie in (0, N)");
    if (options.quadrature_order < 8)
        throw std::invalid_argument("build_kernel: quadrature order too small");

    const int M = grid->size();
    const Eigen::VectorXd& r = grid->nodes();
    const Eigen::VectorXd& w = grid->volume_weights();
    const double c = riesz_normalization(N, alpha);
    const double scale = c / grid->surface_area();

    AngularKernel ang(N, alpha, options.quadrature_order);
    gauss_legendre(16);  // warm the rule cache before threading
    gauss_legendre(24);
    gauss_legendre(32);

    Eigen::MatrixXd K(M, M);
    parallel_rows(M, options.threads, [&](int i) {
        {
            const double a = i > 0 ? 0.5 * (r[i - 1] + r[i]) : 0.5 * r[0];
            const double b = i + 1 < M ? 0.5 * (r[i] + r[i + 1]) : r[i];
            const double kbar = diagonal_cell_average(ang, N, alpha, r[i], a, b);
            K(i, i) = scale * w[i] * kbar;
        }
        for (int j = i + 1; j < M; ++j) {
            const double kij = ang.pick(r[i], r[j]);
            K(i, j) = scale * w[j] * kij;
            K(j, i) = scale * w[i] * kij;
        }
    });

    return RieszKernel(std::move(grid), alpha, options.quadrature_order,
                       std::move(K));
}

void RieszKernel::save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open kernel cache for writing: " + path);
    const GridSpec& spec = grid_->spec();
    write_pod<std::int64_t>(os, spec.dimension);
    write_pod<double>(os, alpha_);
    write_pod<std::int64_t>(os, spec.node_count);
    write_pod<double>(os, spec.radius);
    write_pod<double>(os, spec.grading);
    write_pod<std::int64_t>(os, quadrature_order_);
    const int M = grid_->size();
    std::vector<double> row(M);
    for (int i = 0; i < M; ++i) {
        for (int j = 0; j < M; ++j) row[j] = matrix_(i, j);
        os.write(reinterpret_cast<const char*>(row.data()),
                 static_cast<std::streamsize>(sizeof(double) * row.size()));
    }
    if (!os) throw std::runtime_error("kernel cache write failed: " + path);
}

RieszKernel load_kernel_impl(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open kernel cache: " + path);
    GridSpec spec;
    spec.dimension = static_cast<int>(read_pod<std::int64_t>(is));
    const double alpha = read_pod<double>(is);
    spec.node_count = static_cast<int>(read_pod<std::int64_t>(is));
    spec.radius = read_pod<double>(is);
    spec.grading = read_pod<double>(is);
    const int order = static_cast<int>(read_pod<std::int64_t>(is));
    if (!is) throw std::runtime_error("kernel cache header truncated: " + path);
    spec.validate();
    if (!(alpha > 0.0) || !(alpha < spec.dimension) || order < 8)
        throw std::runtime_error("kernel cache header invalid: " + path);
    const int M = spec.node_count;
    Eigen::MatrixXd K(M, M);
    std::vector<double> row(M);
    for (int i = 0; i < M; ++i) {
        is.read(reinterpret_cast<char*>(row.data()),
                static_cast<std::streamsize>(sizeof(double) * row.size()));
        if (!is) throw std::runtime_error("kernel cache truncated: " + path);
        for (int j = 0; j < M; ++j) K(i, j) = row[j];
    }
    return RieszKernel(build_grid(spec), alpha, order, std::move(K));
}

RieszKernel RieszKernel::load(const std::string& path) {
    return load_kernel_impl(path);
}

std::string kernel_cache_key(const GridSpec& spec, double alpha,
                             int quadrature_order) {
    // FNV-1a over the exact header bytes
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](const void* p, std::size_t n) {
        const auto* bytes = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= bytes[i];
            h *= 1099511628211ull;
        }
    };
    const std::int64_t n64 = spec.dimension, m64 = spec.node_count,
                       q64 = quadrature_order;
    mix(&n64, sizeof n64);
    mix(&alpha, sizeof alpha);
    mix(&m64, sizeof m64);
    mix(&spec.radius, sizeof spec.radius);
    mix(&spec.grading, sizeof spec.grading);
    mix(&q64, sizeof q64);
    char buf[96];
    std::snprintf(buf, sizeof buf, "rzk_N%d_M%d_%016llx", spec.dimension,
                  spec.node_count, static_cast<unsigned long long>(h));
    return buf;
}

RieszKernel build_or_load_kernel(GridPtr grid, double alpha,
                                 const RieszOptions& options,
                                 const std::string& cache_dir) {
    if (cache_dir.empty()) return build_kernel(std::move(grid), alpha, options);
    const std::filesystem::path path =
        std::filesystem::path(cache_dir) /
        (kernel_cache_key(grid->spec(), alpha, options.quadrature_order) + ".bin");
    if (std::filesystem::exists(path)) {
        RieszKernel kernel = load_kernel_impl(path.string());
        if (kernel.grid()->spec() == grid->spec() &&
            kernel.alpha() == alpha &&
            kernel.quadrature_order() == options.quadrature_order)
            return kernel;
        // hash collision or stale file: fall through and rebuild
    }
    RieszKernel kernel = build_kernel(std::move(grid), alpha, options);
    try {
        std::filesystem::create_directories(path.parent_path());
        kernel.save(path.string());
    } catch (const std::exception&) {
        // cache writes are best effort
    }
    return kernel;
}

RadialFunction convolve(const RieszKernel& kernel, const RadialFunction& f) {
    require_on_grid(*kernel.grid(), f);
    Eigen::VectorXd out = kernel.matrix() * f.values();
    return RadialFunction(kernel.grid(), std::move(out));
}

double hls_pairing(const RieszKernel& kernel, const RadialFunction& f,
                   const RadialFunction& g) {
    require_on_grid(*kernel.grid(), f);
    require_on_grid(*kernel.grid(), g);
    const Eigen::VectorXd conv = kernel.matrix() * f.values();
    return (conv.array() * g.values().array() *
            kernel.grid()->volume_weights().array())
        .sum();
}

}  // namespace choquard
