#include "choquard/functional.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace choquard {

namespace {

// |u|^p elementwise with a hard 0 at u = 0 (p is non-integer in general).
Eigen::VectorXd abs_pow(const Eigen::VectorXd& u, double p) {
    return u.unaryExpr([p](double x) {
        const double a = std::abs(x);
        return a == 0.0 ? 0.0 : std::exp(p * std::log(a));
    });
}

// |u|^{p-2} u, the derivative of |u|^p / p; vanishes at 0 since p > 1.
Eigen::VectorXd abs_pow_signed(const Eigen::VectorXd& u, double p) {
    return u.unaryExpr([p](double x) {
        const double a = std::abs(x);
        if (a == 0.0) return 0.0;
        return std::copysign(std::exp((p - 1.0) * std::log(a)), x);
    });
}

}  // namespace

NonlinearityParams NonlinearityParams::doubly_critical(int dimension,
                                                       double alpha) {
    NonlinearityParams out;
    if (dimension < 3)
        throw std::invalid_argument("NonlinearityParams: dimension must be >= 3");
    if (!(alpha > 0.0) || !(alpha < dimension))
        throw std::invalid_argument("NonlinearityParams: alpha must lie in (0, N)");
    out.dimension_ = dimension;
    out.alpha_ = alpha;
    out.p_ = (dimension + alpha) / dimension;
    out.q_ = (dimension + alpha) / (dimension - 2);
    out.coeff_p_ = 1.0 / out.p_;
    out.coeff_q_ = 1.0 / out.q_;
    return out;
}

NonlinearityParams NonlinearityParams::single_power(int dimension, double alpha,
                                                    double p) {
    return two_power(dimension, alpha, p, p, 1.0 / p, 0.0);
}

NonlinearityParams NonlinearityParams::two_power(int dimension, double alpha,
                                                 double p, double q,
                                                 double coeff_p,
                                                 double coeff_q) {
    NonlinearityParams out;
    if (dimension < 3)
        throw std::invalid_argument("NonlinearityParams: dimension must be >= 3");
    if (!(alpha > 0.0) || !(alpha < dimension))
        throw std::invalid_argument("NonlinearityParams: alpha must lie in (0, N)");
    const double lower = (dimension + alpha) / dimension;
    const double upper = (dimension + alpha) / (dimension - 2);
    if (!(p >= lower - 1e-12) || !(q <= upper + 1e-12) || !(p <= q))
        throw std::invalid_argument(
            "NonlinearityParams: exponents must satisfy (N+alpha)/N <= p <= q "
            "<= (N+alpha)/(N-2)");
    if (coeff_p < 0.0 || coeff_q < 0.0 || (coeff_p == 0.0 && coeff_q == 0.0))
        throw std::invalid_argument(
            "NonlinearityParams: coefficients must be nonnegative, not both 0");
    out.dimension_ = dimension;
    out.alpha_ = alpha;
    out.p_ = p;
    out.q_ = q;
    out.coeff_p_ = coeff_p;
    out.coeff_q_ = coeff_q;
    return out;
}

double NonlinearityParams::lower_critical() const {
    return (dimension_ + alpha_) / dimension_;
}

double NonlinearityParams::upper_critical() const {
    return (dimension_ + alpha_) / (dimension_ - 2);
}

bool NonlinearityParams::is_doubly_critical() const {
    return p_ == lower_critical() && q_ == upper_critical() &&
           coeff_p_ == 1.0 / p_ && coeff_q_ == 1.0 / q_;
}

FValue F_eval(const NonlinearityParams& params, double s) {
    FValue out;
    const double a = std::abs(s);
    if (a == 0.0) return out;
    const double la = std::log(a);
    const double ap = std::exp(params.p() * la);
    const double aq = std::exp(params.q() * la);
    out.F = params.coeff_p() * ap + params.coeff_q() * aq;
    out.Fprime = std::copysign(
        params.coeff_p() * params.p() * ap / a +
            params.coeff_q() * params.q() * aq / a,
        s);
    return out;
}

double EnergyBreakdown::assemble(const NonlinearityParams& params,
                                 double dirichlet, double mass, double D_pp,
                                 double D_qq, double D_pq) {
    const double cp = params.coeff_p(), cq = params.coeff_q();
    return 0.5 * (dirichlet + mass) - 0.5 * cp * cp * D_pp -
           0.5 * cq * cq * D_qq - cp * cq * D_pq;
}

EnergyBreakdown energy(const RieszKernel& kernel,
                       const NonlinearityParams& params,
                       const RadialFunction& u) {
    require_on_grid(*kernel.grid(), u);
    const RadialGrid& grid = *kernel.grid();
    EnergyBreakdown out;
    const H1Products h1 = h1_products(u, u);
    out.dirichlet = h1.dirichlet;
    out.mass = h1.mass;

    const Eigen::VectorXd& w = grid.volume_weights();
    const Eigen::VectorXd up = abs_pow(u.values(), params.p());
    const Eigen::VectorXd conv_p = kernel.matrix() * up;
    out.D_pp = (conv_p.array() * up.array() * w.array()).sum();
    if (params.coeff_q() != 0.0) {
        const Eigen::VectorXd uq = abs_pow(u.values(), params.q());
        const Eigen::VectorXd conv_q = kernel.matrix() * uq;
        out.D_qq = (conv_q.array() * uq.array() * w.array()).sum();
        out.D_pq = (conv_p.array() * uq.array() * w.array()).sum();
    }
    out.total = EnergyBreakdown::assemble(params, out.dirichlet, out.mass,
                                          out.D_pp, out.D_qq, out.D_pq);
    return out;
}

double derivative_action(const RieszKernel& kernel,
                         const NonlinearityParams& params,
                         const RadialFunction& u, const RadialFunction& phi) {
    require_on_grid(*kernel.grid(), u);
    require_on_grid(*kernel.grid(), phi);
    const H1Products h1 = h1_products(u, phi);

    const Eigen::VectorXd& w = kernel.grid()->volume_weights();
    const double cp = params.coeff_p(), cq = params.coeff_q();
    Eigen::VectorXd F = cp * abs_pow(u.values(), params.p());
    Eigen::VectorXd Fprime =
        cp * params.p() * abs_pow_signed(u.values(), params.p());
    if (cq != 0.0) {
        F += cq * abs_pow(u.values(), params.q());
        Fprime += cq * params.q() * abs_pow_signed(u.values(), params.q());
    }
    const Eigen::VectorXd conv = kernel.matrix() * F;
    const double nonlocal =
        (conv.array() * Fprime.array() * phi.values().array() * w.array()).sum();
    return h1.dirichlet + h1.mass - nonlocal;
}

namespace {

// (I_alpha * F(u)) F'(u), the nonlinear right-hand side shared by the
// gradient and the combined energy/gradient path.
Eigen::VectorXd nonlinear_rhs(const RieszKernel& kernel,
                              const NonlinearityParams& params,
                              const Eigen::VectorXd& u, Eigen::VectorXd* up_out,
                              Eigen::VectorXd* conv_p_out,
                              Eigen::VectorXd* uq_out,
                              Eigen::VectorXd* conv_q_out) {
    const double cp = params.coeff_p(), cq = params.coeff_q();
    Eigen::VectorXd up = abs_pow(u, params.p());
    Eigen::VectorXd conv_p = kernel.matrix() * up;
    Eigen::VectorXd F = cp * up;
    Eigen::VectorXd conv = cp * conv_p;
    Eigen::VectorXd Fprime = cp * params.p() * abs_pow_signed(u, params.p());
    Eigen::VectorXd uq, conv_q;
    if (cq != 0.0) {
        uq = abs_pow(u, params.q());
        conv_q = kernel.matrix() * uq;
        conv += cq * conv_q;
        Fprime += cq * params.q() * abs_pow_signed(u, params.q());
    }
    if (up_out) *up_out = std::move(up);
    if (conv_p_out) *conv_p_out = std::move(conv_p);
    if (uq_out) *uq_out = std::move(uq);
    if (conv_q_out) *conv_q_out = std::move(conv_q);
    return conv.array() * Fprime.array();
}

}  // namespace

RadialFunction h1_gradient(const RieszKernel& kernel,
                           const NonlinearityParams& params,
                           const RadialFunction& u) {
    require_on_grid(*kernel.grid(), u);
    Eigen::VectorXd rhs = nonlinear_rhs(kernel, params, u.values(), nullptr,
                                        nullptr, nullptr, nullptr);
    const RadialFunction v =
        solve_helmholtz(RadialFunction(u.grid(), std::move(rhs)));
    return RadialFunction(u.grid(), u.values() - v.values());
}

EnergyGradient energy_and_gradient(const RieszKernel& kernel,
                                   const NonlinearityParams& params,
                                   const RadialFunction& u) {
    require_on_grid(*kernel.grid(), u);
    const RadialGrid& grid = *kernel.grid();
    const Eigen::VectorXd& w = grid.volume_weights();

    Eigen::VectorXd up, conv_p, uq, conv_q;
    Eigen::VectorXd rhs =
        nonlinear_rhs(kernel, params, u.values(), &up, &conv_p, &uq, &conv_q);

    EnergyBreakdown e;
    const H1Products h1 = h1_products(u, u);
    e.dirichlet = h1.dirichlet;
    e.mass = h1.mass;
    e.D_pp = (conv_p.array() * up.array() * w.array()).sum();
    if (params.coeff_q() != 0.0) {
        e.D_qq = (conv_q.array() * uq.array() * w.array()).sum();
        e.D_pq = (conv_p.array() * uq.array() * w.array()).sum();
    }
    e.total = EnergyBreakdown::assemble(params, e.dirichlet, e.mass, e.D_pp,
                                        e.D_qq, e.D_pq);

    const RadialFunction v =
        solve_helmholtz(RadialFunction(u.grid(), std::move(rhs)));
    RadialFunction g(u.grid(), u.values() - v.values());
    const double gn = h1_norm(g);
    return EnergyGradient{e, std::move(g), gn};
}

double RayProfile::value(double t) const {
    return A * t * t - B * std::pow(t, 2.0 * p) - C * std::pow(t, 2.0 * q) -
           D * std::pow(t, p + q);
}

double RayProfile::slope(double t) const {
    return 2.0 * A * t - 2.0 * p * B * std::pow(t, 2.0 * p - 1.0) -
           2.0 * q * C * std::pow(t, 2.0 * q - 1.0) -
           (p + q) * D * std::pow(t, p + q - 1.0);
}

double RayProfile::g(double t) const {
    return 2.0 * p * B * std::pow(t, 2.0 * p - 2.0) +
           2.0 * q * C * std::pow(t, 2.0 * q - 2.0) +
           (p + q) * D * std::pow(t, p + q - 2.0);
}

RayProfile ray_profile(const RieszKernel& kernel,
                       const NonlinearityParams& params,
                       const RadialFunction& u) {
    const EnergyBreakdown e = energy(kernel, params, u);
    const double cp = params.coeff_p(), cq = params.coeff_q();
    RayProfile out;
    out.A = 0.5 * (e.dirichlet + e.mass);
    out.B = 0.5 * cp * cp * e.D_pp;
    out.C = 0.5 * cq * cq * e.D_qq;
    out.D = cp * cq * e.D_pq;
    out.p = params.p();
    out.q = params.q();
    return out;
}

double ray_max(const RayProfile& profile) {
    if (!(profile.A > 0.0))
        throw std::invalid_argument("ray_max: A must be positive (nonzero u)");
    if (profile.B <= 0.0 && profile.C <= 0.0 && profile.D <= 0.0)
        throw std::invalid_argument(
            "ray_max: no nonlinear term, the ray has no maximizer");
    const double target = 2.0 * profile.A;
    // g is strictly increasing from 0 to infinity, so doubling brackets the
    // unique crossing of 2A.
    double lo = 1.0, hi = 1.0;
    if (profile.g(1.0) < target) {
        while (profile.g(hi) < target) {
            hi *= 2.0;
            if (hi > 1e150)
                throw std::runtime_error("ray_max: bracketing failed");
        }
        lo = hi / 2.0;
    } else {
        while (profile.g(lo) >= target) {
            lo *= 0.5;
            if (lo < 1e-150)
                throw std::runtime_error("ray_max: bracketing failed");
        }
        hi = 2.0 * lo;
    }
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (profile.g(mid) < target ? lo : hi) = mid;
    }
    double t = 0.5 * (lo + hi);
    const double p = profile.p, q = profile.q;
    for (int i = 0; i < 5; ++i) {
        const double f = profile.g(t) - target;
        const double df =
            2.0 * p * (2.0 * p - 2.0) * profile.B * std::pow(t, 2.0 * p - 3.0) +
            2.0 * q * (2.0 * q - 2.0) * profile.C * std::pow(t, 2.0 * q - 3.0) +
            (p + q) * (p + q - 2.0) * profile.D * std::pow(t, p + q - 3.0);
        if (!(df > 0.0)) break;
        const double next = t - f / df;
        if (next > lo && next < hi) t = next;
    }
    return t;
}

}  // namespace choquard
