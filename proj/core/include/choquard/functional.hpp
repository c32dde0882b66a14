// The Choquard energy J(u) = 1/2 int |grad u|^2 + u^2 - 1/2 int (I_alpha*F(u)) F(u)
// for the two-power nonlinearity F(u) = c_p |u|^p + c_q |u|^q, together with
// its directional derivative, H^1 gradient, and the ray profile J(t u).
#pragma once

#include <optional>

#include "choquard/grid.hpp"
#include "choquard/riesz.hpp"

namespace choquard {

// Exponent pair and coefficients of F. The doubly-critical construction pins
// p = (N+alpha)/N and q = (N+alpha)/(N-2), the endpoints of the admissible
// window; general constructions may place one or two powers inside it.
class NonlinearityParams {
  public:
    static NonlinearityParams doubly_critical(int dimension, double alpha);
    static NonlinearityParams single_power(int dimension, double alpha,
                                           double p);
    static NonlinearityParams two_power(int dimension, double alpha, double p,
                                        double q, double coeff_p,
                                        double coeff_q);

    int dimension() const { return dimension_; }
    double alpha() const { return alpha_; }
    double p() const { return p_; }
    double q() const { return q_; }
    double coeff_p() const { return coeff_p_; }
    double coeff_q() const { return coeff_q_; }

    double lower_critical() const;  // (N+alpha)/N
    double upper_critical() const;  // (N+alpha)/(N-2)
    bool is_doubly_critical() const;

    bool operator==(const NonlinearityParams&) const = default;

  private:
    NonlinearityParams() = default;
    int dimension_ = 0;
    double alpha_ = 0.0;
    double p_ = 0.0, q_ = 0.0;
    double coeff_p_ = 0.0, coeff_q_ = 0.0;
};

struct FValue {
    double F = 0.0;
    double Fprime = 0.0;
};

// F(s) = c_p |s|^p + c_q |s|^q and its derivative; F is even, F' odd, and
// both vanish at s = 0 since p, q > 1.
FValue F_eval(const NonlinearityParams& params, double s);

struct EnergyBreakdown {
    double dirichlet = 0.0;  // int |grad u|^2
    double mass = 0.0;       // int u^2
    double D_pp = 0.0;       // int (I_alpha * |u|^p) |u|^p
    double D_qq = 0.0;       // int (I_alpha * |u|^q) |u|^q
    double D_pq = 0.0;       // int (I_alpha * |u|^p) |u|^q
    double total = 0.0;

    // total reassembled from the five scalars; with the default coefficients
    // this reads (dirichlet+mass)/2 - D_pp/(2p^2) - D_qq/(2q^2) - D_pq/(pq).
    static double assemble(const NonlinearityParams& params, double dirichlet,
                           double mass, double D_pp, double D_qq, double D_pq);
};

EnergyBreakdown energy(const RieszKernel& kernel,
                       const NonlinearityParams& params,
                       const RadialFunction& u);

// J'(u)[phi] = <u, phi>_{H^1} - int (I_alpha * F(u)) F'(u) phi dx.
double derivative_action(const RieszKernel& kernel,
                         const NonlinearityParams& params,
                         const RadialFunction& u, const RadialFunction& phi);

// Riesz representative g of J'(u) in the discrete H^1 product:
// g = u - solve_helmholtz((I_alpha * F(u)) F'(u)), so that
// <g, phi>_{H^1} = derivative_action(u, phi) for conforming phi.
RadialFunction h1_gradient(const RieszKernel& kernel,
                           const NonlinearityParams& params,
                           const RadialFunction& u);

// Energy and gradient from one pass of convolutions (the solver hot path).
struct EnergyGradient {
    EnergyBreakdown energy;
    RadialFunction gradient;
    double gradient_norm = 0.0;  // H^1 norm of the representative
};
EnergyGradient energy_and_gradient(const RieszKernel& kernel,
                                   const NonlinearityParams& params,
                                   const RadialFunction& u);

// J(t u) = A t^2 - B t^{2p} - C t^{2q} - D t^{p+q}, A = ||u||_{H^1}^2 / 2.
struct RayProfile {
    double A = 0.0, B = 0.0, C = 0.0, D = 0.0;
    double p = 0.0, q = 0.0;

    double value(double t) const;
    double slope(double t) const;
    // g(t) = 2pB t^{2p-2} + 2qC t^{2q-2} + (p+q)D t^{p+q-2}, the strictly
    // increasing function whose crossing of 2A locates the ray maximum.
    double g(double t) const;
};

RayProfile ray_profile(const RieszKernel& kernel,
                       const NonlinearityParams& params,
                       const RadialFunction& u);

// Unique maximizer t0 > 0 of the ray profile: bracketing by doubling, 60
// bisection steps, then Newton polish on g(t) = 2A. Throws if B = C = D = 0.
double ray_max(const RayProfile& profile);

}  // namespace choquard
