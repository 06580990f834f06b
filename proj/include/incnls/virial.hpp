#pragma once

#include "incnls/groundstate.hpp"

namespace incnls {

// Truncated-virial cutoff: phi_R(x) = R^2 phi(r/R) with phi(s) = s^2 for
// s <= 1, a quintic blend on [1,2], and the constant 5/2 beyond. The blend
// keeps phi'' <= 2 and phi >= 0 everywhere (the two legality conditions).
struct VirialConfig {
    double R = 10.0;
};

// The profile phi and its derivatives, k = 0..4 (closed form, piecewise
// polynomial; the fourth derivative feeds the biharmonic of phi_R).
double virial_profile(double s, int k = 0);

// V_R = int phi_R |u|^2 dx by cell quadrature.
double virial_V(const RadialField& u, const VirialConfig& cfg);

// dV_R/dt = 2 Im int conj(u) u' phi_R' dx, evaluated from u alone on the
// cell faces (no time differencing). Exactly zero for real u.
double virial_first_derivative(const RadialField& u, const VirialConfig& cfg);

enum class KineticSide { subcritical, supercritical, boundary };

// d^2V_R/dt^2 = +-4 alpha d(u) + A_R(u) on the E(u) = E(W) energy surface,
// the sign + on the subcritical side ||grad u||^2 < ||grad W||^2. A_R
// collects the cutoff defects: the annulus gradient term 4 int (phi_R''-2)
// |u'|^2, the mass term -int (Lap^2 phi_R)|u|^2, and the potential term
// -(2a/(a+2)) int [phi_R'' + (d-1+2b/a) phi_R'/r - 4(a+2)/a] r^{-b}|u|^{a+2};
// every integrand vanishes identically where phi = r^2. The r > r_max tails
// (where phi_R is constant) are added from the power-tail fit of u.
// A_R(W) = 0 analytically for every R: W is stationary and d(W) = 0.
struct VirialIdentity {
    double lhs_proxy = 0.0;  // +-4 alpha d_u + A_R per the kinetic side
    double A_R = 0.0;
    double d_u = 0.0;
    KineticSide side = KineticSide::boundary;
};

// Requires 2R <= r_max (the plateau must sit inside the grid). The kinetic
// side is marked boundary when |gradsq(u) - gradsq(W)| is below a small
// relative tolerance; lhs_proxy then carries A_R alone.
VirialIdentity virial_second_identity(const RadialField& u,
                                      const VirialConfig& cfg,
                                      const GroundStateBundle& bundle,
                                      const Params& p);

}  // namespace incnls
