#pragma once

#include <vector>

#include "incnls/calculus.hpp"
#include "incnls/field.hpp"

namespace incnls {

struct LorentzSpec {
    double r_exp = 2.0;                 // in (1, inf)
    double rho_exp = 2.0;               // >= 1, or infinity() for weak norms
    static double infinity() { return std::numeric_limits<double>::infinity(); }
};

// Decreasing rearrangement f*(s): piecewise constant, vals[k] on
// (s[k-1], s[k]] with s[-1] = 0. vals decreasing, s increasing. s_at[k] is
// the equimeasurable position of the sample point itself (cumulative measure
// up to the sample radius); the sup-type norms evaluate there, which is exact
// for decreasing radial functions.
struct StepFunction {
    Eigen::VectorXd s;
    Eigen::VectorXd s_at;
    Eigen::VectorXd vals;
};

StepFunction decreasing_rearrangement(const RadialField& f);

double lorentz_norm(const StepFunction& fstar, const LorentzSpec& spec);
double lorentz_norm(const RadialField& f, const LorentzSpec& spec);

// sup_s s^{b/d} of the rearrangement of r^{-b} computed from the analytic
// inversion of its distribution function; equals vol(B(0,1))^{b/d}.
double weak_norm_power_weight(const Params& p);

enum class SpaceTimeKind { S, Z, N };

// Composes the per-snapshot spatial Lorentz norm ((gamma,p,2) for S,
// (gamma,rho,2) of the gradient for Z, (2, 2d/(d+2), 2) for N) with a
// Riemann-sum time norm over uniformly spaced snapshots.
double spacetime_norm(const std::vector<RadialField>& snaps, double dt,
                      SpaceTimeKind kind, const Params& p);

}  // namespace incnls
