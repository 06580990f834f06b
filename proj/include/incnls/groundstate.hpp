#pragma once

#include "incnls/calculus.hpp"
#include "incnls/field.hpp"

namespace incnls {

// Ground state W(r) = (1 + r^{2-b}/((d-2)(d-b)))^{-(d-2)/(2-b)} and the
// stationary objects derived from it.
struct GroundStateBundle {
    Params params;
    GridPtr grid;
    RadialField W;    // real positive
    RadialField W1;   // (d-2)/2 W + r W', the scaling-generator direction
    RadialField Vpot; // r^{-b} W^alpha
    double grad_norm_sq = 0.0;  // ||grad W||^2, tail-corrected
    double pot_integral = 0.0;  // int r^{-b} W^{alpha+2} dx, tail-corrected
    double energy_W = 0.0;
};

double eval_W_scalar(const Params& p, double r);
double eval_dW_scalar(const Params& p, double r);

RadialField eval_W(const Params& p, const GridPtr& grid);
GroundStateBundle make_bundle(const Params& p, const GridPtr& grid);

// E(u) = 1/2 int |grad u|^2 - 1/(alpha+2) int r^{-b} |u|^{alpha+2}.
double energy(const RadialField& u, const Params& p);

// d(u) = | ||grad u||^2 - ||grad W||^2 |.
double distance_d(const RadialField& u, const GroundStateBundle& bundle);

// int r^{-b}|f|^{alpha+2} ||grad W||^{alpha+2} /
//   (int r^{-b} W^{alpha+2} ||grad f||^{alpha+2}); <= 1 + grid tolerance.
double sharp_inequality_check(const RadialField& f, const GroundStateBundle& bundle);

// e^{i theta} mu^{-(d-2)/2} u(r/mu), resampled by monotone cubic interpolation
// on log r with power-law tail extrapolation.
RadialField rescale(const RadialField& u, double theta, double mu);

}  // namespace incnls
