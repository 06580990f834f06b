#pragma once

#include <Eigen/Dense>

#include "incnls/field.hpp"

namespace incnls {

// --- derivatives --------------------------------------------------------
// Radial derivative at the cell centers. Even reflection across the origin
// (regularity u'(0+)=0 for ghost placement), one-sided stencils at the outer
// end. deriv3: 3-point (2nd order, the contract scheme); deriv5: 5-point.
Eigen::VectorXcd deriv3(const RadialGrid& g, const Eigen::VectorXcd& f);
Eigen::VectorXcd deriv5(const RadialGrid& g, const Eigen::VectorXcd& f);
Eigen::VectorXd deriv3(const RadialGrid& g, const Eigen::VectorXd& f);
Eigen::VectorXd deriv5(const RadialGrid& g, const Eigen::VectorXd& f);

// --- quadrature ---------------------------------------------------------
// Midpoint rule on the exact cell measure: sum_j w_j F_j. Approximates
// int_0^{r_max} F r^{d-1} dr (no angular factor).
double integrate_cells(const RadialGrid& g, const Eigen::VectorXd& F);

// Cellwise-cubic quadrature of int F(r) r^{weight_exp} r^{d-1} dr: a cubic
// through four neighbouring samples is integrated exactly against the power
// measure. 4th-order accurate for smooth F; exact for cubic F.
double quad4(const RadialGrid& g, const Eigen::VectorXd& F, double weight_exp);

// --- tail model ---------------------------------------------------------
// Two-term power fit f ~ c1 r^{-(d-2)} + c2 r^{-(d-b)} over the outer grid;
// used to account for the truncated integrals of power-tail fields.
struct TailFit {
    Complex c1{0.0, 0.0}, c2{0.0, 0.0};
    bool ok = false;  // false: fit rejected, corrections are zero
};
TailFit fit_tail(const RadialField& f, double b);

// Closed-form integral of |d/dr model|^2 r^{d-1} over (r_max, inf).
double kinetic_tail(const TailFit& t, const RadialGrid& g, double b);
// Integral of r^{-b} |model|^{alpha+2} r^{d-1} over (r_max, inf).
double potential_tail(const TailFit& t, const RadialGrid& g, const Params& p);

// --- norms and inner products -------------------------------------------
// Contract H^1-dot inner product: omega * sum_j w_j Re(f' conj(g)') with the
// 3-point derivative. Pure grid quantity.
double inner_h1(const RadialField& f, const RadialField& g);

// Precision kinetic norm ||grad f||_{L^2}^2: 5-point derivative, cellwise
// cubic quadrature, plus the power-tail correction beyond r_max (the second
// tail exponent -(d-b) needs the problem's b).
double h1_norm_sq(const RadialField& f, double b);

// (omega * int r^{weight_exp} |f|^q r^{d-1} dr)^{1/q}.
double norm_l2_weighted(const RadialField& f, double weight_exp, double q = 2.0);

// omega * int r^{-b} |f|^{alpha+2} dr-measure, tail-corrected.
double potential_integral(const RadialField& f, const Params& p);

}  // namespace incnls
