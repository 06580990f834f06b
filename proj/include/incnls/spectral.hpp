#pragma once

#include <vector>

#include "incnls/operators.hpp"

namespace incnls {

// The e0 eigenpair of the linearized flow: L Y+ = e0 Y+ with Y+ = Y1 + i Y2
// (the conjugate Y- = Y1 - i Y2 carries -e0 and is stored implicitly).
struct EigenBundle {
    double e0 = 0.0;
    RadialField Y1, Y2;
    double residual_plus = 0.0;       // ||L Y+ - e0 Y+|| / ||Y+|| (discrete)
    bool sign_convention_ok = false;  // (W, Y1)_H1 > 0 after the sign fix
    double p_min_eig = 0.0;           // two lowest eigenvalues of the product
    double p_second_eig = 0.0;        // operator sqrt(L-) L+ sqrt(L-)
};

// Square-root construction: eigendecompose the (tridiagonal) L- at ell=0,
// clamp tiny negative truncation eigenvalues to zero, form S = sqrt(L-),
// take the most negative eigenpair -e0^2, f of P = S L+ S, and set
// Y1 = S f, Y2 = (1/e0) L+ Y1. The eigen relations then hold to rounding by
// construction. Throws std::runtime_error if L- is indefinite beyond the
// clamp tolerance or if P has no negative eigenvalue.
EigenBundle compute_eigen(const GroundStateBundle& bundle, const Params& p,
                          const GridPtr& grid);

struct DecayReport {
    std::vector<double> R;
    std::vector<double> log_mass;  // log of the annulus L2 norm on [R, 2R]
    double slope = 0.0;            // d log_mass / d log R; -inf when an
                                   // annulus has no mass
};
// Least-squares decay exponent of f over the annuli [R, 2R].
DecayReport annulus_decay(const RadialField& f, const std::vector<double>& R_values);
DecayReport eigen_decay_check(const EigenBundle& eig,
                              const std::vector<double>& R_values);

// Frobenius exponents of the ell=1 kernel ODE
// G'' + (d-1)/r G' - (d-1)/r^2 G + (alpha+1) r^{-b} W^alpha G = 0
// fitted from shooting runs off the two seeds at each singular end.
struct ExponentReport {
    double admissible_at_zero = 0.0;     // expected +1
    double inadmissible_at_zero = 0.0;   // expected -(d-1)
    double admissible_at_infinity = 0.0; // expected -(d-1)
};
ExponentReport kernel_ode_asymptotics(const Params& p);

// Dense eigenvalues of the full 2N x 2N linearized matrix; real_eigs holds
// those with |Im| <= real_tol. Meant for modest grids.
struct SpectrumScan {
    std::vector<Complex> eigs;
    std::vector<double> real_eigs;
    double real_tol = 0.0;
};
SpectrumScan spectrum_scan(const Params& p, const GridPtr& grid);

}  // namespace incnls
