#pragma once

#include <vector>

#include "incnls/spectral.hpp"

namespace incnls {

// Exponentially-converging perturbation family W + sum_j q^j Phi_j with
// q = e^{-e0 t}: Phi_1 = a Y+ and each higher order cancels the remainder
// at the previous one.
struct ApproxFamily {
    double a = 0.0;
    int k = 0;                   // number of stored orders
    std::vector<PairField> Phi;  // Phi[j-1] is the order-j profile
    double e0 = 0.0;
    double q_radius = 0.0;       // validity radius in q (|v| <= W/2 holds)
    std::vector<double> fit_residuals;  // relative, one per extraction
};

// Inductive construction: the order-(k+1) remainder coefficient Psi_k is
// extracted by least-squares polynomial fitting of q -> R(v_k(q)) on small
// real q, then (L - (k+1) e0) Phi_{k+1} = -Psi_k is solved by sparse LU on
// the interleaved first-order block system. Throws std::runtime_error when
// the fit residual exceeds its threshold (series-extraction failure) or the
// shifted system is singular (spectral clash).
ApproxFamily build_family(double a, int k_max, const EigenBundle& eig,
                          const GroundStateBundle& bundle, const Params& p,
                          const GridPtr& grid);

// Restriction to the first k orders (validity radius recomputed).
ApproxFamily truncate_family(const ApproxFamily& fam, int k,
                             const GroundStateBundle& bundle);

// v(q) = sum_j q^j Phi_j.
PairField family_profile(const ApproxFamily& fam, double q);

struct ApproxResidual {
    PairField eps;
    double l2 = 0.0;
    double h1 = 0.0;            // homogeneous H^1
    double dual_lorentz = 0.0;  // L^{2d/(d+2),2}
};
// eps(t) = sum_j q^j (L Phi_j - j e0 Phi_j) + R(v(q)) evaluated directly
// (no series shortcut). Throws std::domain_error when e^{-e0 t} exceeds the
// validity radius.
ApproxResidual residual(const ApproxFamily& fam,
                        const GroundStateBundle& bundle, const Params& p,
                        double t);

// W + v(e^{-e0 t0}) as a complex field: initial datum whose forward
// evolution shadows the special threshold solution of sign a.
RadialField initial_data_Wpm(int sign, double t0, const ApproxFamily& fam,
                             const GroundStateBundle& bundle);

}  // namespace incnls
