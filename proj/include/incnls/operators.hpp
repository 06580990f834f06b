#pragma once

#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "incnls/groundstate.hpp"

namespace incnls {

enum class OpKind { Lplus, Lminus };
enum class OuterBc { dirichlet, power_tail };

// Finite-volume geometry: face areas S[j] = edge[j]^{d-1} (S[0]=0 encodes the
// origin regularity), center gaps delta[j] between cells j-1 and j
// (delta[n] = r_max - r[n-1] for the wall flux).
struct FvGeometry {
    Eigen::VectorXd S;      // n+1
    Eigen::VectorXd delta;  // n+1, delta[0] unused
};
FvGeometry fv_geometry(const RadialGrid& g);

// Radial Schrodinger operator -Lap + mu_ell/r^2 - c V on a sector, with
// V = r^{-b} W^alpha and c = alpha+1 (Lplus) or 1 (Lminus).
struct OperatorMatrix {
    OpKind kind = OpKind::Lminus;
    int sector_ell = 0;
    GridPtr grid;
    Params params;
    Eigen::VectorXd pot;  // mu_ell/r^2 - c V at the centers

    // action on cell values; the wall flux uses u(r_max)=0 (dirichlet) or a
    // ghost extrapolated by the decay power r^{-(d-2)} (power_tail), the
    // latter for residual checks on fields that do not vanish at the wall
    Eigen::VectorXd apply(const Eigen::VectorXd& u,
                          OuterBc bc = OuterBc::dirichlet) const;

    // symmetric tridiagonal representation in the variable
    // u_hat = sqrt(omega w) u (Euclidean inner product there equals the
    // weighted L^2 product); Dirichlet wall
    void tridiag_hat(Eigen::VectorXd& diag, Eigen::VectorXd& offdiag) const;
    Eigen::MatrixXd dense_hat() const;
};

OperatorMatrix assemble(const Params& p, const GridPtr& grid, OpKind kind, int ell);

// Negative-order norm <e, (-Lap+1)^{-1} e>_w^{1/2} (Dirichlet wall), the
// natural size of an elliptic operator residual; second-order small for the
// finite-volume truncation even where the potential is merely Holder.
double dual_norm(const GridPtr& grid, const Eigen::VectorXd& e);

// Discrete Dirichlet form omega * <grad f, grad g> dual to the assembled
// Laplacian (summation by parts is exact, Dirichlet wall term included).
double dirichlet_form(const RadialGrid& g, const Eigen::VectorXd& f,
                      const Eigen::VectorXd& h);
double dirichlet_inner(const PairField& f, const PairField& g);  // both parts

// Matrix operator of the linearized flow: out.v1 = (Lap + V) v2,
// out.v2 = -(Lap + (alpha+1) V) v1.
PairField apply_L(const PairField& v, const GroundStateBundle& bundle,
                  const Params& p, OuterBc bc = OuterBc::power_tail);

// Q(g) = 1/2 int |grad g|^2 - 1/2 int V ((alpha+1) g1^2 + g2^2).
double quad_Q(const PairField& g, const GroundStateBundle& bundle, const Params& p);
// Symmetric polarization of Q.
double bilinear_B(const PairField& f, const PairField& g,
                  const GroundStateBundle& bundle, const Params& p);

// R(v) = -i r^{-b} W^{alpha+1} J(v/W),
// J(z) = |1+z|^alpha (1+z) - 1 - (alpha+2)/2 z - alpha/2 conj(z).
PairField remainder_R(const PairField& v, const GroundStateBundle& bundle,
                      const Params& p);
Complex eval_J(Complex z, double alpha);

// Taylor coefficients a_{j1 j2} of J about 0 (expansion of
// (1+z)^{1+alpha/2} (1+conj z)^{alpha/2} with the constant/linear part
// removed), for 2 <= j1+j2 <= max_total_degree <= 8.
std::map<std::pair<int, int>, double> series_J_coeffs(const Params& p,
                                                      int max_total_degree);

// Removes the components of f along the given directions so that all the
// supplied constraint functionals vanish (small Gram solve; the functionals
// need not be the inner products of the directions).
PairField project_constraints(
    const PairField& f, const std::vector<PairField>& directions,
    const std::vector<std::function<double(const PairField&)>>& constraints);

}  // namespace incnls
