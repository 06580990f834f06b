#pragma once

#include <vector>

#include "incnls/evolution.hpp"

namespace incnls {

// Orthogonal decomposition of a near-ground-state field:
// u_{[theta,mu]} = (1+beta) W + u_tilde with u_tilde orthogonal to W, iW
// and W1 in the Dirichlet form. Parameters measure the distance to the
// symmetry orbit of W; beta is fixed by the projection on W.
struct ModulationState {
    double theta = 0.0;
    double mu = 1.0;
    double beta = 0.0;
    PairField u_tilde;
    double d_u = 0.0;        // kinetic gap of the input field
    bool valid = false;      // d_u < delta0 (marker, not an error)
    int newton_iters = 0;
};

// Smallness threshold for the decomposition neighborhood; the reference
// choice is 5% of the ground state's kinetic norm.
double default_delta0(const GroundStateBundle& bundle);

// Dirichlet form plus the exterior integral of the r^{-(d-2)} continuations
// fitted at the last cell. Restores the scale invariance of the Ḣ¹ product
// that plain ball truncation loses (the d=3 tail carries ~3% of ||grad W||^2);
// all modulation pairings use this form.
double tail_corrected_h1(const RadialGrid& g, const Eigen::VectorXd& f,
                         const Eigen::VectorXd& h);

// Newton iteration on (theta, log mu) for the two orthogonality residuals
// J0 = (u_{[theta,mu]}, iW) and J1 = (u_{[theta,mu]}, W1) in the Dirichlet
// form, with the frozen base-point Jacobian diag(||grad W||^2,
// -||grad W1||^2). Throws on non-convergence within 50 iterations.
ModulationState decompose(const RadialField& u, const GroundStateBundle& bundle,
                          const Params& p, double delta0,
                          double theta_seed = 0.0, double mu_seed = 1.0);

struct TrackRecord {
    double t = 0.0;
    ModulationState state;
    // time derivatives by three-point finite differences on the snapshot grid
    double dbeta = 0.0;
    double dtheta = 0.0;
    double dlogmu = 0.0;
    // (|beta'| + |theta'| + |mu'/mu|) / (mu^2 d(u)), 0/0 guarded to 0;
    // the parameter drift rate against its expected bound
    double drift_ratio = 0.0;
    bool ok = true;  // decomposition converged at this snapshot
};

// Warm-started decomposition along a trajectory: seeds extrapolate linearly
// from the two previous states (keeps the phase on its 2 pi branch), theta
// is unwrapped to a continuous curve, failures are recorded and skipped.
std::vector<TrackRecord> track(const Trajectory& traj,
                               const GroundStateBundle& bundle, const Params& p,
                               double delta0);

// Largest lambda with int_{r <= 1/lambda} |grad u|^2 = E(W): the inverse of
// the first crossing radius of the cumulative kinetic integral (linear
// interpolation between faces). Throws std::domain_error when the level is
// never reached.
double compactness_scale(const RadialField& u, const GroundStateBundle& bundle);

// Closure errors of the three modulation parameter equations in the
// self-similar time s (ds = mu^2 dt):
//   beta_s ||W||^2  + (Lap u2~, W)  + (V u2~, W)                     = res_beta
//   theta_s ||W||^2 + (Lap u1~, W)  + ((a+1) V u1~, W) + a beta (VW, W) = res_theta
//   (mu_s/mu) ||W1||^2 + (Lap u2~, W1) + (V u2~, W1)                 = res_mu
// all pairings in the Dirichlet form, V = r^{-b} W^alpha. Each residual is
// expected O(calE) with calE = d (d + |theta_s| + |mu_s/mu|).
struct ParameterEquationResidual {
    double t = 0.0;
    double res_beta = 0.0;
    double res_theta = 0.0;
    double res_mu = 0.0;
    double d_u = 0.0;
    double calE = 0.0;
};
std::vector<ParameterEquationResidual> parameter_equation_residual(
    const std::vector<TrackRecord>& seq, const GroundStateBundle& bundle,
    const Params& p);

}  // namespace incnls
