#pragma once

#include <functional>
#include <string>
#include <vector>

#include "incnls/groundstate.hpp"

namespace incnls {

enum class StopReason { time_limit, blowup_indicator, resolution_loss };

// Wall handling of the linear substep: plain Dirichlet (unitary Cayley
// update, exact mass conservation) or Dirichlet plus a frozen two-power
// ghost source fitted to the initial datum, which removes the artificial
// boundary layer when the datum carries W's power tail.
enum class WallMode { dirichlet, static_ghost };

struct DiagRecord {
    double t = 0.0;
    double energy = 0.0;
    double mass = 0.0;
    double grad_norm_sq = 0.0;
    double d_u = 0.0;  // kinetic gap |grad u|^2 - |grad W|^2, needs a bundle
};

struct Trajectory {
    std::string params_key;
    std::vector<double> times;          // at diagnostic cadence
    std::vector<RadialField> snapshots;
    std::vector<DiagRecord> diag;
    StopReason stop_reason = StopReason::time_limit;
};

// Strang splitting: exact nonlinear phase half-step (|u| invariant, the
// potential r^{-b}|u|^alpha is frozen exactly), Crank-Nicolson tridiagonal
// linear step, phase half-step. Reversible; the Dirichlet linear step is a
// unitary Cayley transform in the weighted L^2 product.
class NlsStepper {
  public:
    NlsStepper(const Params& p, const GridPtr& grid, bool nonlinear = true,
               WallMode wall = WallMode::dirichlet);
    // freeze the ghost source from this field's outer tail (static_ghost)
    void fit_wall_source(const RadialField& u0);
    void step(RadialField& u, double dt) const;

  private:
    Params p_;
    GridPtr grid_;
    bool nonlinear_;
    WallMode wall_;
    Eigen::VectorXd kd_, ke_;      // hat kinetic tridiagonal (-Laplacian)
    Eigen::VectorXd sq_;           // sqrt(omega w)
    Eigen::VectorXd phase_rate_;   // r^{-b}
    Complex wall_hat_{0.0, 0.0};   // frozen ghost source, hat variables
};

// Single step through a freshly built stepper (test convenience).
RadialField step_nls(const RadialField& u, double dt, const Params& p,
                     const GridPtr& grid);

struct EvolveOptions {
    double dt = 1e-4;
    int stride = 100;  // steps between diagnostic/snapshot records
    bool nonlinear = true;
    WallMode wall = WallMode::static_ghost;
    double blowup_grad_factor = 100.0;  // stop when ||grad u||^2 exceeds this
                                        // multiple of ||grad W||^2
    const GroundStateBundle* bundle = nullptr;  // enables d_u and the stop rule
    std::function<void(double, const RadialField&)> observer;
};

// Runs from t0 to t1 (either direction); applies the stop rules at the
// diagnostic cadence.
Trajectory integrate(const RadialField& u0, double t0, double t1,
                     const Params& p, const EvolveOptions& opts);

struct BlowupReport {
    bool fired = false;
    double max_grad_ratio = 0.0;  // vs ||grad W||^2
    bool monotone_tail = false;   // gradient growing over the last quarter
    std::string label = "indicator, not verdict";
};
BlowupReport blowup_indicator(const Trajectory& traj,
                              const GroundStateBundle& bundle);

struct ScatterReport {
    bool positive = false;
    double local_start = 0.0;  // L^{2d/(d-2)} norm on r < R0 at the ends
    double local_end = 0.0;
    double span = 0.0;
    std::string label = "indicator, not verdict";
};
ScatterReport scattering_indicator(const Trajectory& traj, const Params& p,
                                   double R0 = 10.0);

}  // namespace incnls
