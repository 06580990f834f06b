#include "incnls/evolution.hpp"

#include <cmath>
#include <stdexcept>

#include "incnls/operators.hpp"

namespace incnls {

namespace {

// complex Thomas solve for a symmetric tridiagonal (diag, off)
void tri_solve(const Eigen::VectorXcd& diag, const Eigen::VectorXcd& off,
               Eigen::VectorXcd& rhs) {
    const int n = static_cast<int>(diag.size());
    Eigen::VectorXcd c(n);
    c[0] = off.size() > 0 ? off[0] / diag[0] : Complex(0, 0);
    rhs[0] /= diag[0];
    for (int j = 1; j < n; ++j) {
        Complex m = diag[j] - off[j - 1] * c[j - 1];
        if (j < n - 1) c[j] = off[j] / m;
        rhs[j] = (rhs[j] - off[j - 1] * rhs[j - 1]) / m;
    }
    for (int j = n - 2; j >= 0; --j) rhs[j] -= c[j] * rhs[j + 1];
}

}  // namespace

NlsStepper::NlsStepper(const Params& p, const GridPtr& grid, bool nonlinear,
                       WallMode wall)
    : p_(p), grid_(grid), nonlinear_(nonlinear), wall_(wall) {
    auto op = assemble(p, grid, OpKind::Lminus, 0);
    op.tridiag_hat(kd_, ke_);
    kd_ -= op.pot;  // strip the potential: pure -Laplacian remains
    sq_ = (unit_sphere_area(grid->d) * grid->w.array()).sqrt();
    phase_rate_ = grid->r.array().pow(-p.b);
    if (wall_ == WallMode::static_ghost) {
        // ghost cell mirrored across the wall sits at distance 2*delta_n
        auto geo = fv_geometry(*grid);
        const int n = grid->n_cells;
        double wallterm = geo.S[n] / (geo.delta[n] * grid->w[n - 1]);
        kd_[n - 1] += -wallterm + 0.5 * wallterm;
    }
}

void NlsStepper::fit_wall_source(const RadialField& u0) {
    if (wall_ != WallMode::static_ghost) return;
    const int n = grid_->n_cells;
    if (n < 2) throw std::invalid_argument("grid too small");
    double r1 = grid_->r[n - 2], r2 = grid_->r[n - 1];
    double rg = 2.0 * grid_->r_max - r2;
    Eigen::Matrix2d M;
    M << std::pow(r1, -(grid_->d - 2.0)), std::pow(r1, -(grid_->d - p_.b)),
        std::pow(r2, -(grid_->d - 2.0)), std::pow(r2, -(grid_->d - p_.b));
    Eigen::Vector2d re(u0.v[n - 2].real(), u0.v[n - 1].real());
    Eigen::Vector2d im(u0.v[n - 2].imag(), u0.v[n - 1].imag());
    auto lu = M.fullPivLu();
    Eigen::Vector2d cre = lu.solve(re), cim = lu.solve(im);
    Complex g(cre[0] * std::pow(rg, -(grid_->d - 2.0)) +
                  cre[1] * std::pow(rg, -(grid_->d - p_.b)),
              cim[0] * std::pow(rg, -(grid_->d - 2.0)) +
                  cim[1] * std::pow(rg, -(grid_->d - p_.b)));
    auto geo = fv_geometry(*grid_);
    wall_hat_ =
        sq_[n - 1] * geo.S[n] / (2.0 * geo.delta[n] * grid_->w[n - 1]) * g;
}

void NlsStepper::step(RadialField& u, double dt) const {
    const int n = grid_->n_cells;
    const Complex I(0.0, 1.0);
    auto phase = [&](double h) {
        for (int j = 0; j < n; ++j) {
            double a2 = std::norm(u.v[j]);
            u.v[j] *= std::exp(I * (h * phase_rate_[j] *
                                    std::pow(a2, 0.5 * p_.alpha)));
        }
    };
    if (nonlinear_) phase(0.5 * dt);

    // Crank-Nicolson in the hat variables: (1 + i dt/2 K) u' =
    // (1 - i dt/2 K) u + i dt b
    Complex th = I * (0.5 * dt);
    Eigen::VectorXcd uh = sq_.cwiseProduct(u.v);
    Eigen::VectorXcd rhs(n);
    for (int j = 0; j < n; ++j) {
        Complex acc = (1.0 - th * kd_[j]) * uh[j];
        if (j > 0) acc -= th * ke_[j - 1] * uh[j - 1];
        if (j + 1 < n) acc -= th * ke_[j] * uh[j + 1];
        rhs[j] = acc;
    }
    rhs[n - 1] += I * dt * wall_hat_;
    Eigen::VectorXcd diag = (1.0 + th * kd_.array()).matrix();
    Eigen::VectorXcd off = (th * ke_.array()).matrix();
    tri_solve(diag, off, rhs);
    u.v = rhs.cwiseQuotient(sq_.cast<Complex>());

    if (nonlinear_) phase(0.5 * dt);
}

RadialField step_nls(const RadialField& u, double dt, const Params& p,
                     const GridPtr& grid) {
    NlsStepper st(p, grid, true, WallMode::static_ghost);
    st.fit_wall_source(u);
    RadialField out = u;
    st.step(out, dt);
    return out;
}

namespace {

double mass_of(const RadialField& u) {
    const RadialGrid& g = *u.grid;
    double acc = 0.0;
    for (int j = 0; j < g.n_cells; ++j) acc += g.w[j] * std::norm(u.v[j]);
    return unit_sphere_area(g.d) * acc;
}

double grad_sq(const RadialField& u) {
    return dirichlet_form(*u.grid, u.v.real().eval(), u.v.real().eval()) +
           dirichlet_form(*u.grid, u.v.imag().eval(), u.v.imag().eval());
}

// fraction of the Dirichlet form carried by the first ncells faces
double core_fraction(const RadialField& u, int ncells) {
    const RadialGrid& g = *u.grid;
    auto geo = fv_geometry(g);
    double core = 0.0, total = 0.0;
    for (int j = 1; j < g.n_cells; ++j) {
        double fl = geo.S[j] / geo.delta[j] * std::norm(u.v[j] - u.v[j - 1]);
        total += fl;
        if (j <= ncells) core += fl;
    }
    return total > 0.0 ? core / total : 0.0;
}

}  // namespace

Trajectory integrate(const RadialField& u0, double t0, double t1,
                     const Params& p, const EvolveOptions& opts) {
    if (!(opts.dt > 0.0)) throw std::invalid_argument("integrate: dt <= 0");
    const double dir = t1 >= t0 ? 1.0 : -1.0;
    const double dt = dir * opts.dt;
    const long nsteps = std::lround(std::abs(t1 - t0) / opts.dt);

    NlsStepper st(p, u0.grid, opts.nonlinear, opts.wall);
    st.fit_wall_source(u0);

    Trajectory traj;
    traj.params_key = u0.grid->key();
    RadialField u = u0;

    auto record = [&](double t) -> bool {
        DiagRecord d;
        d.t = t;
        d.mass = mass_of(u);
        d.grad_norm_sq = grad_sq(u);
        d.energy = energy(u, p);
        d.d_u = opts.bundle ? distance_d(u, *opts.bundle)
                            : std::numeric_limits<double>::quiet_NaN();
        traj.times.push_back(t);
        traj.snapshots.push_back(u);
        traj.diag.push_back(d);
        if (opts.observer) opts.observer(t, u);
        if (!u.v.allFinite()) {
            traj.stop_reason = StopReason::blowup_indicator;
            return false;
        }
        if (opts.bundle &&
            d.grad_norm_sq > opts.blowup_grad_factor * opts.bundle->grad_norm_sq) {
            traj.stop_reason = StopReason::blowup_indicator;
            return false;
        }
        if (core_fraction(u, 4) > 0.5) {
            traj.stop_reason = StopReason::resolution_loss;
            return false;
        }
        return true;
    };

    if (!record(t0)) return traj;
    for (long s = 1; s <= nsteps; ++s) {
        st.step(u, dt);
        if (s % opts.stride == 0 || s == nsteps) {
            if (!record(t0 + static_cast<double>(s) * dt)) return traj;
        }
    }
    traj.stop_reason = StopReason::time_limit;
    return traj;
}

BlowupReport blowup_indicator(const Trajectory& traj,
                              const GroundStateBundle& bundle) {
    BlowupReport rep;
    if (traj.diag.empty()) return rep;
    double gmax = 0.0;
    for (const auto& d : traj.diag)
        if (std::isfinite(d.grad_norm_sq)) gmax = std::max(gmax, d.grad_norm_sq);
    rep.max_grad_ratio = gmax / bundle.grad_norm_sq;
    const int n = static_cast<int>(traj.diag.size());
    rep.monotone_tail = true;
    for (int i = std::max(1, 3 * n / 4); i < n; ++i)
        if (!(traj.diag[i].grad_norm_sq >= traj.diag[i - 1].grad_norm_sq))
            rep.monotone_tail = false;
    rep.fired = (rep.max_grad_ratio >= 10.0 && rep.monotone_tail) ||
                traj.stop_reason != StopReason::time_limit;
    return rep;
}

ScatterReport scattering_indicator(const Trajectory& traj, const Params& p,
                                   double R0) {
    ScatterReport rep;
    if (traj.snapshots.size() < 2) return rep;
    double q = 2.0 * p.d / (p.d - 2.0);
    auto local = [&](const RadialField& u) {
        const RadialGrid& g = *u.grid;
        double acc = 0.0;
        for (int j = 0; j < g.n_cells; ++j)
            if (g.r[j] < R0)
                acc += g.w[j] * std::pow(std::abs(u.v[j]), q);
        return std::pow(unit_sphere_area(g.d) * acc, 1.0 / q);
    };
    rep.local_start = local(traj.snapshots.front());
    rep.local_end = local(traj.snapshots.back());
    rep.span = std::abs(traj.times.back() - traj.times.front());
    rep.positive = rep.local_end <= 0.5 * rep.local_start;
    return rep;
}

}  // namespace incnls
