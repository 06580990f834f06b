#include "incnls/modulation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "incnls/operators.hpp"

namespace incnls {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// weighted quadrature of V^2 f g, the L^2 pairing (V f, V g)
double pot_pair(const GroundStateBundle& bundle, const Eigen::VectorXd& f,
                const Eigen::VectorXd& g) {
    const RadialGrid& gr = *bundle.grid;
    double acc = 0.0;
    for (int j = 0; j < gr.n_cells; ++j) {
        double V = bundle.Vpot.v[j].real();
        acc += gr.w[j] * V * V * f[j] * g[j];
    }
    return unit_sphere_area(gr.d) * acc;
}

// derivative of the quadratic through (xa,fa),(xb,fb),(xc,fc) at x
double deriv3(double xa, double xb, double xc, double fa, double fb, double fc,
              double x) {
    return fa * (2.0 * x - xb - xc) / ((xa - xb) * (xa - xc)) +
           fb * (2.0 * x - xa - xc) / ((xb - xa) * (xb - xc)) +
           fc * (2.0 * x - xa - xb) / ((xc - xa) * (xc - xb));
}

}  // namespace

double default_delta0(const GroundStateBundle& bundle) {
    return 0.05 * bundle.grad_norm_sq;
}

double tail_corrected_h1(const RadialGrid& g, const Eigen::VectorXd& f,
                         const Eigen::VectorXd& h) {
    const int n = g.n_cells;
    double rn = g.r[n - 1];
    // int_{r > R} grad f . grad h for f,h ~ a r^{-(d-2)} matched at the
    // last cell center
    double tail = (g.d - 2.0) * f[n - 1] * h[n - 1] *
                  std::pow(rn, 2.0 * (g.d - 2.0)) *
                  std::pow(g.r_max, -(g.d - 2.0));
    return dirichlet_form(g, f, h) + unit_sphere_area(g.d) * tail;
}

ModulationState decompose(const RadialField& u, const GroundStateBundle& bundle,
                          const Params& p, double delta0, double theta_seed,
                          double mu_seed) {
    (void)p;
    require_same_grid(u.grid, bundle.grid);
    if (!(mu_seed > 0.0))
        throw std::invalid_argument("decompose: mu_seed must be positive");
    const RadialGrid& g = *bundle.grid;
    const Eigen::VectorXd Wre = bundle.W.v.real();
    const Eigen::VectorXd W1re = bundle.W1.v.real();
    const double gw = tail_corrected_h1(g, Wre, Wre);
    const double gw1 = tail_corrected_h1(g, W1re, W1re);

    double theta = theta_seed, lm = std::log(mu_seed);
    RadialField us;
    int it = 0;
    const int max_iters = 50;
    const double tol = 1e-11;
    for (;; ++it) {
        us = rescale(u, theta, std::exp(lm));
        double J0 = tail_corrected_h1(g, us.v.imag().eval(), Wre);
        double J1 = tail_corrected_h1(g, us.v.real().eval(), W1re);
        if (std::abs(J0) <= tol * gw && std::abs(J1) <= tol * gw1) break;
        if (it >= max_iters)
            throw std::runtime_error(
                "decompose: orthogonality iteration did not converge "
                "(field outside the decomposition neighborhood)");
        // frozen base-point Jacobian: dJ0/dtheta = ||grad W||^2,
        // dJ1/dlog(mu) = -||grad W1||^2; steps clamped for far seeds
        double st = -J0 / gw, sl = J1 / gw1;
        theta += std::clamp(st, -0.5, 0.5);
        lm += std::clamp(sl, -0.5, 0.5);
    }

    ModulationState out;
    out.theta = std::remainder(theta, kTwoPi);
    out.mu = std::exp(lm);
    out.newton_iters = it;
    out.beta = tail_corrected_h1(g, us.v.real().eval(), Wre) / gw - 1.0;
    out.u_tilde = PairField(bundle.grid);
    out.u_tilde.v1 = us.v.real() - (1.0 + out.beta) * Wre;
    out.u_tilde.v2 = us.v.imag();
    out.d_u = distance_d(u, bundle);
    out.valid = out.d_u < delta0;
    return out;
}

std::vector<TrackRecord> track(const Trajectory& traj,
                               const GroundStateBundle& bundle, const Params& p,
                               double delta0) {
    const size_t n = traj.snapshots.size();
    std::vector<TrackRecord> out(n);
    double th_prev = 0.0, lm_prev = 0.0, t_prev = 0.0;
    double th_last = 0.0, lm_last = 0.0, t_last = 0.0;
    int n_ok = 0;
    for (size_t i = 0; i < n; ++i) {
        TrackRecord& rec = out[i];
        rec.t = traj.times[i];
        double th_seed = 0.0, lm_seed = 0.0;
        if (n_ok == 1) {
            th_seed = th_last;
            lm_seed = lm_last;
        } else if (n_ok >= 2) {
            double s = (rec.t - t_last) / (t_last - t_prev);
            th_seed = th_last + s * (th_last - th_prev);
            lm_seed = lm_last + s * (lm_last - lm_prev);
        }
        try {
            rec.state = decompose(traj.snapshots[i], bundle, p, delta0,
                                  th_seed, std::exp(lm_seed));
        } catch (const std::exception&) {
            rec.ok = false;
            continue;
        }
        // keep theta on the branch the seed predicts (decompose wraps it)
        rec.state.theta +=
            kTwoPi * std::round((th_seed - rec.state.theta) / kTwoPi);
        th_prev = th_last;
        lm_prev = lm_last;
        t_prev = t_last;
        th_last = rec.state.theta;
        lm_last = std::log(rec.state.mu);
        t_last = rec.t;
        ++n_ok;
    }

    // three-point finite differences over the converged records
    std::vector<size_t> ok;
    for (size_t i = 0; i < n; ++i)
        if (out[i].ok) ok.push_back(i);
    for (size_t k = 0; k < ok.size(); ++k) {
        if (ok.size() < 2) break;
        TrackRecord& rec = out[ok[k]];
        // at the ends fall back to the one-sided pair (k, k+-1)
        size_t ka = k > 0 ? k - 1 : k, kc = k + 1 < ok.size() ? k + 1 : k;
        const TrackRecord& ra = out[ok[ka]];
        const TrackRecord& rc = out[ok[kc]];
        if (ka == k || kc == k) {
            const TrackRecord& o = ka == k ? rc : ra;
            double dt = rec.t - o.t;
            rec.dbeta = (rec.state.beta - o.state.beta) / dt;
            rec.dtheta = (rec.state.theta - o.state.theta) / dt;
            rec.dlogmu = (std::log(rec.state.mu) - std::log(o.state.mu)) / dt;
        } else {
            rec.dbeta = deriv3(ra.t, rec.t, rc.t, ra.state.beta,
                               rec.state.beta, rc.state.beta, rec.t);
            rec.dtheta = deriv3(ra.t, rec.t, rc.t, ra.state.theta,
                                rec.state.theta, rc.state.theta, rec.t);
            rec.dlogmu = deriv3(ra.t, rec.t, rc.t, std::log(ra.state.mu),
                                std::log(rec.state.mu), std::log(rc.state.mu),
                                rec.t);
        }
        double num = std::abs(rec.dbeta) + std::abs(rec.dtheta) +
                     std::abs(rec.dlogmu);
        double den = rec.state.mu * rec.state.mu * rec.state.d_u;
        // below the noise floor the kinetic gap crosses zero while the
        // parameters drift at integrator accuracy; report 0 there (0/0 guard)
        bool noise = rec.state.d_u < 1e-4 * bundle.grad_norm_sq;
        rec.drift_ratio = noise ? 0.0 : num / std::max(den, 1e-300);
    }
    return out;
}

double compactness_scale(const RadialField& u,
                         const GroundStateBundle& bundle) {
    require_same_grid(u.grid, bundle.grid);
    const RadialGrid& g = *u.grid;
    auto geo = fv_geometry(g);
    const double omega = unit_sphere_area(g.d);
    const double level = bundle.energy_W;
    double acc = 0.0;
    for (int j = 1; j < g.n_cells; ++j) {
        double fl = omega * geo.S[j] / geo.delta[j] *
                    std::norm(u.v[j] - u.v[j - 1]);
        if (acc + fl >= level) {
            double frac = (level - acc) / fl;
            double R = g.edges[j - 1] + frac * (g.edges[j] - g.edges[j - 1]);
            return 1.0 / R;
        }
        acc += fl;
    }
    throw std::domain_error(
        "compactness_scale: kinetic level never reached on the grid");
}

std::vector<ParameterEquationResidual> parameter_equation_residual(
    const std::vector<TrackRecord>& seq, const GroundStateBundle& bundle,
    const Params& p) {
    const RadialGrid& g = *bundle.grid;
    const Eigen::VectorXd Wre = bundle.W.v.real();
    const Eigen::VectorXd W1re = bundle.W1.v.real();
    const double gw = tail_corrected_h1(g, Wre, Wre);
    const double gw1 = tail_corrected_h1(g, W1re, W1re);
    // (Lap f, W) in the Dirichlet form is -(grad f, grad VW) by the ground
    // state equation; the W1 version uses -Lap W1 = (alpha+1) V W1
    Eigen::VectorXd VW(g.n_cells), VW1(g.n_cells);
    for (int j = 0; j < g.n_cells; ++j) {
        double V = bundle.Vpot.v[j].real();
        VW[j] = V * Wre[j];
        VW1[j] = V * W1re[j];
    }
    const double pWW = pot_pair(bundle, Wre, Wre);

    std::vector<ParameterEquationResidual> out;
    for (const auto& rec : seq) {
        if (!rec.ok) continue;
        double mu2 = rec.state.mu * rec.state.mu;
        double beta_s = rec.dbeta / mu2;
        double theta_s = rec.dtheta / mu2;
        double mus = rec.dlogmu / mu2;
        const Eigen::VectorXd& u1 = rec.state.u_tilde.v1;
        const Eigen::VectorXd& u2 = rec.state.u_tilde.v2;

        ParameterEquationResidual r;
        r.t = rec.t;
        r.d_u = rec.state.d_u;
        r.calE = r.d_u * (r.d_u + std::abs(theta_s) + std::abs(mus));
        r.res_beta = beta_s * gw - dirichlet_form(g, u2, VW) +
                     pot_pair(bundle, u2, Wre);
        r.res_theta = theta_s * gw - dirichlet_form(g, u1, VW) +
                      (p.alpha + 1.0) * pot_pair(bundle, u1, Wre) +
                      p.alpha * rec.state.beta * pWW;
        r.res_mu = mus * gw1 -
                   (p.alpha + 1.0) * dirichlet_form(g, u2, VW1) +
                   (p.alpha + 1.0) * pot_pair(bundle, u2, W1re);
        out.push_back(r);
    }
    return out;
}

}  // namespace incnls
