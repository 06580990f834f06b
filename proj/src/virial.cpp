#include "incnls/virial.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

#include "incnls/calculus.hpp"
#include "incnls/operators.hpp"

namespace incnls {

namespace {

// quintic blend on [1,2] in x = s-1: matches value/slope/curvature (and a
// zero third derivative) of s^2 at s=1 and flattens to slope 0, curvature 0
// at s=2. p'' - 2 = x^2(40x - 42) <= 0 on [0,1], p' >= 0: both legality
// conditions hold with margin. Plateau value p(1) = 5/2.
double blend(double x, int k) {
    switch (k) {
        case 0: return 1.0 + x * (2.0 + x * (1.0 + x * x * (-3.5 + 2.0 * x)));
        case 1: return 2.0 + x * (2.0 + x * x * (-14.0 + 10.0 * x));
        case 2: return 2.0 + x * x * (-42.0 + 40.0 * x);
        case 3: return x * (-84.0 + 120.0 * x);
        case 4: return -84.0 + 240.0 * x;
        default: return 0.0;
    }
}

// 8-point Gauss-Legendre on [a,c]
double gauss8(const std::function<double(double)>& f, double a, double c) {
    static const double x[4] = {0.1834346424956498, 0.5255324099163290,
                                0.7966664774136267, 0.9602898564975363};
    static const double w[4] = {0.3626837833783620, 0.3137066458778873,
                                0.2223810344533745, 0.1012285362903763};
    double m = 0.5 * (a + c), h = 0.5 * (c - a), acc = 0.0;
    for (int i = 0; i < 4; ++i)
        acc += w[i] * (f(m - h * x[i]) + f(m + h * x[i]));
    return h * acc;
}

void check_cfg(const VirialConfig& cfg) {
    if (!(cfg.R > 0.0))
        throw std::invalid_argument("virial: cutoff R must be positive");
}

// Lap^2 phi_R at radius r (radial biharmonic, dimension d); scales as R^{-2}
// and is supported on the blend annulus R < r < 2R.
double biharmonic_phi(double r, double R, int d) {
    double s = r / R;
    if (s <= 1.0 || s >= 2.0) return 0.0;
    double x = s - 1.0;
    double p1 = blend(x, 1), p2 = blend(x, 2), p3 = blend(x, 3),
           p4 = blend(x, 4);
    double dm = d - 1.0;
    return (p4 + 2.0 * dm * p3 / s + dm * (d - 3.0) * (p2 / (s * s) - p1 / (s * s * s))) /
           (R * R);
}

}  // namespace

double virial_profile(double s, int k) {
    if (s <= 1.0) {
        if (k == 0) return s * s;
        if (k == 1) return 2.0 * s;
        if (k == 2) return 2.0;
        return 0.0;
    }
    if (s >= 2.0) return k == 0 ? 2.5 : 0.0;
    return blend(s - 1.0, k);
}

double virial_V(const RadialField& u, const VirialConfig& cfg) {
    check_cfg(cfg);
    const RadialGrid& g = *u.grid;
    double acc = 0.0;
    for (int j = 0; j < g.n_cells; ++j)
        acc += g.w[j] * virial_profile(g.r[j] / cfg.R) * std::norm(u.v[j]);
    return unit_sphere_area(g.d) * cfg.R * cfg.R * acc;
}

double virial_first_derivative(const RadialField& u, const VirialConfig& cfg) {
    check_cfg(cfg);
    const RadialGrid& g = *u.grid;
    auto geo = fv_geometry(g);
    // face quadrature: conj(u) u' at face j is Im(conj(u_{j-1}) u_j)/delta_j
    // up to the symmetric average; phi_R'(r) = R phi'(r/R)
    double acc = 0.0;
    for (int j = 1; j < g.n_cells; ++j) {
        double e = g.edges[j];
        double dphi = cfg.R * virial_profile(e / cfg.R, 1);
        if (dphi == 0.0) continue;
        acc += geo.S[j] * dphi * 2.0 * (std::conj(u.v[j - 1]) * u.v[j]).imag();
    }
    return unit_sphere_area(g.d) * acc;
}

VirialIdentity virial_second_identity(const RadialField& u,
                                      const VirialConfig& cfg,
                                      const GroundStateBundle& bundle,
                                      const Params& p) {
    check_cfg(cfg);
    require_same_grid(u.grid, bundle.grid);
    const RadialGrid& g = *u.grid;
    if (!(2.0 * cfg.R <= g.r_max))
        throw std::invalid_argument(
            "virial_second_identity: plateau 2R must fit inside the grid");
    const double omega = unit_sphere_area(g.d);
    const double a = p.alpha;
    auto geo = fv_geometry(g);

    // annulus gradient term 4 int (phi_R'' - 2) |u'|^2; the weight vanishes
    // identically inside r <= R
    double t_grad = 0.0;
    for (int j = 1; j < g.n_cells; ++j) {
        double w2 = virial_profile(g.edges[j] / cfg.R, 2) - 2.0;
        if (w2 == 0.0) continue;
        t_grad += w2 * geo.S[j] / geo.delta[j] * std::norm(u.v[j] - u.v[j - 1]);
    }
    t_grad *= 4.0 * omega;

    // mass term -int (Lap^2 phi_R) |u|^2 and the potential term; the
    // potential weight also vanishes identically inside r <= R
    double t_mass = 0.0, t_pot = 0.0;
    const double w_lin = g.d - 1.0 + 2.0 * p.b / a;
    const double w_const = 4.0 * (a + 2.0) / a;
    auto bi_meas = [&](double r) {
        return biharmonic_phi(r, cfg.R, g.d) * std::pow(r, g.d - 1.0);
    };
    for (int j = 0; j < g.n_cells; ++j) {
        double r = g.r[j], s = r / cfg.R;
        // the biharmonic weight jumps at both annulus edges; integrate it
        // exactly over the cell/annulus overlap against the cell value of
        // |u|^2 (center sampling of a jump costs O(h) with a bad prefactor)
        double a0 = std::max(g.edges[j], cfg.R);
        double c0 = std::min(g.edges[j + 1], 2.0 * cfg.R);
        if (a0 < c0)
            t_mass += gauss8(bi_meas, a0, c0) * std::norm(u.v[j]);
        if (s > 1.0) {
            double br = virial_profile(s, 2) +
                        w_lin * virial_profile(s, 1) / s - w_const;
            t_pot += g.w[j] * br * std::pow(r, -p.b) *
                     std::pow(std::abs(u.v[j]), a + 2.0);
        }
    }
    // the blend is C^2 at s = 2 (phi''' jumps to 0 there), so Lap^2 phi_R
    // carries a surface delta at r = 2R of strength -phi'''(2-)/R; the mass
    // term picks up +omega (2R)^{d-1} phi'''(2-) |u(2R)|^2 / R
    {
        double r2 = 2.0 * cfg.R;
        int j = 0;
        while (j + 1 < g.n_cells && g.r[j + 1] < r2) ++j;
        double f = (r2 - g.r[j]) / (g.r[j + 1] - g.r[j]);
        double usq = (1.0 - f) * std::norm(u.v[j]) + f * std::norm(u.v[j + 1]);
        t_mass -= blend(1.0, 3) / cfg.R * std::pow(r2, g.d - 1.0) * usq;
    }
    t_mass *= -omega;
    t_pot *= -2.0 * a / (a + 2.0) * omega;

    // r > r_max tails: phi_R is constant there (2R <= r_max), so the
    // gradient weight is -2 and the potential bracket is -4(a+2)/a
    TailFit tf = fit_tail(u, p.b);
    double tail = -8.0 * omega * kinetic_tail(tf, g, p.b) +
                  8.0 * omega * potential_tail(tf, g, p);

    VirialIdentity out;
    out.A_R = t_grad + t_mass + t_pot + tail;
    double gradsq = h1_norm_sq(u, p.b);
    out.d_u = std::abs(gradsq - bundle.grad_norm_sq);
    double gap = gradsq - bundle.grad_norm_sq;
    if (std::abs(gap) <= 1e-10 * bundle.grad_norm_sq) {
        out.side = KineticSide::boundary;
        out.lhs_proxy = out.A_R;
    } else if (gap < 0.0) {
        out.side = KineticSide::subcritical;
        out.lhs_proxy = 4.0 * a * out.d_u + out.A_R;
    } else {
        out.side = KineticSide::supercritical;
        out.lhs_proxy = -4.0 * a * out.d_u + out.A_R;
    }
    return out;
}

}  // namespace incnls
