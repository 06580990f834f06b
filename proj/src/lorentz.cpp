#include "incnls/lorentz.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace incnls {

StepFunction decreasing_rearrangement(const RadialField& f) {
    const RadialGrid& g = *f.grid;
    const int n = g.n_cells;
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return std::abs(f.v[a]) > std::abs(f.v[b]);
    });
    const double omega = unit_sphere_area(g.d);
    StepFunction out;
    out.s.resize(n);
    out.s_at.resize(n);
    out.vals.resize(n);
    double acc = 0.0;
    for (int k = 0; k < n; ++k) {
        int j = order[k];
        double inner = (std::pow(g.r[j], g.d) - std::pow(g.edges[j], g.d)) / g.d;
        out.s_at[k] = acc + omega * inner;
        acc += omega * g.w[j];
        out.s[k] = acc;
        out.vals[k] = std::abs(f.v[j]);
    }
    return out;
}

double lorentz_norm(const StepFunction& fstar, const LorentzSpec& spec) {
    if (!(spec.r_exp > 1.0)) throw std::invalid_argument("lorentz_norm: r_exp > 1");
    const int n = static_cast<int>(fstar.s.size());
    if (std::isinf(spec.rho_exp)) {
        double sup = 0.0;
        for (int k = 0; k < n; ++k)
            sup = std::max(sup,
                           std::pow(fstar.s_at[k], 1.0 / spec.r_exp) * fstar.vals[k]);
        return sup;
    }
    if (!(spec.rho_exp >= 1.0))
        throw std::invalid_argument("lorentz_norm: rho_exp >= 1 or infinity");
    const double e = spec.rho_exp / spec.r_exp;
    double acc = 0.0, prev = 0.0;
    for (int k = 0; k < n; ++k) {
        double sk = std::pow(fstar.s[k], e);
        acc += std::pow(fstar.vals[k], spec.rho_exp) * (sk - prev);
        prev = sk;
    }
    return std::pow(acc, 1.0 / spec.rho_exp);
}

double lorentz_norm(const RadialField& f, const LorentzSpec& spec) {
    return lorentz_norm(decreasing_rearrangement(f), spec);
}

double weak_norm_power_weight(const Params& p) {
    // d_f(lambda) = vol{r < lambda^{-1/b}} = (omega/d) lambda^{-d/b}, so
    // f*(s) = ((omega/d)/s)^{b/d}; sweep s^{b/d} f*(s) for the sup.
    const double volb = unit_sphere_area(p.d) / p.d;
    double sup = 0.0;
    for (int i = -200; i <= 200; ++i) {
        double s = std::pow(10.0, 0.05 * i);
        double fstar = std::pow(volb / s, p.b / p.d);
        sup = std::max(sup, std::pow(s, p.b / p.d) * fstar);
    }
    return sup;
}

double spacetime_norm(const std::vector<RadialField>& snaps, double dt,
                      SpaceTimeKind kind, const Params& p) {
    if (snaps.empty()) throw std::invalid_argument("spacetime_norm: empty trajectory");
    LorentzSpec spat;
    double tq = p.gamma_t;
    switch (kind) {
        case SpaceTimeKind::S:
            spat = {p.p_x, 2.0};
            break;
        case SpaceTimeKind::Z:
            spat = {p.rho_x, 2.0};
            break;
        case SpaceTimeKind::N:
            spat = {2.0 * p.d / (p.d + 2.0), 2.0};
            tq = 2.0;
            break;
    }
    if (kind == SpaceTimeKind::N && !(spat.r_exp > 1.0))
        throw std::invalid_argument("spacetime_norm: degenerate exponent");
    double acc = 0.0;
    for (const auto& u : snaps) {
        double spatial;
        if (kind == SpaceTimeKind::Z) {
            RadialField grad(u.grid);
            Eigen::VectorXcd up = deriv3(*u.grid, u.v);
            for (int j = 0; j < u.n(); ++j) grad.v[j] = std::abs(up[j]);
            spatial = lorentz_norm(grad, spat);
        } else {
            spatial = lorentz_norm(u, spat);
        }
        acc += dt * std::pow(spatial, tq);
    }
    return std::pow(acc, 1.0 / tq);
}

}  // namespace incnls
