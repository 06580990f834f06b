#include "incnls/grid.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace incnls {

std::string StretchSpec::key() const {
    char buf[64];
    if (kind == Kind::uniform) return "uniform";
    std::snprintf(buf, sizeof(buf), "stretched:%.6g:%.6g", sigma, theta);
    return buf;
}

std::string RadialGrid::key() const {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "d%d:n%d:rmax%.9g:%s", d, n_cells, r_max,
                  stretch.key().c_str());
    return buf;
}

GridPtr make_grid(const Params& params, int n_cells, double r_max,
                  StretchSpec stretch) {
    if (n_cells < 16) throw std::invalid_argument("make_grid: n_cells >= 16");
    if (!(r_max > 1.0)) throw std::invalid_argument("make_grid: r_max > 1");

    auto g = std::make_shared<RadialGrid>();
    g->d = params.d;
    g->n_cells = n_cells;
    g->r_max = r_max;
    g->stretch = stretch;
    g->edges.resize(n_cells + 1);

    const double sig = stretch.sigma, th = stretch.theta;
    const double den = std::expm1(sig);
    for (int j = 0; j <= n_cells; ++j) {
        double x = static_cast<double>(j) / n_cells;
        if (stretch.kind == StretchSpec::Kind::uniform)
            g->edges[j] = r_max * x;
        else
            g->edges[j] = r_max * (th * x + (1.0 - th) * std::expm1(sig * x) / den);
    }
    g->edges[0] = 0.0;
    g->edges[n_cells] = r_max;

    g->r.resize(n_cells);
    g->w.resize(n_cells);
    const int d = params.d;
    for (int j = 0; j < n_cells; ++j) {
        double a = g->edges[j], c = g->edges[j + 1];
        g->r[j] = 0.5 * (a + c);
        g->w[j] = (std::pow(c, d) - std::pow(a, d)) / d;
        if (!(g->r[j] > 0.0) || !(g->w[j] > 0.0))
            throw std::invalid_argument("make_grid: degenerate cell");
    }
    return g;
}

}  // namespace incnls
