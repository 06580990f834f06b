#include "incnls/groundstate.hpp"

#include <cmath>

namespace incnls {

namespace {

double shape_s(const Params& p, double r) {
    return std::pow(r, 2.0 - p.b) / ((p.d - 2.0) * (p.d - p.b));
}

// Monotone cubic Hermite (Fritsch-Carlson) slopes for nodes x, values y.
Eigen::VectorXd pchip_slopes(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    const int n = static_cast<int>(x.size());
    Eigen::VectorXd h(n - 1), delta(n - 1), m(n);
    for (int i = 0; i < n - 1; ++i) {
        h[i] = x[i + 1] - x[i];
        delta[i] = (y[i + 1] - y[i]) / h[i];
    }
    m[0] = delta[0];
    m[n - 1] = delta[n - 2];
    for (int i = 1; i < n - 1; ++i) {
        if (delta[i - 1] * delta[i] <= 0.0) {
            m[i] = 0.0;
        } else {
            double w1 = 2.0 * h[i] + h[i - 1], w2 = h[i] + 2.0 * h[i - 1];
            m[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    return m;
}

struct Pchip {
    Eigen::VectorXd x, y, m;
    double eval(double xq) const {
        const int n = static_cast<int>(x.size());
        int lo = 0, hi = n - 1;
        while (hi - lo > 1) {
            int mid = (lo + hi) / 2;
            (x[mid] <= xq ? lo : hi) = mid;
        }
        double h = x[lo + 1] - x[lo], t = (xq - x[lo]) / h;
        double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
        double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
        return h00 * y[lo] + h * h10 * m[lo] + h01 * y[lo + 1] + h * h11 * m[lo + 1];
    }
};

}  // namespace

double eval_W_scalar(const Params& p, double r) {
    return std::pow(1.0 + shape_s(p, r), -(p.d - 2.0) / (2.0 - p.b));
}

double eval_dW_scalar(const Params& p, double r) {
    double s = shape_s(p, r);
    return -(p.d - 2.0) * (s / r) *
           std::pow(1.0 + s, -(p.d - 2.0) / (2.0 - p.b) - 1.0);
}

RadialField eval_W(const Params& p, const GridPtr& grid) {
    RadialField W(grid);
    for (int j = 0; j < grid->n_cells; ++j) W.v[j] = eval_W_scalar(p, grid->r[j]);
    return W;
}

GroundStateBundle make_bundle(const Params& p, const GridPtr& grid) {
    GroundStateBundle b;
    b.params = p;
    b.grid = grid;
    b.W = eval_W(p, grid);
    b.W1 = RadialField(grid);
    b.Vpot = RadialField(grid);
    for (int j = 0; j < grid->n_cells; ++j) {
        double r = grid->r[j], s = shape_s(p, r);
        double W = b.W.v[j].real();
        b.W1.v[j] = 0.5 * (p.d - 2.0) * W * (1.0 - s) / (1.0 + s);
        b.Vpot.v[j] = std::pow(r, -p.b) * std::pow(W, p.alpha);
    }
    b.grad_norm_sq = h1_norm_sq(b.W, p.b);
    b.pot_integral = potential_integral(b.W, p);
    b.energy_W = 0.5 * b.grad_norm_sq - b.pot_integral / (p.alpha + 2.0);
    return b;
}

double energy(const RadialField& u, const Params& p) {
    return 0.5 * h1_norm_sq(u, p.b) - potential_integral(u, p) / (p.alpha + 2.0);
}

double distance_d(const RadialField& u, const GroundStateBundle& bundle) {
    return std::abs(h1_norm_sq(u, bundle.params.b) - bundle.grad_norm_sq);
}

double sharp_inequality_check(const RadialField& f, const GroundStateBundle& bundle) {
    const Params& p = bundle.params;
    double kin = h1_norm_sq(f, p.b);
    if (!(kin > 0.0)) throw std::invalid_argument("sharp_inequality_check: zero field");
    double pot = potential_integral(f, p);
    double half = 0.5 * (p.alpha + 2.0);
    return pot * std::pow(bundle.grad_norm_sq / kin, half) / bundle.pot_integral;
}

RadialField rescale(const RadialField& u, double theta, double mu) {
    if (!(mu > 0.0)) throw std::invalid_argument("rescale: mu > 0 required");
    const RadialGrid& g = *u.grid;
    const int n = g.n_cells;

    Pchip re, im;
    re.x = g.r.array().log();
    im.x = re.x;
    re.y = u.v.real();
    im.y = u.v.imag();
    re.m = pchip_slopes(re.x, re.y);
    im.m = pchip_slopes(im.x, im.y);

    const Complex phase = std::polar(std::pow(mu, -(g.d - 2.0) / 2.0), theta);
    const double r_last = g.r[n - 1];
    RadialField out(u.grid);
    for (int j = 0; j < n; ++j) {
        double rq = g.r[j] / mu;
        Complex val;
        if (rq <= g.r[0]) {
            // inside the first cell: radial regularity makes u flat to O(r^2);
            // evaluate the interpolant at the clamped edge
            val = {re.eval(std::log(g.r[0])), im.eval(std::log(g.r[0]))};
        } else if (rq >= r_last) {
            Complex ulast{re.y[n - 1], im.y[n - 1]};
            val = ulast * std::pow(rq / r_last, -(g.d - 2.0));
        } else {
            double xq = std::log(rq);
            val = {re.eval(xq), im.eval(xq)};
        }
        out.v[j] = phase * val;
    }
    return out;
}

}  // namespace incnls
