#include "incnls/calculus.hpp"

#include <cmath>
#include <memory>
#include <mutex>
#include <unordered_map>

namespace incnls {

namespace {

// First-derivative weights at x=0 for the given relative nodes.
Eigen::VectorXd fd_weights(const Eigen::VectorXd& t) {
    const int m = static_cast<int>(t.size());
    Eigen::MatrixXd V(m, m);
    for (int k = 0; k < m; ++k)
        for (int i = 0; i < m; ++i) V(k, i) = std::pow(t[i], k);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    if (m > 1) rhs[1] = 1.0;
    return V.fullPivLu().solve(rhs);
}

struct Stencil {
    Eigen::MatrixXi idx;  // n x width
    Eigen::MatrixXd wgt;  // n x width
};

// Build a derivative stencil of the requested half-width with even reflection
// across the origin and one-sided windows at the outer end.
Stencil build_stencil(const RadialGrid& g, int half) {
    const int n = g.n_cells, width = 2 * half + 1;
    Stencil s;
    s.idx = Eigen::MatrixXi::Zero(n, width);
    s.wgt = Eigen::MatrixXd::Zero(n, width);
    for (int j = 0; j < n; ++j) {
        int lo = j - half, hi = j + half;
        if (hi >= n) {  // one-sided at the wall
            hi = n - 1;
            lo = n - width;
        }
        Eigen::VectorXd t(width);
        int indices[16];
        for (int k = 0; k < width; ++k) {
            int i = lo + k;
            if (i < 0) {  // ghost: f(-r) = f(r)
                t[k] = -g.r[-i - 1] - g.r[j];
                indices[k] = -i - 1;
            } else {
                t[k] = g.r[i] - g.r[j];
                indices[k] = i;
            }
        }
        Eigen::VectorXd wg = fd_weights(t);
        // fold duplicate indices (reflection can repeat a sample)
        for (int k = 0; k < width; ++k) {
            s.idx(j, k) = indices[k];
            s.wgt(j, k) = wg[k];
        }
    }
    return s;
}

struct GridOps {
    Stencil d3, d5;
    std::vector<Eigen::Matrix4d> cubic_inv;  // per-cell window solve
    std::vector<int> cubic_start;
};

const GridOps& ops_for(const RadialGrid& g) {
    static std::mutex mu;
    static std::unordered_map<std::string, std::unique_ptr<GridOps>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[g.key()];
    if (!slot) {
        auto ops = std::make_unique<GridOps>();
        ops->d3 = build_stencil(g, 1);
        ops->d5 = build_stencil(g, 2);
        const int n = g.n_cells;
        ops->cubic_inv.resize(n);
        ops->cubic_start.resize(n);
        for (int j = 0; j < n; ++j) {
            int s = std::min(std::max(j - 1, 0), n - 4);
            ops->cubic_start[j] = s;
            Eigen::Matrix4d A;
            for (int i = 0; i < 4; ++i) {
                double t = g.r[s + i] - g.r[j];
                A(i, 0) = 1.0;
                A(i, 1) = t;
                A(i, 2) = t * t;
                A(i, 3) = t * t * t;
            }
            ops->cubic_inv[j] = A.inverse();
        }
        slot = std::move(ops);
    }
    return *slot;
}

template <typename Vec>
Vec apply_stencil(const Stencil& s, const Vec& f) {
    const int n = static_cast<int>(f.size()), width = s.idx.cols();
    Vec out(n);
    for (int j = 0; j < n; ++j) {
        typename Vec::Scalar acc{};
        for (int k = 0; k < width; ++k) acc += s.wgt(j, k) * f[s.idx(j, k)];
        out[j] = acc;
    }
    return out;
}

double binom(int k, int i) {
    static const double table[4][4] = {
        {1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
    return table[k][i];
}

// Gauss-Legendre nodes/weights on [0,1].
void gauss01(int n, Eigen::VectorXd& x, Eigen::VectorXd& w) {
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 0; k < n; ++k) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k + 1.0) * z * p1 - k * p2) / (k + 1);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = 0.5 * (1.0 - z);
        w[i] = 1.0 / ((1.0 - z * z) * pp * pp);
    }
}

}  // namespace

Eigen::VectorXcd deriv3(const RadialGrid& g, const Eigen::VectorXcd& f) {
    return apply_stencil(ops_for(g).d3, f);
}
Eigen::VectorXcd deriv5(const RadialGrid& g, const Eigen::VectorXcd& f) {
    return apply_stencil(ops_for(g).d5, f);
}
Eigen::VectorXd deriv3(const RadialGrid& g, const Eigen::VectorXd& f) {
    return apply_stencil(ops_for(g).d3, f);
}
Eigen::VectorXd deriv5(const RadialGrid& g, const Eigen::VectorXd& f) {
    return apply_stencil(ops_for(g).d5, f);
}

double integrate_cells(const RadialGrid& g, const Eigen::VectorXd& F) {
    return g.w.dot(F);
}

double quad4(const RadialGrid& g, const Eigen::VectorXd& F, double weight_exp) {
    const double m = g.d - 1 + weight_exp;  // full power of r in the measure
    if (!(m + 1.0 > 0.0)) throw std::domain_error("quad4: non-integrable weight");
    const auto& ops = ops_for(g);
    const int n = g.n_cells;

    // edge^(m+1+i) for i=0..3, built incrementally
    Eigen::MatrixXd ep(n + 1, 4);
    for (int j = 0; j <= n; ++j) {
        double e = g.edges[j];
        ep(j, 0) = (e > 0.0) ? std::pow(e, m + 1.0) : 0.0;
        for (int i = 1; i < 4; ++i) ep(j, i) = ep(j, i - 1) * e;
    }

    double total = 0.0;
    Eigen::Vector4d fw, c, M;
    for (int j = 0; j < n; ++j) {
        int s = ops.cubic_start[j];
        for (int i = 0; i < 4; ++i) fw[i] = F[s + i];
        c = ops.cubic_inv[j] * fw;
        const double rc = g.r[j];
        for (int k = 0; k < 4; ++k) {
            // M_k = sum_i C(k,i) (-rc)^(k-i) (e1^(i+m+1)-e0^(i+m+1))/(i+m+1)
            double term = 0.0, powneg = 1.0;
            for (int i = k; i >= 0; --i) {
                term += binom(k, i) * powneg * (ep(j + 1, i) - ep(j, i)) / (i + m + 1.0);
                powneg *= -rc;
            }
            M[k] = term;
        }
        total += c.dot(M);
    }
    return total;
}

TailFit fit_tail(const RadialField& f, double b) {
    const RadialGrid& g = *f.grid;
    TailFit out;
    const double lo = 0.55 * g.r_max, hi = 0.95 * g.r_max;
    std::vector<int> rows;
    for (int j = 0; j < g.n_cells; ++j)
        if (g.r[j] >= lo && g.r[j] <= hi) rows.push_back(j);
    if (rows.size() < 8) return out;

    const double p = g.d - 2.0, q = g.d - b;
    Eigen::MatrixXcd A(rows.size(), 2);
    Eigen::VectorXcd y(rows.size());
    double ymax = 0.0;
    for (size_t i = 0; i < rows.size(); ++i) {
        double r = g.r[rows[i]];
        A(i, 0) = std::pow(r, -p);
        A(i, 1) = std::pow(r, -q);
        y[i] = f.v[rows[i]];
        ymax = std::max(ymax, std::abs(y[i]));
    }
    if (ymax == 0.0) {
        out.ok = true;
        return out;
    }
    Eigen::Vector2cd c = A.colPivHouseholderQr().solve(y);
    double rel = (A * c - y).norm() / y.norm();
    if (rel < 0.05) {
        out.c1 = c[0];
        out.c2 = c[1];
        out.ok = true;
    }
    return out;
}

double kinetic_tail(const TailFit& t, const RadialGrid& g, double b) {
    if (!t.ok) return 0.0;
    const double p = g.d - 2.0, q = g.d - b, R = g.r_max;
    const double a11 = std::norm(t.c1), a22 = std::norm(t.c2);
    const double a12 = (t.c1 * std::conj(t.c2)).real();
    return p * p * a11 * std::pow(R, -(2.0 * p + 2.0 - g.d)) / (2.0 * p + 2.0 - g.d) +
           2.0 * p * q * a12 * std::pow(R, -(p + q + 2.0 - g.d)) / (p + q + 2.0 - g.d) +
           q * q * a22 * std::pow(R, -(2.0 * q + 2.0 - g.d)) / (2.0 * q + 2.0 - g.d);
}

double potential_tail(const TailFit& t, const RadialGrid& g, const Params& prm) {
    if (!t.ok || (t.c1 == Complex{} && t.c2 == Complex{})) return 0.0;
    static Eigen::VectorXd xs, ws;
    if (xs.size() == 0) gauss01(32, xs, ws);
    const double p = g.d - 2.0, q = g.d - prm.b, R = g.r_max;
    double acc = 0.0;
    for (int i = 0; i < xs.size(); ++i) {
        double u = xs[i];
        if (u <= 0.0) continue;
        double r = R / u;
        double fm = std::abs(t.c1 * std::pow(r, -p) + t.c2 * std::pow(r, -q));
        acc += ws[i] * std::pow(fm, prm.alpha + 2.0) *
               std::pow(r, g.d - 1.0 - prm.b) * R / (u * u);
    }
    return acc;
}

double inner_h1(const RadialField& f, const RadialField& g) {
    require_same_grid(f.grid, g.grid);
    const RadialGrid& gr = *f.grid;
    Eigen::VectorXcd fp = deriv3(gr, f.v), gp = deriv3(gr, g.v);
    double acc = 0.0;
    for (int j = 0; j < gr.n_cells; ++j)
        acc += gr.w[j] * (fp[j] * std::conj(gp[j])).real();
    return unit_sphere_area(gr.d) * acc;
}

double h1_norm_sq(const RadialField& f, double b) {
    const RadialGrid& g = *f.grid;
    Eigen::VectorXcd fp = deriv5(g, f.v);
    Eigen::VectorXd F = fp.cwiseAbs2();
    TailFit t = fit_tail(f, b);
    return unit_sphere_area(g.d) * (quad4(g, F, 0.0) + kinetic_tail(t, g, b));
}

double norm_l2_weighted(const RadialField& f, double weight_exp, double q) {
    if (!(weight_exp > 1.0 - f.grid->d))
        throw std::domain_error("norm_l2_weighted: non-integrable weight");
    Eigen::VectorXd F(f.n());
    for (int j = 0; j < f.n(); ++j) F[j] = std::pow(std::abs(f.v[j]), q);
    double val = unit_sphere_area(f.grid->d) * quad4(*f.grid, F, weight_exp);
    return std::pow(std::max(val, 0.0), 1.0 / q);
}

double potential_integral(const RadialField& f, const Params& p) {
    Eigen::VectorXd F(f.n());
    for (int j = 0; j < f.n(); ++j)
        F[j] = std::pow(std::abs(f.v[j]), p.alpha + 2.0);
    TailFit t = fit_tail(f, p.b);
    return unit_sphere_area(f.grid->d) *
           (quad4(*f.grid, F, -p.b) + potential_tail(t, *f.grid, p));
}

}  // namespace incnls
