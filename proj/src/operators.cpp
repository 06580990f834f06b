#include "incnls/operators.hpp"

#include <cmath>
#include <stdexcept>

namespace incnls {

FvGeometry fv_geometry(const RadialGrid& g) {
    const int n = g.n_cells;
    FvGeometry geo;
    geo.S.resize(n + 1);
    geo.delta.resize(n + 1);
    for (int j = 0; j <= n; ++j) geo.S[j] = std::pow(g.edges[j], g.d - 1);
    geo.delta[0] = 0.0;
    for (int j = 1; j < n; ++j) geo.delta[j] = g.r[j] - g.r[j - 1];
    geo.delta[n] = g.r_max - g.r[n - 1];
    return geo;
}

OperatorMatrix assemble(const Params& p, const GridPtr& grid, OpKind kind, int ell) {
    if (ell < 0) throw std::invalid_argument("assemble: ell >= 0");
    OperatorMatrix op;
    op.kind = kind;
    op.sector_ell = ell;
    op.grid = grid;
    op.params = p;
    const double c = kind == OpKind::Lplus ? p.alpha + 1.0 : 1.0;
    const double mu = static_cast<double>(ell) * (ell + p.d - 2);
    const int n = grid->n_cells;
    op.pot.resize(n);
    for (int j = 0; j < n; ++j) {
        double r = grid->r[j];
        double V = std::pow(r, -p.b) * std::pow(eval_W_scalar(p, r), p.alpha);
        op.pot[j] = mu / (r * r) - c * V;
    }
    return op;
}

Eigen::VectorXd OperatorMatrix::apply(const Eigen::VectorXd& u, OuterBc bc) const {
    const RadialGrid& g = *grid;
    const int n = g.n_cells;
    const FvGeometry geo = fv_geometry(g);
    // fluxes S u' at the faces; S[0]=0 handles the origin
    Eigen::VectorXd flux = Eigen::VectorXd::Zero(n + 1);
    for (int j = 1; j < n; ++j)
        flux[j] = geo.S[j] * (u[j] - u[j - 1]) / geo.delta[j];
    if (bc == OuterBc::dirichlet) {
        flux[n] = geo.S[n] * (0.0 - u[n - 1]) / geo.delta[n];
    } else {
        // ghost from the two-power far-field model c1 r^{-(d-2)} + c2 r^{-(d-b)}
        // through the last two cells
        double rg = 2.0 * g.r_max - g.r[n - 1];
        double pw = g.d - 2.0, q = g.d - params.b;
        double r1 = g.r[n - 2], r2 = g.r[n - 1];
        Eigen::Matrix2d A;
        A << std::pow(r1, -pw), std::pow(r1, -q), std::pow(r2, -pw), std::pow(r2, -q);
        Eigen::Vector2d c = A.fullPivLu().solve(Eigen::Vector2d(u[n - 2], u[n - 1]));
        double ug = c[0] * std::pow(rg, -pw) + c[1] * std::pow(rg, -q);
        flux[n] = geo.S[n] * (ug - u[n - 1]) / (rg - g.r[n - 1]);
    }
    Eigen::VectorXd out(n);
    for (int j = 0; j < n; ++j)
        out[j] = -(flux[j + 1] - flux[j]) / g.w[j] + pot[j] * u[j];
    return out;
}

void OperatorMatrix::tridiag_hat(Eigen::VectorXd& diag, Eigen::VectorXd& offdiag) const {
    const RadialGrid& g = *grid;
    const int n = g.n_cells;
    const FvGeometry geo = fv_geometry(g);
    diag.resize(n);
    offdiag.resize(n - 1);
    for (int j = 0; j < n; ++j) {
        double k = geo.S[j + 1] / geo.delta[j + 1];
        if (j > 0) k += geo.S[j] / geo.delta[j];
        diag[j] = k / g.w[j] + pot[j];
    }
    for (int j = 0; j + 1 < n; ++j)
        offdiag[j] = -geo.S[j + 1] / (geo.delta[j + 1] * std::sqrt(g.w[j] * g.w[j + 1]));
}

Eigen::MatrixXd OperatorMatrix::dense_hat() const {
    Eigen::VectorXd d, e;
    tridiag_hat(d, e);
    const int n = static_cast<int>(d.size());
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j) M(j, j) = d[j];
    for (int j = 0; j + 1 < n; ++j) M(j, j + 1) = M(j + 1, j) = e[j];
    return M;
}

double dual_norm(const GridPtr& grid, const Eigen::VectorXd& e) {
    const RadialGrid& g = *grid;
    const int n = g.n_cells;
    OperatorMatrix op;
    op.grid = grid;
    op.pot = Eigen::VectorXd::Ones(n);
    Eigen::VectorXd diag, off;
    op.tridiag_hat(diag, off);
    const double omega = unit_sphere_area(g.d);
    Eigen::VectorXd rhs(n);
    for (int j = 0; j < n; ++j) rhs[j] = std::sqrt(omega * g.w[j]) * e[j];
    // LDL^T Thomas sweep on the SPD tridiagonal system
    Eigen::VectorXd dd(n), l(n - 1), y(n);
    dd[0] = diag[0];
    for (int j = 0; j + 1 < n; ++j) {
        l[j] = off[j] / dd[j];
        dd[j + 1] = diag[j + 1] - l[j] * off[j];
    }
    y[0] = rhs[0];
    for (int j = 1; j < n; ++j) y[j] = rhs[j] - l[j - 1] * y[j - 1];
    double val = 0.0;
    for (int j = 0; j < n; ++j) val += y[j] * y[j] / dd[j];
    return std::sqrt(std::max(val, 0.0));
}

double dirichlet_form(const RadialGrid& g, const Eigen::VectorXd& f,
                      const Eigen::VectorXd& h) {
    const int n = g.n_cells;
    const FvGeometry geo = fv_geometry(g);
    double acc = 0.0;
    for (int j = 1; j < n; ++j)
        acc += geo.S[j] * (f[j] - f[j - 1]) * (h[j] - h[j - 1]) / geo.delta[j];
    return unit_sphere_area(g.d) * acc;
}

double dirichlet_inner(const PairField& f, const PairField& g) {
    require_same_grid(f.grid, g.grid);
    return dirichlet_form(*f.grid, f.v1, g.v1) + dirichlet_form(*f.grid, f.v2, g.v2);
}

PairField apply_L(const PairField& v, const GroundStateBundle& bundle,
                  const Params& p, OuterBc bc) {
    require_same_grid(v.grid, bundle.grid);
    OperatorMatrix Lm = assemble(p, v.grid, OpKind::Lminus, 0);
    OperatorMatrix Lp = assemble(p, v.grid, OpKind::Lplus, 0);
    PairField out(v.grid);
    out.v1 = -Lm.apply(v.v2, bc);
    out.v2 = Lp.apply(v.v1, bc);
    return out;
}

namespace {
double kinetic_with_tail(const RadialField& f, double b) {
    double k = dirichlet_form(*f.grid, f.v.real(), f.v.real()) +
               dirichlet_form(*f.grid, f.v.imag(), f.v.imag());
    return k + unit_sphere_area(f.grid->d) * kinetic_tail(fit_tail(f, b), *f.grid, b);
}
}  // namespace

double quad_Q(const PairField& g, const GroundStateBundle& bundle, const Params& p) {
    require_same_grid(g.grid, bundle.grid);
    const RadialGrid& grid = *g.grid;
    RadialField f1(g.grid), f2(g.grid);
    f1.v.real() = g.v1;
    f2.v.real() = g.v2;
    double kin = kinetic_with_tail(f1, p.b) + kinetic_with_tail(f2, p.b);
    double potv = 0.0;
    for (int j = 0; j < grid.n_cells; ++j) {
        double V = bundle.Vpot.v[j].real();
        potv += grid.w[j] * V *
                ((p.alpha + 1.0) * g.v1[j] * g.v1[j] + g.v2[j] * g.v2[j]);
    }
    return 0.5 * kin - 0.5 * unit_sphere_area(grid.d) * potv;
}

double bilinear_B(const PairField& f, const PairField& g,
                  const GroundStateBundle& bundle, const Params& p) {
    require_same_grid(f.grid, g.grid);
    PairField s(f.grid), d(f.grid);
    s.v1 = f.v1 + g.v1;
    s.v2 = f.v2 + g.v2;
    d.v1 = f.v1 - g.v1;
    d.v2 = f.v2 - g.v2;
    return 0.25 * (quad_Q(s, bundle, p) - quad_Q(d, bundle, p));
}

Complex eval_J(Complex z, double alpha) {
    Complex w = 1.0 + z;
    double m2 = std::norm(w);
    Complex lead = m2 > 1e-24 ? std::pow(m2, 0.5 * alpha) * w : Complex(0.0, 0.0);
    return lead - 1.0 - 0.5 * (alpha + 2.0) * z - 0.5 * alpha * std::conj(z);
}

PairField remainder_R(const PairField& v, const GroundStateBundle& bundle,
                      const Params& p) {
    require_same_grid(v.grid, bundle.grid);
    const RadialGrid& g = *v.grid;
    PairField out(v.grid);
    for (int j = 0; j < g.n_cells; ++j) {
        double W = bundle.W.v[j].real();
        Complex z(v.v1[j] / W, v.v2[j] / W);
        Complex J = eval_J(z, p.alpha);
        double amp = std::pow(g.r[j], -p.b) * std::pow(W, p.alpha + 1.0);
        // -i (a+ib) = b - ia
        out.v1[j] = amp * J.imag();
        out.v2[j] = -amp * J.real();
    }
    return out;
}

namespace {
double gen_binom(double x, int k) {
    double acc = 1.0;
    for (int i = 0; i < k; ++i) acc *= (x - i) / (i + 1);
    return acc;
}
}  // namespace

std::map<std::pair<int, int>, double> series_J_coeffs(const Params& p,
                                                      int max_total_degree) {
    if (max_total_degree < 2 || max_total_degree > 8)
        throw std::invalid_argument("series_J_coeffs: degree in [2,8]");
    std::map<std::pair<int, int>, double> out;
    for (int j1 = 0; j1 <= max_total_degree; ++j1)
        for (int j2 = 0; j1 + j2 <= max_total_degree; ++j2) {
            if (j1 + j2 < 2) continue;
            out[{j1, j2}] = gen_binom(1.0 + 0.5 * p.alpha, j1) *
                            gen_binom(0.5 * p.alpha, j2);
        }
    return out;
}

PairField project_constraints(
    const PairField& f, const std::vector<PairField>& directions,
    const std::vector<std::function<double(const PairField&)>>& constraints) {
    const int m = static_cast<int>(directions.size());
    if (m != static_cast<int>(constraints.size()))
        throw std::invalid_argument("project_constraints: size mismatch");
    if (m == 0) return f;
    Eigen::MatrixXd M(m, m);
    Eigen::VectorXd c(m);
    for (int i = 0; i < m; ++i) {
        c[i] = constraints[i](f);
        for (int j = 0; j < m; ++j) M(i, j) = constraints[i](directions[j]);
    }
    Eigen::VectorXd lam = M.colPivHouseholderQr().solve(c);
    PairField out = f;
    for (int j = 0; j < m; ++j) {
        out.v1 -= lam[j] * directions[j].v1;
        out.v2 -= lam[j] * directions[j].v2;
    }
    return out;
}

}  // namespace incnls
