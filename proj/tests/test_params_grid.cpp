#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "incnls/calculus.hpp"
#include "incnls/grid.hpp"
#include "incnls/groundstate.hpp"
#include "incnls/params.hpp"

using namespace incnls;

TEST_CASE("parameter derivation and validity flags") {
    auto p = make_params(3, 0.3);
    CHECK(p.alpha == doctest::Approx((4.0 - 0.6) / 1.0).epsilon(1e-15));
    CHECK(p.gamma_t == doctest::Approx(2.0 * (p.alpha + 1.0)).epsilon(1e-15));
    // scaling relations hold to machine precision
    double lhs = (p.d + 2.0) / (2.0 * p.d);
    double rhs = p.b / p.d + p.alpha / p.p_x + 1.0 / p.rho_x;
    CHECK(std::abs(lhs - rhs) < 1e-14);
    CHECK(std::abs(0.5 - (p.alpha + 1.0) / p.gamma_t) < 1e-15);

    CHECK(make_params(3, 0.3).threshold_valid);   // b < 1/2
    CHECK_FALSE(make_params(3, 0.7).threshold_valid);
    CHECK(make_params(4, 0.9).threshold_valid);   // b < 1
    CHECK(make_params(5, 0.3).threshold_valid);   // b < 1/2
    CHECK_FALSE(make_params(5, 0.6).threshold_valid);
    // threshold-valid implies alpha >= 1
    CHECK(make_params(5, 0.49).alpha >= 1.0);

    CHECK_THROWS_AS(make_params(2, 0.3), std::invalid_argument);
    CHECK_THROWS_AS(make_params(6, 0.3), std::invalid_argument);
    CHECK_THROWS_AS(make_params(3, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_params(3, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(make_params(5, 2.5), std::invalid_argument);
}

TEST_CASE("sphere area") {
    CHECK(unit_sphere_area(3) == doctest::Approx(4.0 * M_PI).epsilon(1e-15));
    CHECK(unit_sphere_area(4) == doctest::Approx(2.0 * M_PI * M_PI).epsilon(1e-15));
    CHECK(unit_sphere_area(5) == doctest::Approx(8.0 * M_PI * M_PI / 3.0).epsilon(1e-14));
}

TEST_CASE("uniform grid placement and exact volume") {
    auto p = make_params(3, 0.3);
    auto g = make_grid(p, 16, 10.0, StretchSpec::uniform());
    CHECK(g->r[0] == doctest::Approx(10.0 / 32.0).epsilon(1e-15));

    auto gref = make_grid(p, 4096, 50.0);
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(gref->n_cells);
    double vol = integrate_cells(*gref, ones);
    CHECK(vol == doctest::Approx(50.0 * 50.0 * 50.0 / 3.0).epsilon(1e-10));

    CHECK_THROWS_AS(make_grid(p, 8, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(p, 64, 0.5), std::invalid_argument);
}

TEST_CASE("singular weight integration") {
    // int_0^1 r^{-0.4} r^2 dr = 1/(3-0.4)
    auto p = make_params(3, 0.4);
    auto g1 = make_grid(p, 4096, 1.0 + 1e-12);
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(g1->n_cells);
    double val = quad4(*g1, ones, -0.4);
    CHECK(val == doctest::Approx(1.0 / 2.6).epsilon(1e-6));
}

TEST_CASE("inner_h1 basics") {
    auto p = make_params(5, 0.4);
    auto g = make_grid(p, 2048, 100.0);
    auto W = eval_W(p, g);
    double k = inner_h1(W, W);
    CHECK(k > 0.0);

    RadialField zero(g);
    CHECK(inner_h1(W, zero) == 0.0);

    RadialField iW(g);
    iW.v = W.v * Complex(0.0, 1.0);
    CHECK(std::abs(inner_h1(W, iW)) < 1e-12 * k);

    // symmetry and bilinearity over the reals
    RadialField f(g), h(g);
    for (int j = 0; j < g->n_cells; ++j) {
        double r = g->r[j];
        f.v[j] = std::exp(-r * r) * Complex(1.0, 0.5);
        h.v[j] = r * std::exp(-0.5 * r * r);
    }
    CHECK(inner_h1(f, h) == doctest::Approx(inner_h1(h, f)).epsilon(1e-13));
    RadialField fh(g);
    fh.v = 2.0 * f.v + 3.0 * h.v;
    CHECK(inner_h1(fh, h) ==
          doctest::Approx(2.0 * inner_h1(f, h) + 3.0 * inner_h1(h, h)).epsilon(1e-12));
    CHECK(inner_h1(f, f) >= 0.0);

    auto g2 = make_grid(p, 1024, 100.0);
    RadialField other(g2);
    CHECK_THROWS_AS(inner_h1(f, other), std::invalid_argument);
}

TEST_CASE("norm_l2_weighted: mass and Pohozhaev quadrature") {
    auto p = make_params(3, 0.3);
    auto g = make_grid(p, 2048, 100.0);
    RadialField zero(g);
    CHECK(norm_l2_weighted(zero, 0.0) == 0.0);
    CHECK_THROWS_AS(norm_l2_weighted(zero, -3.0), std::domain_error);

    auto W = eval_W(p, g);
    double pot = std::pow(norm_l2_weighted(W, -p.b, p.alpha + 2.0), p.alpha + 2.0);
    double kin = h1_norm_sq(W, p.b);
    // tail-corrected Pohozhaev agreement (acceptance-level check lives in the
    // acceptance suite; here the pure-grid pieces must be close)
    CHECK(potential_integral(W, p) == doctest::Approx(kin).epsilon(1e-5));
    CHECK(pot > 0.0);
}

TEST_CASE("W in L2 only for d=5: grid-converged mass") {
    auto p = make_params(5, 0.3);
    auto g1 = make_grid(p, 1024, 100.0);
    auto g2 = make_grid(p, 2048, 100.0);
    double m1 = norm_l2_weighted(eval_W(p, g1), 0.0);
    double m2 = norm_l2_weighted(eval_W(p, g2), 0.0);
    CHECK(std::isfinite(m1));
    CHECK(m1 == doctest::Approx(m2).epsilon(1e-4));
}

TEST_CASE("quadrature convergence: Pohozhaev residual drops by >= 3x per doubling") {
    auto p = make_params(3, 0.3);
    // Exact value of int_0^R (|W'|^2 - r^{-b} W^{alpha+2}) r^{d-1} dr from the
    // analytic derivative on a fine grid (4th-order quadrature).
    auto exact_diff = [&](int n) {
        auto g = make_grid(p, n, 100.0);
        Eigen::VectorXd K(n), P(n);
        for (int j = 0; j < n; ++j) {
            double dw = eval_dW_scalar(p, g->r[j]);
            K[j] = dw * dw;
            P[j] = std::pow(eval_W_scalar(p, g->r[j]), p.alpha + 2.0);
        }
        return quad4(*g, K, 0.0) - quad4(*g, P, -p.b);
    };
    const double ref = exact_diff(8192);
    // contract-path residual with 3-point derivatives and midpoint weights
    auto resid = [&](int n) {
        auto g = make_grid(p, n, 100.0);
        auto W = eval_W(p, g);
        Eigen::VectorXcd Wp = deriv3(*g, W.v);
        double kin = 0.0, pot = 0.0;
        for (int j = 0; j < n; ++j) {
            kin += g->w[j] * std::norm(Wp[j]);
            pot += g->w[j] * std::pow(g->r[j], -p.b) *
                   std::pow(std::abs(W.v[j]), p.alpha + 2.0);
        }
        return std::abs((kin - pot) - ref);
    };
    double r512 = resid(512), r1024 = resid(1024), r2048 = resid(2048);
    CHECK(r512 / r1024 >= 3.0);
    CHECK(r1024 / r2048 >= 3.0);
}

TEST_CASE("purity: identical inputs give bit-identical outputs") {
    auto p = make_params(4, 0.3);
    auto g = make_grid(p, 512, 100.0);
    auto W = eval_W(p, g);
    double a = h1_norm_sq(W, p.b);
    double b = h1_norm_sq(W, p.b);
    CHECK(a == b);
    CHECK(inner_h1(W, W) == inner_h1(W, W));
}
