#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "incnls/groundstate.hpp"
#include "incnls/lorentz.hpp"
#include "support/corpus.hpp"

using namespace incnls;

namespace {
const Params P3 = make_params(3, 0.3);
GridPtr grid3() {
    static GridPtr g = make_grid(P3, 2048, 100.0);
    return g;
}
}

TEST_CASE("rearrangement of an indicator and of a decreasing function") {
    auto g = grid3();
    RadialField ind(g);
    for (int j = 0; j < g->n_cells; ++j) ind.v[j] = g->r[j] < 1.0 ? 1.0 : 0.0;
    auto fs = decreasing_rearrangement(ind);
    double volball = unit_sphere_area(3) / 3.0;
    for (int k = 0; k < fs.s.size(); ++k) {
        if (fs.vals[k] > 0.5) CHECK(fs.s[k] <= volball * 1.01);
        if (fs.s[k] > volball * 1.01) CHECK(fs.vals[k] == 0.0);
    }

    // strictly decreasing radial f: f*(vol of ball radius r) = f(r)
    auto W = eval_W(P3, g);
    auto ws = decreasing_rearrangement(W);
    for (int k : {10, 500, 1500}) {
        double s = ws.s[k];
        double r = std::cbrt(3.0 * s / unit_sphere_area(3));
        CHECK(ws.vals[k] == doctest::Approx(eval_W_scalar(P3, r)).epsilon(2e-3));
    }
}

TEST_CASE("rearrangement of the truncated power weight matches the analytic inverse") {
    auto g = grid3();
    RadialField f(g);
    const double R = 10.0;
    for (int j = 0; j < g->n_cells; ++j)
        f.v[j] = g->r[j] < R ? std::pow(g->r[j], -P3.b) : 0.0;
    auto fs = decreasing_rearrangement(f);
    double volb = unit_sphere_area(3) / 3.0;
    for (int k = 100; k < 1000; k += 100) {
        double s = fs.s[k];
        if (s >= volb * R * R * R) break;
        double expect = std::pow(volb / s, P3.b / 3.0);
        CHECK(fs.vals[k] == doctest::Approx(expect).epsilon(5e-3));
    }
}

TEST_CASE("L^{r,r} recovers L^r") {
    auto g = grid3();
    auto corpus = incnls_test::make_corpus(g, 10, 11u);
    for (double r : {2.0, 3.5}) {
        for (const auto& f : corpus) {
            double lz = lorentz_norm(f, {r, r});
            // discrete L^r built from the same cell decomposition
            double acc = 0.0;
            for (int j = 0; j < f.n(); ++j)
                acc += g->w[j] * std::pow(std::abs(f.v[j]), r);
            double lr = std::pow(unit_sphere_area(3) * acc, 1.0 / r);
            if (lr > 0.0) CHECK(std::abs(lz - lr) / lr <= 1e-8);
        }
    }
}

TEST_CASE("weak norm of the singular weight") {
    for (int d = 3; d <= 5; ++d) {
        auto p = make_params(d, 0.3);
        double volb = unit_sphere_area(d) / d;
        double exact = std::pow(volb, p.b / d);
        CHECK(std::abs(weak_norm_power_weight(p) - exact) <= 1e-10 * exact);

        auto g = make_grid(p, 2048, 100.0);
        RadialField f(g);
        for (int j = 0; j < g->n_cells; ++j) f.v[j] = std::pow(g->r[j], -p.b);
        double grid_val = lorentz_norm(f, {d / p.b, LorentzSpec::infinity()});
        CHECK(grid_val == doctest::Approx(exact).epsilon(1e-3));
    }
}

TEST_CASE("power identity |f|^theta") {
    auto g = grid3();
    auto corpus = incnls_test::make_corpus(g, 5, 22u);
    const double theta = 2.0, r = 3.0, rho = 2.0;
    for (const auto& f : corpus) {
        RadialField fsq(g);
        for (int j = 0; j < f.n(); ++j)
            fsq.v[j] = std::abs(f.v[j]) * std::abs(f.v[j]);
        double lhs = lorentz_norm(fsq, {r, rho});
        double rhs = std::pow(lorentz_norm(f, {theta * r, theta * rho}), theta);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
}

TEST_CASE("equimeasurability: rearrangement preserves L^q norms") {
    auto g = grid3();
    auto corpus = incnls_test::make_corpus(g, 5, 33u);
    for (const auto& f : corpus) {
        auto fs = decreasing_rearrangement(f);
        for (double q : {2.0, 4.0}) {
            double direct = 0.0;
            for (int j = 0; j < f.n(); ++j)
                direct += unit_sphere_area(3) * g->w[j] * std::pow(std::abs(f.v[j]), q);
            double rearr = 0.0, prev = 0.0;
            for (int k = 0; k < fs.s.size(); ++k) {
                rearr += std::pow(fs.vals[k], q) * (fs.s[k] - prev);
                prev = fs.s[k];
            }
            CHECK(direct == doctest::Approx(rearr).epsilon(1e-12));
        }
    }
}

TEST_CASE("Lorentz Holder inequality with fitted headroom") {
    auto g = grid3();
    auto corpus = incnls_test::make_corpus(g, 20, 44u);
    // 1/r = 1/r1 + 1/r2, 1/rho = 1/rho1 + 1/rho2
    const LorentzSpec s1{4.0, 4.0}, s2{4.0, 4.0}, s{2.0, 2.0};
    // constant fitted once on this corpus (max observed ratio 1.0 within
    // rounding; the sharp constant for this split is ~1), asserted with 2x
    const double fitted_C = 1.0;
    for (size_t i = 0; i + 1 < corpus.size(); i += 2) {
        const auto& f = corpus[i];
        const auto& h = corpus[i + 1];
        RadialField fh(g);
        for (int j = 0; j < f.n(); ++j) fh.v[j] = f.v[j] * h.v[j];
        double lhs = lorentz_norm(fh, s);
        double rhs = lorentz_norm(f, s1) * lorentz_norm(h, s2);
        if (rhs > 0.0) CHECK(lhs <= 2.0 * fitted_C * rhs);
    }
}

TEST_CASE("monotonicity in the secondary exponent") {
    auto g = grid3();
    auto corpus = incnls_test::make_corpus(g, 10, 55u);
    for (const auto& f : corpus) {
        double n1 = lorentz_norm(f, {3.0, 1.5});
        double n2 = lorentz_norm(f, {3.0, 4.0});
        double ninf = lorentz_norm(f, {3.0, LorentzSpec::infinity()});
        // L^{r,rho1} embeds in L^{r,rho2} for rho1 < rho2; discrete check with
        // constant 1 holds for step rearrangements
        CHECK(n2 <= n1 * (1.0 + 1e-12));
        CHECK(ninf <= n2 * (1.0 + 1e-12));
    }
}

TEST_CASE("space-time norms") {
    auto g = grid3();
    RadialField zero(g);
    std::vector<RadialField> zt(4, zero);
    CHECK(spacetime_norm(zt, 0.25, SpaceTimeKind::S, P3) == 0.0);
    CHECK_THROWS_AS(spacetime_norm({}, 0.1, SpaceTimeKind::S, P3),
                    std::invalid_argument);

    // constant-in-time snapshot over T: T^{1/gamma} * spatial
    auto W = eval_W(P3, g);
    int m = 8;
    double T = 2.0, dt = T / m;
    std::vector<RadialField> wt(m, W);
    double spatial = lorentz_norm(W, {P3.p_x, 2.0});
    double expect = std::pow(T, 1.0 / P3.gamma_t) * spatial;
    CHECK(spacetime_norm(wt, dt, SpaceTimeKind::S, P3) ==
          doctest::Approx(expect).epsilon(1e-12));
    // and the S norm grows like T^{1/gamma}
    std::vector<RadialField> wt2(2 * m, W);
    CHECK(spacetime_norm(wt2, dt, SpaceTimeKind::S, P3) ==
          doctest::Approx(std::pow(2.0, 1.0 / P3.gamma_t) * expect).epsilon(1e-12));

    CHECK(spacetime_norm(wt, dt, SpaceTimeKind::Z, P3) > 0.0);
    CHECK(spacetime_norm(wt, dt, SpaceTimeKind::N, P3) > 0.0);
}
