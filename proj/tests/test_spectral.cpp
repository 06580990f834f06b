#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "incnls/spectral.hpp"
#include "support/corpus.hpp"
#include "support/oracle_shooting.hpp"

using namespace incnls;

namespace {

struct Fixture {
    Params p;
    GridPtr grid;
    GroundStateBundle bundle;
    EigenBundle eig;
};

const Fixture& fix(int d, int n = 2048) {
    static std::map<std::pair<int, int>, Fixture> cache;
    auto key = std::pair{d, n};
    auto it = cache.find(key);
    if (it == cache.end()) {
        Fixture f{make_params(d, 0.3), nullptr, {}, {}};
        f.grid = make_grid(f.p, n, 100.0);
        f.bundle = make_bundle(f.p, f.grid);
        f.eig = compute_eigen(f.bundle, f.p, f.grid);
        it = cache.emplace(key, std::move(f)).first;
    }
    return it->second;
}

double pair_norm_l2(const PairField& f) {
    double acc = 0.0;
    for (int j = 0; j < f.n(); ++j)
        acc += f.grid->w[j] * (f.v1[j] * f.v1[j] + f.v2[j] * f.v2[j]);
    return std::sqrt(unit_sphere_area(f.grid->d) * acc);
}

// regression references measured at n=2048, r_max=100
const std::map<int, double> kE0Ref = {
    {3, 0.63590778}, {4, 0.23059991}, {5, 0.12339610}};

}  // namespace

TEST_CASE("eigenpair construction and residuals") {
    for (int d : {3, 4, 5}) {
        const auto& f = fix(d);
        CAPTURE(d);
        CAPTURE(f.eig.e0);
        CAPTURE(f.eig.residual_plus);
        CHECK(f.eig.e0 > 0.0);
        CHECK(f.eig.residual_plus <= 1e-6);
        CHECK(f.eig.sign_convention_ok);
        CHECK(f.eig.e0 == doctest::Approx(kE0Ref.at(d)).epsilon(1e-4));

        // exactly one negative eigenvalue of the product operator, up to the
        // rounding floor eps*||P|| of the dense product (the discrete zero
        // directions live there)
        CHECK(f.eig.p_min_eig < -1e-2);
        CHECK(f.eig.p_second_eig >= -0.05 * std::abs(f.eig.p_min_eig));

        // cross-check the second eigen relation with the operator module
        auto Lm = assemble(f.p, f.grid, OpKind::Lminus, 0);
        Eigen::VectorXd lhs =
            Lm.apply(f.eig.Y2.v.real()) + f.eig.e0 * f.eig.Y1.v.real();
        PairField t1(f.grid), t2(f.grid);
        t1.v1 = lhs;
        t2.v1 = f.eig.Y2.v.real();
        CHECK(pair_norm_l2(t1) <= 1e-6 * pair_norm_l2(t2));

        // the full matrix relation through apply_L (power-tail wall path)
        PairField y(f.grid, f.eig.Y1.v.real(), f.eig.Y2.v.real());
        PairField Ly = apply_L(y, f.bundle, f.p);
        Ly.v1 -= f.eig.e0 * y.v1;
        Ly.v2 -= f.eig.e0 * y.v2;
        CHECK(pair_norm_l2(Ly) <= 1e-6 * pair_norm_l2(y));

        // Q vanishes on the eigenfunction
        double q = quad_Q(y, f.bundle, f.p);
        CHECK(std::abs(q) <= 1e-6 * dirichlet_inner(y, y));
    }
}

TEST_CASE("two-resolution stability and boundedness") {
    for (int d : {3, 4, 5}) {
        const auto& hi = fix(d, 2048);
        const auto& lo = fix(d, 1024);
        CAPTURE(d);
        CHECK(std::abs(hi.eig.e0 - lo.eig.e0) <= 0.01 * hi.eig.e0);
        double mhi = std::max(hi.eig.Y1.v.cwiseAbs().maxCoeff(),
                              hi.eig.Y2.v.cwiseAbs().maxCoeff());
        double mlo = std::max(lo.eig.Y1.v.cwiseAbs().maxCoeff(),
                              lo.eig.Y2.v.cwiseAbs().maxCoeff());
        CHECK(mhi == doctest::Approx(mlo).epsilon(0.05));
    }
}

TEST_CASE("shooting oracle agrees with the matrix eigenvalue") {
    for (int d : {3, 4, 5}) {
        const auto& f = fix(d);
        auto roots = incnls_test::shooting_e0_roots(f.p, 0.05, 2.0);
        CAPTURE(d);
        REQUIRE(!roots.empty());
        double best = 1e300;
        for (double r : roots) best = std::min(best, std::abs(r - f.eig.e0));
        CHECK(best <= 0.01 * f.eig.e0);
    }
}

TEST_CASE("eigenfunction decays faster than any resolvable power") {
    std::vector<double> Rs = {12.0, 24.0, 48.0};
    for (int d : {3, 4, 5}) {
        const auto& f = fix(d);
        auto rep = eigen_decay_check(f.eig, Rs);
        CAPTURE(d);
        CAPTURE(rep.slope);
        CHECK(rep.slope < -4.0);

        // calibration: a pure power r^{-(d-2)} has annulus slope (4-d)/2
        RadialField pw(f.grid);
        for (int j = 0; j < f.grid->n_cells; ++j)
            pw.v[j] = std::pow(f.grid->r[j], -(d - 2.0));
        auto prep = annulus_decay(pw, Rs);
        CHECK(std::abs(prep.slope - 0.5 * (4 - d)) <= 0.02);

        // W is polynomial (preasymptotic below r~30, hence the loose window)
        // and decays strictly slower than the eigenfunction
        auto wrep = annulus_decay(f.bundle.W, Rs);
        CAPTURE(wrep.slope);
        CHECK(wrep.slope > -2.5);
        CHECK(wrep.slope < 1.0);
        CHECK(rep.slope < wrep.slope - 2.0);

        // compactly supported bump: -inf sentinel past the support
        RadialField bump(f.grid);
        for (int j = 0; j < f.grid->n_cells; ++j)
            bump.v[j] = f.grid->r[j] < 3.0 ? 1.0 : 0.0;
        auto brep = annulus_decay(bump, {8.0, 16.0});
        CHECK(std::isinf(brep.slope));
        CHECK(brep.slope < 0.0);
        CHECK_THROWS_AS(annulus_decay(bump, {60.0}), std::invalid_argument);
    }
}

TEST_CASE("Frobenius exponents of the l=1 kernel ODE") {
    for (int d : {3, 4, 5}) {
        auto p = make_params(d, 0.3);
        auto rep = kernel_ode_asymptotics(p);
        CAPTURE(d);
        CHECK(rep.admissible_at_zero == doctest::Approx(1.0).epsilon(0.02));
        CHECK(rep.inadmissible_at_zero ==
              doctest::Approx(-(d - 1.0)).epsilon(0.02));
        CHECK(rep.admissible_at_infinity ==
              doctest::Approx(-(d - 1.0)).epsilon(0.05));
    }
}

TEST_CASE("real spectrum of the full matrix is {-e0, near-0, e0}") {
    for (int d : {3, 4, 5}) {
        const auto& f = fix(d);
        auto g = make_grid(f.p, 320, 100.0);
        auto scan = spectrum_scan(f.p, g);
        CAPTURE(d);
        // +-e0 present
        double best_p = 1e300, best_m = 1e300;
        for (double r : scan.real_eigs) {
            if (r > 0) best_p = std::min(best_p, std::abs(r - f.eig.e0));
            if (r < 0) best_m = std::min(best_m, std::abs(r + f.eig.e0));
        }
        CHECK(best_p <= 0.01 * f.eig.e0);
        CHECK(best_m <= 0.01 * f.eig.e0);
        // zero limit point approached by at least a conjugate pair
        int near_zero = 0;
        for (auto z : scan.eigs)
            if (std::abs(z) <= 1e-3) ++near_zero;
        CHECK(near_zero >= 2);
        // no stray real eigenvalue in the gap (margin: discretization
        // scatter threshold 1e-3, reported above)
        for (double r : scan.real_eigs)
            CHECK((std::abs(r) <= 1e-3 || std::abs(r) >= 0.9 * f.eig.e0));
    }
}

TEST_CASE("coercivity of Q on the B-orthogonal complement") {
    // frozen regression value: min ratio over this corpus is 0.2303 (first
    // measurement), asserted with headroom
    const double frozen_c = 0.15;
    const auto& f = fix(3);
    PairField iw(f.grid), w1(f.grid), yp(f.grid), ym(f.grid);
    iw.v2 = f.bundle.W.v.real();
    w1.v1 = f.bundle.W1.v.real();
    yp.v1 = f.eig.Y1.v.real();
    yp.v2 = f.eig.Y2.v.real();
    ym.v1 = f.eig.Y1.v.real();
    ym.v2 = -f.eig.Y2.v.real();
    std::vector<PairField> dirs = {iw, w1, yp, ym};
    std::vector<std::function<double(const PairField&)>> cons = {
        [&](const PairField& g) { return dirichlet_inner(g, iw); },
        [&](const PairField& g) { return dirichlet_inner(g, w1); },
        [&](const PairField& g) { return bilinear_B(yp, g, f.bundle, f.p); },
        [&](const PairField& g) { return bilinear_B(ym, g, f.bundle, f.p); }};

    auto corpus = incnls_test::make_corpus(f.grid, 50, 31u);
    double cmin = 1e300;
    for (const auto& u : corpus) {
        PairField g = project_constraints(PairField::from_complex(u), dirs, cons);
        double nn = dirichlet_inner(g, g);
        if (nn <= 0.0) continue;
        double ratio = quad_Q(g, f.bundle, f.p) / nn;
        cmin = std::min(cmin, ratio);
        CHECK(ratio >= frozen_c);
    }
    MESSAGE("min B-orthogonal coercivity ratio: " << cmin);

    // B does not degenerate between the two eigen directions
    CHECK(std::abs(bilinear_B(yp, ym, f.bundle, f.p)) > 1e-6);
}
