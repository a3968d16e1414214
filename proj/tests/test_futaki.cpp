#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"

#include "calabi/energy.hpp"
#include "calabi/futaki.hpp"
#include "test_support.hpp"

using namespace calabi;

TEST_CASE("pl convex validation and evaluation") {
    PiecewiseLinearConvex h = make_pl_convex({0.0, 1.0, 3.0}, {1.0, 0.0, 2.0});
    CHECK(pl_value(h, 0.5) == doctest::Approx(0.5));
    CHECK(pl_value(h, 2.0) == doctest::Approx(1.0));
    CHECK(pl_integral(h) == doctest::Approx(0.5 + 2.0));
    CHECK_THROWS_AS(make_pl_convex({0.0, 1.0, 2.0}, {0.0, 1.0, 0.0}),
                    std::invalid_argument);  // concave kink
    CHECK_THROWS_AS(make_pl_convex({0.5, 1.0}, {0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("Futaki invariant of constants vanishes") {
    for (double m : {1.0, 5.0, 24.0}) {
        PiecewiseLinearConvex one = make_pl_convex({0.0, m}, {1.0, 1.0});
        CHECK(std::abs(futaki_invariant(one, m)) < 1e-12);
    }
}

TEST_CASE("Futaki invariant of h = tau at m = 2") {
    // S_hat(2) = 0, so F = 0 + 3*2 - 2*2 = 2
    PiecewiseLinearConvex id = make_pl_convex({0.0, 2.0}, {0.0, 2.0});
    CHECK(futaki_invariant(id, 2.0) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("Futaki norm") {
    SUBCASE("constants have zero norm") {
        PiecewiseLinearConvex c = make_pl_convex({0.0, 3.0}, {2.5, 2.5});
        CHECK(futaki_norm(c, 3.0) == doctest::Approx(0.0));
    }
    SUBCASE("h = tau at m = 2 against the hand computation") {
        // hbar = 7/6 and the centered square integral is 11/9
        PiecewiseLinearConvex id = make_pl_convex({0.0, 2.0}, {0.0, 2.0});
        CHECK(futaki_norm(id, 2.0) ==
              doctest::Approx(std::sqrt(11.0 / 9.0)).epsilon(1e-14));
    }
    SUBCASE("norm of -S equals the weighted deviation norm") {
        Grid g = make_grid(24.0, 4097);
        Profile mn = minimizer(24.0, g);
        ScalarField s = scalar_curvature(mn);
        ScalarField neg{mn.grid, s.values};
        for (double& v : neg.values) v = -v;
        CHECK(futaki_norm(neg, 24.0) ==
              doctest::Approx(s_deviation_norm(mn)).epsilon(1e-10));
    }
}

TEST_CASE("F(-S(minimizer)) = -||S - S_hat||^2") {
    for (double m : {24.0, 53.2}) {
        Grid g = make_grid(m, 16385);
        Profile mn = minimizer(m, g);
        ScalarField s = scalar_curvature(mn);
        ScalarField neg{mn.grid, s.values};
        for (double& v : neg.values) v = -v;
        const double dev = s_deviation_norm(mn);
        CHECK(futaki_invariant(neg, m) ==
              doctest::Approx(-dev * dev).epsilon(1e-6));
    }
}

TEST_CASE("integral representation agrees with the direct formula") {
    for (double m : {17.0, 24.0, 53.2}) {
        Grid g = make_grid(m, 32769);
        Profile mn = minimizer(m, g);
        ScalarField s = scalar_curvature(mn);
        ScalarField neg{mn.grid, s.values};
        for (double& v : neg.values) v = -v;
        FutakiIntegral fi = futaki_via_integral(neg, mn);
        CHECK(fi.hypothesis_ok);
        CHECK(fi.value == doctest::Approx(futaki_invariant(neg, m)).epsilon(2e-6));
    }
}

TEST_CASE("integral representation flags kinks off the zero set") {
    Grid g = make_grid(10.0, 8193);
    Profile p = extremal_profile(10.0, g);
    // kink at tau = 5 where phi > 0
    PiecewiseLinearConvex kinked =
        make_pl_convex({0.0, 5.0, 10.0}, {0.0, 0.0, 5.0});
    FutakiIntegral fi = futaki_via_integral(kinked, p);
    CHECK_FALSE(fi.hypothesis_ok);

    // mean-zero integrand: F of a constant through the integral is ~0
    PiecewiseLinearConvex one = make_pl_convex({0.0, 10.0}, {1.0, 1.0});
    CHECK(std::abs(futaki_via_integral(one, p).value) < 1e-6);
}

TEST_CASE("linearity and invariance of the Futaki data") {
    std::mt19937_64 rng(77);
    const double m = 24.0;
    for (int t = 0; t < 20; ++t) {
        PiecewiseLinearConvex h = testsup::random_pl_convex(m, rng);
        const double f = futaki_invariant(h, m);
        const double norm = futaki_norm(h, m);

        // F(h + const) = F(h); the norm is unchanged as well
        PiecewiseLinearConvex shifted = h;
        for (double& v : shifted.values) v += 3.7;
        CHECK(futaki_invariant(shifted, m) == doctest::Approx(f).epsilon(1e-9));
        CHECK(futaki_norm(shifted, m) == doctest::Approx(norm).epsilon(1e-9));

        // positive scaling leaves the ratio invariant
        PiecewiseLinearConvex scaled = h;
        for (double& v : scaled.values) v *= 2.5;
        CHECK(futaki_invariant(scaled, m) == doctest::Approx(2.5 * f).epsilon(1e-9));
        if (norm > 1e-9)
            CHECK(futaki_invariant(scaled, m) / futaki_norm(scaled, m) ==
                  doctest::Approx(f / norm).epsilon(1e-9));
    }
}

TEST_CASE("Futaki invariant is linear under convex combinations") {
    std::mt19937_64 rng(123);
    const double m = 10.0;
    for (int t = 0; t < 10; ++t) {
        PiecewiseLinearConvex h1 = testsup::random_pl_convex(m, rng);
        PiecewiseLinearConvex h2 = testsup::random_pl_convex(m, rng);
        const double a = 0.7, b = 1.9;  // nonnegative weights keep convexity
        // merge breakpoints and combine values
        std::vector<double> bp = h1.breakpoints;
        bp.insert(bp.end(), h2.breakpoints.begin(), h2.breakpoints.end());
        std::sort(bp.begin(), bp.end());
        bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
        std::vector<double> vals(bp.size());
        for (size_t i = 0; i < bp.size(); ++i)
            vals[i] = a * pl_value(h1, bp[i]) + b * pl_value(h2, bp[i]);
        PiecewiseLinearConvex comb = make_pl_convex(bp, vals, 1e-9);
        CHECK(futaki_invariant(comb, m) ==
              doctest::Approx(a * futaki_invariant(h1, m) +
                              b * futaki_invariant(h2, m))
                  .epsilon(1e-10));
    }
}

TEST_CASE("approximate_neg_S") {
    SUBCASE("k=2 is the chord") {
        Grid g = make_grid(24.0, 2049);
        Profile mn = minimizer(24.0, g);
        PiecewiseLinearConvex h = approximate_neg_S(mn, 2);
        ScalarField s = scalar_curvature(mn);
        CHECK(pl_value(h, 0.0) == doctest::Approx(-s.values.front()));
        CHECK(pl_value(h, 24.0) == doctest::Approx(-s.values.back()));
    }
    SUBCASE("affine curvature is reproduced exactly") {
        Grid g = make_grid(10.0, 1025);
        Profile p = extremal_profile(10.0, g);
        PiecewiseLinearConvex h = approximate_neg_S(p, 7);
        ScalarField s = scalar_curvature(p);
        for (int i = 0; i < g.n; i += 100)
            CHECK(pl_value(h, g.tau[i]) ==
                  doctest::Approx(-s.values[i]).epsilon(1e-4));
    }
    SUBCASE("C0 error shrinks with k") {
        Grid g = make_grid(24.0, 2049);
        Profile mn = minimizer(24.0, g);
        ScalarField s = scalar_curvature(mn);
        auto c0_err = [&](int k) {
            PiecewiseLinearConvex h = approximate_neg_S(mn, k);
            double worst = 0.0;
            for (int i = 0; i < mn.grid.n; ++i)
                worst = std::max(worst, std::abs(pl_value(h, mn.grid.tau[i]) +
                                                 s.values[i]));
            return worst;
        };
        const double osc = 1.0;  // osc(S) is about 1 here
        CHECK(c0_err(200) < 1e-3 * osc);
        CHECK(c0_err(200) < c0_err(10));
    }
    SUBCASE("rejects profiles whose curvature has convex regions") {
        // a modulated parabola; its S bends upward over part of the interval
        Grid g = make_grid(24.0, 513);
        std::vector<double> v(g.n);
        const double pi = std::acos(-1.0);
        for (int i = 0; i < g.n; ++i) {
            const double t = g.tau[i];
            v[i] = 2.0 * t * (24.0 - t) / 24.0 *
                   (1.0 + 0.3 * std::sin(3.0 * pi * t / 24.0));
        }
        Profile wig = make_profile(g, v, ProfileKind::Regular);
        REQUIRE(check_optimality(wig).max_concavity_violation > 0.01);
        CHECK_THROWS_AS(approximate_neg_S(wig, 50), std::domain_error);
    }
}

TEST_CASE("lower-bound sweep approaches the deviation norm from below") {
    Grid g = make_grid(24.0, 8193);
    Profile mn = minimizer(24.0, g);
    const double limit = s_deviation_norm(mn);
    const std::vector<int> ks{10, 50, 200};
    auto rows = lower_bound_sweep(mn, ks);
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) CHECK(r.ratio <= limit + 1e-6);
    CHECK(rows[0].ratio < rows[1].ratio);
    CHECK(rows[1].ratio < rows[2].ratio);
    CHECK(rows[2].ratio == doctest::Approx(limit).epsilon(0.01));
}

TEST_CASE("Donaldson bound holds for random convex data") {
    std::mt19937_64 rng(20240519);
    Grid g = make_grid(24.0, 8193);
    Profile mn = minimizer(24.0, g);
    const double limit = s_deviation_norm(mn);
    for (int t = 0; t < 200; ++t) {
        PiecewiseLinearConvex h = testsup::random_pl_convex(24.0, rng);
        const double norm = futaki_norm(h, 24.0);
        if (norm < 1e-9) continue;
        CHECK(-futaki_invariant(h, 24.0) / norm <= limit + 1e-6);
    }
}
