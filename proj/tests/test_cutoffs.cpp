#include "divsg/cutoffs.hpp"

#include "divsg/calculus.hpp"
#include "divsg/divsolve.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace divsg;
using namespace divsg::testing;

TEST_CASE("smoothstep plateaus are exact and the profile is monotone") {
    CHECK(smoothstep(-0.1) == 0.0);
    CHECK(smoothstep(0.0) == 0.0);
    CHECK(smoothstep(1.0) == 1.0);
    CHECK(smoothstep(2.0) == 1.0);
    double prev = 0.0;
    for (int i = 0; i <= 100; ++i) {
        const double v = smoothstep(i / 100.0);
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("cutoff derivatives vanish at breakpoints (finite differences to order 3)") {
    const SmoothCutoff prof = SmoothCutoff::plateau(0.1, 0.3, 0.6, 0.9);
    // interior max of the first derivative as the scale reference
    double dmax = 0.0;
    const double e = 1e-3;
    for (int i = 0; i <= 400; ++i) {
        const double x = i / 400.0;
        dmax = std::max(dmax, std::abs((prof(x + e) - prof(x - e)) / (2 * e)));
    }
    for (double x : {0.1, 0.3, 0.6, 0.9}) {
        const double d1 = (prof(x + e) - prof(x - e)) / (2 * e);
        const double d2 = (prof(x + e) - 2 * prof(x) + prof(x - e)) / (e * e);
        const double d3 = (prof(x + 2 * e) - 2 * prof(x + e) + 2 * prof(x - e) - prof(x - 2 * e)) / (2 * e * e * e);
        CHECK(std::abs(d1) / dmax < 1e-6);
        CHECK(std::abs(d2) * e / dmax < 1e-4);
        CHECK(std::abs(d3) * e * e / dmax < 1e-4);
    }
}

TEST_CASE("unit-mass window: normalization, support, scaling") {
    const UnitMassWindow w(0.5);
    const int n = 2048;
    std::vector<double> s(n + 1);
    for (int i = 0; i <= n; ++i) s[i] = w(0.5 * i / n);
    CHECK(std::abs(trapezoid(s, 0.5 / n) - 1.0) < 1e-10);
    CHECK(w(0.0) == 0.0);
    CHECK(w(0.5) == 0.0);
    CHECK(w(0.5 / 8.0) == 0.0);          // support strictly inside (rho/8, 7rho/8)
    CHECK(w(0.5 * 7.0 / 8.0) == 0.0);

    const UnitMassWindow w2(1.0);
    double p1 = 0.0, p2 = 0.0;
    for (int i = 0; i <= n; ++i) {
        p1 = std::max(p1, w(0.5 * i / n));
        p2 = std::max(p2, w2(1.0 * i / n));
    }
    CHECK(std::abs(p2 - 0.5 * p1) < 0.01 * p1);  // doubling rho halves the peak

    const auto lat = w.lattice_samples(64);
    CHECK(std::abs(trapezoid(lat, 0.5 / 64) - 1.0) < 1e-15);
}

TEST_CASE("band_cutoff: plateau and support are exact, transition in (0,1)") {
    const Domain dom = Domain::box_grid({-1, -1, 0}, {2, 2, 0}, {64, 64, 1});
    const Region inner = Region::ball({0, 0, 0}, 0.35);
    const Region outer = Region::ball({0, 0, 0}, 0.6);
    const ScalarField xi = band_cutoff(dom, inner, outer);
    int transition = 0;
    for_each_node(dom, [&](const Index& id) {
        const Point p = dom.node_point(id);
        const double r = dom.distance(p, {0, 0, 0});
        const double v = xi.at(id);
        if (r <= 0.35) CHECK(v == 1.0);
        else if (r >= 0.6) CHECK(v == 0.0);
        else {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
            if (v > 0.0 && v < 1.0) ++transition;
        }
    });
    CHECK(transition > 0);
}

TEST_CASE("band_cutoff refuses an under-resolved gap") {
    const Domain dom = Domain::box_grid({-1, -1, 0}, {2, 2, 0}, {32, 32, 1});
    const Region inner = Region::ball({0, 0, 0}, 0.5);
    const Region outer = Region::ball({0, 0, 0}, 0.55);  // gap < 4h = 0.25
    CHECK_THROWS_AS((void)band_cutoff(dom, inner, outer), ResolutionError);
}

TEST_CASE("band_cutoff on torus bands honors wrapping") {
    const Domain dom = Domain::unit_torus(2, 64);
    const ScalarField xi = band_cutoff(dom, Region::band(1, 0.4, 0.6), Region::band(1, 0.25, 0.75));
    CHECK(xi.at({0, 32, 0}) == 1.0);   // z = 0.5
    CHECK(xi.at({0, 0, 0}) == 0.0);    // z = 0
    CHECK(xi.at({0, 8, 0}) == 0.0);    // z = 0.125
}

TEST_CASE("chain partition: sum to one on Omega_1, window support and mass") {
    const Domain dom = Domain::box_grid({-1, -1, 0}, {2, 2, 0}, {128, 128, 1});
    const Region omega1 = Region::annulus({0, 0, 0}, 0.56, 0.64);
    const Region omega = Region::annulus({0, 0, 0}, 0.4, 0.8);
    const CubeChain chain = build_chain(omega1, omega, 0.25, dom);
    const ChainPartition& part = chain_partition(chain);

    REQUIRE(int(part.psi.size()) == chain.n_cubes());
    REQUIRE(int(part.eta.size()) == chain.n_cubes() - 1);

    // partition of unity on Omega_1
    double worst = 0.0;
    for_each_node(dom, [&](const Index& id) {
        if (!omega1.contains(dom, dom.node_point(id))) return;
        double s = 0.0;
        for (const auto& psi : part.psi) s += psi.at(id);
        worst = std::max(worst, std::abs(s - 1.0));
    });
    CHECK(worst < 1e-10);

    // each psi_j and eta_k in [0,1]-ish ranges and eta has unit mass
    for (int k = 0; k < int(part.eta.size()); ++k) {
        CHECK(std::abs(integrate(part.eta[k]) - 1.0) < 1e-8);
        // support inside the overlap of consecutive cubes
        const Cube& a = chain.cubes[k];
        const Cube& b = chain.cubes[k + 1];
        for_each_node(dom, [&](const Index& id) {
            if (part.eta[k].at(id) == 0.0) return;
            const Point p = dom.node_point(id);
            for (const Cube* q : {&a, &b}) {
                for (int ax = 0; ax < 2; ++ax) {
                    const double mid = 0.5 * (q->lo(dom, ax) + q->hi(dom, ax));
                    const double x = mid + dom.axis_delta(ax, mid, p[ax]);
                    CHECK(x >= q->lo(dom, ax));
                    CHECK(x <= q->hi(dom, ax));
                }
            }
        });
    }

    // every cutoff stays within [0,1] at all nodes
    for (const auto& psi : part.psi) {
        for (double v : psi.raw()) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0 + 1e-12);
        }
    }
}
