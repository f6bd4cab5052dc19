#include "divsg/divsolve.hpp"

#include "divsg/calculus.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace divsg;
using namespace divsg::testing;

namespace {

Domain unit_cube(int dim, int res) {
    Point lo{0, 0, 0}, len{0, 0, 0};
    Index r{1, 1, 1};
    for (int a = 0; a < dim; ++a) {
        len[a] = 1.0;
        r[a] = res;
    }
    return Domain(DomainKind::box, dim, lo, len, r);
}

// C-infinity bump in one variable, supported in (lo, hi)
double bump1(double x, double lo, double hi) {
    const double w = 0.5 * (hi - lo);
    return smoothstep((x - lo) / w) * smoothstep((hi - x) / w);
}

}  // namespace

TEST_CASE("solve_div_cube: zero input gives the zero field") {
    const Domain dom = unit_cube(2, 32);
    const ScalarField h(dom);
    const VectorField v = solve_div_cube(h, 0.125);
    CHECK(v.max_abs() == 0.0);
}

TEST_CASE("solve_div_cube n=1: integration recovers the antiderivative") {
    const Domain dom = unit_cube(1, 256);
    // h = b' for a compactly supported bump b; the solver must recover b
    auto b = [](double x) { return bump1(x, 0.2, 0.8); };
    const double e = 1e-6;
    const ScalarField h = ScalarField::sample(dom, [&](const Point& p) { return (b(p[0] + e) - b(p[0] - e)) / (2 * e); });
    const VectorField v = solve_div_cube(h, 0.125);
    double worst = 0.0;
    for (int i = 0; i <= 256; ++i) worst = std::max(worst, std::abs(v.comp(0).at({i, 0, 0}) - b(dom.coord(0, i))));
    const double h2 = dom.spacing(0) * dom.spacing(0);
    CHECK(worst < 50.0 * h2);  // second-order recovery
}

TEST_CASE("solve_div_cube n=2: exact discrete residual and clean margins") {
    const Domain dom = unit_cube(2, 128);
    // mean-zero product of compactly supported bumps: two opposite-sign lobes
    const ScalarField h = ScalarField::sample(dom, [&](const Point& p) {
        const double lobes = bump1(p[0], 0.2, 0.55) - bump1(p[0], 0.45, 0.8);
        return lobes * bump1(p[1], 0.25, 0.75);
    });
    REQUIRE(std::abs(integrate(h)) < 1e-12 * h.max_abs());
    const double margin = 0.125;
    const VectorField v = solve_div_cube(h, margin);

    // every node within margin/2 of the boundary is exactly zero
    for_each_node(dom, [&](const Index& id) {
        const Point p = dom.node_point(id);
        double dist = 1e300;
        for (int a = 0; a < 2; ++a) dist = std::min({dist, p[a], 1.0 - p[a]});
        if (dist <= margin / 2) {
            CHECK(v.comp(0).at(id) == 0.0);
            CHECK(v.comp(1).at(id) == 0.0);
        }
    });

    // residual of the discrete divergence against h (interior nodes)
    const ScalarField d = divergence(v);
    double res = 0.0;
    for_each_node(dom, [&](const Index& id) {
        if (id[0] == 0 || id[0] == 128 || id[1] == 0 || id[1] == 128) return;  // one-sided rim
        res = std::max(res, std::abs(d.at(id) - h.at(id)));
    });
    CHECK(res < 1e-3 * h.max_abs());
}

TEST_CASE("solve_div_cube n=3: residual stays within tolerance") {
    const Domain dom = unit_cube(3, 48);
    const ScalarField h = ScalarField::sample(dom, [&](const Point& p) {
        const double lobes = bump1(p[0], 0.2, 0.55) - bump1(p[0], 0.45, 0.8);
        return lobes * bump1(p[1], 0.25, 0.75) * bump1(p[2], 0.25, 0.75);
    });
    const VectorField v = solve_div_cube(h, 0.125);
    const ScalarField d = divergence(v);
    double res = 0.0;
    for_each_node(dom, [&](const Index& id) {
        for (int a = 0; a < 3; ++a)
            if (id[a] == 0 || id[a] == 48) return;
        res = std::max(res, std::abs(d.at(id) - h.at(id)));
    });
    CHECK(res < 1e-3 * h.max_abs());
}

TEST_CASE("solve_div_cube rejects bad inputs") {
    const Domain dom = unit_cube(2, 64);
    const ScalarField biased = ScalarField::sample(dom, [&](const Point& p) {
        return bump1(p[0], 0.3, 0.7) * bump1(p[1], 0.3, 0.7);
    });
    CHECK_THROWS_AS((void)solve_div_cube(biased, 0.125), MeanViolation);

    const ScalarField wide = ScalarField::sample(dom, [&](const Point& p) {
        return (bump1(p[0], 0.02, 0.5) - bump1(p[0], 0.5, 0.98)) * bump1(p[1], 0.3, 0.7);
    });
    CHECK_THROWS_AS((void)solve_div_cube(wide, 0.125), MarginError);
}

TEST_CASE("build_chain on the planar annulus satisfies every invariant") {
    const Domain dom = Domain::box_grid({-1, -1, 0}, {2, 2, 0}, {128, 128, 1});
    const Region omega1 = Region::annulus({0, 0, 0}, 0.56, 0.64);
    const Region omega = Region::annulus({0, 0, 0}, 0.4, 0.8);
    const CubeChain chain = build_chain(omega1, omega, 0.25, dom);

    // frozen from the exhaustive invariant scan at this geometry
    CHECK(chain.n_cubes() >= 8);
    CHECK(chain.n_cubes() <= 60);
    CHECK(chain.closed);

    for (const Cube& c : chain.cubes) {
        CHECK(c.max_side(dom) <= 1.0);
        CHECK(c.volume(dom) <= 1.0);
        // inside Omega, touching Omega_1 (radial range checks)
        double dmin = 1e300, dmax = 0.0;
        for_each_node(dom, [&](const Index&) {});  // placeholder to keep lambda includes
        for (int cx = 0; cx <= 1; ++cx)
            for (int cy = 0; cy <= 1; ++cy) {
                const double x = cx ? c.hi(dom, 0) : c.lo(dom, 0);
                const double y = cy ? c.hi(dom, 1) : c.lo(dom, 1);
                dmax = std::max(dmax, std::hypot(x, y));
            }
        // nearest point of the box to the origin
        const double nx = std::max({c.lo(dom, 0), -c.hi(dom, 0), 0.0});
        const double ny = std::max({c.lo(dom, 1), -c.hi(dom, 1), 0.0});
        dmin = std::hypot(nx, ny);
        CHECK(dmin >= 0.4);
        CHECK(dmax <= 0.8);
        CHECK(dmin <= 0.64);
        CHECK(dmax >= 0.56);
    }

    // coverage: every node of closure(Omega_1) lies in some cube
    for_each_node(dom, [&](const Index& id) {
        const Point p = dom.node_point(id);
        const double r = std::hypot(p[0], p[1]);
        if (r < 0.56 || r > 0.64) return;
        bool inside = false;
        for (const Cube& c : chain.cubes) {
            if (p[0] >= c.lo(dom, 0) && p[0] <= c.hi(dom, 0) && p[1] >= c.lo(dom, 1) && p[1] <= c.hi(dom, 1)) {
                inside = true;
                break;
            }
        }
        CHECK(inside);
    });
}

TEST_CASE("build_chain covers a torus band; degenerate nesting is refused") {
    const Domain dom = Domain::unit_torus(2, 128);
    const Region omega1 = Region::band(1, 0.42, 0.58);
    const Region omega = Region::band(1, 0.25, 0.75);
    const CubeChain chain = build_chain(omega1, omega, 0.3, dom);
    CHECK(chain.closed);
    CHECK(chain.n_cubes() >= 4);

    for_each_node(dom, [&](const Index& id) {
        const Point p = dom.node_point(id);
        if (p[1] < 0.42 || p[1] > 0.58) return;
        bool inside = false;
        for (const Cube& c : chain.cubes) {
            bool in = true;
            for (int a = 0; a < 2; ++a) {
                const double mid = 0.5 * (c.lo(dom, a) + c.hi(dom, a));
                const double x = mid + dom.axis_delta(a, mid, p[a]);
                in = in && x >= c.lo(dom, a) && x <= c.hi(dom, a);
            }
            if (in) {
                inside = true;
                break;
            }
        }
        CHECK(inside);
    });

    // Omega_1 = Omega: closure containment violated
    CHECK_THROWS_AS((void)build_chain(omega, omega, 0.3, dom), GeometryError);
}

TEST_CASE("decompose_chain: telescoping identity and zero piece means") {
    const Domain dom = Domain::box_grid({-1, -1, 0}, {2, 2, 0}, {128, 128, 1});
    const Region omega1 = Region::annulus({0, 0, 0}, 0.56, 0.64);
    const Region omega = Region::annulus({0, 0, 0}, 0.4, 0.8);
    const CubeChain chain = build_chain(omega1, omega, 0.25, dom);

    std::mt19937_64 rng(31);
    const ScalarField h = annulus_test_density(dom, {0, 0, 0}, 0.56, 0.64, rng);
    const auto pieces = decompose_chain(h, chain);
    REQUIRE(int(pieces.size()) == chain.n_cubes());

    ScalarField sum(dom);
    for (const auto& p : pieces) sum += p;
    sum -= h;
    CHECK(sum.max_abs() < 1e-10 * std::max(1.0, h.max_abs()));

    for (const auto& p : pieces) CHECK(std::abs(integrate(p)) < 1e-8 * std::max(1.0, p.max_abs()));

    // zero input decomposes to zero pieces
    const auto zero_pieces = decompose_chain(ScalarField(dom), chain);
    for (const auto& p : zero_pieces) CHECK(p.max_abs() == 0.0);
}

TEST_CASE("div_inverse: residual, support exactness, linearity on a frozen chain") {
    const Domain dom = Domain::box_grid({-1, -1, 0}, {2, 2, 0}, {128, 128, 1});
    const Region omega1 = Region::annulus({0, 0, 0}, 0.56, 0.64);
    const Region omega = Region::annulus({0, 0, 0}, 0.4, 0.8);
    const CubeChain chain = build_chain(omega1, omega, 0.25, dom);

    std::mt19937_64 rng(37);
    const ScalarField h1 = annulus_test_density(dom, {0, 0, 0}, 0.56, 0.64, rng);
    const ScalarField h2 = annulus_test_density(dom, {0, 0, 0}, 0.56, 0.64, rng);

    const VectorField v1 = div_inverse(h1, omega1, omega, chain);

    // residual
    const ScalarField d = divergence(v1);
    double res = 0.0;
    for_each_node(dom, [&](const Index& id) {
        if (id[0] == 0 || id[0] == 128 || id[1] == 0 || id[1] == 128) return;
        res = std::max(res, std::abs(d.at(id) - h1.at(id)));
    });
    CHECK(res < 1e-3 * h1.max_abs());

    // bit-exact zero outside Omega
    for_each_node(dom, [&](const Index& id) {
        if (omega.contains(dom, dom.node_point(id))) return;
        CHECK(v1.comp(0).at(id) == 0.0);
        CHECK(v1.comp(1).at(id) == 0.0);
    });

    // linearity on the frozen chain
    const VectorField v2 = div_inverse(h2, omega1, omega, chain);
    ScalarField combo(dom);
    for_each_node(dom, [&](const Index& id) { combo.at(id) = 2.0 * h1.at(id) - 0.5 * h2.at(id); });
    const VectorField vc = div_inverse(combo, omega1, omega, chain);
    double worst = 0.0;
    for_each_node(dom, [&](const Index& id) {
        for (int a = 0; a < 2; ++a)
            worst = std::max(worst,
                             std::abs(vc.comp(a).at(id) - (2.0 * v1.comp(a).at(id) - 0.5 * v2.comp(a).at(id))));
    });
    CHECK(worst < 1e-10);
}

TEST_CASE("div_inverse stability ratio is finite and grows for smaller cubes") {
    const Domain dom = Domain::box_grid({-1, -1, 0}, {2, 2, 0}, {128, 128, 1});
    const Region omega1 = Region::annulus({0, 0, 0}, 0.57, 0.63);
    const Region omega = Region::annulus({0, 0, 0}, 0.4, 0.8);

    auto ratio_for = [&](double side) {
        const CubeChain chain = build_chain(omega1, omega, side, dom);
        std::mt19937_64 rng(41);
        double worst = 0.0;
        for (int t = 0; t < 3; ++t) {
            const ScalarField h = annulus_test_density(dom, {0, 0, 0}, 0.57, 0.63, rng);
            const VectorField v = div_inverse(h, omega1, omega, chain);
            // |v|_1 / |h|_1 with FD first-order norms
            double vn = v.max_abs(), hn = h.max_abs();
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) vn = std::max(vn, partial(v.comp(a), b).max_abs());
                hn = std::max(hn, partial(h, a).max_abs());
            }
            worst = std::max(worst, vn / hn);
        }
        return worst;
    };

    const double c_big = ratio_for(0.25);
    const double c_small = ratio_for(0.2);
    CHECK(std::isfinite(c_big));
    CHECK(std::isfinite(c_small));
    // Warning-2 behaviour, reported as a measured trend
    MESSAGE("measured chain constants: side 0.25 -> ", c_big, ", side 0.2 -> ", c_small);
    CHECK(c_small > c_big * 0.8);
}
