#include "divsg/norms.hpp"

#include "divsg/calculus.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace divsg;
using namespace divsg::testing;

TEST_CASE("cr_norm of a constant field is its magnitude at every order") {
    const Domain dom = Domain::unit_torus(2, 32);
    VectorField F(dom);
    for_each_node(dom, [&](const Index& id) { F.set(id, {-0.75, 0.0, 0.0}); });
    for (int r = 0; r <= 3; ++r) {
        const NormReport rep = cr_norm(F, r, Region::full());
        CHECK(rep.value == doctest::Approx(0.75).epsilon(1e-14));
        for (size_t k = 1; k < rep.per_order.size(); ++k) CHECK(rep.per_order[k] < 1e-12);
    }
    CHECK_THROWS_AS((void)cr_norm(F, 4, Region::full()), FieldError);
}

TEST_CASE("cr_norm of a linear field matches the matrix entries") {
    const Domain dom = Domain::box_grid({-1, -1, 0}, {2, 2, 0}, {64, 64, 1});
    const double a00 = 0.3, a01 = -1.2, a10 = 0.8, a11 = 0.5;
    const VectorField F = VectorField::sample(dom, [&](const Point& p) {
        return Vector{a00 * p[0] + a01 * p[1], a10 * p[0] + a11 * p[1], 0};
    });
    const Region R = Region::ball({0, 0, 0}, 0.9);
    const NormReport rep = cr_norm(F, 1, R);
    // order-1 part: the largest entry magnitude (exact for linear fields)
    CHECK(rep.per_order[1] == doctest::Approx(1.2).epsilon(1e-10));
    // order-0 part: sup over the region of |F|-entries
    double sup0 = 0.0;
    for_each_node(dom, [&](const Index& id) {
        const Point p = dom.node_point(id);
        if (!R.contains(dom, p)) return;
        sup0 = std::max({sup0, std::abs(a00 * p[0] + a01 * p[1]), std::abs(a10 * p[0] + a11 * p[1])});
    });
    CHECK(rep.per_order[0] == doctest::Approx(sup0).epsilon(1e-12));
    CHECK(rep.value == doctest::Approx(std::max(sup0, 1.2)).epsilon(1e-12));
}

TEST_CASE("norm sandwich holds on random smooth fields") {
    reset_sandwich_audit();
    std::mt19937_64 rng(101);
    for (int t = 0; t < 20; ++t) {
        const Domain dom = Domain::unit_torus(2, 48);
        VectorField F(dom);
        F.comp(0) = random_stream(dom, rng, 4, 0.3, {0, 0, 0}, {1, 1, 0});
        F.comp(1) = random_stream(dom, rng, 4, 0.3, {0, 0, 0}, {1, 1, 0});
        const int r = int(rng() % 3);
        const NormReport rep = cr_norm(F, r, Region::full());
        const double upper = std::pow(2.0, 0.5 * (r + 1)) * rep.value;
        CHECK(rep.value <= rep.whitney * (1 + 1e-12));
        CHECK(rep.whitney <= upper * (1 + 1e-12));
    }
    const SandwichAudit audit = sandwich_audit();
    CHECK(audit.checked >= 20);
    CHECK(audit.violations == 0);
}

TEST_CASE("cr_norm is monotone in order and region inclusion") {
    const Domain dom = Domain::unit_torus(2, 48);
    std::mt19937_64 rng(7);
    VectorField F(dom);
    F.comp(0) = random_stream(dom, rng, 3, 0.35, {0, 0, 0}, {1, 1, 0});
    F.comp(1) = random_stream(dom, rng, 3, 0.35, {0, 0, 0}, {1, 1, 0});
    const Region small = Region::ball({0.5, 0.5, 0}, 0.2);
    const Region big = Region::ball({0.5, 0.5, 0}, 0.45);
    double prev = 0.0;
    for (int r = 0; r <= 3; ++r) {
        const double v = cr_norm(F, r, big).value;
        CHECK(v >= prev - 1e-14);
        prev = v;
        CHECK(cr_norm(F, r, small).value <= v + 1e-14);
    }
}

TEST_CASE("holder seminorm: constants, the identity map, sampling against exhaustive") {
    const Domain dom = Domain::box_grid({0, 0, 0}, {1, 1, 0}, {32, 32, 1});
    const ScalarField c(dom, 3.0);
    CHECK(holder_seminorm(c, 0, 0.5, Region::full(), 1 << 22).value == 0.0);

    const ScalarField x = ScalarField::sample(dom, [](const Point& p) { return p[0]; });
    const HolderPart lip = holder_seminorm(x, 0, 1.0, Region::full(), 1 << 22);
    CHECK(lip.exhaustive);
    CHECK(lip.value == doctest::Approx(1.0).epsilon(1e-10));

    std::mt19937_64 rng(55);
    const ScalarField f = random_stream(dom, rng, 4, 0.3, {0, 0, 0}, {1, 1, 0});
    const HolderPart ex = holder_seminorm(f, 1, 0.5, Region::full(), 1 << 30);
    REQUIRE(ex.exhaustive);
    const HolderPart sampled = holder_seminorm(f, 1, 0.5, Region::full(), 20000);
    CHECK_FALSE(sampled.exhaustive);
    CHECK(sampled.value <= ex.value * (1 + 1e-12));
    CHECK(sampled.value >= 0.9 * ex.value);
}

TEST_CASE("operator norm: identity, diagonal, sphere-sampling oracle") {
    double I[kMaxDim][kMaxDim] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    CHECK(operator_norm(I, 2) == doctest::Approx(1.0).epsilon(1e-12));
    double D[kMaxDim][kMaxDim] = {{3, 0, 0}, {0, 1.0 / 3.0, 0}, {0, 0, 1}};
    CHECK(operator_norm(D, 2) == doctest::Approx(3.0).epsilon(1e-12));

    std::mt19937_64 rng(77);
    double A[kMaxDim][kMaxDim];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) A[i][j] = uniform(rng, -2.0, 2.0);
    const double pw = operator_norm(A, 3);
    // dense sphere sampling oracle
    double best = 0.0;
    for (int k = 0; k < 2000; ++k) {
        const double z = -1.0 + 2.0 * (k + 0.5) / 2000.0;
        const double th = 2.399963229728653 * k;
        const double rr = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double u[3] = {rr * std::cos(th), rr * std::sin(th), z};
        double w[3] = {0, 0, 0};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) w[i] += A[i][j] * u[j];
        best = std::max(best, std::sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2]));
    }
    CHECK(pw >= best - 1e-12);
    CHECK(pw <= best + 1e-3 * std::max(1.0, best) + 2e-3);
}
