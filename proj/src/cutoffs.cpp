#include "divsg/cutoffs.hpp"

#include <cmath>
#include <limits>

#include "divsg/divsolve.hpp"

namespace divsg {

double smoothstep(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double s = std::exp(-1.0 / t);
    const double s1 = std::exp(-1.0 / (1.0 - t));
    return s / (s + s1);
}

SmoothCutoff::SmoothCutoff(double a, double b, double c, double d) : a_(a), b_(b), c_(c), d_(d) {
    if (!(a <= b && b <= c && c <= d)) throw GeometryError("cutoff breakpoints must be ordered");
}

SmoothCutoff SmoothCutoff::plateau(double a, double b, double c, double d) {
    return SmoothCutoff(a, b, c, d);
}

SmoothCutoff SmoothCutoff::rising(double a, double b) {
    const double inf = std::numeric_limits<double>::infinity();
    return SmoothCutoff(a, b, inf, inf);
}

SmoothCutoff SmoothCutoff::falling(double c, double d) {
    const double inf = std::numeric_limits<double>::infinity();
    return SmoothCutoff(-inf, -inf, c, d);
}

double SmoothCutoff::operator()(double x) const {
    if (x <= a_) return 0.0;
    if (x < b_) return smoothstep((x - a_) / (b_ - a_));
    if (x <= c_) return 1.0;
    if (x < d_) return smoothstep((d_ - x) / (d_ - c_));
    return 0.0;
}

UnitMassWindow::UnitMassWindow(double rho) : rho_(rho), scale_(1.0) {
    if (!(rho > 0.0)) throw GeometryError("unit-mass window needs rho > 0");
    const int n = 4096;
    std::vector<double> s(n + 1);
    const double h = rho_ / n;
    for (int i = 0; i <= n; ++i) s[i] = raw(i * h);
    const double total = trapezoid(s, h);
    scale_ = 1.0 / total;
}

double UnitMassWindow::raw(double x) const {
    const double lo = rho_ / 8.0, hi = 7.0 * rho_ / 8.0;
    const double w = 3.0 * rho_ / 8.0;
    return smoothstep((x - lo) / w) * smoothstep((hi - x) / w);
}

std::vector<double> UnitMassWindow::lattice_samples(int cells) const {
    if (cells < 8) throw ResolutionError("unit-mass window needs >= 8 cells across its interval");
    const double h = rho_ / cells;
    std::vector<double> s(cells + 1);
    for (int i = 0; i <= cells; ++i) s[i] = raw(i * h);
    const double total = trapezoid(s, h);
    if (!(total > 0.0)) throw ResolutionError("unit-mass window vanished on lattice");
    for (double& v : s) v /= total;
    return s;
}

namespace {

double region_gap_check(const Domain& dom, double gap, const char* what) {
    const double need = 4.0 * dom.max_spacing();
    if (gap < need)
        throw ResolutionError(std::string(what) + ": transition gap " + std::to_string(gap) +
                              " under-resolved; need >= 4 grid spacings (" + std::to_string(need) + ")");
    return gap;
}

}  // namespace

ScalarField band_cutoff(const Domain& dom, const Region& inner, const Region& outer) {
    using K = Region::Kind;
    if (inner.kind() == K::ball && outer.kind() == K::ball) {
        region_gap_check(dom, outer.outer() - inner.outer(), "band_cutoff(ball)");
        SmoothCutoff fall = SmoothCutoff::falling(inner.outer(), outer.outer());
        return ScalarField::sample(dom, [&](const Point& p) { return fall(inner.profile_coordinate(dom, p)); });
    }
    if (inner.kind() == K::annulus && outer.kind() == K::annulus) {
        region_gap_check(dom, inner.inner() - outer.inner(), "band_cutoff(annulus, inner gap)");
        region_gap_check(dom, outer.outer() - inner.outer(), "band_cutoff(annulus, outer gap)");
        SmoothCutoff prof = SmoothCutoff::plateau(outer.inner(), inner.inner(), inner.outer(), outer.outer());
        return ScalarField::sample(dom, [&](const Point& p) { return prof(inner.profile_coordinate(dom, p)); });
    }
    if (inner.kind() == K::band && outer.kind() == K::band) {
        const int ax = inner.axis();
        if (outer.axis() != ax) throw GeometryError("band_cutoff: bands must share an axis");
        region_gap_check(dom, inner.inner() - outer.inner(), "band_cutoff(band, lo gap)");
        region_gap_check(dom, outer.outer() - inner.outer(), "band_cutoff(band, hi gap)");
        SmoothCutoff lo = SmoothCutoff::rising(outer.inner(), inner.inner());
        SmoothCutoff hi = SmoothCutoff::falling(inner.outer(), outer.outer());
        const double mid = 0.5 * (inner.inner() + inner.outer());
        return ScalarField::sample(dom, [&](const Point& p) {
            const double x = mid + dom.axis_delta(ax, mid, p[ax]);
            return lo(x) * hi(x);
        });
    }
    if (inner.kind() == K::complement && outer.kind() == K::complement) {
        // complement-of-ball nest: 1 away from the hole, 0 on it
        const Region& hole_in = *outer.child_a();   // smaller ball
        const Region& hole_out = *inner.child_a();  // larger ball
        if (hole_in.kind() != K::ball || hole_out.kind() != K::ball)
            throw GeometryError("band_cutoff: complement nest requires ball holes");
        region_gap_check(dom, hole_out.outer() - hole_in.outer(), "band_cutoff(complement)");
        SmoothCutoff rise = SmoothCutoff::rising(hole_in.outer(), hole_out.outer());
        return ScalarField::sample(dom, [&](const Point& p) { return rise(hole_in.profile_coordinate(dom, p)); });
    }
    throw GeometryError("band_cutoff: unsupported region pair");
}

const ChainPartition& chain_partition(const CubeChain& chain) {
    return chain.partition();
}

}  // namespace divsg
