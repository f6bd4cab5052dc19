#include "divsg/calculus.hpp"

#include <algorithm>
#include <cmath>

namespace divsg {

ScalarField partial(const ScalarField& f, int axis) {
    f.check_finite("partial");
    const Domain& dom = f.domain();
    const double h = dom.spacing(axis);
    ScalarField out(dom);
    const int n = dom.nodes(axis);
    for_each_node(dom, [&](const Index& id) {
        Index ip = id, im = id;
        ip[axis] += 1;
        im[axis] -= 1;
        double v;
        if (dom.is_torus()) {
            v = (f.at_wrapped(ip) - f.at_wrapped(im)) / (2.0 * h);
        } else if (id[axis] == 0) {
            Index i1 = id, i2 = id;
            i1[axis] = 1;
            i2[axis] = 2;
            v = (-3.0 * f.at(id) + 4.0 * f.at(i1) - f.at(i2)) / (2.0 * h);
        } else if (id[axis] == n - 1) {
            Index i1 = id, i2 = id;
            i1[axis] = n - 2;
            i2[axis] = n - 3;
            v = (3.0 * f.at(id) - 4.0 * f.at(i1) + f.at(i2)) / (2.0 * h);
        } else {
            v = (f.at(ip) - f.at(im)) / (2.0 * h);
        }
        out.at(id) = v;
    });
    return out;
}

ScalarField divergence(const VectorField& F) {
    ScalarField out = partial(F.comp(0), 0);
    for (int a = 1; a < F.dim(); ++a) out += partial(F.comp(a), a);
    return out;
}

IntegralResult integrate_region(const ScalarField& f, const Region& r) {
    const Domain& dom = f.domain();
    IntegralResult res;
    double sum = 0.0;
    bool any = false;
    for_each_node(dom, [&](const Index& id) {
        if (!r.contains(dom, dom.node_point(id))) return;
        any = true;
        sum += f.at(id) * dom.quad_weight(id);
    });
    res.value = sum;
    res.empty_region = !any;
    return res;
}

double integrate(const ScalarField& f, const Region& r) {
    return integrate_region(f, r).value;
}

double integrate(const ScalarField& f) {
    return integrate_region(f, Region::full()).value;
}

namespace {

std::vector<double> bump_taps(double width, double h) {
    if (width < 2.0 * h) throw ResolutionError("mollifier width under-resolved (need width >= 2 grid spacings)");
    const int K = int(std::ceil(width / h)) - 1;
    std::vector<double> w(2 * K + 1, 0.0);
    double total = 0.0;
    for (int i = -K; i <= K; ++i) {
        const double t = (i * h) / width;
        double v = 0.0;
        if (std::abs(t) < 1.0) v = std::exp(-1.0 / (1.0 - t * t));
        w[i + K] = v;
        total += v;
    }
    for (double& v : w) v /= total;
    return w;
}

// One separable convolution pass along `axis`.
ScalarField convolve_axis(const ScalarField& f, int axis, const std::vector<double>& taps) {
    const Domain& dom = f.domain();
    const int K = int(taps.size() / 2);
    const int n = dom.nodes(axis);
    ScalarField out(dom);
    for_each_node(dom, [&](const Index& id) {
        double acc = 0.0;
        if (dom.is_torus()) {
            Index q = id;
            for (int i = -K; i <= K; ++i) {
                q[axis] = dom.wrap(axis, id[axis] + i);
                acc += taps[i + K] * f.at(q);
            }
        } else {
            double wsum = 0.0;
            Index q = id;
            for (int i = -K; i <= K; ++i) {
                const int j = id[axis] + i;
                if (j < 0 || j >= n) continue;
                q[axis] = j;
                acc += taps[i + K] * f.at(q);
                wsum += taps[i + K];
            }
            acc /= wsum;  // boundary renormalization
        }
        out.at(id) = acc;
    });
    return out;
}

}  // namespace

ScalarField mollify(const ScalarField& f, double width) {
    f.check_finite("mollify");
    ScalarField out = f;
    for (int a = 0; a < f.domain().dim(); ++a) {
        const auto taps = bump_taps(width, f.domain().spacing(a));
        out = convolve_axis(out, a, taps);
    }
    return out;
}

VectorField mollify(const VectorField& F, double width) {
    VectorField out(F.domain());
    for (int a = 0; a < F.dim(); ++a) out.comp(a) = mollify(F.comp(a), width);
    return out;
}

std::vector<double> cumulative_integral(const std::vector<double>& f, double h) {
    const size_t m = f.size();
    std::vector<double> V(m, 0.0);
    if (m < 2) return V;
    V[1] = 0.5 * h * (f[0] + f[1]);
    for (size_t k = 1; k + 1 < m; ++k) V[k + 1] = V[k - 1] + 2.0 * h * f[k];
    return V;
}

double trapezoid(const std::vector<double>& f, double h) {
    if (f.size() < 2) return 0.0;
    double s = 0.5 * (f.front() + f.back());
    for (size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
    return s * h;
}

VectorField solenoidal_from_stream(const ScalarField& psi) {
    if (psi.domain().dim() != 2) throw FieldError("stream function requires a 2D domain");
    VectorField F(psi.domain());
    F.comp(0) = partial(psi, 1);
    F.comp(1) = partial(psi, 0);
    F.comp(1) *= -1.0;
    return F;
}

VectorField solenoidal_from_potential(const VectorField& A) {
    if (A.domain().dim() != 3) throw FieldError("vector potential requires a 3D domain");
    VectorField F(A.domain());
    ScalarField c0 = partial(A.comp(2), 1);
    c0 -= partial(A.comp(1), 2);
    ScalarField c1 = partial(A.comp(0), 2);
    c1 -= partial(A.comp(2), 0);
    ScalarField c2 = partial(A.comp(1), 0);
    c2 -= partial(A.comp(0), 1);
    F.comp(0) = std::move(c0);
    F.comp(1) = std::move(c1);
    F.comp(2) = std::move(c2);
    return F;
}

}  // namespace divsg
