#include "divsg/fields.hpp"

#include <algorithm>
#include <cmath>

namespace divsg {

double ScalarField::interpolate(const Point& p) const {
    const int dim = dom_.dim();
    int base[kMaxDim]{0, 0, 0};
    double frac[kMaxDim]{0, 0, 0};
    for (int a = 0; a < dim; ++a) {
        double x = p[a];
        if (dom_.is_torus()) {
            x = dom_.wrap_coord(a, x);
        } else {
            const double lo = dom_.lower(a), hi = lo + dom_.length(a);
            if (x < lo - 1e-12 || x > hi + 1e-12)
                throw RangeError("interpolation point outside box domain");
            x = std::clamp(x, lo, hi);
        }
        double t = (x - dom_.lower(a)) / dom_.spacing(a);
        int i = int(std::floor(t));
        const int last = dom_.is_torus() ? dom_.resolution(a) - 1 : dom_.resolution(a) - 1;
        if (i > last) i = last;
        if (i < 0) i = 0;
        base[a] = i;
        frac[a] = t - i;
    }
    // accumulate over the 2^dim cell corners
    double val = 0.0;
    const int corners = 1 << dim;
    for (int c = 0; c < corners; ++c) {
        double w = 1.0;
        Index id{0, 0, 0};
        for (int a = 0; a < dim; ++a) {
            const int bit = (c >> a) & 1;
            w *= bit ? frac[a] : (1.0 - frac[a]);
            id[a] = dom_.wrap(a, base[a] + bit);
        }
        if (w != 0.0) val += w * at(id);
    }
    return val;
}

void ScalarField::check_finite(const char* what) const {
    for (double v : values_)
        if (!std::isfinite(v)) throw FieldError(std::string(what) + ": non-finite sample");
}

double ScalarField::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
    for (size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
    for (size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
}

ScalarField& ScalarField::operator*=(double s) {
    for (double& v : values_) v *= s;
    return *this;
}

double VectorField::max_abs() const {
    double m = 0.0;
    for (const auto& c : comps_) m = std::max(m, c.max_abs());
    return m;
}

VectorField& VectorField::operator+=(const VectorField& o) {
    for (int a = 0; a < dim(); ++a) comps_[a] += o.comps_[a];
    return *this;
}

VectorField& VectorField::operator-=(const VectorField& o) {
    for (int a = 0; a < dim(); ++a) comps_[a] -= o.comps_[a];
    return *this;
}

VectorField& VectorField::operator*=(double s) {
    for (auto& c : comps_) c *= s;
    return *this;
}

VectorField operator-(const VectorField& a, const VectorField& b) {
    VectorField r = a;
    r -= b;
    return r;
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
    ScalarField r = a;
    r -= b;
    return r;
}

}  // namespace divsg
