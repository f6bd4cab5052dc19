#include "divsg/domain.hpp"

#include <algorithm>
#include <cmath>

namespace divsg {

Domain::Domain(DomainKind kind, int dim, Point lower, Point lengths, Index resolution)
    : kind_(kind), dim_(dim), lower_(lower), lengths_(lengths), res_(resolution) {
    if (dim < 1 || dim > kMaxDim) throw FieldError("domain dimension must be 1..3");
    for (int a = 0; a < dim_; ++a) {
        if (!(lengths_[a] > 0.0)) throw FieldError("domain lengths must be positive");
        if (res_[a] < 8) throw FieldError("domain resolution must be >= 8 per axis");
        spacing_[a] = lengths_[a] / res_[a];
    }
    for (int a = dim_; a < kMaxDim; ++a) {
        lengths_[a] = 0.0;
        res_[a] = 1;
        spacing_[a] = 1.0;
    }
}

Domain Domain::unit_torus(int dim, int res) {
    Point lo{0, 0, 0}, len{1, 1, 1};
    Index r{res, res, res};
    return Domain(DomainKind::torus, dim, lo, len, r);
}

Domain Domain::box_grid(Point lower, Point lengths, Index resolution) {
    int dim = 0;
    for (int a = 0; a < kMaxDim; ++a)
        if (lengths[a] > 0.0) dim = a + 1;
    return Domain(DomainKind::box, dim, lower, lengths, resolution);
}

double Domain::min_spacing() const {
    double m = spacing_[0];
    for (int a = 1; a < dim_; ++a) m = std::min(m, spacing_[a]);
    return m;
}

double Domain::max_spacing() const {
    double m = spacing_[0];
    for (int a = 1; a < dim_; ++a) m = std::max(m, spacing_[a]);
    return m;
}

std::int64_t Domain::node_count() const {
    std::int64_t c = 1;
    for (int a = 0; a < dim_; ++a) c *= nodes(a);
    return c;
}

int Domain::wrap(int a, int i) const {
    if (!is_torus()) return i;
    const int n = res_[a];
    int r = i % n;
    return r < 0 ? r + n : r;
}

Point Domain::node_point(const Index& id) const {
    Point p{0, 0, 0};
    for (int a = 0; a < dim_; ++a) p[a] = coord(a, id[a]);
    return p;
}

double Domain::wrap_coord(int a, double x) const {
    if (!is_torus()) return x;
    const double L = lengths_[a];
    double t = std::fmod(x - lower_[a], L);
    if (t < 0) t += L;
    return lower_[a] + t;
}

double Domain::axis_delta(int a, double x, double y) const {
    double d = y - x;
    if (is_torus()) {
        const double L = lengths_[a];
        d = std::remainder(d, L);
    }
    return d;
}

double Domain::distance(const Point& p, const Point& q) const {
    double s = 0.0;
    for (int a = 0; a < dim_; ++a) {
        const double d = axis_delta(a, p[a], q[a]);
        s += d * d;
    }
    return std::sqrt(s);
}

double Domain::quad_weight(const Index& id) const {
    double w = cell_volume();
    if (!is_torus()) {
        for (int a = 0; a < dim_; ++a)
            if (id[a] == 0 || id[a] == res_[a]) w *= 0.5;
    }
    return w;
}

double Domain::cell_volume() const {
    double v = 1.0;
    for (int a = 0; a < dim_; ++a) v *= spacing_[a];
    return v;
}

bool Domain::same_grid(const Domain& other) const {
    if (kind_ != other.kind_ || dim_ != other.dim_) return false;
    for (int a = 0; a < dim_; ++a) {
        if (res_[a] != other.res_[a]) return false;
        if (lower_[a] != other.lower_[a]) return false;
        if (lengths_[a] != other.lengths_[a]) return false;
    }
    return true;
}

Region Region::full() {
    Region r;
    r.kind_ = Kind::full;
    return r;
}

Region Region::ball(Point center, double radius) {
    Region r;
    r.kind_ = Kind::ball;
    r.center_ = center;
    r.outer_ = radius;
    return r;
}

Region Region::annulus(Point center, double inner, double outer) {
    if (!(inner < outer)) throw GeometryError("annulus requires inner < outer");
    Region r;
    r.kind_ = Kind::annulus;
    r.center_ = center;
    r.inner_ = inner;
    r.outer_ = outer;
    return r;
}

Region Region::band(int axis, double lo, double hi) {
    Region r;
    r.kind_ = Kind::band;
    r.axis_ = axis;
    r.inner_ = lo;
    r.outer_ = hi;
    return r;
}

Region Region::box(Point lo, Point hi) {
    Region r;
    r.kind_ = Kind::box;
    r.box_lo_ = lo;
    r.box_hi_ = hi;
    return r;
}

Region Region::complement(Region inner) {
    Region r;
    r.kind_ = Kind::complement;
    r.a_ = std::make_shared<Region>(std::move(inner));
    return r;
}

Region Region::union_of(Region a, Region b) {
    Region r;
    r.kind_ = Kind::union_of;
    r.a_ = std::make_shared<Region>(std::move(a));
    r.b_ = std::make_shared<Region>(std::move(b));
    return r;
}

bool Region::contains(const Domain& dom, const Point& p) const {
    switch (kind_) {
        case Kind::full:
            return true;
        case Kind::ball:
            return dom.distance(p, center_) <= outer_;
        case Kind::annulus: {
            const double d = dom.distance(p, center_);
            return d >= inner_ && d <= outer_;
        }
        case Kind::band: {
            const int a = axis_;
            if (dom.is_torus() && inner_ > outer_) {
                // wrapped interval
                const double x = dom.wrap_coord(a, p[a]);
                return x >= inner_ || x <= outer_;
            }
            const double x = dom.is_torus() ? dom.wrap_coord(a, p[a]) : p[a];
            return x >= inner_ && x <= outer_;
        }
        case Kind::box: {
            for (int a = 0; a < dom.dim(); ++a) {
                double x = p[a];
                if (dom.is_torus()) {
                    // test against the unwrapped interval by shifting to nearest copy
                    const double mid = 0.5 * (box_lo_[a] + box_hi_[a]);
                    x = mid + dom.axis_delta(a, mid, p[a]);
                }
                if (x < box_lo_[a] || x > box_hi_[a]) return false;
            }
            return true;
        }
        case Kind::complement:
            return !a_->contains(dom, p);
        case Kind::union_of:
            return a_->contains(dom, p) || b_->contains(dom, p);
    }
    return false;
}

double Region::profile_coordinate(const Domain& dom, const Point& p) const {
    switch (kind_) {
        case Kind::ball:
        case Kind::annulus:
            return dom.distance(p, center_);
        case Kind::band: {
            const double mid = 0.5 * (inner_ + outer_);
            return std::abs(dom.axis_delta(axis_, mid, p[axis_]));
        }
        default:
            throw GeometryError("profile coordinate defined for ball/annulus/band regions only");
    }
}

GridIndexer::GridIndexer(const Domain& d) : dim(d.dim()) {
    for (int a = 0; a < dim; ++a) n[a] = d.nodes(a);
}

std::int64_t GridIndexer::size() const {
    return std::int64_t(n[0]) * n[1] * n[2];
}

std::int64_t GridIndexer::flat(const Index& id) const {
    return (std::int64_t(id[0]) * n[1] + id[1]) * n[2] + id[2];
}

Index GridIndexer::unflat(std::int64_t f) const {
    Index id;
    id[2] = int(f % n[2]);
    f /= n[2];
    id[1] = int(f % n[1]);
    id[0] = int(f / n[1]);
    return id;
}

}  // namespace divsg
