#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include "divsg/errors.hpp"

namespace divsg {

inline constexpr int kMaxDim = 3;
inline constexpr double kPi = 3.14159265358979323846;

using Point = std::array<double, kMaxDim>;
using Index = std::array<int, kMaxDim>;

enum class DomainKind : std::uint8_t { box = 0, torus = 1 };

/// Axis-aligned box in R^n or flat torus (R/L_1 Z) x ... x (R/L_n Z),
/// n in {1,2,3}, with a uniform collocated grid.
///
/// Grid layout: spacing h_a = lengths[a]/resolution[a] per axis. A box axis
/// carries resolution+1 nodes (both endpoints); a torus axis carries
/// resolution nodes, index `resolution` wrapping to index 0.
class Domain {
  public:
    Domain(DomainKind kind, int dim, Point lower, Point lengths, Index resolution);

    static Domain unit_torus(int dim, int res);
    static Domain box_grid(Point lower, Point lengths, Index resolution);

    DomainKind kind() const { return kind_; }
    bool is_torus() const { return kind_ == DomainKind::torus; }
    int dim() const { return dim_; }
    double lower(int a) const { return lower_[a]; }
    double length(int a) const { return lengths_[a]; }
    int resolution(int a) const { return res_[a]; }
    double spacing(int a) const { return spacing_[a]; }
    double min_spacing() const;
    double max_spacing() const;

    /// Number of stored nodes along axis a.
    int nodes(int a) const { return is_torus() ? res_[a] : res_[a] + 1; }
    /// Total stored nodes.
    std::int64_t node_count() const;

    /// Wrap a (possibly out-of-range) node index along axis a.
    int wrap(int a, int i) const;

    double coord(int a, int i) const { return lower_[a] + spacing_[a] * i; }
    Point node_point(const Index& id) const;

    /// Wrap a point coordinate into [lower, lower+length) on torus axes.
    double wrap_coord(int a, double x) const;

    /// Shortest signed displacement from x to y along axis a (torus aware).
    double axis_delta(int a, double x, double y) const;
    /// Torus-aware Euclidean distance.
    double distance(const Point& p, const Point& q) const;

    /// Quadrature weight of node id: product of per-axis weights
    /// (1 on torus axes and box interiors, 1/2 at box endpoints), times cell volume.
    double quad_weight(const Index& id) const;
    double cell_volume() const;

    bool same_grid(const Domain& other) const;

  private:
    DomainKind kind_;
    int dim_;
    Point lower_{};
    Point lengths_{};
    Index res_{};
    Point spacing_{};
};

/// Membership-testable region of a domain. Ball/annulus distances are
/// torus-aware. Band regions select an axis interval.
class Region {
  public:
    enum class Kind { ball, annulus, band, box, complement, union_of, full };

    static Region full();
    static Region ball(Point center, double radius);
    static Region annulus(Point center, double inner, double outer);
    /// Nodes with coord along `axis` in [lo, hi] (wrapped on torus axes when lo > hi).
    static Region band(int axis, double lo, double hi);
    static Region box(Point lo, Point hi);
    static Region complement(Region r);
    static Region union_of(Region a, Region b);

    Kind kind() const { return kind_; }
    bool contains(const Domain& dom, const Point& p) const;

    /// Signed radial/axial coordinate used by cutoffs: distance to `center`
    /// for ball/annulus, axis coordinate offset for band. Throws for other kinds.
    double profile_coordinate(const Domain& dom, const Point& p) const;

    Point center() const { return center_; }
    double inner() const { return inner_; }
    double outer() const { return outer_; }
    int axis() const { return axis_; }
    const Region* child_a() const { return a_.get(); }
    const Region* child_b() const { return b_.get(); }

  private:
    Region() = default;
    Kind kind_ = Kind::full;
    Point center_{};
    double inner_ = 0.0;   // ball: unused; annulus: inner radius; band: lo
    double outer_ = 0.0;   // ball/annulus: outer radius; band: hi
    int axis_ = 0;
    Point box_lo_{};
    Point box_hi_{};
    std::shared_ptr<Region> a_, b_;
};

/// Row-major flat index over the stored nodes, last axis fastest.
struct GridIndexer {
    explicit GridIndexer(const Domain& d);
    int n[kMaxDim]{1, 1, 1};
    int dim;
    std::int64_t size() const;
    std::int64_t flat(const Index& id) const;
    Index unflat(std::int64_t f) const;
};

/// Visit every stored node (serial).
template <typename F>
void for_each_node(const Domain& dom, F&& fn) {
    const int nx = dom.nodes(0);
    const int ny = dom.dim() > 1 ? dom.nodes(1) : 1;
    const int nz = dom.dim() > 2 ? dom.nodes(2) : 1;
    Index id{0, 0, 0};
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            for (int k = 0; k < nz; ++k) {
                id = {i, j, k};
                fn(id);
            }
}

}  // namespace divsg
