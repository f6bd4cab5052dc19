#pragma once

#include <vector>

#include "divsg/domain.hpp"

namespace divsg {

/// Grid-sampled real function on a Domain. Values are immutable after
/// construction in pipeline use; mutation helpers exist for builders.
class ScalarField {
  public:
    explicit ScalarField(Domain dom, double fill = 0.0)
        : dom_(std::move(dom)), idx_(dom_), values_(idx_.size(), fill) {}

    template <typename F>
    static ScalarField sample(const Domain& dom, F&& fn) {
        ScalarField out(dom);
        for_each_node(dom, [&](const Index& id) { out.at(id) = fn(dom.node_point(id)); });
        return out;
    }

    const Domain& domain() const { return dom_; }
    double at(const Index& id) const { return values_[idx_.flat(id)]; }
    double& at(const Index& id) { return values_[idx_.flat(id)]; }
    double at_wrapped(Index id) const {
        for (int a = 0; a < dom_.dim(); ++a) id[a] = dom_.wrap(a, id[a]);
        return values_[idx_.flat(id)];
    }
    const std::vector<double>& raw() const { return values_; }
    std::vector<double>& raw() { return values_; }

    /// Multilinear interpolation; exact at nodes. Torus queries wrap;
    /// box queries outside the domain throw RangeError.
    double interpolate(const Point& p) const;

    void check_finite(const char* what) const;

    double max_abs() const;

    ScalarField& operator+=(const ScalarField& o);
    ScalarField& operator-=(const ScalarField& o);
    ScalarField& operator*=(double s);

  private:
    Domain dom_;
    GridIndexer idx_;
    std::vector<double> values_;
};

using Vector = std::array<double, kMaxDim>;

/// n grid-sampled components sharing one domain.
class VectorField {
  public:
    explicit VectorField(const Domain& dom, double fill = 0.0) {
        comps_.reserve(dom.dim());
        for (int a = 0; a < dom.dim(); ++a) comps_.emplace_back(dom, fill);
    }

    template <typename F>
    static VectorField sample(const Domain& dom, F&& fn) {
        VectorField out(dom);
        for_each_node(dom, [&](const Index& id) {
            const Vector v = fn(dom.node_point(id));
            for (int a = 0; a < dom.dim(); ++a) out.comp(a).at(id) = v[a];
        });
        return out;
    }

    const Domain& domain() const { return comps_[0].domain(); }
    int dim() const { return int(comps_.size()); }
    ScalarField& comp(int a) { return comps_[a]; }
    const ScalarField& comp(int a) const { return comps_[a]; }

    Vector at(const Index& id) const {
        Vector v{0, 0, 0};
        for (int a = 0; a < dim(); ++a) v[a] = comps_[a].at(id);
        return v;
    }
    void set(const Index& id, const Vector& v) {
        for (int a = 0; a < dim(); ++a) comps_[a].at(id) = v[a];
    }

    Vector interpolate(const Point& p) const {
        Vector v{0, 0, 0};
        for (int a = 0; a < dim(); ++a) v[a] = comps_[a].interpolate(p);
        return v;
    }

    void check_finite(const char* what) const {
        for (const auto& c : comps_) c.check_finite(what);
    }

    double max_abs() const;

    VectorField& operator+=(const VectorField& o);
    VectorField& operator-=(const VectorField& o);
    VectorField& operator*=(double s);

  private:
    std::vector<ScalarField> comps_;
};

VectorField operator-(const VectorField& a, const VectorField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);

}  // namespace divsg
