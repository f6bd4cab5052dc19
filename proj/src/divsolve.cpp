#include "divsg/divsolve.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace divsg {

double Cube::max_side(const Domain& d) const {
    double s = 0.0;
    for (int a = 0; a < d.dim(); ++a) s = std::max(s, side(d, a));
    return s;
}

double Cube::volume(const Domain& d) const {
    double v = 1.0;
    for (int a = 0; a < d.dim(); ++a) v *= side(d, a);
    return v;
}

Point Cube::mid(const Domain& d) const {
    Point p{0, 0, 0};
    for (int a = 0; a < d.dim(); ++a) p[a] = 0.5 * (lo(d, a) + hi(d, a));
    return p;
}

// ---------------------------------------------------------------------------
// solve_div_cube
//
// The centered difference decouples the even and odd sublattices of each
// column, so a compactly supported discrete solution needs both sublattice
// sums of the integrand to vanish, not just the trapezoid total. The window
// multiple is therefore split by parity: with H_even = S_even(h)/S_even(xi)
// and H_odd likewise, both chains of the matched cumulative rule end at zero
// to rounding and the field is clean near the faces for any admissible h.
// The recursion consumes the parity average; the parity imbalance only
// enters the residual through xi * (H_even - H_odd)/2, which decays beyond
// all orders under grid refinement for smooth data.
// ---------------------------------------------------------------------------

namespace {

Domain drop_last_axis(const Domain& dom) {
    const int n = dom.dim();
    Point lo{0, 0, 0}, len{0, 0, 0};
    Index res{1, 1, 1};
    for (int a = 0; a < n - 1; ++a) {
        lo[a] = dom.lower(a);
        len[a] = dom.length(a);
        res[a] = dom.resolution(a);
    }
    return Domain(DomainKind::box, n - 1, lo, len, res);
}

double boundary_distance(const Domain& dom, const Point& p) {
    double d = std::numeric_limits<double>::infinity();
    for (int a = 0; a < dom.dim(); ++a) {
        d = std::min(d, p[a] - dom.lower(a));
        d = std::min(d, dom.lower(a) + dom.length(a) - p[a]);
    }
    return d;
}

VectorField solve_cube_impl(const ScalarField& h) {
    const Domain& dom = h.domain();
    const int n = dom.dim();
    VectorField v(dom);

    const int last = n - 1;
    const int mz = dom.resolution(last);
    const double hz = dom.spacing(last);

    const UnitMassWindow win(dom.length(last));
    const std::vector<double> xi = win.lattice_samples(mz);
    double xi_even = 0.0, xi_odd = 0.0;
    for (int k = 0; k <= mz; ++k) (k % 2 == 0 ? xi_even : xi_odd) += xi[k];

    if (n == 1) {
        // Base case. The sublattice defects of a discretely mean-zero column
        // are dumped onto the window; they vanish with the data's smoothness.
        std::vector<double> col(mz + 1);
        for (int i = 0; i <= mz; ++i) col[i] = h.at({i, 0, 0});
        double se = 0.0, so = 0.0;
        for (int i = 0; i <= mz; ++i) (i % 2 == 0 ? se : so) += col[i];
        const double He = se / xi_even, Ho = so / xi_odd;
        for (int i = 0; i <= mz; ++i) col[i] -= (i % 2 == 0 ? He : Ho) * xi[i];
        const auto V = cumulative_integral(col, hz);
        for (int i = 0; i <= mz; ++i) v.comp(0).at({i, 0, 0}) = V[i];
        return v;
    }

    const Domain sub = drop_last_axis(dom);

    ScalarField Hbar(sub), Hdelta(sub);
    for_each_node(sub, [&](const Index& idp) {
        Index id = idp;
        double se = 0.0, so = 0.0;
        for (int k = 0; k <= mz; ++k) {
            id[last] = k;
            (k % 2 == 0 ? se : so) += h.at(id);
        }
        const double He = se / xi_even;
        const double Ho = so / xi_odd;
        Hbar.at(idp) = 0.5 * (He + Ho);
        Hdelta.at(idp) = 0.5 * (He - Ho);
    });

    // Two sub-solves: the parity average rides the window, the parity
    // imbalance rides the sign-weighted window, so the divergence identity
    // closes exactly instead of leaving a xi * Hdelta residual.
    const VectorField w = solve_cube_impl(Hbar);
    const VectorField w2 = solve_cube_impl(Hdelta);

    for_each_node(sub, [&](const Index& idp) {
        Index id = idp;
        for (int a = 0; a < last; ++a) {
            const double wa = w.comp(a).at(idp);
            const double wb = w2.comp(a).at(idp);
            for (int k = 0; k <= mz; ++k) {
                id[last] = k;
                const double chi = (k % 2 == 0 ? xi[k] : -xi[k]);
                v.comp(a).at(id) = wa * xi[k] + wb * chi;
            }
        }
        const double Hb = Hbar.at(idp), Hd = Hdelta.at(idp);
        std::vector<double> g(mz + 1);
        for (int k = 0; k <= mz; ++k) {
            id[last] = k;
            g[k] = h.at(id) - (k % 2 == 0 ? Hb + Hd : Hb - Hd) * xi[k];
        }
        const auto V = cumulative_integral(g, hz);
        for (int k = 0; k <= mz; ++k) {
            id[last] = k;
            v.comp(last).at(id) = V[k];
        }
    });
    return v;
}

// Zero the nodes within margin/2 of the cube boundary and make sure only
// sublattice leakage (not real signal) was discarded.
void snap_margin_zone(VectorField& v, double margin) {
    const Domain& dom = v.domain();
    const double half = 0.5 * margin * (1.0 + 1e-12);
    const double vmax = v.max_abs();
    double dirt = 0.0;
    for_each_node(dom, [&](const Index& id) {
        const Point p = dom.node_point(id);
        if (boundary_distance(dom, p) <= half) {
            for (int a = 0; a < dom.dim(); ++a) {
                dirt = std::max(dirt, std::abs(v.comp(a).at(id)));
                v.comp(a).at(id) = 0.0;
            }
        }
    });
    if (dirt > 1e-6 * std::max(vmax, 1e-30))
        throw Error("solve_div_cube: margin zone not numerically clean (leak " + std::to_string(dirt) + ")");
}

}  // namespace

VectorField solve_div_cube(const ScalarField& h, double margin) {
    const Domain& dom = h.domain();
    if (dom.is_torus()) throw GeometryError("solve_div_cube expects a box (cube) domain");
    h.check_finite("solve_div_cube");
    for (int a = 0; a < dom.dim(); ++a) {
        if (dom.length(a) > 1.0 + 1e-12) throw GeometryError("cube side exceeds 1");
        if (margin <= 0.0 || margin >= 0.5 * dom.length(a)) throw GeometryError("bad cube margin");
    }

    const double hmax = h.max_abs();
    double vol = 1.0;
    for (int a = 0; a < dom.dim(); ++a) vol *= dom.length(a);
    const double mean = integrate(h);
    if (std::abs(mean) > kMeanTolerance * std::max(hmax, 1e-300) * vol)
        throw MeanViolation("solve_div_cube: nonzero mean " + std::to_string(mean), mean);

    for_each_node(dom, [&](const Index& id) {
        if (h.at(id) == 0.0) return;
        const Point p = dom.node_point(id);
        if (boundary_distance(dom, p) < margin * (1.0 - 1e-9))
            throw MarginError("solve_div_cube: support within margin of the cube boundary");
    });

    VectorField v = solve_cube_impl(h);
    snap_margin_zone(v, margin);
    return v;
}

// ---------------------------------------------------------------------------
// chain construction
//
// The subordinate partition is exact by construction: telescoping hats T_j
// along the (closed) walk parameter sum to 1 identically, and a cross window
// W equal to 1 across Omega_1 confines each piece to its cube. For slabs the
// hats are a tensor product over the two walk axes.
// ---------------------------------------------------------------------------

namespace {

double local_coord(const Domain& dom, int a, double ref, double x) {
    return ref + dom.axis_delta(a, ref, x);
}

// Rising crossing of edge e with transition half-width w on a circle of the
// given period: exactly 0 more than w before the edge, exactly 1 more than w
// after, until the antipode.
double edge_cross(double t, double e, double w, double period) {
    return smoothstep((std::remainder(t - e, period) + w) / (2.0 * w));
}

// Telescoping hat for the sector between edges e0 and e1.
double walk_hat(double t, double e0, double e1, double w, double period) {
    const double c0 = edge_cross(t, e0, w, period);
    if (c0 == 0.0) return 0.0;
    const double c1 = edge_cross(t, e1, w, period);
    return c0 * (1.0 - c1);
}

struct OverlapBox {
    Point lo{0, 0, 0}, hi{0, 0, 0};  // in the frame of the first cube
    bool ok = true;
    double min_extent = 0.0;
};

OverlapBox shrunk_overlap(const Domain& dom, const Cube& a, const Cube& b, double margin_frac) {
    OverlapBox o;
    const Point ma = a.mid(dom), mb = b.mid(dom);
    o.min_extent = std::numeric_limits<double>::infinity();
    for (int ax = 0; ax < dom.dim(); ++ax) {
        const double insA = a.side(dom, ax) * margin_frac, insB = b.side(dom, ax) * margin_frac;
        const double shift = local_coord(dom, ax, ma[ax], mb[ax]) - mb[ax];
        o.lo[ax] = std::max(a.lo(dom, ax) + insA, b.lo(dom, ax) + shift + insB);
        o.hi[ax] = std::min(a.hi(dom, ax) - insA, b.hi(dom, ax) + shift - insB);
        const double ext = o.hi[ax] - o.lo[ax];
        if (ext <= 0.0) o.ok = false;
        o.min_extent = std::min(o.min_extent, ext);
    }
    return o;
}

ScalarField link_window(const Domain& dom, const OverlapBox& o) {
    std::array<SmoothCutoff, kMaxDim> prof{SmoothCutoff::rising(0, 1), SmoothCutoff::rising(0, 1),
                                           SmoothCutoff::rising(0, 1)};
    Point mid{0, 0, 0};
    for (int a = 0; a < dom.dim(); ++a) {
        const double e = o.hi[a] - o.lo[a];
        prof[a] = SmoothCutoff::plateau(o.lo[a], o.lo[a] + 0.35 * e, o.hi[a] - 0.35 * e, o.hi[a]);
        mid[a] = 0.5 * (o.lo[a] + o.hi[a]);
    }
    ScalarField eta = ScalarField::sample(dom, [&](const Point& p) {
        double b = 1.0;
        for (int a = 0; a < dom.dim(); ++a) {
            b *= prof[a](local_coord(dom, a, mid[a], p[a]));
            if (b == 0.0) return 0.0;
        }
        return b;
    });
    const double mass = integrate(eta);
    if (!(mass > 0.0)) throw GeometryError("link window vanished on the grid");
    eta *= 1.0 / mass;
    return eta;
}

// Cross window: exactly 1 over [lo1, hi1] (the Omega_1 extent), supported
// inside [lo_avail, hi_avail] (the cubes' common margin box extent).
SmoothCutoff cross_window(double lo1, double hi1, double lo_avail, double hi_avail, double hmin, const char* what) {
    const double slack_lo = lo1 - lo_avail;
    const double slack_hi = hi_avail - hi1;
    const double need = 1.2 * hmin;
    if (slack_lo < need || slack_hi < need)
        throw GeometryError(std::string(what) + ": no room for the cross window (slack " +
                            std::to_string(std::min(slack_lo, slack_hi)) + ", need " + std::to_string(need) +
                            "); enlarge cube_side or shrink Omega_1");
    const double glo = std::min(slack_lo, 5.0 * hmin);
    const double ghi = std::min(slack_hi, 5.0 * hmin);
    return SmoothCutoff::plateau(lo1 - glo, lo1, hi1, hi1 + ghi);
}

ChainPartition build_partition(const CubeChain& ch) {
    const Domain& dom = ch.domain;
    const int nc = ch.n_cubes();
    const double hmin = dom.min_spacing();
    ChainPartition part;
    part.psi.reserve(nc);

    if (ch.geometry == ChainGeometry::annulus || ch.geometry == ChainGeometry::torus_band) {
        const bool angular = ch.geometry == ChainGeometry::annulus;
        const double period = angular ? 2.0 * kPi : dom.length(ch.walk_axis);
        const Point center = ch.omega1.center();

        // cross window over the cubes' common margin-box extent
        double lo_avail = -1e300, hi_avail = 1e300;
        for (const Cube& c : ch.cubes) {
            if (angular) {
                const Point m = c.mid(dom);
                const double rc = dom.distance(m, center);
                double reach = 1e300;
                for (int a = 0; a < dom.dim(); ++a) reach = std::min(reach, (0.5 - ch.margin_frac) * c.side(dom, a));
                lo_avail = std::max(lo_avail, rc - reach);
                hi_avail = std::min(hi_avail, rc + reach);
            } else {
                const int ax = ch.omega1.axis();
                const double mid = 0.5 * (ch.omega1.inner() + ch.omega1.outer());
                const double qlo = local_coord(dom, ax, mid, c.lo(dom, ax));
                lo_avail = std::max(lo_avail, qlo + ch.margin_frac * c.side(dom, ax));
                hi_avail = std::min(hi_avail, qlo + (1.0 - ch.margin_frac) * c.side(dom, ax));
            }
        }
        const SmoothCutoff W = angular ? cross_window(ch.omega1.inner(), ch.omega1.outer(), lo_avail, hi_avail, hmin,
                                                      "annulus chain")
                                       : cross_window(ch.omega1.inner(), ch.omega1.outer(), lo_avail, hi_avail, hmin,
                                                      "band chain");

        // telescoping hats between consecutive walk positions
        const auto& t = ch.walk_t;
        std::vector<double> edge(nc);
        double min_gap = 1e300;
        for (int j = 0; j < nc; ++j) {
            const double tj = t[j], tn = t[(j + 1) % nc];
            double fwd = std::remainder(tn - tj, period);
            if (fwd <= 0) fwd += period;
            edge[j] = tj + 0.5 * fwd;  // edge between cube j and j+1
            min_gap = std::min(min_gap, fwd);
        }
        const double w = 0.3 * min_gap;

        auto walk_param = [&](const Point& p) -> double {
            if (angular) {
                const double dx = dom.axis_delta(0, center[0], p[0]);
                const double dy = dom.axis_delta(1, center[1], p[1]);
                return std::atan2(dy, dx);
            }
            return p[ch.walk_axis];
        };
        auto cross_param = [&](const Point& p) -> double {
            if (angular) return dom.distance(p, center);
            const int ax = ch.omega1.axis();
            const double mid = 0.5 * (ch.omega1.inner() + ch.omega1.outer());
            return local_coord(dom, ax, mid, p[ax]);
        };

        for (int j = 0; j < nc; ++j) {
            const double e0 = edge[(j + nc - 1) % nc], e1 = edge[j];
            part.psi.push_back(ScalarField::sample(dom, [&](const Point& p) {
                const double cw = W(cross_param(p));
                if (cw == 0.0) return 0.0;
                return cw * walk_hat(walk_param(p), e0, e1, w, period);
            }));
        }
    } else {
        // slab: tensor product of two wrapped hat partitions
        const int ax = ch.omega1.axis();
        const int wa0 = ch.walk_axis, wa1 = ch.walk_axis2;
        const double per0 = dom.length(wa0), per1 = dom.length(wa1);
        const int M0 = ch.slab_m0, M1 = int(ch.cubes.size()) / ch.slab_m0;

        double lo_avail = -1e300, hi_avail = 1e300;
        const double mid = 0.5 * (ch.omega1.inner() + ch.omega1.outer());
        for (const Cube& c : ch.cubes) {
            const double qlo = local_coord(dom, ax, mid, c.lo(dom, ax));
            lo_avail = std::max(lo_avail, qlo + ch.margin_frac * c.side(dom, ax));
            hi_avail = std::min(hi_avail, qlo + (1.0 - ch.margin_frac) * c.side(dom, ax));
        }
        const SmoothCutoff W =
            cross_window(ch.omega1.inner(), ch.omega1.outer(), lo_avail, hi_avail, hmin, "slab chain");

        auto edges_for = [&](int M, double period, double origin) {
            std::vector<double> e(M);
            for (int i = 0; i < M; ++i) e[i] = origin + period * (i + 0.5) / M;
            return e;
        };
        const std::vector<double> e0 = edges_for(M0, per0, dom.lower(wa0));
        const std::vector<double> e1 = edges_for(M1, per1, dom.lower(wa1));
        const double w0 = 0.3 * per0 / M0, w1 = 0.3 * per1 / M1;

        for (int q = 0; q < int(ch.cubes.size()); ++q) {
            const int i = ch.slab_iu[q], r = ch.slab_iv[q];
            part.psi.push_back(ScalarField::sample(dom, [&](const Point& p) {
                const double cw = W(local_coord(dom, ax, mid, p[ax]));
                if (cw == 0.0) return 0.0;
                const double h0 = walk_hat(p[wa0], e0[(i + M0 - 1) % M0], e0[i], w0, per0);
                if (h0 == 0.0) return 0.0;
                const double h1 = walk_hat(p[wa1], e1[(r + M1 - 1) % M1], e1[r], w1, per1);
                return cw * h0 * h1;
            }));
        }
    }

    // every piece must fit its cube's margin box
    for (int j = 0; j < nc; ++j) {
        const Cube& c = ch.cubes[j];
        const Point mid = c.mid(dom);
        for_each_node(dom, [&](const Index& id) {
            if (part.psi[j].at(id) == 0.0) return;
            const Point p = dom.node_point(id);
            for (int a = 0; a < dom.dim(); ++a) {
                const double x = local_coord(dom, a, mid[a], p[a]);
                const double m = c.side(dom, a) * ch.margin_frac;
                if (x < c.lo(dom, a) + m * (1.0 - 1e-9) || x > c.hi(dom, a) - m * (1.0 - 1e-9))
                    throw GeometryError("partition piece escapes its cube margin box (cube " + std::to_string(j) +
                                        ")");
            }
        });
    }

    // partition of unity on Omega_1 (exact by construction; audited here)
    for_each_node(dom, [&](const Index& id) {
        const Point p = dom.node_point(id);
        if (!ch.omega1.contains(dom, p)) return;
        double s = 0.0;
        for (const auto& psi : part.psi) s += psi.at(id);
        if (std::abs(s - 1.0) > 1e-10)
            throw GeometryError("partition does not sum to 1 on Omega_1 (sum " + std::to_string(s) + ")");
    });

    // unit-mass transfer windows on consecutive shrunk overlaps
    const int nlinks = nc - 1;
    for (int k = 0; k < nlinks; ++k) {
        const OverlapBox o = shrunk_overlap(dom, ch.cubes[k], ch.cubes[k + 1], ch.margin_frac);
        if (!o.ok || o.min_extent < 4.0 * dom.max_spacing())
            throw GeometryError("overlap too thin to support a transfer window (link " + std::to_string(k) + ")");
        part.eta.push_back(link_window(dom, o));
    }
    if (ch.closed) {
        const OverlapBox o = shrunk_overlap(dom, ch.cubes[nc - 1], ch.cubes[0], ch.margin_frac);
        if (!o.ok || o.min_extent < 4.0 * dom.max_spacing())
            throw GeometryError("closing overlap too thin");
    }
    return part;
}

Cube snapped_cube(const Domain& dom, const Point& center, const Index& cells) {
    Cube c;
    c.cells = cells;
    for (int a = 0; a < dom.dim(); ++a) {
        const double side = cells[a] * dom.spacing(a);
        const double lo = center[a] - 0.5 * side;
        int s = int(std::lround((lo - dom.lower(a)) / dom.spacing(a)));
        if (!dom.is_torus()) s = std::clamp(s, 0, dom.resolution(a) - cells[a]);
        c.start[a] = s;
    }
    return c;
}

void cube_radial_range(const Domain& dom, const Cube& c, const Point& center, double& dmin, double& dmax) {
    double nearest = 0.0, farthest = 0.0;
    const Point mid = c.mid(dom);
    for (int a = 0; a < dom.dim(); ++a) {
        const double cen = local_coord(dom, a, mid[a], center[a]);
        const double lo = c.lo(dom, a), hi = c.hi(dom, a);
        const double dn = std::max({lo - cen, cen - hi, 0.0});
        const double df = std::max(hi - cen, cen - lo);
        nearest += dn * dn;
        farthest += df * df;
    }
    dmin = std::sqrt(nearest);
    dmax = std::sqrt(farthest);
}

void validate_common(const CubeChain& ch, const ChainBuildOptions& opts) {
    const Domain& dom = ch.domain;
    if (ch.n_cubes() < 4) throw GeometryError("chain needs at least 4 cubes (N >= 3)");
    if (ch.n_cubes() > opts.cube_budget) throw GeometryError("cube budget exceeded");
    for (const Cube& c : ch.cubes) {
        if (c.volume(dom) > 1.0 + 1e-12 || c.max_side(dom) > 1.0 + 1e-12)
            throw GeometryError("cube exceeds unit side/volume bound");
        for (int a = 0; a < dom.dim(); ++a) {
            if (c.cells[a] < opts.min_cells_per_side)
                throw ResolutionError("cube under-resolved: needs >= " + std::to_string(opts.min_cells_per_side) +
                                      " cells per side (got " + std::to_string(c.cells[a]) +
                                      "); raise the resolution or enlarge cube_side");
            if (dom.is_torus() && c.cells[a] > dom.resolution(a) - 2) throw GeometryError("cube wraps the torus");
        }
    }
    const int nlinks = ch.n_cubes() - 1 + (ch.closed ? 1 : 0);
    for (int l = 0; l < nlinks; ++l) {
        const OverlapBox o =
            shrunk_overlap(dom, ch.cubes[l % ch.n_cubes()], ch.cubes[(l + 1) % ch.n_cubes()], ch.margin_frac);
        if (!o.ok || o.min_extent < 4.0 * dom.max_spacing())
            throw GeometryError("consecutive cubes overlap too thinly (link " + std::to_string(l) + ")");
    }
}

void validate_annulus_chain(const CubeChain& ch) {
    const Domain& dom = ch.domain;
    const Point c = ch.omega.center();
    for (const Cube& q : ch.cubes) {
        double dmin, dmax;
        cube_radial_range(dom, q, c, dmin, dmax);
        if (dmin < ch.omega.inner() || dmax > ch.omega.outer())
            throw GeometryError("cube not contained in Omega (annulus)");
        if (dmax < ch.omega1.inner() || dmin > ch.omega1.outer())
            throw GeometryError("cube does not intersect Omega_1");
    }
}

void validate_band_chain(const CubeChain& ch) {
    const Domain& dom = ch.domain;
    const int ax = ch.omega.axis();
    const double blo = ch.omega.inner(), bhi = ch.omega.outer();
    const double mid = 0.5 * (blo + bhi);
    for (const Cube& q : ch.cubes) {
        const double qlo = local_coord(dom, ax, mid, q.lo(dom, ax));
        const double qhi = qlo + q.side(dom, ax);
        if (qlo < blo || qhi > bhi) throw GeometryError("cube not contained in Omega (band)");
        if (qhi < ch.omega1.inner() || qlo > ch.omega1.outer()) throw GeometryError("cube does not intersect Omega_1");
    }
}

}  // namespace

const ChainPartition& CubeChain::partition() const {
    if (!part_) part_ = std::make_shared<const ChainPartition>(build_partition(*this));
    return *part_;
}

std::string CubeChain::describe() const {
    std::ostringstream os;
    const char* geo = geometry == ChainGeometry::annulus      ? "annulus"
                      : geometry == ChainGeometry::torus_band ? "torus-band"
                                                              : "torus-slab";
    os << "chain geometry=" << geo << " cubes=" << n_cubes() << " closed=" << (closed ? 1 : 0)
       << " margin_frac=" << margin_frac << "\n";
    for (int j = 0; j < n_cubes(); ++j) {
        const Cube& c = cubes[j];
        os << "  cube " << j << ": lo=(";
        for (int a = 0; a < domain.dim(); ++a) os << c.lo(domain, a) << (a + 1 < domain.dim() ? "," : "");
        os << ") hi=(";
        for (int a = 0; a < domain.dim(); ++a) os << c.hi(domain, a) << (a + 1 < domain.dim() ? "," : "");
        os << ")\n";
    }
    if (!lambdas.empty()) {
        os << "  lambdas:";
        for (double l : lambdas) os << " " << l;
        os << "\n";
    }
    return os.str();
}

CubeChain build_chain(const Region& omega1, const Region& omega, double cube_side, const Domain& domain,
                      const ChainBuildOptions& opts) {
    if (cube_side <= 0.0 || cube_side > 1.0) throw GeometryError("cube_side must lie in (0, 1]");

    Index cells{1, 1, 1};
    for (int a = 0; a < domain.dim(); ++a) {
        cells[a] = std::max(opts.min_cells_per_side, int(std::lround(cube_side / domain.spacing(a))));
        if (cells[a] * domain.spacing(a) > 1.0 + 1e-12)
            throw GeometryError("cube_side snaps above the unit side bound");
    }

    if (omega1.kind() == Region::Kind::annulus && omega.kind() == Region::Kind::annulus) {
        if (domain.dim() != 2)
            throw GeometryError("annulus chains are supported in 2D only (3D spherical shells out of scope)");
        if (!(omega.inner() < omega1.inner() && omega1.outer() < omega.outer()))
            throw GeometryError("need closure(Omega_1) strictly inside Omega");
        const Point c = omega.center();
        const double r_mid = 0.5 * (omega1.inner() + omega1.outer());
        const double circ = 2.0 * kPi * r_mid;
        const double side = cells[0] * domain.spacing(0);
        const int m0 = std::max(4, int(std::ceil(circ / (0.9 * side))));
        std::string last = "no layout tried";
        for (int M = m0; M <= opts.cube_budget; ++M) {
            CubeChain ch(domain, omega1, omega, ChainGeometry::annulus);
            ch.closed = true;
            for (int i = 0; i < M; ++i) {
                const double th = 2.0 * kPi * i / M;
                Point center{c[0] + r_mid * std::cos(th), c[1] + r_mid * std::sin(th), 0};
                ch.cubes.push_back(snapped_cube(domain, center, cells));
                const Point mid = ch.cubes.back().mid(domain);
                ch.walk_t.push_back(std::atan2(domain.axis_delta(1, c[1], mid[1]), domain.axis_delta(0, c[0], mid[0])));
            }
            try {
                validate_common(ch, opts);
                validate_annulus_chain(ch);
                ch.partition();
                return ch;
            } catch (const Error& e) {
                last = e.what();
            }
        }
        throw GeometryError("annulus chain: no valid cube count within budget (last: " + last + ")");
    }

    if (omega1.kind() == Region::Kind::band && omega.kind() == Region::Kind::band) {
        if (!domain.is_torus()) throw GeometryError("band chains require a torus domain");
        const int ax = omega.axis();
        if (omega1.axis() != ax) throw GeometryError("Omega_1 and Omega bands must share an axis");
        if (!(omega.inner() < omega1.inner() && omega1.outer() < omega.outer()))
            throw GeometryError("need closure(Omega_1) strictly inside Omega");
        const double mid = 0.5 * (omega1.inner() + omega1.outer());

        if (domain.dim() == 2) {
            const int wax = 1 - ax;
            const double L = domain.length(wax);
            const double side = cells[wax] * domain.spacing(wax);
            const int m0 = std::max(4, int(std::ceil(L / (0.9 * side))));
            std::string last = "no layout tried";
            for (int M = m0; M <= opts.cube_budget; ++M) {
                CubeChain ch(domain, omega1, omega, ChainGeometry::torus_band);
                ch.closed = true;
                ch.walk_axis = wax;
                for (int i = 0; i < M; ++i) {
                    Point center{0, 0, 0};
                    center[ax] = mid;
                    center[wax] = domain.lower(wax) + L * i / M;
                    ch.cubes.push_back(snapped_cube(domain, center, cells));
                    ch.walk_t.push_back(ch.cubes.back().mid(domain)[wax]);
                }
                try {
                    validate_common(ch, opts);
                    validate_band_chain(ch);
                    ch.partition();
                    return ch;
                } catch (const Error& e) {
                    last = e.what();
                }
            }
            throw GeometryError("band chain: no valid cube count within budget (last: " + last + ")");
        }

        if (domain.dim() == 3) {
            const int wa0 = (ax == 0) ? 1 : 0;
            const int wa1 = (ax == 2) ? 1 : 2;
            const double L0 = domain.length(wa0), L1 = domain.length(wa1);
            const double s0 = cells[wa0] * domain.spacing(wa0), s1 = cells[wa1] * domain.spacing(wa1);
            std::string last = "no layout tried";
            for (int extra = 0; extra < 12; ++extra) {
                const int M0 = std::max(4, int(std::ceil(L0 / (0.9 * s0)))) + extra;
                const int M1 = std::max(4, int(std::ceil(L1 / (0.9 * s1)))) + extra;
                if (M0 * M1 > opts.cube_budget) break;
                CubeChain ch(domain, omega1, omega, ChainGeometry::torus_slab);
                ch.closed = false;
                ch.walk_axis = wa0;
                ch.walk_axis2 = wa1;
                ch.slab_m0 = M0;
                for (int r = 0; r < M1; ++r) {
                    for (int i = 0; i < M0; ++i) {
                        const int ii = (r % 2 == 0) ? i : M0 - 1 - i;
                        Point center{0, 0, 0};
                        center[ax] = mid;
                        center[wa0] = domain.lower(wa0) + L0 * (ii + 0.0) / M0;
                        center[wa1] = domain.lower(wa1) + L1 * (r + 0.0) / M1;
                        ch.cubes.push_back(snapped_cube(domain, center, cells));
                        ch.slab_iu.push_back(ii);
                        ch.slab_iv.push_back(r);
                    }
                }
                try {
                    validate_common(ch, opts);
                    validate_band_chain(ch);
                    ch.partition();
                    return ch;
                } catch (const Error& e) {
                    last = e.what();
                }
            }
            throw GeometryError("slab chain: no valid layout within budget (last: " + last + ")");
        }
    }
    throw GeometryError("build_chain: unsupported (Omega_1, Omega) region pair");
}

// ---------------------------------------------------------------------------
// decomposition and the operator Phi
// ---------------------------------------------------------------------------

namespace {

// The centered difference conserves one functional per sign character
// sigma(x) = prod_a (+/-1)^{i_a}: sum sigma * div v = 0 for compactly
// supported v. A cube-supported piece is therefore solvable exactly only
// when all 2^n character sums vanish, not just the plain mean (the
// continuum obstruction). Each link transfer removes the full character
// defect of its piece through sign-weighted copies of the link window.

int character_count(int dim) { return 1 << dim; }

// Visit every node of a cube with its local and wrapped global indices.
template <typename F>
void for_each_cube_node(const Domain& dom, const Cube& c, F&& fn) {
    const int n0 = c.cells[0], n1 = dom.dim() > 1 ? c.cells[1] : 0, n2 = dom.dim() > 2 ? c.cells[2] : 0;
    Index lid{0, 0, 0}, gid{0, 0, 0};
    for (int i = 0; i <= n0; ++i)
        for (int j = 0; j <= n1; ++j)
            for (int k = 0; k <= n2; ++k) {
                lid = {i, j, k};
                for (int a = 0; a < dom.dim(); ++a) gid[a] = dom.wrap(a, c.start[a] + lid[a]);
                for (int a = dom.dim(); a < kMaxDim; ++a) gid[a] = 0;
                fn(lid, gid);
            }
}

double character_value(int mask, const Index& local) {
    int bits = 0;
    for (int a = 0; a < kMaxDim; ++a)
        if (mask & (1 << a)) bits += local[a];
    return (bits % 2 == 0) ? 1.0 : -1.0;
}

// Solve the small symmetric system G a = d by Gaussian elimination.
std::vector<double> solve_dense(std::vector<std::vector<double>> G, std::vector<double> d) {
    const int n = int(d.size());
    for (int c = 0; c < n; ++c) {
        int p = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(G[r][c]) > std::abs(G[p][c])) p = r;
        std::swap(G[c], G[p]);
        std::swap(d[c], d[p]);
        if (G[c][c] == 0.0) throw Error("character transfer system singular");
        for (int r = 0; r < n; ++r) {
            if (r == c) continue;
            const double f = G[r][c] / G[c][c];
            for (int k = c; k < n; ++k) G[r][k] -= f * G[c][k];
            d[r] -= f * d[c];
        }
    }
    for (int c = 0; c < n; ++c) d[c] /= G[c][c];
    return d;
}

}  // namespace

std::vector<ScalarField> decompose_chain(const ScalarField& h, const CubeChain& chain) {
    const Domain& dom = h.domain();
    if (!dom.same_grid(chain.domain)) throw FieldError("decompose_chain: grid mismatch");
    h.check_finite("decompose_chain");

    for_each_node(dom, [&](const Index& id) {
        if (h.at(id) != 0.0 && !chain.omega1.contains(dom, dom.node_point(id)))
            throw GeometryError("decompose_chain: h supported outside Omega_1");
    });
    const double mean = integrate(h);
    double vol = 1.0;
    for (int a = 0; a < dom.dim(); ++a) vol *= dom.length(a);
    if (std::abs(mean) > kMeanTolerance * std::max(h.max_abs(), 1e-300) * vol)
        throw MeanViolation("decompose_chain: nonzero mean " + std::to_string(mean), mean);

    const ChainPartition& part = chain.partition();
    const int nc = chain.n_cubes();
    const int dim = dom.dim();
    const int nchar = character_count(dim);
    const double cellvol = dom.cell_volume();

    std::vector<ScalarField> pieces;
    pieces.reserve(nc);
    for (int j = 0; j < nc; ++j) {
        ScalarField p(dom);
        for_each_node(dom, [&](const Index& id) { p.at(id) = h.at(id) * part.psi[j].at(id); });
        pieces.push_back(std::move(p));
    }

    chain.lambdas.assign(nc - 1, 0.0);
    for (int j = 0; j + 1 < nc; ++j) {
        const Cube& c = chain.cubes[j];

        // character defects of piece j on its cube lattice
        std::vector<double> defect(nchar, 0.0);
        for_each_cube_node(dom, c, [&](const Index& lid, const Index& gid) {
            const double val = pieces[j].at(gid);
            if (val == 0.0) return;
            for (int b = 0; b < nchar; ++b) defect[b] += character_value(b, lid) * val;
        });

        // Gram matrix of the sign-weighted link windows: G[b][t] = s[b xor t]
        const ScalarField& eta = part.eta[j];
        std::vector<double> s(nchar, 0.0);
        for_each_cube_node(dom, c, [&](const Index& lid, const Index& gid) {
            const double e = eta.at(gid);
            if (e == 0.0) return;
            for (int b = 0; b < nchar; ++b) s[b] += character_value(b, lid) * e;
        });
        std::vector<std::vector<double>> G(nchar, std::vector<double>(nchar, 0.0));
        for (int b = 0; b < nchar; ++b)
            for (int t = 0; t < nchar; ++t) G[b][t] = s[b ^ t];
        const std::vector<double> amount = solve_dense(G, defect);

        chain.lambdas[j] = defect[0] * cellvol;  // the paper's transfer constant

        for_each_cube_node(dom, c, [&](const Index& lid, const Index& gid) {
            const double e = eta.at(gid);
            if (e == 0.0) return;
            double t = 0.0;
            for (int b = 0; b < nchar; ++b) t += amount[b] * character_value(b, lid) * e;
            pieces[j].at(gid) -= t;
            pieces[j + 1].at(gid) += t;
        });
    }
    return pieces;
}

namespace {

Domain cube_domain(const Domain& dom, const Cube& c) {
    Point lo{0, 0, 0}, len{0, 0, 0};
    Index res{1, 1, 1};
    for (int a = 0; a < dom.dim(); ++a) {
        lo[a] = c.lo(dom, a);
        len[a] = c.side(dom, a);
        res[a] = c.cells[a];
    }
    return Domain(DomainKind::box, dom.dim(), lo, len, res);
}

}  // namespace

VectorField div_inverse(const ScalarField& h, const Region& omega1, const Region& omega, const CubeChain& chain) {
    const Domain& dom = h.domain();
    if (!dom.same_grid(chain.domain)) throw FieldError("div_inverse: grid mismatch");
    for_each_node(dom, [&](const Index& id) {
        if (h.at(id) != 0.0 && !omega1.contains(dom, dom.node_point(id)))
            throw GeometryError("div_inverse: h supported outside Omega_1");
    });
    (void)omega;

    const std::vector<ScalarField> pieces = decompose_chain(h, chain);
    VectorField v(dom);

    for (int j = 0; j < chain.n_cubes(); ++j) {
        const Cube& c = chain.cubes[j];
        const Domain cdom = cube_domain(dom, c);
        ScalarField hj(cdom);
        for_each_node(cdom, [&](const Index& lid) {
            Index gid{0, 0, 0};
            for (int a = 0; a < dom.dim(); ++a) gid[a] = dom.wrap(a, c.start[a] + lid[a]);
            hj.at(lid) = pieces[j].at(gid);
        });
        const VectorField vj = solve_div_cube(hj, chain.margin(j));
        for_each_node(cdom, [&](const Index& lid) {
            Index gid{0, 0, 0};
            for (int a = 0; a < dom.dim(); ++a) gid[a] = dom.wrap(a, c.start[a] + lid[a]);
            for (int a = 0; a < dom.dim(); ++a) {
                const double val = vj.comp(a).at(lid);
                if (val != 0.0) v.comp(a).at(gid) += val;
            }
        });
    }
    return v;
}

}  // namespace divsg
