#include "divsg/norms.hpp"

#include <atomic>
#include <cmath>
#include <random>
#include <sstream>

#include "divsg/calculus.hpp"

namespace divsg {

namespace {

std::atomic<std::int64_t> g_sandwich_checked{0};
std::atomic<std::int64_t> g_sandwich_violations{0};

// all multi-indices of total order k in dim axes
void multi_indices(int dim, int k, std::vector<Index>& out) {
    out.clear();
    if (dim == 1) {
        out.push_back({k, 0, 0});
        return;
    }
    if (dim == 2) {
        for (int i = 0; i <= k; ++i) out.push_back({i, k - i, 0});
        return;
    }
    for (int i = 0; i <= k; ++i)
        for (int j = 0; j + i <= k; ++j) out.push_back({i, j, k - i - j});
}

ScalarField mixed_partial(const ScalarField& f, const Index& sigma) {
    ScalarField g = f;
    for (int a = 0; a < kMaxDim; ++a)
        for (int c = 0; c < sigma[a]; ++c) g = partial(g, a);
    return g;
}

// direction tuples for the Whitney directional-derivative estimate:
// all canonical tuples (exact lower bound against |.|_r) plus a fixed
// spread of unit directions
std::vector<Vector> direction_set(int dim) {
    std::vector<Vector> dirs;
    for (int a = 0; a < dim; ++a) {
        Vector e{0, 0, 0};
        e[a] = 1.0;
        dirs.push_back(e);
    }
    if (dim == 2) {
        for (int k = 0; k < 12; ++k) {
            const double th = kPi * k / 12.0;
            dirs.push_back({std::cos(th), std::sin(th), 0});
        }
    } else if (dim == 3) {
        for (int k = 0; k < 24; ++k) {
            const double z = -1.0 + 2.0 * (k + 0.5) / 24.0;
            const double th = 2.399963229728653 * k;  // golden angle
            const double rr = std::sqrt(std::max(0.0, 1.0 - z * z));
            dirs.push_back({rr * std::cos(th), rr * std::sin(th), z});
        }
    }
    return dirs;
}

struct DerivativeTable {
    // per component, per order: fields of all mixed partials (multi-index order matches sigmas[k])
    std::vector<std::vector<std::vector<ScalarField>>> d;  // [comp][order][sigma]
    std::vector<std::vector<Index>> sigmas;                // [order]
    int dim = 0;
    int ncomp = 0;
};

DerivativeTable build_table(const std::vector<const ScalarField*>& comps, int r) {
    DerivativeTable t;
    t.dim = comps[0]->domain().dim();
    t.ncomp = int(comps.size());
    t.sigmas.resize(r + 1);
    t.d.resize(t.ncomp);
    for (int k = 0; k <= r; ++k) multi_indices(t.dim, k, t.sigmas[k]);
    for (int c = 0; c < t.ncomp; ++c) {
        t.d[c].resize(r + 1);
        for (int k = 0; k <= r; ++k)
            for (const Index& s : t.sigmas[k]) t.d[c][k].push_back(mixed_partial(*comps[c], s));
    }
    return t;
}

// multinomial contraction D^k X(x; u,...,u) from mixed partials (equal
// directions suffice together with the basis tuples for the audit bounds)
double directional_value(const DerivativeTable& t, int order, const Index& node, const Vector& u) {
    double sq = 0.0;
    for (int c = 0; c < t.ncomp; ++c) {
        double acc = 0.0;
        for (size_t si = 0; si < t.sigmas[order].size(); ++si) {
            const Index& s = t.sigmas[order][si];
            // multinomial coefficient order! / prod(sigma_a!)
            static const double fact[] = {1, 1, 2, 6};
            double coef = fact[order];
            double mono = 1.0;
            for (int a = 0; a < t.dim; ++a) {
                coef /= fact[s[a]];
                for (int q = 0; q < s[a]; ++q) mono *= u[a];
            }
            acc += coef * mono * t.d[c][order][si].at(node);
        }
        sq += acc * acc;
    }
    return std::sqrt(sq);
}

NormReport cr_norm_impl(const std::vector<const ScalarField*>& comps, int r, const Region& R) {
    if (r < 0 || r > 3) throw FieldError("cr_norm: unsupported order (r must be 0..3)");
    const Domain& dom = comps[0]->domain();
    const DerivativeTable t = build_table(comps, r);
    const std::vector<Vector> dirs = direction_set(dom.dim());

    NormReport rep;
    rep.r = r;
    rep.per_order.assign(r + 1, 0.0);
    double whitney = 0.0;
    bool any = false;

    for_each_node(dom, [&](const Index& id) {
        if (!R.contains(dom, dom.node_point(id))) return;
        any = true;
        for (int k = 0; k <= r; ++k) {
            // basis-tuple magnitudes: certified lower bounds for ||D^k||
            for (size_t si = 0; si < t.sigmas[k].size(); ++si) {
                double sq = 0.0;
                for (int c = 0; c < t.ncomp; ++c) {
                    const double e = t.d[c][k][si].at(id);
                    rep.per_order[k] = std::max(rep.per_order[k], std::abs(e));
                    sq += e * e;
                }
                whitney = std::max(whitney, std::sqrt(sq));
            }
            // diagonal directional sample (symmetric forms attain their norm
            // on the diagonal)
            if (k >= 1)
                for (const Vector& u : dirs) whitney = std::max(whitney, directional_value(t, k, id, u));
        }
    });
    if (!any) throw FieldError("cr_norm: region contains no grid node");

    rep.value = 0.0;
    for (double v : rep.per_order) rep.value = std::max(rep.value, v);
    rep.whitney = whitney;

    // audit the norm-equivalence sandwich for this report
    const double upper = std::pow(double(dom.dim()), 0.5 * (r + 1)) * rep.value;
    g_sandwich_checked.fetch_add(1, std::memory_order_relaxed);
    if (!(rep.value <= rep.whitney * (1.0 + 1e-12) && rep.whitney <= upper * (1.0 + 1e-12)))
        g_sandwich_violations.fetch_add(1, std::memory_order_relaxed);
    return rep;
}

HolderPart holder_impl(const std::vector<const ScalarField*>& comps, int r, double alpha, const Region& R,
                       std::int64_t pair_budget) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw FieldError("holder_seminorm: alpha must lie in (0,1]");
    const Domain& dom = comps[0]->domain();
    const DerivativeTable t = build_table(comps, r);

    std::vector<Index> nodes;
    for_each_node(dom, [&](const Index& id) {
        if (R.contains(dom, dom.node_point(id))) nodes.push_back(id);
    });
    if (nodes.size() < 2) throw FieldError("holder_seminorm: region needs at least two nodes");

    const auto& sig = t.sigmas[r];
    auto pair_value = [&](const Index& a, const Index& b) {
        const double dist = dom.distance(dom.node_point(a), dom.node_point(b));
        if (dist == 0.0) return 0.0;
        double worst = 0.0;
        for (int c = 0; c < t.ncomp; ++c)
            for (size_t si = 0; si < sig.size(); ++si)
                worst = std::max(worst, std::abs(t.d[c][r][si].at(a) - t.d[c][r][si].at(b)));
        return worst / std::pow(dist, alpha);
    };

    HolderPart out;
    out.alpha = alpha;
    const std::int64_t all_pairs = std::int64_t(nodes.size()) * std::int64_t(nodes.size() - 1) / 2;
    if (all_pairs <= pair_budget) {
        out.exhaustive = true;
        for (size_t i = 0; i < nodes.size(); ++i)
            for (size_t j = i + 1; j < nodes.size(); ++j) out.value = std::max(out.value, pair_value(nodes[i], nodes[j]));
        return out;
    }

    // near-neighbour pairs (axis and diagonal offsets), then a seeded spread
    std::vector<Index> offsets;
    {
        const int range = 2;
        Index off{0, 0, 0};
        for (off[0] = -range; off[0] <= range; ++off[0])
            for (off[1] = (dom.dim() > 1 ? -range : 0); off[1] <= (dom.dim() > 1 ? range : 0); ++off[1])
                for (off[2] = (dom.dim() > 2 ? -range : 0); off[2] <= (dom.dim() > 2 ? range : 0); ++off[2]) {
                    if (off[0] > 0 || (off[0] == 0 && (off[1] > 0 || (off[1] == 0 && off[2] > 0))))
                        offsets.push_back(off);
                }
    }
    std::int64_t used = 0;
    for (const Index& id : nodes) {
        for (const Index& off : offsets) {
            Index nb = id;
            bool ok = true;
            for (int a = 0; a < dom.dim(); ++a) {
                nb[a] += off[a];
                if (dom.is_torus()) nb[a] = dom.wrap(a, nb[a]);
                else if (nb[a] < 0 || nb[a] >= dom.nodes(a)) ok = false;
            }
            if (!ok || !R.contains(dom, dom.node_point(nb))) continue;
            out.value = std::max(out.value, pair_value(id, nb));
            ++used;
        }
    }
    std::mt19937_64 rng(0x5eedULL);
    while (used < pair_budget) {
        const Index& a = nodes[rng() % nodes.size()];
        const Index& b = nodes[rng() % nodes.size()];
        if (!(a == b)) out.value = std::max(out.value, pair_value(a, b));
        ++used;
    }
    return out;
}

}  // namespace

std::string NormReport::to_text() const {
    std::ostringstream os;
    os << "r=" << r << "\n";
    os << "value=" << value << "\n";
    for (size_t k = 0; k < per_order.size(); ++k) os << "order" << k << "=" << per_order[k] << "\n";
    os << "whitney=" << whitney << "\n";
    if (holder) {
        os << "holder_alpha=" << holder->alpha << "\n";
        os << "holder_value=" << holder->value << "\n";
        os << "holder_exhaustive=" << (holder->exhaustive ? 1 : 0) << "\n";
    }
    return os.str();
}

NormReport cr_norm(const VectorField& F, int r, const Region& R) {
    std::vector<const ScalarField*> comps;
    for (int a = 0; a < F.dim(); ++a) comps.push_back(&F.comp(a));
    return cr_norm_impl(comps, r, R);
}

NormReport cr_norm(const ScalarField& f, int r, const Region& R) {
    return cr_norm_impl({&f}, r, R);
}

HolderPart holder_seminorm(const VectorField& F, int r, double alpha, const Region& R, std::int64_t pair_budget) {
    std::vector<const ScalarField*> comps;
    for (int a = 0; a < F.dim(); ++a) comps.push_back(&F.comp(a));
    return holder_impl(comps, r, alpha, R, pair_budget);
}

HolderPart holder_seminorm(const ScalarField& f, int r, double alpha, const Region& R, std::int64_t pair_budget) {
    return holder_impl({&f}, r, alpha, R, pair_budget);
}

double operator_norm(const double A[kMaxDim][kMaxDim], int n) {
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (!std::isfinite(A[i][j])) throw FieldError("operator_norm: non-finite entry");
    // power iteration on A^T A
    double B[kMaxDim][kMaxDim] = {};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += A[k][i] * A[k][j];
            B[i][j] = s;
        }
    double best = 0.0;
    for (int start = 0; start < n + 1; ++start) {
        double v[kMaxDim] = {};
        if (start < n) v[start] = 1.0;
        else
            for (int i = 0; i < n; ++i) v[i] = 1.0 / std::sqrt(double(n));
        double lam = 0.0;
        for (int it = 0; it < 500; ++it) {
            double w[kMaxDim] = {};
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) w[i] += B[i][j] * v[j];
            double norm = 0.0;
            for (int i = 0; i < n; ++i) norm += w[i] * w[i];
            norm = std::sqrt(norm);
            if (norm == 0.0) break;
            double new_lam = 0.0;
            for (int i = 0; i < n; ++i) {
                v[i] = w[i] / norm;
                new_lam += v[i] * w[i];
            }
            if (std::abs(new_lam - lam) <= 1e-12 * std::max(1.0, std::abs(new_lam))) {
                lam = new_lam;
                break;
            }
            lam = new_lam;
        }
        best = std::max(best, lam);
    }
    return std::sqrt(std::max(0.0, best));
}

double operator_norm_2x2(double a00, double a01, double a10, double a11) {
    double A[kMaxDim][kMaxDim] = {};
    A[0][0] = a00;
    A[0][1] = a01;
    A[1][0] = a10;
    A[1][1] = a11;
    return operator_norm(A, 2);
}

SandwichAudit sandwich_audit() {
    return {g_sandwich_checked.load(), g_sandwich_violations.load()};
}

void reset_sandwich_audit() {
    g_sandwich_checked = 0;
    g_sandwich_violations = 0;
}

}  // namespace divsg
