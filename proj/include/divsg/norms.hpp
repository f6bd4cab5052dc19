#pragma once

#include <optional>

#include "divsg/fields.hpp"

namespace divsg {

struct HolderPart {
    double alpha = 0.0;
    double value = 0.0;
    bool exhaustive = false;
};

/// Finite-difference norm estimate: per-order sup norms of mixed partials,
/// the max-over-entries norm |.|_r, and the Whitney-style C^r value built
/// from directional-derivative suprema (so the equivalence sandwich
/// |.|_r <= ||.||_{C^r} <= n^{(r+1)/2} |.|_r can be audited per report).
struct NormReport {
    int r = 0;
    double value = 0.0;                 // |.|_r (including the Holder part when present)
    std::vector<double> per_order;      // sup of |partial^sigma| by total order 0..r
    double whitney = 0.0;               // ||.||_{C^r} estimate
    std::optional<HolderPart> holder;

    std::string to_text() const;
};

/// Sup over nodes in R of mixed centered-difference partials up to order r.
/// r <= 3; higher orders are rejected.
NormReport cr_norm(const VectorField& F, int r, const Region& R);
NormReport cr_norm(const ScalarField& f, int r, const Region& R);

/// Max over sampled node pairs of |D^sigma F(y) - D^sigma F(x)| / |y-x|^alpha
/// over top-order sigma. All pairs when the budget permits, otherwise a
/// seeded stratified sample including nearest neighbours.
HolderPart holder_seminorm(const VectorField& F, int r, double alpha, const Region& R, std::int64_t pair_budget);
HolderPart holder_seminorm(const ScalarField& f, int r, double alpha, const Region& R, std::int64_t pair_budget);

/// Largest singular value by power iteration on A^T A (tolerance 1e-12).
double operator_norm(const double A[kMaxDim][kMaxDim], int n);
double operator_norm_2x2(double a00, double a01, double a10, double a11);

/// Every cr_norm call records its sandwich triple here so the acceptance
/// suite can audit |.|_r <= ||.||_{C^r} <= n^{(r+1)/2} |.|_r across the run.
struct SandwichAudit {
    std::int64_t checked = 0;
    std::int64_t violations = 0;
};
SandwichAudit sandwich_audit();
void reset_sandwich_audit();

}  // namespace divsg
