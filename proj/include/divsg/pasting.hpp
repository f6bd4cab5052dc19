#pragma once

#include <memory>
#include <optional>

#include "divsg/divsolve.hpp"
#include "divsg/norms.hpp"

namespace divsg {

enum class PasteGeometry { disk_nest, band_complement, band_nest, annulus_nest };
enum class Connectivity { annulus_connected, band_connected, disconnected };

/// Coincidence-zone layout derived from (K, U): nested shells W0 inside W1
/// with the transition region Omega = int W1 \ W0 and the corrector support
/// annulus Omega_1 strictly inside it. The connectivity certificate is
/// computed by flood fill on the grid nodes of U \ K; "disconnected" layouts
/// (band and annulus nests) only support the obstruction check.
class PasteRegions {
  public:
    /// K = ball(rK) inside U = ball(rU) in a box or torus: U \ K is an annulus.
    static PasteRegions disk_nest(const Domain& dom, Point center, double rK, double rU);
    /// K = torus band, U = complement of a closed disk away from it: U \ K connected.
    static PasteRegions band_complement(const Domain& dom, int band_axis, double band_lo, double band_hi,
                                        Point hole_center, double hole_radius);
    /// K = band inside a wider band U on the torus: U \ K has two components.
    static PasteRegions band_nest(const Domain& dom, int axis, double k_lo, double k_hi, double u_lo, double u_hi);
    /// K = annulus inside a wider annulus U in a box: U \ K has two components.
    static PasteRegions annulus_nest(const Domain& dom, Point center, double k_in, double k_out, double u_in,
                                     double u_out);

    const Domain& domain() const { return dom_; }
    PasteGeometry geometry() const { return geometry_; }
    Connectivity certificate() const { return certificate_; }
    const Region& K() const { return K_; }
    const Region& U() const { return U_; }
    const ScalarField& xi() const { return xi_; }

    /// Nodes where the pasted field must equal Y bit-exactly.
    bool in_w0(const Point& p) const;
    /// Nodes where the pasted field must equal X bit-exactly.
    bool outside_w1(const Point& p) const;

    /// Transition components (one region per connected piece of Omega).
    const std::vector<Region>& omega_components() const { return omega_comps_; }
    const std::vector<Region>& omega1_components() const { return omega1_comps_; }

    /// The frozen corrector chain (pasteable layouts only; built on first use).
    const CubeChain& chain() const;

    /// Cobordant probe surfaces for the obstruction report.
    struct ProbePair {
        std::string description;
        // Y-side and X-side flux probes
        int axis = 0;
        bool slices = false;  // torus slices vs circles
        double y_coord = 0, x_coord = 0;
        Point center{0, 0, 0};
        double y_radius = 0, x_radius = 0;
    };
    const ProbePair& probe() const { return probe_; }

  private:
    PasteRegions(Domain d, PasteGeometry g) : dom_(std::move(d)), geometry_(g), xi_(dom_) {}
    void certify(int expected_components);

    Domain dom_;
    PasteGeometry geometry_;
    Region K_ = Region::full(), U_ = Region::full();
    ScalarField xi_;
    Connectivity certificate_ = Connectivity::disconnected;
    std::vector<Region> omega_comps_, omega1_comps_;
    ProbePair probe_;
    mutable std::shared_ptr<CubeChain> chain_;
};

struct Hypersurface {
    enum class Kind { circle, sphere, torus_slice };
    Kind kind = Kind::circle;
    Point center{0, 0, 0};
    double radius = 0.0;
    int axis = 0;
    double coordinate = 0.0;
    int samples = 1024;

    static Hypersurface circle(Point c, double r) { return {Kind::circle, c, r, 0, 0.0, 1024}; }
    static Hypersurface sphere(Point c, double r) { return {Kind::sphere, c, r, 0, 0.0, 4096}; }
    static Hypersurface torus_slice(int axis, double coord) {
        return {Kind::torus_slice, {0, 0, 0}, 0.0, axis, coord, 1024};
    }
};

/// Quadrature of the outward normal component over a uniform parameter sample.
double flux(const VectorField& F, const Hypersurface& gamma);

struct ObstructionRecord {
    bool obstructed = false;
    double mismatch = 0.0;                // max |m| over transition components
    std::vector<double> component_means;  // per component, in walk order
    double flux_y = 0.0, flux_x = 0.0;    // fluxes across the cobordant probes
    std::string description;
};

struct ObstructionError : Error {
    ObstructionRecord record;
    ObstructionError(const std::string& msg, ObstructionRecord rec) : Error(msg), record(std::move(rec)) {}
};

struct PasteOptions {
    double div_tolerance = 1e-8;          // relative, for the declared divergence-free inputs
    double obstruction_tolerance = 1e-7;  // relative to the fields' scale
};

/// Flux-balance verdict: integrates div(xi Y + (1-xi) X) per transition
/// component, which for these geometries equals the flux mismatch between
/// the cobordant boundary surfaces.
ObstructionRecord check_obstruction(const VectorField& X, const VectorField& Y, const PasteRegions& regions,
                                    const PasteOptions& opts = {});

struct PasteReport {
    VectorField Z;
    std::int64_t w0_nodes = 0, w0_mismatches = 0;
    std::int64_t outside_nodes = 0, outside_mismatches = 0;
    double residual = 0.0;  // ||div Z||_inf
    double ratio = 0.0;     // |Z - X|_r / |Y - X|_{r;U}
    int r = 1;
    std::optional<ObstructionRecord> obstruction;
    std::string to_text() const;
};

/// The pasting pipeline: blend with the regions' cutoff, cancel the blend's
/// divergence through the chain solver, verify the coincidence zones
/// bit-exactly. Throws ObstructionError when the geometry or fluxes forbid it.
PasteReport paste(const VectorField& X, const VectorField& Y, const PasteRegions& regions, int r,
                  const PasteOptions& opts = {});

/// Measured pipeline constant: max ratio over a small battery of canonical
/// perturbations (plus the paper's +1 slack). Cached per regions object.
double measured_paste_constant(const PasteRegions& regions, const VectorField& X, int r);

struct SmoothGlobalOptions {
    double div_tolerance = 1e-8;
    Point disk_center{0.5, 0.5, 0};
    double disk_radius = 0.25;
};

/// Single-pass global smoothing on the torus: blends two overlapping-window
/// mollifications with a two-element partition of unity and cancels the
/// blend's divergence on the annulus around the window boundary.
VectorField smooth_global(const VectorField& X, double width, const SmoothGlobalOptions& opts = {});

struct ExtendReport {
    PasteReport paste_report;
    double smoothing_width = 0.0;
    double smoothing_error = 0.0;   // ||Xhat - X||_{C^r}
    double smoothing_target = 0.0;  // (1/2C) ||Y - X||_{C^r;U}
    bool target_reached = false;
    double c_meas = 0.0;
    double bound_rhs = 0.0;  // (C_meas - 1/2) ||Y - X||
    bool bound_holds = false;
};

/// Corollary-style extension: smooth X first (width by bisection against the
/// measured constant), then paste Y against the smoothed field.
ExtendReport extend_regular(const VectorField& X, const VectorField& Y, const PasteRegions& regions, int r,
                            const PasteOptions& opts = {});

}  // namespace divsg
