#pragma once

#include <memory>
#include <optional>
#include <string>

#include "divsg/calculus.hpp"
#include "divsg/cutoffs.hpp"
#include "divsg/fields.hpp"

namespace divsg {

/// Node-aligned axis box. `start` is the node index of the low corner (any
/// integer on torus axes, wrapped on access); `cells` counts grid cells per
/// axis, so the cube carries cells+1 nodes per axis.
struct Cube {
    Index start{0, 0, 0};
    Index cells{0, 0, 0};

    double lo(const Domain& d, int a) const { return d.coord(a, start[a]); }
    double hi(const Domain& d, int a) const { return d.coord(a, start[a] + cells[a]); }
    double side(const Domain& d, int a) const { return cells[a] * d.spacing(a); }
    double max_side(const Domain& d) const;
    double volume(const Domain& d) const;
    Point mid(const Domain& d) const;
};

enum class ChainGeometry { annulus, torus_band, torus_slab };

/// Ordered overlapping cubes covering the closure of an inner annulus/band
/// Omega_1 inside a support region Omega, with a spanning transfer path.
struct CubeChain {
    CubeChain(Domain dom, Region omega1, Region omega, ChainGeometry geo)
        : domain(std::move(dom)), omega1(std::move(omega1)), omega(std::move(omega)), geometry(geo) {}

    Domain domain;
    Region omega1;
    Region omega;
    ChainGeometry geometry;
    std::vector<Cube> cubes;  // path order; transfers run along consecutive pairs
    bool closed = false;      // last cube overlaps the first (torus walks)
    double margin_frac = 0.125;

    // walk layout (filled by build_chain)
    std::vector<double> walk_t;  // per-cube walk parameter (angle / coordinate)
    int walk_axis = 0;           // band walks
    int walk_axis2 = 0;          // slab second walk axis
    int slab_m0 = 0;             // slab row length
    std::vector<int> slab_iu, slab_iv;

    /// Transfer constants recorded by the last decompose_chain run.
    mutable std::vector<double> lambdas;

    int n_cubes() const { return int(cubes.size()); }
    double margin(int j) const { return cubes[j].max_side(domain) * margin_frac; }

    const ChainPartition& partition() const;
    std::string describe() const;

  private:
    mutable std::shared_ptr<const ChainPartition> part_;
};

/// Compactly supported solution of div v = h on an axis box Q (the domain of
/// h must be a box). Base case n=1 integrates h; higher dimensions split off a
/// unit-mass window along the last axis and recurse on the column integrals.
/// The returned field vanishes at every node within margin/2 of the boundary.
VectorField solve_div_cube(const ScalarField& h, double margin);

struct ChainBuildOptions {
    int cube_budget = 64;
    int min_cells_per_side = 8;
};

/// Ordered covering chain walking once around/along the annulus or band.
/// Supported: 2D annuli (box or torus domains), 2D torus bands,
/// 3D torus slabs (serpentine path).
CubeChain build_chain(const Region& omega1, const Region& omega, double cube_side, const Domain& domain,
                      const ChainBuildOptions& opts = {});

/// h = sum of pieces, each supported in its cube with zero integral, realized
/// by sequential mass transfer through the unit-integral link windows.
std::vector<ScalarField> decompose_chain(const ScalarField& h, const CubeChain& chain);

/// The operator Phi: h -> v with div v = h, supp v inside Omega (bit-exact
/// zero outside the chain's cubes), linear in h for a frozen chain.
VectorField div_inverse(const ScalarField& h, const Region& omega1, const Region& omega, const CubeChain& chain);

/// Relative tolerance for the zero-mean precondition.
inline constexpr double kMeanTolerance = 1e-8;

}  // namespace divsg
