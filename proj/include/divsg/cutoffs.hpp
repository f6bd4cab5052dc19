#pragma once

#include "divsg/fields.hpp"

namespace divsg {

struct CubeChain;  // divsolve.hpp

/// exp(-1/t)-based smoothstep: 0 for t <= 0, 1 for t >= 1, C-infinity monotone
/// in between. Plateau values are exact (returned as literal 0.0 / 1.0).
double smoothstep(double t);

/// C-infinity plateau profile with breakpoints a <= b <= c <= d:
/// 0 on (-inf,a], rises on [a,b], 1 on [b,c], falls on [c,d], 0 on [d,inf).
/// One-sided variants drop an edge by pushing its breakpoints to +/-infinity.
class SmoothCutoff {
  public:
    static SmoothCutoff plateau(double a, double b, double c, double d);
    static SmoothCutoff rising(double a, double b);
    static SmoothCutoff falling(double c, double d);

    double operator()(double x) const;

    double a() const { return a_; }
    double b() const { return b_; }
    double c() const { return c_; }
    double d() const { return d_; }

  private:
    SmoothCutoff(double a, double b, double c, double d);
    double a_, b_, c_, d_;
};

/// Compactly supported C-infinity bump on (0, rho) with unit integral,
/// supported in (rho/8, 7 rho/8). Normalization is by dense quadrature at
/// construction; `lattice_samples` renormalizes on a concrete grid so the
/// discrete trapezoid integral is exactly 1 there.
class UnitMassWindow {
  public:
    explicit UnitMassWindow(double rho);

    double rho() const { return rho_; }
    double operator()(double x) const { return scale_ * raw(x); }

    /// m+1 samples over [0, rho] with trapezoid(samples)*h == 1 exactly.
    std::vector<double> lattice_samples(int cells) const;

  private:
    double raw(double x) const;
    double rho_;
    double scale_;
};

/// Scalar field equal to 1 on `inner`, 0 outside `outer`, transitioning with
/// the smoothstep profile along the radial (ball/annulus) or axial (band)
/// coordinate. Supported nestings: ball-in-ball, annulus-in-annulus,
/// band-in-band, complement(ball)-in-complement(ball).
ScalarField band_cutoff(const Domain& dom, const Region& inner, const Region& outer);

struct ChainPartition {
    std::vector<ScalarField> psi;  // one per cube, sum = 1 on the inner annulus
    std::vector<ScalarField> eta;  // one per transfer link, unit discrete integral
};

/// Partition of unity subordinate to a cube chain plus the unit-integral
/// transfer windows on consecutive overlaps.
const ChainPartition& chain_partition(const CubeChain& chain);

}  // namespace divsg
