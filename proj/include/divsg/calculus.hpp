#pragma once

#include "divsg/fields.hpp"

namespace divsg {

/// Centered 2nd-order partial along `axis`; one-sided 2nd-order at box
/// boundaries, periodic wrap on torus axes.
ScalarField partial(const ScalarField& f, int axis);

/// Discrete divergence built from `partial`.
ScalarField divergence(const VectorField& F);

struct IntegralResult {
    double value = 0.0;
    bool empty_region = false;
};

/// Node-weighted quadrature restricted to nodes in R (trapezoid weights on
/// boxes, plain cell-volume weights on tori).
IntegralResult integrate_region(const ScalarField& f, const Region& r);
double integrate(const ScalarField& f, const Region& r);
double integrate(const ScalarField& f);

/// Discrete convolution with a compactly supported C-infinity bump kernel of
/// support radius `width` (per axis, separable). Circular on torus axes;
/// weights renormalized near box boundaries. Unit discrete mass, so constants
/// are reproduced exactly.
ScalarField mollify(const ScalarField& f, double width);
VectorField mollify(const VectorField& F, double width);

/// Cumulative line integral matched to the centered difference: V_0 = 0,
/// V_1 = h (f_0 + f_1)/2, V_{k+1} = V_{k-1} + 2 h f_k. Each parity sublattice
/// carries a midpoint rule, so (V_{k+1} - V_{k-1})/(2h) = f_k exactly at
/// interior nodes and the rule stays 2nd-order accurate as a quadrature.
std::vector<double> cumulative_integral(const std::vector<double>& f, double h);

/// Plain trapezoid total of a sampled line.
double trapezoid(const std::vector<double>& f, double h);

/// 2D: grid curl of a stream function, (D_y psi, -D_x psi). Divergence-free
/// under the discrete divergence bit-exactly (centered differences commute).
VectorField solenoidal_from_stream(const ScalarField& psi);

/// 3D: grid curl of a vector potential, likewise exactly solenoidal.
VectorField solenoidal_from_potential(const VectorField& A);

}  // namespace divsg
