#pragma once

#include <stdexcept>
#include <string>

namespace divsg {

/// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Non-finite samples, shape mismatches, bad domain parameters.
struct FieldError : Error {
    using Error::Error;
};

/// Point outside a box domain, escape from an interpolation grid.
struct RangeError : Error {
    using Error::Error;
};

/// Region/shell layout that cannot be realized (containment, budget, shape).
struct GeometryError : Error {
    using Error::Error;
};

/// Grid too coarse for the requested construction.
struct ResolutionError : Error {
    using Error::Error;
};

/// Violated zero-mean precondition; carries the measured integral.
struct MeanViolation : Error {
    double measured;
    MeanViolation(const std::string& msg, double m) : Error(msg), measured(m) {}
};

/// Support of the data too close to a cube face.
struct MarginError : Error {
    using Error::Error;
};

/// Newton inversion failed to converge at some nodes.
struct InversionError : Error {
    using Error::Error;
};

/// Admissibility bound on the matrix perturbation violated; carries the measured norm.
struct AdmissibilityError : Error {
    double measured;
    AdmissibilityError(const std::string& msg, double m) : Error(msg), measured(m) {}
};

/// Collar clamp of a Jacobian target exceeded its mass budget.
struct VolumeBudgetError : Error {
    using Error::Error;
};

/// Scenario/config file problems (carry line/position in the message).
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace divsg
