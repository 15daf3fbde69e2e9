#pragma once

#include <stdexcept>
#include <string>

namespace sdcalc {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Expression parsing failure. `offset` is the byte offset into the input.
struct ParseError : Error {
    ParseError(const std::string& what, std::size_t offset_)
        : Error(what + " (byte " + std::to_string(offset_) + ")"), offset(offset_) {}
    std::size_t offset;
};

// Parameters outside a chart's declared domain, or an unsupported request
// (derivative order, missing time dependence, ...).
struct DomainError : Error {
    using Error::Error;
};

// Iterative solver failed to converge.
struct ConvergenceError : Error {
    using Error::Error;
};

// Closest-point candidates of (numerically) equal distance: the query point
// sits near the cut locus and has no well-defined projection.
struct MultiplicityError : Error {
    using Error::Error;
};

// Operation requested at an umbilic point where rotation coefficients are
// undefined.
struct UmbilicError : Error {
    using Error::Error;
};

// sigma at (or beyond) a focal distance: J is singular.
struct SingularJacobianError : Error {
    using Error::Error;
};

// Tube operation on the curve axis (sigma = 0) where theta is undefined.
struct OnAxisError : Error {
    using Error::Error;
};

// Malformed input files / CLI configuration.
struct InputError : Error {
    using Error::Error;
};

}  // namespace sdcalc
