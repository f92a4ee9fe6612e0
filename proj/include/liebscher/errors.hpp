#pragma once

#include <stdexcept>
#include <string>

namespace liebscher {

// Base class for all library errors. Everything user-facing derives from
// std::runtime_error so callers can catch a single type at the boundary.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A copula/transform parameter is outside its admissible range.
struct InvalidParameter : Error {
    using Error::Error;
};

// product_to_iterative hit a vanishing stick tail before the last component.
struct DegenerateExponent : Error {
    using Error::Error;
};

// Two samples disagree in n or d where they must match.
struct ShapeMismatch : Error {
    using Error::Error;
};

// An operation restricted to d == 2 received another dimension.
struct DimensionError : Error {
    using Error::Error;
};

// A sample column is constant where ranks are required.
struct DegenerateSample : Error {
    using Error::Error;
};

// NoiseSpec variance incompatible with a Beta distribution at the given mean.
struct InvalidNoise : Error {
    using Error::Error;
};

// A base copula without a sampler was asked to produce draws.
struct UnsupportedBase : Error {
    using Error::Error;
};

// Tail-coefficient inputs violate the sum-to-one constraints.
struct ConstraintViolation : Error {
    using Error::Error;
};

// The ABC model needs base-parameter priors that were not supplied.
struct PriorUnsupported : Error {
    using Error::Error;
};

// Observed statistic degenerate (e.g. undefined relative error).
struct DegenerateObserved : Error {
    using Error::Error;
};

// No optimizer start reached the convergence tolerance.
struct NonConvergence : Error {
    using Error::Error;
};

// Density evaluated on the boundary of the unit square.
struct DomainError : Error {
    using Error::Error;
};

// Input file/JSON failed validation; message carries a field diagnostic.
struct SpecParseError : Error {
    using Error::Error;
};

}  // namespace liebscher
