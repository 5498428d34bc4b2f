#pragma once

#include <stdexcept>
#include <string>

namespace qpflag {

/// Base class for everything this library throws on a math/precision path.
/// Input validation errors (bad primes, malformed strings) use the standard
/// std::invalid_argument family instead, so callers can tell "your input is
/// broken" apart from "the computation cannot be certified at this precision".
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Additive cancellation (or a renormalization) consumed every significant
/// digit, so the result is indistinguishable from zero at the working
/// precision. Never silently mapped to zero.
struct PrecisionExhausted : Error {
    using Error::Error;
};

struct DivisionByZero : Error {
    using Error::Error;
};

/// Operands from different (p, precision) contexts.
struct ContextMismatch : Error {
    using Error::Error;
};

/// A rank/cell decision depends on a minor whose valuation reaches the
/// working precision: the data cannot certify the answer.
struct RankAmbiguous : Error {
    using Error::Error;
};

/// Spectral valuations are not pairwise distinct.
struct NotRegular : Error {
    using Error::Error;
};

/// The ray handed to ray_dynamics does not point to the repelling end.
struct InvalidRay : Error {
    using Error::Error;
};

/// No attractor-containing control set is a sink of the orbit graph.
struct NoSink : Error {
    using Error::Error;
};

/// Attractors land in more than one sink control set; surfaced, not resolved.
struct MultipleSinks : Error {
    using Error::Error;
};

/// An enumeration hit its configured node/word cap.
struct CapExceeded : Error {
    using Error::Error;
};

} // namespace qpflag
