#pragma once

#include <stdexcept>
#include <string>

namespace imphedge {

/// Argument outside the mathematical domain of an operation
/// (e.g. F⁻¹ past the range of F for exponential impact).
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed trade path (non-monotone timestamps, size mismatch).
struct PathError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Explicit-part CFL bound exceeded or NaN detected while marching.
struct StabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Fixed-point sweep failed to converge within the iteration budget.
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Two solutions on different lattices were combined.
struct GridMismatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Query point outside the solution hull.
struct OutOfDomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Terminal condition has no admissible settlement trade at some node.
struct InfeasiblePayoffError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Covered-option problem violates the gamma-cap well-posedness bound.
struct IllPosedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Strategy diffusion coefficient evaluated at the gamma singularity.
struct SingularGammaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Too many simulated path-steps left the solution hull.
struct HullEscapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Inconsistent or invalid run configuration.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace imphedge
