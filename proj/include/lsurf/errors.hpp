#pragma once

#include <stdexcept>
#include <string>

namespace lsurf {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// rhs / residual / chart evaluation requested at z <= 0.
struct AxisSingularityError : Error {
    using Error::Error;
};

// Chart derivatives requested at a vertical tangent (|sin theta| ~ 0).
struct VerticalTangentError : Error {
    using Error::Error;
};

struct StepSizeUnderflowError : Error {
    using Error::Error;
};

// Grid scan found no sign change of the shot classification.
struct NoBracketError : Error {
    using Error::Error;
};

// A bisection midpoint produced an Anomalous shot.
struct ClassFlipAnomalyError : Error {
    using Error::Error;
};

// close_profile was handed a shot whose x(s2) is not within tolerance of 0.
struct JunctionMismatchError : Error {
    using Error::Error;
};

// Mesh generation found an interior profile sample with z <= 0.
struct NonPositiveHeightError : Error {
    using Error::Error;
};

// Self-intersection refinement hit a degenerate (collinear overlap) crossing.
struct DegenerateCrossingError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace lsurf
