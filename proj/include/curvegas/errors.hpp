#pragma once

#include <stdexcept>
#include <string>

namespace curvegas {

// Base class for all library errors so callers can catch one type.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid user-supplied configuration (bad JSON, out-of-range parameter, ...).
// The CLI maps this to exit code 2; every other Error maps to exit code 3.
struct ConfigError : Error {
    using Error::Error;
};

// ---- curve construction ----
struct NonRegularCurve : Error {       // |dgamma/dtheta| vanishes somewhere
    using Error::Error;
};
struct SelfIntersection : Error {      // base curve is not injective on [0, 2pi)
    using Error::Error;
};
struct InsufficientSmoothness : Error { // derivative order not available
    using Error::Error;
};

// ---- configurations / domains ----
struct DomainViolation : Error {       // point not strictly cyclically ordered
    using Error::Error;
};
struct DegenerateConfiguration : Error { // two particle positions coincide exactly
    using Error::Error;
};

// ---- dynamics ----
struct StepFailure : Error {           // ordering could not be preserved after max halvings
    using Error::Error;
};
struct StepTooLarge : Error {          // descent step kept increasing the energy
    using Error::Error;
};

// ---- functionals ----
struct DegeneratePath : Error {        // path grid not uniform / states invalid
    using Error::Error;
};
struct OffCurvePath : Error {          // path point too far from the curve
    using Error::Error;
};
struct OffCurvePoint : Error {         // query point too far from the curve
    using Error::Error;
};
struct SupportViolation : Error {      // test function support touches the boundary
    using Error::Error;
};

} // namespace curvegas
