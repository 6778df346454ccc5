#pragma once

#include "curvegas/configuration.hpp"
#include "curvegas/curve.hpp"

#include <cstddef>
#include <vector>

namespace curvegas {

// Zero-temperature limit: explicit Euler descent on the pairwise logarithmic
// energy V with backtracking. A step is accepted only if it keeps the strict
// cyclic ordering and does not increase V; otherwise the step is halved, up
// to max_halvings times (then StepTooLarge). After an accepted step the step
// size grows by `growth`, capped at 10 * dt0.
struct FeketeConfig {
    double dt0 = 0.05;
    double tol = 1e-8;              // stop when max_i |dV/dx_i| <= tol
    std::size_t max_iterations = 200000;
    std::size_t max_halvings = 60;
    double growth = 1.25;

    void validate() const;  // throws ConfigError
};

struct FeketeResult {
    Configuration minimizer;
    double energy = 0.0;               // V at exit
    double log_discriminant = 0.0;     // = -2 * energy; always finite
    double discriminant = 0.0;         // exp of the above; +inf for large N
    double gradient_norm = 0.0;        // max-norm of the gradient at exit
    bool converged = false;            // false = iteration budget exhausted
    std::size_t iterations = 0;
    std::vector<double> energy_trace;  // V after every accepted step
};

FeketeResult gradient_flow(const ArcLengthCurve& curve, const Configuration& initial,
                           const FeketeConfig& cfg = {});

// n-point transfinite diameter of the configuration:
//   ( prod_{i<j} |chord_ij| )^{2/(n(n-1))}
double transfinite_diameter(const ArcLengthCurve& curve, const Configuration& c);

struct CapacityEstimate {
    std::vector<std::size_t> n_values;
    std::vector<double> diameters;   // optimal transfinite diameter per n
    double capacity = 0.0;           // intercept of the least-squares fit d ~ c + a/n
    double slope = 0.0;              // a
};

// Runs the descent for each n from a deterministically perturbed equidistant
// start and extrapolates the optimal diameters to n = infinity.
CapacityEstimate estimate_capacity(const ArcLengthCurve& curve,
                                   const std::vector<std::size_t>& n_values,
                                   const FeketeConfig& cfg = {});

} // namespace curvegas
