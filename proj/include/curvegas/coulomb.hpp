#pragma once

#include "curvegas/configuration.hpp"
#include "curvegas/curve.hpp"

#include <vector>

namespace curvegas {

// Pairwise logarithmic interaction of particles gamma(x_1), ..., gamma(x_N)
// on the curve. All O(N^2) kernels here come in two builds:
//   * the default entry points, whose row loops are OpenMP-parallel but whose
//     accumulation order is fixed, so results do not depend on thread count;
//   * plain single-threaded textbook-order versions in coulomb::reference,
//     kept as an independent check for tests and the kernel benchmark.

// V(x) = -sum_{i<j} log|gamma(x_i) - gamma(x_j)|.
// Returns +inf when a chord underflows (distinct positions closer than
// ~1e-300); throws DegenerateConfiguration when two positions coincide.
double energy(const ArcLengthCurve& curve, const Configuration& c);

// log of the unnormalized stationary density: exactly -beta * energy
// (same code path; the normalizing constant is never computed).
double log_density_unnormalized(const ArcLengthCurve& curve, const Configuration& c, double beta);

// grad V. Component i is -sum_{j != i} Re{gamma'(x_i) / (gamma(x_i) - gamma(x_j))}.
std::vector<double> energy_gradient(const ArcLengthCurve& curve, const Configuration& c);

// Parametrization-process drift b_i = (beta/2) sum_{j != i} Re{gamma'(x_i) /
// (gamma(x_i) - gamma(x_j))} = -(beta/2) grad V = (1/2) grad log density.
std::vector<double> drift(const ArcLengthCurve& curve, const Configuration& c, double beta);

// log prod_{k != l} |z_k - z_l| = 2 sum_{k<l} log|z_k - z_l| for z_i = gamma(x_i).
double log_discriminant(const ArcLengthCurve& curve, const Configuration& c);

// prod_{k != l} |z_k - z_l| (may overflow to +inf for large N; use the log
// form for transfinite-diameter work).
double discriminant(const ArcLengthCurve& curve, const Configuration& c);

// Same quantities for an explicit point set (pairwise distinct; throws
// DegenerateConfiguration on an exact tie).
double log_discriminant(std::span<const complex> points);
double discriminant(std::span<const complex> points);

// Curve points gamma(x_i) and unit tangents gamma'(x_i), one inversion each.
void curve_frames(const ArcLengthCurve& curve, std::span<const double> x,
                  std::vector<complex>& points, std::vector<complex>& tangents);

namespace reference {
double energy(const ArcLengthCurve& curve, const Configuration& c);
std::vector<double> energy_gradient(const ArcLengthCurve& curve, const Configuration& c);
std::vector<double> drift(const ArcLengthCurve& curve, const Configuration& c, double beta);
double log_discriminant(const ArcLengthCurve& curve, const Configuration& c);
} // namespace reference

} // namespace curvegas
