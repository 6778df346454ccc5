#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace curvegas {

// N labeled particle positions in arc-length coordinates, stored on the
// cylinder fundamental domain: 0 <= x[0] < x[1] < ... < x[N-1] < x[0] + l < 2l.
// The strict cyclic ordering is an invariant: every factory validates it and
// the dynamics reject moves that would break it.
struct Configuration {
    std::vector<double> x;
    double domain_length = 0.0;   // l = curve length

    std::size_t size() const noexcept { return x.size(); }
};

// True iff 0 <= x[0] < ... < x[N-1] < x[0] + l (< 2l follows from x[0] < l).
bool strictly_cyclically_ordered(std::span<const double> x, double l) noexcept;

// Validating constructor; throws DomainViolation.
Configuration make_configuration(std::vector<double> x, double l);

// Projects a strictly ordered point of the covering space onto the
// fundamental domain by the rigid shift x - (x[0] - wrap(x[0])) * (1,...,1).
// fmod is exact, so inputs already in the domain pass through bit-identically.
Configuration quotient_map(std::span<const double> x, double l);

// The N cyclic gaps (x[1]-x[0], ..., x[N-1]-x[N-2], x[0]+l-x[N-1]); sums to l.
std::vector<double> cyclic_gaps(const Configuration& c);

// Evenly spaced positions 0, l/N, ..., (N-1) l/N.
Configuration equidistant_configuration(std::size_t n, double l);

} // namespace curvegas
