#include "curvegas/configuration.hpp"

#include "curvegas/errors.hpp"

#include <cmath>
#include <string>

namespace curvegas {

bool strictly_cyclically_ordered(std::span<const double> x, double l) noexcept {
    if (x.empty() || !(l > 0.0)) return false;
    if (!(x[0] >= 0.0) || !(x[0] < l)) return false;
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        if (!(x[i] < x[i + 1])) return false;
    return x.size() == 1 || x.back() < x[0] + l;
}

Configuration make_configuration(std::vector<double> x, double l) {
    if (!strictly_cyclically_ordered(x, l))
        throw DomainViolation("positions are not strictly cyclically ordered in [x1, x1+l)");
    return Configuration{std::move(x), l};
}

Configuration quotient_map(std::span<const double> x, double l) {
    if (x.empty()) throw DomainViolation("empty configuration");
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        if (!(x[i] < x[i + 1]))
            throw DomainViolation("covering-space point is not strictly ordered at index " +
                                  std::to_string(i));
    if (x.size() > 1 && !(x.back() < x.front() + l))
        throw DomainViolation("covering-space point spans more than one period");
    // Rigid shift by an exact period multiple. For the common single-period
    // exits the shift is exactly 0 or +-l, so an in-range first coordinate
    // passes through bit-identically and a one-period lift stays exact
    // wherever x_i - l (or x_i + l) is representable.
    const double first = x.front();
    double shift = l * std::floor(first / l);
    double y0 = first - shift;
    if (y0 >= l) shift += l;
    else if (y0 < 0.0) shift -= l;
    y0 = first - shift;
    if (!(y0 >= 0.0 && y0 < l)) shift = first;  // |first| within one ulp of a period
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] - shift;
    return make_configuration(std::move(y), l);
}

std::vector<double> cyclic_gaps(const Configuration& c) {
    std::vector<double> g(c.size());
    for (std::size_t i = 0; i + 1 < c.size(); ++i) g[i] = c.x[i + 1] - c.x[i];
    g[c.size() - 1] = c.x[0] + c.domain_length - c.x.back();
    return g;
}

Configuration equidistant_configuration(std::size_t n, double l) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = l * static_cast<double>(i) / static_cast<double>(n);
    return make_configuration(std::move(x), l);
}

} // namespace curvegas
