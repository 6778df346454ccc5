#include "curvegas/coulomb.hpp"

#include "curvegas/errors.hpp"
#include "curvegas/parallel.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace curvegas {

namespace {

constexpr double kChordFloor = 1e-300;  // below this a chord counts as collapsed

// Shared guard: zero chord between distinct parameters is an underflow (the
// energy is +inf); an exactly collapsed chord is a degenerate configuration.
// The hot loops run under OpenMP where exceptions must not unwind, so they
// report degeneracy through a NaN sentinel and this serial rescan produces
// the diagnostic afterwards.
[[noreturn]] void throw_degenerate(std::size_t i, std::size_t j) {
    throw DegenerateConfiguration("positions " + std::to_string(i) + " and " +
                                  std::to_string(j) + " coincide exactly");
}

[[noreturn]] void rethrow_coincident(const std::vector<complex>& z,
                                     std::span<const double> x) {
    for (std::size_t i = 0; i < z.size(); ++i) {
        for (std::size_t j = i + 1; j < z.size(); ++j) {
            if (z[i] == z[j]) {
                if (x[i] == x[j]) throw_degenerate(i, j);
                throw DegenerateConfiguration(
                    "curve points at positions " + std::to_string(i) + " and " +
                    std::to_string(j) + " coincide");
            }
        }
    }
    throw DegenerateConfiguration("coincident curve points");
}

// Row term sum_{j>i} log|z_i - z_j|: -inf when a chord underflows, NaN
// sentinel when it is exactly zero (degenerate pair).
double log_chord_row(const std::vector<complex>& z, std::size_t i) {
    double acc = 0.0;
    for (std::size_t j = i + 1; j < z.size(); ++j) {
        const double d = std::abs(z[i] - z[j]);
        if (d < kChordFloor) {
            if (d == 0.0) return std::numeric_limits<double>::quiet_NaN();
            return -std::numeric_limits<double>::infinity();
        }
        acc += std::log(d);
    }
    return acc;
}

// sum_{j != i} Re{tau_i / (z_i - z_j)}; NaN sentinel on a collapsed chord.
double pair_projection_sum(const std::vector<complex>& z, const std::vector<complex>& tau,
                           std::size_t i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) {
        if (j == i) continue;
        const complex d = z[i] - z[j];
        const double n2 = std::norm(d);
        if (n2 == 0.0) return std::numeric_limits<double>::quiet_NaN();
        acc += (tau[i].real() * d.real() + tau[i].imag() * d.imag()) / n2;
    }
    return acc;
}

} // namespace

void curve_frames(const ArcLengthCurve& curve, std::span<const double> x,
                  std::vector<complex>& points, std::vector<complex>& tangents) {
    const std::size_t n = x.size();
    points.resize(n);
    tangents.resize(n);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (n >= 64)
#endif
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        const CurveFrame f = curve.frame(x[static_cast<std::size_t>(i)]);
        points[static_cast<std::size_t>(i)] = f.point;
        tangents[static_cast<std::size_t>(i)] = f.tangent;
    }
}

double energy(const ArcLengthCurve& curve, const Configuration& c) {
    const std::size_t n = c.size();
    std::vector<complex> z, tau;
    curve_frames(curve, c.x, z, tau);
    std::vector<double> row(n, 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 8) if (n >= 48)
#endif
    for (long long i = 0; i < static_cast<long long>(n); ++i)
        row[static_cast<std::size_t>(i)] = log_chord_row(z, static_cast<std::size_t>(i));
    double total = 0.0;
    for (double r : row) total += r;   // fixed order: thread-count independent
    if (std::isnan(total)) rethrow_coincident(z, c.x);
    return -total;
}

double log_density_unnormalized(const ArcLengthCurve& curve, const Configuration& c, double beta) {
    return -beta * energy(curve, c);
}

std::vector<double> energy_gradient(const ArcLengthCurve& curve, const Configuration& c) {
    const std::size_t n = c.size();
    std::vector<complex> z, tau;
    curve_frames(curve, c.x, z, tau);
    std::vector<double> g(n);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (n >= 48)
#endif
    for (long long i = 0; i < static_cast<long long>(n); ++i)
        g[static_cast<std::size_t>(i)] =
            -pair_projection_sum(z, tau, static_cast<std::size_t>(i));
    for (double v : g)
        if (std::isnan(v)) rethrow_coincident(z, c.x);
    return g;
}

std::vector<double> drift(const ArcLengthCurve& curve, const Configuration& c, double beta) {
    const std::size_t n = c.size();
    std::vector<complex> z, tau;
    curve_frames(curve, c.x, z, tau);
    std::vector<double> b(n);
    const double half_beta = 0.5 * beta;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (n >= 48)
#endif
    for (long long i = 0; i < static_cast<long long>(n); ++i)
        b[static_cast<std::size_t>(i)] =
            half_beta * pair_projection_sum(z, tau, static_cast<std::size_t>(i));
    for (double v : b)
        if (std::isnan(v)) rethrow_coincident(z, c.x);
    return b;
}

double log_discriminant(const ArcLengthCurve& curve, const Configuration& c) {
    const std::size_t n = c.size();
    std::vector<complex> z, tau;
    curve_frames(curve, c.x, z, tau);
    // Ordered pairs (k, l), k != l: each unordered pair enters twice.
    std::vector<double> row(n, 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (n >= 48)
#endif
    for (long long k = 0; k < static_cast<long long>(n); ++k) {
        double acc = 0.0;
        for (std::size_t l = 0; l < n; ++l) {
            if (static_cast<std::size_t>(k) == l) continue;
            const double d = std::abs(z[static_cast<std::size_t>(k)] - z[l]);
            if (d < kChordFloor) {
                acc = (d == 0.0) ? std::numeric_limits<double>::quiet_NaN()
                                 : -std::numeric_limits<double>::infinity();
                break;
            }
            acc += std::log(d);
        }
        row[static_cast<std::size_t>(k)] = acc;
    }
    double total = 0.0;
    for (double r : row) total += r;
    if (std::isnan(total)) rethrow_coincident(z, c.x);
    return total;
}

double discriminant(const ArcLengthCurve& curve, const Configuration& c) {
    return std::exp(log_discriminant(curve, c));
}

double log_discriminant(std::span<const complex> points) {
    const std::size_t n = points.size();
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t l = 0; l < n; ++l) {
            if (k == l) continue;
            const double d = std::abs(points[k] - points[l]);
            if (d < kChordFloor) {
                if (d == 0.0) {
                    throw DegenerateConfiguration(
                        "points " + std::to_string(std::min(k, l)) + " and " +
                        std::to_string(std::max(k, l)) + " coincide");
                }
                return -std::numeric_limits<double>::infinity();
            }
            total += std::log(d);
        }
    }
    return total;
}

double discriminant(std::span<const complex> points) {
    return std::exp(log_discriminant(points));
}

// ---------------------------------------------------------------------------
// Plain serial implementations (independent accumulation order) for tests
// and the kernel benchmark.
// ---------------------------------------------------------------------------
namespace reference {

double energy(const ArcLengthCurve& curve, const Configuration& c) {
    const std::size_t n = c.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const complex zi = curve.point(c.x[i]);
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = std::abs(zi - curve.point(c.x[j]));
            if (d < kChordFloor) {
                if (c.x[i] == c.x[j]) throw_degenerate(i, j);
                return std::numeric_limits<double>::infinity();
            }
            acc -= std::log(d);
        }
    }
    return acc;
}

std::vector<double> energy_gradient(const ArcLengthCurve& curve, const Configuration& c) {
    const std::size_t n = c.size();
    std::vector<double> g(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const CurveFrame fi = curve.frame(c.x[i]);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const complex q = fi.tangent / (fi.point - curve.point(c.x[j]));
            g[i] -= q.real();
        }
    }
    return g;
}

std::vector<double> drift(const ArcLengthCurve& curve, const Configuration& c, double beta) {
    std::vector<double> g = reference::energy_gradient(curve, c);
    for (double& v : g) v *= -0.5 * beta;
    return g;
}

double log_discriminant(const ArcLengthCurve& curve, const Configuration& c) {
    const std::size_t n = c.size();
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) {
            if (k == l) continue;
            acc += std::log(std::abs(curve.point(c.x[k]) - curve.point(c.x[l])));
        }
    return acc;
}

} // namespace reference

} // namespace curvegas
