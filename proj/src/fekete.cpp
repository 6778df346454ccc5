#include "curvegas/fekete.hpp"

#include "curvegas/coulomb.hpp"
#include "curvegas/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace curvegas {

namespace {

bool cover_ordered(const std::vector<double>& p, double l) {
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        if (!(p[i] < p[i + 1])) return false;
    }
    return p.size() < 2 || p.back() < p.front() + l;
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// Round-off band of the energy evaluation: the energy sums n(n-1)/2 log terms
// of order one, so two evaluations of nearby configurations agree only to a
// few ulps per term. Energy comparisons inside this band carry no information.
double energy_noise_band(std::size_t n, double v) {
    const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
    return 4.0 * std::numeric_limits<double>::epsilon() * (pairs + std::abs(v));
}

} // namespace

void FeketeConfig::validate() const {
    if (!(dt0 > 0.0) || !std::isfinite(dt0)) throw ConfigError("dt0 must be positive");
    if (!(tol > 0.0)) throw ConfigError("tol must be positive");
    if (max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
    if (!(growth >= 1.0)) throw ConfigError("growth must be >= 1");
}

FeketeResult gradient_flow(const ArcLengthCurve& curve, const Configuration& initial,
                           const FeketeConfig& cfg) {
    cfg.validate();
    if (initial.size() < 2) throw ConfigError("need at least two particles");

    const double l = initial.domain_length;
    const double dt_cap = 10.0 * cfg.dt0;

    FeketeResult res;
    res.minimizer = initial;
    Configuration& x = res.minimizer;
    double v = energy(curve, x);
    res.energy_trace.push_back(v);

    double dt = cfg.dt0;
    std::vector<double> g = energy_gradient(curve, x);
    double ginf = max_abs(g);
    for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
        res.gradient_norm = ginf;
        res.iterations = it;
        if (ginf <= cfg.tol) {
            res.converged = true;
            res.energy = v;
            res.log_discriminant = -2.0 * v;
            res.discriminant = std::exp(res.log_discriminant);
            return res;
        }

        const double noise = energy_noise_band(x.size(), v);
        double h = dt;
        bool accepted = false;
        for (std::size_t halve = 0; halve <= cfg.max_halvings; ++halve) {
            std::vector<double> y(x.size());
            bool moved = false;
            for (std::size_t i = 0; i < x.size(); ++i) {
                y[i] = x.x[i] - h * g[i];
                moved = moved || y[i] != x.x[i];
            }
            if (!moved) break;  // step below coordinate resolution; halving can't help
            if (cover_ordered(y, l)) {
                Configuration cand = quotient_map(y, l);
                const double vy = energy(curve, cand);
                if (vy < v - noise) {
                    // Clear energy decrease.
                    x = std::move(cand);
                    v = vy;
                    res.energy_trace.push_back(v);
                    dt = std::min(h * cfg.growth, dt_cap);
                    g = energy_gradient(curve, x);
                    ginf = max_abs(g);
                    accepted = true;
                    break;
                }
                if (vy <= v + noise) {
                    // The energy change is inside the round-off band, so the
                    // comparison carries no information (near a minimizer the
                    // true decrease ~ h*|g|^2 falls below one ulp of the
                    // energy). Demand strict gradient-norm decrease instead;
                    // the gradient stays accurately computable there.
                    std::vector<double> gy = energy_gradient(curve, cand);
                    const double giy = max_abs(gy);
                    if (giy < ginf) {
                        x = std::move(cand);
                        v = vy;
                        res.energy_trace.push_back(v);
                        dt = std::min(h * cfg.growth, dt_cap);
                        g = std::move(gy);
                        ginf = giy;
                        accepted = true;
                        break;
                    }
                }
            }
            h *= 0.5;
        }
        if (!accepted) {
            throw StepTooLarge("descent stalled at iteration " + std::to_string(it) +
                               " after " + std::to_string(cfg.max_halvings) +
                               " halvings (gradient max-norm " +
                               std::to_string(ginf) + ")");
        }
    }

    res.gradient_norm = ginf;
    res.iterations = cfg.max_iterations;
    res.energy = v;
    res.log_discriminant = -2.0 * v;
    res.discriminant = std::exp(res.log_discriminant);
    res.converged = false;  // budget exhausted; caller decides how to react
    return res;
}

double transfinite_diameter(const ArcLengthCurve& curve, const Configuration& c) {
    const std::size_t n = c.size();
    if (n < 2) throw ConfigError("transfinite diameter needs at least two points");
    const double pairs = static_cast<double>(n) * static_cast<double>(n - 1);
    return std::exp(log_discriminant(curve, c) / pairs);
}

CapacityEstimate estimate_capacity(const ArcLengthCurve& curve,
                                   const std::vector<std::size_t>& n_values,
                                   const FeketeConfig& cfg) {
    if (n_values.size() < 2) {
        throw ConfigError("capacity extrapolation needs at least two point counts");
    }
    CapacityEstimate est;
    est.n_values = n_values;
    const double l = curve.length();

    for (std::size_t n : n_values) {
        if (n < 2) throw ConfigError("capacity extrapolation needs n >= 2");
        // Deterministic symmetry-breaking perturbation of the equidistant start.
        std::vector<double> x(n);
        const double spacing = l / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double jitter =
                0.05 * std::sin(2.7 * static_cast<double>(i) + 0.3);
            x[i] = spacing * (static_cast<double>(i) + 0.5 + jitter);
        }
        FeketeResult r = gradient_flow(curve, make_configuration(std::move(x), l), cfg);
        est.diameters.push_back(transfinite_diameter(curve, r.minimizer));
    }

    // Least squares for d(n) = c + a/n.
    const std::size_t m = n_values.size();
    double su = 0.0, sd = 0.0, suu = 0.0, sud = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const double u = 1.0 / static_cast<double>(n_values[j]);
        su += u;
        sd += est.diameters[j];
        suu += u * u;
        sud += u * est.diameters[j];
    }
    const double denom = static_cast<double>(m) * suu - su * su;
    est.slope = (static_cast<double>(m) * sud - su * sd) / denom;
    est.capacity = (sd - est.slope * su) / static_cast<double>(m);
    return est;
}

} // namespace curvegas
