#include "curvegas/functionals.hpp"

#include "curvegas/coulomb.hpp"
#include "curvegas/errors.hpp"
#include "curvegas/parallel.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace curvegas {

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void validate_times(const std::vector<double>& t, std::size_t n_frames) {
    if (n_frames < 2) throw DegeneratePath("a path needs at least two frames");
    if (t.size() != n_frames) {
        throw DegeneratePath("times and frames disagree: " +
                             std::to_string(t.size()) + " vs " +
                             std::to_string(n_frames));
    }
    for (std::size_t k = 0; k + 1 < t.size(); ++k) {
        if (!(t[k] < t[k + 1])) {
            throw DegeneratePath("times must be strictly increasing at index " +
                                 std::to_string(k));
        }
    }
    const double dt0 = t[1] - t[0];
    for (std::size_t k = 1; k + 1 < t.size(); ++k) {
        if (std::fabs((t[k + 1] - t[k]) - dt0) > 1e-9 * dt0) {
            throw DegeneratePath("time grid must be uniform: spacing at index " +
                                 std::to_string(k) + " is " +
                                 fmt_double(t[k + 1] - t[k]) + " vs " +
                                 fmt_double(dt0));
        }
    }
}

// Lifts the fundamental-domain states to one continuous covering-space
// sheet: consecutive frames are shifted by the exact period multiple that
// minimizes the jump of the first coordinate.
std::vector<std::vector<double>> unwrap_states(const std::vector<Configuration>& states) {
    const double l = states.front().domain_length;
    const std::size_t n = states.front().size();
    std::vector<std::vector<double>> y(states.size());
    y[0] = states[0].x;
    for (std::size_t k = 1; k < states.size(); ++k) {
        if (states[k].size() != n || states[k].domain_length != l) {
            throw DegeneratePath("all frames must share particle count and domain");
        }
        const double shift =
            l * std::round((y[k - 1][0] - states[k].x[0]) / l);
        y[k].resize(n);
        for (std::size_t i = 0; i < n; ++i) y[k][i] = states[k].x[i] + shift;
    }
    return y;
}

double action_of_unwrapped(const ArcLengthCurve& curve,
                           const std::vector<double>& times,
                           const std::vector<std::vector<double>>& y, double l) {
    const std::size_t n = y.front().size();
    double total = 0.0;
    std::vector<double> mid(n);
    for (std::size_t k = 0; k + 1 < y.size(); ++k) {
        const double dt = times[k + 1] - times[k];
        for (std::size_t i = 0; i < n; ++i) mid[i] = 0.5 * (y[k][i] + y[k + 1][i]);
        const Configuration m = quotient_map(mid, l);
        const std::vector<double> g = energy_gradient(curve, m);
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = (y[k + 1][i] - y[k][i]) / dt;
            const double dev = v - (-g[i]);  // drift of the zero-noise flow
            s += dev * dev;
        }
        total += 0.5 * dt * s;
    }
    return total;
}

} // namespace

ParamPath to_param_path(const TrajectoryRecord& record) {
    return ParamPath{record.times, record.states};
}

CurvePath transplant(const ArcLengthCurve& curve, const ParamPath& path) {
    validate_times(path.times, path.states.size());
    CurvePath out;
    out.times = path.times;
    out.points.reserve(path.states.size());
    for (const Configuration& c : path.states) {
        std::vector<complex> pts(c.size());
        for (std::size_t i = 0; i < c.size(); ++i) pts[i] = curve.point(c.x[i]);
        out.points.push_back(std::move(pts));
    }
    return out;
}

double rate_I(const ArcLengthCurve& curve, const ParamPath& path) {
    validate_times(path.times, path.states.size());
    if (path.states.front().size() == 0) throw DegeneratePath("empty frames");
    const double l = path.states.front().domain_length;
    const auto y = unwrap_states(path.states);
    return action_of_unwrapped(curve, path.times, y, l);
}

double rate_J(const ArcLengthCurve& curve, const CurvePath& path,
              double projection_tol) {
    validate_times(path.times, path.points.size());
    const std::size_t n = path.points.front().size();
    if (n == 0) throw DegeneratePath("empty frames");
    const double l = curve.length();

    std::vector<Configuration> states;
    states.reserve(path.points.size());
    for (std::size_t k = 0; k < path.points.size(); ++k) {
        if (path.points[k].size() != n) {
            throw DegeneratePath("all frames must have the same point count");
        }
        std::vector<double> cover(n);
        for (std::size_t i = 0; i < n; ++i) {
            const Projection p = curve.project(path.points[k][i]);
            if (!(p.distance <= projection_tol)) {
                throw OffCurvePath("frame " + std::to_string(k) + ", point " +
                                   std::to_string(i) + " lies " +
                                   fmt_double(p.distance) +
                                   " away from the curve (tolerance " +
                                   fmt_double(projection_tol) + ")");
            }
            if (i == 0) {
                cover[0] = p.arclength;
            } else {
                // Smallest period lift strictly above the previous point.
                const double k_lift =
                    std::floor((cover[i - 1] - p.arclength) / l) + 1.0;
                cover[i] = p.arclength + k_lift * l;
            }
        }
        if (n > 1 && !(cover.back() < cover.front() + l)) {
            throw DegeneratePath("frame " + std::to_string(k) +
                                 " is not strictly cyclically ordered on the curve");
        }
        states.push_back(quotient_map(cover, l));
    }

    const auto y = unwrap_states(states);
    return action_of_unwrapped(curve, path.times, y, l);
}

Polynomial2::Polynomial2(std::vector<PolynomialTerm> terms) : terms_(std::move(terms)) {
    for (const auto& t : terms_) {
        if (t.px < 0 || t.py < 0) throw ConfigError("polynomial powers must be >= 0");
    }
}

namespace {
double ipow(double b, int p) {
    double r = 1.0;
    for (int i = 0; i < p; ++i) r *= b;
    return r;
}
} // namespace

double Polynomial2::eval(complex z) const {
    const double x = z.real();
    const double y = z.imag();
    double s = 0.0;
    for (const auto& t : terms_) s += t.coefficient * ipow(x, t.px) * ipow(y, t.py);
    return s;
}

Polynomial2 Polynomial2::dx() const {
    std::vector<PolynomialTerm> out;
    for (const auto& t : terms_) {
        if (t.px > 0) out.push_back({t.px - 1, t.py, t.coefficient * t.px});
    }
    return Polynomial2(std::move(out));
}

Polynomial2 Polynomial2::dy() const {
    std::vector<PolynomialTerm> out;
    for (const auto& t : terms_) {
        if (t.py > 0) out.push_back({t.px, t.py - 1, t.coefficient * t.py});
    }
    return Polynomial2(std::move(out));
}

WeightedMeasure measure_on_curve(const ArcLengthCurve& curve,
                                 std::span<const double> arclengths,
                                 std::span<const double> weights) {
    if (arclengths.size() != weights.size() || arclengths.empty()) {
        throw ConfigError("measure needs matching non-empty arclengths and weights");
    }
    WeightedMeasure mu(arclengths.size());
    for (std::size_t i = 0; i < arclengths.size(); ++i) {
        const double s = arclengths[i];
        mu[i] = MeasureAtom{curve.point(s), curve.tangent(s), curve.curvature(s),
                            weights[i]};
    }
    return mu;
}

WeightedMeasure empirical_measure(const ArcLengthCurve& curve,
                                  const Configuration& c) {
    if (c.size() == 0) throw ConfigError("empty configuration");
    std::vector<double> w(c.size(), 1.0 / static_cast<double>(c.size()));
    return measure_on_curve(curve, c.x, w);
}

CurveObservable::CurveObservable(Polynomial2 f)
    : f_(std::move(f)), fx_(f_.dx()), fy_(f_.dy()), fxx_(fx_.dx()),
      fxy_(fx_.dy()), fyy_(fy_.dy()) {}

complex CurveObservable::dz(complex z) const {
    return 0.5 * complex(fx_.eval(z), -fy_.eval(z));
}

double CurveObservable::ds(const MeasureAtom& a) const {
    return a.tau.real() * fx_.eval(a.z) + a.tau.imag() * fy_.eval(a.z);
}

double CurveObservable::dss(const MeasureAtom& a) const {
    const double tr = a.tau.real();
    const double ti = a.tau.imag();
    const double second = tr * tr * fxx_.eval(a.z) + 2.0 * tr * ti * fxy_.eval(a.z) +
                          ti * ti * fyy_.eval(a.z);
    // Acceleration of the arclength parametrization: gamma'' = i * k * tau.
    const double bend = a.curvature * (tr * fy_.eval(a.z) - ti * fx_.eval(a.z));
    return second + bend;
}

double CurveObservable::laplacian(complex z) const {
    return fxx_.eval(z) + fyy_.eval(z);
}

double CurveObservable::integrate(const WeightedMeasure& mu) const {
    double s = 0.0;
    for (const auto& a : mu) s += a.weight * f_.eval(a.z);
    return s;
}

double tangential_derivative(const ArcLengthCurve& curve, const CurveObservable& f,
                             complex z, double tol) {
    const Projection p = curve.project(z);
    if (!(p.distance <= tol)) {
        throw OffCurvePoint("point (" + fmt_double(z.real()) + ", " +
                            fmt_double(z.imag()) + ") lies " +
                            fmt_double(p.distance) + " from the curve (tol " +
                            fmt_double(tol) + ")");
    }
    const complex tau = curve.tangent(p.arclength);
    const complex w = f.dz(curve.point(p.arclength));
    return 2.0 * (tau.real() * w.real() - tau.imag() * w.imag());
}

double hydro_residual(const WeightedMeasure& mu, const CurveObservable& f,
                      double beta) {
    if (mu.empty()) throw ConfigError("empty measure");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw ConfigError("beta must be positive");
    double mass = 0.0;
    for (const auto& a : mu) {
        if (!(a.weight >= 0.0)) throw ConfigError("measure weights must be >= 0");
        mass += a.weight;
    }
    if (std::fabs(mass - 1.0) > 1e-9) {
        throw ConfigError("measure weights must sum to 1, got " + fmt_double(mass));
    }
    const std::size_t m = mu.size();

    std::vector<double> row(m);
    long long bad_pair = -1;  // exceptions must not unwind out of the parallel region
#pragma omp parallel for schedule(static) if (m >= 64)
    for (long long a = 0; a < static_cast<long long>(m); ++a) {
        const auto& atom = mu[static_cast<std::size_t>(a)];
        double s = 0.0;
        for (std::size_t b = 0; b < m; ++b) {
            if (static_cast<std::size_t>(a) == b) continue;
            const complex chord = atom.z - mu[b].z;
            const double n2 = std::norm(chord);
            if (n2 == 0.0) {
#pragma omp critical
                bad_pair = a;
                break;
            }
            // Re{tau/chord} = Re{tau * conj(chord)} / |chord|^2
            s += mu[b].weight *
                 (atom.tau.real() * chord.real() + atom.tau.imag() * chord.imag()) / n2;
        }
        row[static_cast<std::size_t>(a)] =
            atom.weight * (2.0 * f.ds(atom) * s + atom.weight * f.dss(atom));
    }
    if (bad_pair >= 0) {
        throw DegenerateConfiguration("coincident measure atoms around index " +
                                      std::to_string(bad_pair));
    }

    double total = 0.0;
    for (double v : row) total += v;  // fixed order, independent of threads
    return 0.25 * beta * total;
}

} // namespace curvegas
