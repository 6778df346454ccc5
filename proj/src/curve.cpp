#include "curvegas/curve.hpp"

#include "curvegas/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace curvegas {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// 16-point Gauss-Legendre rule on [-1, 1].
constexpr double kGlNode[16] = {
    -0.9894009349916499, -0.9445750230732326, -0.8656312023878318, -0.7554044083550030,
    -0.6178762444026438, -0.4580167776572274, -0.2816035507792589, -0.0950125098376374,
     0.0950125098376374,  0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
     0.7554044083550030,  0.8656312023878318,  0.9445750230732326,  0.9894009349916499};
constexpr double kGlWeight[16] = {
    0.0271524594117541, 0.0622535239386479, 0.0951585116824928, 0.1246289712555339,
    0.1495959888165767, 0.1691565193950025, 0.1826034150449236, 0.1894506104550685,
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

template <class F>
double gauss16(F&& f, double lo, double hi) {
    const double c = 0.5 * (lo + hi);
    const double h = 0.5 * (hi - lo);
    double acc = 0.0;
    for (int i = 0; i < 16; ++i) acc += kGlWeight[i] * f(c + h * kGlNode[i]);
    return acc * h;
}

// Golden-section minimization of f on [lo, hi].
template <class F>
double golden_min(F&& f, double lo, double hi, int iters) {
    constexpr double r = 0.6180339887498949;
    double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < iters; ++i) {
        if (f1 < f2) {
            hi = x2; x2 = x1; f2 = f1;
            x1 = hi - r * (hi - lo); f1 = f(x1);
        } else {
            lo = x1; x1 = x2; f1 = f2;
            x2 = lo + r * (hi - lo); f2 = f(x2);
        }
    }
    return f1 < f2 ? x1 : x2;
}

double circ_dist(double u, double v) {
    double d = std::fabs(u - v);
    return std::min(d, kTwoPi - d);
}

} // namespace

// ---------------------------------------------------------------------------
// CurveSpec
// ---------------------------------------------------------------------------

complex CurveSpec::base_point(double theta) const {
    switch (kind) {
        case CurveKind::circle:
            return radius * std::polar(1.0, theta);
        case CurveKind::ellipse:
            return {a * std::cos(theta), b * std::sin(theta)};
        case CurveKind::fourier: {
            complex z = 0.0;
            for (std::size_t m = 0; m < coeffs.size(); ++m) {
                const double k = static_cast<double>(k_min) + static_cast<double>(m);
                z += coeffs[m] * std::polar(1.0, k * theta);
            }
            return z;
        }
    }
    return {};
}

complex CurveSpec::base_derivative(double theta) const {
    switch (kind) {
        case CurveKind::circle:
            return complex(0.0, 1.0) * (radius * std::polar(1.0, theta));
        case CurveKind::ellipse:
            return {-a * std::sin(theta), b * std::cos(theta)};
        case CurveKind::fourier: {
            complex z = 0.0;
            for (std::size_t m = 0; m < coeffs.size(); ++m) {
                const double k = static_cast<double>(k_min) + static_cast<double>(m);
                z += complex(0.0, k) * coeffs[m] * std::polar(1.0, k * theta);
            }
            return z;
        }
    }
    return {};
}

complex CurveSpec::base_second(double theta) const {
    switch (kind) {
        case CurveKind::circle:
            return -radius * std::polar(1.0, theta);
        case CurveKind::ellipse:
            return {-a * std::cos(theta), -b * std::sin(theta)};
        case CurveKind::fourier: {
            complex z = 0.0;
            for (std::size_t m = 0; m < coeffs.size(); ++m) {
                const double k = static_cast<double>(k_min) + static_cast<double>(m);
                z += -(k * k) * coeffs[m] * std::polar(1.0, k * theta);
            }
            return z;
        }
    }
    return {};
}

CurveSpec CurveSpec::circle(double radius) {
    if (!(radius > 0.0) || !std::isfinite(radius))
        throw ConfigError("circle radius must be positive and finite");
    CurveSpec s;
    s.kind = CurveKind::circle;
    s.radius = radius;
    return s;
}

CurveSpec CurveSpec::ellipse(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
        throw ConfigError("ellipse semi-axes must be positive and finite");
    CurveSpec s;
    s.kind = CurveKind::ellipse;
    s.a = a;
    s.b = b;
    return s;
}

CurveSpec CurveSpec::fourier(std::vector<complex> coeffs, int k_min) {
    if (coeffs.empty()) throw ConfigError("fourier curve needs at least one coefficient");
    for (const complex& c : coeffs)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            throw ConfigError("fourier coefficients must be finite");
    CurveSpec s;
    s.kind = CurveKind::fourier;
    s.coeffs = std::move(coeffs);
    s.k_min = k_min;
    return s;
}

std::string CurveSpec::describe() const {
    std::ostringstream os;
    switch (kind) {
        case CurveKind::circle: os << "circle(radius=" << radius << ")"; break;
        case CurveKind::ellipse: os << "ellipse(a=" << a << ", b=" << b << ")"; break;
        case CurveKind::fourier: os << "fourier(" << coeffs.size() << " modes, k_min=" << k_min << ")"; break;
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// ArcLengthCurve
// ---------------------------------------------------------------------------

double ArcLengthCurve::wrap(double s) const noexcept {
    double r = std::fmod(s, length_);
    if (r < 0.0) r += length_;
    if (r >= length_) r = 0.0;  // r == length_ possible when s is a tiny negative
    return r;
}

double ArcLengthCurve::partial_length(std::size_t interval, double theta) const {
    const auto speed = [this](double t) { return std::abs(spec_.base_derivative(t)); };
    return gauss16(speed, theta_[interval], theta);
}

// Invert the cumulative length: find theta with arclength(theta) = s.
double ArcLengthCurve::theta_lookup(double s) const {
    if (constant_speed_) return s / speed0_;

    const auto it = std::upper_bound(cum_.begin(), cum_.end(), s);
    std::size_t k = static_cast<std::size_t>(std::distance(cum_.begin(), it));
    k = (k == 0) ? 0 : k - 1;
    if (k >= theta_.size() - 1) k = theta_.size() - 2;

    double lo = theta_[k], hi = theta_[k + 1];
    const double target = s - cum_[k];
    double th = lo + (hi - lo) * std::clamp(target / (cum_[k + 1] - cum_[k]), 0.0, 1.0);
    const double tol = 1e-15 * (length_ + 1.0);
    for (int it2 = 0; it2 < 60; ++it2) {
        const double f = partial_length(k, th) - target;
        if (std::fabs(f) <= tol) break;
        if (f > 0.0) hi = th; else lo = th;
        const double sp = std::abs(spec_.base_derivative(th));
        double next = th - f / sp;
        if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);  // safeguard
        if (next == th) break;
        th = next;
    }
    return th;
}

double ArcLengthCurve::theta_of_arclength(double s) const { return theta_lookup(wrap(s)); }

complex ArcLengthCurve::point(double s) const {
    return spec_.base_point(theta_lookup(wrap(s)));
}

complex ArcLengthCurve::tangent(double s) const {
    const complex g1 = spec_.base_derivative(theta_lookup(wrap(s)));
    return g1 / std::abs(g1);   // unit modulus by construction
}

CurveFrame ArcLengthCurve::frame(double s) const {
    const double th = theta_lookup(wrap(s));
    const complex g1 = spec_.base_derivative(th);
    return {spec_.base_point(th), g1 / std::abs(g1)};
}

complex ArcLengthCurve::second_derivative(double s) const {
    if (smoothness_order_ < 2)
        throw InsufficientSmoothness("second derivative needs smoothness order >= 2");
    const double th = theta_lookup(wrap(s));
    const complex g1 = spec_.base_derivative(th);
    const complex g2 = spec_.base_second(th);
    const double sp2 = std::norm(g1);
    // Chain rule for the unit-speed parametrization; the tangential part of
    // gamma0'' is removed so Re{gamma'' conj(gamma')} vanishes identically.
    return (g2 - g1 * (g2.real() * g1.real() + g2.imag() * g1.imag()) / sp2) / sp2;
}

double ArcLengthCurve::curvature(double s) const {
    if (smoothness_order_ < 2)
        throw InsufficientSmoothness("curvature needs smoothness order >= 2");
    const double th = theta_lookup(wrap(s));
    const complex g1 = spec_.base_derivative(th);
    const complex g2 = spec_.base_second(th);
    const double sp = std::abs(g1);
    // Im{gamma'' conj(gamma')} = Im{gamma0'' conj(gamma0')} / speed^3.
    return (g2.imag() * g1.real() - g2.real() * g1.imag()) / (sp * sp * sp);
}

Projection ArcLengthCurve::project(complex z) const {
    // Coarse scan over the table, then Newton on the normal condition
    // h(theta) = Re{(gamma0(theta) - z) conj(gamma0'(theta))} = 0.
    const std::size_t M = theta_.size() - 1;
    const std::size_t stride = std::max<std::size_t>(1, M / 1024);
    double best_d2 = std::numeric_limits<double>::infinity();
    double best_th = 0.0;
    for (std::size_t k = 0; k < M; k += stride) {
        const double d2 = std::norm(spec_.base_point(theta_[k]) - z);
        if (d2 < best_d2) { best_d2 = d2; best_th = theta_[k]; }
    }
    const double span = kTwoPi * static_cast<double>(stride) / static_cast<double>(M);
    double lo = best_th - span, hi = best_th + span;
    const auto d2f = [&](double t) { return std::norm(spec_.base_point(t) - z); };
    double th = golden_min(d2f, lo, hi, 24);
    for (int i = 0; i < 30; ++i) {
        const complex p = spec_.base_point(th);
        const complex g1 = spec_.base_derivative(th);
        const complex g2 = spec_.base_second(th);
        const complex diff = p - z;
        const double h = diff.real() * g1.real() + diff.imag() * g1.imag();
        const double hp = std::norm(g1) + diff.real() * g2.real() + diff.imag() * g2.imag();
        if (hp <= 0.0) break;
        const double next = th - h / hp;
        if (std::fabs(next - th) < 1e-15) { th = next; break; }
        th = next;
    }
    // Arc length of th (normalized into [0, 2pi)).
    double tn = std::fmod(th, kTwoPi);
    if (tn < 0.0) tn += kTwoPi;
    const double dth = kTwoPi / static_cast<double>(M);
    std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(tn / dth), M - 1);
    const double s = cum_[k] + partial_length(k, tn);
    return {wrap(s), std::abs(spec_.base_point(tn) - z)};
}

// ---------------------------------------------------------------------------
// Builder
// ---------------------------------------------------------------------------

ArcLengthCurve build_arclength_curve(const CurveSpec& spec, double tol, int smoothness_order) {
    if (!(tol > 0.0)) throw ConfigError("length tolerance must be positive");
    if (smoothness_order < 1) throw ConfigError("smoothness order must be >= 1");

    const auto speed = [&spec](double t) { return std::abs(spec.base_derivative(t)); };

    // ---- regularity: the base derivative must not vanish ----
    {
        const int G = 4096;
        double minv = std::numeric_limits<double>::infinity();
        double maxv = 0.0;
        int argmin = 0;
        for (int i = 0; i < G; ++i) {
            const double v = speed(kTwoPi * i / G);
            if (v < minv) { minv = v; argmin = i; }
            maxv = std::max(maxv, v);
        }
        // Refine around the grid minimum: a zero between grid nodes would
        // otherwise be missed on coarse grids.
        const double lo = kTwoPi * (argmin - 1) / G, hi = kTwoPi * (argmin + 1) / G;
        const double thmin = golden_min(speed, lo, hi, 60);
        minv = std::min(minv, speed(thmin));
        if (!(minv > 1e-7 * maxv))
            throw NonRegularCurve("base parametrization derivative vanishes (min speed " +
                                  std::to_string(minv) + ")");
    }

    // ---- injectivity: chord / parameter-distance bounded away from zero ----
    {
        const int G = 1024;
        std::vector<complex> pts(G);
        double scale = 0.0;
        for (int i = 0; i < G; ++i) {
            pts[i] = spec.base_point(kTwoPi * i / G);
            scale = std::max(scale, std::abs(pts[i]));
        }
        const double spacing = kTwoPi / G;
        double best_ratio = std::numeric_limits<double>::infinity();
        int bi = 0, bj = 0;
        for (int i = 0; i < G; ++i) {
            for (int j = i + 1; j < G; ++j) {
                const double dth = circ_dist(kTwoPi * i / G, kTwoPi * j / G);
                if (dth < 4.0 * spacing) continue;
                const double ratio = std::abs(pts[i] - pts[j]) / dth;
                if (ratio < best_ratio) { best_ratio = ratio; bi = i; bj = j; }
            }
        }
        // Refine the worst pair: for a genuine crossing the local chord
        // minimum over (theta, theta') collapses to ~0.
        double u = kTwoPi * bi / G, v = kTwoPi * bj / G;
        for (int round = 0; round < 8; ++round) {
            const double vv = v;
            u = golden_min([&](double t) { return std::abs(spec.base_point(t) - spec.base_point(vv)); },
                           u - spacing, u + spacing, 40);
            const double uu = u;
            v = golden_min([&](double t) { return std::abs(spec.base_point(uu) - spec.base_point(t)); },
                           v - spacing, v + spacing, 40);
        }
        const double chord = std::abs(spec.base_point(u) - spec.base_point(v));
        if (circ_dist(u, v) > 2.0 * spacing && chord < 1e-6 * scale)
            throw SelfIntersection("curve is not injective: chord " + std::to_string(chord) +
                                   " at parameter distance " + std::to_string(circ_dist(u, v)));
    }

    // ---- cumulative length table, refined until the total is stable ----
    std::size_t M = 512;
    double prev_len = -1.0;
    std::vector<double> theta, cum, spd;
    for (;;) {
        theta.assign(M + 1, 0.0);
        cum.assign(M + 1, 0.0);
        spd.assign(M + 1, 0.0);
        double acc = 0.0, comp = 0.0;  // Kahan compensation
        for (std::size_t k = 0; k <= M; ++k) theta[k] = kTwoPi * static_cast<double>(k) / static_cast<double>(M);
        for (std::size_t k = 0; k <= M; ++k) spd[k] = speed(theta[k]);
        for (std::size_t k = 0; k < M; ++k) {
            const double piece = gauss16(speed, theta[k], theta[k + 1]);
            const double y = piece - comp;
            const double t = acc + y;
            comp = (t - acc) - y;
            acc = t;
            cum[k + 1] = acc;
        }
        const double len = cum[M];
        if (!(len > 0.0) || !std::isfinite(len))
            throw NonRegularCurve("curve length is not positive/finite");
        if (prev_len >= 0.0 && std::fabs(len - prev_len) <= tol * len) break;
        if (M >= (1u << 15)) break;
        prev_len = len;
        M *= 2;
    }

    ArcLengthCurve c;
    c.spec_ = spec;
    c.smoothness_order_ = smoothness_order;
    c.theta_ = std::move(theta);
    c.cum_ = std::move(cum);
    c.speed_ = std::move(spd);
    c.length_ = c.cum_.back();

    double mn = c.speed_[0], mx = c.speed_[0];
    for (double v : c.speed_) { mn = std::min(mn, v); mx = std::max(mx, v); }
    c.constant_speed_ = (mx - mn) <= 1e-14 * mx;
    c.speed0_ = c.length_ / kTwoPi;   // consistent with the stored total length
    return c;
}

} // namespace curvegas
