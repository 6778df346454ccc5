#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "curvegas/configuration.hpp"
#include "curvegas/coulomb.hpp"
#include "curvegas/curve.hpp"
#include "curvegas/errors.hpp"
#include "curvegas/functionals.hpp"
#include "curvegas/rng.hpp"
#include "curvegas/sde.hpp"

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

using namespace curvegas;

namespace {
constexpr double kTau = 2.0 * std::numbers::pi;

ArcLengthCurve unit_circle() { return build_arclength_curve(CurveSpec::circle(1.0)); }
ArcLengthCurve ellipse21() { return build_arclength_curve(CurveSpec::ellipse(2.0, 1.0)); }

// The five reference observables used throughout: x, y, x^2, xy, x^2-y^2+x/2.
std::vector<CurveObservable> reference_observables() {
    std::vector<CurveObservable> obs;
    obs.emplace_back(Polynomial2({{1, 0, 1.0}}));
    obs.emplace_back(Polynomial2({{0, 1, 1.0}}));
    obs.emplace_back(Polynomial2({{2, 0, 1.0}}));
    obs.emplace_back(Polynomial2({{1, 1, 1.0}}));
    obs.emplace_back(Polynomial2({{2, 0, 1.0}, {0, 2, -1.0}, {1, 0, 0.5}}));
    return obs;
}

ParamPath descent_path(const ArcLengthCurve& curve, double dt, double t_end) {
    SimulationConfig cfg;
    cfg.form = DriftForm::kappa_form;
    cfg.temperature = InverseTemperature::from_kappa(0.0);
    cfg.dt = dt;
    cfg.t_end = t_end;
    cfg.n_frames = static_cast<std::size_t>(std::llround(t_end / dt));
    const Configuration start = make_configuration({0.3, 1.9, 3.0, 4.9}, kTau);
    return to_param_path(simulate(curve, start, cfg));
}

// Smooth in-domain path: independent sinusoids around a spread-out base, with
// amplitudes small enough that the ordering can never break.
ParamPath sinusoid_path(double l, std::size_t n, std::size_t frames, StreamRng& rng) {
    const double spacing = l / static_cast<double>(n);
    std::vector<double> base(n), amp(n), omega(n), phase(n);
    for (std::size_t i = 0; i < n; ++i) {
        base[i] = spacing * (static_cast<double>(i) + 0.5);
        amp[i] = 0.2 * spacing * rng.uniform01();
        omega[i] = rng.uniform(0.5, 3.0);
        phase[i] = rng.uniform(0.0, kTau);
    }
    ParamPath p;
    const double dt = 1.0 / static_cast<double>(frames - 1);
    for (std::size_t k = 0; k < frames; ++k) {
        const double t = static_cast<double>(k) * dt;
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = base[i] + amp[i] * std::sin(omega[i] * t + phase[i]);
        }
        p.times.push_back(t);
        p.states.push_back(make_configuration(std::move(x), l));
    }
    return p;
}
}

TEST_CASE("action of a discretized descent path shrinks quadratically in dt") {
    const ArcLengthCurve circle = unit_circle();
    // Independent quadrature of the action of the exact flow truncated to
    // Euler steps gives, for the start (0.3, 1.9, 3.0, 4.9) run to t = 2:
    //   dt = 1e-3   -> 6.278e-8
    //   dt = 5e-4   -> 1.568e-8
    //   dt = 2.5e-4 -> 3.920e-9
    const double i1 = rate_I(circle, descent_path(circle, 1e-3, 2.0));
    const double i2 = rate_I(circle, descent_path(circle, 5e-4, 2.0));
    const double i3 = rate_I(circle, descent_path(circle, 2.5e-4, 2.0));
    CHECK(i1 == doctest::Approx(6.278e-8).epsilon(1e-3));
    CHECK(i2 == doctest::Approx(1.568e-8).epsilon(1e-3));
    CHECK(i3 == doctest::Approx(3.920e-9).epsilon(1e-3));
    // At least linear decrease under halving (observed order is two).
    CHECK(i2 <= 0.7 * i1);
    CHECK(i3 <= 0.7 * i2);
}

TEST_CASE("planar action agrees with the parameter action on lifted paths") {
    StreamRng rng(501u, 0u);
    for (int rep = 0; rep < 10; ++rep) {
        const ArcLengthCurve curve = (rep % 2 == 0) ? unit_circle() : ellipse21();
        const std::size_t n = 2 + rng.uniform_index(3);
        const ParamPath p = sinusoid_path(curve.length(), n, 81, rng);
        const double i_val = rate_I(curve, p);
        REQUIRE(i_val > 1e-6);  // the comparison below is relative
        const double j_val = rate_J(curve, transplant(curve, p));
        CHECK(std::fabs(j_val - i_val) <= 1e-6 * i_val);
    }
    // Same identity on a near-zero-action descent path.
    const ArcLengthCurve circle = unit_circle();
    const ParamPath flow = descent_path(circle, 1e-3, 2.0);
    const double i_val = rate_I(circle, flow);
    const double j_val = rate_J(circle, transplant(circle, flow));
    CHECK(std::fabs(j_val - i_val) <= 1e-6 * i_val);
}

TEST_CASE("time reversal raises the action by twice the drift work") {
    const ArcLengthCurve circle = unit_circle();
    const std::size_t frames = 65;
    ParamPath fwd;
    const double c[3] = {0.5, 2.6, 4.4};
    const double amp[3] = {0.25, 0.3, 0.2};
    const double omega[3] = {1.3, 2.1, 0.7};
    const double phase[3] = {0.4, 1.9, 3.3};
    const double dt = 1.0 / static_cast<double>(frames - 1);
    for (std::size_t k = 0; k < frames; ++k) {
        const double t = static_cast<double>(k) * dt;
        std::vector<double> x(3);
        for (std::size_t i = 0; i < 3; ++i) {
            x[i] = c[i] + amp[i] * std::sin(omega[i] * t + phase[i]);
        }
        fwd.times.push_back(t);
        fwd.states.push_back(make_configuration(std::move(x), kTau));
    }
    ParamPath rev;
    rev.times = fwd.times;
    rev.states.assign(fwd.states.rbegin(), fwd.states.rend());

    const double i_fwd = rate_I(circle, fwd);
    const double i_rev = rate_I(circle, rev);

    // I(reversed) - I(forward) = 2 sum_k dt <v_k, d(mid_k)> with d = -grad V,
    // because only the cross term changes sign under v -> -v.
    double cross = 0.0;
    for (std::size_t k = 0; k + 1 < frames; ++k) {
        std::vector<double> mid(3);
        for (std::size_t i = 0; i < 3; ++i) {
            mid[i] = 0.5 * (fwd.states[k].x[i] + fwd.states[k + 1].x[i]);
        }
        const std::vector<double> g = energy_gradient(circle, quotient_map(mid, kTau));
        const double h = fwd.times[k + 1] - fwd.times[k];
        for (std::size_t i = 0; i < 3; ++i) {
            const double v = (fwd.states[k + 1].x[i] - fwd.states[k].x[i]) / h;
            cross += 2.0 * h * v * (-g[i]);
        }
    }
    REQUIRE(std::fabs(cross) > 1e-3);
    CHECK(std::fabs((i_rev - i_fwd) - cross) < 1e-10 * std::max(1.0, std::fabs(cross)));
}

TEST_CASE("a rigid rotation pays exactly the kinetic action") {
    const ArcLengthCurve circle = unit_circle();
    const std::size_t n = 4;
    const double v = 4.0;
    const double t_end = 2.0;    // total motion 8 > 2*pi: several wrap events
    const std::size_t frames = 201;
    const Configuration start = equidistant_configuration(n, kTau);
    ParamPath p;
    const double dt = t_end / static_cast<double>(frames - 1);
    for (std::size_t k = 0; k < frames; ++k) {
        const double t = static_cast<double>(k) * dt;
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = start.x[i] + v * t;
        p.times.push_back(t);
        p.states.push_back(quotient_map(x, kTau));
    }
    // Equidistant points are drift-free, so I = (1/2) n v^2 T; re-anchoring
    // of the stored states must not register as motion.
    const double expected = 0.5 * static_cast<double>(n) * v * v * t_end;
    CHECK(rate_I(circle, p) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("tangential derivative of Re z on the unit circle is -sin s") {
    const ArcLengthCurve circle = unit_circle();
    const CurveObservable f(Polynomial2({{1, 0, 1.0}}));
    for (double s : {0.0, 0.5 * std::numbers::pi, std::numbers::pi, 2.2}) {
        CHECK(std::fabs(tangential_derivative(circle, f, circle.point(s)) +
                        std::sin(s)) < 1e-12);
    }
    CHECK_THROWS_AS(tangential_derivative(circle, f, complex(1.5, 0.0)),
                    OffCurvePoint);
}

TEST_CASE("frame derivatives match finite differences along the ellipse") {
    const ArcLengthCurve e = ellipse21();
    // A polynomial with non-trivial mixed and third-order structure.
    const CurveObservable f(
        Polynomial2({{2, 1, 1.0}, {1, 1, 0.5}, {0, 3, -1.0}}));
    auto g = [&](double s) { return f.value(e.point(s)); };
    for (double s0 : {1.0, 2.5, 7.0}) {
        const WeightedMeasure mu =
            measure_on_curve(e, std::vector<double>{s0}, std::vector<double>{1.0});
        const double h1 = 1e-5;
        const double fd1 = (g(s0 + h1) - g(s0 - h1)) / (2.0 * h1);
        CHECK(f.ds(mu[0]) == doctest::Approx(fd1).epsilon(1e-7));
        const double h2 = 1e-4;
        const double fd2 = (g(s0 + h2) - 2.0 * g(s0) + g(s0 - h2)) / (h2 * h2);
        CHECK(f.dss(mu[0]) == doctest::Approx(fd2).epsilon(1e-4));
    }
    // Laplacians: x^2 - y^2 is harmonic, x^2 has Laplacian 2.
    const CurveObservable harmonic(Polynomial2({{2, 0, 1.0}, {0, 2, -1.0}}));
    CHECK(harmonic.laplacian(complex(1.3, -0.4)) == 0.0);
    const CurveObservable xsq(Polynomial2({{2, 0, 1.0}}));
    CHECK(xsq.laplacian(complex(0.7, 2.0)) == 2.0);
}

TEST_CASE("two-atom quadratic form matches an explicit evaluation") {
    const ArcLengthCurve e = ellipse21();
    const std::vector<double> s{1.0, 2.5};
    const std::vector<double> w{0.3, 0.7};
    const WeightedMeasure mu = measure_on_curve(e, s, w);
    // f = x^2 - y^2 + x/2, assembled by hand via the Wirtinger form:
    // f_s = 2 Re{tau f_z}, f_ss = tau^T H tau + k (tau_x f_y - tau_y f_x).
    const CurveObservable obs(Polynomial2({{2, 0, 1.0}, {0, 2, -1.0}, {1, 0, 0.5}}));
    auto fs = [](const MeasureAtom& a) {
        const double fx = 2.0 * a.z.real() + 0.5;
        const double fy = -2.0 * a.z.imag();
        const complex f_z = 0.5 * complex(fx, -fy);
        return 2.0 * std::real(a.tau * f_z);
    };
    auto fss = [](const MeasureAtom& a) {
        const double fx = 2.0 * a.z.real() + 0.5;
        const double fy = -2.0 * a.z.imag();
        const double quad = 2.0 * a.tau.real() * a.tau.real() -
                            2.0 * a.tau.imag() * a.tau.imag();
        return quad + a.curvature * (a.tau.real() * fy - a.tau.imag() * fx);
    };
    const double beta = 1.7;
    double total = 0.0;
    for (std::size_t a = 0; a < 2; ++a) {
        for (std::size_t b = 0; b < 2; ++b) {
            if (a == b) {
                total += w[a] * w[a] * fss(mu[a]);
            } else {
                const complex chord = mu[a].z - mu[b].z;
                const double k_ab = fs(mu[a]) * std::real(mu[a].tau / chord) -
                                    fs(mu[b]) * std::real(mu[b].tau / chord);
                total += w[a] * w[b] * k_ab;
            }
        }
    }
    total *= 0.25 * beta;
    CHECK(hydro_residual(mu, obs, beta) == doctest::Approx(total).epsilon(1e-12));
    // The form is linear in beta.
    CHECK(hydro_residual(mu, obs, 3.4) ==
          doctest::Approx(2.0 * hydro_residual(mu, obs, 1.7)).epsilon(1e-12));
}

TEST_CASE("uniform atoms on the circle annihilate the reference observables") {
    const ArcLengthCurve circle = unit_circle();
    const WeightedMeasure mu =
        empirical_measure(circle, equidistant_configuration(1024, kTau));
    for (const CurveObservable& f : reference_observables()) {
        CHECK(std::fabs(hydro_residual(mu, f, 2.0)) < 1e-10);
    }
}

TEST_CASE("path and measure validation") {
    const ArcLengthCurve circle = unit_circle();
    const Configuration a = make_configuration({0.5, 2.5, 4.5}, kTau);
    const Configuration b = make_configuration({0.6, 2.6, 4.6}, kTau);

    ParamPath nonuniform;
    nonuniform.times = {0.0, 0.1, 0.25};
    nonuniform.states = {a, b, a};
    CHECK_THROWS_AS(rate_I(circle, nonuniform), DegeneratePath);

    ParamPath single;
    single.times = {0.0};
    single.states = {a};
    CHECK_THROWS_AS(rate_I(circle, single), DegeneratePath);

    ParamPath mismatched;
    mismatched.times = {0.0, 0.1};
    mismatched.states = {a, make_configuration({0.5, 3.5}, kTau)};
    CHECK_THROWS_AS(rate_I(circle, mismatched), DegeneratePath);

    ParamPath misaligned;
    misaligned.times = {0.0, 0.1, 0.2};
    misaligned.states = {a, b};
    CHECK_THROWS_AS(rate_I(circle, misaligned), DegeneratePath);

    CurvePath off;
    off.times = {0.0, 0.1};
    off.points = {{complex(2.0, 0.0), complex(-1.0, 0.0)},
                  {complex(1.0, 0.0), complex(-1.0, 0.0)}};
    CHECK_THROWS_AS(rate_J(circle, off), OffCurvePath);

    const WeightedMeasure mu =
        measure_on_curve(circle, std::vector<double>{1.0, 2.0},
                         std::vector<double>{0.5, 0.5});
    const CurveObservable f(Polynomial2({{1, 0, 1.0}}));
    CHECK_THROWS_AS(hydro_residual(mu, f, 0.0), ConfigError);
    CHECK_THROWS_AS(hydro_residual(WeightedMeasure{}, f, 2.0), ConfigError);

    WeightedMeasure negative = mu;
    negative[0].weight = -0.5;
    CHECK_THROWS_AS(hydro_residual(negative, f, 2.0), ConfigError);

    WeightedMeasure lopsided = mu;
    lopsided[0].weight = 0.8;  // mass 1.3
    CHECK_THROWS_AS(hydro_residual(lopsided, f, 2.0), ConfigError);

    WeightedMeasure coincident = mu;
    coincident[1] = coincident[0];
    coincident[0].weight = coincident[1].weight = 0.5;
    CHECK_THROWS_AS(hydro_residual(coincident, f, 2.0), DegenerateConfiguration);

    CHECK_THROWS_AS(measure_on_curve(circle, std::vector<double>{1.0},
                                     std::vector<double>{0.5, 0.5}),
                    ConfigError);
    CHECK_THROWS_AS(Polynomial2({{-1, 0, 1.0}}), ConfigError);
}

TEST_CASE("recorded curve points equal the replanted parameter path") {
    const ArcLengthCurve circle = unit_circle();
    SimulationConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 0.05;
    cfg.n_frames = 50;
    cfg.seed = 77;
    cfg.record_curve_points = true;
    const TrajectoryRecord rec =
        simulate(circle, make_configuration({0.4, 2.0, 4.1}, kTau), cfg);
    const ParamPath path = to_param_path(rec);
    REQUIRE(path.times.size() == path.states.size());
    const CurvePath lifted = transplant(circle, path);
    REQUIRE(lifted.points.size() == rec.curve_points.size());
    for (std::size_t k = 0; k < lifted.points.size(); ++k) {
        for (std::size_t i = 0; i < lifted.points[k].size(); ++i) {
            CHECK(lifted.points[k][i] == rec.curve_points[k][i]);
        }
    }
    const double i_val = rate_I(circle, path);
    CHECK(i_val >= 0.0);
    CHECK(std::isfinite(i_val));
}
