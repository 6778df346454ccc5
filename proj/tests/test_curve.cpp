#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "curvegas/curve.hpp"
#include "curvegas/errors.hpp"
#include "curvegas/rng.hpp"

#include <cmath>
#include <complex>
#include <numbers>

using namespace curvegas;

namespace {
constexpr double kPi = std::numbers::pi;

ArcLengthCurve unit_circle() { return build_arclength_curve(CurveSpec::circle(1.0)); }
ArcLengthCurve ellipse21() { return build_arclength_curve(CurveSpec::ellipse(2.0, 1.0)); }
}

TEST_CASE("circle geometry is exact") {
    const ArcLengthCurve c = build_arclength_curve(CurveSpec::circle(3.0));
    CHECK(c.length() == doctest::Approx(6.0 * kPi).epsilon(1e-13));
    // Arc length s corresponds to angle s/3.
    for (double s : {0.0, 1.0, 4.2, 11.0, 18.0}) {
        CHECK(std::abs(c.point(s) - 3.0 * std::polar(1.0, s / 3.0)) < 1e-11);
        CHECK(c.curvature(s) == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
        CHECK(c.theta_of_arclength(s) == doctest::Approx(s / 3.0).epsilon(1e-12));
    }
    CHECK(std::abs(c.point(0.0) - complex(3.0, 0.0)) < 1e-14);  // basepoint at angle 0
    CHECK(std::abs(c.tangent(0.0) - complex(0.0, 1.0)) < 1e-12);
}

TEST_CASE("ellipse(2,1) length matches high-precision quadrature") {
    // Independent value: adaptive tanh-sinh quadrature of the speed at 30
    // significant digits gives 9.6884482205476761984.
    const ArcLengthCurve e = ellipse21();
    CHECK(e.length() == doctest::Approx(9.6884482205476762).epsilon(1e-12));
}

TEST_CASE("ellipse(2,1) frames match root-solved reference points") {
    // Reference frames from solving integral_0^theta speed = s with mpmath
    // (30 digits) and evaluating gamma, tangent, curvature in closed form.
    const ArcLengthCurve e = ellipse21();
    struct Ref {
        double s;
        complex gamma, tau;
        double curvature;
    };
    const Ref refs[] = {
        {1.0, {1.38337210404485598, 0.722198314479912808},
         {-0.901918365878150564, 0.431906542311744258}, 0.486936454241271853},
        {2.5, {-0.0778830196187103642, 0.999241491739493319},
         {-0.999810211009392221, -0.0194818367038275563}, 0.250427106227427991},
        {7.0, {-0.26613782801325289, -0.991106787447799217},
         {0.997754270438062415, -0.0669807123178740841}, 0.255064162833520626},
    };
    for (const Ref& r : refs) {
        CHECK(std::abs(e.point(r.s) - r.gamma) < 1e-10);
        CHECK(std::abs(e.tangent(r.s) - r.tau) < 1e-10);
        CHECK(e.curvature(r.s) == doctest::Approx(r.curvature).epsilon(1e-9));
    }
}

TEST_CASE("ellipse endpoints of the axes have closed-form frames") {
    const ArcLengthCurve e = ellipse21();
    // Basepoint (a, 0): curvature a/b^2 = 2, tangent +i.
    CHECK(std::abs(e.point(0.0) - complex(2.0, 0.0)) < 1e-13);
    CHECK(std::abs(e.tangent(0.0) - complex(0.0, 1.0)) < 1e-12);
    CHECK(e.curvature(0.0) == doctest::Approx(2.0).epsilon(1e-9));
    // Top of the minor axis (0, b): curvature b/a^2 = 1/4.
    const double s_top = e.length() / 4.0;  // quarter-period by symmetry
    CHECK(std::abs(e.point(s_top) - complex(0.0, 1.0)) < 1e-10);
    CHECK(e.curvature(s_top) == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("unit speed everywhere") {
    for (const ArcLengthCurve& c : {unit_circle(), ellipse21()}) {
        StreamRng rng(31u, 0u);
        for (int i = 0; i < 100; ++i) {
            const double s = rng.uniform(0.0, c.length());
            CHECK(std::abs(c.tangent(s)) == doctest::Approx(1.0).epsilon(1e-10));
        }
    }
}

TEST_CASE("wrap is idempotent and periodic evaluation is consistent") {
    const ArcLengthCurve e = ellipse21();
    const double l = e.length();
    StreamRng rng(32u, 0u);
    for (int i = 0; i < 50; ++i) {
        const double s = rng.uniform(-3.0 * l, 3.0 * l);
        const double w = e.wrap(s);
        CHECK(w >= 0.0);
        CHECK(w < l);
        CHECK(e.wrap(w) == w);  // bit-stable once wrapped
        // gamma(s + l) = gamma(s) up to the rounding of s + l itself.
        CHECK(std::abs(e.point(e.wrap(s + l)) - e.point(w)) < 1e-11);
    }
}

TEST_CASE("curve closes up") {
    for (const ArcLengthCurve& c : {unit_circle(), ellipse21()}) {
        const double l = c.length();
        CHECK(std::abs(c.point(l * (1.0 - 1e-12)) - c.point(0.0)) < 1e-8 * l);
    }
}

TEST_CASE("tangent differentiates the point and curvature the tangent") {
    const ArcLengthCurve e = ellipse21();
    StreamRng rng(33u, 0u);
    const double h = 1e-5;
    for (int i = 0; i < 100; ++i) {
        const double s = rng.uniform(0.1, e.length() - 0.1);
        const complex dp = (e.point(s + h) - e.point(s - h)) / (2.0 * h);
        CHECK(std::abs(dp - e.tangent(s)) < 1e-5);
        // Frenet: d tau/ds = curvature * (i tau) for positive orientation.
        const complex dt = (e.tangent(s + h) - e.tangent(s - h)) / (2.0 * h);
        const complex expected = e.curvature(s) * complex(0.0, 1.0) * e.tangent(s);
        CHECK(std::abs(dt - expected) < 1e-5);
    }
}

TEST_CASE("second derivative agrees with the Frenet normal component") {
    const ArcLengthCurve e = ellipse21();
    StreamRng rng(34u, 0u);
    for (int i = 0; i < 50; ++i) {
        const double s = rng.uniform(0.0, e.length());
        const complex expected = e.curvature(s) * complex(0.0, 1.0) * e.tangent(s);
        CHECK(std::abs(e.second_derivative(s) - expected) < 1e-8);
    }
}

TEST_CASE("projection inverts the parametrization") {
    for (const ArcLengthCurve& c : {unit_circle(), ellipse21()}) {
        StreamRng rng(35u, 0u);
        for (int i = 0; i < 50; ++i) {
            const double s = rng.uniform(0.0, c.length());
            const Projection p = c.project(c.point(s));
            CHECK(p.distance < 1e-12);
            // Arclength matches modulo the period.
            double d = std::fabs(p.arclength - s);
            d = std::min(d, std::fabs(d - c.length()));
            CHECK(d < 1e-9);
        }
    }
}

TEST_CASE("projection of off-curve points reports the gap") {
    const ArcLengthCurve c = unit_circle();
    const Projection p = c.project(complex(1.5, 0.0));
    CHECK(p.distance == doctest::Approx(0.5).epsilon(1e-10));
    double d = std::fabs(p.arclength - 0.0);
    d = std::min(d, std::fabs(d - c.length()));
    CHECK(d < 1e-9);
}

TEST_CASE("single-mode trigonometric curve reproduces the circle") {
    const ArcLengthCurve f =
        build_arclength_curve(CurveSpec::fourier({complex(1.0, 0.0)}, 1));
    const ArcLengthCurve c = unit_circle();
    CHECK(f.length() == doctest::Approx(c.length()).epsilon(1e-12));
    for (double s : {0.0, 1.0, 3.5, 6.0}) {
        CHECK(std::abs(f.point(s) - c.point(s)) < 1e-10);
        CHECK(f.curvature(s) == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("perturbed trigonometric curve keeps the contracts") {
    const ArcLengthCurve f = build_arclength_curve(
        CurveSpec::fourier({complex(1.0, 0.0), complex(0.0, 0.0), complex(0.08, 0.0)}, 1));
    StreamRng rng(36u, 0u);
    for (int i = 0; i < 50; ++i) {
        const double s = rng.uniform(0.0, f.length());
        CHECK(std::abs(f.tangent(s)) == doctest::Approx(1.0).epsilon(1e-10));
        const Projection p = f.project(f.point(s));
        CHECK(p.distance < 1e-10);
    }
    CHECK(f.length() > 2.0 * kPi);  // perturbation lengthens the curve
}

TEST_CASE("invalid specs are rejected at construction") {
    CHECK_THROWS_AS(CurveSpec::circle(0.0), ConfigError);
    CHECK_THROWS_AS(CurveSpec::circle(-1.0), ConfigError);
    CHECK_THROWS_AS(CurveSpec::ellipse(2.0, 0.0), ConfigError);
    CHECK_THROWS_AS(CurveSpec::ellipse(-2.0, 1.0), ConfigError);
    CHECK_THROWS_AS(CurveSpec::fourier({}, 1), ConfigError);
}

TEST_CASE("degenerate trigonometric curves are rejected") {
    // gamma(theta) = exp(2 i theta) traverses the unit circle twice: every
    // point is hit twice, so the curve is not simple.
    CHECK_THROWS_AS(build_arclength_curve(CurveSpec::fourier({complex(1.0, 0.0)}, 2)),
                    SelfIntersection);
    // c_{-1} = c_1 = 1 gives 2cos(theta), a flat segment whose derivative
    // vanishes at the turning points.
    CHECK_THROWS_AS(build_arclength_curve(
                        CurveSpec::fourier({complex(1.0, 0.0), complex(0.0, 0.0),
                                            complex(1.0, 0.0)}, -1)),
                    NonRegularCurve);
}
