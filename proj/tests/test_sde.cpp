#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "curvegas/configuration.hpp"
#include "curvegas/coulomb.hpp"
#include "curvegas/curve.hpp"
#include "curvegas/errors.hpp"
#include "curvegas/rng.hpp"
#include "curvegas/sde.hpp"

#include <cmath>
#include <numbers>
#include <vector>

using namespace curvegas;

namespace {
constexpr double kTau = 2.0 * std::numbers::pi;

ArcLengthCurve unit_circle() { return build_arclength_curve(CurveSpec::circle(1.0)); }
}

TEST_CASE("two antipodal-quarter particles have drift (-1/2, +1/2)") {
    // At x = (0, pi/2), beta = 2: b_0 = (1/2) cot(-pi/4) = -1/2.
    const ArcLengthCurve circle = unit_circle();
    const Configuration c = make_configuration({0.0, 0.5 * std::numbers::pi}, kTau);
    const std::vector<double> b = drift(circle, c, 2.0);
    CHECK(b[0] == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(b[1] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("temperature parameter keeps kappa = 2/beta exactly") {
    const InverseTemperature t1 = InverseTemperature::from_beta(3.7);
    CHECK(t1.kappa() == 2.0 / 3.7);
    const InverseTemperature t2 = InverseTemperature::from_kappa(0.5);
    CHECK(t2.beta() == 4.0);
    CHECK(InverseTemperature::from_kappa(0.0).kappa() == 0.0);
}

TEST_CASE("the two drift forms are the same process at beta = 2, bit for bit") {
    const ArcLengthCurve circle = unit_circle();
    SimulationConfig a;
    a.form = DriftForm::beta_form;
    a.temperature = InverseTemperature::from_beta(2.0);
    a.dt = 1e-3;
    a.seed = 71;
    SimulationConfig b = a;
    b.form = DriftForm::kappa_form;
    b.temperature = InverseTemperature::from_kappa(1.0);

    Configuration xa = make_configuration({0.2, 1.4, 2.9, 4.4, 5.6}, kTau);
    Configuration xb = xa;
    for (std::uint64_t k = 0; k < 100; ++k) {
        xa = step(circle, xa, a, k);
        xb = step(circle, xb, b, k);
        for (std::size_t i = 0; i < xa.size(); ++i) CHECK(xa.x[i] == xb.x[i]);
    }
}

namespace {
// Runs the kappa form over time h against the beta form over time kappa*h
// (same noise keys, which never depend on dt) and returns the worst
// coordinate gap over 100 steps.
double matched_step_gap(const ArcLengthCurve& circle, double beta) {
    const double kappa = 2.0 / beta;
    SimulationConfig a;
    a.form = DriftForm::beta_form;
    a.temperature = InverseTemperature::from_beta(beta);
    a.dt = kappa * 1e-3;
    a.seed = 72;
    SimulationConfig b;
    b.form = DriftForm::kappa_form;
    b.temperature = InverseTemperature::from_kappa(kappa);
    b.dt = 1e-3;
    b.seed = 72;

    Configuration xa = make_configuration({0.2, 1.4, 2.9, 4.4, 5.6}, kTau);
    Configuration xb = xa;
    double worst = 0.0;
    for (std::uint64_t k = 0; k < 100; ++k) {
        xa = step(circle, xa, a, k);
        xb = step(circle, xb, b, k);
        for (std::size_t i = 0; i < xa.size(); ++i) {
            worst = std::max(worst, std::fabs(xa.x[i] - xb.x[i]));
        }
    }
    return worst;
}
} // namespace

TEST_CASE("matched-step time change holds at beta != 2 to rounding accuracy") {
    // The drifts satisfy (beta/2)*kappa = 1 and the noise scales obey
    // sqrt(kappa*h) = sqrt(kappa)*sqrt(h), each up to one rounding. At a
    // dyadic temperature (beta = 4) the scalings are exact powers of two,
    // so the gap can vanish; at beta = 1.7 both sides really do round
    // through different arithmetic, so the gap is tiny but nonzero.
    const ArcLengthCurve circle = unit_circle();
    CHECK(matched_step_gap(circle, 4.0) < 1e-12);
    const double generic = matched_step_gap(circle, 1.7);
    CHECK(generic < 1e-12);
    CHECK(generic > 0.0);
}

TEST_CASE("stepping commutes with the quotient map, bit for bit") {
    // Positions on the 2^-40 grid plus whole periods are exactly
    // representable, so the lifted start hits identical arithmetic.
    const ArcLengthCurve circle = unit_circle();
    SimulationConfig cfg;
    cfg.temperature = InverseTemperature::from_beta(2.0);
    cfg.dt = 1e-3;
    cfg.seed = 73;

    std::vector<double> base{0.25, 1.0, 2.5, 5.75};
    std::vector<double> lifted(base);
    for (double& v : lifted) v += 7.0 * kTau;

    Configuration xa = quotient_map(base, kTau);
    Configuration xb = quotient_map(lifted, kTau);
    for (std::uint64_t k = 0; k < 50; ++k) {
        xa = step(circle, xa, cfg, k);
        xb = step(circle, xb, cfg, k);
        for (std::size_t i = 0; i < xa.size(); ++i) CHECK(xa.x[i] == xb.x[i]);
    }
}

TEST_CASE("a single particle is driftless keyed Brownian motion") {
    const ArcLengthCurve circle = unit_circle();
    SimulationConfig cfg;
    cfg.temperature = InverseTemperature::from_beta(2.0);
    cfg.dt = 0.01;
    cfg.seed = 74;

    Configuration x = make_configuration({1.0}, kTau);
    double manual = 1.0;
    const double root_h = std::sqrt(cfg.dt);
    for (std::uint64_t k = 0; k < 20; ++k) {
        x = step(circle, x, cfg, k);
        // First proposal is always accepted (no ordering to violate), so the
        // draw is the attempt-0, particle-0 key.
        manual += root_h * standard_normal(NoiseKey{cfg.seed, k, 0u, 0u});
        const Configuration expected = quotient_map(std::vector<double>{manual}, kTau);
        CHECK(x.x[0] == expected.x[0]);
        manual = expected.x[0];
    }
}

TEST_CASE("zero-temperature dynamics relaxes to the equidistant configuration") {
    const ArcLengthCurve circle = unit_circle();
    SimulationConfig cfg;
    cfg.form = DriftForm::kappa_form;
    cfg.temperature = InverseTemperature::from_kappa(0.0);
    cfg.dt = 1e-2;
    cfg.t_end = 20.0;
    cfg.seed = 75;
    cfg.n_frames = 10;

    const Configuration start = make_configuration({0.3, 0.8, 2.0, 3.1, 4.1}, kTau);
    const TrajectoryRecord rec = simulate(circle, start, cfg);
    const std::vector<double> gaps = cyclic_gaps(rec.states.back());
    for (double g : gaps) CHECK(g == doctest::Approx(kTau / 5.0).epsilon(1e-6));

    // Energy is non-increasing along the recorded flow.
    for (std::size_t k = 1; k < rec.states.size(); ++k) {
        CHECK(energy(circle, rec.states[k]) <=
              energy(circle, rec.states[k - 1]) + 1e-12);
    }
}

TEST_CASE("simulation frames sit on the expected uniform grid") {
    const ArcLengthCurve circle = unit_circle();
    SimulationConfig cfg;
    cfg.temperature = InverseTemperature::from_beta(2.0);
    cfg.dt = 1e-3;
    cfg.t_end = 1.0;
    cfg.n_frames = 10;
    cfg.seed = 76;

    const TrajectoryRecord rec = simulate(circle, equidistant_configuration(4, kTau), cfg);
    CHECK(rec.n_steps == 1000);
    REQUIRE(rec.times.size() == 11);  // initial + every 100 steps
    for (std::size_t k = 0; k < rec.times.size(); ++k) {
        CHECK(rec.times[k] == doctest::Approx(0.1 * static_cast<double>(k)).epsilon(1e-12));
    }
    CHECK(rec.stats.proposals >= rec.n_steps);
}

TEST_CASE("identical configuration and seed reproduce identical trajectories") {
    const ArcLengthCurve circle = unit_circle();
    SimulationConfig cfg;
    cfg.temperature = InverseTemperature::from_beta(2.0);
    cfg.dt = 1e-3;
    cfg.t_end = 0.2;
    cfg.seed = 77;
    const Configuration start = make_configuration({0.3, 1.9, 3.0, 4.9}, kTau);
    const TrajectoryRecord r1 = simulate(circle, start, cfg);
    const TrajectoryRecord r2 = simulate(circle, start, cfg);
    REQUIRE(r1.states.size() == r2.states.size());
    for (std::size_t k = 0; k < r1.states.size(); ++k) {
        for (std::size_t i = 0; i < start.size(); ++i) {
            CHECK(r1.states[k].x[i] == r2.states[k].x[i]);
        }
    }

    cfg.seed = 78;  // a different seed must change the path
    const TrajectoryRecord r3 = simulate(circle, start, cfg);
    CHECK(r3.states.back().x[0] != r1.states.back().x[0]);
}

TEST_CASE("configuration validation rejects unusable setups") {
    SimulationConfig cfg;
    cfg.temperature = InverseTemperature::from_beta(0.5);
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("beta"), ConfigError);

    SimulationConfig cfg2;
    cfg2.dt = 2.0;
    cfg2.t_end = 1.0;
    CHECK_THROWS_AS(cfg2.validate(), ConfigError);

    SimulationConfig cfg3;
    cfg3.dt = 0.0;
    CHECK_THROWS_AS(cfg3.validate(), ConfigError);

    // kappa-form low temperature is legitimate (beta large), and so is the
    // deterministic kappa = 0 flow.
    SimulationConfig cfg4;
    cfg4.form = DriftForm::kappa_form;
    cfg4.temperature = InverseTemperature::from_kappa(0.0);
    CHECK_NOTHROW(cfg4.validate());
}

TEST_CASE("a hopeless step eventually reports failure") {
    const ArcLengthCurve circle = unit_circle();
    SimulationConfig cfg;
    cfg.temperature = InverseTemperature::from_beta(2.0);
    cfg.dt = 10.0;
    cfg.t_end = 10.0;
    cfg.max_halvings = 0;  // no rescue allowed
    cfg.seed = 79;
    const Configuration tight = make_configuration({0.0, 0.01}, kTau);
    CHECK_THROWS_AS(step(circle, tight, cfg, 0), StepFailure);
}

TEST_CASE("tamed policy keeps the ordering on a stiff configuration") {
    const ArcLengthCurve circle = unit_circle();
    SimulationConfig cfg;
    cfg.temperature = InverseTemperature::from_beta(2.0);
    cfg.policy = StepPolicy::tamed;
    cfg.dt = 1e-2;
    cfg.seed = 80;
    Configuration x = make_configuration({0.0, 0.05, 3.0}, kTau);
    for (std::uint64_t k = 0; k < 50; ++k) {
        x = step(circle, x, cfg, k);
        CHECK(strictly_cyclically_ordered(x.x, kTau));
    }
}

TEST_CASE("transplant maps parameters to curve points in order") {
    const ArcLengthCurve circle = unit_circle();
    const Configuration c =
        make_configuration({0.0, 0.5 * std::numbers::pi, std::numbers::pi}, kTau);
    const std::vector<complex> pts = transplant(circle, c);
    REQUIRE(pts.size() == 3);
    CHECK(std::abs(pts[0] - complex(1.0, 0.0)) < 1e-15);
    CHECK(std::abs(pts[1] - complex(0.0, 1.0)) < 1e-14);
    CHECK(std::abs(pts[2] - complex(-1.0, 0.0)) < 1e-14);

    // Equidistant N=4 lands on the fourth roots of unity.
    const std::vector<complex> roots =
        transplant(circle, equidistant_configuration(4, kTau));
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(std::abs(roots[i] - std::polar(1.0, kTau * 0.25 * static_cast<double>(i))) <
              1e-13);
        CHECK(std::abs(roots[i]) == doctest::Approx(1.0).epsilon(1e-10));
    }
}
