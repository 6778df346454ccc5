#include "curvegas/sde.hpp"

#include "curvegas/coulomb.hpp"
#include "curvegas/errors.hpp"
#include "curvegas/rng.hpp"

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

// Cover-space ordering test for a raw Euler proposal: strictly increasing
// coordinates spanning less than one period. The first coordinate may have
// drifted outside [0, l); quotient_map fixes that after acceptance.
bool proposal_ordered(const std::vector<double>& p, double l) {
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        if (!(p[i] < p[i + 1])) return false;
    }
    return p.size() < 2 || p.back() < p.front() + l;
}

struct Stepper {
    const ArcLengthCurve& curve;
    const SimulationConfig& cfg;
    std::uint64_t step_index;
    StepStats& stats;
    std::uint32_t attempt = 0;

    double noise_coefficient() const {
        return cfg.form == DriftForm::beta_form ? 1.0
                                                : std::sqrt(cfg.temperature.kappa());
    }

    std::vector<double> drift_vector(const Configuration& c) const {
        if (cfg.form == DriftForm::beta_form) {
            return drift(curve, c, cfg.temperature.beta());
        }
        std::vector<double> g = energy_gradient(curve, c);
        for (double& v : g) v = -v;
        return g;
    }

    // Advance `state` by time h; on an ordering violation recurse into two
    // half steps, each with fresh noise (distinct attempt indices), so the
    // step still covers exactly h of simulated time.
    Configuration advance(const Configuration& state, double h, int depth) {
        const double l = state.domain_length;
        const std::size_t n = state.size();
        const std::vector<double> d = drift_vector(state);
        const double sigma = noise_coefficient() * std::sqrt(h);

        std::vector<double> proposal(n);
        const std::uint32_t this_attempt = attempt++;
        ++stats.proposals;
        for (std::size_t i = 0; i < n; ++i) {
            double inc = d[i] * h;
            if (cfg.policy == StepPolicy::tamed) {
                inc /= 1.0 + h * std::abs(d[i]);
            }
            const double xi = standard_normal(
                NoiseKey{cfg.seed, step_index, this_attempt,
                         static_cast<std::uint32_t>(i)});
            proposal[i] = state.x[i] + inc + sigma * xi;
        }

        if (proposal_ordered(proposal, l)) {
            return quotient_map(proposal, l);
        }

        ++stats.halving_events;
        if (depth >= cfg.max_halvings) {
            // Identify the tightest violated gap for the error message.
            std::size_t worst = 0;
            double worst_gap = proposal.size() > 1
                                   ? proposal[1] - proposal[0]
                                   : 0.0;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                const double g = proposal[i + 1] - proposal[i];
                if (g < worst_gap) { worst_gap = g; worst = i; }
            }
            if (n > 1) {
                const double wrap = proposal.front() + l - proposal.back();
                if (wrap < worst_gap) { worst_gap = wrap; worst = n - 1; }
            }
            throw StepFailure("ordering violated at step " +
                              std::to_string(step_index) + " (t = " +
                              fmt_double(static_cast<double>(step_index) * cfg.dt) +
                              ") after " + std::to_string(cfg.max_halvings) +
                              " halvings; gap " + std::to_string(worst) +
                              " -> " + fmt_double(worst_gap));
        }
        if (depth + 1 > stats.max_depth) stats.max_depth = depth + 1;
        Configuration mid = advance(state, 0.5 * h, depth + 1);
        return advance(mid, 0.5 * h, depth + 1);
    }
};

} // namespace

InverseTemperature InverseTemperature::from_beta(double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw ConfigError("beta must be positive and finite, got " + fmt_double(beta));
    }
    return InverseTemperature(beta, true);
}

InverseTemperature InverseTemperature::from_kappa(double kappa) {
    if (!(kappa >= 0.0) || !std::isfinite(kappa)) {
        throw ConfigError("kappa must be non-negative and finite, got " +
                          fmt_double(kappa));
    }
    return InverseTemperature(kappa, false);
}

void SimulationConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw ConfigError("dt must be positive and finite");
    }
    if (!(t_end > 0.0) || !std::isfinite(t_end)) {
        throw ConfigError("t_end must be positive and finite");
    }
    if (dt > t_end) {
        throw ConfigError("dt must not exceed t_end (dt = " + fmt_double(dt) +
                          ", t_end = " + fmt_double(t_end) + ")");
    }
    if (form == DriftForm::beta_form &&
        !(std::isfinite(temperature.beta()) && temperature.beta() >= 1.0)) {
        throw ConfigError(
            "beta_form requires finite beta >= 1 (collisions occur in finite "
            "time below that); got beta = " + fmt_double(temperature.beta()));
    }
    if (max_halvings < 0) throw ConfigError("max_halvings must be >= 0");
    if (n_frames < 1) throw ConfigError("n_frames must be >= 1");
}

Configuration step(const ArcLengthCurve& curve, const Configuration& state,
                   const SimulationConfig& cfg, std::uint64_t step_index,
                   StepStats* stats) {
    // Canonicalize first so a state handed in as any cover-space lift takes
    // exactly the same arithmetic path as its fundamental-domain
    // representative: noise keys depend only on (seed, step, attempt,
    // particle), never on the lift.
    const Configuration canon = quotient_map(state.x, state.domain_length);
    StepStats local;
    Stepper s{curve, cfg, step_index, stats ? *stats : local};
    return s.advance(canon, cfg.dt, 0);
}

std::vector<complex> transplant(const ArcLengthCurve& curve,
                                const Configuration& state) {
    std::vector<complex> pts(state.size());
    for (std::size_t i = 0; i < state.size(); ++i) {
        pts[i] = curve.point(state.x[i]);
    }
    return pts;
}

TrajectoryRecord simulate(const ArcLengthCurve& curve, const Configuration& initial,
                          const SimulationConfig& cfg) {
    cfg.validate();
    if (initial.size() == 0) throw ConfigError("initial configuration is empty");

    // Tolerant ceiling: t_end/dt that is an integer up to rounding must not
    // gain a spurious extra step.
    const double ratio = cfg.t_end / cfg.dt;
    std::size_t n_steps = static_cast<std::size_t>(
        std::ceil(ratio * (1.0 - 1e-12)));
    if (n_steps == 0) n_steps = 1;

    std::size_t stride = (n_steps + cfg.n_frames - 1) / cfg.n_frames;
    if (stride == 0) stride = 1;

    TrajectoryRecord rec;
    rec.config = cfg;
    rec.n_steps = n_steps;

    auto record = [&](double t, const Configuration& c) {
        rec.times.push_back(t);
        rec.states.push_back(c);
        if (cfg.record_curve_points) {
            std::vector<complex> pts(c.size());
            for (std::size_t i = 0; i < c.size(); ++i) pts[i] = curve.point(c.x[i]);
            rec.curve_points.push_back(std::move(pts));
        }
    };

    Configuration state = initial;
    record(0.0, state);
    for (std::size_t k = 1; k <= n_steps; ++k) {
        state = step(curve, state, cfg, k - 1, &rec.stats);
        if (k % stride == 0 || k == n_steps) {
            record(static_cast<double>(k) * cfg.dt, state);
        }
    }
    return rec;
}

} // namespace curvegas
