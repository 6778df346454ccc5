#pragma once

#include "curvegas/configuration.hpp"
#include "curvegas/curve.hpp"

#include <cstdint>
#include <vector>

namespace curvegas {

// Two equivalent writings of the same dynamics:
//   beta_form:  dX = dB + b_{beta}(X) dt,  b = (beta/2) sum Re{tau/(chord)}
//   kappa_form: dX = sqrt(kappa) dB - grad V(X) dt,  kappa = 2/beta
// One is a deterministic time change of the other; kappa_form with kappa = 0
// degenerates to the gradient flow and is how zero-temperature paths are made.
enum class DriftForm { beta_form, kappa_form };

// What to do when an Euler proposal breaks the strict cyclic ordering:
//   reject_halve: redo the interval as two half steps with fresh noise,
//                 recursively, up to max_halvings levels; time still advances
//                 by exactly dt per step.
//   tamed:        bound the drift increment by dt|d|/(1 + dt|d|); falls back
//                 to halving if the bounded proposal still violates ordering.
enum class StepPolicy { reject_halve, tamed };

// Temperature parameter stored once; the twin is derived as 2/value on
// access, so kappa() == 2.0 / beta() holds bit-exactly by construction.
class InverseTemperature {
public:
    static InverseTemperature from_beta(double beta);    // beta > 0
    static InverseTemperature from_kappa(double kappa);  // kappa >= 0 (0 = flow)

    double beta() const noexcept { return by_beta_ ? value_ : 2.0 / value_; }
    double kappa() const noexcept { return by_beta_ ? 2.0 / value_ : value_; }
    bool defined_by_beta() const noexcept { return by_beta_; }

private:
    InverseTemperature(double v, bool by_beta) : value_(v), by_beta_(by_beta) {}
    double value_ = 2.0;
    bool by_beta_ = true;
};

struct SimulationConfig {
    DriftForm form = DriftForm::beta_form;
    InverseTemperature temperature = InverseTemperature::from_beta(2.0);
    double dt = 1e-3;
    double t_end = 1.0;
    StepPolicy policy = StepPolicy::reject_halve;
    // A diffusive near-collision at gap g needs sub-steps of about g^2 before
    // the repulsion can resolve it without overshooting the neighbours, so a
    // shallow cap kills long runs: gaps around 1e-7 (reachable over ~1e7
    // steps) already need depth ~40. Depth-first recursion keeps even a
    // hopeless branch at O(cap) evaluations before it throws.
    int max_halvings = 60;
    std::uint64_t seed = 0;
    std::size_t n_frames = 1000;
    bool record_curve_points = false;

    void validate() const;   // throws ConfigError; beta_form requires beta >= 1
};

struct StepStats {
    std::uint64_t proposals = 0;       // Euler proposals drawn (fresh noise each)
    std::uint64_t halving_events = 0;  // proposals rejected for ordering
    int max_depth = 0;                 // deepest halving level used
};

// One time step of length cfg.dt from `state` (must be in the fundamental
// domain); the result is re-quotiented and strictly ordered. Noise is keyed
// by (cfg.seed, step_index, attempt, particle), never by generator state.
Configuration step(const ArcLengthCurve& curve, const Configuration& state,
                   const SimulationConfig& cfg, std::uint64_t step_index,
                   StepStats* stats = nullptr);

struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<Configuration> states;
    std::vector<std::vector<complex>> curve_points;  // filled when requested
    SimulationConfig config;
    std::size_t n_steps = 0;    // total steps taken; final time = n_steps * dt
    StepStats stats;
};

// ceil(t_end/dt) steps of exactly dt, recording every ceil(n_steps/n_frames)
// steps plus the initial and final states. Bit-reproducible for a fixed
// (config, seed, initial state).
TrajectoryRecord simulate(const ArcLengthCurve& curve, const Configuration& initial,
                          const SimulationConfig& cfg);

// Curve points gamma(x_i) of a parameter configuration, in order.
std::vector<complex> transplant(const ArcLengthCurve& curve,
                                const Configuration& state);

} // namespace curvegas
