#pragma once

#include "curvegas/configuration.hpp"
#include "curvegas/curve.hpp"
#include "curvegas/rng.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace curvegas {

// Random-scan single-site Metropolis targeting the stationary density
// rho(x) ~ prod_{i<j} |gamma(x_i)-gamma(x_j)|^beta on the ordered domain.
// A proposal that breaks the cyclic ordering lands outside the support and
// is rejected outright; a site-0 move that leaves [0, l) is followed by an
// exact rigid +-l shift of the whole configuration.
struct GibbsConfig {
    double beta = 2.0;
    std::uint64_t seed = 0;
    std::size_t n_chains = 4;
    std::size_t burn_sweeps = 600;
    std::size_t tune_sweeps = 400;   // adaptation window inside the burn phase
    std::size_t thin = 5;            // sweeps between retained draws
    double initial_scale = 0.5;
    double target_acceptance = 0.4;

    void validate() const;  // throws ConfigError
};

// One random-scan Metropolis proposal from `state`: returns the next state
// (unchanged on rejection) and whether the move was accepted. Proposals that
// break the strict cyclic order are rejected outright (zero target density).
std::pair<Configuration, bool> mcmc_step(const ArcLengthCurve& curve,
                                         const Configuration& state, double beta,
                                         double proposal_scale, StreamRng& rng);

// One sweep = n proposals at uniformly random sites. `points` caches the
// curve points of `state` and is kept in sync. Returns the number accepted.
std::size_t mcmc_sweep(const ArcLengthCurve& curve, Configuration& state,
                       std::vector<complex>& points, double beta, double scale,
                       StreamRng& rng);

struct StationarySample {
    std::vector<std::vector<Configuration>> chains;  // per chain, thinned draws
    double acceptance_rate = 0.0;  // measured after tuning froze the scale
    double proposal_scale = 0.0;   // frozen scale actually used
    double split_rhat = 0.0;       // max split-Rhat over monitored observables

    std::vector<Configuration> pooled() const;
    std::size_t total_draws() const;
};

// Runs cfg.n_chains independent chains from overdispersed starts (equidistant
// progressively squeezed into an arc), tunes the proposal scale toward
// cfg.target_acceptance during the burn phase, then freezes it and retains
// n_draws_per_chain thinned draws per chain. Deterministic for a fixed seed,
// regardless of thread count.
StationarySample sample_stationary(const ArcLengthCurve& curve, std::size_t n,
                                   std::size_t n_draws_per_chain,
                                   const GibbsConfig& cfg);

// Smooth compactly supported test function of the interior gaps
// g_i = x_{i+1} - x_i:  phi(x) = prod_i psi((g_i - c_i)/w_i) with
// psi(u) = exp(1 - 1/(1-u^2)) on |u|<1, zero outside. The widths must keep
// the support away from every collision face (all interior gaps positive and
// room left for the wrap-around gap), otherwise SupportViolation is thrown.
class GapBumpFunction {
public:
    GapBumpFunction(std::vector<double> centers, std::vector<double> widths,
                    double domain_length);

    std::size_t n_gaps() const noexcept { return centers_.size(); }

    double value(const Configuration& c) const;
    std::vector<double> gradient(const Configuration& c) const;
    double laplacian(const Configuration& c) const;

private:
    std::vector<double> centers_;
    std::vector<double> widths_;
    double domain_length_;
};

struct ResidualEstimate {
    double mean = 0.0;            // estimate of E[L phi] under the sample
    double standard_error = 0.0;  // batch-means standard error
    double zscore = 0.0;          // mean / standard_error
    std::size_t n_samples = 0;
};

// Monte Carlo check that the sampled law annihilates the generator
// L phi = (1/2) laplacian phi + b . grad phi  with b the interacting drift
// at inverse temperature beta. flip_drift negates b, turning the identity
// off; the same estimator should then report a significant nonzero mean
// (used as the detection-power control).
ResidualEstimate stationarity_residual(const ArcLengthCurve& curve, double beta,
                                       const GapBumpFunction& phi,
                                       const std::vector<std::vector<Configuration>>& chains,
                                       bool flip_drift = false);

} // namespace curvegas
