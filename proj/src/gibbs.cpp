#include "curvegas/gibbs.hpp"

#include "curvegas/coulomb.hpp"
#include "curvegas/errors.hpp"
#include "curvegas/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

namespace curvegas {

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct BumpValue {
    double v = 0.0;   // psi(u)
    double d1 = 0.0;  // psi'(u)
    double d2 = 0.0;  // psi''(u)
};

// psi(u) = exp(1 - 1/(1-u^2)) inside |u| < 1, identically zero outside.
// Near the edge the exponential underflows long before the rational factors
// overflow, so products below stay finite; q <= 0 is cut off explicitly.
BumpValue bump_psi(double u) {
    BumpValue r;
    const double q = 1.0 - u * u;
    if (!(q > 0.0)) return r;
    const double v = std::exp(1.0 - 1.0 / q);
    r.v = v;
    r.d1 = v * (-2.0 * u / (q * q));
    r.d2 = v * (4.0 * u * u / (q * q * q * q) - 2.0 * (1.0 + 3.0 * u * u) / (q * q * q));
    return r;
}

// Split-Rhat over sequences of scalar draws: each chain is halved, then the
// usual between/within variance ratio is formed.
double split_rhat_scalar(const std::vector<std::vector<double>>& chains) {
    std::vector<std::vector<double>> seqs;
    for (const auto& c : chains) {
        const std::size_t h = c.size() / 2;
        if (h < 2) return 1.0;  // too short to diagnose
        seqs.emplace_back(c.begin(), c.begin() + h);
        seqs.emplace_back(c.begin() + h, c.begin() + 2 * h);
    }
    const std::size_t m = seqs.size();
    const std::size_t n = seqs.front().size();
    std::vector<double> means(m);
    std::vector<double> vars(m);
    for (std::size_t j = 0; j < m; ++j) {
        double s = 0.0;
        for (double v : seqs[j]) s += v;
        means[j] = s / static_cast<double>(n);
        double q = 0.0;
        for (double v : seqs[j]) q += (v - means[j]) * (v - means[j]);
        vars[j] = q / static_cast<double>(n - 1);
    }
    double grand = 0.0;
    for (double v : means) grand += v;
    grand /= static_cast<double>(m);
    double b = 0.0;
    for (double v : means) b += (v - grand) * (v - grand);
    b *= static_cast<double>(n) / static_cast<double>(m - 1);
    double w = 0.0;
    for (double v : vars) w += v;
    w /= static_cast<double>(m);
    if (!(w > 0.0)) return 1.0;
    const double var_plus =
        (static_cast<double>(n - 1) / static_cast<double>(n)) * w + b / static_cast<double>(n);
    return std::sqrt(var_plus / w);
}

struct ChainResult {
    std::vector<Configuration> draws;
    double acceptance = 0.0;
    double scale = 0.0;
};

ChainResult run_chain(const ArcLengthCurve& curve, std::size_t n,
                      std::size_t n_draws, const GibbsConfig& cfg,
                      std::uint64_t chain_id) {
    StreamRng rng(cfg.seed, chain_id);

    // Overdispersed deterministic starts: equidistant points squeezed into a
    // progressively smaller arc as the chain index grows.
    const double l = curve.length();
    const double squeeze = 1.0 / (1.0 + 0.6 * static_cast<double>(chain_id));
    std::vector<double> x0(n);
    for (std::size_t i = 0; i < n; ++i) {
        x0[i] = squeeze * l * static_cast<double>(i) / static_cast<double>(n);
    }
    Configuration state = make_configuration(std::move(x0), l);
    std::vector<complex> points(n);
    for (std::size_t i = 0; i < n; ++i) points[i] = curve.point(state.x[i]);

    double scale = cfg.initial_scale;
    const double scale_lo = 1e-4 * l;
    const double scale_hi = 0.5 * l;
    std::size_t window_accepts = 0;
    constexpr std::size_t kWindow = 50;

    for (std::size_t sweep = 0; sweep < cfg.burn_sweeps; ++sweep) {
        window_accepts += mcmc_sweep(curve, state, points, cfg.beta, scale, rng);
        if (sweep < cfg.tune_sweeps && (sweep + 1) % kWindow == 0) {
            const double rate = static_cast<double>(window_accepts) /
                                static_cast<double>(kWindow * n);
            scale *= std::exp(0.5 * (rate - cfg.target_acceptance));
            scale = std::clamp(scale, scale_lo, scale_hi);
            window_accepts = 0;
        }
    }

    ChainResult res;
    res.scale = scale;
    res.draws.reserve(n_draws);
    std::size_t accepts = 0;
    for (std::size_t d = 0; d < n_draws; ++d) {
        for (std::size_t s = 0; s < cfg.thin; ++s) {
            accepts += mcmc_sweep(curve, state, points, cfg.beta, scale, rng);
        }
        res.draws.push_back(state);
    }
    const std::size_t proposals = n_draws * cfg.thin * n;
    res.acceptance = proposals ? static_cast<double>(accepts) /
                                     static_cast<double>(proposals)
                               : 0.0;
    return res;
}

} // namespace

void GibbsConfig::validate() const {
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw ConfigError("beta must be positive and finite");
    }
    if (n_chains < 1) throw ConfigError("n_chains must be >= 1");
    if (thin < 1) throw ConfigError("thin must be >= 1");
    if (!(initial_scale > 0.0)) throw ConfigError("initial_scale must be positive");
    if (!(target_acceptance > 0.0 && target_acceptance < 1.0)) {
        throw ConfigError("target_acceptance must lie in (0, 1)");
    }
    if (tune_sweeps > burn_sweeps) {
        throw ConfigError("tune_sweeps cannot exceed burn_sweeps");
    }
}

namespace {

// One random-scan proposal: pick a site, jitter it, accept by the Metropolis
// rule on the log interaction change. Moves that leave the cyclic-order
// support have density zero and count as rejections. When the first particle
// leaves [0, l), the whole state is re-anchored by an exact one-period shift.
bool propose_move(const ArcLengthCurve& curve, Configuration& state,
                  std::vector<complex>& points, double beta, double scale,
                  StreamRng& rng) {
    const std::size_t n = state.size();
    const double l = state.domain_length;

    const std::size_t k = rng.uniform_index(n);
    const double xp = state.x[k] + scale * rng.normal();

    if (n > 1) {
        const double left = (k > 0) ? state.x[k - 1] : state.x[n - 1] - l;
        const double right = (k + 1 < n) ? state.x[k + 1] : state.x[0] + l;
        if (!(xp > left && xp < right)) return false;  // outside the support
    }

    const complex zp = curve.point(xp);
    double delta = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (j == k) continue;
        delta += std::log(std::abs(zp - points[j])) -
                 std::log(std::abs(points[k] - points[j]));
    }
    delta *= beta;

    if (!(std::log(rng.uniform01()) < delta)) return false;

    state.x[k] = xp;
    points[k] = zp;

    if (k == 0 && !(xp >= 0.0 && xp < l)) {
        const double shift = (xp < 0.0) ? l : -l;  // exact one-period move
        for (double& v : state.x) v += shift;
        for (std::size_t j = 0; j < n; ++j) points[j] = curve.point(state.x[j]);
    }
    return true;
}

} // namespace

std::pair<Configuration, bool> mcmc_step(const ArcLengthCurve& curve,
                                         const Configuration& state, double beta,
                                         double proposal_scale, StreamRng& rng) {
    Configuration next = state;
    std::vector<complex> points(next.size());
    for (std::size_t i = 0; i < next.size(); ++i) points[i] = curve.point(next.x[i]);
    const bool accepted =
        propose_move(curve, next, points, beta, proposal_scale, rng);
    return {std::move(next), accepted};
}

std::size_t mcmc_sweep(const ArcLengthCurve& curve, Configuration& state,
                       std::vector<complex>& points, double beta, double scale,
                       StreamRng& rng) {
    const std::size_t n = state.size();
    std::size_t accepted = 0;
    for (std::size_t move = 0; move < n; ++move) {
        if (propose_move(curve, state, points, beta, scale, rng)) ++accepted;
    }
    return accepted;
}

std::vector<Configuration> StationarySample::pooled() const {
    std::vector<Configuration> all;
    for (const auto& c : chains) all.insert(all.end(), c.begin(), c.end());
    return all;
}

std::size_t StationarySample::total_draws() const {
    std::size_t t = 0;
    for (const auto& c : chains) t += c.size();
    return t;
}

StationarySample sample_stationary(const ArcLengthCurve& curve, std::size_t n,
                                   std::size_t n_draws_per_chain,
                                   const GibbsConfig& cfg) {
    cfg.validate();
    if (n < 1) throw ConfigError("need at least one particle");

    std::vector<ChainResult> results(cfg.n_chains);
#pragma omp parallel for schedule(dynamic, 1)
    for (long long c = 0; c < static_cast<long long>(cfg.n_chains); ++c) {
        results[static_cast<std::size_t>(c)] = run_chain(
            curve, n, n_draws_per_chain, cfg, static_cast<std::uint64_t>(c));
    }

    StationarySample out;
    double acc = 0.0;
    double sc = 0.0;
    for (auto& r : results) {
        acc += r.acceptance;
        sc += r.scale;
        out.chains.push_back(std::move(r.draws));
    }
    out.acceptance_rate = acc / static_cast<double>(cfg.n_chains);
    out.proposal_scale = sc / static_cast<double>(cfg.n_chains);

    // Split-Rhat on two scalar summaries: total interaction energy and the
    // smallest cyclic gap.
    std::vector<std::vector<double>> en(out.chains.size());
    std::vector<std::vector<double>> mg(out.chains.size());
    for (std::size_t c = 0; c < out.chains.size(); ++c) {
        en[c].reserve(out.chains[c].size());
        mg[c].reserve(out.chains[c].size());
        for (const auto& conf : out.chains[c]) {
            en[c].push_back(energy(curve, conf));
            const auto gaps = cyclic_gaps(conf);
            mg[c].push_back(*std::min_element(gaps.begin(), gaps.end()));
        }
    }
    out.split_rhat = std::max(split_rhat_scalar(en), split_rhat_scalar(mg));
    return out;
}

GapBumpFunction::GapBumpFunction(std::vector<double> centers,
                                 std::vector<double> widths, double domain_length)
    : centers_(std::move(centers)), widths_(std::move(widths)),
      domain_length_(domain_length) {
    if (centers_.empty() || centers_.size() != widths_.size()) {
        throw ConfigError("bump centers and widths must be non-empty and match");
    }
    if (!(domain_length_ > 0.0)) throw ConfigError("domain length must be positive");
    double reach = 0.0;
    for (std::size_t i = 0; i < centers_.size(); ++i) {
        if (!(widths_[i] > 0.0)) throw ConfigError("bump widths must be positive");
        if (!(centers_[i] - widths_[i] > 0.0)) {
            throw SupportViolation(
                "bump support touches the collision face of gap " +
                std::to_string(i) + ": center " + fmt_double(centers_[i]) +
                " minus width " + fmt_double(widths_[i]) + " is not positive");
        }
        reach += centers_[i] + widths_[i];
    }
    if (!(reach < domain_length_)) {
        throw SupportViolation(
            "bump support reaches the wrap-around collision face: sum of "
            "(center + width) = " + fmt_double(reach) +
            " must stay below the domain length " + fmt_double(domain_length_));
    }
}

double GapBumpFunction::value(const Configuration& c) const {
    const std::size_t k = n_gaps();
    if (c.size() != k + 1) {
        throw DomainViolation("bump expects " + std::to_string(k + 1) +
                              " particles, got " + std::to_string(c.size()));
    }
    double prod = 1.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double u = (c.x[i + 1] - c.x[i] - centers_[i]) / widths_[i];
        prod *= bump_psi(u).v;
        if (prod == 0.0) return 0.0;
    }
    return prod;
}

std::vector<double> GapBumpFunction::gradient(const Configuration& c) const {
    const std::size_t k = n_gaps();
    if (c.size() != k + 1) {
        throw DomainViolation("bump expects " + std::to_string(k + 1) +
                              " particles, got " + std::to_string(c.size()));
    }
    std::vector<BumpValue> p(k);
    for (std::size_t i = 0; i < k; ++i) {
        p[i] = bump_psi((c.x[i + 1] - c.x[i] - centers_[i]) / widths_[i]);
    }
    // Leave-one-out products via prefix/suffix scans (division-free, so exact
    // zeros propagate correctly).
    std::vector<double> pre(k + 1, 1.0);
    std::vector<double> suf(k + 1, 1.0);
    for (std::size_t i = 0; i < k; ++i) pre[i + 1] = pre[i] * p[i].v;
    for (std::size_t i = k; i-- > 0;) suf[i] = suf[i + 1] * p[i].v;

    std::vector<double> dgap(k);
    for (std::size_t i = 0; i < k; ++i) {
        dgap[i] = pre[i] * suf[i + 1] * p[i].d1 / widths_[i];
    }
    std::vector<double> grad(k + 1, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        grad[i] -= dgap[i];      // d g_i / d x_i = -1
        grad[i + 1] += dgap[i];  // d g_i / d x_{i+1} = +1
    }
    return grad;
}

double GapBumpFunction::laplacian(const Configuration& c) const {
    const std::size_t k = n_gaps();
    if (c.size() != k + 1) {
        throw DomainViolation("bump expects " + std::to_string(k + 1) +
                              " particles, got " + std::to_string(c.size()));
    }
    std::vector<BumpValue> p(k);
    for (std::size_t i = 0; i < k; ++i) {
        p[i] = bump_psi((c.x[i + 1] - c.x[i] - centers_[i]) / widths_[i]);
    }
    std::vector<double> pre(k + 1, 1.0);
    std::vector<double> suf(k + 1, 1.0);
    for (std::size_t i = 0; i < k; ++i) pre[i + 1] = pre[i] * p[i].v;
    for (std::size_t i = k; i-- > 0;) suf[i] = suf[i + 1] * p[i].v;

    // In gap coordinates the flat Laplacian becomes sum_ij G_ij d2/dg_i dg_j
    // with G tridiagonal: G_ii = 2 (each gap touches two particles) and
    // G_{i,i+1} = -1 (adjacent gaps share one particle with opposite signs).
    double lap = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        lap += 2.0 * pre[i] * suf[i + 1] * p[i].d2 / (widths_[i] * widths_[i]);
    }
    for (std::size_t i = 0; i + 1 < k; ++i) {
        const double cross = pre[i] * (suf[i + 2] * p[i + 1].d1) * p[i].d1 /
                             (widths_[i] * widths_[i + 1]);
        lap -= 2.0 * cross;
    }
    return lap;
}

ResidualEstimate stationarity_residual(const ArcLengthCurve& curve, double beta,
                                       const GapBumpFunction& phi,
                                       const std::vector<std::vector<Configuration>>& chains,
                                       bool flip_drift) {
    const double sign = flip_drift ? -1.0 : 1.0;
    std::vector<double> batch_means;
    double total = 0.0;
    std::size_t total_n = 0;

    for (const auto& chain : chains) {
        const std::size_t len = chain.size();
        if (len == 0) continue;
        std::vector<double> terms(len);
        for (std::size_t d = 0; d < len; ++d) {
            const Configuration& conf = chain[d];
            const double lap = phi.laplacian(conf);
            const std::vector<double> grad = phi.gradient(conf);
            bool zero = lap == 0.0;
            for (double g : grad) zero = zero && g == 0.0;
            if (zero) {
                terms[d] = 0.0;
                continue;
            }
            const std::vector<double> b = drift(curve, conf, beta);
            double dot = 0.0;
            for (std::size_t i = 0; i < b.size(); ++i) dot += b[i] * grad[i];
            terms[d] = 0.5 * lap + sign * dot;
        }
        // Batch means over the (autocorrelated) chain stream.
        const std::size_t batch_len = std::max<std::size_t>(1, len / 16);
        const std::size_t n_batches = len / batch_len;
        for (std::size_t bidx = 0; bidx < n_batches; ++bidx) {
            double s = 0.0;
            for (std::size_t j = 0; j < batch_len; ++j) {
                s += terms[bidx * batch_len + j];
            }
            batch_means.push_back(s / static_cast<double>(batch_len));
            total += s;
            total_n += batch_len;
        }
    }

    ResidualEstimate est;
    est.n_samples = total_n;
    if (total_n == 0) return est;
    est.mean = total / static_cast<double>(total_n);
    if (batch_means.size() >= 2) {
        double m = 0.0;
        for (double v : batch_means) m += v;
        m /= static_cast<double>(batch_means.size());
        double q = 0.0;
        for (double v : batch_means) q += (v - m) * (v - m);
        q /= static_cast<double>(batch_means.size() - 1);
        est.standard_error =
            std::sqrt(q / static_cast<double>(batch_means.size()));
    }
    if (est.standard_error > 0.0) {
        est.zscore = est.mean / est.standard_error;
    } else {
        est.zscore = (est.mean == 0.0) ? 0.0 : std::numeric_limits<double>::infinity();
    }
    return est;
}

} // namespace curvegas
