#pragma once

#include "curvegas/configuration.hpp"
#include "curvegas/curve.hpp"
#include "curvegas/sde.hpp"

#include <span>
#include <vector>

namespace curvegas {

// Discrete path of parameter configurations (the fundamental-domain states).
// Rate evaluation requires a uniform time grid with at least two nodes.
struct ParamPath {
    std::vector<double> times;          // strictly increasing, evenly spaced
    std::vector<Configuration> states;  // one per time, common domain length
};

// Discrete path of labelled point clouds in the plane.
struct CurvePath {
    std::vector<double> times;
    std::vector<std::vector<complex>> points;
};

ParamPath to_param_path(const TrajectoryRecord& record);

// Evaluates the curve along a parameter path, producing the corresponding
// planar path (the lift that the projection in rate_J inverts).
CurvePath transplant(const ArcLengthCurve& curve, const ParamPath& path);

// Action of the zero-noise deviation principle on a parameter path:
//   I = (1/2) * sum_k dt_k * | (x_{k+1}-x_k)/dt_k - d(midpoint) |^2
// where d = -grad V is the interaction drift. Consecutive states are
// unwrapped by exact rigid period shifts before differencing, so quotient
// re-anchoring between frames does not register as motion.
double rate_I(const ArcLengthCurve& curve, const ParamPath& path);

// Same action evaluated on a planar path: every point is projected onto the
// curve (OffCurvePath if it sits farther than `projection_tol` away), the
// projected arclengths are reassembled into ordered configurations, and the
// parameter-path action is applied. For paths that actually live on the
// curve this agrees with rate_I of their parameter path to round-off.
double rate_J(const ArcLengthCurve& curve, const CurvePath& path,
              double projection_tol = 1e-8);

// Real bivariate polynomial f(z) = sum_t c_t * Re(z)^p_t * Im(z)^q_t.
struct PolynomialTerm {
    int px = 0;
    int py = 0;
    double coefficient = 0.0;
};

class Polynomial2 {
public:
    Polynomial2() = default;
    explicit Polynomial2(std::vector<PolynomialTerm> terms);

    double eval(complex z) const;
    Polynomial2 dx() const;
    Polynomial2 dy() const;
    const std::vector<PolynomialTerm>& terms() const noexcept { return terms_; }

private:
    std::vector<PolynomialTerm> terms_;
};

// A weighted point measure supported on the curve; atoms carry the local
// frame so observables can take tangential derivatives.
struct MeasureAtom {
    complex z;
    complex tau;       // unit tangent
    double curvature = 0.0;
    double weight = 0.0;
};
using WeightedMeasure = std::vector<MeasureAtom>;

WeightedMeasure measure_on_curve(const ArcLengthCurve& curve,
                                 std::span<const double> arclengths,
                                 std::span<const double> weights);

// Uniform atoms at the particle positions, each of weight 1/n.
WeightedMeasure empirical_measure(const ArcLengthCurve& curve,
                                  const Configuration& c);

// Test function with cached partial derivatives, evaluated through the frame
// of a measure atom (first and second derivatives along arclength).
class CurveObservable {
public:
    explicit CurveObservable(Polynomial2 f);

    double value(complex z) const { return f_.eval(z); }
    complex dz(complex z) const;   // Wirtinger derivative (f_x - i f_y) / 2
    double ds(const MeasureAtom& a) const;
    double dss(const MeasureAtom& a) const;
    double laplacian(complex z) const;

    // Mean of the observable against a weighted measure.
    double integrate(const WeightedMeasure& mu) const;

private:
    Polynomial2 f_, fx_, fy_, fxx_, fxy_, fyy_;
};

// Arc-length directional derivative 2 Re{tau(z) dz f(z)} at a point that must
// lie on the curve: OffCurvePoint if z is farther than `tol` from it.
double tangential_derivative(const ArcLengthCurve& curve, const CurveObservable& f,
                             complex z, double tol = 1e-8);

// Quadratic form driving the evolution of mu(f) in the many-particle limit:
//   (beta/4) * sum_{a,b} w_a w_b K(z_a, z_b),
//   K(z, w) = f_s(z) Re{tau(z)/(z-w)} - f_s(w) Re{tau(w)/(z-w)},   z != w,
//   K(z, z) = f_ss(z).
// The kernel is symmetric and continuous across the diagonal; with the
// diagonal included, at beta = 2 the sum over an empirical measure equals
// the exact generator action on mu(f) for the speeded-up particle system.
double hydro_residual(const WeightedMeasure& mu, const CurveObservable& f,
                      double beta);

} // namespace curvegas
