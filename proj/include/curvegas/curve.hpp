#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace curvegas {

using complex = std::complex<double>;

enum class CurveKind { circle, ellipse, fourier };

// Closed planar curve in its defining parametrization gamma0 : [0, 2pi) -> C.
// All analysis code works with the arc-length reparametrization below; this
// struct only knows how to evaluate gamma0 and its first two derivatives.
struct CurveSpec {
    CurveKind kind = CurveKind::circle;
    double radius = 1.0;                 // circle
    double a = 1.0, b = 1.0;             // ellipse semi-axes
    std::vector<complex> coeffs;         // fourier: c_k, k = k_min .. k_min+len-1
    int k_min = 1;

    complex base_point(double theta) const;
    complex base_derivative(double theta) const;
    complex base_second(double theta) const;

    static CurveSpec circle(double radius);
    static CurveSpec ellipse(double a, double b);
    static CurveSpec fourier(std::vector<complex> coeffs, int k_min);

    std::string describe() const;
};

// Point-and-tangent pair at one arc-length position (one inversion, two uses).
struct CurveFrame {
    complex point;
    complex tangent;   // unit modulus by construction
};

// Result of projecting a plane point onto the curve.
struct Projection {
    double arclength = 0.0;
    double distance = 0.0;
};

// Rectifiable Jordan curve parametrized by arc length: gamma(s), |gamma'| = 1,
// period l = total length. Built once from a CurveSpec (validated: regular,
// injective), then evaluated via a cumulative-length table plus Newton
// refinement, so unit speed holds to machine precision at every query point.
class ArcLengthCurve {
public:
    double length() const noexcept { return length_; }
    int smoothness_order() const noexcept { return smoothness_order_; }
    const CurveSpec& spec() const noexcept { return spec_; }

    // Exact floating remainder of s into [0, l); fmod introduces no rounding.
    double wrap(double s) const noexcept;

    complex point(double s) const;
    complex tangent(double s) const;            // gamma'(s)
    complex second_derivative(double s) const;  // gamma''(s); requires order >= 2
    double curvature(double s) const;           // Im{gamma''(s) conj(gamma'(s))}
    CurveFrame frame(double s) const;

    // Base-parameter angle theta with arclength(theta) = wrap(s).
    double theta_of_arclength(double s) const;

    // Nearest point on the curve (global over the table grid, then refined).
    Projection project(complex z) const;

    friend ArcLengthCurve build_arclength_curve(const CurveSpec&, double, int);

private:
    ArcLengthCurve() = default;

    double theta_lookup(double s_wrapped) const;
    double partial_length(std::size_t interval, double theta) const;

    CurveSpec spec_;
    double length_ = 0.0;
    int smoothness_order_ = 3;
    bool constant_speed_ = false;   // circle-like: theta(s) is affine, no Newton
    double speed0_ = 1.0;           // speed value when constant_speed_
    std::vector<double> theta_;     // table nodes, uniform in theta
    std::vector<double> cum_;       // cumulative arc length at nodes, cum_[0]=0
    std::vector<double> speed_;     // |gamma0'(theta_k)|
};

// Builds the arc-length view. `tol` bounds the relative error of the total
// length quadrature (the node count is doubled until the estimate is stable).
// `smoothness_order` declares how many derivatives callers may query.
ArcLengthCurve build_arclength_curve(const CurveSpec& spec,
                                     double tol = 1e-12,
                                     int smoothness_order = 3);

} // namespace curvegas
