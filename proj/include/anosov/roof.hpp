#pragma once

#include <utility>
#include <vector>

namespace anosov {

// Return time of the discretization, tau(t) = 1 + h(t) with h 1-periodic
// (or a plain constant). Construction validates positivity of tau and
// monotonicity of the center return t + tau(t); for the sinusoidal family
// this is the alpha < 1/(2 pi k) bound.
struct RoofDiscretization {
    enum class Kind { constant, sinusoidal, piecewise_linear };

    Kind kind = Kind::constant;
    double c = 1.0;       // constant value
    double alpha = 0.0;   // sinusoidal amplitude
    int k = 1;            // sinusoidal frequency
    std::vector<std::pair<double, double>> knots;  // (t_i, h_i), t_i in [0,1)

    static RoofDiscretization constant(double value);
    static RoofDiscretization sinusoidal(double alpha, int k);
    static RoofDiscretization piecewise_linear(std::vector<std::pair<double, double>> knots);

    double tau(double t) const;
    // One-sided analytic derivative; for piecewise_linear this is the slope
    // of the segment containing t (undefined exactly at knots).
    double dtau(double t) const;

    bool smooth() const { return kind != Kind::piecewise_linear; }

    // Cached bounds over one period.
    double min_tau = 1.0, max_tau = 1.0;
    double min_return_slope = 1.0, max_return_slope = 1.0;  // inf/sup of 1 + tau'

    // Half-width of regions around piecewise-linear knots that derivative
    // based checks skip.
    static constexpr double knot_margin = 1e-4;
    bool near_knot(double t) const;

private:
    void finalize();
};

struct FixedPointInfo {
    double t = 0.0;
    double multiplier = 0.0;
    bool attracting = false;
};

// Center return map c(t) = (t + tau(t)) mod 1 together with its lift.
struct CircleMap {
    const RoofDiscretization* roof = nullptr;

    double lift(double t) const;      // t + tau(t mod 1), monotone on R
    double operator()(double t) const;
    double deriv(double t) const;     // 1 + tau'(t), central difference for pwl
};

// Fixed points of the center return map found by a 1024-cell sign-change
// scan with bisection refinement. Throws DegenerateFixedPoint on tangency
// (|multiplier - 1| < 1e-8) and for the identity map.
std::vector<FixedPointInfo> fixed_points(const CircleMap& c);

}  // namespace anosov
