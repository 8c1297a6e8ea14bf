#include "anosov/da_map.hpp"

#include <algorithm>
#include <cmath>

#include "anosov/errors.hpp"

namespace anosov {

namespace {

double bump(double s) {
    if (s >= 1.0) return 0.0;
    double u = 1.0 - s * s;
    return u * u;
}

// Derivative of one RK4 step of xi' = kappa*xi at the fixed point 0:
// the degree-4 truncation of exp(z).
double rk4_growth(double z) {
    return 1.0 + z + z * z / 2.0 + z * z * z / 6.0 + z * z * z * z / 24.0;
}

}  // namespace

DAFiberMap::DAFiberMap(const ToralAutomorphism& base, const DAMapSpec& spec)
    : base_(base), spec_(spec) {
    if (!(spec_.bump_radius > 0.0) || spec_.bump_radius >= 0.5)
        throw ModelError("DA bump radius must lie in (0, 0.5)");
    if (!(spec_.stable_multiplier > 1.0))
        throw ModelError("DA stable multiplier must exceed 1 (repelling origin)");
    if (spec_.rk_steps < 8) throw ModelError("DA map needs at least 8 RK4 steps");

    // Calibrate kappa so that lambda_s * rk4_growth(kappa/N)^N equals the
    // requested stable multiplier at the origin exactly.
    double target = spec_.stable_multiplier / base_.lambda_s;
    if (!(target > 0.0))
        throw ModelError("DA construction requires lambda_s > 0 (use a positive-trace matrix)");
    int n = spec_.rk_steps;
    double per_step = std::pow(target, 1.0 / double(n));
    // Solve rk4_growth(z) = per_step by Newton; z0 = log(per_step).
    double z = std::log(per_step);
    for (int it = 0; it < 60; ++it) {
        double f = rk4_growth(z) - per_step;
        double df = 1.0 + z + z * z / 2.0 + z * z * z / 6.0;
        double step = f / df;
        z -= step;
        if (std::fabs(step) < 1e-16) break;
    }
    kappa_ = z * double(n);

    // Measured derivative bounds, eager: the transition builder reads them
    // from worker threads.
    lip_forward();
    lip_backward();
}

double DAFiberMap::stable_ode_field(double xi_u, double xi_s) const {
    Vec2 y = xi_u * base_.v_u + xi_s * base_.v_s;
    return kappa_ * bump(y.norm() / spec_.bump_radius) * xi_s;
}

double DAFiberMap::phi_stable(double xi_u, double xi_s) const {
    int n = spec_.rk_steps;
    double h = 1.0 / double(n);
    double x = xi_s;
    for (int i = 0; i < n; ++i) {
        double k1 = stable_ode_field(xi_u, x);
        double k2 = stable_ode_field(xi_u, x + 0.5 * h * k1);
        double k3 = stable_ode_field(xi_u, x + 0.5 * h * k2);
        double k4 = stable_ode_field(xi_u, x + h * k3);
        x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return x;
}

double DAFiberMap::phi_stable_inv(double xi_u, double xi_s_target) const {
    // phi_stable is strictly increasing in xi_s; bracket and bisect.
    double bound = std::max(std::fabs(xi_s_target), spec_.bump_radius) + 0.01;
    double lo = -bound, hi = bound;
    double flo = phi_stable(xi_u, lo) - xi_s_target;
    double fhi = phi_stable(xi_u, hi) - xi_s_target;
    if (flo > 0.0 || fhi < 0.0)
        throw ModelError("DA inverse solve failed to bracket (non-monotone stable map?)");
    for (int it = 0; it < 100; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = phi_stable(xi_u, mid) - xi_s_target;
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0))
            lo = mid, flo = fm;
        else
            hi = mid;
        if (hi - lo < 1e-15) break;
    }
    return 0.5 * (lo + hi);
}

Vec2 DAFiberMap::phi(const Vec2& yw) const {
    if (yw.norm() >= spec_.bump_radius) return yw;
    double xi_u = base_.coord_u(yw);
    double xi_s = base_.coord_s(yw);
    double xi_s2 = phi_stable(xi_u, xi_s);
    return xi_u * base_.v_u + xi_s2 * base_.v_s;
}

Vec2 DAFiberMap::phi_inv(const Vec2& yw) const {
    // Phi keeps the ball invariant (the field vanishes on its boundary), so
    // points beyond a small margin are their own preimage.
    if (yw.norm() >= spec_.bump_radius + 1e-6) return yw;
    double xi_u = base_.coord_u(yw);
    double xi_s = base_.coord_s(yw);
    double xi_s0 = phi_stable_inv(xi_u, xi_s);
    return xi_u * base_.v_u + xi_s0 * base_.v_s;
}

Vec2 DAFiberMap::forward(const Vec2& y) const {
    Vec2 yw = fiber_wrap_pm(y);
    if (yw.norm() >= spec_.bump_radius) return base_.apply_mod1(y);
    return fiber_mod1(base_.apply(phi(yw)));
}

Vec2 DAFiberMap::backward(const Vec2& y) const {
    Vec2 z = base_.apply_inv(fiber_mod1(y));
    Vec2 zw = fiber_wrap_pm(z);
    if (zw.norm() >= spec_.bump_radius + 1e-6) return fiber_mod1(z);
    return fiber_mod1(phi_inv(zw));
}

namespace {

double max_singular_value(double j11, double j12, double j21, double j22) {
    // Largest singular value of a 2x2 matrix.
    double a = j11 * j11 + j12 * j12 + j21 * j21 + j22 * j22;
    double d = j11 * j22 - j12 * j21;
    double disc = std::sqrt(std::max(0.0, a * a - 4.0 * d * d));
    return std::sqrt(0.5 * (a + disc));
}

template <typename F>
double measure_lipschitz(F&& map, int grid) {
    double h = 1e-6, worst = 0.0;
    for (int i = 0; i < grid; ++i) {
        for (int j = 0; j < grid; ++j) {
            Vec2 p{(i + 0.5) / grid, (j + 0.5) / grid};
            Vec2 px1 = map({p.x + h, p.y}), px0 = map({p.x - h, p.y});
            Vec2 py1 = map({p.x, p.y + h}), py0 = map({p.x, p.y - h});
            double j11 = wrap_pm(px1.x - px0.x) / (2 * h);
            double j21 = wrap_pm(px1.y - px0.y) / (2 * h);
            double j12 = wrap_pm(py1.x - py0.x) / (2 * h);
            double j22 = wrap_pm(py1.y - py0.y) / (2 * h);
            worst = std::max(worst, max_singular_value(j11, j12, j21, j22));
        }
    }
    return worst * 1.05;
}

}  // namespace

double DAFiberMap::lip_forward() const {
    if (lip_fwd_ == 0.0)
        lip_fwd_ = measure_lipschitz([this](const Vec2& y) { return forward(y); }, 128);
    return lip_fwd_;
}

double DAFiberMap::lip_backward() const {
    if (lip_bwd_ == 0.0)
        lip_bwd_ = measure_lipschitz([this](const Vec2& y) { return backward(y); }, 128);
    return lip_bwd_;
}

}  // namespace anosov
