#pragma once

#include "anosov/geometry.hpp"
#include "anosov/toral.hpp"

namespace anosov {

// Derived-from-Anosov perturbation of a hyperbolic toral automorphism.
//
// The fiber map is g = A o Phi where Phi is the time-1 map of the vector
// field V(y) = kappa * beta(|y|/r) * xi_s(y) * v_s supported on the r-ball
// around the origin (beta(s) = (1-s^2)^2 is a C^1 bump). Phi is a
// diffeomorphism by construction, keeps the unstable eigen-coordinate
// fixed, and kappa is calibrated so the stable multiplier of g at the
// origin equals stable_multiplier (> 1: the origin becomes repelling,
// both Jacobian eigenvalues exceed 1 in modulus).
//
// Phi is realized as rk_steps fixed RK4 steps of the 1-D stable-coordinate
// ODE; the inverse solves the monotone forward map by bisection.
struct DAMapSpec {
    double bump_radius = 0.18;
    double stable_multiplier = 1.5;
    int rk_steps = 64;
};

class DAFiberMap {
public:
    DAFiberMap(const ToralAutomorphism& base, const DAMapSpec& spec);

    Vec2 forward(const Vec2& y) const;   // g(y) mod 1
    Vec2 backward(const Vec2& y) const;  // g^{-1}(y) mod 1

    bool in_bump(const Vec2& y) const {
        return fiber_wrap_pm(y).norm() < spec_.bump_radius;
    }

    const DAMapSpec& spec() const { return spec_; }
    double kappa() const { return kappa_; }

    // Measured sup of the Jacobian operator norm over a grid (finite
    // differences, 1.05 safety factor). Cached on first use.
    double lip_forward() const;
    double lip_backward() const;

private:
    ToralAutomorphism base_;  // by value: DAFiberMap is freely copyable
    DAMapSpec spec_;
    double kappa_ = 0.0;
    mutable double lip_fwd_ = 0.0, lip_bwd_ = 0.0;

    double stable_ode_field(double xi_u, double xi_s) const;
    double phi_stable(double xi_u, double xi_s) const;      // RK4 time-1 map in xi_s
    double phi_stable_inv(double xi_u, double xi_s) const;  // monotone solve
    Vec2 phi(const Vec2& y_wrapped) const;
    Vec2 phi_inv(const Vec2& y_wrapped) const;
};

}  // namespace anosov
