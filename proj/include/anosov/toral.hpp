#pragma once

#include <array>
#include <cstdint>

#include "anosov/geometry.hpp"

namespace anosov {

// Hyperbolic automorphism of T^2 given by an integer matrix with |det| = 1
// and |trace| > 2. Carries the eigen data of the fiber dynamics: expanding
// and contracting eigenvalues with unit right eigenvectors, plus the dual
// (left) eigenvectors used for eigen-coordinate decompositions.
struct ToralAutomorphism {
    std::array<std::array<std::int64_t, 2>, 2> m{{{2, 1}, {1, 1}}};
    std::array<std::array<std::int64_t, 2>, 2> m_inv{{{1, -1}, {-1, 2}}};
    std::int64_t det = 1;
    double lambda_u = 0.0;
    double lambda_s = 0.0;
    Vec2 v_u, v_s;  // unit right eigenvectors
    Vec2 w_u, w_s;  // dual basis: <w_i, v_j> = delta_ij

    static ToralAutomorphism from_entries(std::int64_t a, std::int64_t b, std::int64_t c,
                                          std::int64_t d);

    Vec2 apply(const Vec2& v) const {
        return {double(m[0][0]) * v.x + double(m[0][1]) * v.y,
                double(m[1][0]) * v.x + double(m[1][1]) * v.y};
    }
    Vec2 apply_inv(const Vec2& v) const {
        return {double(m_inv[0][0]) * v.x + double(m_inv[0][1]) * v.y,
                double(m_inv[1][0]) * v.x + double(m_inv[1][1]) * v.y};
    }
    Vec2 apply_mod1(const Vec2& v) const { return fiber_mod1(apply(v)); }
    Vec2 apply_inv_mod1(const Vec2& v) const { return fiber_mod1(apply_inv(v)); }

    // Eigen-coordinates of a fiber vector: y = xi_u * v_u + xi_s * v_s.
    double coord_u(const Vec2& y) const { return w_u.dot(y); }
    double coord_s(const Vec2& y) const { return w_s.dot(y); }
};

}  // namespace anosov
