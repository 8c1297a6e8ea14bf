#include "anosov/toral.hpp"

#include <cmath>
#include <cstdlib>

#include "anosov/errors.hpp"

namespace anosov {

namespace {

Vec2 right_eigenvector(const std::array<std::array<std::int64_t, 2>, 2>& m, double lambda) {
    double a = double(m[0][0]), b = double(m[0][1]);
    double c = double(m[1][0]), d = double(m[1][1]);
    // (A - lambda) v = 0; take the row with the larger off-diagonal entry.
    Vec2 v;
    if (std::fabs(b) >= std::fabs(c))
        v = {b, lambda - a};
    else
        v = {lambda - d, c};
    double n = v.norm();
    if (n == 0.0) v = {1.0, 0.0}, n = 1.0;
    v = v * (1.0 / n);
    // Deterministic sign: first component of largest magnitude is positive.
    double lead = (std::fabs(v.x) >= std::fabs(v.y)) ? v.x : v.y;
    if (lead < 0.0) v = v * -1.0;
    return v;
}

}  // namespace

ToralAutomorphism ToralAutomorphism::from_entries(std::int64_t a, std::int64_t b, std::int64_t c,
                                                  std::int64_t d) {
    ToralAutomorphism A;
    A.m = {{{a, b}, {c, d}}};
    A.det = a * d - b * c;
    if (std::llabs(A.det) != 1)
        throw ModelError("toral automorphism requires |det A| = 1, got det = " +
                         std::to_string(A.det));
    std::int64_t tr = a + d;
    if (std::llabs(tr) <= 2)
        throw ModelError("toral automorphism requires |trace A| > 2 (hyperbolicity), got trace = " +
                         std::to_string(tr));
    // Integer inverse: adj(A) / det with det = +-1.
    A.m_inv = {{{A.det * d, -A.det * b}, {-A.det * c, A.det * a}}};

    double trd = double(tr), disc = std::sqrt(trd * trd - 4.0 * double(A.det));
    double l1 = 0.5 * (trd + disc), l2 = 0.5 * (trd - disc);
    if (std::fabs(l1) < std::fabs(l2)) std::swap(l1, l2);
    A.lambda_u = l1;
    A.lambda_s = l2;

    A.v_u = right_eigenvector(A.m, A.lambda_u);
    A.v_s = right_eigenvector(A.m, A.lambda_s);

    // Left eigenvectors are right eigenvectors of the transpose; the left
    // vector for lambda_u is orthogonal to v_s and vice versa.
    std::array<std::array<std::int64_t, 2>, 2> mt = {{{a, c}, {b, d}}};
    Vec2 lu = right_eigenvector(mt, A.lambda_u);
    Vec2 ls = right_eigenvector(mt, A.lambda_s);
    A.w_u = lu * (1.0 / lu.dot(A.v_u));
    A.w_s = ls * (1.0 / ls.dot(A.v_s));

    // Construction-time eigen identities.
    Vec2 ru = A.apply(A.v_u) - A.lambda_u * A.v_u;
    Vec2 rs = A.apply(A.v_s) - A.lambda_s * A.v_s;
    if (ru.norm() > 1e-12 || rs.norm() > 1e-12)
        throw ModelError("eigenvector residual exceeds 1e-12");
    if (std::fabs(A.lambda_u * A.lambda_s - double(A.det)) > 1e-12)
        throw ModelError("eigenvalue product does not match det A");
    return A;
}

}  // namespace anosov
