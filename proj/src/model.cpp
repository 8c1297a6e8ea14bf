#include "anosov/model.hpp"

#include <algorithm>
#include <cmath>

#include "anosov/errors.hpp"

namespace anosov {

std::string family_name(Family f) {
    switch (f) {
        case Family::cat_suspension: return "cat_suspension";
        case Family::da_suspension: return "da_suspension";
        case Family::product_skew: return "product_skew";
    }
    return "?";
}

Family family_from_string(const std::string& s) {
    if (s == "cat_suspension") return Family::cat_suspension;
    if (s == "da_suspension") return Family::da_suspension;
    if (s == "product_skew") return Family::product_skew;
    throw ConfigError("unknown family '" + s + "'");
}

MappingTorusPoint suspension_flow(const ToralAutomorphism& A, const MappingTorusPoint& p,
                                  double s) {
    double u = p.t + s;
    double nf = std::floor(u);
    int n = int(nf);
    Vec2 y = p.fiber();
    for (int i = 0; i < n; ++i) y = A.apply_mod1(y);
    for (int i = 0; i > n; --i) y = A.apply_inv_mod1(y);
    return {y.x, y.y, mod1(u - nf)};
}

DiscretizedMap DiscretizedMap::make_cat_suspension(ToralAutomorphism A, RoofDiscretization roof) {
    DiscretizedMap f;
    f.family_ = Family::cat_suspension;
    f.base_ = A;
    f.roof_ = roof;
    return f;
}

DiscretizedMap DiscretizedMap::make_da_suspension(ToralAutomorphism A, RoofDiscretization roof,
                                                  DAMapSpec spec) {
    DiscretizedMap f;
    f.family_ = Family::da_suspension;
    f.base_ = A;
    f.roof_ = roof;
    f.da_.emplace(A, spec);
    return f;
}

DiscretizedMap DiscretizedMap::make_product_skew(ToralAutomorphism A, RoofDiscretization roof) {
    DiscretizedMap f;
    f.family_ = Family::product_skew;
    f.base_ = A;
    f.roof_ = roof;
    return f;
}

Vec2 DiscretizedMap::glue_up(const Vec2& y) const {
    switch (family_) {
        case Family::cat_suspension: return base_.apply_mod1(y);
        case Family::da_suspension: return da_->forward(y);
        case Family::product_skew: return y;
    }
    return y;
}

Vec2 DiscretizedMap::glue_down(const Vec2& y) const {
    switch (family_) {
        case Family::cat_suspension: return base_.apply_inv_mod1(y);
        case Family::da_suspension: return da_->backward(y);
        case Family::product_skew: return y;
    }
    return y;
}

MappingTorusPoint DiscretizedMap::center_flow(const MappingTorusPoint& p, double s) const {
    if (family_ == Family::product_skew) return {p.y1, p.y2, mod1(p.t + s)};
    double u = p.t + s;
    double nf = std::floor(u);
    int n = int(nf);
    Vec2 y = p.fiber();
    for (int i = 0; i < n; ++i) y = glue_up(y);
    for (int i = 0; i > n; --i) y = glue_down(y);
    return {y.x, y.y, mod1(u - nf)};
}

int DiscretizedMap::wraps_of_apply(double t) const {
    return int(std::floor(t + roof_.tau(t)));
}

MappingTorusPoint DiscretizedMap::apply_suspension(const MappingTorusPoint& p) const {
    return center_flow(p, roof_.tau(p.t));
}

MappingTorusPoint DiscretizedMap::apply(const MappingTorusPoint& p) const {
    if (family_ == Family::product_skew) {
        Vec2 y = base_.apply_mod1(p.fiber());
        return {y.x, y.y, mod1(p.t + roof_.tau(p.t))};
    }
    return apply_suspension(p);
}

double DiscretizedMap::solve_center_return(double target) const {
    // g(x) = x + tau(x) is strictly increasing with g(0) <= target <= g(1).
    double lo = 0.0, hi = 1.0;
    auto g = [&](double x) { return x + roof_.tau(x); };
    int bisect_iters = roof_.smooth() ? 30 : 100;
    for (int i = 0; i < bisect_iters; ++i) {
        double mid = 0.5 * (lo + hi);
        if (g(mid) < target)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-16) break;
    }
    double x = 0.5 * (lo + hi);
    if (roof_.smooth()) {
        for (int i = 0; i < 8; ++i) {
            double fx = g(x) - target;
            double dx = 1.0 + roof_.dtau(x);
            double nx = x - fx / dx;
            if (nx < lo || nx > hi) break;
            x = nx;
            if (std::fabs(fx) < 1e-15) break;
        }
    }
    return std::clamp(x, 0.0, 1.0);
}

MappingTorusPoint DiscretizedMap::apply_inverse(const MappingTorusPoint& p) const {
    // Center coordinate: solve t' + tau(t') = t + m for the unique branch
    // with t' in [0,1); m is the wrap count of the forward application.
    double g0 = roof_.tau(0.0);
    double m = std::ceil(g0 - p.t);
    double tprev = solve_center_return(p.t + m);
    if (tprev >= 1.0) tprev = 0.0;
    int w = int(m);
    Vec2 y = p.fiber();
    if (family_ == Family::product_skew) {
        y = base_.apply_inv_mod1(y);
    } else {
        for (int i = 0; i < w; ++i) y = glue_down(y);
        for (int i = 0; i > w; --i) y = glue_up(y);
    }
    return {y.x, y.y, mod1(tprev)};
}

double DiscretizedMap::quotient_dist(const MappingTorusPoint& p, const MappingTorusPoint& q) const {
    auto comp = [](double df1, double df2, double dt) {
        return std::sqrt(df1 * df1 + df2 * df2 + dt * dt);
    };
    double d1 = wrap_pm(p.y1 - q.y1), d2 = wrap_pm(p.y2 - q.y2);
    double direct = comp(d1, d2, p.t - q.t);
    Vec2 pu = glue_up(p.fiber());
    double u1 = wrap_pm(pu.x - q.y1), u2 = wrap_pm(pu.y - q.y2);
    double up = comp(u1, u2, (1.0 - p.t) + q.t);
    Vec2 qu = glue_up(q.fiber());
    double v1 = wrap_pm(qu.x - p.y1), v2 = wrap_pm(qu.y - p.y2);
    double down = comp(v1, v2, (1.0 - q.t) + p.t);
    return std::min({direct, up, down});
}

Splitting DiscretizedMap::splitting_at(const MappingTorusPoint& p) const {
    if (family_ == Family::da_suspension && da_->in_bump(p.fiber()))
        throw ClosedFormUnavailable(
            "no closed-form splitting inside the DA bump region at " + format_point(p) +
            "; use the cone check");
    Splitting s;
    s.v_u = {base_.v_u.x, base_.v_u.y, 0.0};
    s.v_s = {base_.v_s.x, base_.v_s.y, 0.0};
    s.v_c = {0.0, 0.0, 1.0};
    return s;
}

bool DiscretizedMap::jacobian_stencil_ok(const MappingTorusPoint& p, double h,
                                         bool inverse) const {
    double margin = std::max(1e-4, 8.0 * h * std::max(lip_t_forward(), lip_t_backward()));
    if (roof_.near_knot(p.t)) return false;
    // Wrap counts must be constant across the stencil: both the input t and
    // the image t have to stay clear of the gluing.
    if (std::min(p.t, 1.0 - p.t) < margin) return false;
    MappingTorusPoint q = inverse ? apply_inverse(p) : apply(p);
    if (std::min(q.t, 1.0 - q.t) < margin) return false;
    if (!inverse && roof_.near_knot(p.t)) return false;
    return true;
}

namespace {

std::optional<Mat3> fd_jacobian(const DiscretizedMap& f, const MappingTorusPoint& p, double h,
                                bool inverse) {
    auto op = [&](const MappingTorusPoint& x) {
        return inverse ? f.apply_inverse(x) : f.apply(x);
    };
    Mat3 J;
    const double shifts[3][3] = {{h, 0, 0}, {0, h, 0}, {0, 0, h}};
    for (int a = 0; a < 3; ++a) {
        MappingTorusPoint pp{mod1(p.y1 + shifts[a][0]), mod1(p.y2 + shifts[a][1]),
                             mod1(p.t + shifts[a][2])};
        MappingTorusPoint pm{mod1(p.y1 - shifts[a][0]), mod1(p.y2 - shifts[a][1]),
                             mod1(p.t - shifts[a][2])};
        MappingTorusPoint qp = op(pp), qm = op(pm);
        J.m[0][a] = wrap_pm(qp.y1 - qm.y1) / (2 * h);
        J.m[1][a] = wrap_pm(qp.y2 - qm.y2) / (2 * h);
        J.m[2][a] = wrap_pm(qp.t - qm.t) / (2 * h);
    }
    return J;
}

}  // namespace

std::optional<Mat3> DiscretizedMap::jacobian_apply(const MappingTorusPoint& p, double h) const {
    if (!jacobian_stencil_ok(p, h, false)) return std::nullopt;
    return fd_jacobian(*this, p, h, false);
}

std::optional<Mat3> DiscretizedMap::jacobian_apply_inverse(const MappingTorusPoint& p,
                                                           double h) const {
    if (!jacobian_stencil_ok(p, h, true)) return std::nullopt;
    return fd_jacobian(*this, p, h, true);
}

namespace {

double halton(int index, int base) {
    double f = 1.0, r = 0.0;
    for (int i = index; i > 0; i /= base) {
        f /= base;
        r += f * (i % base);
    }
    return r;
}

double angle_between(const Vec3& a, const Vec3& b) {
    double c = a.dot(b) / (a.norm() * b.norm());
    return std::acos(std::clamp(c, -1.0, 1.0));
}

}  // namespace

ConeReport DiscretizedMap::verify_partial_hyperbolicity(double cone_angle, int n_samples,
                                                        int n_iters,
                                                        double growth_margin) const {
    ConeReport rep;
    rep.min_unstable_cone_margin = 1e300;
    rep.min_stable_cone_margin = 1e300;
    rep.min_unstable_growth = 1e300;
    rep.unstable_growth_per_crossing = 1e300;
    rep.max_stable_growth = 0.0;
    rep.center_rate_min = 1e300;
    rep.center_rate_max = 0.0;

    Vec3 u3{base_.v_u.x, base_.v_u.y, 0.0};
    Vec3 s3{base_.v_s.x, base_.v_s.y, 0.0};
    Vec3 c3{0.0, 0.0, 1.0};

    // Orthonormal complements for the cone boundary rings.
    auto ring = [&](const Vec3& axis) {
        Vec3 e1 = (std::fabs(axis.z) < 0.9) ? Vec3{-axis.y, axis.x, 0.0} : Vec3{1.0, 0.0, 0.0};
        double n1 = e1.norm();
        e1 = e1 * (1.0 / n1);
        Vec3 e2{axis.y * e1.z - axis.z * e1.y, axis.z * e1.x - axis.x * e1.z,
                axis.x * e1.y - axis.y * e1.x};
        return std::array<Vec3, 2>{e1, e2};
    };
    auto axes_u = ring(u3);
    auto axes_s = ring(s3);
    const int ring_n = 16;

    for (int si = 0; si < n_samples; ++si) {
        MappingTorusPoint p{halton(si + 1, 2), halton(si + 1, 3), halton(si + 1, 5)};
        auto Jopt = jacobian_apply(p);
        auto Jinv_opt = jacobian_apply_inverse(p);
        if (!Jopt || !Jinv_opt) {
            rep.samples_skipped++;
            continue;
        }
        const Mat3& J = *Jopt;
        const Mat3& Jinv = *Jinv_opt;
        rep.samples_used++;

        for (int r = 0; r < ring_n; ++r) {
            double th = 2.0 * M_PI * r / ring_n;
            Vec3 du = axes_u[0] * std::cos(th) + axes_u[1] * std::sin(th);
            Vec3 vu = u3 * std::cos(cone_angle) + du * std::sin(cone_angle);
            double au = angle_between(J.apply(vu), u3);
            rep.min_unstable_cone_margin =
                std::min(rep.min_unstable_cone_margin, cone_angle - au);
            if (au >= cone_angle)
                throw ConeViolation("unstable cone not mapped into itself at " + format_point(p),
                                    p.y1, p.y2, p.t);
            Vec3 ds = axes_s[0] * std::cos(th) + axes_s[1] * std::sin(th);
            Vec3 vs = s3 * std::cos(cone_angle) + ds * std::sin(cone_angle);
            double as = angle_between(Jinv.apply(vs), s3);
            rep.min_stable_cone_margin = std::min(rep.min_stable_cone_margin, cone_angle - as);
            if (as >= cone_angle)
                throw ConeViolation("stable cone not mapped into itself by the inverse at " +
                                        format_point(p),
                                    p.y1, p.y2, p.t);
        }

        // Iterated growth along the orbit.
        MappingTorusPoint x = p;
        Vec3 vu = u3, vs = s3;
        double gu = 1.0, gs = 1.0;
        int iters_done = 0, crossings = 0;
        for (int n = 0; n < n_iters; ++n) {
            auto Jx = jacobian_apply(x);
            if (!Jx) break;
            Vec3 wu = Jx->apply(vu);
            Vec3 ws = Jx->apply(vs);
            double cu = Jx->apply(c3).norm();
            rep.center_rate_min = std::min(rep.center_rate_min, cu);
            rep.center_rate_max = std::max(rep.center_rate_max, cu);
            gu *= wu.norm();
            gs *= ws.norm();
            vu = wu * (1.0 / wu.norm());
            vs = ws * (1.0 / ws.norm());
            crossings += (family_ == Family::product_skew) ? 1 : wraps_of_apply(x.t);
            x = apply(x);
            iters_done++;
        }
        if (iters_done > 0) {
            double per_iter_u = std::pow(gu, 1.0 / iters_done);
            double per_iter_s = std::pow(gs, 1.0 / iters_done);
            rep.min_unstable_growth = std::min(rep.min_unstable_growth, per_iter_u);
            rep.max_stable_growth = std::max(rep.max_stable_growth, per_iter_s);
            if (crossings > 0)
                rep.unstable_growth_per_crossing = std::min(
                    rep.unstable_growth_per_crossing, std::pow(gu, 1.0 / crossings));
            if (per_iter_u < 1.0 + growth_margin)
                throw ConeViolation("unstable growth below 1 + delta at " + format_point(p),
                                    p.y1, p.y2, p.t);
            if (per_iter_s > 1.0 - growth_margin)
                throw ConeViolation("stable contraction lost at " + format_point(p), p.y1, p.y2,
                                    p.t);
        }
    }
    rep.passed = true;
    return rep;
}

CenterSegment DiscretizedMap::center_segment(const MappingTorusPoint& p, double length,
                                             int orientation) const {
    if (length < 0.0) throw PreconditionError("center segment length must be >= 0");
    return CenterSegment{p, length, orientation >= 0 ? +1 : -1};
}

MappingTorusPoint DiscretizedMap::segment_eval(const CenterSegment& seg, double s) const {
    return center_flow(seg.base, double(seg.orientation) * s);
}

MappingTorusPoint DiscretizedMap::segment_end(const CenterSegment& seg) const {
    return segment_eval(seg, seg.length);
}

int DiscretizedMap::max_wraps_forward() const {
    if (family_ == Family::product_skew) return 1;
    // g maps [0,1) onto [g(0), g(0)+1); wraps = floor(g).
    double g0 = roof_.tau(0.0);
    int hi = int(std::ceil(g0 + 1.0)) - 1;
    int lo = int(std::floor(g0));
    return std::max(std::abs(hi), std::abs(lo));
}

int DiscretizedMap::max_wraps_backward() const {
    if (family_ == Family::product_skew) return 1;
    double g0 = roof_.tau(0.0);
    int hi = int(std::ceil(g0));
    int lo = hi - 1;
    return std::max(std::abs(hi), std::abs(lo));
}

namespace {

// Largest singular value of an integer 2x2 matrix: the sound per-application
// fiber Lipschitz bound (equals |lambda_u| for symmetric matrices).
double sigma_max(const std::array<std::array<std::int64_t, 2>, 2>& m) {
    double a = double(m[0][0]), b = double(m[0][1]);
    double c = double(m[1][0]), d = double(m[1][1]);
    double q = a * a + b * b + c * c + d * d;
    double det = a * d - b * c;
    double disc = std::sqrt(std::max(0.0, q * q - 4.0 * det * det));
    return std::sqrt(0.5 * (q + disc));
}

}  // namespace

double DiscretizedMap::lip_fiber_forward() const {
    switch (family_) {
        case Family::cat_suspension:
            return std::pow(sigma_max(base_.m), max_wraps_forward());
        case Family::da_suspension:
            return std::pow(da_->lip_forward(), max_wraps_forward());
        case Family::product_skew:
            return sigma_max(base_.m);
    }
    return 1.0;
}

double DiscretizedMap::lip_fiber_backward() const {
    switch (family_) {
        case Family::cat_suspension:
            return std::pow(sigma_max(base_.m_inv), max_wraps_backward());
        case Family::da_suspension:
            return std::pow(da_->lip_backward(), max_wraps_backward());
        case Family::product_skew:
            return sigma_max(base_.m_inv);
    }
    return 1.0;
}

}  // namespace anosov
