#pragma once

#include <array>
#include <optional>
#include <string>

#include "anosov/da_map.hpp"
#include "anosov/geometry.hpp"
#include "anosov/roof.hpp"
#include "anosov/toral.hpp"

namespace anosov {

enum class Family { cat_suspension, da_suspension, product_skew };

std::string family_name(Family f);
Family family_from_string(const std::string& s);

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(dot(*this)); }
};

struct Mat3 {
    double m[3][3] = {};
    Vec3 apply(const Vec3& v) const {
        return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
                m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
                m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
    }
};

// Df-invariant directions at a point, in (y1, y2, t) coordinates.
struct Splitting {
    Vec3 v_s, v_c, v_u;
};

struct CenterSegment {
    MappingTorusPoint base;
    double length = 0.0;
    int orientation = +1;
};

struct ConeReport {
    bool passed = false;
    int samples_used = 0;
    int samples_skipped = 0;  // stencil straddled a wrap or knot margin
    double min_unstable_cone_margin = 0.0;
    double min_stable_cone_margin = 0.0;
    double min_unstable_growth = 0.0;      // per-iterate geometric mean, min over samples
    double unstable_growth_per_crossing = 0.0;
    double max_stable_growth = 0.0;        // per-iterate geometric mean, max over samples
    double center_rate_min = 0.0, center_rate_max = 0.0;
};

// The suspension flow over a toral automorphism: the projection of
// d/dt = (0,1) on Y x R to the mapping torus with gluing (y,1) ~ (A y, 0).
MappingTorusPoint suspension_flow(const ToralAutomorphism& A, const MappingTorusPoint& p,
                                  double s);

// A discretized flow f(x) = phi_{tau(x)}(x) over one of the built-in
// families, or the trivial skew-product f(y,theta) = (A y, c(theta)).
// Immutable after construction; all operations are pure.
class DiscretizedMap {
public:
    static DiscretizedMap make_cat_suspension(ToralAutomorphism A, RoofDiscretization roof);
    static DiscretizedMap make_da_suspension(ToralAutomorphism A, RoofDiscretization roof,
                                             DAMapSpec spec);
    static DiscretizedMap make_product_skew(ToralAutomorphism A, RoofDiscretization roof);

    Family family() const { return family_; }
    const ToralAutomorphism& base() const { return base_; }
    const RoofDiscretization& roof() const { return roof_; }
    const DAFiberMap* da() const { return da_ ? &*da_ : nullptr; }

    double tau_at(const MappingTorusPoint& p) const { return roof_.tau(p.t); }

    // Center flow: the suspension flow for suspension families, the rigid
    // rotation of the theta circle for the product.
    MappingTorusPoint center_flow(const MappingTorusPoint& p, double s) const;

    MappingTorusPoint apply(const MappingTorusPoint& p) const;
    MappingTorusPoint apply_inverse(const MappingTorusPoint& p) const;

    // Number of gluing crossings of a forward application starting at t.
    int wraps_of_apply(double t) const;

    // Fiber transport across the gluing t: 1 -> 0 and back.
    Vec2 glue_up(const Vec2& y) const;
    Vec2 glue_down(const Vec2& y) const;
    bool gluing_is_identity() const { return family_ == Family::product_skew; }
    bool gluing_is_linear() const { return family_ != Family::da_suspension; }

    // Quotient-metric distance, accurate for small separations.
    double quotient_dist(const MappingTorusPoint& p, const MappingTorusPoint& q) const;

    Splitting splitting_at(const MappingTorusPoint& p) const;

    // Central-difference Jacobian in wrap-aligned coordinates; nullopt when
    // the stencil straddles a gluing crossing or a piecewise-linear knot.
    std::optional<Mat3> jacobian_apply(const MappingTorusPoint& p, double h = 1e-6) const;
    std::optional<Mat3> jacobian_apply_inverse(const MappingTorusPoint& p, double h = 1e-6) const;

    // Cone-field verification; throws ConeViolation with the witness point.
    ConeReport verify_partial_hyperbolicity(double cone_angle, int n_samples, int n_iters,
                                            double growth_margin = 0.05) const;

    CenterSegment center_segment(const MappingTorusPoint& p, double length,
                                 int orientation) const;
    MappingTorusPoint segment_eval(const CenterSegment& seg, double s) const;
    MappingTorusPoint segment_end(const CenterSegment& seg) const;

    // Per-axis derivative bounds used for outer-approximation bloat.
    double lip_fiber_forward() const;
    double lip_fiber_backward() const;
    double lip_t_forward() const { return roof_.max_return_slope; }
    double lip_t_backward() const { return 1.0 / roof_.min_return_slope; }
    int max_wraps_forward() const;
    int max_wraps_backward() const;

    double lambda_u() const { return base_.lambda_u; }
    double lambda_s() const { return base_.lambda_s; }
    const Vec2& v_u() const { return base_.v_u; }
    const Vec2& v_s() const { return base_.v_s; }

    // Solves x + tau(x) = target for the monotone lift branch, x in [0,1].
    double solve_center_return(double target) const;

private:
    DiscretizedMap() = default;

    Family family_ = Family::cat_suspension;
    ToralAutomorphism base_;
    RoofDiscretization roof_;
    std::optional<DAFiberMap> da_;

    MappingTorusPoint apply_suspension(const MappingTorusPoint& p) const;
    bool jacobian_stencil_ok(const MappingTorusPoint& p, double h, bool inverse) const;
};

}  // namespace anosov
