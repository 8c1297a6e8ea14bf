#include <doctest.h>

#include <cmath>
#include <random>

#include "anosov/errors.hpp"
#include "anosov/model.hpp"

using namespace anosov;

namespace {

ToralAutomorphism cat() { return ToralAutomorphism::from_entries(2, 1, 1, 1); }

DiscretizedMap cat_sin(double alpha, int k) {
    return DiscretizedMap::make_cat_suspension(cat(), RoofDiscretization::sinusoidal(alpha, k));
}

DiscretizedMap cat_const(double c) {
    return DiscretizedMap::make_cat_suspension(cat(), RoofDiscretization::constant(c));
}

MappingTorusPoint random_point(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return {u(rng), u(rng), u(rng)};
}

}  // namespace

TEST_CASE("suspension flow: direct arithmetic example") {
    auto A = cat();
    MappingTorusPoint p{0.1, 0.2, 0.7};
    auto q = suspension_flow(A, p, 0.5);
    CHECK(q.y1 == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(q.y2 == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(q.t == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("suspension flow: identity, round trip, composition") {
    auto A = cat();
    auto f = cat_const(1.0);
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> su(-3.0, 3.0);
    for (int i = 0; i < 100; ++i) {
        auto p = random_point(rng);
        auto same = suspension_flow(A, p, 0.0);
        CHECK(flat_dist(p, same) == 0.0);

        auto rt = suspension_flow(A, suspension_flow(A, p, 0.3), -0.3);
        CHECK(f.quotient_dist(p, rt) < 1e-12);

        double s = su(rng), r = su(rng);
        auto lhs = suspension_flow(A, p, s + r);
        auto rhs = suspension_flow(A, suspension_flow(A, p, r), s);
        CHECK(f.quotient_dist(lhs, rhs) < 1e-12);
    }
}

TEST_CASE("suspension flow: gluing consistency") {
    auto A = cat();
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0), e(1e-4, 0.1);
    for (int i = 0; i < 50; ++i) {
        double eps = e(rng);
        MappingTorusPoint p{u(rng), u(rng), 1.0 - eps};
        auto q = suspension_flow(A, p, 2.0 * eps);
        Vec2 ay = A.apply_mod1(p.fiber());
        CHECK(circ_dist(q.y1, ay.x) < 1e-12);
        CHECK(circ_dist(q.y2, ay.y) < 1e-12);
        CHECK(q.t == doctest::Approx(eps).epsilon(1e-9));
    }
}

TEST_CASE("apply: constant roof is the time-1 map") {
    auto f = cat_const(1.0);
    auto q = f.apply({0.1, 0.2, 0.5});
    CHECK(q.y1 == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(q.y2 == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(q.t == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("apply: sinusoidal roof fixes the attracting fiber t = 0.25") {
    // tau(0.25) = 1 + 0.05 sin(pi) = 1, so the center coordinate is fixed.
    auto f = cat_sin(0.05, 2);
    MappingTorusPoint p{0.33, 0.77, 0.25};
    auto q = f.apply(p);
    CHECK(circ_dist(q.t, 0.25) < 1e-12);
    Vec2 ay = cat().apply_mod1(p.fiber());
    CHECK(circ_dist(q.y1, ay.x) < 1e-12);
    CHECK(circ_dist(q.y2, ay.y) < 1e-12);
}

TEST_CASE("apply_inverse is a right inverse for every family") {
    std::mt19937 rng(99);
    std::vector<DiscretizedMap> models;
    models.push_back(cat_sin(0.05, 2));
    models.push_back(cat_sin(0.05, 1));
    models.push_back(cat_const(1.0));
    models.push_back(cat_const(0.5));
    models.push_back(
        DiscretizedMap::make_product_skew(cat(), RoofDiscretization::sinusoidal(0.05, 2)));
    models.push_back(DiscretizedMap::make_da_suspension(
        cat(), RoofDiscretization::sinusoidal(0.05, 2), DAMapSpec{}));
    for (const auto& f : models) {
        for (int i = 0; i < 100; ++i) {
            auto p = random_point(rng);
            auto rt = f.apply(f.apply_inverse(p));
            CHECK(f.quotient_dist(p, rt) < 1e-10);
            auto rt2 = f.apply_inverse(f.apply(p));
            CHECK(f.quotient_dist(p, rt2) < 1e-10);
        }
    }
}

TEST_CASE("center return map: fixed points and multipliers for k = 2") {
    auto roof = RoofDiscretization::sinusoidal(0.05, 2);
    CircleMap c{&roof};
    auto fps = fixed_points(c);
    REQUIRE(fps.size() == 4);
    // Oracle: tau = 1 at t = j/4; multiplier = 1 + 2 pi k alpha cos(4 pi t).
    const double amp = 2.0 * M_PI * 2.0 * 0.05;
    double expected_t[4] = {0.0, 0.25, 0.5, 0.75};
    for (int j = 0; j < 4; ++j) {
        CHECK(circ_dist(fps[j].t, expected_t[j]) < 1e-9);
        double mult = 1.0 + amp * std::cos(4.0 * M_PI * expected_t[j]);
        CHECK(fps[j].multiplier == doctest::Approx(mult).epsilon(1e-9));
        CHECK(fps[j].attracting == (j % 2 == 1));
    }
    CHECK(fps[1].multiplier == doctest::Approx(1.0 - 0.2 * M_PI).epsilon(1e-12));
    CHECK(fps[0].multiplier == doctest::Approx(1.0 + 0.2 * M_PI).epsilon(1e-12));
}

TEST_CASE("center return map: k = 1 has one attractor and one repeller") {
    auto roof = RoofDiscretization::sinusoidal(0.05, 1);
    CircleMap c{&roof};
    auto fps = fixed_points(c);
    REQUIRE(fps.size() == 2);
    CHECK(circ_dist(fps[0].t, 0.0) < 1e-9);
    CHECK(!fps[0].attracting);
    CHECK(circ_dist(fps[1].t, 0.5) < 1e-9);
    CHECK(fps[1].attracting);
}

TEST_CASE("center return map: identity roof refuses to classify") {
    auto roof = RoofDiscretization::constant(1.0);
    CircleMap c{&roof};
    CHECK_THROWS_AS(fixed_points(c), DegenerateFixedPoint);
}

TEST_CASE("roof guards") {
    // alpha >= 1/(2 pi k) breaks invertibility of the center return.
    CHECK_THROWS_AS(RoofDiscretization::sinusoidal(0.08, 2), NonInvertibleRoof);
    CHECK_THROWS_AS(RoofDiscretization::sinusoidal(0.2, 1), NonInvertibleRoof);
    CHECK_NOTHROW(RoofDiscretization::sinusoidal(0.05, 3));
    CHECK_THROWS_AS(RoofDiscretization::constant(0.0), NonInvertibleRoof);
    // Piecewise-linear segment with slope <= -1.
    CHECK_THROWS_AS(RoofDiscretization::piecewise_linear({{0.0, 0.0}, {0.1, -0.2}}),
                    NonInvertibleRoof);
    auto ok = RoofDiscretization::piecewise_linear({{0.0, 0.2}, {0.5, -0.2}});
    CHECK(ok.tau(0.25) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ok.tau(0.0) == doctest::Approx(1.2).epsilon(1e-12));
}

TEST_CASE("splitting: eigen data of the cat matrix") {
    auto A = cat();
    CHECK(A.lambda_u == doctest::Approx((3.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-12));
    CHECK(A.lambda_u * A.lambda_s == doctest::Approx(1.0).epsilon(1e-12));
    // v_u is proportional to (1, (sqrt(5)-1)/2).
    CHECK(A.v_u.y / A.v_u.x == doctest::Approx((std::sqrt(5.0) - 1.0) / 2.0).epsilon(1e-12));

    auto f = cat_sin(0.05, 2);
    auto s = f.splitting_at({0.3, 0.4, 0.6});
    CHECK(s.v_c.x == 0.0);
    CHECK(s.v_c.y == 0.0);
    CHECK(s.v_c.z == 1.0);
}

TEST_CASE("splitting: finite-difference Df preserves the eigendirections") {
    auto f = cat_sin(0.05, 2);
    auto sp = f.splitting_at({0.0, 0.0, 0.0});
    std::mt19937 rng(2024);
    int used = 0;
    for (int i = 0; i < 100 && used < 60; ++i) {
        auto p = random_point(rng);
        auto J = f.jacobian_apply(p);
        if (!J) continue;
        used++;
        for (const Vec3* v : {&sp.v_u, &sp.v_s}) {
            Vec3 w = J->apply(*v);
            double wn = w.norm();
            double cosang = std::fabs(w.dot(*v)) / wn;
            CHECK(std::acos(std::min(1.0, cosang)) < 1e-6);
        }
        // Unstable growth per application is lambda_u^wraps.
        Vec3 wu = J->apply(sp.v_u);
        double lam = f.lambda_u();
        double expect = std::pow(lam, f.wraps_of_apply(p.t));
        CHECK(wu.norm() == doctest::Approx(expect).epsilon(1e-6));
    }
    CHECK(used >= 50);
}

TEST_CASE("splitting: unavailable inside the DA bump") {
    auto f = DiscretizedMap::make_da_suspension(cat(), RoofDiscretization::sinusoidal(0.05, 2),
                                                DAMapSpec{});
    CHECK_THROWS_AS(f.splitting_at({0.01, 0.005, 0.3}), ClosedFormUnavailable);
    CHECK_NOTHROW(f.splitting_at({0.4, 0.4, 0.3}));
}

TEST_CASE("cone check: constant-roof suspension passes with rate lambda_u per crossing") {
    auto f = cat_const(1.0);
    auto rep = f.verify_partial_hyperbolicity(0.3, 200, 8);
    CHECK(rep.passed);
    CHECK(rep.samples_used > 150);
    CHECK(rep.unstable_growth_per_crossing ==
          doctest::Approx(f.lambda_u()).epsilon(1e-5));
    CHECK(rep.max_stable_growth < 0.5);
    CHECK(rep.min_unstable_cone_margin > 0.0);
}

TEST_CASE("cone check: trivial product skew has an isometric center") {
    auto f = DiscretizedMap::make_product_skew(cat(), RoofDiscretization::constant(1.0));
    auto rep = f.verify_partial_hyperbolicity(0.3, 200, 8);
    CHECK(rep.passed);
    CHECK(rep.center_rate_min == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(rep.center_rate_max == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("cone check: strong DA bump destroys the splitting") {
    DAMapSpec spec;
    spec.bump_radius = 0.3;
    spec.stable_multiplier = 3.2;  // exceeds lambda_u: no dominated splitting left
    auto f = DiscretizedMap::make_da_suspension(cat(), RoofDiscretization::constant(1.0), spec);
    CHECK_THROWS_AS(f.verify_partial_hyperbolicity(0.3, 800, 2), ConeViolation);
}

TEST_CASE("DA fiber map: linear outside the bump, repelling calibrated origin") {
    auto A = cat();
    DAMapSpec spec;  // defaults r = 0.18, multiplier 1.5
    DAFiberMap g(A, spec);

    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        Vec2 y{u(rng), u(rng)};
        if (fiber_wrap_pm(y).norm() < spec.bump_radius) continue;
        Vec2 lin = A.apply_mod1(y);
        Vec2 da = g.forward(y);
        CHECK(fiber_dist(lin, da) == 0.0);
    }

    Vec2 o = g.forward({0.0, 0.0});
    CHECK(o.norm() == 0.0);

    // Stable multiplier at the origin equals the calibration target.
    double h = 1e-7;
    Vec2 pl = g.forward(fiber_mod1(h * A.v_s));
    Vec2 mi = g.forward(fiber_mod1(-1.0 * h * A.v_s));
    Vec2 diff = fiber_wrap_pm(pl - mi);
    double mult = A.coord_s(diff) / (2.0 * h);
    CHECK(mult == doctest::Approx(1.5).epsilon(1e-5));
    double uresid = std::fabs(A.coord_u(diff)) / (2.0 * h);
    CHECK(uresid < 1e-5);

    // Round trip.
    for (int i = 0; i < 1000; ++i) {
        Vec2 y{u(rng), u(rng)};
        Vec2 rt = g.backward(g.forward(y));
        CHECK(fiber_dist(rt, y) < 1e-10);
    }
}

TEST_CASE("center segments") {
    auto f = cat_const(1.0);
    MappingTorusPoint p{0.1, 0.2, 0.0};
    auto seg0 = f.center_segment(p, 0.0, +1);
    CHECK(flat_dist(f.segment_end(seg0), p) == 0.0);

    auto seg1 = f.center_segment(p, 1.0, +1);
    auto e = f.segment_end(seg1);
    CHECK(e.t == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(e.y1 == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(e.y2 == doctest::Approx(0.3).epsilon(1e-12));

    auto seg2 = f.center_segment({0.1, 0.2, 0.7}, 1.0, +1);
    auto mid = f.segment_eval(seg2, 0.5);
    CHECK(mid.y1 == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(mid.y2 == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(mid.t == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("toral automorphism guards") {
    CHECK_THROWS_AS(ToralAutomorphism::from_entries(2, 1, 1, 2), ModelError);  // det 3
    CHECK_THROWS_AS(ToralAutomorphism::from_entries(1, 1, 0, 1), ModelError);  // trace 2
    CHECK_NOTHROW(ToralAutomorphism::from_entries(3, 2, 1, 1));
    // Non-symmetric hyperbolic matrix still satisfies the eigen identities.
    auto B = ToralAutomorphism::from_entries(3, 2, 1, 1);
    CHECK(B.lambda_u * B.lambda_s == doctest::Approx(double(B.det)).epsilon(1e-12));
    CHECK(std::fabs(B.coord_u(B.v_s)) < 1e-12);
    CHECK(std::fabs(B.coord_s(B.v_u)) < 1e-12);
}
