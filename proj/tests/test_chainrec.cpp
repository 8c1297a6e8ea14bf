#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "anosov/errors.hpp"
#include "anosov/morse.hpp"
#include "anosov/transition.hpp"

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

void check_soundness(const DiscretizedMap& f, const TransitionGraph& g, int n_points,
                     unsigned seed) {
    std::mt19937 rng(seed);
    int violations = 0;
    for (int i = 0; i < n_points; ++i) {
        auto p = random_point(rng);
        auto q = g.inverse ? f.apply_inverse(p) : f.apply(p);
        std::int32_t from = g.cover->rank_of(g.cover->box_of_point(p));
        std::int32_t to = g.cover->rank_of(g.cover->box_of_point(q));
        if (from < 0 || to < 0) continue;  // outside a refined active set
        if (!g.has_edge(from, to)) violations++;
    }
    CHECK(violations == 0);
}

// t-center spread of a class against a target slab location.
void check_slab(const BoxCover& cover, const std::vector<std::int64_t>& boxes, double t_star,
                double tol) {
    for (auto b : boxes) {
        auto c = cover.center(b);
        CHECK(circ_dist(c.t, t_star) < tol);
    }
}

}  // namespace

TEST_CASE("box cover: counts, guards, geometry") {
    auto big = BoxCover::full({64, 64, 256});
    CHECK(big.total() == 1048576);
    auto small = BoxCover::full({4, 4, 4});
    CHECK(small.total() == 64);
    CHECK_THROWS_AS(BoxCover::full({3, 4, 4}), ResolutionTooCoarse);

    CHECK(small.box_of_point({0.0, 0.0, 0.0}) == 0);
    CHECK(small.box_of_point({0.999, 0.999, 0.999}) == 63);
    // Half-open boxes: a boundary point belongs to the box starting there.
    CHECK(small.box_of_point({0.25, 0.0, 0.0}) == 1);
    int i, j, k;
    small.decode(small.index(1, 2, 3), i, j, k);
    CHECK(i == 1);
    CHECK(j == 2);
    CHECK(k == 3);
}

TEST_CASE("box cover: top neighbors are routed through the gluing") {
    auto f = cat_const(1.0);
    auto cover = BoxCover::full({4, 4, 4});
    std::vector<std::int64_t> nb;
    neighbors6(f, cover, cover.index(0, 0, 3), nb);
    // The t-up neighbors live at k = 0 over A([0,1/4]^2), whose bounding box
    // is [0, 3/4] x [0, 1/2]: i in {0,1,2}, j in {0,1}.
    std::set<std::int64_t> s(nb.begin(), nb.end());
    for (int ii = 0; ii <= 2; ++ii)
        for (int jj = 0; jj <= 1; ++jj) CHECK(s.count(cover.index(ii, jj, 0)) == 1);
    CHECK(s.count(cover.index(3, 3, 0)) == 0);
    // Plain face neighbors too.
    CHECK(s.count(cover.index(1, 0, 3)) == 1);
    CHECK(s.count(cover.index(0, 0, 2)) == 1);
}

TEST_CASE("transition graph: identity stub stays within the one-box shell") {
    auto f = cat_const(1.0);  // provides the gluing only
    auto cover = BoxCover::full({8, 8, 8});
    auto g = build_transition_graph_custom(
        f, cover, [](const MappingTorusPoint& p) { return p; }, 1.0, 1.0, 27);
    for (std::int64_t b = 0; b < cover.total(); ++b) {
        std::int32_t r = cover.rank_of(b);
        auto [beg, end] = g.out(r);
        CHECK(g.has_edge(r, r));  // self is always an out-neighbor
        int i, j, k;
        cover.decode(b, i, j, k);
        // Away from the gluing the bloat shell is the 26-neighborhood; the
        // top and bottom layers carry A-transported windows, one shell more.
        std::vector<std::int64_t> allowed = inflate_boxes(f, cover, {b});
        if (k == 0 || k == cover.res().nt - 1) allowed = inflate_boxes(f, cover, allowed);
        for (const std::int32_t* p = beg; p != end; ++p) {
            bool ok = std::binary_search(allowed.begin(), allowed.end(),
                                         cover.box_at_rank(*p));
            if (!ok) CHECK(ok);
        }
    }
}

TEST_CASE("transition graph: soundness for every family") {
    auto cover = BoxCover::full({16, 16, 64});
    {
        auto f = cat_sin(0.05, 2);
        auto g = build_transition_graph(f, cover, 27);
        check_soundness(f, g, 10000, 1);
        auto gi = build_transition_graph(f, cover, 27, true);
        check_soundness(f, gi, 2000, 2);
    }
    {
        auto f = DiscretizedMap::make_product_skew(cat(), RoofDiscretization::sinusoidal(0.05, 2));
        auto g = build_transition_graph(f, cover, 27);
        check_soundness(f, g, 10000, 3);
    }
    {
        auto f = DiscretizedMap::make_da_suspension(cat(), RoofDiscretization::sinusoidal(0.05, 2),
                                                    DAMapSpec{});
        auto g = build_transition_graph(f, cover, 27);
        check_soundness(f, g, 4000, 4);
    }
}

TEST_CASE("transition graph: determinism across runs and thread counts") {
    auto f = cat_sin(0.05, 2);
    auto cover = BoxCover::full({16, 16, 64});
    auto g1 = build_transition_graph(f, cover, 27, false, 1);
    auto g2 = build_transition_graph(f, cover, 27, false, 2);
    auto g3 = build_transition_graph(f, cover, 27, false, 2);
    CHECK(g1.offsets == g2.offsets);
    CHECK(g1.targets == g2.targets);
    CHECK(g2.offsets == g3.offsets);
    CHECK(g2.targets == g3.targets);
    CHECK(g1.edge_count() > 0);

    auto m1 = morse_decomposition(g1);
    auto m2 = morse_decomposition(g2);
    CHECK(m1.classes == m2.classes);
    CHECK(m1.order == m2.order);
}

TEST_CASE("transition graph: every box has out-degree >= 1 on a full cover") {
    auto f = cat_sin(0.05, 2);
    auto cover = BoxCover::full({8, 8, 16});
    auto g = build_transition_graph(f, cover, 27);
    for (std::int64_t r = 0; r < cover.active_count(); ++r)
        CHECK(g.offsets[std::size_t(r) + 1] > g.offsets[std::size_t(r)]);
}

TEST_CASE("morse: constant roof is one chain class covering nearly everything") {
    auto f = cat_const(1.0);
    auto cover = BoxCover::full({16, 16, 64});
    auto g = build_transition_graph(f, cover, 27);
    auto m = morse_decomposition(g);
    REQUIRE(m.classes.size() >= 1);
    std::size_t largest = 0;
    for (const auto& c : m.classes) largest = std::max(largest, c.size());
    CHECK(double(largest) / double(cover.total()) >= 0.99);
    CHECK(m.classes.size() == 1);
    CHECK(m.terminal.size() == 1);
    CHECK(m.initial.size() == 1);
}

TEST_CASE("morse: k = 2 roof separates two attractor and two repeller slabs") {
    auto f = cat_sin(0.05, 2);
    auto cover = BoxCover::full({32, 32, 128});
    auto g = build_transition_graph(f, cover, 27);
    auto m = morse_decomposition(g);
    REQUIRE(m.terminal.size() == 2);
    REQUIRE(m.initial.size() == 2);

    // Terminal classes sit in slabs around the attracting fixed fibers
    // t = 1/4 and t = 3/4 of the center return map.
    std::vector<double> targets;
    for (auto tc : m.terminal) {
        auto boxes = m.class_boxes(cover, tc);
        double t0 = cover.center(boxes.front()).t;
        double t_star = circ_dist(t0, 0.25) < circ_dist(t0, 0.75) ? 0.25 : 0.75;
        targets.push_back(t_star);
        check_slab(cover, boxes, t_star, 0.08);
        // Full fiber occupancy at the central slice.
        std::set<std::pair<int, int>> fibers;
        for (auto b : boxes) {
            int i, j, k;
            cover.decode(b, i, j, k);
            fibers.insert({i, j});
        }
        CHECK(fibers.size() == std::size_t(32 * 32));
    }
    CHECK(targets[0] != targets[1]);

    // Initial classes around the repelling fibers t = 0 and t = 1/2.
    for (auto ic : m.initial) {
        auto boxes = m.class_boxes(cover, ic);
        double t0 = cover.center(boxes.front()).t;
        double t_star = circ_dist(t0, 0.0) < circ_dist(t0, 0.5) ? 0.0 : 0.5;
        check_slab(cover, boxes, t_star, 0.08);
    }

    // Quasi-attractor certification: disjoint trapping sets.
    auto certs = quasi_attractors(f, cover, g, m, 27);
    REQUIRE(certs.size() == 2);
    for (const auto& c : certs) CHECK(c.status == CertStatus::certified);
    std::vector<std::int64_t> inter;
    std::set_intersection(certs[0].trapping.begin(), certs[0].trapping.end(),
                          certs[1].trapping.begin(), certs[1].trapping.end(),
                          std::back_inserter(inter));
    CHECK(inter.empty());
}

TEST_CASE("morse: symmetry between attractors of f^{-1} and repellers of f") {
    auto f = cat_sin(0.05, 2);
    auto cover = BoxCover::full({16, 16, 64});
    auto g = build_transition_graph(f, cover, 27);
    auto m = morse_decomposition(g);
    auto gi = build_transition_graph(f, cover, 27, true);
    auto mi = morse_decomposition(gi);
    CHECK(m.terminal.size() == 2);
    CHECK(mi.terminal.size() == m.initial.size());
    CHECK(mi.initial.size() == m.terminal.size());
    auto certs = quasi_attractors(f, cover, gi, mi, 27);
    int certified = 0;
    for (const auto& c : certs) certified += (c.status == CertStatus::certified);
    CHECK(certified == 2);
}

TEST_CASE("morse: whole-cover trapping set for the chain-transitive case") {
    auto f = cat_const(1.0);
    auto cover = BoxCover::full({8, 8, 16});
    auto g = build_transition_graph(f, cover, 27);
    auto m = morse_decomposition(g);
    REQUIRE(m.terminal.size() == 1);
    auto certs = quasi_attractors(f, cover, g, m, 27);
    REQUIRE(certs.size() == 1);
    CHECK(certs[0].status == CertStatus::certified);
    CHECK(certs[0].whole_cover);
    CHECK(std::int64_t(certs[0].trapping.size()) == cover.total());
}

TEST_CASE("refine: axis factors, budget guard, refined soundness") {
    auto f = cat_sin(0.05, 2);
    auto cover = BoxCover::full({16, 16, 64});
    auto g = build_transition_graph(f, cover, 27);
    auto m = morse_decomposition(g);
    auto chain = m.chain_recurrent_boxes(cover);

    auto fine = refine(cover, chain, {1, 1, 2}, std::int64_t(5e7));
    CHECK(fine.res().n1 == 16);
    CHECK(fine.res().nt == 128);
    CHECK(fine.active_count() == std::int64_t(chain.size()) * 2);

    CHECK_THROWS_AS(refine(cover, chain, {8, 8, 8}, std::int64_t(chain.size())),
                    MemoryBudgetExceeded);

    // The refined graph stays sound for points inside active boxes.
    auto g2 = build_transition_graph(f, fine, 27);
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int checked = 0, violations = 0;
    for (std::size_t s = 0; s < fine.active().size() && checked < 4000; s += 7) {
        std::int64_t b = fine.active()[s];
        double lo[3], hi[3];
        fine.bounds(b, lo, hi);
        MappingTorusPoint p{lo[0] + u(rng) * (hi[0] - lo[0]), lo[1] + u(rng) * (hi[1] - lo[1]),
                            lo[2] + u(rng) * (hi[2] - lo[2])};
        auto q = f.apply(p);
        std::int32_t to = fine.rank_of(fine.box_of_point(q));
        if (to < 0) continue;  // image box not active: dropped edge
        ++checked;
        if (!g2.has_edge(fine.rank_of(b), to)) ++violations;
    }
    CHECK(checked > 1000);
    CHECK(violations == 0);

    // Chain-recurrent volume shrinks monotonically under refinement.
    auto m2 = morse_decomposition(g2);
    double vol1 = double(chain.size()) / double(cover.total());
    double vol2 = double(m2.chain_recurrent_boxes(fine).size()) / double(fine.total());
    CHECK(vol2 <= vol1 + 1e-12);
}
