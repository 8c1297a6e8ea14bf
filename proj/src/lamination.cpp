#include "anosov/lamination.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <unordered_map>

#include "anosov/errors.hpp"
#include "anosov/transition.hpp"

namespace anosov {

UnstableSegment apply_to_segment(const DiscretizedMap& f, const UnstableSegment& seg) {
    UnstableSegment out;
    out.base = f.apply(seg.base);
    int w = (f.family() == Family::product_skew) ? 1 : f.wraps_of_apply(seg.base.t);
    out.half_length = seg.half_length * std::pow(std::fabs(f.lambda_u()), w);
    return out;
}

BoxSetLookup::BoxSetLookup(const BoxCover& cover, const std::vector<std::int64_t>& boxes)
    : cover_(&cover), total_(cover.total()), bits_(std::size_t((total_ + 63) / 64), 0) {
    for (auto b : boxes)
        if (b >= 0 && b < total_) bits_[std::size_t(b >> 6)] |= std::uint64_t(1) << (b & 63);
}

namespace {

// Fiber polyline at a fixed t-coordinate, vertices in unwrapped fiber
// coordinates with spacing at most the rasterization step.
struct Piece {
    double t = 0.0;
    std::vector<Vec2> pts;
};

struct GrowthContext {
    const DiscretizedMap* f;
    const BoxCover* cover;
    double raster_step;      // min fiber box size / 4
    double maxlen;           // fiber diameter cap for one piece
    double anchor_halflen;   // re-seeded segment half length
    double stretch;          // per-application fiber Lipschitz bound
};

Piece seed_piece(const GrowthContext& ctx, const MappingTorusPoint& p, double half_length) {
    Piece piece;
    piece.t = p.t;
    Vec2 vu = ctx.f->v_u();
    int n = std::max(2, int(std::ceil(2.0 * half_length / ctx.raster_step)) + 1);
    for (int i = 0; i < n; ++i) {
        double s = -half_length + 2.0 * half_length * double(i) / double(n - 1);
        piece.pts.push_back({p.y1 + s * vu.x, p.y2 + s * vu.y});
    }
    return piece;
}

// Map a piece through f: pre-subdivide so the image spacing stays below the
// rasterization step, apply pointwise, unwrap the image vertices.
Piece map_piece(const GrowthContext& ctx, const Piece& piece) {
    const DiscretizedMap& f = *ctx.f;
    double pre_step = ctx.raster_step / ctx.stretch;
    Piece out;
    out.t = 0.0;
    std::vector<Vec2> src;
    src.push_back(piece.pts.front());
    for (std::size_t i = 1; i < piece.pts.size(); ++i) {
        Vec2 a = piece.pts[i - 1], b = piece.pts[i];
        double d = (b - a).norm();
        int k = std::max(1, int(std::ceil(d / pre_step)));
        for (int j = 1; j <= k; ++j)
            src.push_back(a + (b - a) * (double(j) / double(k)));
    }
    out.pts.reserve(src.size());
    Vec2 prev;
    for (std::size_t i = 0; i < src.size(); ++i) {
        MappingTorusPoint q =
            f.apply({mod1(src[i].x), mod1(src[i].y), piece.t});
        out.t = q.t;
        Vec2 img{q.y1, q.y2};
        if (i == 0) {
            prev = img;
        } else {
            img = {prev.x + wrap_pm(img.x - prev.x), prev.y + wrap_pm(img.y - prev.y)};
            prev = img;
        }
        out.pts.push_back(img);
    }
    return out;
}

double piece_length(const Piece& p) {
    double len = 0.0;
    for (std::size_t i = 1; i < p.pts.size(); ++i) len += (p.pts[i] - p.pts[i - 1]).norm();
    return len;
}

std::vector<Piece> split_piece(const GrowthContext& ctx, Piece&& p) {
    std::vector<Piece> chunks;
    if (piece_length(p) <= ctx.maxlen) {
        chunks.push_back(std::move(p));
        return chunks;
    }
    Piece cur;
    cur.t = p.t;
    double acc = 0.0;
    cur.pts.push_back(p.pts.front());
    for (std::size_t i = 1; i < p.pts.size(); ++i) {
        acc += (p.pts[i] - p.pts[i - 1]).norm();
        cur.pts.push_back(p.pts[i]);
        if (acc >= ctx.maxlen && i + 1 < p.pts.size()) {
            chunks.push_back(std::move(cur));
            cur = Piece{p.t, {p.pts[i]}};
            acc = 0.0;
        }
    }
    if (cur.pts.size() > 1) chunks.push_back(std::move(cur));
    return chunks;
}

}  // namespace

LaminationApprox lamination_approx(const DiscretizedMap& f, const MappingTorusPoint& seed,
                                   int n_iters, const BoxCover& cover,
                                   const MorseDecomposition* m) {
    GrowthContext ctx;
    ctx.f = &f;
    ctx.cover = &cover;
    ctx.raster_step = std::min(cover.size1(), cover.size2()) / 4.0;
    ctx.maxlen = 0.75;  // slightly above the fiber diameter sqrt(2)/2
    ctx.anchor_halflen = 2.0 * std::sqrt(cover.size1() * cover.size1() +
                                         cover.size2() * cover.size2());
    ctx.stretch = (f.family() == Family::da_suspension) ? f.da()->lip_forward()
                                                        : std::fabs(f.lambda_u());

    LaminationApprox lam;
    lam.seed = seed;
    lam.res = cover.res();
    if (m) {
        std::int32_t r = cover.rank_of(cover.box_of_point(seed));
        std::int32_t cls = (r >= 0) ? m->class_of[std::size_t(r)] : -1;
        lam.seed_in_terminal = false;
        if (cls >= 0)
            for (auto tc : m->terminal)
                if (tc == cls) lam.seed_in_terminal = true;
    }

    std::unordered_map<std::int64_t, MappingTorusPoint> hitpoints;
    auto rasterize = [&](const Piece& piece, std::vector<Piece>* keep) {
        bool fresh = false;
        for (const Vec2& v : piece.pts) {
            MappingTorusPoint p{mod1(v.x), mod1(v.y), mod1(piece.t)};
            std::int64_t b = cover.box_of_point(p);
            if (hitpoints.emplace(b, p).second) fresh = true;
        }
        if (fresh && keep) keep->push_back(piece);
        return fresh;
    };

    std::vector<Piece> frontier;
    rasterize(seed_piece(ctx, seed, cover.diameter()), &frontier);
    if (frontier.empty())  // seed boxes were empty only if the piece was degenerate
        frontier.push_back(seed_piece(ctx, seed, cover.diameter()));

    const std::size_t frontier_cap = 20000;
    bool reseeded = false;
    int iter = 0;
    for (; iter < n_iters; ++iter) {
        std::vector<Piece> next;
        bool grew = false;
        for (const Piece& piece : frontier) {
            Piece img = map_piece(ctx, piece);
            for (Piece& chunk : split_piece(ctx, std::move(img))) {
                if (rasterize(chunk, &next)) grew = true;
                if (next.size() >= frontier_cap) break;
            }
            if (next.size() >= frontier_cap) break;
        }
        if (grew) {
            frontier = std::move(next);
            reseeded = false;
            continue;
        }
        if (reseeded) {
            lam.reached_fixpoint = true;
            break;
        }
        // Occupancy stalled: re-seed short box-anchored segments from every
        // occupied box and give growth one more chance.
        frontier.clear();
        for (const auto& kv : hitpoints)
            frontier.push_back(seed_piece(ctx, kv.second, ctx.anchor_halflen));
        std::sort(frontier.begin(), frontier.end(),
                  [](const Piece& a, const Piece& b) {
                      return a.t != b.t ? a.t < b.t
                                        : (a.pts.front().x != b.pts.front().x
                                               ? a.pts.front().x < b.pts.front().x
                                               : a.pts.front().y < b.pts.front().y);
                  });
        reseeded = true;
    }
    lam.iterations = iter;
    lam.boxes.reserve(hitpoints.size());
    for (const auto& kv : hitpoints) lam.boxes.push_back(kv.first);
    std::sort(lam.boxes.begin(), lam.boxes.end());
    return lam;
}

std::vector<MinimalLaminationReport> minimal_laminations(const DiscretizedMap& f,
                                                         const MorseDecomposition& m,
                                                         const BoxCover& cover, int n_iters) {
    std::vector<MinimalLaminationReport> out;
    for (auto tc : m.terminal) {
        MinimalLaminationReport rep;
        rep.class_id = tc;
        auto boxes = m.class_boxes(cover, tc);
        std::size_t n = boxes.size();
        std::vector<std::int64_t> seeds;
        for (double q : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            std::size_t at = std::min(n - 1, std::size_t(q * double(n - 1)));
            seeds.push_back(boxes[at]);
        }
        std::sort(seeds.begin(), seeds.end());
        seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
        for (auto sb : seeds)
            rep.runs.push_back(lamination_approx(f, cover.center(sb), n_iters, cover, &m));

        // Seed independence at resolution: mutual inclusion of the box sets
        // within r one-box shells, r <= 2 (about 2 box diameters).
        int worst = 0;
        for (std::size_t a = 0; a < rep.runs.size() && worst <= 4; ++a) {
            for (std::size_t b = 0; b < rep.runs.size(); ++b) {
                if (a == b) continue;
                std::vector<std::int64_t> grown = rep.runs[b].boxes;
                int r = 0;
                for (; r <= 4; ++r) {
                    if (std::includes(grown.begin(), grown.end(), rep.runs[a].boxes.begin(),
                                      rep.runs[a].boxes.end()))
                        break;
                    grown = inflate_boxes(f, cover, grown);
                }
                worst = std::max(worst, r);
            }
        }
        rep.agreement_shells = worst;
        rep.resolved = worst <= 2;
        for (const auto& run : rep.runs)
            rep.boxes.insert(rep.boxes.end(), run.boxes.begin(), run.boxes.end());
        std::sort(rep.boxes.begin(), rep.boxes.end());
        rep.boxes.erase(std::unique(rep.boxes.begin(), rep.boxes.end()), rep.boxes.end());
        out.push_back(std::move(rep));
    }
    return out;
}

std::optional<HitResult> march_to_set(const DiscretizedMap& f, const MappingTorusPoint& x,
                                      int direction, const BoxSetLookup& inflated_set,
                                      double budget) {
    const double step = inflated_set.cover().diameter() / 4.0;
    if (inflated_set.contains_point(x)) return HitResult{x, 0.0, direction};
    double s = 0.0;
    while (s < budget) {
        double s2 = std::min(budget, s + step);
        MappingTorusPoint p = f.center_flow(x, direction * s2);
        if (inflated_set.contains_point(p)) {
            double lo = s, hi = s2;
            for (int i = 0; i < 40 && hi - lo > 1e-6; ++i) {
                double mid = 0.5 * (lo + hi);
                if (inflated_set.contains_point(f.center_flow(x, direction * mid)))
                    hi = mid;
                else
                    lo = mid;
            }
            return HitResult{f.center_flow(x, direction * hi), hi, direction};
        }
        s = s2;
    }
    return std::nullopt;
}

CenterHitReport center_hit_length(const DiscretizedMap& f, const LaminationApprox& A,
                                  const BoxCover& cover,
                                  const std::vector<MappingTorusPoint>& samples, double budget) {
    if (A.boxes.empty()) throw PreconditionError("center_hit_length needs a non-empty lamination");
    BoxSetLookup inflated(cover, inflate_boxes(f, cover, A.boxes));
    CenterHitReport rep;
    rep.samples = int(samples.size());
    for (const auto& x : samples) {
        // Marching both directions in lockstep returns the smaller hit.
        auto fwd = march_to_set(f, x, +1, inflated, budget);
        auto bwd = march_to_set(f, x, -1, inflated, budget);
        double best;
        if (fwd && bwd)
            best = std::min(fwd->length, bwd->length);
        else if (fwd)
            best = fwd->length;
        else if (bwd)
            best = bwd->length;
        else
            throw NoHitWithinBudget("sample " + format_point(x) +
                                    " misses the lamination within center length " +
                                    format_double(budget) + " in both directions");
        if (best > rep.L_measured) {
            rep.L_measured = best;
            rep.worst_sample = x;
        }
    }
    return rep;
}

QiReport qi_constants(const DiscretizedMap& f, double seg_length, int horizon,
                      const std::vector<MappingTorusPoint>& samples) {
    if (seg_length < 0.0) throw PreconditionError("qi_constants needs seg_length >= 0");
    QiReport rep;
    for (const auto& x0 : samples) {
        // Forward sweep: D_{n+1} = D_n + tau(y_n) - tau(x_n) along the pair
        // orbit; backward sweep symmetric with the inverse.
        MappingTorusPoint xf = x0, yf = f.center_flow(x0, seg_length);
        double D = seg_length;
        auto track = [&](double Dn, int n) {
            if (std::fabs(Dn) > rep.sup_length) {
                rep.sup_length = std::fabs(Dn);
                rep.witness_x = x0;
                rep.witness_n = n;
            }
        };
        track(D, 0);
        for (int n = 1; n <= horizon; ++n) {
            D += f.tau_at(yf) - f.tau_at(xf);
            xf = f.apply(xf);
            yf = f.apply(yf);
            track(D, n);
        }
        MappingTorusPoint xb = x0, yb = f.center_flow(x0, seg_length);
        D = seg_length;
        for (int n = 1; n <= horizon; ++n) {
            xb = f.apply_inverse(xb);
            yb = f.apply_inverse(yb);
            D -= f.tau_at(yb) - f.tau_at(xb);
            track(D, -n);
        }
    }
    return rep;
}

FirstHit first_hit(const DiscretizedMap& f, const MappingTorusPoint& x,
                   const LaminationApprox& A, const LaminationApprox& Aprime,
                   const BoxCover& cover, double budget) {
    std::vector<std::int64_t> overlap;
    std::set_intersection(A.boxes.begin(), A.boxes.end(), Aprime.boxes.begin(),
                          Aprime.boxes.end(), std::back_inserter(overlap));
    if (!overlap.empty())
        throw PreconditionError("first_hit requires laminations disjoint at resolution");
    BoxSetLookup a_inflated(cover, inflate_boxes(f, cover, A.boxes));
    if (!a_inflated.contains_point(x))
        throw PreconditionError("first_hit sample " + format_point(x) +
                                " is not in the inflated source lamination");
    BoxSetLookup target(cover, inflate_boxes(f, cover, Aprime.boxes));
    // March strictly forward: leave the source before testing entry so that
    // x itself (inside inflated A) cannot shadow the A' hit.
    const double step = cover.diameter() / 4.0;
    double s = 0.0;
    while (s < budget) {
        double s2 = std::min(budget, s + step);
        MappingTorusPoint p = f.center_flow(x, s2);
        if (target.contains_point(p)) {
            double lo = s, hi = s2;
            for (int i = 0; i < 40 && hi - lo > 1e-6; ++i) {
                double mid = 0.5 * (lo + hi);
                if (target.contains_point(f.center_flow(x, mid)))
                    hi = mid;
                else
                    lo = mid;
            }
            return FirstHit{f.center_flow(x, hi), hi};
        }
        s = s2;
    }
    throw NoHitWithinBudget("no A' hit within center length " + format_double(budget) +
                            " from " + format_point(x));
}

GapDecomposition gap_decomposition(const DiscretizedMap& f, const LaminationApprox& A,
                                   const LaminationApprox& Aprime, const BoxCover& cover,
                                   int n_prop1_samples, int s_table_rows, double budget) {
    std::vector<std::int64_t> overlap;
    std::set_intersection(A.boxes.begin(), A.boxes.end(), Aprime.boxes.begin(),
                          Aprime.boxes.end(), std::back_inserter(overlap));
    if (!overlap.empty())
        throw PreconditionError("gap_decomposition requires disjoint laminations, " +
                                std::to_string(overlap.size()) + " shared boxes");

    BoxSetLookup a_exact(cover, A.boxes), ap_exact(cover, Aprime.boxes);
    BoxSetLookup a_infl(cover, inflate_boxes(f, cover, A.boxes));
    BoxSetLookup ap_infl(cover, inflate_boxes(f, cover, Aprime.boxes));
    std::vector<std::int64_t> both = A.boxes;
    both.insert(both.end(), Aprime.boxes.begin(), Aprime.boxes.end());
    std::sort(both.begin(), both.end());
    BoxSetLookup union_infl(cover, inflate_boxes(f, cover, both));

    GapDecomposition gd;
    const auto& active = cover.active();
    gd.labels.assign(active.size(), GapLabel::unlabeled);

    // Hit classification: 0 = A, 1 = A', 2 = ambiguous, 3 = none.
    auto classify = [&](const MappingTorusPoint& x, int direction) {
        auto hit = march_to_set(f, x, direction, union_infl, budget);
        if (!hit) return 3;
        bool in_a = a_infl.contains_point(hit->point);
        bool in_ap = ap_infl.contains_point(hit->point);
        if (in_a && in_ap) return 2;
        return in_a ? 0 : 1;
    };

    for (std::size_t r = 0; r < active.size(); ++r) {
        std::int64_t b = active[r];
        if (a_exact.contains(b)) {
            gd.labels[r] = GapLabel::A_closed;
        } else if (ap_exact.contains(b)) {
            gd.labels[r] = GapLabel::Aprime_closed;
        } else {
            MappingTorusPoint c = cover.center(b);
            int back = classify(c, -1);
            int fwd = classify(c, +1);
            if (back == 2 || fwd == 2)
                gd.labels[r] = GapLabel::ambiguous;
            else if (back == 3 || fwd == 3)
                gd.labels[r] = GapLabel::unlabeled;
            else if (back == 0 && fwd == 1)
                gd.labels[r] = GapLabel::A_to_Aprime;
            else if (back == 1 && fwd == 0)
                gd.labels[r] = GapLabel::Aprime_to_A;
            else if (back == 0 && fwd == 0)
                gd.labels[r] = GapLabel::A_closed;
            else
                gd.labels[r] = GapLabel::Aprime_closed;
        }
        gd.counts[int(gd.labels[r])]++;
    }

    // Discrete openness: opposite open labels may only touch through the
    // closed sets, never across a box face.
    gd.openness_violations = 0;
    std::vector<std::int64_t> nb;
    for (std::size_t r = 0; r < active.size(); ++r) {
        if (gd.labels[r] != GapLabel::A_to_Aprime) continue;
        neighbors6(f, cover, active[r], nb);
        for (auto nbox : nb) {
            std::int32_t nr = cover.rank_of(nbox);
            if (nr >= 0 && gd.labels[std::size_t(nr)] == GapLabel::Aprime_to_A)
                gd.openness_violations++;
        }
    }
    gd.openness_ok = (gd.openness_violations == 0);

    // Realized Prop-1 constant over deterministic samples, for both
    // laminations.
    std::vector<MappingTorusPoint> samples;
    for (int i = 1; i <= n_prop1_samples; ++i) {
        auto h = [](std::int64_t index, int base) {
            double fr = 1.0, out = 0.0;
            for (std::int64_t v = index; v > 0; v /= base) {
                fr /= base;
                out += fr * double(v % base);
            }
            return out;
        };
        samples.push_back({h(i, 2), h(i, 3), h(i, 5)});
    }
    double la = center_hit_length(f, A, cover, samples, budget).L_measured;
    double lap = center_hit_length(f, Aprime, cover, samples, budget).L_measured;
    gd.L_measured = std::max(la, lap);

    // First-hit table sampled from the source lamination's box centers.
    std::size_t stride = std::max<std::size_t>(1, A.boxes.size() / std::size_t(s_table_rows));
    for (std::size_t i = 0; i < A.boxes.size(); i += stride) {
        MappingTorusPoint x = cover.center(A.boxes[i]);
        auto fh = first_hit(f, x, A, Aprime, cover, budget);
        gd.s_table.push_back({x, fh.S, fh.l_S});
    }
    return gd;
}

std::vector<CenterSegment> holonomy_transport(const DiscretizedMap& f, const CenterSegment& cseg,
                                              const UnstableSegment& ucurve, double delta) {
    if (flat_dist(cseg.base, ucurve.base) > 1e-12)
        throw PreconditionError("holonomy transport needs cseg and ucurve based at one point");
    if (cseg.orientation != +1)
        throw PreconditionError("holonomy transport expects the fixed forward orientation");

    // Pull back until the unstable curve is shorter than delta.
    MappingTorusPoint zb = ucurve.base;
    double ulen = ucurve.half_length;
    int n0 = 0;
    std::vector<double> tau_x;  // roof values along the pulled-back base orbit
    while (ulen >= delta) {
        if (++n0 > 512)
            throw LocalProductFailure("could not contract the unstable curve below delta");
        int w;
        if (f.family() == Family::product_skew) {
            w = 1;
        } else {
            w = int(std::ceil(f.roof().tau(0.0) - zb.t));
        }
        zb = f.apply_inverse(zb);
        ulen *= std::pow(std::fabs(f.lambda_u()), -w);
    }
    if (ulen >= delta)
        throw LocalProductFailure("unstable curve still exceeds delta after pull-back");

    // Pulled-back center length of cseg via the arc-length cocycle.
    MappingTorusPoint xa = cseg.base, ya = f.segment_end(cseg);
    double d_minus = cseg.length;
    for (int i = 0; i < n0; ++i) {
        xa = f.apply_inverse(xa);
        ya = f.apply_inverse(ya);
        d_minus -= f.tau_at(ya) - f.tau_at(xa);
    }

    Vec2 vu = f.v_u();
    std::vector<CenterSegment> family;
    family.reserve(33);
    for (int si = 0; si <= 32; ++si) {
        double s = double(si) / 32.0 * ulen;
        if (std::fabs(s) >= delta)
            throw LocalProductFailure("local transport would leave the delta tube");
        // Local product structure: in-fiber translation along v_u with
        // fixed t-extent.
        MappingTorusPoint xs{mod1(xa.y1 + s * vu.x), mod1(xa.y2 + s * vu.y), xa.t};
        MappingTorusPoint x_up = xs, y_up = f.center_flow(xs, d_minus);
        double d_s = d_minus;
        for (int i = 0; i < n0; ++i) {
            d_s += f.tau_at(y_up) - f.tau_at(x_up);
            x_up = f.apply(x_up);
            y_up = f.apply(y_up);
        }
        family.push_back(CenterSegment{x_up, d_s, +1});
    }
    return family;
}

}  // namespace anosov
