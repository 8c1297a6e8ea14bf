#include "anosov/transition.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "anosov/errors.hpp"

namespace anosov {

namespace {

double halton(std::int64_t index, int base) {
    double f = 1.0, r = 0.0;
    for (std::int64_t i = index; i > 0; i /= base) {
        f /= base;
        r += f * double(i % base);
    }
    return r;
}

}  // namespace

SamplePlan make_sample_plan(int samples_per_box, unsigned seed) {
    if (samples_per_box < 8)
        throw PreconditionError("samples_per_box must be at least 8");
    SamplePlan plan;
    if (samples_per_box >= 27) {
        for (int a = 0; a <= 2; ++a)
            for (int b = 0; b <= 2; ++b)
                for (int c = 0; c <= 2; ++c)
                    plan.rel.push_back({0.5 * a, 0.5 * b, 0.5 * c});
        plan.cover1 = plan.cover2 = plan.covert = 0.25;
    } else {
        for (int a = 0; a <= 1; ++a)
            for (int b = 0; b <= 1; ++b)
                for (int c = 0; c <= 1; ++c)
                    plan.rel.push_back({double(a), double(b), double(c)});
        plan.rel.push_back({0.5, 0.5, 0.5});
        plan.cover1 = plan.cover2 = plan.covert = 0.5;
    }
    std::int64_t offset = std::int64_t(seed) * 7919 + 1;
    for (int extra = int(plan.rel.size()); extra < samples_per_box; ++extra) {
        std::int64_t idx = offset + extra;
        plan.rel.push_back({halton(idx, 2), halton(idx, 3), halton(idx, 5)});
    }
    return plan;
}

FiberRect transport_rect(const DiscretizedMap& f, const FiberRect& r, bool up) {
    if (f.gluing_is_identity()) return r;
    if (f.gluing_is_linear()) {
        const auto& A = f.base();
        double c1[4] = {r.lo1, r.hi1, r.lo1, r.hi1};
        double c2[4] = {r.lo2, r.lo2, r.hi2, r.hi2};
        FiberRect out{1e300, -1e300, 1e300, -1e300};
        for (int i = 0; i < 4; ++i) {
            Vec2 q = up ? f.base().apply({c1[i], c2[i]}) : A.apply_inv({c1[i], c2[i]});
            out.lo1 = std::min(out.lo1, q.x);
            out.hi1 = std::max(out.hi1, q.x);
            out.lo2 = std::min(out.lo2, q.y);
            out.hi2 = std::max(out.hi2, q.y);
        }
        return out;
    }
    // DA gluing: sampled bounding box plus a Lipschitz margin. Windows wider
    // than 0.4 fall back to the whole fiber.
    double w1 = r.hi1 - r.lo1, w2 = r.hi2 - r.lo2;
    if (w1 > 0.4 || w2 > 0.4) return FiberRect{0.0, 1.0, 0.0, 1.0};
    const DAFiberMap& g = *f.da();
    auto map = [&](const Vec2& y) { return up ? g.forward(y) : g.backward(y); };
    Vec2 qc = map({r.lo1 + 0.5 * w1, r.lo2 + 0.5 * w2});
    FiberRect out{qc.x, qc.x, qc.y, qc.y};
    for (int a = 0; a <= 2; ++a) {
        for (int b = 0; b <= 2; ++b) {
            Vec2 q = map({r.lo1 + 0.5 * a * w1, r.lo2 + 0.5 * b * w2});
            double q1 = qc.x + wrap_pm(q.x - qc.x);
            double q2 = qc.y + wrap_pm(q.y - qc.y);
            out.lo1 = std::min(out.lo1, q1);
            out.hi1 = std::max(out.hi1, q1);
            out.lo2 = std::min(out.lo2, q2);
            out.hi2 = std::max(out.hi2, q2);
        }
    }
    double lip = up ? g.lip_forward() : g.lip_backward();
    double margin = lip * std::sqrt(w1 * w1 + w2 * w2) / 4.0;
    out.lo1 -= margin;
    out.hi1 += margin;
    out.lo2 -= margin;
    out.hi2 += margin;
    return out;
}

ImageOracle::ImageOracle(const DiscretizedMap& f, const BoxCover& cover, const SamplePlan& plan,
                         bool inverse)
    : f_(&f), cover_(&cover), plan_(plan) {
    batch_.emplace(f, inverse);
    double lf = inverse ? f.lip_fiber_backward() : f.lip_fiber_forward();
    double lt = inverse ? f.lip_t_backward() : f.lip_t_forward();
    double d1 = plan_.cover1 * cover.size1(), d2 = plan_.cover2 * cover.size2();
    bloat_.b1 = bloat_.b2 = lf * std::sqrt(d1 * d1 + d2 * d2);
    bloat_.bt = lt * plan_.covert * cover.sizet();
}

ImageOracle::ImageOracle(const DiscretizedMap& gluing_model, const BoxCover& cover,
                         const SamplePlan& plan,
                         std::function<MappingTorusPoint(const MappingTorusPoint&)> fn,
                         double lip_fiber, double lip_t)
    : f_(&gluing_model), cover_(&cover), plan_(plan), fn_(std::move(fn)) {
    double d1 = plan_.cover1 * cover.size1(), d2 = plan_.cover2 * cover.size2();
    bloat_.b1 = bloat_.b2 = lip_fiber * std::sqrt(d1 * d1 + d2 * d2);
    bloat_.bt = lip_t * plan_.covert * cover.sizet();
}

const char* ImageOracle::backend() const { return batch_ ? batch_->backend() : "custom"; }

void ImageOracle::gather_samples(std::int64_t box, std::vector<double>& y1,
                                 std::vector<double>& y2, std::vector<double>& t) const {
    double lo[3], hi[3];
    cover_->bounds(box, lo, hi);
    double s1 = hi[0] - lo[0], s2 = hi[1] - lo[1], st = hi[2] - lo[2];
    for (const auto& r : plan_.rel) {
        y1.push_back(lo[0] + r[0] * s1);
        y2.push_back(lo[1] + r[1] * s2);
        t.push_back(lo[2] + r[2] * st);
    }
}

void ImageOracle::boxes_of_window(const MappingTorusPoint& q, std::vector<std::int64_t>& out) const {
    const Resolution& res = cover_->res();
    struct Part {
        FiberRect fr;
        double tlo, thi;
    };
    Part parts[3];
    int nparts = 0;
    FiberRect base{q.y1 - bloat_.b1, q.y1 + bloat_.b1, q.y2 - bloat_.b2, q.y2 + bloat_.b2};
    double tlo = q.t - bloat_.bt, thi = q.t + bloat_.bt;
    parts[nparts++] = {base, std::max(tlo, 0.0), std::min(thi, 1.0)};
    if (thi >= 1.0) parts[nparts++] = {transport_rect(*f_, base, true), 0.0, thi - 1.0};
    if (tlo < 0.0) parts[nparts++] = {transport_rect(*f_, base, false), tlo + 1.0, 1.0};

    for (int pi = 0; pi < nparts; ++pi) {
        const Part& part = parts[pi];
        int klo = std::max(0, int(std::floor(part.tlo * res.nt)));
        int khi = std::min(res.nt - 1, int(std::floor(part.thi * res.nt)));
        if (khi < klo) continue;
        auto axis_range = [](double lo, double hi, int n, int& a, int& cnt) {
            std::int64_t il = std::int64_t(std::floor(lo * n));
            std::int64_t ih = std::int64_t(std::floor(hi * n));
            if (ih - il + 1 >= n) {
                a = 0;
                cnt = n;
            } else {
                a = int(((il % n) + n) % n);
                cnt = int(ih - il + 1);
            }
        };
        int a1, c1, a2, c2;
        axis_range(part.fr.lo1, part.fr.hi1, res.n1, a1, c1);
        axis_range(part.fr.lo2, part.fr.hi2, res.n2, a2, c2);
        for (int k = klo; k <= khi; ++k)
            for (int u = 0; u < c1; ++u)
                for (int v = 0; v < c2; ++v)
                    out.push_back(cover_->index((a1 + u) % res.n1, (a2 + v) % res.n2, k));
    }
}

void ImageOracle::image_boxes(std::int64_t box, std::vector<std::int64_t>& out) const {
    out.clear();
    std::vector<double> y1, y2, t;
    gather_samples(box, y1, y2, t);
    std::size_t n = y1.size();
    std::vector<double> o1(n), o2(n), ot(n);
    if (batch_) {
        batch_->eval(y1.data(), y2.data(), t.data(), o1.data(), o2.data(), ot.data(), n);
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            auto q = fn_({y1[i], y2[i], t[i]});
            o1[i] = q.y1;
            o2[i] = q.y2;
            ot[i] = q.t;
        }
    }
    for (std::size_t i = 0; i < n; ++i) boxes_of_window({o1[i], o2[i], ot[i]}, out);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
}

void ImageOracle::image_boxes_batch(const std::vector<std::int64_t>& boxes,
                                    std::vector<std::vector<std::int64_t>>& out) const {
    out.assign(boxes.size(), {});
    std::size_t per = plan_.rel.size();
    std::vector<double> y1, y2, t;
    y1.reserve(boxes.size() * per);
    y2.reserve(boxes.size() * per);
    t.reserve(boxes.size() * per);
    for (auto b : boxes) gather_samples(b, y1, y2, t);
    std::size_t n = y1.size();
    std::vector<double> o1(n), o2(n), ot(n);
    if (batch_) {
        batch_->eval(y1.data(), y2.data(), t.data(), o1.data(), o2.data(), ot.data(), n);
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            auto q = fn_({y1[i], y2[i], t[i]});
            o1[i] = q.y1;
            o2[i] = q.y2;
            ot[i] = q.t;
        }
    }
    for (std::size_t bi = 0; bi < boxes.size(); ++bi) {
        auto& dst = out[bi];
        for (std::size_t i = bi * per; i < (bi + 1) * per; ++i)
            boxes_of_window({o1[i], o2[i], ot[i]}, dst);
        std::sort(dst.begin(), dst.end());
        dst.erase(std::unique(dst.begin(), dst.end()), dst.end());
    }
}

bool TransitionGraph::has_edge(std::int32_t from, std::int32_t to) const {
    auto [b, e] = out(from);
    return std::binary_search(b, e, to);
}

namespace {

TransitionGraph assemble_graph(const ImageOracle& oracle, const BoxCover& cover, bool inverse,
                               int threads) {
    TransitionGraph g;
    g.cover = &cover;
    g.inverse = inverse;
    g.bloat = oracle.bloat();
    g.eps1 = cover.size1() + 2.0 * g.bloat.b1;
    g.eps2 = cover.size2() + 2.0 * g.bloat.b2;
    g.epst = cover.sizet() + 2.0 * g.bloat.bt;

    const auto& active = cover.active();
    std::size_t n = active.size();
    std::vector<std::vector<std::int32_t>> rows(n);

    const std::size_t chunk = 512;
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        std::vector<std::int64_t> boxes;
        std::vector<std::vector<std::int64_t>> images;
        for (;;) {
            std::size_t begin = next.fetch_add(chunk);
            if (begin >= n) return;
            std::size_t end = std::min(n, begin + chunk);
            boxes.assign(active.begin() + begin, active.begin() + end);
            oracle.image_boxes_batch(boxes, images);
            for (std::size_t i = 0; i < boxes.size(); ++i) {
                auto& row = rows[begin + i];
                row.reserve(images[i].size());
                for (auto idx : images[i]) {
                    std::int32_t r = cover.rank_of(idx);
                    if (r >= 0) row.push_back(r);
                }
            }
        }
    };
    int nthreads = std::max(1, threads);
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    g.offsets.resize(n + 1);
    g.offsets[0] = 0;
    for (std::size_t i = 0; i < n; ++i)
        g.offsets[i + 1] = g.offsets[i] + std::int64_t(rows[i].size());
    g.targets.resize(std::size_t(g.offsets[n]));
    for (std::size_t i = 0; i < n; ++i)
        std::copy(rows[i].begin(), rows[i].end(), g.targets.begin() + g.offsets[i]);
    return g;
}

}  // namespace

TransitionGraph build_transition_graph(const DiscretizedMap& f, const BoxCover& cover,
                                       int samples_per_box, bool inverse, int threads,
                                       unsigned seed) {
    SamplePlan plan = make_sample_plan(samples_per_box, seed);
    ImageOracle oracle(f, cover, plan, inverse);
    return assemble_graph(oracle, cover, inverse, threads);
}

TransitionGraph build_transition_graph_custom(
    const DiscretizedMap& gluing_model, const BoxCover& cover,
    std::function<MappingTorusPoint(const MappingTorusPoint&)> fn, double lip_fiber, double lip_t,
    int samples_per_box, int threads, unsigned seed) {
    SamplePlan plan = make_sample_plan(samples_per_box, seed);
    ImageOracle oracle(gluing_model, cover, plan, std::move(fn), lip_fiber, lip_t);
    return assemble_graph(oracle, cover, false, threads);
}

namespace {

void fiber_box_targets(const DiscretizedMap& f, const BoxCover& cover, int i, int j, int k_to,
                       bool up, std::vector<std::int64_t>& out) {
    const Resolution& res = cover.res();
    FiberRect r{double(i) / res.n1, double(i + 1) / res.n1, double(j) / res.n2,
                double(j + 1) / res.n2};
    FiberRect m = transport_rect(f, r, up);
    std::int64_t il = std::int64_t(std::floor(m.lo1 * res.n1));
    std::int64_t ih = std::int64_t(std::floor(m.hi1 * res.n1));
    std::int64_t jl = std::int64_t(std::floor(m.lo2 * res.n2));
    std::int64_t jh = std::int64_t(std::floor(m.hi2 * res.n2));
    if (ih - il + 1 >= res.n1) il = 0, ih = res.n1 - 1;
    if (jh - jl + 1 >= res.n2) jl = 0, jh = res.n2 - 1;
    for (std::int64_t a = il; a <= ih; ++a)
        for (std::int64_t b = jl; b <= jh; ++b)
            out.push_back(cover.index(int(((a % res.n1) + res.n1) % res.n1),
                                      int(((b % res.n2) + res.n2) % res.n2), k_to));
}

void push_neighbor(const DiscretizedMap& f, const BoxCover& cover, int i, int j, int dk_from_k,
                   int k, std::vector<std::int64_t>& out) {
    const Resolution& res = cover.res();
    int kk = k + dk_from_k;
    if (kk >= 0 && kk < res.nt) {
        out.push_back(cover.index(i, j, kk));
    } else if (kk >= res.nt) {
        fiber_box_targets(f, cover, i, j, kk - res.nt, true, out);
    } else {
        fiber_box_targets(f, cover, i, j, kk + res.nt, false, out);
    }
}

}  // namespace

void neighbors6(const DiscretizedMap& f, const BoxCover& cover, std::int64_t box,
                std::vector<std::int64_t>& out) {
    out.clear();
    const Resolution& res = cover.res();
    int i, j, k;
    cover.decode(box, i, j, k);
    out.push_back(cover.index((i + 1) % res.n1, j, k));
    out.push_back(cover.index((i + res.n1 - 1) % res.n1, j, k));
    out.push_back(cover.index(i, (j + 1) % res.n2, k));
    out.push_back(cover.index(i, (j + res.n2 - 1) % res.n2, k));
    push_neighbor(f, cover, i, j, +1, k, out);
    push_neighbor(f, cover, i, j, -1, k, out);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
}

void neighbors26(const DiscretizedMap& f, const BoxCover& cover, std::int64_t box,
                 std::vector<std::int64_t>& out) {
    out.clear();
    const Resolution& res = cover.res();
    int i, j, k;
    cover.decode(box, i, j, k);
    for (int di = -1; di <= 1; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
            int ii = (i + di + res.n1) % res.n1;
            int jj = (j + dj + res.n2) % res.n2;
            for (int dk = -1; dk <= 1; ++dk) {
                if (di == 0 && dj == 0 && dk == 0) continue;
                push_neighbor(f, cover, ii, jj, dk, k, out);
            }
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
}

std::vector<std::int64_t> inflate_boxes(const DiscretizedMap& f, const BoxCover& cover,
                                        const std::vector<std::int64_t>& boxes) {
    std::vector<std::int64_t> result = boxes;
    std::vector<std::int64_t> nb;
    for (auto b : boxes) {
        neighbors26(f, cover, b, nb);
        result.insert(result.end(), nb.begin(), nb.end());
    }
    std::sort(result.begin(), result.end());
    result.erase(std::unique(result.begin(), result.end()), result.end());
    return result;
}

}  // namespace anosov
