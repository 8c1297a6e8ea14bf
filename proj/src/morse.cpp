#include "anosov/morse.hpp"

#include <algorithm>
#include <string>
#include <unordered_set>

#include "anosov/errors.hpp"

namespace anosov {

MorseDecomposition morse_decomposition(const TransitionGraph& g) {
    const std::size_t n = std::size_t(g.cover->active_count());
    std::vector<std::int32_t> index(n, -1), lowlink(n, 0);
    std::vector<std::int32_t> scc_of(n, -1);  // emission order: sinks first
    std::vector<char> onstack(n, 0);
    std::vector<std::int32_t> stack;
    std::int32_t scc_count = 0;

    struct Frame {
        std::int32_t v;
        std::int64_t cursor;
    };
    std::vector<Frame> frames;
    std::int32_t counter = 0;

    auto push_node = [&](std::int32_t v) {
        index[v] = lowlink[v] = counter++;
        stack.push_back(v);
        onstack[v] = 1;
        frames.push_back({v, g.offsets[std::size_t(v)]});
    };

    for (std::size_t v0 = 0; v0 < n; ++v0) {
        if (index[v0] != -1) continue;
        push_node(std::int32_t(v0));
        while (!frames.empty()) {
            Frame& fr = frames.back();
            std::int64_t end = g.offsets[std::size_t(fr.v) + 1];
            bool descended = false;
            while (fr.cursor < end) {
                std::int32_t w = g.targets[std::size_t(fr.cursor++)];
                if (index[w] == -1) {
                    push_node(w);
                    descended = true;
                    break;
                }
                if (onstack[w]) lowlink[fr.v] = std::min(lowlink[fr.v], index[w]);
            }
            if (descended) continue;
            std::int32_t v = fr.v;
            frames.pop_back();
            if (lowlink[v] == index[v]) {
                for (;;) {
                    std::int32_t w = stack.back();
                    stack.pop_back();
                    onstack[w] = 0;
                    scc_of[std::size_t(w)] = scc_count;
                    if (w == v) break;
                }
                ++scc_count;
            }
            if (!frames.empty())
                lowlink[frames.back().v] = std::min(lowlink[frames.back().v], lowlink[v]);
        }
    }

    // Bucket nodes per SCC (emission order is reverse topological: every
    // SCC reachable from s has a smaller id than s).
    std::vector<std::int64_t> bucket_off(std::size_t(scc_count) + 1, 0);
    for (std::size_t v = 0; v < n; ++v) bucket_off[std::size_t(scc_of[v]) + 1]++;
    for (std::size_t s = 0; s < std::size_t(scc_count); ++s) bucket_off[s + 1] += bucket_off[s];
    std::vector<std::int32_t> bucket_nodes(n);
    {
        std::vector<std::int64_t> cur(bucket_off.begin(), bucket_off.end() - 1);
        for (std::size_t v = 0; v < n; ++v)
            bucket_nodes[std::size_t(cur[std::size_t(scc_of[v])]++)] = std::int32_t(v);
    }

    MorseDecomposition m;
    m.class_of.assign(n, -1);

    // Chain-recurrent classes: nontrivial SCCs plus self-loop singletons.
    std::vector<std::int32_t> kept_of_scc(std::size_t(scc_count), -1);
    std::vector<std::pair<std::int32_t, std::int32_t>> kept;  // (min rank, scc id)
    for (std::int32_t s = 0; s < scc_count; ++s) {
        std::int64_t b = bucket_off[std::size_t(s)], e = bucket_off[std::size_t(s) + 1];
        if (e - b == 1 && !g.has_self_loop(bucket_nodes[std::size_t(b)])) continue;
        std::int32_t mn = bucket_nodes[std::size_t(b)];
        for (std::int64_t i = b; i < e; ++i) mn = std::min(mn, bucket_nodes[std::size_t(i)]);
        kept.emplace_back(mn, s);
    }
    std::sort(kept.begin(), kept.end());
    m.classes.resize(kept.size());
    std::vector<std::int32_t> class_scc(kept.size());
    for (std::size_t c = 0; c < kept.size(); ++c) {
        std::int32_t s = kept[c].second;
        class_scc[c] = s;
        kept_of_scc[std::size_t(s)] = std::int32_t(c);
        auto& cls = m.classes[c];
        for (std::int64_t i = bucket_off[std::size_t(s)]; i < bucket_off[std::size_t(s) + 1]; ++i)
            cls.push_back(bucket_nodes[std::size_t(i)]);
        std::sort(cls.begin(), cls.end());
        for (auto r : cls) m.class_of[std::size_t(r)] = std::int32_t(c);
    }

    // Reachability between classes through arbitrary (also wandering) boxes.
    // With at most 64 classes a bitset DP over the SCC DAG gives the full
    // partial order; beyond that, a three-state merge still yields exact
    // terminal/initial sets and the order falls back to direct edges.
    const std::size_t n_classes = m.classes.size();
    if (n_classes <= 64) {
        std::vector<std::uint64_t> down(std::size_t(scc_count), 0);
        for (std::int32_t s = 0; s < scc_count; ++s) {
            std::uint64_t acc = 0;
            for (std::int64_t i = bucket_off[std::size_t(s)]; i < bucket_off[std::size_t(s) + 1];
                 ++i) {
                auto [b, e] = g.out(bucket_nodes[std::size_t(i)]);
                for (const std::int32_t* p = b; p != e; ++p) {
                    std::int32_t ts = scc_of[std::size_t(*p)];
                    if (ts == s) continue;
                    acc |= down[std::size_t(ts)];
                    std::int32_t kc = kept_of_scc[std::size_t(ts)];
                    if (kc >= 0) acc |= (std::uint64_t(1) << kc);
                }
            }
            down[std::size_t(s)] = acc;
        }
        std::vector<std::uint64_t> up(std::size_t(scc_count), 0);
        for (std::int32_t s = scc_count - 1; s >= 0; --s) {
            std::uint64_t from = up[std::size_t(s)];
            std::int32_t kc = kept_of_scc[std::size_t(s)];
            if (kc >= 0) from |= (std::uint64_t(1) << kc);
            for (std::int64_t i = bucket_off[std::size_t(s)]; i < bucket_off[std::size_t(s) + 1];
                 ++i) {
                auto [b, e] = g.out(bucket_nodes[std::size_t(i)]);
                for (const std::int32_t* p = b; p != e; ++p) {
                    std::int32_t ts = scc_of[std::size_t(*p)];
                    if (ts != s) up[std::size_t(ts)] |= from;
                }
            }
        }
        for (std::size_t c = 0; c < n_classes; ++c) {
            std::uint64_t self = std::uint64_t(1) << c;
            std::uint64_t d = down[std::size_t(class_scc[c])];
            std::uint64_t u = up[std::size_t(class_scc[c])];
            for (std::size_t c2 = 0; c2 < n_classes; ++c2)
                if (c2 != c && (d & (std::uint64_t(1) << c2)))
                    m.order.emplace_back(std::int32_t(c), std::int32_t(c2));
            if ((d & ~self) == 0) m.terminal.push_back(std::int32_t(c));
            if ((u & ~self) == 0) m.initial.push_back(std::int32_t(c));
        }
        std::sort(m.order.begin(), m.order.end());
    } else {
        // Three-state DP: -2 none, -1 several, otherwise the single class.
        auto merge = [](std::int32_t a, std::int32_t b) {
            if (b == -2 || a == b) return a;
            if (a == -2) return b;
            return std::int32_t(-1);
        };
        std::vector<std::int32_t> down(std::size_t(scc_count), -2),
            up(std::size_t(scc_count), -2);
        for (std::int32_t s = 0; s < scc_count; ++s) {
            std::int32_t acc = -2;
            for (std::int64_t i = bucket_off[std::size_t(s)]; i < bucket_off[std::size_t(s) + 1];
                 ++i) {
                auto [b, e] = g.out(bucket_nodes[std::size_t(i)]);
                for (const std::int32_t* p = b; p != e; ++p) {
                    std::int32_t ts = scc_of[std::size_t(*p)];
                    if (ts == s) continue;
                    acc = merge(acc, down[std::size_t(ts)]);
                    std::int32_t kc = kept_of_scc[std::size_t(ts)];
                    if (kc >= 0) acc = merge(acc, kc);
                }
            }
            down[std::size_t(s)] = acc;
        }
        for (std::int32_t s = scc_count - 1; s >= 0; --s) {
            std::int32_t from = up[std::size_t(s)];
            std::int32_t kc = kept_of_scc[std::size_t(s)];
            if (kc >= 0) from = merge(from, kc);
            for (std::int64_t i = bucket_off[std::size_t(s)]; i < bucket_off[std::size_t(s) + 1];
                 ++i) {
                auto [b, e] = g.out(bucket_nodes[std::size_t(i)]);
                for (const std::int32_t* p = b; p != e; ++p) {
                    std::int32_t ts = scc_of[std::size_t(*p)];
                    if (ts != s) up[std::size_t(ts)] = merge(up[std::size_t(ts)], from);
                }
            }
        }
        for (std::size_t c = 0; c < n_classes; ++c) {
            std::int32_t d = down[std::size_t(class_scc[c])];
            std::int32_t u = up[std::size_t(class_scc[c])];
            if (d == -2 || d == std::int32_t(c)) m.terminal.push_back(std::int32_t(c));
            if (u == -2 || u == std::int32_t(c)) m.initial.push_back(std::int32_t(c));
        }
        for (std::size_t v = 0; v < n; ++v) {
            std::int32_t cu = m.class_of[v];
            if (cu < 0) continue;
            auto [b, e] = g.out(std::int32_t(v));
            for (const std::int32_t* p = b; p != e; ++p) {
                std::int32_t cv = m.class_of[std::size_t(*p)];
                if (cv >= 0 && cv != cu) m.order.emplace_back(cu, cv);
            }
        }
        std::sort(m.order.begin(), m.order.end());
        m.order.erase(std::unique(m.order.begin(), m.order.end()), m.order.end());
    }
    return m;
}

std::vector<std::int64_t> MorseDecomposition::chain_recurrent_boxes(const BoxCover& cover) const {
    std::vector<std::int64_t> out;
    for (const auto& cls : classes)
        for (auto r : cls) out.push_back(cover.box_at_rank(r));
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::int64_t> MorseDecomposition::class_boxes(const BoxCover& cover,
                                                          std::int32_t id) const {
    std::vector<std::int64_t> out;
    for (auto r : classes[std::size_t(id)]) out.push_back(cover.box_at_rank(r));
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<CertifiedAttractor> quasi_attractors(const DiscretizedMap& f, const BoxCover& cover,
                                                 const TransitionGraph& g,
                                                 const MorseDecomposition& m,
                                                 int samples_per_box, unsigned seed) {
    SamplePlan plan = make_sample_plan(samples_per_box, seed);
    ImageOracle oracle(f, cover, plan, g.inverse);

    // Box sets of all terminal classes, for the meets-another-class test.
    std::vector<std::unordered_set<std::int64_t>> terminal_sets;
    for (auto tc : m.terminal) {
        std::unordered_set<std::int64_t> s;
        for (auto r : m.classes[std::size_t(tc)]) s.insert(cover.box_at_rank(r));
        terminal_sets.push_back(std::move(s));
    }

    std::vector<CertifiedAttractor> result;
    const int max_iterations = 256;
    const int max_inflation = 3;
    for (std::size_t ti = 0; ti < m.terminal.size(); ++ti) {
        CertifiedAttractor cert;
        cert.class_id = m.terminal[ti];
        std::vector<std::int64_t> seedboxes = m.class_boxes(cover, cert.class_id);

        // A one-box shell can be reached by its own bloated images, which
        // makes image(N) = N exactly; widening the buffer ring until the
        // outermost ring maps strictly inward recovers the strict trapping
        // condition.
        for (int rounds = 1; rounds <= max_inflation; ++rounds) {
            std::vector<std::int64_t> nvec = seedboxes;
            for (int r = 0; r < rounds; ++r) nvec = inflate_boxes(f, cover, nvec);
            std::unordered_set<std::int64_t> N(nvec.begin(), nvec.end());
            std::vector<std::int64_t> frontier = nvec;

            bool met_other = false;
            int iter = 0;
            std::vector<std::vector<std::int64_t>> images;
            while (!frontier.empty() && iter < max_iterations) {
                ++iter;
                oracle.image_boxes_batch(frontier, images);
                std::vector<std::int64_t> fresh;
                for (auto& img : images) {
                    for (auto b : img) {
                        if (N.count(b)) continue;
                        for (std::size_t tj = 0; tj < terminal_sets.size(); ++tj) {
                            if (tj != ti && terminal_sets[tj].count(b)) {
                                met_other = true;
                                break;
                            }
                        }
                        if (met_other) break;
                        N.insert(b);
                        fresh.push_back(b);
                    }
                    if (met_other) break;
                }
                if (met_other) break;
                std::sort(fresh.begin(), fresh.end());
                fresh.erase(std::unique(fresh.begin(), fresh.end()), fresh.end());
                frontier = std::move(fresh);
            }
            cert.iterations = iter;

            if (met_other) {
                cert.status = CertStatus::failed_met_other_class;
                break;
            }
            if (!frontier.empty()) {
                cert.status = CertStatus::failed_budget;
                break;
            }
            // Stable: image(N) is contained in N by construction. Strict
            // forward invariance asks for a box of N missed by image(N);
            // the whole cover is trapping trivially (f is onto).
            cert.trapping.assign(N.begin(), N.end());
            std::sort(cert.trapping.begin(), cert.trapping.end());
            cert.whole_cover = std::int64_t(cert.trapping.size()) >= cover.total();
            if (cert.whole_cover) {
                cert.status = CertStatus::certified;
                break;
            }
            std::unordered_set<std::int64_t> image_union;
            oracle.image_boxes_batch(cert.trapping, images);
            for (auto& img : images) image_union.insert(img.begin(), img.end());
            bool strict = false;
            for (auto b : cert.trapping)
                if (!image_union.count(b)) {
                    strict = true;
                    break;
                }
            cert.status = strict ? CertStatus::certified : CertStatus::failed_budget;
            if (cert.status == CertStatus::certified) break;
        }
        if (cert.status != CertStatus::certified) cert.trapping.clear();
        result.push_back(std::move(cert));
    }
    return result;
}

BoxCover refine(const BoxCover& cover, const std::vector<std::int64_t>& boxes,
                std::array<int, 3> factors, std::int64_t max_active_boxes) {
    if (factors[0] < 1 || factors[1] < 1 || factors[2] < 1)
        throw PreconditionError("refinement factors must be >= 1");
    std::int64_t children_per = std::int64_t(factors[0]) * factors[1] * factors[2];
    std::int64_t projected = children_per * std::int64_t(boxes.size());
    if (projected > max_active_boxes)
        throw MemoryBudgetExceeded("refinement would create " + std::to_string(projected) +
                                   " active boxes (cap " + std::to_string(max_active_boxes) + ")");
    Resolution res = cover.res();
    Resolution fine{res.n1 * factors[0], res.n2 * factors[1], res.nt * factors[2]};
    BoxCover dummy = BoxCover::full(fine, cover.depth() + 1);  // for index arithmetic
    std::vector<std::int64_t> active;
    active.reserve(std::size_t(projected));
    for (auto b : boxes) {
        int i, j, k;
        cover.decode(b, i, j, k);
        for (int c = 0; c < factors[2]; ++c)
            for (int bjj = 0; bjj < factors[1]; ++bjj)
                for (int a = 0; a < factors[0]; ++a)
                    active.push_back(
                        dummy.index(i * factors[0] + a, j * factors[1] + bjj, k * factors[2] + c));
    }
    std::sort(active.begin(), active.end());
    active.erase(std::unique(active.begin(), active.end()), active.end());
    return BoxCover::subset(fine, std::move(active), cover.depth() + 1);
}

}  // namespace anosov
