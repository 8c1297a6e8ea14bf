#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "anosov/boxcover.hpp"
#include "anosov/kernels.hpp"
#include "anosov/model.hpp"

namespace anosov {

// Deterministic in-box sample set (relative coordinates in [0,1]^3). With
// samples_per_box >= 27 the base set is the 3x3x3 lattice (8 corners +
// center + face/edge midpoints, per-axis covering half-width 1/4), topped
// up with seeded Halton points; below 27 it is corners + center (covering
// half-width 1/2).
struct SamplePlan {
    std::vector<std::array<double, 3>> rel;
    double cover1 = 0.5, cover2 = 0.5, covert = 0.5;  // fractions of the box size
};

SamplePlan make_sample_plan(int samples_per_box, unsigned seed);

// Per-axis bloat radii of the outer approximation.
struct BloatSpec {
    double b1 = 0.0, b2 = 0.0, bt = 0.0;
};

struct FiberRect {
    double lo1 = 0.0, hi1 = 0.0, lo2 = 0.0, hi2 = 0.0;
};

// Outer cover of the image of a fiber rectangle under the gluing map (or
// its inverse): exact corner bounding box for linear gluings, sampled
// bounding box with Lipschitz margin for the DA gluing.
FiberRect transport_rect(const DiscretizedMap& f, const FiberRect& r, bool up);

// Pure per-box image computation on the virtual grid of a cover: sampled
// images, per-axis bloat, gluing-aware wrap of the bloat windows. Usable
// for any box index, active or not.
class ImageOracle {
public:
    ImageOracle(const DiscretizedMap& f, const BoxCover& cover, const SamplePlan& plan,
                bool inverse);
    ImageOracle(const DiscretizedMap& gluing_model, const BoxCover& cover, const SamplePlan& plan,
                std::function<MappingTorusPoint(const MappingTorusPoint&)> fn, double lip_fiber,
                double lip_t);

    const BloatSpec& bloat() const { return bloat_; }
    const SamplePlan& plan() const { return plan_; }
    const char* backend() const;

    // Sorted unique box indices meeting the bloated image of the box.
    void image_boxes(std::int64_t box, std::vector<std::int64_t>& out) const;

    // Batched variant: boxes[i] -> out[i], using one kernel call per chunk.
    void image_boxes_batch(const std::vector<std::int64_t>& boxes,
                           std::vector<std::vector<std::int64_t>>& out) const;

private:
    const DiscretizedMap* f_;
    const BoxCover* cover_;
    SamplePlan plan_;
    BloatSpec bloat_;
    std::function<MappingTorusPoint(const MappingTorusPoint&)> fn_;
    std::optional<kern::BatchEvaluator> batch_;

    void gather_samples(std::int64_t box, std::vector<double>& y1, std::vector<double>& y2,
                        std::vector<double>& t) const;
    void boxes_of_window(const MappingTorusPoint& q, std::vector<std::int64_t>& out) const;
};

struct TransitionGraph {
    const BoxCover* cover = nullptr;
    bool inverse = false;
    BloatSpec bloat;
    double eps1 = 0, eps2 = 0, epst = 0;  // realized per-axis pseudo-orbit resolution
    std::vector<std::int64_t> offsets;    // CSR over active ranks, size n+1
    std::vector<std::int32_t> targets;    // sorted within each row

    std::int64_t edge_count() const { return std::int64_t(targets.size()); }
    std::pair<const std::int32_t*, const std::int32_t*> out(std::int32_t rank) const {
        return {targets.data() + offsets[std::size_t(rank)],
                targets.data() + offsets[std::size_t(rank) + 1]};
    }
    bool has_edge(std::int32_t from, std::int32_t to) const;
    bool has_self_loop(std::int32_t rank) const { return has_edge(rank, rank); }
};

TransitionGraph build_transition_graph(const DiscretizedMap& f, const BoxCover& cover,
                                       int samples_per_box, bool inverse = false, int threads = 1,
                                       unsigned seed = 0);

// Testing hook: graph of an arbitrary point map over the cover of a model
// (the model provides only the gluing of the box grid).
TransitionGraph build_transition_graph_custom(
    const DiscretizedMap& gluing_model, const BoxCover& cover,
    std::function<MappingTorusPoint(const MappingTorusPoint&)> fn, double lip_fiber, double lip_t,
    int samples_per_box, int threads = 1, unsigned seed = 0);

// Gluing-aware box neighborhoods on the virtual grid.
void neighbors6(const DiscretizedMap& f, const BoxCover& cover, std::int64_t box,
                std::vector<std::int64_t>& out);
void neighbors26(const DiscretizedMap& f, const BoxCover& cover, std::int64_t box,
                 std::vector<std::int64_t>& out);

// Sorted union of a sorted box set with its one-box (26-neighbor) shell.
std::vector<std::int64_t> inflate_boxes(const DiscretizedMap& f, const BoxCover& cover,
                                        const std::vector<std::int64_t>& boxes);

}  // namespace anosov
