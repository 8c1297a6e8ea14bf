#pragma once

#include <cstdint>
#include <vector>

#include "anosov/transition.hpp"

namespace anosov {

// SCC condensation of the transition graph: chain-recurrent box classes
// (nontrivial SCCs plus self-loop singletons), the condensation edge
// relation, and its terminal/initial elements. Class ids are assigned by
// ascending smallest member rank.
struct MorseDecomposition {
    std::vector<std::vector<std::int32_t>> classes;       // sorted member ranks
    std::vector<std::int32_t> class_of;                   // per rank, -1 if wandering
    std::vector<std::pair<std::int32_t, std::int32_t>> order;  // condensation edges
    std::vector<std::int32_t> terminal;
    std::vector<std::int32_t> initial;

    // Union of all classes, as sorted box indices of the cover.
    std::vector<std::int64_t> chain_recurrent_boxes(const BoxCover& cover) const;
    std::vector<std::int64_t> class_boxes(const BoxCover& cover, std::int32_t id) const;
};

MorseDecomposition morse_decomposition(const TransitionGraph& g);

enum class CertStatus { certified, failed_met_other_class, failed_budget };

struct CertifiedAttractor {
    std::int32_t class_id = -1;
    CertStatus status = CertStatus::failed_budget;
    std::vector<std::int64_t> trapping;  // sorted box indices (virtual grid)
    int iterations = 0;
    bool whole_cover = false;
};

// Trapping-region certification of every terminal class: N starts as the
// class plus a one-box shell and absorbs forward image boxes until stable.
// Certified when the image set is strictly inside N (or N is the whole
// cover). Image boxes are evaluated on the virtual grid, so the iteration
// may leave the active set of a refined cover.
std::vector<CertifiedAttractor> quasi_attractors(const DiscretizedMap& f, const BoxCover& cover,
                                                 const TransitionGraph& g,
                                                 const MorseDecomposition& m,
                                                 int samples_per_box, unsigned seed = 0);

// Subdivide the given boxes by per-axis factors; the refined cover's active
// set is exactly the set of children.
BoxCover refine(const BoxCover& cover, const std::vector<std::int64_t>& boxes,
                std::array<int, 3> factors, std::int64_t max_active_boxes);

}  // namespace anosov
