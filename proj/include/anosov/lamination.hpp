#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "anosov/boxcover.hpp"
#include "anosov/model.hpp"
#include "anosov/morse.hpp"

namespace anosov {

// Fiber-tangent unstable arc through a base point, parameterized by arc
// length along the unstable direction of the fiber automorphism.
struct UnstableSegment {
    MappingTorusPoint base;
    double half_length = 0.0;
};

// One application of f: the segment moves to the fiber c(t) and the length
// is multiplied by lambda_u^wraps (exact for the closed-form families).
UnstableSegment apply_to_segment(const DiscretizedMap& f, const UnstableSegment& seg);

// Bit-set membership over the virtual grid of a cover resolution.
class BoxSetLookup {
public:
    BoxSetLookup(const BoxCover& cover, const std::vector<std::int64_t>& boxes);

    bool contains(std::int64_t idx) const {
        return idx >= 0 && idx < total_ &&
               (bits_[std::size_t(idx >> 6)] >> (idx & 63)) & 1;
    }
    bool contains_point(const MappingTorusPoint& p) const {
        return contains(cover_->box_of_point(p));
    }
    const BoxCover& cover() const { return *cover_; }

private:
    const BoxCover* cover_;
    std::int64_t total_;
    std::vector<std::uint64_t> bits_;
};

struct LaminationApprox {
    std::vector<std::int64_t> boxes;  // sorted box indices
    MappingTorusPoint seed;
    int iterations = 0;
    Resolution res;
    bool reached_fixpoint = false;
    bool seed_in_terminal = true;  // flagged otherwise; the result then
                                   // approximates the closure of an
                                   // arbitrary unstable leaf
};

// Box-set closure of the unstable leaf through seed: grows an unstable
// segment of one box diameter by alternating apply and box re-covering;
// long segments are re-sampled as box-anchored sub-segments. Stops at
// n_iters or at an occupancy fixpoint.
LaminationApprox lamination_approx(const DiscretizedMap& f, const MappingTorusPoint& seed,
                                   int n_iters, const BoxCover& cover,
                                   const MorseDecomposition* m = nullptr);

struct MinimalLaminationReport {
    std::int32_t class_id = -1;
    bool resolved = false;       // all seeds agree within 2 box diameters
    int agreement_shells = -1;   // smallest mutual-inclusion shell count
    std::vector<std::int64_t> boxes;  // union over agreeing seeds
    std::vector<LaminationApprox> runs;
};

// One lamination per terminal class from 5 distinct seeds; a class whose
// seeds disagree beyond 2 box diameters is reported unresolved (a value,
// not an error).
std::vector<MinimalLaminationReport> minimal_laminations(const DiscretizedMap& f,
                                                         const MorseDecomposition& m,
                                                         const BoxCover& cover,
                                                         int n_iters = 60);

struct HitResult {
    MappingTorusPoint point;
    double length = 0.0;
    int direction = +1;
};

// March a center orbit (step = box diameter / 4 with bisection refinement)
// until it enters the one-box-inflated set. Returns nullopt past budget.
std::optional<HitResult> march_to_set(const DiscretizedMap& f, const MappingTorusPoint& x,
                                      int direction, const BoxSetLookup& inflated_set,
                                      double budget);

struct CenterHitReport {
    double L_measured = 0.0;
    MappingTorusPoint worst_sample;
    int samples = 0;
};

// Realized Prop-1 constant: max over samples of the smaller two-sided hit
// length to the inflated lamination. Throws NoHitWithinBudget when a sample
// misses in both directions.
CenterHitReport center_hit_length(const DiscretizedMap& f, const LaminationApprox& A,
                                  const BoxCover& cover,
                                  const std::vector<MappingTorusPoint>& samples,
                                  double budget = 10.0);

struct QiReport {
    double sup_length = 0.0;
    MappingTorusPoint witness_x;
    int witness_n = 0;
};

// Center arc lengths of f^n-images of length-d segments over
// n in [-horizon, horizon]; exact cocycle bookkeeping, no marching.
QiReport qi_constants(const DiscretizedMap& f, double seg_length, int horizon,
                      const std::vector<MappingTorusPoint>& samples);

struct FirstHit {
    MappingTorusPoint S;
    double l_S = 0.0;
};

// First point of A' on the forward center orbit of x (the flow direction),
// entry bisected to 1e-6.
FirstHit first_hit(const DiscretizedMap& f, const MappingTorusPoint& x,
                   const LaminationApprox& A, const LaminationApprox& Aprime,
                   const BoxCover& cover, double budget = 10.0);

enum class GapLabel : std::uint8_t {
    A_closed = 0,
    A_to_Aprime = 1,
    Aprime_closed = 2,
    Aprime_to_A = 3,
    ambiguous = 4,
    unlabeled = 5
};

struct GapDecomposition {
    std::vector<GapLabel> labels;  // per active rank
    std::int64_t counts[6] = {0, 0, 0, 0, 0, 0};
    double L_measured = 0.0;
    bool openness_ok = false;
    std::int64_t openness_violations = 0;
    struct STableRow {
        MappingTorusPoint x, S;
        double l_S;
    };
    std::vector<STableRow> s_table;

    double ambiguous_fraction() const {
        std::int64_t tot = 0;
        for (auto c : counts) tot += c;
        return tot ? double(counts[4]) / double(tot) : 0.0;
    }
};

// Labels every active box by the laminations its center orbit hits next in
// each direction; verifies the partition and the discrete openness of the
// two gap labels (opposite open labels never share a face).
GapDecomposition gap_decomposition(const DiscretizedMap& f, const LaminationApprox& A,
                                   const LaminationApprox& Aprime, const BoxCover& cover,
                                   int n_prop1_samples = 1000, int s_table_rows = 1000,
                                   double budget = 10.0);

// Lemma-style transport of a center segment along an unstable curve: pull
// back until the curve is shorter than delta, translate in-fiber with fixed
// t-extent, push forward. Returns the transported family at 33 parameters.
std::vector<CenterSegment> holonomy_transport(const DiscretizedMap& f, const CenterSegment& cseg,
                                              const UnstableSegment& ucurve, double delta = 0.05);

}  // namespace anosov
