#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "anosov/geometry.hpp"

namespace anosov {

struct Resolution {
    int n1 = 4, n2 = 4, nt = 4;

    std::int64_t total() const {
        return std::int64_t(n1) * std::int64_t(n2) * std::int64_t(nt);
    }
    bool operator==(const Resolution& o) const {
        return n1 == o.n1 && n2 == o.n2 && nt == o.nt;
    }
};

// Uniform half-open grid over the fundamental domain [0,1)^3. Box (i,j,k)
// is [i/n1,(i+1)/n1) x [j/n2,(j+1)/n2) x [k/nt,(k+1)/nt); linear index
// i + n1*(j + n2*k). Boxes never straddle the t = 1 gluing. A cover is
// either the full grid or an explicit sorted subset (after refinement).
class BoxCover {
public:
    static BoxCover full(Resolution res, int depth = 0);
    static BoxCover subset(Resolution res, std::vector<std::int64_t> active_sorted, int depth);

    const Resolution& res() const { return res_; }
    int depth() const { return depth_; }
    bool is_full() const { return full_; }
    std::int64_t total() const { return res_.total(); }
    std::int64_t active_count() const {
        return full_ ? total() : std::int64_t(active_.size());
    }
    // Sorted active box indices; materialized for full covers too.
    const std::vector<std::int64_t>& active() const;

    std::int64_t index(int i, int j, int k) const {
        return std::int64_t(i) + std::int64_t(res_.n1) * (std::int64_t(j) +
               std::int64_t(res_.n2) * std::int64_t(k));
    }
    void decode(std::int64_t idx, int& i, int& j, int& k) const {
        i = int(idx % res_.n1);
        std::int64_t r = idx / res_.n1;
        j = int(r % res_.n2);
        k = int(r / res_.n2);
    }

    // Rank in the active list, -1 if inactive.
    std::int32_t rank_of(std::int64_t idx) const;
    std::int64_t box_at_rank(std::int32_t r) const { return active()[std::size_t(r)]; }
    bool is_active(std::int64_t idx) const { return rank_of(idx) >= 0; }

    std::int64_t box_of_point(const MappingTorusPoint& p) const;

    double size1() const { return 1.0 / res_.n1; }
    double size2() const { return 1.0 / res_.n2; }
    double sizet() const { return 1.0 / res_.nt; }
    double diameter() const;

    MappingTorusPoint center(std::int64_t idx) const;
    void bounds(std::int64_t idx, double lo[3], double hi[3]) const;

private:
    Resolution res_;
    int depth_ = 0;
    bool full_ = true;
    mutable std::vector<std::int64_t> active_;
    std::unordered_map<std::int64_t, std::int32_t> rank_;
};

}  // namespace anosov
