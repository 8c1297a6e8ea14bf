#include "anosov/boxcover.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "anosov/errors.hpp"

namespace anosov {

BoxCover BoxCover::full(Resolution res, int depth) {
    if (res.n1 < 4 || res.n2 < 4 || res.nt < 4)
        throw ResolutionTooCoarse("every axis needs at least 4 boxes, got (" +
                                  std::to_string(res.n1) + "," + std::to_string(res.n2) + "," +
                                  std::to_string(res.nt) + ")");
    BoxCover c;
    c.res_ = res;
    c.depth_ = depth;
    c.full_ = true;
    return c;
}

BoxCover BoxCover::subset(Resolution res, std::vector<std::int64_t> active_sorted, int depth) {
    if (res.n1 < 4 || res.n2 < 4 || res.nt < 4)
        throw ResolutionTooCoarse("every axis needs at least 4 boxes");
    BoxCover c;
    c.res_ = res;
    c.depth_ = depth;
    c.full_ = false;
    c.active_ = std::move(active_sorted);
    c.rank_.reserve(c.active_.size() * 2);
    for (std::size_t r = 0; r < c.active_.size(); ++r)
        c.rank_.emplace(c.active_[r], std::int32_t(r));
    return c;
}

const std::vector<std::int64_t>& BoxCover::active() const {
    if (full_ && active_.empty() && total() > 0) {
        active_.resize(std::size_t(total()));
        for (std::int64_t i = 0; i < total(); ++i) active_[std::size_t(i)] = i;
    }
    return active_;
}

std::int32_t BoxCover::rank_of(std::int64_t idx) const {
    if (idx < 0 || idx >= total()) return -1;
    if (full_) return std::int32_t(idx);
    auto it = rank_.find(idx);
    return it == rank_.end() ? -1 : it->second;
}

std::int64_t BoxCover::box_of_point(const MappingTorusPoint& p) const {
    int i = std::min(res_.n1 - 1, int(std::floor(p.y1 * res_.n1)));
    int j = std::min(res_.n2 - 1, int(std::floor(p.y2 * res_.n2)));
    int k = std::min(res_.nt - 1, int(std::floor(p.t * res_.nt)));
    i = std::max(i, 0);
    j = std::max(j, 0);
    k = std::max(k, 0);
    return index(i, j, k);
}

double BoxCover::diameter() const {
    double a = size1(), b = size2(), c = sizet();
    return std::sqrt(a * a + b * b + c * c);
}

MappingTorusPoint BoxCover::center(std::int64_t idx) const {
    int i, j, k;
    decode(idx, i, j, k);
    return {(i + 0.5) * size1(), (j + 0.5) * size2(), (k + 0.5) * sizet()};
}

void BoxCover::bounds(std::int64_t idx, double lo[3], double hi[3]) const {
    int i, j, k;
    decode(idx, i, j, k);
    lo[0] = i * size1();
    hi[0] = (i + 1) * size1();
    lo[1] = j * size2();
    hi[1] = (j + 1) * size2();
    lo[2] = k * sizet();
    hi[2] = (k + 1) * sizet();
}

}  // namespace anosov
