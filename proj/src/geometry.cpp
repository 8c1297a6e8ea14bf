#include "anosov/geometry.hpp"

#include <cstdio>

namespace anosov {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string format_point(const MappingTorusPoint& p) {
    return "(" + format_double(p.y1) + "," + format_double(p.y2) + ";" + format_double(p.t) + ")";
}

}  // namespace anosov
