#include "anosov/roof.hpp"

#include <algorithm>
#include <cmath>

#include "anosov/errors.hpp"
#include "anosov/geometry.hpp"

namespace anosov {

namespace {
constexpr double two_pi = 6.283185307179586476925286766559;
}

RoofDiscretization RoofDiscretization::constant(double value) {
    RoofDiscretization r;
    r.kind = Kind::constant;
    r.c = value;
    r.finalize();
    return r;
}

RoofDiscretization RoofDiscretization::sinusoidal(double alpha, int k) {
    RoofDiscretization r;
    r.kind = Kind::sinusoidal;
    r.alpha = alpha;
    r.k = k;
    r.finalize();
    return r;
}

RoofDiscretization RoofDiscretization::piecewise_linear(
    std::vector<std::pair<double, double>> knots) {
    RoofDiscretization r;
    r.kind = Kind::piecewise_linear;
    r.knots = std::move(knots);
    std::sort(r.knots.begin(), r.knots.end());
    r.finalize();
    return r;
}

void RoofDiscretization::finalize() {
    switch (kind) {
        case Kind::constant:
            if (!(c > 0.0)) throw NonInvertibleRoof("constant roof requires tau = c > 0");
            min_tau = max_tau = c;
            min_return_slope = max_return_slope = 1.0;
            break;
        case Kind::sinusoidal: {
            if (k < 1) throw NonInvertibleRoof("sinusoidal roof requires k >= 1");
            if (!(alpha >= 0.0) || alpha >= 1.0)
                throw NonInvertibleRoof("sinusoidal roof requires alpha in [0,1)");
            double amp = two_pi * double(k) * alpha;
            if (amp >= 1.0)
                throw NonInvertibleRoof(
                    "sinusoidal roof with alpha >= 1/(2 pi k): center return not monotone "
                    "(alpha = " + std::to_string(alpha) + ", k = " + std::to_string(k) + ")");
            min_tau = 1.0 - alpha;
            max_tau = 1.0 + alpha;
            min_return_slope = 1.0 - amp;
            max_return_slope = 1.0 + amp;
            break;
        }
        case Kind::piecewise_linear: {
            if (knots.size() < 2)
                throw NonInvertibleRoof("piecewise_linear roof requires at least 2 knots");
            for (auto& kn : knots)
                if (kn.first < 0.0 || kn.first >= 1.0)
                    throw NonInvertibleRoof("piecewise_linear knots must have t in [0,1)");
            for (std::size_t i = 1; i < knots.size(); ++i)
                if (knots[i].first == knots[i - 1].first)
                    throw NonInvertibleRoof("piecewise_linear knots must have distinct t");
            min_tau = 1e300;
            max_tau = -1e300;
            min_return_slope = 1e300;
            max_return_slope = -1e300;
            std::size_t n = knots.size();
            for (std::size_t i = 0; i < n; ++i) {
                double t0 = knots[i].first, h0 = knots[i].second;
                double t1 = (i + 1 < n) ? knots[i + 1].first : knots[0].first + 1.0;
                double h1 = (i + 1 < n) ? knots[i + 1].second : knots[0].second;
                double slope = (h1 - h0) / (t1 - t0);
                min_tau = std::min({min_tau, 1.0 + h0, 1.0 + h1});
                max_tau = std::max({max_tau, 1.0 + h0, 1.0 + h1});
                min_return_slope = std::min(min_return_slope, 1.0 + slope);
                max_return_slope = std::max(max_return_slope, 1.0 + slope);
            }
            if (!(min_tau > 0.0))
                throw NonInvertibleRoof("piecewise_linear roof must keep tau = 1 + h > 0");
            if (!(min_return_slope > 0.0))
                throw NonInvertibleRoof(
                    "piecewise_linear roof must keep 1 + h' > 0 on every segment");
            break;
        }
    }
}

double RoofDiscretization::tau(double t) const {
    switch (kind) {
        case Kind::constant:
            return c;
        case Kind::sinusoidal:
            return 1.0 + alpha * std::sin(two_pi * double(k) * t);
        case Kind::piecewise_linear: {
            double u = mod1(t);
            // Locate segment [t_i, t_{i+1}) containing u, wrapping the last one.
            auto it = std::upper_bound(knots.begin(), knots.end(), std::make_pair(u, 1e300));
            std::size_t i = (it == knots.begin()) ? knots.size() - 1 : std::size_t(it - knots.begin()) - 1;
            double t0 = knots[i].first, h0 = knots[i].second;
            double t1, h1;
            if (i + 1 < knots.size()) {
                t1 = knots[i + 1].first;
                h1 = knots[i + 1].second;
            } else {
                t1 = knots[0].first + 1.0;
                h1 = knots[0].second;
            }
            if (u < t0) u += 1.0;  // wrapped into the last segment
            double w = (u - t0) / (t1 - t0);
            return 1.0 + h0 + w * (h1 - h0);
        }
    }
    return 1.0;
}

double RoofDiscretization::dtau(double t) const {
    switch (kind) {
        case Kind::constant:
            return 0.0;
        case Kind::sinusoidal:
            return two_pi * double(k) * alpha * std::cos(two_pi * double(k) * t);
        case Kind::piecewise_linear: {
            double h = 1e-6;
            return (tau(t + h) - tau(t - h)) / (2.0 * h);
        }
    }
    return 0.0;
}

bool RoofDiscretization::near_knot(double t) const {
    if (kind != Kind::piecewise_linear) return false;
    double u = mod1(t);
    for (auto& kn : knots)
        if (circ_dist(u, kn.first) < knot_margin) return true;
    return false;
}

double CircleMap::lift(double t) const { return t + roof->tau(mod1(t)); }

double CircleMap::operator()(double t) const { return mod1(lift(t)); }

double CircleMap::deriv(double t) const {
    if (roof->smooth()) return 1.0 + roof->dtau(t);
    double h = 1e-6;
    return (lift(t + h) - lift(t - h)) / (2.0 * h);
}

std::vector<FixedPointInfo> fixed_points(const CircleMap& c) {
    const RoofDiscretization& roof = *c.roof;
    // Fixed points of (t + tau(t)) mod 1 are the solutions of tau(t) = m
    // for integer m. Scan tau - m for sign changes over 1024 cells.
    const int cells = 1024;
    int m_lo = int(std::ceil(roof.min_tau - 1e-12));
    int m_hi = int(std::floor(roof.max_tau + 1e-12));

    std::vector<FixedPointInfo> out;
    for (int m = m_lo; m <= m_hi; ++m) {
        for (int i = 0; i < cells; ++i) {
            double a = double(i) / cells, b = double(i + 1) / cells;
            double fa = roof.tau(a) - m;
            double fb = roof.tau(b) - m;
            if (fa != 0.0 && fb != 0.0 && ((fa < 0) == (fb < 0))) continue;
            if (fa == 0.0 && fb == 0.0)
                throw DegenerateFixedPoint("center return map is the identity on a cell near t = " +
                                           std::to_string(a));
            double root;
            if (fa == 0.0) {
                root = a;
            } else {
                double lo = a, hi = b, flo = fa;
                for (int it = 0; it < 80; ++it) {
                    double mid = 0.5 * (lo + hi);
                    double fm = roof.tau(mid) - m;
                    if (fm == 0.0) {
                        lo = hi = mid;
                        break;
                    }
                    if ((fm < 0) == (flo < 0))
                        lo = mid, flo = fm;
                    else
                        hi = mid;
                }
                root = 0.5 * (lo + hi);
            }
            FixedPointInfo fp;
            fp.t = mod1(root);
            fp.multiplier = c.deriv(fp.t);
            if (std::fabs(fp.multiplier - 1.0) < 1e-8)
                throw DegenerateFixedPoint("multiplier within 1e-8 of 1 at t = " +
                                           std::to_string(fp.t));
            fp.attracting = std::fabs(fp.multiplier) < 1.0;
            bool dup = false;
            for (auto& q : out)
                if (circ_dist(q.t, fp.t) < 1e-9) dup = true;
            if (!dup) out.push_back(fp);
        }
    }
    std::sort(out.begin(), out.end(),
              [](const FixedPointInfo& a, const FixedPointInfo& b) { return a.t < b.t; });
    return out;
}

}  // namespace anosov
