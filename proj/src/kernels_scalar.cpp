#include <cmath>

#include "anosov/geometry.hpp"
#include "anosov/kernels.hpp"

namespace anosov::kern {

namespace {

inline double roof_tau(const KernelModel& km, double t) {
    return (km.roof_kind == 0) ? km.c0 : 1.0 + km.alpha * std::sin(km.omega * t);
}

// Fiber transported through w gluing crossings, one mod-1 reduction per
// application (same operation order as the pointwise model).
inline void wraps(const KernelModel& km, double& y1, double& y2, int w) {
    for (int i = 0; i < w; ++i) {
        double n1 = mod1(km.a11 * y1 + km.a12 * y2);
        double n2 = mod1(km.a21 * y1 + km.a22 * y2);
        y1 = n1;
        y2 = n2;
    }
    for (int i = 0; i > w; --i) {
        double n1 = mod1(km.i11 * y1 + km.i12 * y2);
        double n2 = mod1(km.i21 * y1 + km.i22 * y2);
        y1 = n1;
        y2 = n2;
    }
}

}  // namespace

void apply_batch_scalar(const KernelModel& km, const double* y1, const double* y2,
                        const double* t, double* o1, double* o2, double* ot, std::size_t n) {
    if (km.mode == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            double a = mod1(km.a11 * y1[i] + km.a12 * y2[i]);
            double b = mod1(km.a21 * y1[i] + km.a22 * y2[i]);
            ot[i] = mod1(t[i] + roof_tau(km, t[i]));
            o1[i] = a;
            o2[i] = b;
        }
        return;
    }
    for (std::size_t i = 0; i < n; ++i) {
        double u = t[i] + roof_tau(km, t[i]);
        double nf = std::floor(u);
        double a = y1[i], b = y2[i];
        wraps(km, a, b, int(nf));
        o1[i] = a;
        o2[i] = b;
        ot[i] = mod1(u - nf);
    }
}

void flow_batch_scalar(const KernelModel& km, double y1, double y2, double t, const double* s,
                       double* o1, double* o2, double* ot, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        if (km.mode == 1) {
            o1[i] = y1;
            o2[i] = y2;
            ot[i] = mod1(t + s[i]);
            continue;
        }
        double u = t + s[i];
        double nf = std::floor(u);
        double a = y1, b = y2;
        wraps(km, a, b, int(nf));
        o1[i] = a;
        o2[i] = b;
        ot[i] = mod1(u - nf);
    }
}

}  // namespace anosov::kern
