#if defined(ANOSOV_HAVE_AVX2)

#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "anosov/kernels.hpp"

namespace anosov::kern {

namespace {

const __m256d kOnes = _mm256_set1_pd(1.0);
const __m256d kZero = _mm256_setzero_pd();

inline __m256d mod1_pd(__m256d x) {
    __m256d r = _mm256_sub_pd(x, _mm256_floor_pd(x));
    __m256d ge1 = _mm256_cmp_pd(r, kOnes, _CMP_GE_OQ);
    return _mm256_blendv_pd(r, kZero, ge1);
}

// sin for |x| <~ 200: Cody-Waite reduction mod pi plus an odd Taylor
// polynomial through r^19 (|r| <= pi/2, truncation ~3e-16).
inline __m256d sin_pd(__m256d x) {
    const __m256d inv_pi = _mm256_set1_pd(0.31830988618379067154);
    const __m256d pi_hi = _mm256_set1_pd(3.1415926535897931160);
    const __m256d pi_lo = _mm256_set1_pd(1.2246467991473531772e-16);
    __m256d q = _mm256_round_pd(_mm256_mul_pd(x, inv_pi),
                                _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_sub_pd(x, _mm256_mul_pd(q, pi_hi));
    r = _mm256_sub_pd(r, _mm256_mul_pd(q, pi_lo));

    const double c[9] = {-1.0 / 6, 1.0 / 120, -1.0 / 5040, 1.0 / 362880, -1.0 / 39916800,
                         1.0 / 6227020800.0, -1.0 / 1307674368000.0, 1.0 / 355687428096000.0,
                         -1.0 / 121645100408832000.0};
    __m256d r2 = _mm256_mul_pd(r, r);
    __m256d p = _mm256_set1_pd(c[8]);
    for (int i = 7; i >= 0; --i)
        p = _mm256_add_pd(_mm256_mul_pd(p, r2), _mm256_set1_pd(c[i]));
    p = _mm256_add_pd(_mm256_mul_pd(p, r2), kOnes);
    p = _mm256_mul_pd(p, r);

    // Flip the sign on odd q: q/2 has fractional part 1/2 exactly.
    __m256d qh = _mm256_mul_pd(q, _mm256_set1_pd(0.5));
    __m256d frac = _mm256_sub_pd(qh, _mm256_floor_pd(qh));
    __m256d odd = _mm256_cmp_pd(frac, _mm256_set1_pd(0.5), _CMP_EQ_OQ);
    __m256d sign = _mm256_and_pd(odd, _mm256_set1_pd(-0.0));
    return _mm256_xor_pd(p, sign);
}

inline __m256d roof_tau_pd(const KernelModel& km, __m256d t) {
    if (km.roof_kind == 0) return _mm256_set1_pd(km.c0);
    __m256d arg = _mm256_mul_pd(_mm256_set1_pd(km.omega), t);
    return _mm256_add_pd(kOnes, _mm256_mul_pd(_mm256_set1_pd(km.alpha), sin_pd(arg)));
}

// Fiber transport through per-lane wrap counts w (integer-valued doubles):
// masked repeated application of the matrix (or its inverse) with a mod-1
// reduction per step, matching the scalar reference operation for operation.
inline void wraps_pd(const KernelModel& km, __m256d& y1, __m256d& y2, __m256d w) {
    alignas(32) double wv[4];
    _mm256_store_pd(wv, w);
    double wmax = std::max(std::max(wv[0], wv[1]), std::max(wv[2], wv[3]));
    double wmin = std::min(std::min(wv[0], wv[1]), std::min(wv[2], wv[3]));

    const __m256d a11 = _mm256_set1_pd(km.a11), a12 = _mm256_set1_pd(km.a12);
    const __m256d a21 = _mm256_set1_pd(km.a21), a22 = _mm256_set1_pd(km.a22);
    for (int k = 0; k < int(wmax); ++k) {
        __m256d active = _mm256_cmp_pd(w, _mm256_set1_pd(0.5), _CMP_GT_OQ);
        __m256d n1 = mod1_pd(_mm256_add_pd(_mm256_mul_pd(a11, y1), _mm256_mul_pd(a12, y2)));
        __m256d n2 = mod1_pd(_mm256_add_pd(_mm256_mul_pd(a21, y1), _mm256_mul_pd(a22, y2)));
        y1 = _mm256_blendv_pd(y1, n1, active);
        y2 = _mm256_blendv_pd(y2, n2, active);
        w = _mm256_sub_pd(w, _mm256_and_pd(active, kOnes));
    }
    const __m256d i11 = _mm256_set1_pd(km.i11), i12 = _mm256_set1_pd(km.i12);
    const __m256d i21 = _mm256_set1_pd(km.i21), i22 = _mm256_set1_pd(km.i22);
    for (int k = 0; k > int(wmin); --k) {
        __m256d active = _mm256_cmp_pd(w, _mm256_set1_pd(-0.5), _CMP_LT_OQ);
        __m256d n1 = mod1_pd(_mm256_add_pd(_mm256_mul_pd(i11, y1), _mm256_mul_pd(i12, y2)));
        __m256d n2 = mod1_pd(_mm256_add_pd(_mm256_mul_pd(i21, y1), _mm256_mul_pd(i22, y2)));
        y1 = _mm256_blendv_pd(y1, n1, active);
        y2 = _mm256_blendv_pd(y2, n2, active);
        w = _mm256_add_pd(w, _mm256_and_pd(active, kOnes));
    }
}

}  // namespace

void apply_batch_avx2(const KernelModel& km, const double* y1, const double* y2, const double* t,
                      double* o1, double* o2, double* ot, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vt = _mm256_loadu_pd(t + i);
        __m256d v1 = _mm256_loadu_pd(y1 + i);
        __m256d v2 = _mm256_loadu_pd(y2 + i);
        __m256d tau = roof_tau_pd(km, vt);
        if (km.mode == 1) {
            const __m256d a11 = _mm256_set1_pd(km.a11), a12 = _mm256_set1_pd(km.a12);
            const __m256d a21 = _mm256_set1_pd(km.a21), a22 = _mm256_set1_pd(km.a22);
            __m256d n1 = mod1_pd(_mm256_add_pd(_mm256_mul_pd(a11, v1), _mm256_mul_pd(a12, v2)));
            __m256d n2 = mod1_pd(_mm256_add_pd(_mm256_mul_pd(a21, v1), _mm256_mul_pd(a22, v2)));
            _mm256_storeu_pd(o1 + i, n1);
            _mm256_storeu_pd(o2 + i, n2);
            _mm256_storeu_pd(ot + i, mod1_pd(_mm256_add_pd(vt, tau)));
            continue;
        }
        __m256d u = _mm256_add_pd(vt, tau);
        __m256d nf = _mm256_floor_pd(u);
        wraps_pd(km, v1, v2, nf);
        _mm256_storeu_pd(o1 + i, v1);
        _mm256_storeu_pd(o2 + i, v2);
        _mm256_storeu_pd(ot + i, mod1_pd(_mm256_sub_pd(u, nf)));
    }
    if (i < n) apply_batch_scalar(km, y1 + i, y2 + i, t + i, o1 + i, o2 + i, ot + i, n - i);
}

void flow_batch_avx2(const KernelModel& km, double y1, double y2, double t, const double* s,
                     double* o1, double* o2, double* ot, std::size_t n) {
    if (km.mode == 1) {
        flow_batch_scalar(km, y1, y2, t, s, o1, o2, ot, n);
        return;
    }
    std::size_t i = 0;
    const __m256d vy1 = _mm256_set1_pd(y1), vy2 = _mm256_set1_pd(y2), vt = _mm256_set1_pd(t);
    for (; i + 4 <= n; i += 4) {
        __m256d u = _mm256_add_pd(vt, _mm256_loadu_pd(s + i));
        __m256d nf = _mm256_floor_pd(u);
        __m256d a = vy1, b = vy2;
        wraps_pd(km, a, b, nf);
        _mm256_storeu_pd(o1 + i, a);
        _mm256_storeu_pd(o2 + i, b);
        _mm256_storeu_pd(ot + i, mod1_pd(_mm256_sub_pd(u, nf)));
    }
    if (i < n) flow_batch_scalar(km, y1, y2, t, s + i, o1 + i, o2 + i, ot + i, n - i);
}

}  // namespace anosov::kern

#endif  // ANOSOV_HAVE_AVX2
