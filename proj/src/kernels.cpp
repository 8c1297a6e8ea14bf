#include "anosov/kernels.hpp"

#include <atomic>

#include "anosov/errors.hpp"

namespace anosov::kern {

namespace {
std::atomic<KernelMode> g_mode{KernelMode::automatic};
constexpr double two_pi = 6.283185307179586476925286766559;
}

KernelMode kernel_mode_from_string(const std::string& s) {
    if (s == "auto" || s == "automatic") return KernelMode::automatic;
    if (s == "scalar") return KernelMode::scalar;
    if (s == "avx2") return KernelMode::avx2;
    throw ConfigError("unknown kernel mode '" + s + "' (expected auto|scalar|avx2)");
}

void set_kernel_mode(KernelMode m) {
#if !defined(ANOSOV_HAVE_AVX2)
    if (m == KernelMode::avx2) throw ConfigError("avx2 kernel not available in this build");
#else
    if (m == KernelMode::avx2 && !cpu_has_avx2())
        throw ConfigError("avx2 kernel requested but the CPU does not support AVX2");
#endif
    g_mode.store(m);
}

KernelMode kernel_mode() { return g_mode.load(); }

bool cpu_has_avx2() {
#if defined(ANOSOV_HAVE_AVX2)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

namespace {
bool use_avx2() {
    KernelMode m = g_mode.load();
    if (m == KernelMode::scalar) return false;
#if defined(ANOSOV_HAVE_AVX2)
    if (m == KernelMode::avx2) return true;
    return cpu_has_avx2();
#else
    return false;
#endif
}
}  // namespace

const char* active_kernel_name() { return use_avx2() ? "avx2" : "scalar"; }

bool kernel_supported(const DiscretizedMap& f) {
    if (f.family() == Family::da_suspension) return false;
    const auto& roof = f.roof();
    if (roof.kind == RoofDiscretization::Kind::piecewise_linear) return false;
    if (roof.kind == RoofDiscretization::Kind::sinusoidal && roof.k > 32) return false;
    return true;
}

KernelModel kernel_model(const DiscretizedMap& f) {
    if (!kernel_supported(f))
        throw ModelError("no batch kernel for this model; use the pointwise fallback");
    KernelModel km;
    km.mode = (f.family() == Family::product_skew) ? 1 : 0;
    const auto& m = f.base().m;
    const auto& mi = f.base().m_inv;
    km.a11 = double(m[0][0]);
    km.a12 = double(m[0][1]);
    km.a21 = double(m[1][0]);
    km.a22 = double(m[1][1]);
    km.i11 = double(mi[0][0]);
    km.i12 = double(mi[0][1]);
    km.i21 = double(mi[1][0]);
    km.i22 = double(mi[1][1]);
    const auto& roof = f.roof();
    if (roof.kind == RoofDiscretization::Kind::constant) {
        km.roof_kind = 0;
        km.c0 = roof.c;
    } else {
        km.roof_kind = 1;
        km.alpha = roof.alpha;
        km.omega = two_pi * double(roof.k);
    }
    return km;
}

void apply_batch(const KernelModel& km, const double* y1, const double* y2, const double* t,
                 double* o1, double* o2, double* ot, std::size_t n) {
#if defined(ANOSOV_HAVE_AVX2)
    if (use_avx2()) {
        apply_batch_avx2(km, y1, y2, t, o1, o2, ot, n);
        return;
    }
#endif
    apply_batch_scalar(km, y1, y2, t, o1, o2, ot, n);
}

void flow_batch(const KernelModel& km, double y1, double y2, double t, const double* s,
                double* o1, double* o2, double* ot, std::size_t n) {
#if defined(ANOSOV_HAVE_AVX2)
    if (use_avx2()) {
        flow_batch_avx2(km, y1, y2, t, s, o1, o2, ot, n);
        return;
    }
#endif
    flow_batch_scalar(km, y1, y2, t, s, o1, o2, ot, n);
}

BatchEvaluator::BatchEvaluator(const DiscretizedMap& f, bool inverse)
    : f_(&f), inverse_(inverse), kern_ok_(!inverse && kernel_supported(f)) {
    if (kern_ok_) km_ = kernel_model(f);
}

void BatchEvaluator::eval(const double* y1, const double* y2, const double* t, double* o1,
                          double* o2, double* ot, std::size_t n) const {
    if (kern_ok_) {
        apply_batch(km_, y1, y2, t, o1, o2, ot, n);
        return;
    }
    for (std::size_t i = 0; i < n; ++i) {
        MappingTorusPoint p{y1[i], y2[i], t[i]};
        MappingTorusPoint q = inverse_ ? f_->apply_inverse(p) : f_->apply(p);
        o1[i] = q.y1;
        o2[i] = q.y2;
        ot[i] = q.t;
    }
}

MappingTorusPoint BatchEvaluator::eval_point(const MappingTorusPoint& p) const {
    return inverse_ ? f_->apply_inverse(p) : f_->apply(p);
}

const char* BatchEvaluator::backend() const {
    return kern_ok_ ? active_kernel_name() : "model";
}

}  // namespace anosov::kern
