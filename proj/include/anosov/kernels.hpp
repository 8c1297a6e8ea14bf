#pragma once

#include <cstddef>
#include <string>

#include "anosov/model.hpp"

namespace anosov::kern {

// Flattened closed-form model for the batch kernels: an integer fiber
// matrix plus a constant or sinusoidal roof. DA suspensions and
// piecewise-linear roofs are evaluated through the scalar model fallback.
struct KernelModel {
    int mode = 0;  // 0: suspension (fiber transported at wraps), 1: product skew
    double a11 = 2, a12 = 1, a21 = 1, a22 = 1;
    double i11 = 1, i12 = -1, i21 = -1, i22 = 2;
    int roof_kind = 0;  // 0: constant, 1: sinusoidal
    double c0 = 1.0;
    double alpha = 0.0;
    double omega = 0.0;  // tau(t) = 1 + alpha * sin(omega * t)
};

bool kernel_supported(const DiscretizedMap& f);
KernelModel kernel_model(const DiscretizedMap& f);

enum class KernelMode { automatic, scalar, avx2 };
KernelMode kernel_mode_from_string(const std::string& s);
void set_kernel_mode(KernelMode m);
KernelMode kernel_mode();
bool cpu_has_avx2();
// Name of the backend batch calls will take ("avx2" or "scalar").
const char* active_kernel_name();

// f applied to each point, SoA layout. Output buffers may alias inputs.
void apply_batch(const KernelModel& km, const double* y1, const double* y2, const double* t,
                 double* o1, double* o2, double* ot, std::size_t n);
// Suspension flow from one base point evaluated at many times (mode 0).
void flow_batch(const KernelModel& km, double y1, double y2, double t, const double* s,
                double* o1, double* o2, double* ot, std::size_t n);

// Reference implementations; always available and bit-identical to the
// pointwise model for supported families.
void apply_batch_scalar(const KernelModel& km, const double* y1, const double* y2,
                        const double* t, double* o1, double* o2, double* ot, std::size_t n);
void flow_batch_scalar(const KernelModel& km, double y1, double y2, double t, const double* s,
                       double* o1, double* o2, double* ot, std::size_t n);

#if defined(ANOSOV_HAVE_AVX2)
void apply_batch_avx2(const KernelModel& km, const double* y1, const double* y2, const double* t,
                      double* o1, double* o2, double* ot, std::size_t n);
void flow_batch_avx2(const KernelModel& km, double y1, double y2, double t, const double* s,
                     double* o1, double* o2, double* ot, std::size_t n);
#endif

// Batch front end over a model: kernel path for closed-form families,
// pointwise fallback otherwise (and always for the inverse).
class BatchEvaluator {
public:
    BatchEvaluator(const DiscretizedMap& f, bool inverse);

    void eval(const double* y1, const double* y2, const double* t, double* o1, double* o2,
              double* ot, std::size_t n) const;
    MappingTorusPoint eval_point(const MappingTorusPoint& p) const;
    const char* backend() const;

private:
    const DiscretizedMap* f_;
    bool inverse_;
    bool kern_ok_;
    KernelModel km_;
};

}  // namespace anosov::kern
