#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "anosov/kernels.hpp"

using namespace anosov;
using namespace anosov::kern;

namespace {

struct Batch {
    std::vector<double> y1, y2, t;
    std::size_t size() const { return t.size(); }
};

Batch random_batch(std::size_t n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Batch b;
    for (std::size_t i = 0; i < n; ++i) {
        b.y1.push_back(u(rng));
        b.y2.push_back(u(rng));
        b.t.push_back(u(rng));
    }
    return b;
}

double quotient_gap(const DiscretizedMap& f, double a1, double a2, double at, double b1,
                    double b2, double bt) {
    return f.quotient_dist({a1, a2, at}, {b1, b2, bt});
}

}  // namespace

TEST_CASE("scalar batch kernel matches the pointwise model exactly") {
    std::vector<DiscretizedMap> models;
    models.push_back(DiscretizedMap::make_cat_suspension(
        ToralAutomorphism::from_entries(2, 1, 1, 1), RoofDiscretization::sinusoidal(0.05, 2)));
    models.push_back(DiscretizedMap::make_cat_suspension(
        ToralAutomorphism::from_entries(2, 1, 1, 1), RoofDiscretization::constant(2.5)));
    models.push_back(DiscretizedMap::make_product_skew(
        ToralAutomorphism::from_entries(2, 1, 1, 1), RoofDiscretization::sinusoidal(0.05, 3)));
    for (const auto& f : models) {
        auto km = kernel_model(f);
        auto b = random_batch(4096, 42);
        std::vector<double> o1(b.size()), o2(b.size()), ot(b.size());
        apply_batch_scalar(km, b.y1.data(), b.y2.data(), b.t.data(), o1.data(), o2.data(),
                           ot.data(), b.size());
        for (std::size_t i = 0; i < b.size(); ++i) {
            auto q = f.apply({b.y1[i], b.y2[i], b.t[i]});
            CHECK(o1[i] == q.y1);
            CHECK(o2[i] == q.y2);
            CHECK(ot[i] == q.t);
        }
    }
}

#if defined(ANOSOV_HAVE_AVX2)

TEST_CASE("avx2 apply kernel is equivalent to the scalar reference") {
    if (!cpu_has_avx2()) {
        MESSAGE("cpu lacks AVX2, skipping");
        return;
    }
    std::vector<DiscretizedMap> models;
    for (int k : {1, 2, 3, 8})
        models.push_back(DiscretizedMap::make_cat_suspension(
            ToralAutomorphism::from_entries(2, 1, 1, 1),
            RoofDiscretization::sinusoidal(0.04 / k, k)));
    models.push_back(DiscretizedMap::make_cat_suspension(
        ToralAutomorphism::from_entries(2, 1, 1, 1), RoofDiscretization::constant(0.7)));
    models.push_back(DiscretizedMap::make_cat_suspension(
        ToralAutomorphism::from_entries(3, 2, 1, 1), RoofDiscretization::constant(2.5)));
    models.push_back(DiscretizedMap::make_product_skew(
        ToralAutomorphism::from_entries(2, 1, 1, 1), RoofDiscretization::sinusoidal(0.05, 2)));

    for (const auto& f : models) {
        auto km = kernel_model(f);
        auto b = random_batch(100000, 7);
        std::size_t n = b.size();
        std::vector<double> s1(n), s2(n), st(n), v1(n), v2(n), vt(n);
        apply_batch_scalar(km, b.y1.data(), b.y2.data(), b.t.data(), s1.data(), s2.data(),
                           st.data(), n);
        apply_batch_avx2(km, b.y1.data(), b.y2.data(), b.t.data(), v1.data(), v2.data(),
                         vt.data(), n);
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            worst = std::max(worst, quotient_gap(f, s1[i], s2[i], st[i], v1[i], v2[i], vt[i]));
        CHECK(worst < 1e-13);
    }
}

TEST_CASE("avx2 flow kernel is equivalent to the scalar reference") {
    if (!cpu_has_avx2()) {
        MESSAGE("cpu lacks AVX2, skipping");
        return;
    }
    auto f = DiscretizedMap::make_cat_suspension(ToralAutomorphism::from_entries(2, 1, 1, 1),
                                                 RoofDiscretization::sinusoidal(0.05, 2));
    auto km = kernel_model(f);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> uu(0.0, 1.0), us(-6.0, 6.0);
    for (int rep = 0; rep < 20; ++rep) {
        double y1 = uu(rng), y2 = uu(rng), t = uu(rng);
        std::size_t n = 1000;
        std::vector<double> s(n), a1(n), a2(n), at(n), b1(n), b2(n), bt(n);
        for (auto& x : s) x = us(rng);
        flow_batch_scalar(km, y1, y2, t, s.data(), a1.data(), a2.data(), at.data(), n);
        flow_batch_avx2(km, y1, y2, t, s.data(), b1.data(), b2.data(), bt.data(), n);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(quotient_gap(f, a1[i], a2[i], at[i], b1[i], b2[i], bt[i]) < 1e-13);
        // Spot-check against the pointwise flow.
        for (std::size_t i = 0; i < n; i += 97) {
            auto q = suspension_flow(f.base(), {y1, y2, t}, s[i]);
            CHECK(quotient_gap(f, a1[i], a2[i], at[i], q.y1, q.y2, q.t) < 1e-12);
        }
    }
}

TEST_CASE("avx2 kernels are deterministic run to run") {
    if (!cpu_has_avx2()) return;
    auto f = DiscretizedMap::make_cat_suspension(ToralAutomorphism::from_entries(2, 1, 1, 1),
                                                 RoofDiscretization::sinusoidal(0.05, 2));
    auto km = kernel_model(f);
    auto b = random_batch(10000, 3);
    std::size_t n = b.size();
    std::vector<double> a1(n), a2(n), at(n), b1(n), b2(n), bt(n);
    apply_batch_avx2(km, b.y1.data(), b.y2.data(), b.t.data(), a1.data(), a2.data(), at.data(), n);
    apply_batch_avx2(km, b.y1.data(), b.y2.data(), b.t.data(), b1.data(), b2.data(), bt.data(), n);
    CHECK(a1 == b1);
    CHECK(a2 == b2);
    CHECK(at == bt);
}

#endif  // ANOSOV_HAVE_AVX2

TEST_CASE("kernel dispatch honors the forced mode") {
    set_kernel_mode(KernelMode::scalar);
    CHECK(std::string(active_kernel_name()) == "scalar");
    set_kernel_mode(KernelMode::automatic);
#if defined(ANOSOV_HAVE_AVX2)
    if (cpu_has_avx2()) CHECK(std::string(active_kernel_name()) == "avx2");
#endif
}

TEST_CASE("unsupported models fall back to the pointwise path") {
    auto f = DiscretizedMap::make_da_suspension(ToralAutomorphism::from_entries(2, 1, 1, 1),
                                                RoofDiscretization::sinusoidal(0.05, 2),
                                                DAMapSpec{});
    CHECK(!kernel_supported(f));
    BatchEvaluator ev(f, false);
    CHECK(std::string(ev.backend()) == "model");
    auto b = random_batch(64, 21);
    std::size_t n = b.size();
    std::vector<double> o1(n), o2(n), ot(n);
    ev.eval(b.y1.data(), b.y2.data(), b.t.data(), o1.data(), o2.data(), ot.data(), n);
    for (std::size_t i = 0; i < n; ++i) {
        auto q = f.apply({b.y1[i], b.y2[i], b.t[i]});
        CHECK(o1[i] == q.y1);
        CHECK(ot[i] == q.t);
    }
}
