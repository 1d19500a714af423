#include "fracheat/simd.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

#include <cmath>

namespace fracheat::simd {
namespace {

void scale_complex_neon(std::complex<double>* c, const double* m, std::size_t n) {
    auto* p = reinterpret_cast<double*>(c);
    for (std::size_t i = 0; i < n; ++i) {
        float64x2_t v = vld1q_f64(p + 2 * i);
        vst1q_f64(p + 2 * i, vmulq_n_f64(v, m[i]));
    }
}

void multiply_neon(double* out, const double* a, const double* b, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    for (; i < n; ++i) out[i] = a[i] * b[i];
}

double dot_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t s0 = vdupq_n_f64(0.0), s1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 = vfmaq_f64(s0, vld1q_f64(a + i), vld1q_f64(b + i));
        s1 = vfmaq_f64(s1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    }
    double s = vaddvq_f64(vaddq_f64(s0, s1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double sum_neon(const double* a, std::size_t n) {
    float64x2_t s0 = vdupq_n_f64(0.0), s1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 = vaddq_f64(s0, vld1q_f64(a + i));
        s1 = vaddq_f64(s1, vld1q_f64(a + i + 2));
    }
    double s = vaddvq_f64(vaddq_f64(s0, s1));
    for (; i < n; ++i) s += a[i];
    return s;
}

double sum_squares_neon(const double* a, std::size_t n) { return dot_neon(a, a, n); }

double max_abs_neon(const double* a, std::size_t n) {
    float64x2_t m = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) m = vmaxq_f64(m, vabsq_f64(vld1q_f64(a + i)));
    double r = vmaxvq_f64(m);
    for (; i < n; ++i) r = std::fmax(r, std::fabs(a[i]));
    return r;
}

const Kernels kNeon{Isa::neon, scale_complex_neon, multiply_neon, dot_neon,
                    sum_neon,  sum_squares_neon,   max_abs_neon};

}  // namespace

namespace detail {
const Kernels* neon_table() { return &kNeon; }
}  // namespace detail

}  // namespace fracheat::simd

#else

namespace fracheat::simd::detail {
const Kernels* neon_table() { return nullptr; }
}  // namespace fracheat::simd::detail

#endif
