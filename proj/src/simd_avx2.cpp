// Built with -mavx2 -mfma; only reached after a runtime CPU check.
#include "fracheat/simd.hpp"

#if defined(__x86_64__) && defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

#include <cmath>

namespace fracheat::simd {
namespace {

void scale_complex_avx2(std::complex<double>* c, const double* m, std::size_t n) {
    auto* p = reinterpret_cast<double*>(c);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d v = _mm256_loadu_pd(p + 2 * i);
        // (m0, m0, m1, m1)
        __m128d mm = _mm_loadu_pd(m + i);
        __m256d w = _mm256_permute4x64_pd(_mm256_castpd128_pd256(mm), 0x50);
        _mm256_storeu_pd(p + 2 * i, _mm256_mul_pd(v, w));
    }
    for (; i < n; ++i) c[i] *= m[i];
}

void multiply_avx2(double* out, const double* a, const double* b, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) out[i] = a[i] * b[i];
}

double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
        s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), s1);
    }
    double s = hsum(_mm256_add_pd(s0, s1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double sum_avx2(const double* a, std::size_t n) {
    __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        s0 = _mm256_add_pd(s0, _mm256_loadu_pd(a + i));
        s1 = _mm256_add_pd(s1, _mm256_loadu_pd(a + i + 4));
    }
    double s = hsum(_mm256_add_pd(s0, s1));
    for (; i < n; ++i) s += a[i];
    return s;
}

double sum_squares_avx2(const double* a, std::size_t n) {
    __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256d x = _mm256_loadu_pd(a + i), y = _mm256_loadu_pd(a + i + 4);
        s0 = _mm256_fmadd_pd(x, x, s0);
        s1 = _mm256_fmadd_pd(y, y, s1);
    }
    double s = hsum(_mm256_add_pd(s0, s1));
    for (; i < n; ++i) s += a[i] * a[i];
    return s;
}

double max_abs_avx2(const double* a, std::size_t n) {
    const __m256d sign = _mm256_set1_pd(-0.0);
    __m256d m = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) m = _mm256_max_pd(m, _mm256_andnot_pd(sign, _mm256_loadu_pd(a + i)));
    alignas(32) double t[4];
    _mm256_store_pd(t, m);
    double r = std::fmax(std::fmax(t[0], t[1]), std::fmax(t[2], t[3]));
    for (; i < n; ++i) r = std::fmax(r, std::fabs(a[i]));
    return r;
}

const Kernels kAvx2{Isa::avx2, scale_complex_avx2, multiply_avx2,   dot_avx2,
                    sum_avx2,  sum_squares_avx2,   max_abs_avx2};

}  // namespace

namespace detail {
const Kernels* avx2_table() { return &kAvx2; }
}  // namespace detail

}  // namespace fracheat::simd

#else

namespace fracheat::simd::detail {
const Kernels* avx2_table() { return nullptr; }
}  // namespace fracheat::simd::detail

#endif
