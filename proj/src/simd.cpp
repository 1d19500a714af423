#include "fracheat/simd.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>

namespace fracheat::simd {

namespace detail {
const Kernels* avx2_table();
const Kernels* neon_table();
}  // namespace detail

namespace {

void scale_complex_scalar(std::complex<double>* c, const double* m, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) c[i] *= m[i];
}

void multiply_scalar(double* out, const double* a, const double* b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double sum_scalar(const double* a, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i];
    return s;
}

double sum_squares_scalar(const double* a, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * a[i];
    return s;
}

double max_abs_scalar(const double* a, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::fmax(m, std::fabs(a[i]));
    return m;
}

const Kernels kScalar{Isa::scalar,    scale_complex_scalar, multiply_scalar, dot_scalar,
                      sum_scalar,     sum_squares_scalar,   max_abs_scalar};

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const Kernels& select() {
    const char* env = std::getenv("FRACHEAT_SIMD");
    if (env && std::strcmp(env, "scalar") == 0) return kScalar;
    if (env && std::strcmp(env, "neon") == 0 && neon_kernels()) return *neon_kernels();
    if (avx2_kernels()) return *avx2_kernels();
    if (neon_kernels()) return *neon_kernels();
    return kScalar;
}

}  // namespace

const Kernels& scalar_kernels() { return kScalar; }

const Kernels* avx2_kernels() {
    static const Kernels* k = cpu_has_avx2() ? detail::avx2_table() : nullptr;
    return k;
}

const Kernels* neon_kernels() { return detail::neon_table(); }

const Kernels& active() {
    static const Kernels& k = select();
    return k;
}

const char* isa_name(Isa isa) {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
        case Isa::neon: return "neon";
    }
    return "?";
}

}  // namespace fracheat::simd
