#pragma once

#include <complex>
#include <cstddef>

// Hot loops shared by the spectral code. Each table entry has a scalar
// reference implementation; vector variants must agree with it (bit-exact for
// elementwise ops, to rounding for reductions).
namespace fracheat::simd {

enum class Isa { scalar, avx2, neon };

struct Kernels {
    Isa isa;
    // c[i] *= m[i]
    void (*scale_complex)(std::complex<double>* c, const double* m, std::size_t n);
    // out[i] = a[i] * b[i]
    void (*multiply)(double* out, const double* a, const double* b, std::size_t n);
    double (*dot)(const double* a, const double* b, std::size_t n);
    double (*sum)(const double* a, std::size_t n);
    double (*sum_squares)(const double* a, std::size_t n);
    double (*max_abs)(const double* a, std::size_t n);
};

const Kernels& scalar_kernels();
// nullptr when the variant is not compiled in or the CPU lacks it.
const Kernels* avx2_kernels();
const Kernels* neon_kernels();

// Chosen once per process: best available, overridable with
// FRACHEAT_SIMD=scalar|avx2|neon.
const Kernels& active();

const char* isa_name(Isa isa);

}  // namespace fracheat::simd
