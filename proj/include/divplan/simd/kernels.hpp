#pragma once

// Dense double-precision kernels used by the simplex basis updates and the
// solver iterate arithmetic. Each kernel has a portable scalar reference
// and, on x86-64, an AVX2+FMA variant. The variant is picked once at first
// use from CPUID; DIVPLAN_SIMD=scalar in the environment forces the
// reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace divplan::simd {

enum class Isa { kScalar, kAvx2 };

std::string_view isa_name(Isa isa);

struct KernelTable {
    Isa isa;
    double (*dot)(const double* x, const double* y, std::size_t n);
    // y += alpha * x
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    double (*squared_distance)(const double* x, const double* y, std::size_t n);
    double (*sum)(const double* x, std::size_t n);
    // out = x + alpha * (y - x)
    void (*lerp)(const double* x, const double* y, double alpha, double* out, std::size_t n);
};

const KernelTable& scalar_kernels();

/// nullptr when the variant was not compiled in or the CPU lacks AVX2/FMA.
const KernelTable* avx2_kernels();

/// Kernel table selected for this process.
const KernelTable& active();

/// Override the process-wide selection (tests and benchmarking only).
void force_isa(Isa isa);

inline double dot(std::span<const double> x, std::span<const double> y) {
    return active().dot(x.data(), y.data(), x.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    active().axpy(alpha, x.data(), y.data(), x.size());
}

inline double squared_distance(std::span<const double> x, std::span<const double> y) {
    return active().squared_distance(x.data(), y.data(), x.size());
}

inline double sum(std::span<const double> x) { return active().sum(x.data(), x.size()); }

inline void lerp(std::span<const double> x, std::span<const double> y, double alpha,
                 std::span<double> out) {
    active().lerp(x.data(), y.data(), alpha, out.data(), x.size());
}

} // namespace divplan::simd
