#include "kernels_internal.hpp"

#include <atomic>
#include <cstdlib>
#include <string_view>

namespace divplan::simd {
namespace {

bool cpu_has_avx2() {
#if defined(DIVPLAN_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelTable* detect() {
    if (const char* env = std::getenv("DIVPLAN_SIMD"); env && std::string_view(env) == "scalar") {
        return &detail::kScalarTable;
    }
    if (const KernelTable* t = avx2_kernels()) return t;
    return &detail::kScalarTable;
}

std::atomic<const KernelTable*>& selected() {
    static std::atomic<const KernelTable*> table{detect()};
    return table;
}

} // namespace

std::string_view isa_name(Isa isa) {
    switch (isa) {
        case Isa::kScalar: return "scalar";
        case Isa::kAvx2: return "avx2";
    }
    return "unknown";
}

const KernelTable& scalar_kernels() { return detail::kScalarTable; }

const KernelTable* avx2_kernels() {
#if defined(DIVPLAN_HAVE_AVX2)
    static const bool supported = cpu_has_avx2();
    return supported ? &detail::kAvx2Table : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable& active() { return *selected().load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
    const KernelTable* t = isa == Isa::kAvx2 ? avx2_kernels() : &detail::kScalarTable;
    if (t == nullptr) t = &detail::kScalarTable;
    selected().store(t, std::memory_order_relaxed);
}

} // namespace divplan::simd
