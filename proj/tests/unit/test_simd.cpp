#include <random>
#include <vector>

#include <doctest.h>

#include "divplan/simd/kernels.hpp"

namespace simd = divplan::simd;

namespace {

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

} // namespace

TEST_SUITE("simd") {

TEST_CASE("avx2 kernels agree with the scalar reference") {
    const auto* fast = simd::avx2_kernels();
    if (fast == nullptr) {
        MESSAGE("AVX2 variant unavailable on this machine");
        return;
    }
    const auto& ref = simd::scalar_kernels();
    std::mt19937_64 rng(11);
    // Lengths straddle the 4- and 16-wide unrolled bodies and their tails.
    for (std::size_t n : {0, 1, 3, 4, 5, 7, 8, 15, 16, 17, 31, 33, 64, 127, 1000, 1805}) {
        CAPTURE(n);
        const auto x = random_vector(n, rng);
        const auto y = random_vector(n, rng);
        const double scale = 1.0 + static_cast<double>(n);

        CHECK(fast->dot(x.data(), y.data(), n) == doctest::Approx(ref.dot(x.data(), y.data(), n)).epsilon(1e-13).scale(scale));
        CHECK(fast->sum(x.data(), n) == doctest::Approx(ref.sum(x.data(), n)).epsilon(1e-13).scale(scale));
        CHECK(fast->squared_distance(x.data(), y.data(), n) ==
              doctest::Approx(ref.squared_distance(x.data(), y.data(), n)).epsilon(1e-13).scale(scale));

        auto ya = y, yb = y;
        fast->axpy(0.37, x.data(), ya.data(), n);
        ref.axpy(0.37, x.data(), yb.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(ya[i] == doctest::Approx(yb[i]).epsilon(1e-15).scale(1.0));

        std::vector<double> la(n), lb(n);
        fast->lerp(x.data(), y.data(), 0.25, la.data(), n);
        ref.lerp(x.data(), y.data(), 0.25, lb.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(la[i] == doctest::Approx(lb[i]).epsilon(1e-15).scale(1.0));
    }
}

TEST_CASE("scalar kernels on hand-computed inputs") {
    const auto& k = simd::scalar_kernels();
    const double x[] = {1, 2, 3, 4, 5};
    const double y[] = {5, 4, 3, 2, 1};
    CHECK(k.dot(x, y, 5) == 35.0);
    CHECK(k.sum(x, 5) == 15.0);
    CHECK(k.squared_distance(x, y, 5) == 40.0);
    double out[5];
    k.lerp(x, y, 0.5, out, 5);
    for (double v : out) CHECK(v == 3.0);
}

TEST_CASE("forcing the scalar path changes the active table") {
    const auto before = simd::active().isa;
    simd::force_isa(simd::Isa::kScalar);
    CHECK(simd::active().isa == simd::Isa::kScalar);
    CHECK(simd::isa_name(simd::Isa::kScalar) == "scalar");
    simd::force_isa(before);
}

}
