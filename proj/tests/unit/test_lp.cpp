#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include <doctest.h>

#include "divplan/error.hpp"
#include "divplan/gridworld.hpp"
#include "divplan/objective.hpp"
#include "divplan/polytope.hpp"
#include "oracles.hpp"

using namespace divplan;

namespace {

// Best objective over all basic feasible solutions of {A x = b, x >= l},
// found by trying every choice of num_rows basic columns.
double enumerate_vertices(const PolytopeSpec& spec, const std::vector<double>& c, bool maximize,
                          std::vector<double>* arg = nullptr) {
    const std::size_t m = spec.num_rows, n = spec.num_cols;
    std::vector<double> shifted_b = spec.equality_rhs;
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t j = 0; j < n; ++j) shifted_b[r] -= spec.equality_matrix[r * n + j] * spec.lower_bounds[j];
    }
    double best = maximize ? -INFINITY : INFINITY;
    std::vector<std::size_t> cols(m);
    for (std::size_t i = 0; i < m; ++i) cols[i] = i;
    while (true) {
        std::vector<double> basis(m * m);
        for (std::size_t r = 0; r < m; ++r) {
            for (std::size_t i = 0; i < m; ++i) basis[r * m + i] = spec.equality_matrix[r * n + cols[i]];
        }
        try {
            const auto xb = oracle::solve_dense(basis, shifted_b);
            if (std::all_of(xb.begin(), xb.end(), [](double v) { return v >= -1e-12; })) {
                std::vector<double> x = spec.lower_bounds;
                for (std::size_t i = 0; i < m; ++i) x[cols[i]] += xb[i];
                double v = 0.0;
                for (std::size_t j = 0; j < n; ++j) v += c[j] * x[j];
                if (maximize ? v > best : v < best) {
                    best = v;
                    if (arg) *arg = x;
                }
            }
        } catch (const std::runtime_error&) {
        }
        std::size_t i = m;
        while (i > 0 && cols[i - 1] == n - m + i - 1) --i;
        if (i == 0) break;
        ++cols[i - 1];
        for (std::size_t j = i; j < m; ++j) cols[j] = cols[j - 1] + 1;
    }
    return best;
}

std::vector<double> random_objective(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    std::vector<double> c(n);
    for (auto& v : c) v = g(rng);
    return c;
}

} // namespace

TEST_SUITE("lp") {

TEST_CASE("single-action cycle leaves one feasible point") {
    MdpModel m(2, 1, {0, 1, 1, 0}, {1, 0});
    const auto spec = build_polytope(m);
    for (auto sense : {Sense::kMaximize, Sense::kMinimize}) {
        const auto sol = solve_lp(spec, std::vector<double>{1.0, -2.0}, sense);
        REQUIRE(sol.status == LpStatus::kOptimal);
        CHECK(sol.point[0] == doctest::Approx(0.5));
        CHECK(sol.point[1] == doctest::Approx(0.5));
    }
    const auto opt = optimal_policy_lp(m);
    CHECK(opt.value == doctest::Approx(0.5));
}

TEST_CASE("single action per state gives the stationary distribution") {
    const auto m = oracle::random_mdp(6, 1, 3);
    const auto ref = oracle::stationary(m, std::vector<double>(6, 1.0));
    const auto opt = optimal_policy_lp(m);
    for (std::size_t s = 0; s < 6; ++s) CHECK(opt.rho(s, 0) == doctest::Approx(ref[s]).epsilon(1e-9));
}

TEST_CASE("floor feasibility") {
    const auto m = oracle::random_mdp(3, 2, 1);
    CHECK_THROWS_AS(build_polytope(m, 1.0 / 6.0 + 1e-3), FloorInfeasible);
    CHECK_THROWS_AS(build_polytope(m, -0.1), DomainError);
    const auto spec = build_polytope(m, 0.05);
    const auto sol = solve_lp(spec, std::vector<double>(m.rewards().begin(), m.rewards().end()), Sense::kMaximize);
    REQUIRE(sol.status == LpStatus::kOptimal);
    for (double v : sol.point) CHECK(v >= 0.05 - 1e-12);
    const double ref = enumerate_vertices(spec, std::vector<double>(m.rewards().begin(), m.rewards().end()), true);
    CHECK(sol.objective_value == doctest::Approx(ref).epsilon(1e-9));
}

TEST_CASE("zero objective returns a feasible vertex with value 0") {
    const auto m = oracle::random_mdp(4, 3, 2);
    const auto spec = build_polytope(m);
    const auto sol = solve_lp(spec, std::vector<double>(12, 0.0), Sense::kMaximize);
    REQUIRE(sol.status == LpStatus::kOptimal);
    CHECK(sol.objective_value == 0.0);
    const auto res = polytope_residuals(spec, sol.point);
    CHECK(res.equality < 1e-10);
    CHECK(res.bound > -1e-12);
}

TEST_CASE("maximizing one coordinate finds the enumerated vertex") {
    MdpModel m(2, 2, {0.9, 0.1, 0.2, 0.8, 0.5, 0.5, 0.0, 1.0}, {0, 0, 0, 0});
    const auto spec = build_polytope(m);
    const std::vector<double> c{1, 0, 0, 0};
    std::vector<double> arg;
    const double best = enumerate_vertices(spec, c, true, &arg);
    const auto sol = solve_lp(spec, c, Sense::kMaximize);
    REQUIRE(sol.status == LpStatus::kOptimal);
    CHECK(sol.objective_value == doctest::Approx(best).epsilon(1e-12));
    for (std::size_t j = 0; j < 4; ++j) CHECK(sol.point[j] == doctest::Approx(arg[j]).epsilon(1e-12));
}

TEST_CASE("random objectives match vertex enumeration in both senses") {
    std::mt19937_64 rng(77);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const std::size_t ns = 2 + seed % 3, na = 1 + seed % 3;
        const auto m = oracle::random_mdp(ns, na, seed);
        const auto spec = build_polytope(m);
        const auto c = random_objective(m.num_pairs(), rng);
        for (bool maximize : {true, false}) {
            const auto sol = solve_lp(spec, c, maximize ? Sense::kMaximize : Sense::kMinimize);
            REQUIRE(sol.status == LpStatus::kOptimal);
            CHECK(sol.objective_value == doctest::Approx(enumerate_vertices(spec, c, maximize)).epsilon(1e-9));
            // A basic solution has at most num_rows nonzero coordinates.
            const auto nonzero = std::count_if(sol.point.begin(), sol.point.end(), [](double v) { return v > 1e-12; });
            CHECK(static_cast<std::size_t>(nonzero) <= spec.num_rows);
        }
    }
}

TEST_CASE("optimal policy value equals the best deterministic policy") {
    for (std::uint64_t seed = 100; seed < 120; ++seed) {
        const auto m = oracle::random_mdp(2 + seed % 4, 2 + seed % 2, seed);
        const auto opt = optimal_policy_lp(m);
        CHECK(opt.value == doctest::Approx(oracle::best_deterministic_gain(m)).epsilon(1e-9));
        CHECK(occupancy_residuals(opt.rho, m).feasible());
    }
}

TEST_CASE("warm-started solves match cold solves") {
    const auto world = grid::generate(grid::Layout::kFourRoom, 3, 0.95);
    const auto spec = build_polytope(world.mdp);
    SimplexSolver warm(spec);
    REQUIRE(warm.ensure_feasible_basis());
    std::mt19937_64 rng(4);
    for (int i = 0; i < 4; ++i) {
        const auto c = random_objective(spec.num_cols, rng);
        const auto a = warm.solve(c, Sense::kMaximize);
        const auto b = solve_lp(spec, c, Sense::kMaximize);
        REQUIRE(a.status == LpStatus::kOptimal);
        REQUIRE(b.status == LpStatus::kOptimal);
        CHECK(a.objective_value == doctest::Approx(b.objective_value).epsilon(1e-8));
        CHECK(polytope_residuals(spec, a.point).equality < 1e-9);
    }
}

TEST_CASE("four-room optimum is solvable and deterministic") {
    const auto world = grid::generate(grid::Layout::kFourRoom, 0, 0.95);
    const auto a = optimal_policy_lp(world.mdp);
    const auto b = optimal_policy_lp(world.mdp);
    CHECK(a.value > 0.0);
    CHECK(a.value == b.value);
    CHECK(occupancy_residuals(a.rho, world.mdp).feasible());
}

TEST_CASE("random feasible samples") {
    const auto world = grid::generate(grid::Layout::kNineRoom, 2, 0.95);
    const auto a = sample_feasible(world.mdp, 5);
    const auto b = sample_feasible(world.mdp, 5);
    const auto c = sample_feasible(world.mdp, 6);
    CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
    CHECK(jsd(a.values(), c.values()) > 0.0);
    const auto res = occupancy_residuals(a, world.mdp);
    CHECK(res.balance_residual < 1e-7);
    CHECK(res.mass_error < 1e-7);
    CHECK(res.min_value >= 0.0);
}

TEST_CASE("polytope dump layout") {
    MdpModel m(2, 1, {0, 1, 1, 0}, {0, 0});
    std::ostringstream os;
    write_polytope(os, build_polytope(m, 0.1));
    const auto text = os.str();
    CHECK(text.rfind("polytope 2 2\n", 0) == 0);
    CHECK(text.find("matrix") != std::string::npos);
    CHECK(text.find("rhs") != std::string::npos);
    CHECK(text.find("lower_bounds\n0.10000000000000001 0.10000000000000001") != std::string::npos);
}

}
