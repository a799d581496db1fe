#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "divplan/error.hpp"
#include "divplan/objective.hpp"
#include "divplan/polytope.hpp"
#include "oracles.hpp"

using namespace divplan;

namespace {

std::vector<double> random_simplex(std::size_t n, std::mt19937_64& rng, double low = 0.0) {
    std::uniform_real_distribution<double> u(low, 1.0);
    std::vector<double> v(n);
    double total = 0.0;
    for (auto& x : v) total += x = u(rng);
    for (auto& x : v) x /= total;
    return v;
}

OccupancySet make_set(const MdpModel& m, const std::vector<std::vector<double>>& members) {
    std::vector<OccupancyMeasure> out;
    for (const auto& v : members) out.emplace_back(m.num_states(), m.num_actions(), v);
    return OccupancySet(std::move(out));
}

std::vector<std::vector<double>> random_members(const MdpModel& m, std::size_t k, std::mt19937_64& rng) {
    std::vector<std::vector<double>> members;
    for (std::size_t i = 0; i < k; ++i) {
        members.push_back(oracle::occupancy(m, oracle::random_policy(m.num_states(), m.num_actions(), rng)));
    }
    return members;
}

} // namespace

TEST_SUITE("objective") {

TEST_CASE("kl closed forms") {
    const std::vector<double> p{0.2, 0.3, 0.5};
    CHECK(kl(p, p) == doctest::Approx(0.0).scale(1.0));
    CHECK(kl(std::vector<double>{1, 0}, std::vector<double>{0.5, 0.5}) == doctest::Approx(1.0));
}

TEST_CASE("kl and jsd match direct summation") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 20; ++i) {
        const auto p = random_simplex(9, rng, 0.01);
        const auto q = random_simplex(9, rng, 0.01);
        CHECK(kl(p, q) == doctest::Approx(oracle::kl_bits(p, q)).epsilon(1e-12));
        CHECK(jsd(p, q) == doctest::Approx(oracle::jsd_bits(p, q)).epsilon(1e-12));
    }
}

TEST_CASE("jsd identity, disjoint support and symmetry") {
    std::mt19937_64 rng(4);
    const auto p = random_simplex(6, rng);
    CHECK(jsd(p, p) == doctest::Approx(0.0).scale(1.0));
    CHECK(jsd(std::vector<double>{0.5, 0.5, 0, 0}, std::vector<double>{0, 0, 0.25, 0.75}) == doctest::Approx(1.0));
    for (int i = 0; i < 50; ++i) {
        const auto a = random_simplex(12, rng);
        const auto b = random_simplex(12, rng);
        CHECK(std::abs(jsd(a, b) - jsd(b, a)) <= 1e-15);
        CHECK(jsd(a, b) >= 0.0);
        CHECK(jsd(a, b) <= 1.0);
    }
}

TEST_CASE("cumulative reward and diversity") {
    const auto m = oracle::random_mdp(4, 2, 6);
    std::mt19937_64 rng(6);
    const auto members = random_members(m, 3, rng);

    const auto same = make_set(m, {members[0], members[0], members[0]});
    CHECK(cumulative_reward(same, m) == doctest::Approx(3.0 * average_reward(same[0], m)));
    CHECK(cumulative_diversity(same) == doctest::Approx(0.0).scale(1.0));

    const MdpModel zero(4, 2, std::vector<double>(m.transitions().begin(), m.transitions().end()), std::vector<double>(8, 0.0));
    CHECK(cumulative_reward(make_set(m, members), zero) == 0.0);

    std::vector<std::vector<double>> policies{oracle::random_policy(4, 2, rng), oracle::random_policy(4, 2, rng)};
    const auto pair = make_set(m, {oracle::occupancy(m, policies[0]), oracle::occupancy(m, policies[1])});
    const double expected = oracle::policy_gain(m, policies[0]) + oracle::policy_gain(m, policies[1]);
    CHECK(cumulative_reward(pair, m) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(cumulative_diversity(pair) ==
          doctest::Approx(oracle::jsd_bits(oracle::occupancy(m, policies[0]), oracle::occupancy(m, policies[1]))).epsilon(1e-12));

    const auto triple = make_set(m, members);
    const double three = oracle::jsd_bits(members[0], members[1]) + oracle::jsd_bits(members[0], members[2]) +
                         oracle::jsd_bits(members[1], members[2]);
    CHECK(cumulative_diversity(triple) == doctest::Approx(three).epsilon(1e-12));
    CHECK(average_pairwise_jsd(triple) == doctest::Approx(three / 3.0).epsilon(1e-12));
    const auto matrix = pairwise_jsd(triple);
    CHECK(matrix[0 * 3 + 2] == matrix[2 * 3 + 0]);
    CHECK(matrix[4] == 0.0);
}

TEST_CASE("value matches the term-by-term oracle") {
    const auto m = oracle::random_mdp(5, 3, 9);
    std::mt19937_64 rng(9);
    for (std::size_t k : {1, 2, 3, 5}) {
        const auto members = random_members(m, k, rng);
        const ObjectiveConfig cfg{2.5, k};
        const auto eval = eval_f(make_set(m, members), m, cfg);
        CHECK(eval.value == doctest::Approx(oracle::objective(members, m, 2.5)).epsilon(1e-12));
        CHECK(eval_value(members, m, cfg) == doctest::Approx(eval.value).epsilon(1e-14));
    }
}

TEST_CASE("lambda zero leaves r/k as gradient") {
    const auto m = oracle::random_mdp(4, 2, 12);
    std::mt19937_64 rng(12);
    const auto members = random_members(m, 3, rng);
    const auto eval = eval_f(make_set(m, members), m, {0.0, 3});
    CHECK(eval.value == doctest::Approx(eval.reward_term));
    for (const auto& g : eval.gradient) {
        for (std::size_t x = 0; x < g.size(); ++x) CHECK(g[x] == doctest::Approx(m.rewards()[x] / 3.0));
    }
}

TEST_CASE("identical members have no diversity gradient") {
    const auto m = oracle::random_mdp(4, 2, 13);
    std::mt19937_64 rng(13);
    const auto rho = random_members(m, 1, rng)[0];
    const auto eval = eval_f(make_set(m, {rho, rho}), m, {8.0, 2});
    CHECK(eval.diversity_term == doctest::Approx(0.0).scale(1.0));
    for (const auto& g : eval.gradient) {
        for (std::size_t x = 0; x < g.size(); ++x) CHECK(g[x] == doctest::Approx(m.rewards()[x] / 2.0));
    }
}

TEST_CASE("value is linear in lambda") {
    const auto m = oracle::random_mdp(4, 3, 14);
    std::mt19937_64 rng(14);
    const auto set = make_set(m, random_members(m, 3, rng));
    const double f0 = eval_f(set, m, {0.0, 3}).value;
    const double f1 = eval_f(set, m, {1.0, 3}).value;
    const double f5 = eval_f(set, m, {5.0, 3}).value;
    CHECK(f5 - f0 == doctest::Approx(5.0 * (f1 - f0)).epsilon(1e-12));
}

TEST_CASE("gradient matches central differences") {
    std::mt19937_64 rng(15);
    const double h = 1e-6;
    for (std::size_t k : {2, 3, 4}) {
        const auto m = oracle::random_mdp(4, 3, 100 + k);
        const auto members = random_members(m, k, rng);
        const ObjectiveConfig cfg{8.0, k};
        const auto eval = eval_f(make_set(m, members), m, cfg);
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t x = 0; x < members[i].size(); ++x) {
                auto up = members, down = members;
                up[i][x] += h;
                down[i][x] -= h;
                const double fd = (oracle::objective(up, m, 8.0) - oracle::objective(down, m, 8.0)) / (2 * h);
                CHECK(eval.gradient[i][x] == doctest::Approx(fd).epsilon(1e-5));
            }
        }
    }
}

TEST_CASE("Lipschitz constant formula and domain") {
    CHECK(lipschitz_bound(8.0, 0.01) == doctest::Approx(20200.0));
    CHECK(lipschitz_bound(0.0, 0.2) == 0.0);
    CHECK(lipschitz_bound(1.0, 0.5) == doctest::Approx(1.5));
    CHECK_THROWS_AS(lipschitz_bound(1.0, 0.0), DomainError);
    CHECK_THROWS_AS(lipschitz_bound(1.0, 1.0), DomainError);
}

TEST_CASE("configuration checks") {
    const auto m = oracle::random_mdp(3, 2, 16);
    std::mt19937_64 rng(16);
    const auto set = make_set(m, random_members(m, 2, rng));
    CHECK_THROWS_AS(eval_f(set, m, {1.0, 3}), CardinalityMismatch);
    CHECK_THROWS_AS(ObjectiveConfig({-1.0, 2}).validate(), DomainError);
    CHECK_THROWS_AS(ObjectiveConfig({1.0, 0}).validate(), DomainError);
}

}
