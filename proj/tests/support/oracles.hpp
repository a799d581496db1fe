#pragma once

// Reference computations for the tests. Everything here is written from
// scratch against plain vectors so it shares no code path with the library.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "divplan/mdp.hpp"

namespace oracle {

/// Random MDP whose every transition row has full support, hence unichain.
inline divplan::MdpModel random_mdp(std::size_t ns, std::size_t na, std::uint64_t seed,
                                    double reward_scale = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    std::uniform_real_distribution<double> r(-reward_scale, reward_scale);
    std::vector<double> p(ns * na * ns);
    std::vector<double> rew(ns * na);
    for (std::size_t row = 0; row < ns * na; ++row) {
        double total = 0.0;
        for (std::size_t j = 0; j < ns; ++j) total += p[row * ns + j] = u(rng);
        for (std::size_t j = 0; j < ns; ++j) p[row * ns + j] /= total;
        rew[row] = r(rng);
    }
    return divplan::MdpModel(ns, na, std::move(p), std::move(rew));
}

/// Gaussian elimination with partial pivoting on a dense n x n system.
inline std::vector<double> solve_dense(std::vector<double> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r) {
            if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
        }
        if (std::abs(a[piv * n + c]) < 1e-14) throw std::runtime_error("singular system");
        for (std::size_t j = 0; j < n; ++j) std::swap(a[c * n + j], a[piv * n + j]);
        std::swap(b[c], b[piv]);
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = a[r * n + c] / a[c * n + c];
            for (std::size_t j = c; j < n; ++j) a[r * n + j] -= f * a[c * n + j];
            b[r] -= f * b[c];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= a[i * n + j] * x[j];
        x[i] = s / a[i * n + i];
    }
    return x;
}

/// mu P_pi = mu, sum mu = 1, solved with the last balance equation replaced
/// by normalization. The chain must be unichain.
inline std::vector<double> stationary(const divplan::MdpModel& m, const std::vector<double>& policy) {
    const std::size_t ns = m.num_states(), na = m.num_actions();
    std::vector<double> a(ns * ns, 0.0), b(ns, 0.0);
    // Row j: sum_s mu_s P_pi(j|s) - mu_j = 0.
    for (std::size_t j = 0; j < ns; ++j) {
        for (std::size_t s = 0; s < ns; ++s) {
            double pj = 0.0;
            for (std::size_t act = 0; act < na; ++act) pj += policy[s * na + act] * m.transition(s, act, j);
            a[j * ns + s] = pj - (s == j ? 1.0 : 0.0);
        }
    }
    for (std::size_t s = 0; s < ns; ++s) a[(ns - 1) * ns + s] = 1.0;
    b[ns - 1] = 1.0;
    return solve_dense(a, b);
}

inline double policy_gain(const divplan::MdpModel& m, const std::vector<double>& policy) {
    const auto mu = stationary(m, policy);
    double g = 0.0;
    for (std::size_t s = 0; s < m.num_states(); ++s) {
        for (std::size_t a = 0; a < m.num_actions(); ++a) g += mu[s] * policy[s * m.num_actions() + a] * m.reward(s, a);
    }
    return g;
}

/// Best long-run average reward over all A^S deterministic policies.
inline double best_deterministic_gain(const divplan::MdpModel& m) {
    const std::size_t ns = m.num_states(), na = m.num_actions();
    std::vector<std::size_t> choice(ns, 0);
    double best = -INFINITY;
    while (true) {
        std::vector<double> policy(ns * na, 0.0);
        for (std::size_t s = 0; s < ns; ++s) policy[s * na + choice[s]] = 1.0;
        best = std::max(best, policy_gain(m, policy));
        std::size_t s = 0;
        while (s < ns && ++choice[s] == na) choice[s++] = 0;
        if (s == ns) break;
    }
    return best;
}

/// Empirical (s,a) visit frequencies of a simulated trajectory.
inline std::vector<double> simulate_visits(const divplan::MdpModel& m, const std::vector<double>& policy,
                                           std::size_t steps, std::uint64_t seed) {
    const std::size_t ns = m.num_states(), na = m.num_actions();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto draw = [&](const double* probs, std::size_t n) {
        double x = u(rng), acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            acc += probs[i];
            if (x < acc) return i;
        }
        return n - 1;
    };
    std::vector<double> counts(ns * na, 0.0);
    std::size_t s = 0;
    for (std::size_t t = 0; t < steps; ++t) {
        const std::size_t a = draw(&policy[s * na], na);
        counts[s * na + a] += 1.0;
        std::vector<double> row(ns);
        for (std::size_t j = 0; j < ns; ++j) row[j] = m.transition(s, a, j);
        s = draw(row.data(), ns);
    }
    for (auto& c : counts) c /= static_cast<double>(steps);
    return counts;
}

inline double kl_bits(const std::vector<double>& p, const std::vector<double>& q) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] > 0.0) s += p[i] * std::log2(p[i] / q[i]);
    }
    return s;
}

inline double jsd_bits(const std::vector<double>& p, const std::vector<double>& q) {
    std::vector<double> mid(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) mid[i] = 0.5 * (p[i] + q[i]);
    return 0.5 * kl_bits(p, mid) + 0.5 * kl_bits(q, mid);
}

/// Reward-plus-diversity objective written out term by term.
inline double objective(const std::vector<std::vector<double>>& members, const divplan::MdpModel& m, double lambda) {
    const double k = static_cast<double>(members.size());
    double reward = 0.0;
    for (const auto& rho : members) {
        for (std::size_t x = 0; x < rho.size(); ++x) reward += rho[x] * m.rewards()[x];
    }
    double div = 0.0;
    for (std::size_t i = 0; i < members.size(); ++i) {
        for (std::size_t j = i + 1; j < members.size(); ++j) div += jsd_bits(members[i], members[j]);
    }
    return reward / k + (members.size() > 1 ? 2.0 * lambda / (k * (k - 1.0)) * div : 0.0);
}

/// Occupancy measure rho(s,a) = mu(s) pi(a|s) of a full-support policy.
inline std::vector<double> occupancy(const divplan::MdpModel& m, const std::vector<double>& policy) {
    const auto mu = stationary(m, policy);
    std::vector<double> rho(policy.size());
    for (std::size_t s = 0; s < m.num_states(); ++s) {
        for (std::size_t a = 0; a < m.num_actions(); ++a) {
            rho[s * m.num_actions() + a] = mu[s] * policy[s * m.num_actions() + a];
        }
    }
    return rho;
}

inline std::vector<double> random_policy(std::size_t ns, std::size_t na, std::mt19937_64& rng, double low = 0.05) {
    std::uniform_real_distribution<double> u(low, 1.0);
    std::vector<double> pi(ns * na);
    for (std::size_t s = 0; s < ns; ++s) {
        double total = 0.0;
        for (std::size_t a = 0; a < na; ++a) total += pi[s * na + a] = u(rng);
        for (std::size_t a = 0; a < na; ++a) pi[s * na + a] /= total;
    }
    return pi;
}

} // namespace oracle
