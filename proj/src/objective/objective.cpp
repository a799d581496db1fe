#include "divplan/objective.hpp"

#include <algorithm>
#include <cmath>

#include "divplan/error.hpp"
#include "divplan/simd/kernels.hpp"

namespace divplan {

void ObjectiveConfig::validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("lambda must be >= 0");
    if (k < 1) throw DomainError("k must be >= 1");
    if (!(log_epsilon > 0.0 && log_epsilon < 1e-6)) {
        throw DomainError("log_epsilon must lie in (0, 1e-6)");
    }
}

double kl(std::span<const double> p, std::span<const double> m, double log_epsilon) {
    if (p.size() != m.size()) throw DimensionMismatch("kl: distributions differ in length");
    double acc = 0.0;
    for (std::size_t x = 0; x < p.size(); ++x) {
        if (p[x] <= 0.0) continue;
        acc += p[x] * std::log2(p[x] / std::max(m[x], log_epsilon));
    }
    return std::max(acc, 0.0);
}

double jsd(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw DimensionMismatch("jsd: distributions differ in length");
    std::vector<double> mid(p.size());
    for (std::size_t x = 0; x < p.size(); ++x) mid[x] = 0.5 * (p[x] + q[x]);
    const double d = 0.5 * kl(p, mid) + 0.5 * kl(q, mid);
    return std::clamp(d, 0.0, 1.0);
}

namespace {

void check_members(const OccupancySet& set, const MdpModel& m) {
    for (const auto& rho : set) {
        if (rho.num_states() != m.num_states() || rho.num_actions() != m.num_actions()) {
            throw DimensionMismatch("occupancy set does not match the MDP dimensions");
        }
    }
}

double diversity_weight(const ObjectiveConfig& cfg) {
    if (cfg.k < 2) return 0.0;
    return 2.0 * cfg.lambda / (static_cast<double>(cfg.k) * static_cast<double>(cfg.k - 1));
}

// sum_x 1/2 [p log2(2p/(p+q)) + q log2(2q/(p+q))], zero-mass terms dropped.
double pair_divergence(std::span<const double> p, std::span<const double> q) {
    double acc = 0.0;
    for (std::size_t x = 0; x < p.size(); ++x) {
        const double a = std::max(p[x], 0.0);
        const double b = std::max(q[x], 0.0);
        const double total = a + b;
        if (total <= 0.0) continue;
        if (a > 0.0) acc += a * std::log2(2.0 * a / total);
        if (b > 0.0) acc += b * std::log2(2.0 * b / total);
    }
    return std::clamp(0.5 * acc, 0.0, 1.0);
}

// Adds weight * dJSD/dp to grad_p and weight * dJSD/dq to grad_q in one pass,
// with the partials evaluated at the entrywise eps-floored point. Returns
// the pair divergence.
double pair_divergence_and_gradient(std::span<const double> p, std::span<const double> q,
                                    double eps, double weight, std::span<double> grad_p,
                                    std::span<double> grad_q) {
    double acc = 0.0;
    for (std::size_t x = 0; x < p.size(); ++x) {
        const double a = std::max(p[x], 0.0);
        const double b = std::max(q[x], 0.0);
        const double fa = std::max(a, eps);
        const double fb = std::max(b, eps);
        const double log_a = std::log2(2.0 * fa / (fa + fb));
        const double log_b = std::log2(2.0 * fb / (fa + fb));
        grad_p[x] += weight * (0.5 * log_a);
        grad_q[x] += weight * (0.5 * log_b);
        // Same operation order as pair_divergence so values agree bitwise.
        if (a >= eps && b >= eps) {
            acc += a * log_a;
            acc += b * log_b;
        } else {
            const double total = a + b;
            if (total <= 0.0) continue;
            if (a > 0.0) acc += a * std::log2(2.0 * a / total);
            if (b > 0.0) acc += b * std::log2(2.0 * b / total);
        }
    }
    return std::clamp(0.5 * acc, 0.0, 1.0);
}

} // namespace

double cumulative_reward(const OccupancySet& set, const MdpModel& m) {
    check_members(set, m);
    double total = 0.0;
    for (const auto& rho : set) total += simd::dot(rho.values(), m.rewards());
    return total;
}

double cumulative_diversity(const OccupancySet& set) {
    double total = 0.0;
    for (std::size_t i = 0; i < set.size(); ++i) {
        for (std::size_t j = i + 1; j < set.size(); ++j) total += jsd(set[i].values(), set[j].values());
    }
    return total;
}

std::vector<double> pairwise_jsd(const OccupancySet& set) {
    const auto k = set.size();
    std::vector<double> out(k * k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            out[i * k + j] = out[j * k + i] = jsd(set[i].values(), set[j].values());
        }
    }
    return out;
}

double average_pairwise_jsd(const OccupancySet& set) {
    const auto k = set.size();
    if (k < 2) return 0.0;
    return 2.0 * cumulative_diversity(set) / (static_cast<double>(k) * static_cast<double>(k - 1));
}

ObjectiveEval eval_f(const OccupancySet& set, const MdpModel& m, const ObjectiveConfig& cfg) {
    cfg.validate();
    if (set.size() != cfg.k) {
        throw CardinalityMismatch("objective configured for k = " + std::to_string(cfg.k) +
                                  " but set has " + std::to_string(set.size()) + " members");
    }
    check_members(set, m);
    const auto k = cfg.k;
    const double inv_k = 1.0 / static_cast<double>(k);
    const double weight = diversity_weight(cfg);

    ObjectiveEval out;
    out.gradient.assign(k, std::vector<double>(m.rewards().begin(), m.rewards().end()));
    double reward = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        reward += simd::dot(set[i].values(), m.rewards());
        for (auto& g : out.gradient[i]) g *= inv_k;
    }

    double diversity = 0.0;
    if (k >= 2) {
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = i + 1; j < k; ++j) {
                diversity += pair_divergence_and_gradient(set[i].values(), set[j].values(),
                                                          cfg.log_epsilon, weight, out.gradient[i],
                                                          out.gradient[j]);
            }
        }
    }

    out.reward_term = reward / static_cast<double>(k);
    out.diversity_term =
        k >= 2 ? 2.0 * diversity / (static_cast<double>(k) * static_cast<double>(k - 1)) : 0.0;
    out.value = out.reward_term + cfg.lambda * out.diversity_term;
    return out;
}

double eval_value(std::span<const std::vector<double>> members, const MdpModel& m,
                  const ObjectiveConfig& cfg) {
    if (members.size() != cfg.k) throw CardinalityMismatch("member count differs from k");
    const auto k = cfg.k;
    double reward = 0.0;
    for (const auto& rho : members) reward += simd::dot(rho, m.rewards());
    double diversity = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) diversity += pair_divergence(members[i], members[j]);
    }
    const double reward_term = reward / static_cast<double>(k);
    const double diversity_term =
        k >= 2 ? 2.0 * diversity / (static_cast<double>(k) * static_cast<double>(k - 1)) : 0.0;
    return reward_term + cfg.lambda * diversity_term;
}

double lipschitz_bound(double lambda, double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
    return lambda * (1.0 + delta) / (4.0 * delta * delta);
}

} // namespace divplan
