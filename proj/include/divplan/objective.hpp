#pragma once

// Reward-plus-diversity objective over a set of occupancy measures:
//
//   f = (1/k) sum_i <rho_i, r> + (2 lambda / (k(k-1))) sum_{i<j} JSD(rho_i || rho_j)
//
// All logarithms are base 2, so JSD lies in [0, 1].

#include <cstddef>
#include <span>
#include <vector>

#include "divplan/mdp.hpp"

namespace divplan {

struct ObjectiveConfig {
    double lambda = 0.0;
    std::size_t k = 2;
    /// Floor applied to occupancy entries inside gradient logarithms and to
    /// the reference distribution inside KL.
    double log_epsilon = 1e-12;

    /// Throws DomainError. k = 1 is accepted and has no diversity term.
    void validate() const;
};

struct ObjectiveEval {
    double value = 0.0;
    /// Mean reward per member, (1/k) sum_i <rho_i, r>.
    double reward_term = 0.0;
    /// Average pairwise JSD, (2/(k(k-1))) sum_{i<j} JSD; 0 when k = 1.
    double diversity_term = 0.0;
    /// gradient[i] = grad_{rho_i} f.
    std::vector<std::vector<double>> gradient;
};

/// KL(p || m) in bits with 0 log 0 = 0; m is floored at log_epsilon.
double kl(std::span<const double> p, std::span<const double> m, double log_epsilon = 1e-12);

/// Jensen-Shannon divergence in bits, clamped to [0, 1].
double jsd(std::span<const double> p, std::span<const double> q);

/// sum_i <rho_i, r>
double cumulative_reward(const OccupancySet& set, const MdpModel& m);

/// sum_{i<j} JSD(rho_i || rho_j)
double cumulative_diversity(const OccupancySet& set);

/// k x k symmetric matrix of pairwise JSD, row-major, zero diagonal.
std::vector<double> pairwise_jsd(const OccupancySet& set);

/// Average pairwise JSD, the externally reported diversity.
double average_pairwise_jsd(const OccupancySet& set);

/// Value and gradient. Throws CardinalityMismatch when set.size() != cfg.k.
ObjectiveEval eval_f(const OccupancySet& set, const MdpModel& m, const ObjectiveConfig& cfg);

/// Value only, over raw member vectors (no gradient work).
double eval_value(std::span<const std::vector<double>> members, const MdpModel& m,
                  const ObjectiveConfig& cfg);

/// Gradient Lipschitz constant lambda (1 + delta) / (4 delta^2) on the
/// delta-floored polytope. DomainError unless 0 < delta < 1.
double lipschitz_bound(double lambda, double delta);

} // namespace divplan
