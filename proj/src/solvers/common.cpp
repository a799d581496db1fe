#include <algorithm>
#include <cmath>

#include "divplan/error.hpp"
#include "divplan/simd/kernels.hpp"
#include "divplan/solvers.hpp"
#include "solver_internal.hpp"

namespace divplan {

std::string_view to_string(Termination t) {
    switch (t) {
        case Termination::kGap: return "gap";
        case Termination::kMapping: return "mapping";
        case Termination::kMaxIterations: return "max-iterations";
    }
    return "unknown";
}

void SolverConfig::validate() const {
    objective().validate();
    if (k < 2 && lambda != 0.0) throw DomainError("k >= 2 is required when lambda > 0");
    if (!(fw_gap_tolerance >= 0.0) || !(pga_step_tolerance >= 0.0)) {
        throw DomainError("tolerances must be nonnegative");
    }
    if (!(backtracking_shrink > 0.0 && backtracking_shrink < 1.0)) {
        throw DomainError("backtracking shrink must lie in (0, 1)");
    }
    if (!(sufficient_increase >= 0.0 && sufficient_increase < 1.0)) {
        throw DomainError("sufficient increase constant must lie in [0, 1)");
    }
    if (step_size_eta && !(*step_size_eta > 0.0)) throw DomainError("step size must be positive");
    if (!member_seeds.empty() && member_seeds.size() != k) {
        throw DomainError("member_seeds must hold k entries");
    }
    if (!(delta_floor >= 0.0)) throw DomainError("delta_floor must be nonnegative");
}

std::uint64_t SolverConfig::member_seed(std::size_t i) const {
    if (!member_seeds.empty()) return member_seeds.at(i);
    return seed + static_cast<std::uint64_t>(i) * kMemberSeedStride;
}

double SolverConfig::pga_step() const {
    if (step_size_eta) return *step_size_eta;
    const double lipschitz = lipschitz_bound(lambda, 1e-6);
    const double eta = lipschitz > 0.0 ? 1.0 / lipschitz : 1.0;
    return std::clamp(eta, 1e-6, 1.0);
}

double SolveReport::mean_reward_per_policy() const {
    if (reward_per_policy.empty()) return 0.0;
    double total = 0.0;
    for (double r : reward_per_policy) total += r;
    return total / static_cast<double>(reward_per_policy.size());
}

double SolveReport::average_pairwise_jsd() const { return divplan::average_pairwise_jsd(final_set); }

OccupancySet initialize_members(const MdpModel& m, const SolverConfig& cfg) {
    std::vector<OccupancyMeasure> members;
    members.reserve(cfg.k);
    const double floor = cfg.delta_floor;
    std::optional<PolytopeSpec> floored;
    if (floor > 0.0) {
        const double inner = 2.0 * floor * static_cast<double>(m.num_pairs()) < 1.0 ? 2.0 * floor : floor;
        floored = build_polytope(m, inner);
    }
    for (std::size_t i = 0; i < cfg.k; ++i) {
        try {
            auto rho = sample_feasible(m, cfg.member_seed(i));
            if (floored) {
                // Blend with a vertex of the doubled-floor polytope so every
                // entry clears the floor.
                auto policy = sample_policy(m.num_states(), m.num_actions(), cfg.member_seed(i) ^ 0x9e3779b97f4a7c15ULL);
                auto vertex = solve_lp(*floored, policy.probs(), Sense::kMaximize);
                if (vertex.status != LpStatus::kOptimal) throw InitializationError("floored polytope is empty");
                std::vector<double> blended(rho.size());
                const double w = floored->floor() > floor ? 0.5 : 0.0;
                for (std::size_t x = 0; x < blended.size(); ++x) {
                    blended[x] = w * rho.values()[x] + (1.0 - w) * vertex.point[x];
                }
                rho = OccupancyMeasure(m.num_states(), m.num_actions(), std::move(blended));
            }
            members.push_back(std::move(rho));
        } catch (const MultichainError& e) {
            throw InitializationError(std::string("member initialization failed: ") + e.what());
        }
    }
    return OccupancySet(std::move(members));
}

double backtracking_step(const std::function<double(double)>& phi, double phi0, double slope,
                         double shrink, double c1, int max_shrinks) {
    double gamma = 1.0;
    for (int i = 0; i <= max_shrinks; ++i) {
        if (phi(gamma) >= phi0 + c1 * gamma * slope) return gamma;
        gamma *= shrink;
    }
    return 0.0;
}

double line_search(const OccupancySet& set, std::span<const std::vector<double>> direction,
                   const MdpModel& m, const SolverConfig& cfg, double gap) {
    if (direction.size() != set.size()) throw CardinalityMismatch("direction and set differ in size");
    const auto ocfg = cfg.objective();
    std::vector<std::vector<double>> base(set.size()), trial(set.size());
    for (std::size_t i = 0; i < set.size(); ++i) {
        base[i].assign(set[i].values().begin(), set[i].values().end());
        trial[i].resize(base[i].size());
    }
    const double f0 = eval_value(base, m, ocfg);
    auto phi = [&](double gamma) {
        for (std::size_t i = 0; i < set.size(); ++i) detail::step_member(base[i], direction[i], gamma, trial[i]);
        return eval_value(trial, m, ocfg);
    };
    return backtracking_step(phi, f0, gap, cfg.backtracking_shrink, cfg.sufficient_increase);
}

namespace detail {

std::vector<std::vector<double>> to_vectors(const OccupancySet& set) {
    std::vector<std::vector<double>> out;
    out.reserve(set.size());
    for (const auto& rho : set) out.emplace_back(rho.values().begin(), rho.values().end());
    return out;
}

OccupancySet to_set(const MdpModel& m, const std::vector<std::vector<double>>& members) {
    std::vector<OccupancyMeasure> measures;
    measures.reserve(members.size());
    for (const auto& v : members) measures.emplace_back(m.num_states(), m.num_actions(), v);
    return OccupancySet(std::move(measures));
}

void check_initial(const MdpModel& m, const SolverConfig& cfg, const OccupancySet& init) {
    if (init.size() != cfg.k) throw CardinalityMismatch("initial set must have k members");
    for (const auto& rho : init) {
        if (rho.num_states() != m.num_states() || rho.num_actions() != m.num_actions()) {
            throw DimensionMismatch("initial set does not match the MDP");
        }
    }
}

void step_member(std::span<const double> rho, std::span<const double> direction, double gamma,
                 std::span<double> out) {
    std::copy(rho.begin(), rho.end(), out.begin());
    if (gamma != 0.0) simd::axpy(gamma, direction, out);
}

SolveReport finish_report(std::string solver, const MdpModel& m, const SolverConfig& cfg,
                          std::vector<std::vector<double>> members,
                          std::vector<IterationRecord> trace, double wall_time,
                          Termination termination) {
    std::vector<OccupancyMeasure> measures;
    measures.reserve(members.size());
    for (auto& v : members) measures.emplace_back(m.num_states(), m.num_actions(), std::move(v));
    OccupancySet set(std::move(measures));

    std::vector<StationaryPolicy> policies;
    std::vector<double> rewards;
    for (const auto& rho : set) {
        policies.push_back(occupancy_to_policy(rho));
        rewards.push_back(average_reward(rho, m));
    }
    auto jsd_matrix = pairwise_jsd(set);
    const double objective = eval_f(set, m, cfg.objective()).value;
    return SolveReport{std::move(solver),    std::move(set),    std::move(policies),
                       std::move(trace),     std::move(rewards), std::move(jsd_matrix),
                       objective,            wall_time,          termination};
}

} // namespace detail

} // namespace divplan
