#pragma once

// Frank-Wolfe and projected gradient ascent over the product of occupancy
// polytopes, plus the Euclidean projection used by the latter and an
// empirical check of the O(1/sqrt(T)) stationarity rates.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "divplan/mdp.hpp"
#include "divplan/objective.hpp"
#include "divplan/polytope.hpp"

namespace divplan {

enum class PgaStopRule {
    /// ||h^t||_2 <= tolerance with h^t = (rho^{t+1} - rho^t) / eta.
    kGradientMapping,
    /// ||rho^{t+1} - rho^t||_2 <= tolerance.
    kIterateDifference,
};

enum class Termination { kGap, kMapping, kMaxIterations };

std::string_view to_string(Termination t);

/// Offset between initialization seeds of consecutive members.
inline constexpr std::uint64_t kMemberSeedStride = 10007;

struct SolverConfig {
    std::size_t k = 2;
    double lambda = 8.0;
    std::size_t max_iterations = 30;
    double fw_gap_tolerance = 1e-3;
    double pga_step_tolerance = 1e-2;
    /// PGA step; unset selects 1/L at delta = 1e-6 clipped to [1e-6, 1].
    std::optional<double> step_size_eta;
    double backtracking_shrink = 0.5;
    double sufficient_increase = 1e-4;
    std::uint64_t seed = 0;
    /// Overrides seed + i * kMemberSeedStride when non-empty (size k).
    std::vector<std::uint64_t> member_seeds;
    double delta_floor = 0.0;
    PgaStopRule pga_stop_rule = PgaStopRule::kGradientMapping;
    std::size_t projection_max_iterations = 500;
    double projection_gap_tolerance = 1e-8;
    double log_epsilon = 1e-12;
    /// Called with t and the members at the start of every iteration.
    std::function<void(std::size_t, const std::vector<std::vector<double>>&)> observer;

    void validate() const;
    std::uint64_t member_seed(std::size_t i) const;
    ObjectiveConfig objective() const { return {lambda, k, log_epsilon}; }
    double pga_step() const;
};

struct IterationRecord {
    std::size_t t;
    double objective;
    /// FW gap g^t, or the PGA stopping measure.
    double measure;
    /// gamma^t for FW, eta^t for PGA.
    double step;
    double elapsed_seconds;
};

struct SolveReport {
    std::string solver;
    OccupancySet final_set;
    std::vector<StationaryPolicy> final_policies;
    std::vector<IterationRecord> per_iteration;
    std::vector<double> reward_per_policy;
    /// k x k row-major.
    std::vector<double> pairwise_jsd;
    double objective = 0.0;
    double wall_time = 0.0;
    Termination termination = Termination::kMaxIterations;

    double mean_reward_per_policy() const;
    double average_pairwise_jsd() const;
};

/// Random feasible starting set: member i is the occupancy of a Dirichlet(1)
/// policy drawn with cfg.member_seed(i).
OccupancySet initialize_members(const MdpModel& m, const SolverConfig& cfg);

SolveReport frank_wolfe(const MdpModel& m, const SolverConfig& cfg,
                        std::optional<OccupancySet> initial = std::nullopt);

SolveReport pga(const MdpModel& m, const SolverConfig& cfg,
                std::optional<OccupancySet> initial = std::nullopt);

/// Backtracking on a scalar function: gamma = 1, shrink, shrink^2, ... is
/// accepted at the first phi(gamma) >= phi0 + c1 * gamma * slope. Returns 0
/// after max_shrinks rejected shrinks.
double backtracking_step(const std::function<double(double)>& phi, double phi0, double slope,
                         double shrink, double c1, int max_shrinks = 50);

/// Line search of f along rho + gamma * direction, gamma in [0, 1].
/// `gap` is <direction, grad f(rho)>.
double line_search(const OccupancySet& set, std::span<const std::vector<double>> direction,
                   const MdpModel& m, const SolverConfig& cfg, double gap);

struct ProjectionOptions {
    std::size_t max_iterations = 500;
    double gap_tolerance = 1e-8;
    double feasibility_tolerance = 1e-6;
    /// Every this many iterations the iterate is replaced by the exact
    /// minimizer over its current face (0 disables).
    std::size_t polish_interval = 10;
};

struct ProjectionResult {
    OccupancyMeasure rho;
    double inner_gap;
    std::size_t iterations;
};

/// Euclidean projection onto one occupancy polytope, computed by
/// Frank-Wolfe on ||rho - target||^2 with exact steps. Plain Frank-Wolfe
/// only converges sublinearly here, so the iterate is periodically moved to
/// the least-squares point of the face spanned by its support (dropping
/// coordinates that would turn negative). The Frank-Wolfe gap stays the
/// stopping certificate. Keeps its simplex basis between calls.
class Projector {
public:
    Projector(const MdpModel& m, const PolytopeSpec& spec, ProjectionOptions options = {});

    /// `start` must be feasible; when empty the target itself is used if it
    /// is feasible, otherwise the vertex maximizing <s, target>.
    ProjectionResult project(std::span<const double> target, std::span<const double> start = {});

private:
    const MdpModel* model_;
    const PolytopeSpec* spec_;
    ProjectionOptions options_;
    SimplexSolver lp_;

    void polish(std::span<const double> target, std::vector<double>& x) const;
};

ProjectionResult project(std::span<const double> rho_tilde, const MdpModel& m,
                         const ProjectionOptions& options = {});

struct MonitorOptions {
    std::size_t reference_t = 5;
    double factor = 3.0;
};

struct MonitorSummary {
    /// min_{t' <= T} measure_{t'} for every prefix T.
    std::vector<double> min_prefix;
    /// min_prefix[T] * sqrt(T + 1).
    std::vector<double> scaled;
    double bound = 0.0;
    bool bounded = true;
};

/// Bounded when scaled[T] <= factor * scaled[reference_t] for every
/// T >= reference_t (reference clipped to the last available index).
MonitorSummary convergence_monitor(std::span<const double> measures, const MonitorOptions& = {});
MonitorSummary convergence_monitor(const SolveReport& report, const MonitorOptions& = {});

} // namespace divplan
