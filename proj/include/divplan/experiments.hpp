#pragma once

// Randomized-trial experiment harness: FW vs PGA comparison and sweeps over
// lambda, k and alpha on generated grid worlds.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "divplan/gridworld.hpp"
#include "divplan/solvers.hpp"

namespace divplan::exp {

enum class Experiment { kCompare, kSweepLambda, kSweepK, kSweepAlpha, kSingle };
enum class SolverChoice { kFrankWolfe, kPga, kBoth };

std::string_view to_string(Experiment e);
std::string_view to_string(SolverChoice s);
SolverChoice parse_solver(std::string_view text);

struct ExperimentPlan {
    Experiment experiment = Experiment::kCompare;
    grid::Layout layout = grid::Layout::kFourRoom;
    std::size_t trials = 10;
    std::size_t k = 2;
    double lambda = 8.0;
    double alpha = 0.95;
    /// Swept values; ignored by compare and single.
    std::vector<double> grid;
    std::uint64_t seed = 0;
    std::size_t max_iterations = 30;
    double fw_tolerance = 1e-3;
    double pga_tolerance = 1e-2;
    SolverChoice solver = SolverChoice::kFrankWolfe;
    PgaStopRule pga_stop = PgaStopRule::kIterateDifference;
    std::size_t workers = 1;
    std::optional<std::filesystem::path> out_dir;
    /// Per-trial traces and heatmaps next to the CSV tables.
    bool artifacts = true;
    bool emit_monitor = false;

    /// Plan for `experiment` with the defaults of the matching study.
    static ExperimentPlan defaults(Experiment experiment);

    /// Throws DomainError: trials >= 1, grid non-empty and sorted for sweeps.
    void validate() const;
    std::string to_json() const;
};

/// splitmix64 mix of (base, trial, bit pattern of value).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t trial, double value);

struct TrialRecord {
    double swept_value = 0.0;
    std::size_t trial = 0;
    std::string solver;
    std::uint64_t world_seed = 0;
    std::uint64_t solver_seed = 0;
    double mean_reward_per_policy = 0.0;
    double mean_pairwise_jsd = 0.0;
    double objective = 0.0;
    double runtime_seconds = 0.0;
    std::size_t iterations = 0;
    std::string termination;
    double optimal_reward = 0.0;
    /// Empty on success.
    std::string error;
    std::vector<std::string> heatmaps;

    bool ok() const { return error.empty(); }
};

struct SummaryRow {
    double swept_value = 0.0;
    std::string solver;
    std::size_t trials = 0;
    double mean_reward_per_policy = 0.0;
    double sd_reward = 0.0;
    double mean_pairwise_jsd = 0.0;
    double sd_jsd = 0.0;
    double optimal_reward_ref = 0.0;
    double mean_iterations = 0.0;
    double mean_runtime_seconds = 0.0;
    double sd_runtime_seconds = 0.0;
};

struct ExperimentResult {
    ExperimentPlan plan;
    std::vector<TrialRecord> records;
    std::vector<SummaryRow> summary;

    /// First summary row for (value, solver); nullptr when absent.
    const SummaryRow* find(double swept_value, std::string_view solver) const;
};

/// Runs every (swept value, trial, solver) job on plan.workers threads.
/// Records come back ordered by value, trial, solver regardless of
/// completion order. Writes the output files when plan.out_dir is set.
ExperimentResult run(const ExperimentPlan& plan);

ExperimentResult run_compare(ExperimentPlan plan);
ExperimentResult run_sweep_lambda(ExperimentPlan plan);
ExperimentResult run_sweep_k(ExperimentPlan plan);
ExperimentResult run_sweep_alpha(ExperimentPlan plan);

struct SingleResult {
    grid::GridWorld world;
    SolveReport report;
    MonitorSummary monitor;
    double optimal_reward = 0.0;
};

/// One world, one solver; writes trace, monitor and heatmaps when
/// plan.out_dir is set.
SingleResult run_single(const ExperimentPlan& plan);

/// Mean and unbiased standard deviation per (value, solver) over the
/// successful records.
std::vector<SummaryRow> summarize(const std::vector<TrialRecord>& records);

/// swept_value,solver,trials,mean_reward_per_policy,sd_reward,
/// mean_pairwise_jsd,sd_jsd,optimal_reward_ref,mean_iterations.
/// Wall-clock columns live in runtime.csv so this table is reproducible.
void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows);
void write_runtime_csv(std::ostream& os, const std::vector<SummaryRow>& rows);
void write_trials_csv(std::ostream& os, const std::vector<TrialRecord>& records);

} // namespace divplan::exp
