#pragma once

// The occupancy-measure polytope in standard form and a two-phase revised
// simplex over it.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "divplan/mdp.hpp"

namespace divplan {

/// { x : A x = b, x >= lower_bounds } with x indexed by MdpModel::index(s,a).
///
/// Rows 0..S-2 are flow-balance constraints for states 0..S-2 (the balance
/// row of the last state is implied by the others and dropped); row S-1 is
/// the normalization sum(x) = 1.
struct PolytopeSpec {
    std::size_t num_rows = 0;
    std::size_t num_cols = 0;
    std::vector<double> equality_matrix; // row-major, num_rows x num_cols
    std::vector<double> equality_rhs;
    std::vector<double> lower_bounds;

    // Column-compressed copy of equality_matrix.
    std::vector<std::size_t> col_start;
    std::vector<std::uint32_t> row_index;
    std::vector<double> col_value;

    double floor() const { return lower_bounds.empty() ? 0.0 : lower_bounds.front(); }
};

/// Throws FloorInfeasible when floor * S * A > 1 and DomainError for a
/// negative floor.
PolytopeSpec build_polytope(const MdpModel& m, double floor = 0.0);

/// Max |A x - b| and the most negative x - lower_bound.
struct PolytopeResiduals {
    double equality;
    double bound;
};
PolytopeResiduals polytope_residuals(const PolytopeSpec& spec, std::span<const double> x);

/// Plain-text dump: header line "polytope <rows> <cols>" followed by
/// "matrix", "rhs" and "lower_bounds" sections, one row per line, values in
/// %.17g.
void write_polytope(std::ostream& os, const PolytopeSpec& spec);

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };
enum class Sense { kMaximize, kMinimize };

std::string_view to_string(LpStatus status);

struct LpSolution {
    std::vector<double> point;
    double objective_value = 0.0;
    LpStatus status = LpStatus::kIterationLimit;
    std::size_t pivots = 0;
};

struct LpOptions {
    /// 0 selects 50 * (rows + cols).
    std::size_t max_pivots = 0;
    double optimality_tol = 1e-9;
    double pivot_tol = 1e-9;
    /// Rebuild the explicit basis inverse after this many rank-one updates.
    std::size_t refactor_interval = 300;
    /// Consecutive degenerate pivots after which the zero basic variables
    /// are shifted by a small random amount. The shift is removed at the
    /// optimum and any leftover infeasibility is repaired with dual simplex
    /// pivots. After three such rounds pricing falls back to Bland's rule.
    std::size_t degenerate_switch = 30;
    double perturbation = 1e-7;
};

/// Revised simplex bound to one polytope. Phase I runs on the first solve;
/// later solves start from the previous optimal basis, so a solver driven
/// with a fixed sequence of objectives is fully deterministic. Copying a
/// solver copies its basis.
class SimplexSolver {
public:
    explicit SimplexSolver(const PolytopeSpec& spec, LpOptions options = {});

    /// Runs Phase I if no feasible basis is held yet. Returns false when the
    /// polytope is empty.
    bool ensure_feasible_basis();

    LpSolution solve(std::span<const double> objective, Sense sense);

    const PolytopeSpec& spec() const { return *spec_; }

private:
    enum class Outcome { kOptimal, kUnbounded, kIterationLimit };

    Outcome optimize(std::span<const double> cost, bool phase_one);
    Outcome iterate(std::span<const double> cost, bool phase_one, bool allow_perturbation);
    Outcome dual_cleanup(std::span<const double> cost, bool phase_one);
    void perturb(bool phase_one);
    void compute_duals(std::span<const double> cost, std::span<double> dual) const;
    double reduced_cost(std::span<const double> cost, std::span<const double> dual, std::size_t col) const;
    void pivot(std::size_t leave_row, std::size_t enter_col, std::span<const double> direction);
    void refactor();
    void recompute_basic();
    void column_times_inverse(std::size_t col, std::span<double> out) const;
    bool is_artificial(std::size_t col) const { return col >= n_; }
    void drive_out_artificials();
    std::vector<double> extract_point() const;

    const PolytopeSpec* spec_;
    LpOptions options_;
    std::size_t m_;
    std::size_t n_;
    std::vector<double> row_sign_;
    std::vector<double> rhs_; // sign-normalized, shifted by lower bounds
    std::vector<double> rhs_work_; // rhs_ plus the active perturbation
    std::vector<std::size_t> basis_;
    std::vector<std::int64_t> basis_pos_; // -1 when nonbasic
    std::vector<double> inverse_;         // column-major m x m
    std::vector<double> x_basic_;
    std::size_t updates_since_refactor_ = 0;
    std::size_t pivots_this_solve_ = 0;
    bool feasible_ = false;
    bool infeasible_ = false;
    bool perturbed_ = false;
    std::uint64_t perturb_state_ = 0x9e3779b97f4a7c15ull;
};

/// One-shot solve from a cold start.
LpSolution solve_lp(const PolytopeSpec& spec, std::span<const double> objective, Sense sense,
                    const LpOptions& options = {});

struct OptimalPolicyResult {
    OccupancyMeasure rho;
    double value;
};

/// max <rho, r> over the occupancy polytope. Throws LpFailure if the
/// simplex does not report an optimum.
OptimalPolicyResult optimal_policy_lp(const MdpModel& m);

/// Occupancy measure of a random policy whose per-state action
/// distributions are Dirichlet(1,...,1) draws.
OccupancyMeasure sample_feasible(const MdpModel& m, std::uint64_t seed);

/// Dirichlet(1) policy used by sample_feasible.
StationaryPolicy sample_policy(std::size_t num_states, std::size_t num_actions, std::uint64_t seed);

} // namespace divplan
