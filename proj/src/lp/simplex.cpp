#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "divplan/error.hpp"
#include "divplan/polytope.hpp"
#include "divplan/simd/kernels.hpp"

namespace divplan {

namespace {

// Primal infeasibility tolerated inside the Harris ratio test.
constexpr double kPrimalSlack = 1e-9;

} // namespace

SimplexSolver::SimplexSolver(const PolytopeSpec& spec, LpOptions options)
    : spec_(&spec), options_(options), m_(spec.num_rows), n_(spec.num_cols) {
    if (spec.equality_rhs.size() != m_ || spec.lower_bounds.size() != n_ ||
        spec.col_start.size() != n_ + 1) {
        throw DimensionMismatch("malformed polytope spec");
    }
    if (options_.max_pivots == 0) options_.max_pivots = 50 * (m_ + n_);

    // Shift x = lb + x' and flip rows so the Phase I start x' = 0, a = b' is feasible.
    rhs_ = spec.equality_rhs;
    for (std::size_t col = 0; col < n_; ++col) {
        const double lb = spec.lower_bounds[col];
        if (lb == 0.0) continue;
        for (auto k = spec.col_start[col]; k < spec.col_start[col + 1]; ++k) {
            rhs_[spec.row_index[k]] -= spec.col_value[k] * lb;
        }
    }
    row_sign_.assign(m_, 1.0);
    for (std::size_t row = 0; row < m_; ++row) {
        if (rhs_[row] < 0.0) {
            row_sign_[row] = -1.0;
            rhs_[row] = -rhs_[row];
        }
    }
    rhs_work_ = rhs_;
}

void SimplexSolver::column_times_inverse(std::size_t col, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    const std::span<const double> inv(inverse_);
    if (is_artificial(col)) {
        const auto row = col - n_;
        std::copy_n(inverse_.begin() + static_cast<std::ptrdiff_t>(row * m_), m_, out.begin());
        return;
    }
    for (auto k = spec_->col_start[col]; k < spec_->col_start[col + 1]; ++k) {
        const auto row = spec_->row_index[k];
        simd::axpy(row_sign_[row] * spec_->col_value[k], inv.subspan(row * m_, m_), out);
    }
}

void SimplexSolver::refactor() {
    const auto m = static_cast<Eigen::Index>(m_);
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(m_ * 6);
    for (std::size_t i = 0; i < m_; ++i) {
        const auto col = basis_[i];
        const auto j = static_cast<Eigen::Index>(i);
        if (is_artificial(col)) {
            entries.emplace_back(static_cast<Eigen::Index>(col - n_), j, 1.0);
            continue;
        }
        for (auto k = spec_->col_start[col]; k < spec_->col_start[col + 1]; ++k) {
            const auto row = spec_->row_index[k];
            entries.emplace_back(static_cast<Eigen::Index>(row), j, row_sign_[row] * spec_->col_value[k]);
        }
    }
    Eigen::SparseMatrix<double> basis_matrix(m, m);
    basis_matrix.setFromTriplets(entries.begin(), entries.end());
    Eigen::Map<Eigen::MatrixXd> inv(inverse_.data(), m, m);
    inv = Eigen::MatrixXd(basis_matrix).partialPivLu().inverse();
    updates_since_refactor_ = 0;
    recompute_basic();
}

void SimplexSolver::recompute_basic() {
    std::fill(x_basic_.begin(), x_basic_.end(), 0.0);
    const std::span<const double> invs(inverse_);
    for (std::size_t row = 0; row < m_; ++row) {
        if (rhs_work_[row] != 0.0) simd::axpy(rhs_work_[row], invs.subspan(row * m_, m_), x_basic_);
    }
    for (auto& x : x_basic_) {
        if (x < 0.0 && x > -1e-11) x = 0.0;
    }
}

void SimplexSolver::pivot(std::size_t leave_row, std::size_t enter_col,
                          std::span<const double> direction) {
    const double pivot_value = direction[leave_row];
    const std::span<double> inv(inverse_);
    // Row leave_row of B^-1 is scaled by 1/pivot and eliminated from the
    // others; stored column-major, each column gets one axpy.
    for (std::size_t c = 0; c < m_; ++c) {
        auto column = inv.subspan(c * m_, m_);
        const double t = column[leave_row] / pivot_value;
        if (t != 0.0) {
            simd::axpy(-t, direction, column);
            column[leave_row] = t;
        }
    }
    basis_pos_[basis_[leave_row]] = -1;
    basis_[leave_row] = enter_col;
    basis_pos_[enter_col] = static_cast<std::int64_t>(leave_row);
    ++updates_since_refactor_;
    ++pivots_this_solve_;
    if (updates_since_refactor_ >= options_.refactor_interval) refactor();
}

void SimplexSolver::compute_duals(std::span<const double> cost, std::span<double> dual) const {
    std::vector<double> cost_basic(m_);
    for (std::size_t i = 0; i < m_; ++i) cost_basic[i] = cost[basis_[i]];
    const std::span<const double> inv(inverse_);
    for (std::size_t r = 0; r < m_; ++r) dual[r] = simd::dot(cost_basic, inv.subspan(r * m_, m_));
}

double SimplexSolver::reduced_cost(std::span<const double> cost, std::span<const double> dual,
                                   std::size_t col) const {
    double reduced = cost[col];
    for (auto k = spec_->col_start[col]; k < spec_->col_start[col + 1]; ++k) {
        const auto row = spec_->row_index[k];
        reduced -= dual[row] * row_sign_[row] * spec_->col_value[k];
    }
    return reduced;
}

void SimplexSolver::perturb(bool phase_one) {
    // splitmix64, so copies of a solver replay the same shifts.
    auto next_unit = [this] {
        std::uint64_t z = (perturb_state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        z ^= z >> 31;
        return static_cast<double>(z >> 11) * 0x1.0p-53;
    };
    for (std::size_t i = 0; i < m_; ++i) {
        const auto col = basis_[i];
        if (!phase_one && is_artificial(col)) continue;
        if (x_basic_[i] > options_.perturbation) continue;
        const double shift = options_.perturbation * (1.0 + next_unit());
        x_basic_[i] += shift;
        // Keep rhs_work_ = B x_B so refactoring reproduces the shifted point.
        if (is_artificial(col)) {
            rhs_work_[col - n_] += shift;
        } else {
            for (auto k = spec_->col_start[col]; k < spec_->col_start[col + 1]; ++k) {
                const auto row = spec_->row_index[k];
                rhs_work_[row] += shift * row_sign_[row] * spec_->col_value[k];
            }
        }
    }
    perturbed_ = true;
}

SimplexSolver::Outcome SimplexSolver::iterate(std::span<const double> cost, bool phase_one,
                                              bool allow_perturbation) {
    // cost has n_ + m_ entries (artificials last), sense is maximize.
    std::vector<double> dual(m_), direction(m_);
    double cost_scale = 1.0;
    for (double c : cost) cost_scale = std::max(cost_scale, std::abs(c));
    const double opt_tol = options_.optimality_tol * cost_scale;
    std::size_t degenerate_run = 0;
    compute_duals(cost, dual);

    while (true) {
        if (pivots_this_solve_ >= options_.max_pivots) return Outcome::kIterationLimit;
        if (allow_perturbation && degenerate_run >= options_.degenerate_switch) {
            perturb(phase_one);
            degenerate_run = 0;
        }

        const bool bland = degenerate_run >= options_.degenerate_switch;
        std::size_t enter = n_;
        double best = opt_tol;
        double enter_reduced = 0.0;
        for (std::size_t col = 0; col < n_; ++col) {
            if (basis_pos_[col] >= 0) continue;
            const double reduced = reduced_cost(cost, dual, col);
            if (reduced > best) {
                enter = col;
                enter_reduced = reduced;
                if (bland) break;
                best = reduced;
            }
        }
        if (enter == n_) return Outcome::kOptimal;

        column_times_inverse(enter, direction);

        // Harris two-pass test: bound the step with relaxed ratios, then
        // take the largest pivot among rows whose exact ratio fits.
        auto eligible = [&](std::size_t i) {
            const double u = direction[i];
            if (!phase_one && is_artificial(basis_[i])) return std::abs(u) > options_.pivot_tol;
            return u > options_.pivot_tol;
        };
        auto exact_ratio = [&](std::size_t i) {
            if (!phase_one && is_artificial(basis_[i])) return 0.0;
            return std::max(x_basic_[i], 0.0) / direction[i];
        };
        double bound = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m_; ++i) {
            if (!eligible(i)) continue;
            const double relaxed = (!phase_one && is_artificial(basis_[i]))
                                       ? 0.0
                                       : (std::max(x_basic_[i], 0.0) + kPrimalSlack) / direction[i];
            bound = std::min(bound, relaxed);
        }
        if (!std::isfinite(bound)) return Outcome::kUnbounded;

        std::size_t leave = m_;
        for (std::size_t i = 0; i < m_; ++i) {
            if (!eligible(i) || exact_ratio(i) > bound) continue;
            if (leave == m_) {
                leave = i;
            } else if (bland) {
                if (basis_[i] < basis_[leave]) leave = i;
            } else if (std::abs(direction[i]) > std::abs(direction[leave])) {
                leave = i;
            }
        }
        double ratio = exact_ratio(leave);

        ratio = std::max(ratio, 0.0);
        degenerate_run = ratio <= 1e-12 ? degenerate_run + 1 : 0;
        if (ratio != 0.0) simd::axpy(-ratio, direction, x_basic_);
        x_basic_[leave] = ratio;
        for (auto& x : x_basic_) {
            if (x < 0.0 && x > -1e-11) x = 0.0;
        }
        // y' = y + (d_q / alpha_rq) * (row r of the old inverse).
        const double scale = enter_reduced / direction[leave];
        for (std::size_t r = 0; r < m_; ++r) dual[r] += scale * inverse_[r * m_ + leave];
        pivot(leave, enter, direction);
        if (updates_since_refactor_ == 0) compute_duals(cost, dual);
    }
}

SimplexSolver::Outcome SimplexSolver::dual_cleanup(std::span<const double> cost, bool phase_one) {
    // The basis is dual feasible; pivot out negative basics until the
    // unperturbed point is primal feasible again.
    std::vector<double> dual(m_), inverse_row(m_), direction(m_);
    while (true) {
        std::size_t leave = m_;
        double most_negative = -1e-11;
        for (std::size_t i = 0; i < m_; ++i) {
            if (!phase_one && is_artificial(basis_[i])) continue;
            if (x_basic_[i] < most_negative) {
                most_negative = x_basic_[i];
                leave = i;
            }
        }
        if (leave == m_) {
            for (auto& x : x_basic_) x = std::max(x, 0.0);
            return Outcome::kOptimal;
        }
        if (pivots_this_solve_ >= options_.max_pivots) return Outcome::kIterationLimit;

        compute_duals(cost, dual);
        for (std::size_t r = 0; r < m_; ++r) inverse_row[r] = inverse_[r * m_ + leave];
        std::vector<std::pair<std::size_t, double>> candidates; // column, -alpha
        std::vector<double> slack;
        double bound = std::numeric_limits<double>::infinity();
        for (std::size_t col = 0; col < n_; ++col) {
            if (basis_pos_[col] >= 0) continue;
            double alpha = 0.0;
            for (auto k = spec_->col_start[col]; k < spec_->col_start[col + 1]; ++k) {
                const auto row = spec_->row_index[k];
                alpha += inverse_row[row] * row_sign_[row] * spec_->col_value[k];
            }
            if (alpha >= -options_.pivot_tol) continue;
            const double d = std::max(-reduced_cost(cost, dual, col), 0.0);
            candidates.emplace_back(col, -alpha);
            slack.push_back(d);
            bound = std::min(bound, (d + options_.optimality_tol) / -alpha);
        }
        std::size_t enter = n_;
        double best_alpha = 0.0;
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            const auto [col, a] = candidates[c];
            if (slack[c] / a <= bound && a > best_alpha) {
                enter = col;
                best_alpha = a;
            }
        }
        if (enter == n_) return Outcome::kIterationLimit;

        column_times_inverse(enter, direction);
        const double step = x_basic_[leave] / direction[leave];
        simd::axpy(-step, direction, x_basic_);
        x_basic_[leave] = step;
        pivot(leave, enter, direction);
    }
}

SimplexSolver::Outcome SimplexSolver::optimize(std::span<const double> cost, bool phase_one) {
    for (int round = 0;; ++round) {
        const auto outcome = iterate(cost, phase_one, round < 3);
        if (outcome != Outcome::kOptimal) return outcome;
        const bool negative = std::any_of(x_basic_.begin(), x_basic_.end(), [](double x) { return x < -1e-11; });
        if (!perturbed_ && !negative) return outcome;
        rhs_work_ = rhs_;
        perturbed_ = false;
        recompute_basic();
        const auto cleaned = dual_cleanup(cost, phase_one);
        if (cleaned != Outcome::kOptimal) return cleaned;
    }
}

void SimplexSolver::drive_out_artificials() {
    std::vector<double> inverse_row(m_), direction(m_);
    for (std::size_t i = 0; i < m_; ++i) {
        if (!is_artificial(basis_[i])) continue;
        for (std::size_t r = 0; r < m_; ++r) inverse_row[r] = inverse_[r * m_ + i];
        std::size_t best_col = n_;
        double best = options_.pivot_tol;
        for (std::size_t col = 0; col < n_; ++col) {
            if (basis_pos_[col] >= 0) continue;
            double alpha = 0.0;
            for (auto k = spec_->col_start[col]; k < spec_->col_start[col + 1]; ++k) {
                const auto row = spec_->row_index[k];
                alpha += inverse_row[row] * row_sign_[row] * spec_->col_value[k];
            }
            if (std::abs(alpha) > best) {
                best = std::abs(alpha);
                best_col = col;
            }
        }
        // No candidate: the row is redundant and its artificial stays at zero.
        if (best_col == n_) continue;
        column_times_inverse(best_col, direction);
        const double value = x_basic_[i] / direction[i];
        if (value != 0.0) simd::axpy(-value, direction, x_basic_);
        x_basic_[i] = value;
        pivot(i, best_col, direction);
    }
}

bool SimplexSolver::ensure_feasible_basis() {
    if (feasible_) return true;
    if (infeasible_) return false;

    basis_.resize(m_);
    basis_pos_.assign(n_ + m_, -1);
    for (std::size_t i = 0; i < m_; ++i) {
        basis_[i] = n_ + i;
        basis_pos_[n_ + i] = static_cast<std::int64_t>(i);
    }
    inverse_.assign(m_ * m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) inverse_[i * m_ + i] = 1.0;
    x_basic_ = rhs_;
    rhs_work_ = rhs_;
    perturbed_ = false;
    updates_since_refactor_ = 0;
    pivots_this_solve_ = 0;

    std::vector<double> cost(n_ + m_, 0.0);
    std::fill(cost.begin() + static_cast<std::ptrdiff_t>(n_), cost.end(), -1.0);
    const auto outcome = optimize(cost, true);
    if (outcome == Outcome::kIterationLimit) return false;
    refactor();

    double infeasibility = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
        if (is_artificial(basis_[i])) infeasibility += std::max(x_basic_[i], 0.0);
    }
    double scale = 1.0;
    for (double b : rhs_) scale = std::max(scale, std::abs(b));
    if (infeasibility > 1e-9 * scale) {
        infeasible_ = true;
        return false;
    }
    drive_out_artificials();
    for (std::size_t i = 0; i < m_; ++i) {
        if (is_artificial(basis_[i])) x_basic_[i] = 0.0;
    }
    feasible_ = true;
    return true;
}

std::vector<double> SimplexSolver::extract_point() const {
    std::vector<double> x(spec_->lower_bounds);
    for (std::size_t i = 0; i < m_; ++i) {
        if (!is_artificial(basis_[i])) x[basis_[i]] += std::max(x_basic_[i], 0.0);
    }
    return x;
}

LpSolution SimplexSolver::solve(std::span<const double> objective, Sense sense) {
    if (objective.size() != n_) throw DimensionMismatch("objective does not match polytope");
    LpSolution result;
    pivots_this_solve_ = 0;
    if (!ensure_feasible_basis()) {
        result.status = infeasible_ ? LpStatus::kInfeasible : LpStatus::kIterationLimit;
        result.pivots = pivots_this_solve_;
        return result;
    }
    pivots_this_solve_ = 0;

    std::vector<double> cost(n_ + m_, 0.0);
    const double sign = sense == Sense::kMaximize ? 1.0 : -1.0;
    for (std::size_t col = 0; col < n_; ++col) cost[col] = sign * objective[col];

    const auto outcome = optimize(cost, false);
    result.pivots = pivots_this_solve_;
    switch (outcome) {
        case Outcome::kUnbounded: result.status = LpStatus::kUnbounded; return result;
        case Outcome::kIterationLimit: result.status = LpStatus::kIterationLimit; return result;
        case Outcome::kOptimal: break;
    }

    result.point = extract_point();
    if (polytope_residuals(*spec_, result.point).equality > 1e-10) {
        refactor();
        result.point = extract_point();
    }
    result.status = LpStatus::kOptimal;
    result.objective_value = 0.0;
    for (std::size_t col = 0; col < n_; ++col) result.objective_value += objective[col] * result.point[col];
    return result;
}

} // namespace divplan
