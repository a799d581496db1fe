#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "divplan/error.hpp"
#include "divplan/simd/kernels.hpp"
#include "divplan/solvers.hpp"

namespace divplan {

Projector::Projector(const MdpModel& m, const PolytopeSpec& spec, ProjectionOptions options)
    : model_(&m), spec_(&spec), options_(options), lp_(spec) {
    if (spec.num_cols != m.num_pairs()) throw DimensionMismatch("polytope does not match the MDP");
    if (!lp_.ensure_feasible_basis()) throw ProjectionFailure("occupancy polytope is empty");
}

ProjectionResult Projector::project(std::span<const double> target, std::span<const double> start) {
    const auto n = spec_->num_cols;
    if (target.size() != n) throw DimensionMismatch("projection target does not match the MDP");
    if (!start.empty() && start.size() != n) throw DimensionMismatch("projection start has wrong size");
    for (double v : target) {
        if (!std::isfinite(v)) throw DomainError("projection target must be finite");
    }

    std::vector<double> x;
    const auto target_residuals = polytope_residuals(*spec_, target);
    if (target_residuals.equality <= 1e-12 && target_residuals.bound >= 0.0) {
        x.assign(target.begin(), target.end());
    } else if (!start.empty()) {
        x.assign(start.begin(), start.end());
    } else {
        auto vertex = lp_.solve(target, Sense::kMaximize);
        if (vertex.status != LpStatus::kOptimal) {
            throw ProjectionFailure("initial vertex LP ended with status " +
                                    std::string(to_string(vertex.status)));
        }
        x = std::move(vertex.point);
    }

    // Frank-Wolfe on q(x) = ||x - target||^2: the oracle maximizes
    // <s, target - x> and the step minimizing q along s - x is closed form.
    std::vector<double> descent(n), direction(n);
    double gap = 0.0;
    std::size_t iterations = 0;
    for (; iterations <= options_.max_iterations; ++iterations) {
        for (std::size_t j = 0; j < n; ++j) descent[j] = target[j] - x[j];
        auto vertex = lp_.solve(descent, Sense::kMaximize);
        if (vertex.status != LpStatus::kOptimal) {
            throw ProjectionFailure("projection oracle ended with status " +
                                    std::string(to_string(vertex.status)));
        }
        for (std::size_t j = 0; j < n; ++j) direction[j] = vertex.point[j] - x[j];
        const double slope = simd::dot(descent, direction);
        gap = 2.0 * slope;
        if (gap <= options_.gap_tolerance || iterations == options_.max_iterations) break;
        if (options_.polish_interval > 0 && iterations % options_.polish_interval == options_.polish_interval - 1) {
            polish(target, x);
            continue;
        }
        const double length_sq = simd::dot(direction, direction);
        if (length_sq <= 0.0) break;
        const double gamma = std::clamp(slope / length_sq, 0.0, 1.0);
        simd::axpy(gamma, direction, x);
    }

    const auto residuals = polytope_residuals(*spec_, x);
    if (residuals.equality > options_.feasibility_tolerance ||
        residuals.bound < -options_.feasibility_tolerance) {
        throw ProjectionFailure("projected point misses feasibility tolerance");
    }
    return {OccupancyMeasure(model_->num_states(), model_->num_actions(), std::move(x)), gap, iterations};
}

void Projector::polish(std::span<const double> target, std::vector<double>& x) const {
    const auto& spec = *spec_;
    const auto m = spec.num_rows;
    const auto n = spec.num_cols;
    std::vector<bool> free(n);
    for (std::size_t j = 0; j < n; ++j) free[j] = x[j] > spec.lower_bounds[j];

    Eigen::MatrixXd normal(m, m);
    Eigen::VectorXd rhs(m);
    std::vector<double> z(n);
    for (std::size_t round = 0; round < n; ++round) {
        // z minimizes ||z - target|| over A z = b with the fixed coordinates
        // held at their bounds: z_F = target_F - A_F^T y.
        normal.setZero();
        for (std::size_t r = 0; r < m; ++r) rhs[static_cast<Eigen::Index>(r)] = -spec.equality_rhs[r];
        for (std::size_t j = 0; j < n; ++j) {
            const double value = free[j] ? target[j] : spec.lower_bounds[j];
            for (auto p = spec.col_start[j]; p < spec.col_start[j + 1]; ++p) {
                rhs[spec.row_index[p]] += spec.col_value[p] * value;
                if (!free[j]) continue;
                for (auto q = spec.col_start[j]; q < spec.col_start[j + 1]; ++q) {
                    normal(spec.row_index[p], spec.row_index[q]) += spec.col_value[p] * spec.col_value[q];
                }
            }
        }
        const Eigen::VectorXd y = normal.completeOrthogonalDecomposition().solve(rhs);
        for (std::size_t j = 0; j < n; ++j) {
            if (!free[j]) {
                z[j] = spec.lower_bounds[j];
                continue;
            }
            double aty = 0.0;
            for (auto p = spec.col_start[j]; p < spec.col_start[j + 1]; ++p) aty += spec.col_value[p] * y[spec.row_index[p]];
            z[j] = target[j] - aty;
        }

        // Walk from x toward z until the first free coordinate hits its bound.
        double theta = 1.0;
        std::size_t blocking = n;
        for (std::size_t j = 0; j < n; ++j) {
            if (free[j] && z[j] < spec.lower_bounds[j]) {
                const double t = (x[j] - spec.lower_bounds[j]) / (x[j] - z[j]);
                if (t < theta) {
                    theta = t;
                    blocking = j;
                }
            }
        }
        for (std::size_t j = 0; j < n; ++j) x[j] += theta * (z[j] - x[j]);
        if (blocking == n) return;
        for (std::size_t j = 0; j < n; ++j) {
            if (free[j] && x[j] <= spec.lower_bounds[j]) {
                x[j] = spec.lower_bounds[j];
                free[j] = false;
            }
        }
        x[blocking] = spec.lower_bounds[blocking];
        free[blocking] = false;
    }
}

ProjectionResult project(std::span<const double> rho_tilde, const MdpModel& m,
                         const ProjectionOptions& options) {
    const auto spec = build_polytope(m, 0.0);
    Projector projector(m, spec, options);
    return projector.project(rho_tilde);
}

} // namespace divplan
