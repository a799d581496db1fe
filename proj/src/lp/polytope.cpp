#include "divplan/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

#include "divplan/error.hpp"

namespace divplan {

PolytopeSpec build_polytope(const MdpModel& m, double floor) {
    const auto ns = m.num_states();
    const auto n = m.num_pairs();
    if (!(floor >= 0.0)) throw DomainError("polytope floor must be nonnegative");
    if (floor * static_cast<double>(n) > 1.0) {
        throw FloorInfeasible("floor " + std::to_string(floor) + " times " + std::to_string(n) +
                              " pairs exceeds unit mass");
    }

    PolytopeSpec spec;
    spec.num_rows = ns;
    spec.num_cols = n;
    spec.equality_matrix.assign(ns * n, 0.0);
    spec.equality_rhs.assign(ns, 0.0);
    spec.equality_rhs.back() = 1.0;
    spec.lower_bounds.assign(n, floor);

    const auto norm_row = ns - 1;
    auto at = [&](std::size_t row, std::size_t col) -> double& { return spec.equality_matrix[row * n + col]; };
    for (std::size_t s = 0; s < ns; ++s) {
        for (std::size_t a = 0; a < m.num_actions(); ++a) {
            const auto col = m.index(s, a);
            // Outflow of (s,a) minus its contribution to each successor's inflow.
            if (s != norm_row) at(s, col) += 1.0;
            for (const auto& succ : m.successors(s, a)) {
                if (succ.state != norm_row) at(succ.state, col) -= succ.prob;
            }
            at(norm_row, col) = 1.0;
        }
    }

    spec.col_start.reserve(n + 1);
    spec.col_start.push_back(0);
    for (std::size_t col = 0; col < n; ++col) {
        for (std::size_t row = 0; row < ns; ++row) {
            const double v = spec.equality_matrix[row * n + col];
            if (v != 0.0) {
                spec.row_index.push_back(static_cast<std::uint32_t>(row));
                spec.col_value.push_back(v);
            }
        }
        spec.col_start.push_back(spec.row_index.size());
    }
    return spec;
}

PolytopeResiduals polytope_residuals(const PolytopeSpec& spec, std::span<const double> x) {
    if (x.size() != spec.num_cols) throw DimensionMismatch("point does not match polytope");
    std::vector<double> ax(spec.num_rows, 0.0);
    for (std::size_t col = 0; col < spec.num_cols; ++col) {
        for (auto k = spec.col_start[col]; k < spec.col_start[col + 1]; ++k) {
            ax[spec.row_index[k]] += spec.col_value[k] * x[col];
        }
    }
    PolytopeResiduals r{0.0, 0.0};
    for (std::size_t row = 0; row < spec.num_rows; ++row) {
        r.equality = std::max(r.equality, std::abs(ax[row] - spec.equality_rhs[row]));
    }
    for (std::size_t col = 0; col < spec.num_cols; ++col) {
        r.bound = std::min(r.bound, x[col] - spec.lower_bounds[col]);
    }
    return r;
}

void write_polytope(std::ostream& os, const PolytopeSpec& spec) {
    char buf[32];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << buf;
    };
    os << "polytope " << spec.num_rows << ' ' << spec.num_cols << "\nmatrix\n";
    for (std::size_t row = 0; row < spec.num_rows; ++row) {
        for (std::size_t col = 0; col < spec.num_cols; ++col) {
            if (col) os << ' ';
            put(spec.equality_matrix[row * spec.num_cols + col]);
        }
        os << '\n';
    }
    os << "rhs\n";
    for (std::size_t row = 0; row < spec.num_rows; ++row) {
        if (row) os << ' ';
        put(spec.equality_rhs[row]);
    }
    os << "\nlower_bounds\n";
    for (std::size_t col = 0; col < spec.num_cols; ++col) {
        if (col) os << ' ';
        put(spec.lower_bounds[col]);
    }
    os << '\n';
}

std::string_view to_string(LpStatus status) {
    switch (status) {
        case LpStatus::kOptimal: return "optimal";
        case LpStatus::kInfeasible: return "infeasible";
        case LpStatus::kUnbounded: return "unbounded";
        case LpStatus::kIterationLimit: return "iteration-limit";
    }
    return "unknown";
}

LpSolution solve_lp(const PolytopeSpec& spec, std::span<const double> objective, Sense sense,
                    const LpOptions& options) {
    SimplexSolver solver(spec, options);
    return solver.solve(objective, sense);
}

OptimalPolicyResult optimal_policy_lp(const MdpModel& m) {
    const auto spec = build_polytope(m, 0.0);
    auto sol = solve_lp(spec, m.rewards(), Sense::kMaximize);
    if (sol.status != LpStatus::kOptimal) {
        throw LpFailure("optimal policy LP ended with status " + std::string(to_string(sol.status)));
    }
    OccupancyMeasure rho(m.num_states(), m.num_actions(), std::move(sol.point));
    const double value = average_reward(rho, m);
    return {std::move(rho), value};
}

StationaryPolicy sample_policy(std::size_t num_states, std::size_t num_actions, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<double> probs(num_states * num_actions);
    for (std::size_t s = 0; s < num_states; ++s) {
        double total = 0.0;
        for (std::size_t a = 0; a < num_actions; ++a) {
            // Unit exponentials normalized per state give a flat Dirichlet draw.
            const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
            const double e = -std::log1p(-u);
            probs[s * num_actions + a] = e;
            total += e;
        }
        if (total <= 0.0) {
            for (std::size_t a = 0; a < num_actions; ++a) probs[s * num_actions + a] = 1.0;
            total = static_cast<double>(num_actions);
        }
        for (std::size_t a = 0; a < num_actions; ++a) probs[s * num_actions + a] /= total;
        // Make the row sum exact for the policy constructor.
        double partial = 0.0;
        for (std::size_t a = 0; a + 1 < num_actions; ++a) partial += probs[s * num_actions + a];
        probs[s * num_actions + num_actions - 1] = std::max(0.0, 1.0 - partial);
    }
    return StationaryPolicy(num_states, num_actions, std::move(probs));
}

OccupancyMeasure sample_feasible(const MdpModel& m, std::uint64_t seed) {
    return policy_to_occupancy(m, sample_policy(m.num_states(), m.num_actions(), seed));
}

} // namespace divplan
