#include <algorithm>
#include <chrono>

#include "divplan/error.hpp"
#include "divplan/simd/kernels.hpp"
#include "divplan/solvers.hpp"
#include "solver_internal.hpp"

namespace divplan {

SolveReport frank_wolfe(const MdpModel& m, const SolverConfig& cfg, std::optional<OccupancySet> initial) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };

    const auto spec = build_polytope(m, cfg.delta_floor);
    SimplexSolver prototype(spec);
    if (!prototype.ensure_feasible_basis()) throw LpFailure("occupancy polytope has no feasible basis");
    std::vector<SimplexSolver> oracles(cfg.k, prototype);

    if (initial) detail::check_initial(m, cfg, *initial);
    auto members = detail::to_vectors(initial ? *initial : initialize_members(m, cfg));
    const auto ocfg = cfg.objective();
    const auto n = m.num_pairs();

    std::vector<IterationRecord> trace;
    std::vector<std::vector<double>> direction(cfg.k, std::vector<double>(n));
    Termination termination = Termination::kMaxIterations;
    for (std::size_t t = 0; t <= cfg.max_iterations; ++t) {
        if (cfg.observer) cfg.observer(t, members);
        const auto current = detail::to_set(m, members);
        const auto eval = eval_f(current, m, ocfg);

        // The constraints separate per member, so the linear maximization
        // over the product polytope is k independent LPs.
        double gap = 0.0;
        for (std::size_t i = 0; i < cfg.k; ++i) {
            auto vertex = oracles[i].solve(eval.gradient[i], Sense::kMaximize);
            if (vertex.status != LpStatus::kOptimal) {
                throw LpFailure("linear oracle ended with status " + std::string(to_string(vertex.status)));
            }
            for (std::size_t x = 0; x < n; ++x) direction[i][x] = vertex.point[x] - members[i][x];
            gap += simd::dot(direction[i], eval.gradient[i]);
        }

        // The current point is feasible, so the oracle optimum is never
        // below it; a negative sum is rounding on a zero gap.
        gap = std::max(gap, 0.0);
        trace.push_back({t, eval.value, gap, 0.0, elapsed()});
        if (gap <= cfg.fw_gap_tolerance) {
            termination = Termination::kGap;
            break;
        }
        if (t == cfg.max_iterations) break;

        const double gamma = line_search(current, direction, m, cfg, gap);
        trace.back().step = gamma;
        if (gamma > 0.0) {
            for (std::size_t i = 0; i < cfg.k; ++i) {
                std::vector<double> next(n);
                detail::step_member(members[i], direction[i], gamma, next);
                members[i] = std::move(next);
            }
        }
    }
    return detail::finish_report("fw", m, cfg, std::move(members), std::move(trace), elapsed(), termination);
}

} // namespace divplan
