#include <chrono>
#include <cmath>

#include "divplan/error.hpp"
#include "divplan/simd/kernels.hpp"
#include "divplan/solvers.hpp"
#include "solver_internal.hpp"

namespace divplan {

SolveReport pga(const MdpModel& m, const SolverConfig& cfg, std::optional<OccupancySet> initial) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };

    const auto spec = build_polytope(m, cfg.delta_floor);
    ProjectionOptions options;
    options.max_iterations = cfg.projection_max_iterations;
    options.gap_tolerance = cfg.projection_gap_tolerance;
    const Projector prototype(m, spec, options);
    std::vector<Projector> projectors(cfg.k, prototype);

    if (initial) detail::check_initial(m, cfg, *initial);
    auto members = detail::to_vectors(initial ? *initial : initialize_members(m, cfg));
    const auto ocfg = cfg.objective();
    const auto n = m.num_pairs();
    const double eta = cfg.pga_step();

    std::vector<IterationRecord> trace;
    Termination termination = Termination::kMaxIterations;
    std::vector<double> half(n);
    for (std::size_t t = 0; t <= cfg.max_iterations; ++t) {
        if (cfg.observer) cfg.observer(t, members);
        const auto eval = eval_f(detail::to_set(m, members), m, ocfg);
        double moved_sq = 0.0;
        std::vector<std::vector<double>> next(cfg.k);
        for (std::size_t i = 0; i < cfg.k; ++i) {
            detail::step_member(members[i], eval.gradient[i], eta, half);
            auto projected = projectors[i].project(half, members[i]);
            next[i].assign(projected.rho.values().begin(), projected.rho.values().end());
            moved_sq += simd::squared_distance(next[i], members[i]);
        }
        members = std::move(next);

        const double moved = std::sqrt(moved_sq);
        const double measure =
            cfg.pga_stop_rule == PgaStopRule::kGradientMapping ? moved / eta : moved;
        trace.push_back({t, eval_value(members, m, ocfg), measure, eta, elapsed()});
        if (measure <= cfg.pga_step_tolerance) {
            termination = Termination::kMapping;
            break;
        }
    }
    return detail::finish_report("pga", m, cfg, std::move(members), std::move(trace), elapsed(), termination);
}

} // namespace divplan
