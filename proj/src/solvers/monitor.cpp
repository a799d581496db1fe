#include <algorithm>
#include <cmath>

#include "divplan/solvers.hpp"

namespace divplan {

MonitorSummary convergence_monitor(std::span<const double> measures, const MonitorOptions& options) {
    MonitorSummary out;
    double running = 0.0;
    for (std::size_t t = 0; t < measures.size(); ++t) {
        running = t == 0 ? measures[0] : std::min(running, measures[t]);
        out.min_prefix.push_back(running);
        out.scaled.push_back(running * std::sqrt(static_cast<double>(t + 1)));
    }
    if (out.scaled.empty()) return out;
    const auto ref = std::min(options.reference_t, out.scaled.size() - 1);
    out.bound = options.factor * out.scaled[ref];
    for (std::size_t t = ref; t < out.scaled.size(); ++t) {
        if (out.scaled[t] > out.bound) out.bounded = false;
    }
    return out;
}

MonitorSummary convergence_monitor(const SolveReport& report, const MonitorOptions& options) {
    std::vector<double> measures;
    measures.reserve(report.per_iteration.size());
    for (const auto& rec : report.per_iteration) measures.push_back(rec.measure);
    return convergence_monitor(measures, options);
}

} // namespace divplan
