#include "divplan/report_io.hpp"

#include <charconv>
#include <ostream>

#include <json.hpp>

namespace divplan {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string report_to_json(const SolveReport& report, bool include_members) {
    nlohmann::json j;
    j["solver"] = report.solver;
    j["k"] = report.final_set.size();
    j["objective"] = report.objective;
    j["wall_time_s"] = report.wall_time;
    j["termination"] = std::string(to_string(report.termination));
    j["reward_per_policy"] = report.reward_per_policy;
    j["mean_reward_per_policy"] = report.mean_reward_per_policy();
    j["average_pairwise_jsd"] = report.average_pairwise_jsd();
    const auto k = report.final_set.size();
    nlohmann::json matrix = nlohmann::json::array();
    for (std::size_t i = 0; i < k; ++i) {
        matrix.push_back(std::vector<double>(report.pairwise_jsd.begin() + static_cast<std::ptrdiff_t>(i * k),
                                             report.pairwise_jsd.begin() + static_cast<std::ptrdiff_t>((i + 1) * k)));
    }
    j["pairwise_jsd"] = std::move(matrix);
    nlohmann::json trace = nlohmann::json::array();
    for (const auto& rec : report.per_iteration) {
        trace.push_back({{"t", rec.t},
                         {"objective", rec.objective},
                         {report.solver == "fw" ? "fw_gap" : "pga_measure", rec.measure},
                         {"step", rec.step},
                         {"elapsed_seconds", rec.elapsed_seconds}});
    }
    j["per_iteration"] = std::move(trace);
    if (include_members) {
        nlohmann::json members = nlohmann::json::array();
        for (std::size_t i = 0; i < k; ++i) {
            const auto& rho = report.final_set[i].values();
            const auto& pi = report.final_policies[i].probs();
            members.push_back({{"occupancy", std::vector<double>(rho.begin(), rho.end())},
                               {"policy", std::vector<double>(pi.begin(), pi.end())}});
        }
        j["members"] = std::move(members);
    }
    return j.dump(2);
}

void write_trace_csv(std::ostream& os, const SolveReport& report) {
    os << "t,objective," << (report.solver == "fw" ? "fw_gap" : "pga_measure") << ",step,elapsed_seconds\n";
    for (const auto& rec : report.per_iteration) {
        os << rec.t << ',' << format_double(rec.objective) << ',' << format_double(rec.measure) << ','
           << format_double(rec.step) << ',' << format_double(rec.elapsed_seconds) << '\n';
    }
}

void write_monitor_csv(std::ostream& os, const MonitorSummary& summary) {
    os << "t,min_measure,scaled_min_measure\n";
    for (std::size_t t = 0; t < summary.scaled.size(); ++t) {
        os << t << ',' << format_double(summary.min_prefix[t]) << ',' << format_double(summary.scaled[t])
           << '\n';
    }
}

} // namespace divplan
