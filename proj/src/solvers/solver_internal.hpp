#pragma once

#include <span>
#include <string>
#include <vector>

#include "divplan/solvers.hpp"

namespace divplan::detail {

/// out = rho + gamma * direction
void step_member(std::span<const double> rho, std::span<const double> direction, double gamma,
                 std::span<double> out);

std::vector<std::vector<double>> to_vectors(const OccupancySet& set);
OccupancySet to_set(const MdpModel& m, const std::vector<std::vector<double>>& members);
void check_initial(const MdpModel& m, const SolverConfig& cfg, const OccupancySet& init);

SolveReport finish_report(std::string solver, const MdpModel& m, const SolverConfig& cfg,
                          std::vector<std::vector<double>> members,
                          std::vector<IterationRecord> trace, double wall_time,
                          Termination termination);

} // namespace divplan::detail
