#pragma once

// MDP interchange format: a JSON object with num_states, num_actions,
// transition[s][a][s'], reward as [s][a] or [s][a][s'], optional labels.

#include <filesystem>
#include <iosfwd>
#include <string>

#include "divplan/mdp.hpp"

namespace divplan {

/// Parses and validates; throws ParseError on malformed input or any
/// violated MdpModel invariant.
MdpModel parse_mdp_json(const std::string& text);
MdpModel load_mdp(const std::filesystem::path& path);

/// Writes r(s,a), or R(s,a,s') when the model carries it.
std::string mdp_to_json(const MdpModel& m);
void save_mdp(const MdpModel& m, const std::filesystem::path& path);

} // namespace divplan
