#pragma once

#include <cstdint>
#include <vector>

namespace divplan::detail {

using Digraph = std::vector<std::vector<std::uint32_t>>;

struct Components {
    std::vector<std::uint32_t> id; // component of each node
    std::uint32_t count = 0;
};

/// Tarjan's algorithm, iterative. Component ids come out in reverse
/// topological order of the condensation.
Components strongly_connected_components(const Digraph& g);

/// Marks for each component whether no edge leaves it.
std::vector<bool> closed_components(const Digraph& g, const Components& c);

/// Nodes from which some node with target[v] == true is reachable.
std::vector<bool> can_reach(const Digraph& g, const std::vector<bool>& target);

} // namespace divplan::detail
