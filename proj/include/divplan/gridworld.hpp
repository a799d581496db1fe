#pragma once

// Procedural 19x19 four-room and nine-room grid worlds.
//
// Every cell is a state, walls and obstacles included: they are enterable
// and entering one costs the penalty. Moves off the grid leave the agent in
// place. A directional action reaches its intended neighbor with
// probability alpha and otherwise one of the other three neighbors
// uniformly (optionally the current cell as a fourth slip outcome). The goal
// sends the agent back to the start under every action. Rewards belong to
// the destination cell of a transition.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "divplan/mdp.hpp"

namespace divplan::grid {

enum class Layout { kFourRoom, kNineRoom };

std::string_view to_string(Layout layout);
/// Accepts "four", "four_room", "nine", "nine_room".
Layout parse_layout(std::string_view text);

/// Action order of the generated MDPs.
enum class Action : std::size_t { kDown = 0, kLeft = 1, kUp = 2, kRight = 3, kStop = 4 };
inline constexpr std::size_t kNumActions = 5;

struct Cell {
    int row = 0;
    int col = 0;
    auto operator<=>(const Cell&) const = default;
};

struct GridRewards {
    double wall_obstacle_penalty;
    double goal_reward;
    double step_reward;
};

/// -200/+400/-4 for four rooms, -40/+200/-1.2 for nine rooms.
GridRewards default_rewards(Layout layout);

struct GridWorldSpec {
    int width = 19;
    int height = 19;
    Layout layout = Layout::kFourRoom;
    std::vector<Cell> wall_cells;
    std::vector<Cell> obstacle_cells;
    std::vector<Cell> door_cells;
    Cell start_cell;
    Cell goal_cell;
    double alpha = 0.95;
    GridRewards rewards{-200.0, 400.0, -4.0};
    std::uint64_t seed = 0;
    bool slip_to_stay = false;

    std::size_t num_cells() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }
    std::size_t state(Cell c) const { return static_cast<std::size_t>(c.row) * static_cast<std::size_t>(width) + static_cast<std::size_t>(c.col); }
    Cell cell(std::size_t state) const {
        return {static_cast<int>(state / static_cast<std::size_t>(width)), static_cast<int>(state % static_cast<std::size_t>(width))};
    }
    bool in_bounds(Cell c) const { return c.row >= 0 && c.row < height && c.col >= 0 && c.col < width; }
};

struct GridOptions {
    bool slip_to_stay = false;
    std::optional<GridRewards> rewards;
    std::size_t max_attempts = 1000;
};

struct GridWorld {
    GridWorldSpec spec;
    MdpModel mdp;
};

/// Samples doors, start, goal and obstacles uniformly, resampling until the
/// goal is reachable. Throws DomainError for alpha outside (0,1] and
/// GenerationFailure after options.max_attempts rejections.
GridWorld generate(Layout layout, std::uint64_t seed, double alpha, const GridOptions& options = {});

MdpModel build_mdp(const GridWorldSpec& spec);

/// Breadth-first search from start to goal through cells that are neither
/// walls nor obstacles.
bool goal_reachable(const GridWorldSpec& spec);

/// Cell reached by a move, the cell itself when the move leaves the grid.
Cell neighbor(const GridWorldSpec& spec, Cell from, Action action);

/// Room boundaries along one axis: {first, last} cell index of each band.
std::vector<std::pair<int, int>> room_bands(Layout layout);

std::string spec_to_json(const GridWorldSpec& spec);

/// Standalone SVG: walls and obstacles black, start red, goal purple.
/// Every cell is one <rect> whose class names its kind.
std::string render_spec_svg(const GridWorldSpec& spec);

/// Same base layer with the state marginal of rho overlaid in blue, opacity
/// proportional to marginal / max marginal. Throws DimensionMismatch when
/// rho does not cover the grid with kNumActions actions.
std::string render_occupancy_svg(const GridWorldSpec& spec, const OccupancyMeasure& rho);

} // namespace divplan::grid
