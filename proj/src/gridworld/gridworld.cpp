#include "divplan/gridworld.hpp"

#include <algorithm>
#include <deque>
#include <random>
#include <set>

#include <json.hpp>

#include "divplan/error.hpp"

namespace divplan::grid {

std::string_view to_string(Layout layout) {
    return layout == Layout::kFourRoom ? "four_room" : "nine_room";
}

Layout parse_layout(std::string_view text) {
    if (text == "four" || text == "four_room") return Layout::kFourRoom;
    if (text == "nine" || text == "nine_room") return Layout::kNineRoom;
    throw DomainError("unknown layout '" + std::string(text) + "'");
}

GridRewards default_rewards(Layout layout) {
    if (layout == Layout::kFourRoom) return {-200.0, 400.0, -4.0};
    return {-40.0, 200.0, -1.2};
}

std::vector<std::pair<int, int>> room_bands(Layout layout) {
    // 1 + 8 + 1 + 8 + 1 and 1 + 5 + 1 + 5 + 1 + 5 + 1 cells per axis.
    if (layout == Layout::kFourRoom) return {{1, 8}, {10, 17}};
    return {{1, 5}, {7, 11}, {13, 17}};
}

Cell neighbor(const GridWorldSpec& spec, Cell from, Action action) {
    Cell to = from;
    switch (action) {
        case Action::kDown: ++to.row; break;
        case Action::kLeft: --to.col; break;
        case Action::kUp: --to.row; break;
        case Action::kRight: ++to.col; break;
        case Action::kStop: break;
    }
    return spec.in_bounds(to) ? to : from;
}

namespace {

constexpr int kGridSize = 19;

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
    return static_cast<std::size_t>(rng() % n);
}

bool contains(const std::vector<Cell>& cells, Cell c) {
    return std::find(cells.begin(), cells.end(), c) != cells.end();
}

struct Segment {
    std::vector<Cell> cells; // ordered along the wall
};

std::vector<int> wall_lines(Layout layout) {
    std::vector<int> lines{0};
    for (const auto& band : room_bands(layout)) lines.push_back(band.second + 1);
    return lines;
}

std::vector<Segment> interior_segments(Layout layout) {
    const auto bands = room_bands(layout);
    const auto lines = wall_lines(layout);
    std::vector<Segment> segments;
    for (std::size_t li = 1; li + 1 < lines.size(); ++li) {
        for (const auto& band : bands) {
            Segment seg;
            for (int r = band.first; r <= band.second; ++r) seg.cells.push_back({r, lines[li]});
            segments.push_back(std::move(seg));
        }
    }
    for (std::size_t li = 1; li + 1 < lines.size(); ++li) {
        for (const auto& band : bands) {
            Segment seg;
            for (int c = band.first; c <= band.second; ++c) seg.cells.push_back({lines[li], c});
            segments.push_back(std::move(seg));
        }
    }
    return segments;
}

std::vector<Cell> room_cells(std::pair<int, int> rows, std::pair<int, int> cols) {
    std::vector<Cell> out;
    for (int r = rows.first; r <= rows.second; ++r) {
        for (int c = cols.first; c <= cols.second; ++c) out.push_back({r, c});
    }
    return out;
}

std::optional<GridWorldSpec> sample_layout(Layout layout, std::mt19937_64& rng) {
    GridWorldSpec spec;
    spec.width = spec.height = kGridSize;
    spec.layout = layout;

    // Doors avoid the two endpoints of each segment.
    for (const auto& seg : interior_segments(layout)) {
        const auto choices = seg.cells.size() - 2;
        spec.door_cells.push_back(seg.cells[1 + uniform_index(rng, choices)]);
    }

    const auto lines = wall_lines(layout);
    for (int r = 0; r < kGridSize; ++r) {
        for (int c = 0; c < kGridSize; ++c) {
            const bool on_line = std::find(lines.begin(), lines.end(), r) != lines.end() ||
                                 std::find(lines.begin(), lines.end(), c) != lines.end();
            if (on_line && !contains(spec.door_cells, {r, c})) spec.wall_cells.push_back({r, c});
        }
    }

    const auto bands = room_bands(layout);
    const auto top_left = room_cells(bands.front(), bands.front());
    const auto bottom_right = room_cells(bands.back(), bands.back());
    spec.start_cell = top_left[uniform_index(rng, top_left.size())];
    spec.goal_cell = bottom_right[uniform_index(rng, bottom_right.size())];

    for (const auto& rows : bands) {
        for (const auto& cols : bands) {
            std::vector<Cell> candidates;
            for (const auto& cell : room_cells(rows, cols)) {
                if (cell == spec.start_cell || cell == spec.goal_cell) continue;
                const bool door_adjacent = std::any_of(spec.door_cells.begin(), spec.door_cells.end(), [&](Cell d) {
                    return std::abs(d.row - cell.row) + std::abs(d.col - cell.col) == 1;
                });
                if (!door_adjacent) candidates.push_back(cell);
            }
            if (candidates.empty()) return std::nullopt;
            spec.obstacle_cells.push_back(candidates[uniform_index(rng, candidates.size())]);
        }
    }
    return spec;
}

} // namespace

bool goal_reachable(const GridWorldSpec& spec) {
    std::vector<bool> blocked(spec.num_cells(), false);
    for (const auto& c : spec.wall_cells) blocked[spec.state(c)] = true;
    for (const auto& c : spec.obstacle_cells) blocked[spec.state(c)] = true;
    if (blocked[spec.state(spec.start_cell)] || blocked[spec.state(spec.goal_cell)]) return false;

    std::vector<bool> seen(spec.num_cells(), false);
    std::deque<Cell> queue{spec.start_cell};
    seen[spec.state(spec.start_cell)] = true;
    while (!queue.empty()) {
        const Cell cur = queue.front();
        queue.pop_front();
        if (cur == spec.goal_cell) return true;
        for (auto a : {Action::kDown, Action::kLeft, Action::kUp, Action::kRight}) {
            const Cell next = neighbor(spec, cur, a);
            const auto idx = spec.state(next);
            if (!seen[idx] && !blocked[idx]) {
                seen[idx] = true;
                queue.push_back(next);
            }
        }
    }
    return false;
}

MdpModel build_mdp(const GridWorldSpec& spec) {
    const auto ns = spec.num_cells();
    std::vector<double> destination_reward(ns, spec.rewards.step_reward);
    for (const auto& c : spec.wall_cells) destination_reward[spec.state(c)] = spec.rewards.wall_obstacle_penalty;
    for (const auto& c : spec.obstacle_cells) destination_reward[spec.state(c)] = spec.rewards.wall_obstacle_penalty;
    destination_reward[spec.state(spec.goal_cell)] = spec.rewards.goal_reward;

    std::vector<double> transition(ns * kNumActions * ns, 0.0);
    std::vector<double> reward(ns * kNumActions, 0.0);
    const auto goal = spec.state(spec.goal_cell);
    const auto start = spec.state(spec.start_cell);
    constexpr Action kMoves[] = {Action::kDown, Action::kLeft, Action::kUp, Action::kRight};

    for (std::size_t s = 0; s < ns; ++s) {
        const Cell here = spec.cell(s);
        for (std::size_t a = 0; a < kNumActions; ++a) {
            double* row = transition.data() + (s * kNumActions + a) * ns;
            if (s == goal) {
                row[start] = 1.0;
            } else if (static_cast<Action>(a) == Action::kStop) {
                row[s] = 1.0;
            } else {
                const auto intended = static_cast<Action>(a);
                row[spec.state(neighbor(spec, here, intended))] += spec.alpha;
                std::vector<std::size_t> slips;
                for (auto other : kMoves) {
                    if (other != intended) slips.push_back(spec.state(neighbor(spec, here, other)));
                }
                if (spec.slip_to_stay) slips.push_back(s);
                const double slip_mass = 1.0 - spec.alpha;
                const double each = slip_mass / static_cast<double>(slips.size());
                double assigned = 0.0;
                for (std::size_t i = 0; i + 1 < slips.size(); ++i) {
                    row[slips[i]] += each;
                    assigned += each;
                }
                row[slips.back()] += slip_mass - assigned;
            }
            double r = 0.0;
            for (std::size_t next = 0; next < ns; ++next) r += row[next] * destination_reward[next];
            reward[s * kNumActions + a] = r;
        }
    }
    return MdpModel(ns, kNumActions, std::move(transition), std::move(reward));
}

GridWorld generate(Layout layout, std::uint64_t seed, double alpha, const GridOptions& options) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in (0, 1]");
    std::mt19937_64 rng(seed);
    for (std::size_t attempt = 0; attempt < options.max_attempts; ++attempt) {
        auto spec = sample_layout(layout, rng);
        if (!spec || !goal_reachable(*spec)) continue;
        spec->alpha = alpha;
        spec->seed = seed;
        spec->slip_to_stay = options.slip_to_stay;
        spec->rewards = options.rewards.value_or(default_rewards(layout));
        auto mdp = build_mdp(*spec);
        return GridWorld{std::move(*spec), std::move(mdp)};
    }
    throw GenerationFailure("no reachable layout after " + std::to_string(options.max_attempts) + " attempts");
}

std::string spec_to_json(const GridWorldSpec& spec) {
    auto cells = [](const std::vector<Cell>& v) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& c : v) arr.push_back({c.row, c.col});
        return arr;
    };
    nlohmann::json j;
    j["width"] = spec.width;
    j["height"] = spec.height;
    j["layout"] = std::string(to_string(spec.layout));
    j["wall_cells"] = cells(spec.wall_cells);
    j["obstacle_cells"] = cells(spec.obstacle_cells);
    j["door_cells"] = cells(spec.door_cells);
    j["start_cell"] = {spec.start_cell.row, spec.start_cell.col};
    j["goal_cell"] = {spec.goal_cell.row, spec.goal_cell.col};
    j["alpha"] = spec.alpha;
    j["rewards"] = {{"wall_obstacle_penalty", spec.rewards.wall_obstacle_penalty},
                    {"goal_reward", spec.rewards.goal_reward},
                    {"step_reward", spec.rewards.step_reward}};
    j["seed"] = spec.seed;
    j["slip_to_stay"] = spec.slip_to_stay;
    return j.dump(2);
}

} // namespace divplan::grid
