#include <algorithm>
#include <cstdio>
#include <sstream>

#include "divplan/error.hpp"
#include "divplan/gridworld.hpp"

namespace divplan::grid {

namespace {

constexpr int kCellPx = 20;

enum class Kind { kFloor, kWall, kObstacle, kDoor, kStart, kGoal };

const char* class_name(Kind k) {
    switch (k) {
        case Kind::kFloor: return "floor";
        case Kind::kWall: return "wall";
        case Kind::kObstacle: return "obstacle";
        case Kind::kDoor: return "door";
        case Kind::kStart: return "start";
        case Kind::kGoal: return "goal";
    }
    return "floor";
}

const char* fill(Kind k) {
    switch (k) {
        case Kind::kWall:
        case Kind::kObstacle: return "#000000";
        case Kind::kStart: return "#ff0000";
        case Kind::kGoal: return "#800080";
        default: return "#ffffff";
    }
}

std::vector<Kind> classify(const GridWorldSpec& spec) {
    std::vector<Kind> kinds(spec.num_cells(), Kind::kFloor);
    for (const auto& c : spec.wall_cells) kinds[spec.state(c)] = Kind::kWall;
    for (const auto& c : spec.door_cells) kinds[spec.state(c)] = Kind::kDoor;
    for (const auto& c : spec.obstacle_cells) kinds[spec.state(c)] = Kind::kObstacle;
    if (spec.in_bounds(spec.start_cell)) kinds[spec.state(spec.start_cell)] = Kind::kStart;
    if (spec.in_bounds(spec.goal_cell)) kinds[spec.state(spec.goal_cell)] = Kind::kGoal;
    return kinds;
}

void rect(std::ostringstream& os, const char* cls, Cell c, const char* color, const char* extra = "") {
    os << "  <rect class=\"" << cls << "\" x=\"" << c.col * kCellPx << "\" y=\"" << c.row * kCellPx
       << "\" width=\"" << kCellPx << "\" height=\"" << kCellPx << "\" fill=\"" << color << "\"" << extra
       << "/>\n";
}

void open_svg(std::ostringstream& os, const GridWorldSpec& spec) {
    const int w = spec.width * kCellPx;
    const int h = spec.height * kCellPx;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
       << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
}

void base_layer(std::ostringstream& os, const GridWorldSpec& spec, const std::vector<Kind>& kinds,
                bool markers) {
    for (std::size_t s = 0; s < kinds.size(); ++s) {
        Kind k = kinds[s];
        if (!markers && (k == Kind::kStart || k == Kind::kGoal)) k = Kind::kFloor;
        rect(os, class_name(k), spec.cell(s), fill(k), " stroke=\"#cccccc\" stroke-width=\"0.5\"");
    }
}

} // namespace

std::string render_spec_svg(const GridWorldSpec& spec) {
    std::ostringstream os;
    open_svg(os, spec);
    base_layer(os, spec, classify(spec), true);
    os << "</svg>\n";
    return os.str();
}

std::string render_occupancy_svg(const GridWorldSpec& spec, const OccupancyMeasure& rho) {
    if (rho.num_states() != spec.num_cells() || rho.num_actions() != kNumActions) {
        throw DimensionMismatch("occupancy measure does not match the grid");
    }
    const auto marginal = state_occupancy(rho);
    const double peak = *std::max_element(marginal.begin(), marginal.end());
    const auto kinds = classify(spec);

    std::ostringstream os;
    open_svg(os, spec);
    // Start and goal are drawn after the heat layer so they stay visible.
    base_layer(os, spec, kinds, false);
    if (peak > 0.0) {
        char buf[64];
        for (std::size_t s = 0; s < marginal.size(); ++s) {
            if (marginal[s] <= 0.0) continue;
            std::snprintf(buf, sizeof buf, " fill-opacity=\"%.6f\"", marginal[s] / peak);
            rect(os, "occupancy", spec.cell(s), "#0000ff", buf);
        }
    }
    for (std::size_t s = 0; s < kinds.size(); ++s) {
        if (kinds[s] == Kind::kStart || kinds[s] == Kind::kGoal) {
            rect(os, class_name(kinds[s]), spec.cell(s), fill(kinds[s]), " fill-opacity=\"0.8\"");
        }
    }
    os << "</svg>\n";
    return os.str();
}

} // namespace divplan::grid
