#include "divplan/mdp_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "divplan/error.hpp"

namespace divplan {

using nlohmann::json;

namespace {

std::size_t require_count(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number_integer() || j[key].get<long long>() <= 0) {
        throw ParseError(std::string("field '") + key + "' must be a positive integer");
    }
    return j[key].get<std::size_t>();
}

void flatten(const json& node, std::size_t depth, const std::vector<std::size_t>& shape,
             std::vector<double>& out, const char* what) {
    if (depth == shape.size()) {
        if (!node.is_number()) throw ParseError(std::string(what) + " entries must be numbers");
        out.push_back(node.get<double>());
        return;
    }
    if (!node.is_array() || node.size() != shape[depth]) {
        throw ParseError(std::string(what) + " has the wrong shape at depth " + std::to_string(depth));
    }
    for (const auto& child : node) flatten(child, depth + 1, shape, out, what);
}

std::size_t nesting_depth(const json& node) {
    std::size_t depth = 0;
    const json* cur = &node;
    while (cur->is_array() && !cur->empty()) {
        ++depth;
        cur = &(*cur)[0];
    }
    return depth;
}

} // namespace

MdpModel parse_mdp_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("MDP file must hold a JSON object");
    const auto ns = require_count(j, "num_states");
    const auto na = require_count(j, "num_actions");
    if (!j.contains("transition") || !j.contains("reward")) {
        throw ParseError("MDP file needs 'transition' and 'reward'");
    }

    std::vector<double> transition;
    transition.reserve(ns * na * ns);
    flatten(j["transition"], 0, {ns, na, ns}, transition, "transition");

    std::vector<std::string> labels;
    if (j.contains("labels")) {
        if (!j["labels"].is_array()) throw ParseError("'labels' must be an array of strings");
        for (const auto& l : j["labels"]) {
            if (!l.is_string()) throw ParseError("'labels' must be an array of strings");
            labels.push_back(l.get<std::string>());
        }
    }

    std::vector<double> reward;
    const auto depth = nesting_depth(j["reward"]);
    try {
        if (depth == 2) {
            flatten(j["reward"], 0, {ns, na}, reward, "reward");
            MdpModel m(ns, na, std::move(transition), std::move(reward), std::move(labels));
            if (auto report = validate_mdp(m); !report.ok()) {
                throw ParseError("invalid MDP: " + report.violations.front().describe());
            }
            return m;
        }
        if (depth == 3) {
            flatten(j["reward"], 0, {ns, na, ns}, reward, "reward");
            auto m = MdpModel::from_transition_rewards(ns, na, std::move(transition),
                                                       std::move(reward), std::move(labels));
            if (auto report = validate_mdp(m); !report.ok()) {
                throw ParseError("invalid MDP: " + report.violations.front().describe());
            }
            return m;
        }
    } catch (const DimensionMismatch& e) {
        throw ParseError(e.what());
    }
    throw ParseError("'reward' must be [s][a] or [s][a][s']");
}

MdpModel load_mdp(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_mdp_json(buf.str());
}

std::string mdp_to_json(const MdpModel& m) {
    const auto ns = m.num_states();
    const auto na = m.num_actions();
    json j;
    j["num_states"] = ns;
    j["num_actions"] = na;
    json transition = json::array();
    json reward = json::array();
    for (std::size_t s = 0; s < ns; ++s) {
        json ts = json::array();
        json rs = json::array();
        for (std::size_t a = 0; a < na; ++a) {
            const auto row = m.transition_row(s, a);
            ts.push_back(json(std::vector<double>(row.begin(), row.end())));
            if (m.raw_reward()) {
                const double* raw = m.raw_reward()->data() + m.index(s, a) * ns;
                rs.push_back(json(std::vector<double>(raw, raw + ns)));
            } else {
                rs.push_back(m.reward(s, a));
            }
        }
        transition.push_back(std::move(ts));
        reward.push_back(std::move(rs));
    }
    j["transition"] = std::move(transition);
    j["reward"] = std::move(reward);
    if (!m.labels().empty()) j["labels"] = m.labels();
    return j.dump();
}

void save_mdp(const MdpModel& m, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << mdp_to_json(m) << '\n';
}

} // namespace divplan
