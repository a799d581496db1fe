#include "graph.hpp"

#include <algorithm>
#include <deque>
#include <limits>

namespace divplan::detail {

Components strongly_connected_components(const Digraph& g) {
    constexpr std::uint32_t kUnvisited = std::numeric_limits<std::uint32_t>::max();
    const auto n = static_cast<std::uint32_t>(g.size());
    Components out;
    out.id.assign(n, kUnvisited);
    std::vector<std::uint32_t> index(n, kUnvisited), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::uint32_t> stack;
    struct Frame {
        std::uint32_t node;
        std::size_t next_edge;
    };
    std::vector<Frame> call;
    std::uint32_t counter = 0;

    for (std::uint32_t root = 0; root < n; ++root) {
        if (index[root] != kUnvisited) continue;
        call.push_back({root, 0});
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call.empty()) {
            Frame& f = call.back();
            const auto v = f.node;
            if (f.next_edge < g[v].size()) {
                const auto w = g[v][f.next_edge++];
                if (index[w] == kUnvisited) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            if (low[v] == index[v]) {
                std::uint32_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    out.id[w] = out.count;
                } while (w != v);
                ++out.count;
            }
            call.pop_back();
            if (!call.empty()) {
                const auto parent = call.back().node;
                low[parent] = std::min(low[parent], low[v]);
            }
        }
    }
    return out;
}

std::vector<bool> closed_components(const Digraph& g, const Components& c) {
    std::vector<bool> closed(c.count, true);
    for (std::size_t v = 0; v < g.size(); ++v) {
        for (auto w : g[v]) {
            if (c.id[w] != c.id[v]) closed[c.id[v]] = false;
        }
    }
    return closed;
}

std::vector<bool> can_reach(const Digraph& g, const std::vector<bool>& target) {
    Digraph reverse(g.size());
    for (std::size_t v = 0; v < g.size(); ++v) {
        for (auto w : g[v]) reverse[w].push_back(static_cast<std::uint32_t>(v));
    }
    std::vector<bool> seen(target);
    std::deque<std::uint32_t> queue;
    for (std::size_t v = 0; v < g.size(); ++v) {
        if (target[v]) queue.push_back(static_cast<std::uint32_t>(v));
    }
    while (!queue.empty()) {
        const auto v = queue.front();
        queue.pop_front();
        for (auto w : reverse[v]) {
            if (!seen[w]) {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    return seen;
}

} // namespace divplan::detail
