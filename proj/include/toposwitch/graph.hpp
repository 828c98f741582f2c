#pragma once

#include <functional>
#include <vector>

#include "toposwitch/model.hpp"

namespace toposwitch {

// Adjacency over bus positions for the active lines of a view.
inline std::vector<std::vector<int>> adjacency(const NetworkView& v) {
    const Network& net = v.network();
    std::vector<std::vector<int>> adj(net.buses.size());
    for (size_t i = 0; i < net.lines.size(); ++i) {
        if (!v.active[i]) continue;
        int a = net.bus_index.at(net.lines[i].from);
        int b = net.bus_index.at(net.lines[i].to);
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    return adj;
}

inline bool is_connected(const NetworkView& v) {
    const Network& net = v.network();
    size_t n = net.buses.size();
    if (n == 0) return true;
    auto adj = adjacency(v);
    std::vector<bool> seen(n, false);
    std::vector<int> stack{0};
    seen[0] = true;
    size_t cnt = 1;
    while (!stack.empty()) {
        int u = stack.back(); stack.pop_back();
        for (int w : adj[u]) {
            if (!seen[w]) { seen[w] = true; ++cnt; stack.push_back(w); }
        }
    }
    return cnt == n;
}

inline std::vector<int> in_service_degrees(const NetworkView& v) {
    const Network& net = v.network();
    std::vector<int> deg(net.buses.size(), 0);
    for (size_t i = 0; i < net.lines.size(); ++i) {
        if (!v.active[i]) continue;
        ++deg[net.bus_index.at(net.lines[i].from)];
        ++deg[net.bus_index.at(net.lines[i].to)];
    }
    return deg;
}

struct N1Result {
    bool pass = true;
    bool disconnected = false;
    std::vector<int> violating_buses;   // bus ids failing the degree rule
};

// Relaxed N-1: in-service graph connected, and every load or generator bus
// keeps in-service degree >= 2.
inline N1Result check_relaxed_n1(const NetworkView& v) {
    const Network& net = v.network();
    N1Result r;
    if (!is_connected(v)) { r.pass = false; r.disconnected = true; }
    std::vector<bool> protected_bus(net.buses.size(), false);
    for (size_t i = 0; i < net.buses.size(); ++i)
        if (net.buses[i].load_mw > 0.0) protected_bus[i] = true;
    for (const Generator& g : net.generators)
        protected_bus[net.bus_index.at(g.bus)] = true;
    auto deg = in_service_degrees(v);
    for (size_t i = 0; i < net.buses.size(); ++i) {
        if (protected_bus[i] && deg[i] < 2) {
            r.pass = false;
            r.violating_buses.push_back(net.buses[i].id);
        }
    }
    return r;
}

// Bridge positions (line indices whose removal disconnects the active graph),
// via one DFS with low-links. Parallel lines are never bridges.
inline std::vector<bool> bridge_lines(const NetworkView& v) {
    const Network& net = v.network();
    size_t n = net.buses.size();
    size_t m = net.lines.size();
    struct Edge { int to; int line; };
    std::vector<std::vector<Edge>> adj(n);
    for (size_t i = 0; i < m; ++i) {
        if (!v.active[i]) continue;
        int a = net.bus_index.at(net.lines[i].from);
        int b = net.bus_index.at(net.lines[i].to);
        adj[a].push_back({b, (int)i});
        adj[b].push_back({a, (int)i});
    }
    std::vector<bool> bridge(m, false);
    std::vector<int> disc(n, -1), low(n, -1);
    int timer = 0;
    std::function<void(int, int)> dfs = [&](int u, int via_line) {
        disc[u] = low[u] = timer++;
        for (const Edge& e : adj[u]) {
            if (e.line == via_line) { via_line = -2; continue; }   // skip one copy
            if (disc[e.to] < 0) {
                dfs(e.to, e.line);
                low[u] = std::min(low[u], low[e.to]);
                if (low[e.to] > disc[u]) bridge[e.line] = true;
            } else {
                low[u] = std::min(low[u], disc[e.to]);
            }
        }
    };
    for (size_t s = 0; s < n; ++s)
        if (disc[s] < 0) dfs((int)s, -1);
    return bridge;
}

}  // namespace toposwitch
