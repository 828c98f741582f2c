#pragma once

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace toposwitch {

struct Bus {
    int id = 0;
    double load_mw = 0.0;
};

struct Generator {
    int id = 0;
    int bus = 0;
    double cost_per_mwh = 0.0;
    double pmin_mw = 0.0;
    double pmax_mw = 0.0;
};

struct Line {
    int id = 0;
    int from = 0;
    int to = 0;
    double susceptance = 0.0;   // b_l > 0
    double capacity_mw = 0.0;   // f-bar_l > 0
    bool in_service = true;
};

class model_error : public std::runtime_error {
public:
    explicit model_error(const std::string& what) : std::runtime_error(what) {}
};

struct Network {
    std::vector<Bus> buses;
    std::vector<Line> lines;
    std::vector<Generator> generators;
    int reference_bus = -1;

    std::map<int, int> bus_index;   // bus id -> position in buses
    std::map<int, int> line_index;
    std::map<int, int> gen_index;

    void finalize() {
        bus_index.clear(); line_index.clear(); gen_index.clear();
        for (size_t i = 0; i < buses.size(); ++i) {
            if (!bus_index.emplace(buses[i].id, (int)i).second)
                throw model_error("duplicate bus id " + std::to_string(buses[i].id));
            if (buses[i].load_mw < 0.0)
                throw model_error("negative load at bus " + std::to_string(buses[i].id));
        }
        for (size_t i = 0; i < lines.size(); ++i) {
            const Line& l = lines[i];
            if (!line_index.emplace(l.id, (int)i).second)
                throw model_error("duplicate line id " + std::to_string(l.id));
            if (!bus_index.count(l.from))
                throw model_error("line " + std::to_string(l.id) +
                                  " references missing bus " + std::to_string(l.from));
            if (!bus_index.count(l.to))
                throw model_error("line " + std::to_string(l.id) +
                                  " references missing bus " + std::to_string(l.to));
            if (l.from == l.to)
                throw model_error("line " + std::to_string(l.id) + " is a self-loop");
            if (!(l.susceptance > 0.0))
                throw model_error("line " + std::to_string(l.id) + " needs susceptance > 0");
            if (!(l.capacity_mw > 0.0))
                throw model_error("line " + std::to_string(l.id) + " needs capacity > 0");
        }
        for (size_t i = 0; i < generators.size(); ++i) {
            const Generator& g = generators[i];
            if (!gen_index.emplace(g.id, (int)i).second)
                throw model_error("duplicate generator id " + std::to_string(g.id));
            if (!bus_index.count(g.bus))
                throw model_error("generator " + std::to_string(g.id) +
                                  " references missing bus " + std::to_string(g.bus));
            if (g.pmin_mw < 0.0 || g.pmax_mw < g.pmin_mw)
                throw model_error("generator " + std::to_string(g.id) + " has bad bounds");
            if (g.cost_per_mwh < 0.0)
                throw model_error("generator " + std::to_string(g.id) + " has negative cost");
        }
        if (generators.empty())
            throw model_error("network needs at least one generator");
        if (reference_bus < 0)
            reference_bus = generators.front().bus;   // default: first generator bus
        if (!bus_index.count(reference_bus))
            throw model_error("reference bus " + std::to_string(reference_bus) + " missing");
    }

    double total_load() const {
        double s = 0.0;
        for (const Bus& b : buses) s += b.load_mw;
        return s;
    }
};

struct Topology {
    std::map<int, bool> statuses;   // line id -> in service

    static Topology all_in(const Network& net) {
        Topology t;
        for (const Line& l : net.lines) t.statuses[l.id] = l.in_service;
        return t;
    }
};

// Read-only overlay: the base network with a topology applied.
struct NetworkView {
    const Network* net = nullptr;
    std::vector<bool> active;   // by line position

    const Network& network() const { return *net; }

    bool line_active(int pos) const { return active[pos]; }

    int active_count() const {
        return (int)std::count(active.begin(), active.end(), true);
    }
};

inline NetworkView apply_topology(const Network& net, const Topology& topo) {
    if (topo.statuses.size() != net.lines.size())
        throw model_error("topology does not cover the network's lines");
    NetworkView v;
    v.net = &net;
    v.active.resize(net.lines.size());
    for (const auto& [id, on] : topo.statuses) {
        auto it = net.line_index.find(id);
        if (it == net.line_index.end())
            throw model_error("topology references unknown line " + std::to_string(id));
        v.active[it->second] = on;
    }
    return v;
}

inline NetworkView all_in_view(const Network& net) {
    NetworkView v;
    v.net = &net;
    v.active.assign(net.lines.size(), true);
    for (size_t i = 0; i < net.lines.size(); ++i) v.active[i] = net.lines[i].in_service;
    return v;
}

}  // namespace toposwitch
