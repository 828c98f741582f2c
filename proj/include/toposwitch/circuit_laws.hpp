#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "toposwitch/dcopf.hpp"
#include "toposwitch/graph.hpp"
#include "toposwitch/model.hpp"

namespace toposwitch {

// Current-controlled resistive circuit: same mathematics as the DC grid under
// the conductance <-> susceptance renaming.
struct CircuitEdge {
    int id = 0;
    int a = 0;
    int b = 0;
    double conductance = 0.0;
};

struct CurrentCircuit {
    std::vector<int> nodes;
    std::vector<CircuitEdge> edges;
    std::map<int, double> injections;   // node -> amperes, sums to zero
};

struct CircuitSolution {
    std::map<int, double> potentials;
    std::map<int, double> currents;   // edge id -> A, sign = a -> b
};

namespace circdetail {

inline Network to_network(const CurrentCircuit& c) {
    Network net;
    for (int n : c.nodes) net.buses.push_back({n, 0.0});
    for (const CircuitEdge& e : c.edges)
        net.lines.push_back({e.id, e.a, e.b, e.conductance, 1.0, true});
    // a placeholder generator satisfies Network invariants; unused by the solve
    net.generators.push_back({1, c.nodes.front(), 0.0, 0.0, 1.0});
    net.reference_bus = c.nodes.front();
    net.finalize();
    return net;
}

}  // namespace circdetail

inline CircuitSolution solve_current_circuit(const CurrentCircuit& c) {
    Network net = circdetail::to_network(c);
    NetworkView v = all_in_view(net);
    std::map<int, double> inj;
    for (int n : c.nodes) inj[n] = 0.0;
    for (const auto& [n, amps] : c.injections) inj.at(n) += amps;
    DcFlowResult r = solve_dc_flow(v, inj);
    CircuitSolution s;
    s.potentials = r.angles;
    s.currents = r.flows;
    return s;
}

inline double total_loss(const CurrentCircuit& c, const CircuitSolution& s) {
    double loss = 0.0;
    for (const CircuitEdge& e : c.edges) {
        double i = s.currents.at(e.id);
        loss += i * i / e.conductance;   // I^2 R
    }
    return loss;
}

struct RemovalDelta {
    double delta_loss = 0.0;      // loss(after) - loss(before), >= 0
    double identity_check = 0.0;  // |delta_loss| - |I_mn * V'_mn|
};

inline RemovalDelta removal_delta(const CurrentCircuit& c, int edge_id) {
    Network net = circdetail::to_network(c);
    int pos = net.line_index.at(edge_id);
    NetworkView before = all_in_view(net);
    auto bridges = bridge_lines(before);
    if (bridges[pos])
        throw model_error("edge " + std::to_string(edge_id) +
                          " is a bridge; removal would disconnect the circuit");
    CircuitSolution s0 = solve_current_circuit(c);
    double loss0 = total_loss(c, s0);

    CurrentCircuit after = c;
    after.edges.clear();
    for (const CircuitEdge& e : c.edges)
        if (e.id != edge_id) after.edges.push_back(e);
    CircuitSolution s1 = solve_current_circuit(after);
    double loss1 = total_loss(after, s1);

    const CircuitEdge* removed = nullptr;
    for (const CircuitEdge& e : c.edges)
        if (e.id == edge_id) removed = &e;
    double i_before = s0.currents.at(edge_id);
    double v_after = s1.potentials.at(removed->a) - s1.potentials.at(removed->b);

    RemovalDelta d;
    d.delta_loss = loss1 - loss0;
    d.identity_check = std::abs(d.delta_loss) - std::abs(i_before * v_after);
    return d;
}

// Grid reading of the same laws: f^2/B loss, capacity and margin totals.
struct CongestionReport {
    double total_loss = 0.0;       // sum f^2 / b
    double total_capacity = 0.0;   // sum fbar^2 / b
    double margin = 0.0;
};

inline CongestionReport congestion_report(const NetworkView& v,
                                          const std::map<int, double>& flows) {
    const Network& net = v.network();
    CongestionReport r;
    for (size_t i = 0; i < net.lines.size(); ++i) {
        if (!v.active[i]) continue;
        const Line& l = net.lines[i];
        double f = flows.at(l.id);
        r.total_loss += f * f / l.susceptance;
        r.total_capacity += l.capacity_mw * l.capacity_mw / l.susceptance;
    }
    r.margin = r.total_capacity - r.total_loss;
    return r;
}

// ---------------------------------------------------------------------------
// Randomized property corpus for the loss laws
// ---------------------------------------------------------------------------

namespace circdetail {

inline double uniform01(std::mt19937_64& rng) {
    return (double)(rng() >> 11) * 0x1.0p-53;
}

}  // namespace circdetail

// Random connected multigraph circuit (3..20 nodes, spanning tree plus extra
// edges, parallels allowed) with a balanced random injection pattern.
inline CurrentCircuit random_circuit(std::mt19937_64& rng) {
    int n = 3 + (int)(rng() % 18);
    CurrentCircuit c;
    for (int i = 1; i <= n; ++i) {
        c.nodes.push_back(i);
        c.injections[i] = 0.0;
    }
    int id = 1;
    for (int i = 2; i <= n; ++i) {
        int j = 1 + (int)(rng() % (i - 1));
        c.edges.push_back({id++, j, i, 0.5 + 4.5 * circdetail::uniform01(rng)});
    }
    int extra = 1 + (int)(rng() % n);
    for (int e = 0; e < extra; ++e) {
        int a = 1 + (int)(rng() % n);
        int b = 1 + (int)(rng() % n);
        if (a == b) continue;
        c.edges.push_back({id++, a, b, 0.5 + 4.5 * circdetail::uniform01(rng)});
    }
    int k = 2 + (int)(rng() % std::min(n - 1, 3));
    double sum = 0.0;
    for (int i = 0; i < k - 1; ++i) {
        int node = 1 + (int)(rng() % n);
        double amps = -10.0 + 20.0 * circdetail::uniform01(rng);
        c.injections[node] += amps;
        sum += amps;
    }
    c.injections[1 + (int)(rng() % n)] -= sum;
    // recenter so the totals balance exactly
    double total = 0.0;
    for (auto& [node, amps] : c.injections) total += amps;
    c.injections[1] -= total;
    return c;
}

struct LawsCorpusResult {
    int circuits = 0;
    int removals_checked = 0;
    int zero_current_removals = 0;
    double worst_loss_decrease = 0.0;     // most negative delta_loss seen (>= 0 good)
    double max_identity_rel_err = 0.0;
    double max_zero_current_delta = 0.0;
};

// For every non-bridge edge of every sampled circuit: removal must not lower
// total loss, and the removal delta must match |I_mn * V'_mn|.
inline LawsCorpusResult run_laws_corpus(int trials, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    LawsCorpusResult r;
    for (int t = 0; t < trials; ++t) {
        CurrentCircuit c = random_circuit(rng);
        ++r.circuits;
        CircuitSolution s0 = solve_current_circuit(c);
        double loss0 = total_loss(c, s0);
        Network net = circdetail::to_network(c);
        auto bridges = bridge_lines(all_in_view(net));
        for (size_t i = 0; i < c.edges.size(); ++i) {
            if (bridges[i]) continue;
            RemovalDelta d = removal_delta(c, c.edges[i].id);
            ++r.removals_checked;
            r.worst_loss_decrease = std::min(r.worst_loss_decrease, d.delta_loss);
            double i_before = s0.currents.at(c.edges[i].id);
            if (std::abs(i_before) < 1e-9) {
                ++r.zero_current_removals;
                r.max_zero_current_delta =
                    std::max(r.max_zero_current_delta, std::abs(d.delta_loss));
            } else {
                // floor the denominator at a sliver of the circuit's loss so a
                // microscopic delta does not amplify pure rounding noise
                double rel = std::abs(d.identity_check) /
                             std::max(std::abs(d.delta_loss), 1e-6 * loss0);
                r.max_identity_rel_err = std::max(r.max_identity_rel_err, rel);
            }
        }
    }
    return r;
}

}  // namespace toposwitch
