#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "toposwitch/dcopf.hpp"
#include "toposwitch/model.hpp"

namespace toposwitch {

struct SubsetSumInstance {
    std::vector<double> values;   // nonzero; mixed signs allowed

    std::vector<double> positives() const {
        std::vector<double> v;
        for (double x : values) if (x > 0) v.push_back(x);
        return v;
    }
    std::vector<double> negatives() const {
        std::vector<double> v;
        for (double x : values) if (x < 0) v.push_back(x);
        return v;
    }
};

// Gadget: generator bus G feeds two mid buses through switchable susceptance
// banks (left bank x_i, right bank -y_j), and each mid bus reaches the 2 MW
// load bus through a fixed 1 MW line. Serving the load needs exactly 1 MW on
// each bottom line, which forces equal effective bank susceptances, i.e. a
// zero-sum choice of bank lines. Bank line ids are 1..m+n (left first);
// bottom lines get ids m+n+1 and m+n+2.
inline Network reduce_subset_sum(const SubsetSumInstance& inst) {
    const int G = 1, A = 2, B = 3, D = 4;
    const double big = 1e6;
    Network net;
    net.buses = {{G, 0.0}, {A, 0.0}, {B, 0.0}, {D, 2.0}};
    int next_id = 1;
    for (double x : inst.positives())
        net.lines.push_back({next_id++, G, A, x, big, true});
    for (double y : inst.negatives())
        net.lines.push_back({next_id++, G, B, -y, big, true});
    int nbank = next_id - 1;
    net.lines.push_back({next_id++, A, D, big, 1.0, true});
    net.lines.push_back({next_id++, B, D, big, 1.0, true});
    net.generators = {{1, G, 1.0, 0.0, 4.0}};
    net.reference_bus = G;
    net.finalize();
    (void)nbank;
    return net;
}

struct ReductionVerdict {
    bool agree = false;
    bool feasible = false;               // the common answer when agree
    std::vector<double> witness_subset;  // zero-sum subset (empty when NO)
    Topology witness_topology;           // feasible gadget topology when YES
};

// Dual brute force: exhaustive subset sum vs. exhaustive topology feasibility
// on the reduced network (banks switchable, bottom lines fixed in).
inline ReductionVerdict verify_reduction(const SubsetSumInstance& inst) {
    int k = (int)inst.values.size();
    if (k > 12) throw model_error("verify_reduction bounded at 12 values");

    // order values as the gadget orders its bank lines: positives then negatives
    std::vector<double> ordered = inst.positives();
    for (double y : inst.negatives()) ordered.push_back(y);

    ReductionVerdict out;
    bool ss_yes = false;
    std::uint32_t ss_mask = 0;
    for (std::uint32_t mask = 1; mask < (1u << k); ++mask) {
        double sum = 0.0;
        for (int i = 0; i < k; ++i)
            if ((mask >> i) & 1u) sum += ordered[i];
        if (std::abs(sum) < 1e-9) { ss_yes = true; ss_mask = mask; break; }
    }

    Network net = reduce_subset_sum(inst);
    int nbank = (int)net.lines.size() - 2;
    bool topo_yes = false;
    std::uint32_t topo_mask = 0;
    for (std::uint32_t mask = 0; mask < (1u << nbank); ++mask) {
        std::vector<bool> active(net.lines.size(), true);
        for (int i = 0; i < nbank; ++i) active[i] = (mask >> i) & 1u;
        NetworkView v;
        v.net = &net;
        v.active = active;
        DispatchSolution s = solve_dcopf(v);
        if (s.feasible) { topo_yes = true; topo_mask = mask; break; }
    }

    out.agree = (ss_yes == topo_yes);
    out.feasible = ss_yes;
    if (ss_yes)
        for (int i = 0; i < k; ++i)
            if ((ss_mask >> i) & 1u) out.witness_subset.push_back(ordered[i]);
    if (topo_yes) {
        for (int i = 0; i < nbank; ++i)
            out.witness_topology.statuses[net.lines[i].id] = (topo_mask >> i) & 1u;
        out.witness_topology.statuses[net.lines[nbank].id] = true;
        out.witness_topology.statuses[net.lines[nbank + 1].id] = true;
    }
    return out;
}

}  // namespace toposwitch
