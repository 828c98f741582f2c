#pragma once

#include <Eigen/Dense>
#include <map>
#include <vector>

#include "toposwitch/graph.hpp"
#include "toposwitch/model.hpp"
#include "toposwitch/simplex.hpp"

namespace toposwitch {

struct DispatchSolution {
    bool feasible = false;
    std::map<int, double> angles;       // bus id -> rad, reference at 0
    std::map<int, double> flows;        // line id -> MW, sign = from -> to
    std::map<int, double> gen_output;   // generator id -> MW
    std::map<int, double> prices;       // bus id -> $/MWh
    double total_cost = 0.0;
};

namespace dcdetail {

struct Component {
    std::vector<int> buses;        // bus positions
    std::vector<int> lines;        // active line positions inside the component
    std::vector<int> gens;         // generator positions
    std::vector<int> local;        // bus position -> local index (shared, -1 outside)
    int ref_local = 0;
};

inline std::vector<Component> components(const NetworkView& v) {
    const Network& net = v.network();
    int n = (int)net.buses.size();
    auto adj = adjacency(v);
    std::vector<int> comp(n, -1);
    int nc = 0;
    for (int s = 0; s < n; ++s) {
        if (comp[s] >= 0) continue;
        std::vector<int> stack{s};
        comp[s] = nc;
        while (!stack.empty()) {
            int u = stack.back(); stack.pop_back();
            for (int w : adj[u])
                if (comp[w] < 0) { comp[w] = nc; stack.push_back(w); }
        }
        ++nc;
    }
    std::vector<Component> cs(nc);
    std::vector<int> local(n, -1);
    for (int i = 0; i < n; ++i) {
        local[i] = (int)cs[comp[i]].buses.size();
        cs[comp[i]].buses.push_back(i);
    }
    for (auto& c : cs) c.local = local;
    for (size_t i = 0; i < net.lines.size(); ++i) {
        if (!v.active[i]) continue;
        int a = net.bus_index.at(net.lines[i].from);
        cs[comp[a]].lines.push_back((int)i);
    }
    for (size_t g = 0; g < net.generators.size(); ++g) {
        int b = net.bus_index.at(net.generators[g].bus);
        cs[comp[b]].gens.push_back((int)g);
    }
    int global_ref = net.bus_index.at(net.reference_bus);
    for (auto& c : cs) {
        c.ref_local = 0;
        for (size_t k = 0; k < c.buses.size(); ++k)
            if (c.buses[k] == global_ref) c.ref_local = (int)k;
    }
    return cs;
}

// Solve L_reduced * th = inj with the reference row/column removed.
struct LaplacianSolver {
    int nb = 0, ref = 0;
    Eigen::LDLT<Eigen::MatrixXd> ldlt;

    LaplacianSolver(const NetworkView& v, const Component& c) {
        const Network& net = v.network();
        nb = (int)c.buses.size();
        ref = c.ref_local;
        Eigen::MatrixXd L = Eigen::MatrixXd::Zero(nb, nb);
        for (int li : c.lines) {
            const Line& l = net.lines[li];
            int a = c.local[net.bus_index.at(l.from)];
            int b = c.local[net.bus_index.at(l.to)];
            L(a, a) += l.susceptance; L(b, b) += l.susceptance;
            L(a, b) -= l.susceptance; L(b, a) -= l.susceptance;
        }
        Eigen::MatrixXd R(nb - 1 > 0 ? nb - 1 : 1, nb - 1 > 0 ? nb - 1 : 1);
        if (nb > 1) {
            int ri = 0;
            for (int i = 0; i < nb; ++i) {
                if (i == ref) continue;
                int rj = 0;
                for (int j = 0; j < nb; ++j) {
                    if (j == ref) continue;
                    R(ri, rj) = L(i, j);
                    ++rj;
                }
                ++ri;
            }
        } else {
            R(0, 0) = 1.0;
        }
        ldlt.compute(R);
    }

    Eigen::VectorXd solve(const Eigen::VectorXd& inj) const {
        Eigen::VectorXd th = Eigen::VectorXd::Zero(nb);
        if (nb == 1) return th;
        Eigen::VectorXd rhs(nb - 1);
        int ri = 0;
        for (int i = 0; i < nb; ++i)
            if (i != ref) rhs[ri++] = inj[i];
        Eigen::VectorXd sol = ldlt.solve(rhs);
        ri = 0;
        for (int i = 0; i < nb; ++i)
            if (i != ref) th[i] = sol[ri++];
        return th;
    }
};

}  // namespace dcdetail

// DC power flow at fixed injections (bus id -> MW). Line limits not enforced.
struct DcFlowResult {
    std::map<int, double> angles;
    std::map<int, double> flows;
};

inline DcFlowResult solve_dc_flow(const NetworkView& v,
                                  const std::map<int, double>& injections) {
    const Network& net = v.network();
    if (!is_connected(v)) throw model_error("dc flow needs a connected in-service graph");
    double sum = 0.0;
    for (const auto& [bus, p] : injections) {
        if (!net.bus_index.count(bus))
            throw model_error("injection at unknown bus " + std::to_string(bus));
        sum += p;
    }
    if (std::abs(sum) > 1e-6)
        throw model_error("injections must balance to zero");
    auto comps = dcdetail::components(v);
    const auto& c = comps[0];
    dcdetail::LaplacianSolver lap(v, c);
    Eigen::VectorXd inj = Eigen::VectorXd::Zero(lap.nb);
    for (const auto& [bus, p] : injections)
        inj[c.local[net.bus_index.at(bus)]] += p;
    Eigen::VectorXd th = lap.solve(inj);
    DcFlowResult r;
    for (int i = 0; i < lap.nb; ++i) r.angles[net.buses[c.buses[i]].id] = th[i];
    for (int li : c.lines) {
        const Line& l = net.lines[li];
        double d = th[c.local[net.bus_index.at(l.from)]] -
                   th[c.local[net.bus_index.at(l.to)]];
        r.flows[l.id] = l.susceptance * d;
    }
    return r;
}

// DCOPF: min sum c_g P_g subject to nodal balance, generator bounds and
// (optionally) line limits. Limits are enforced by a deterministic
// cutting-plane loop around the bounded-variable simplex: solve with the
// current cut set, add every violated line (lowest id first), repeat.
inline DispatchSolution solve_dcopf(const NetworkView& v, bool enforce_limits = true) {
    const Network& net = v.network();
    DispatchSolution out;
    out.feasible = true;

    auto comps = dcdetail::components(v);
    for (const auto& c : comps) {
        int nb = (int)c.buses.size();
        int ng = (int)c.gens.size();
        int nl = (int)c.lines.size();
        double load = 0.0;
        Eigen::VectorXd loadv = Eigen::VectorXd::Zero(nb);
        for (int i = 0; i < nb; ++i) {
            loadv[i] = net.buses[c.buses[i]].load_mw;
            load += loadv[i];
        }
        if (ng == 0) {
            if (load > 1e-9) { out.feasible = false; break; }
            for (int i = 0; i < nb; ++i) {
                out.angles[net.buses[c.buses[i]].id] = 0.0;
                out.prices[net.buses[c.buses[i]].id] = 0.0;
            }
            for (int li : c.lines) out.flows[net.lines[li].id] = 0.0;
            continue;
        }

        dcdetail::LaplacianSolver lap(v, c);
        // z rows: per line, z_l[i] = dflow_l / dinjection_i  (reference entry 0)
        Eigen::MatrixXd Z(nl, nb);
        for (int k = 0; k < nl; ++k) {
            const Line& l = net.lines[c.lines[k]];
            int a = c.local[net.bus_index.at(l.from)];
            int b = c.local[net.bus_index.at(l.to)];
            Eigen::VectorXd e = Eigen::VectorXd::Zero(nb);
            e[a] += l.susceptance; e[b] -= l.susceptance;
            // th response to unit injection: PTDF row = b_l (e_a - e_b)' L^+
            Eigen::VectorXd w = lap.solve(e);   // symmetric L: one solve per row
            Z.row(k) = w.transpose();
        }
        Eigen::VectorXd base = Z * loadv;   // flow shift from loads

        std::vector<int> cuts;              // line offsets (into c.lines) with caps active
        std::vector<double> P(ng, 0.0);
        Eigen::VectorXd y;                  // row duals of the last LP
        bool feasible = true;

        for (int round = 0; round <= nl + 1; ++round) {
            int ncut = (int)cuts.size();
            LpProblem lp;
            int nv = ng + ncut;
            int m = 1 + ncut;
            lp.A = Eigen::MatrixXd::Zero(m, nv);
            lp.b = Eigen::VectorXd::Zero(m);
            lp.c = Eigen::VectorXd::Zero(nv);
            lp.lo = Eigen::VectorXd::Zero(nv);
            lp.up = Eigen::VectorXd::Zero(nv);
            for (int g = 0; g < ng; ++g) {
                const Generator& gen = net.generators[c.gens[g]];
                lp.A(0, g) = 1.0;
                lp.c[g] = gen.cost_per_mwh;
                lp.lo[g] = gen.pmin_mw;
                lp.up[g] = gen.pmax_mw;
            }
            lp.b[0] = load;
            for (int k = 0; k < ncut; ++k) {
                int off = cuts[k];
                const Line& l = net.lines[c.lines[off]];
                for (int g = 0; g < ng; ++g) {
                    int gb = c.local[net.bus_index.at(net.generators[c.gens[g]].bus)];
                    lp.A(1 + k, g) = Z(off, gb);
                }
                lp.A(1 + k, ng + k) = -1.0;   // ranged slack = raw flow + base
                lp.lo[ng + k] = base[off] - l.capacity_mw;
                lp.up[ng + k] = base[off] + l.capacity_mw;
            }
            LpSolution s = solve_lp(lp);
            if (s.status != LpStatus::optimal) { feasible = false; break; }
            for (int g = 0; g < ng; ++g) P[g] = s.x[g];
            y = s.y;
            if (!enforce_limits) break;

            // violation scan
            Eigen::VectorXd pg = Eigen::VectorXd::Zero(nb);
            for (int g = 0; g < ng; ++g)
                pg[c.local[net.bus_index.at(net.generators[c.gens[g]].bus)]] += P[g];
            Eigen::VectorXd f = Z * pg - base;
            bool added = false;
            for (int k = 0; k < nl; ++k) {
                const Line& l = net.lines[c.lines[k]];
                if (std::abs(f[k]) > l.capacity_mw + 1e-7) {
                    bool have = false;
                    for (int cc : cuts) if (cc == k) { have = true; break; }
                    if (!have) { cuts.push_back(k); added = true; }
                }
            }
            if (!added) break;
        }
        if (!feasible) { out.feasible = false; break; }

        // collect results for this component
        Eigen::VectorXd pg = Eigen::VectorXd::Zero(nb);
        for (int g = 0; g < ng; ++g) {
            const Generator& gen = net.generators[c.gens[g]];
            out.gen_output[gen.id] = P[g];
            out.total_cost += gen.cost_per_mwh * P[g];
            pg[c.local[net.bus_index.at(gen.bus)]] += P[g];
        }
        Eigen::VectorXd th = lap.solve(pg - loadv);
        for (int i = 0; i < nb; ++i) out.angles[net.buses[c.buses[i]].id] = th[i];
        for (int k = 0; k < nl; ++k) {
            const Line& l = net.lines[c.lines[k]];
            double d = th[c.local[net.bus_index.at(l.from)]] -
                       th[c.local[net.bus_index.at(l.to)]];
            out.flows[l.id] = l.susceptance * d;
        }
        // prices: pi_i = lambda + sum over cuts of mu_l * z_l[i]
        double lambda = y.size() > 0 ? y[0] : 0.0;
        Eigen::VectorXd pi = Eigen::VectorXd::Constant(nb, lambda);
        for (size_t k = 0; k < cuts.size(); ++k) {
            double mu = y[1 + (int)k];
            if (std::abs(mu) < 1e-12) continue;
            pi += mu * Z.row(cuts[k]).transpose();
        }
        for (int i = 0; i < nb; ++i) out.prices[net.buses[c.buses[i]].id] = pi[i];
    }

    if (!out.feasible) {
        out.angles.clear(); out.flows.clear();
        out.gen_output.clear(); out.prices.clear();
        out.total_cost = 0.0;
    }
    return out;
}

// Line profit f_l (pi_n - pi_m), oriented with the flow (m = sending end).
// Both orientation flips cancel, so the formula below covers either sign.
inline std::map<int, double> line_profits(const NetworkView& v,
                                          const DispatchSolution& sol) {
    const Network& net = v.network();
    std::map<int, double> out;
    for (size_t i = 0; i < net.lines.size(); ++i) {
        if (!v.active[i]) continue;
        const Line& l = net.lines[i];
        double f = sol.flows.at(l.id);
        out[l.id] = f * (sol.prices.at(l.to) - sol.prices.at(l.from));
    }
    return out;
}

}  // namespace toposwitch
