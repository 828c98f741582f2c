#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "toposwitch/dcopf.hpp"
#include "toposwitch/model.hpp"
#include "toposwitch/switching.hpp"

namespace toposwitch {

// ---------------------------------------------------------------------------
// Certificates
// ---------------------------------------------------------------------------

struct ParadoxCertificate {
    enum Kind { non_commutativity, non_monotonicity, non_consistency_a, non_consistency_b };
    Kind kind = non_commutativity;
    Network instance;
    // non-commutativity evidence
    int best_single = 0;
    double single_cost = 0.0;
    std::vector<int> best_pair;
    double pair_cost = 0.0;
    // trace evidence (monotonicity: trace_a only; consistency: both)
    HeuristicTrace trace_a;
    HeuristicTrace trace_b;
    int reconnect_line = 0;
    std::string summary;
};

// Best single-line removal is not part of the best pair removal.
inline std::optional<ParadoxCertificate> certify_non_commutativity(
        const Network& net, StructuralRule rule = StructuralRule::connectivity_only) {
    size_t nl = net.lines.size();
    if (nl > 24) throw model_error("certify bounded at 24 lines");
    NetworkView base = all_in_view(net);
    DispatchSolution s0 = solve_dcopf(base);
    if (!s0.feasible) return std::nullopt;
    const double tol = 1e-6;

    bool have1 = false;
    int arg1 = 0;
    double cost1 = 0.0;
    for (size_t i = 0; i < nl; ++i) {
        std::vector<bool> a(nl, true);
        a[i] = false;
        NetworkView v = swdetail::view_from(net, a);
        if (!swdetail::structural_ok(v, rule)) continue;
        DispatchSolution s = solve_dcopf(v);
        if (!s.feasible) continue;
        if (!have1 || s.total_cost < cost1 - 1e-9) {
            have1 = true;
            cost1 = s.total_cost;
            arg1 = net.lines[i].id;
        }
    }
    bool have2 = false;
    std::array<int, 2> arg2{0, 0};
    double cost2 = 0.0;
    for (size_t i = 0; i < nl; ++i)
        for (size_t j = i + 1; j < nl; ++j) {
            std::vector<bool> a(nl, true);
            a[i] = a[j] = false;
            NetworkView v = swdetail::view_from(net, a);
            if (!swdetail::structural_ok(v, rule)) continue;
            DispatchSolution s = solve_dcopf(v);
            if (!s.feasible) continue;
            if (!have2 || s.total_cost < cost2 - 1e-9) {
                have2 = true;
                cost2 = s.total_cost;
                arg2 = {net.lines[i].id, net.lines[j].id};
            }
        }
    if (!have1 || !have2) return std::nullopt;
    if (cost1 >= s0.total_cost - tol || cost2 >= s0.total_cost - tol) return std::nullopt;
    if (arg1 == arg2[0] || arg1 == arg2[1]) return std::nullopt;

    ParadoxCertificate c;
    c.kind = ParadoxCertificate::non_commutativity;
    c.instance = net;
    c.best_single = arg1;
    c.single_cost = cost1;
    c.best_pair = {arg2[0], arg2[1]};
    c.pair_cost = cost2;
    std::ostringstream os;
    os << "best single removal = line " << arg1 << " (cost " << cost1
       << "); best pair = {" << arg2[0] << ", " << arg2[1] << "} (cost " << cost2
       << "); single not in pair";
    c.summary = os.str();
    return c;
}

// The greedy remove-or-reconnect trace reconnects a line it removed earlier.
inline std::optional<ParadoxCertificate> certify_non_monotonicity(
        const Network& net, StructuralRule rule = StructuralRule::connectivity_only) {
    HeuristicConfig cfg;
    cfg.family = HeuristicConfig::greedy;
    cfg.move_set = {1, true};
    cfg.rule = rule;
    HeuristicTrace tr = run_heuristic(net, cfg);
    if (!tr.initial_feasible) return std::nullopt;
    std::set<int> removed;
    int hit = 0;
    for (const SwitchAction& a : tr.actions) {
        if (a.kind == SwitchAction::remove) {
            removed.insert(a.line_ids.begin(), a.line_ids.end());
        } else if (removed.count(a.line_ids.front()) &&
                   a.cost_after < a.cost_before - 1e-9) {
            hit = a.line_ids.front();
            break;
        }
    }
    if (!hit) return std::nullopt;
    ParadoxCertificate c;
    c.kind = ParadoxCertificate::non_monotonicity;
    c.instance = net;
    c.trace_a = tr;
    c.reconnect_line = hit;
    std::ostringstream os;
    os << "greedy trace reconnects line " << hit
       << " after removing it earlier; final cost " << tr.final_cost;
    c.summary = os.str();
    return c;
}

// A: removal-only greedy beats remove-or-reconnect greedy.
// B: greedy with single removals beats greedy with removals up to pairs.
enum class ConsistencyVariant { A, B };

inline std::optional<ParadoxCertificate> certify_non_consistency(
        const Network& net, ConsistencyVariant variant,
        StructuralRule rule = StructuralRule::connectivity_only) {
    HeuristicConfig ca, cb;
    ca.family = cb.family = HeuristicConfig::greedy;
    ca.rule = cb.rule = rule;
    if (variant == ConsistencyVariant::A) {
        ca.move_set = {1, false};
        cb.move_set = {1, true};
    } else {
        ca.move_set = {1, false};
        cb.move_set = {2, false};
    }
    HeuristicTrace ta = run_heuristic(net, ca);
    HeuristicTrace tb = run_heuristic(net, cb);
    if (!ta.initial_feasible || !tb.initial_feasible) return std::nullopt;
    if (ta.final_cost >= tb.final_cost - 1e-6) return std::nullopt;
    ParadoxCertificate c;
    c.kind = (variant == ConsistencyVariant::A) ? ParadoxCertificate::non_consistency_a
                                                : ParadoxCertificate::non_consistency_b;
    c.instance = net;
    c.trace_a = ta;
    c.trace_b = tb;
    std::ostringstream os;
    os << "restricted greedy final " << ta.final_cost
       << " beats extended greedy final " << tb.final_cost;
    c.summary = os.str();
    return c;
}

// ---------------------------------------------------------------------------
// Instance search
// ---------------------------------------------------------------------------

struct OperatingPoint {
    double cost = 0.0;
    std::vector<double> dispatch;   // by generator order; empty = unchecked
};

struct TraceTarget {
    MoveSet move_set;
    int absent = 0;                 // lines out of service in the final topology
    OperatingPoint final_point;
    bool require_reconnect = false;
};

// Three-bus instance search: enumerate line layouts (lexicographic), hypothesize
// which lines are absent in each target trace's final topology, derive capacity
// candidates from the line flows those operating points imply, and verify
// surviving candidates by replaying the greedy traces. In layout mode
// (fixed_susceptances set) only the bus-pair assignment of each line is free.
struct SearchTemplate {
    std::vector<Bus> buses;         // exactly 3
    std::vector<Generator> generators;
    bool stiff_tie = false;         // optional high-susceptance tie line, listed first
    int stiff_from = 1, stiff_to = 2;
    double stiff_susceptance = 1e8;
    int min_lines = 2, max_lines = 6;
    std::vector<double> capacity_grid;        // ascending candidate capacities
    std::vector<double> fixed_susceptances;   // layout mode
    std::vector<double> fixed_capacities;
    OperatingPoint all_in;
    std::vector<TraceTarget> traces;
    double cost_tol = 1e-4;
    double mw_tol = 1e-3;
    long block_budget = 2000000;
    long budget = 20000000;
};

namespace labdetail {

struct ProtoLine {
    int from = 0, to = 0;           // bus ids
    double b = 0.0;
};

// DC flow on a tiny fixed-topology prototype; per-component injection balance
// must hold or there is no consistent state. Returns per-line flows.
inline bool proto_flows(const std::vector<ProtoLine>& lines, const std::vector<bool>& active,
                        const std::vector<int>& bus_ids, const std::map<int, double>& inj,
                        std::vector<double>& out) {
    int n = (int)bus_ids.size();
    std::map<int, int> idx;
    for (int i = 0; i < n; ++i) idx[bus_ids[i]] = i;
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    std::vector<std::vector<int>> adj(n);
    for (size_t k = 0; k < lines.size(); ++k) {
        if (!active[k]) continue;
        int a = idx.at(lines[k].from), b = idx.at(lines[k].to);
        L(a, a) += lines[k].b;
        L(b, b) += lines[k].b;
        L(a, b) -= lines[k].b;
        L(b, a) -= lines[k].b;
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::vector<int> comp(n, -1);
    for (int s = 0; s < n; ++s) {
        if (comp[s] >= 0) continue;
        comp[s] = s;
        std::vector<int> stack{s};
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int v : adj[u])
                if (comp[v] < 0) { comp[v] = s; stack.push_back(v); }
        }
    }
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(n);
    for (int s = 0; s < n; ++s) {
        if (comp[s] != s) continue;
        std::vector<int> nodes;
        double balance = 0.0;
        for (int i = 0; i < n; ++i)
            if (comp[i] == s) {
                nodes.push_back(i);
                balance += inj.at(bus_ids[i]);
            }
        if (std::abs(balance) > 1e-6) return false;
        if (nodes.size() == 1) continue;
        int m = (int)nodes.size() - 1;
        Eigen::MatrixXd sub(m, m);
        Eigen::VectorXd rhs(m);
        for (int i = 0; i < m; ++i) {
            rhs(i) = inj.at(bus_ids[nodes[i + 1]]);
            for (int j = 0; j < m; ++j) sub(i, j) = L(nodes[i + 1], nodes[j + 1]);
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(sub);
        if (!lu.isInvertible()) return false;
        Eigen::VectorXd th = lu.solve(rhs);
        for (int i = 0; i < m; ++i) theta(nodes[i + 1]) = th(i);
    }
    out.assign(lines.size(), 0.0);
    for (size_t k = 0; k < lines.size(); ++k) {
        if (!active[k]) continue;
        out[k] = lines[k].b * (theta(idx.at(lines[k].from)) - theta(idx.at(lines[k].to)));
    }
    return true;
}

inline std::map<int, double> injections(const SearchTemplate& t,
                                        const std::vector<double>& dispatch) {
    std::map<int, double> inj;
    for (const Bus& b : t.buses) inj[b.id] = -b.load_mw;
    for (size_t g = 0; g < t.generators.size(); ++g)
        inj[t.generators[g].bus] += dispatch[g];
    return inj;
}

inline Network build_candidate(const SearchTemplate& t, const std::vector<ProtoLine>& lines,
                               const std::vector<double>& caps) {
    Network net;
    net.buses = t.buses;
    for (size_t k = 0; k < lines.size(); ++k)
        net.lines.push_back({(int)k + 1, lines[k].from, lines[k].to, lines[k].b,
                             caps[k], true});
    net.generators = t.generators;
    net.finalize();
    return net;
}

inline bool point_matches(const SearchTemplate& t, const Network& net,
                          const Topology& topo, const OperatingPoint& pt) {
    DispatchSolution s = solve_dcopf(apply_topology(net, topo));
    if (!s.feasible) return false;
    if (std::abs(s.total_cost - pt.cost) > t.cost_tol) return false;
    for (size_t g = 0; g < pt.dispatch.size(); ++g)
        if (std::abs(s.gen_output.at(net.generators[g].id) - pt.dispatch[g]) > t.mw_tol)
            return false;
    return true;
}

// replay all trace targets; all must match
inline bool traces_match(const SearchTemplate& t, const Network& net) {
    for (const TraceTarget& tt : t.traces) {
        HeuristicConfig cfg;
        cfg.family = HeuristicConfig::greedy;
        cfg.move_set = tt.move_set;
        cfg.rule = StructuralRule::connectivity_only;
        HeuristicTrace tr = run_heuristic(net, cfg);
        if (!tr.initial_feasible) return false;
        if (std::abs(tr.final_cost - tt.final_point.cost) > t.cost_tol) return false;
        if (!point_matches(t, net, tr.final_topology, tt.final_point)) return false;
        if (tt.require_reconnect) {
            std::set<int> removed;
            bool has = false;
            for (const SwitchAction& a : tr.actions) {
                if (a.kind == SwitchAction::remove)
                    removed.insert(a.line_ids.begin(), a.line_ids.end());
                else if (removed.count(a.line_ids.front()))
                    has = true;
            }
            if (!has) return false;
        }
    }
    return true;
}

inline bool allin_matches(const SearchTemplate& t, const Network& net) {
    if (t.all_in.dispatch.empty() && t.all_in.cost == 0.0) return true;
    return point_matches(t, net, Topology::all_in(net), t.all_in);
}

inline std::optional<double> snap(const std::vector<double>& grid, double v,
                                  double tol = 1e-6) {
    for (double g : grid)
        if (std::abs(g - v) <= tol) return g;
    return std::nullopt;
}

// non-decreasing k-tuples over an ascending domain, optionally forced to
// contain a pinned value; lexicographic emission order
inline void nondecr_tuples(const std::vector<double>& dom, int k,
                           std::optional<double> pin,
                           std::vector<std::vector<double>>& out) {
    std::vector<double> cur;
    std::function<void(size_t)> rec = [&](size_t start) {
        if ((int)cur.size() == k) {
            if (pin) {
                bool has = false;
                for (double c : cur)
                    if (std::abs(c - *pin) <= 1e-9) has = true;
                if (!has) return;
            }
            out.push_back(cur);
            return;
        }
        for (size_t i = start; i < dom.size(); ++i) {
            cur.push_back(dom[i]);
            rec(i);
            cur.pop_back();
        }
    };
    rec(0);
}

inline std::optional<Network> search_layout_mode(const SearchTemplate& t) {
    int L = (int)t.fixed_susceptances.size();
    const std::array<std::pair<int, int>, 3> pmap = {{{1, 2}, {1, 3}, {3, 2}}};
    std::vector<int> assign(L, 0);
    while (true) {
        std::vector<ProtoLine> lines(L);
        std::vector<double> caps(L);
        for (int k = 0; k < L; ++k) {
            lines[k] = {pmap[assign[k]].first, pmap[assign[k]].second,
                        t.fixed_susceptances[k]};
            caps[k] = t.fixed_capacities[k];
        }
        Network net = build_candidate(t, lines, caps);
        if (allin_matches(t, net) && traces_match(t, net)) return net;
        int k = L - 1;
        while (k >= 0 && assign[k] == 2) assign[k--] = 0;
        if (k < 0) break;
        ++assign[k];
    }
    return std::nullopt;
}

}  // namespace labdetail

inline std::optional<Network> search_instance(const SearchTemplate& t) {
    using namespace labdetail;
    if (!t.fixed_susceptances.empty()) return search_layout_mode(t);

    const std::array<std::pair<int, int>, 3> pair_order = {{{1, 2}, {1, 3}, {2, 3}}};
    std::vector<int> bus_ids;
    for (const Bus& b : t.buses) bus_ids.push_back(b.id);
    double cap_max = t.capacity_grid.back();
    int n_traces = (int)t.traces.size();
    long tried = 0;

    for (int total = t.min_lines; total <= t.max_lines; ++total) {
        for (int n0 = 0; n0 <= total; ++n0)
            for (int n1 = 0; n1 + n0 <= total; ++n1) {
                int n2 = total - n0 - n1;
                std::array<int, 3> counts{n0, n1, n2};
                // groups: optional stiff tie first, then unit-susceptance groups
                struct Group {
                    int from, to, size;
                    double b;
                };
                std::vector<Group> groups;
                if (t.stiff_tie)
                    groups.push_back({t.stiff_from, t.stiff_to, 1, t.stiff_susceptance});
                for (int p = 0; p < 3; ++p)
                    if (counts[p])
                        groups.push_back({pair_order[p].first, pair_order[p].second,
                                          counts[p], 1.0});
                int nl = 0;
                std::vector<ProtoLine> lines;
                for (const Group& g : groups)
                    for (int i = 0; i < g.size; ++i, ++nl)
                        lines.push_back({g.from, g.to, g.b});

                std::vector<bool> all_active(nl, true);
                std::vector<double> fl0;
                if (!proto_flows(lines, all_active, bus_ids,
                                 injections(t, t.all_in.dispatch), fl0))
                    continue;

                // hypotheses: per trace, absent-prefix count within each group
                std::vector<std::vector<std::vector<int>>> hyp_space(n_traces);
                for (int ti = 0; ti < n_traces; ++ti) {
                    std::vector<int> combo(groups.size(), 0);
                    std::function<void(size_t, int)> rec = [&](size_t gi, int left) {
                        if (gi == groups.size()) {
                            if (left == 0) hyp_space[ti].push_back(combo);
                            return;
                        }
                        for (int a = 0; a <= std::min(groups[gi].size, left); ++a) {
                            combo[gi] = a;
                            rec(gi + 1, left - a);
                        }
                        combo[gi] = 0;
                    };
                    rec(0, t.traces[ti].absent);
                }
                std::vector<size_t> hyp_idx(n_traces, 0);
                bool hyp_done = n_traces > 0 &&
                                std::any_of(hyp_space.begin(), hyp_space.end(),
                                            [](const auto& v) { return v.empty(); });
                while (!hyp_done) {
                    // states: all-in + each trace final
                    std::vector<std::vector<bool>> states{all_active};
                    std::vector<std::vector<double>> sflows{fl0};
                    bool ok = true;
                    for (int ti = 0; ti < n_traces; ++ti) {
                        const std::vector<int>& hyp = hyp_space[ti][hyp_idx[ti]];
                        std::vector<bool> act;
                        for (size_t gi = 0; gi < groups.size(); ++gi) {
                            for (int i = 0; i < hyp[gi]; ++i) act.push_back(false);
                            for (int i = hyp[gi]; i < groups[gi].size; ++i)
                                act.push_back(true);
                        }
                        std::vector<double> fl;
                        if (!proto_flows(lines, act, bus_ids,
                                         injections(t, t.traces[ti].final_point.dispatch),
                                         fl)) {
                            ok = false;
                            break;
                        }
                        states.push_back(act);
                        sflows.push_back(fl);
                    }
                    if (ok) {
                        std::vector<double> lb(nl, 0.0);
                        for (size_t si = 0; si < states.size(); ++si)
                            for (int k = 0; k < nl; ++k)
                                if (states[si][k])
                                    lb[k] = std::max(lb[k], std::abs(sflows[si][k]));
                        for (int k = 0; k < nl; ++k)
                            if (lb[k] > cap_max + 1e-6) ok = false;
                        if (ok) {
                            // parts: runs of equal activity pattern within a group
                            struct Part {
                                std::vector<int> ks;
                                bool ever_absent;
                                double lb;
                            };
                            std::vector<Part> parts;
                            int pos = 0;
                            for (const Group& g : groups) {
                                std::map<std::vector<bool>, std::vector<int>, std::greater<>> pat;
                                for (int k = pos; k < pos + g.size; ++k) {
                                    std::vector<bool> key;
                                    for (const auto& s : states) key.push_back(s[k]);
                                    pat[key].push_back(k);
                                }
                                for (auto& [key, ks] : pat) {
                                    bool ea = std::find(key.begin(), key.end(), false) != key.end();
                                    parts.push_back({ks, ea, lb[ks.front()]});
                                }
                                pos += g.size;
                            }
                            // binding options per state: none, or pin one part's cap
                            // to that state's flow on it
                            std::vector<std::vector<std::pair<int, double>>> bind_opts;
                            for (size_t si = 0; si < states.size(); ++si) {
                                std::vector<std::pair<int, double>> opts{{-1, 0.0}};
                                for (size_t pi = 0; pi < parts.size(); ++pi) {
                                    int k = parts[pi].ks.front();
                                    if (!states[si][k]) continue;
                                    auto v = snap(t.capacity_grid, std::abs(sflows[si][k]));
                                    if (!v || *v + 1e-9 < parts[pi].lb) continue;
                                    opts.push_back({(int)pi, *v});
                                }
                                bind_opts.push_back(opts);
                            }
                            std::vector<size_t> bi(states.size(), 0);
                            bool bind_done = false;
                            while (!bind_done) {
                                std::map<int, double> pins;
                                bool bad = false;
                                for (size_t si = 0; si < states.size(); ++si) {
                                    auto [pi, v] = bind_opts[si][bi[si]];
                                    if (pi < 0) continue;
                                    auto it = pins.find(pi);
                                    if (it != pins.end() && std::abs(it->second - v) > 1e-9)
                                        bad = true;
                                    pins[pi] = v;
                                }
                                if (!bad) {
                                    std::vector<std::vector<std::vector<double>>> choice_sets;
                                    long nblock = 1;
                                    for (size_t pi = 0; pi < parts.size() && nblock; ++pi) {
                                        std::vector<double> dom;
                                        if (parts[pi].ever_absent) {
                                            for (double g : t.capacity_grid)
                                                if (g >= parts[pi].lb - 1e-6) dom.push_back(g);
                                        } else {
                                            auto sv = snap(t.capacity_grid, parts[pi].lb);
                                            if (sv) dom.push_back(*sv);
                                            if (dom.empty() || dom.back() != cap_max)
                                                dom.push_back(cap_max);
                                        }
                                        std::optional<double> pin;
                                        auto it = pins.find((int)pi);
                                        if (it != pins.end()) {
                                            pin = it->second;
                                            if (!snap(dom, *pin, 1e-9)) {
                                                dom.push_back(*pin);
                                                std::sort(dom.begin(), dom.end());
                                            }
                                        }
                                        std::vector<std::vector<double>> tuples;
                                        nondecr_tuples(dom, (int)parts[pi].ks.size(), pin, tuples);
                                        if (tuples.empty()) {
                                            nblock = 0;
                                            break;
                                        }
                                        nblock *= (long)tuples.size();
                                        if (nblock > t.block_budget) {
                                            nblock = 0;
                                            break;
                                        }
                                        choice_sets.push_back(std::move(tuples));
                                    }
                                    if (nblock > 0) {
                                        std::vector<size_t> ci(parts.size(), 0);
                                        bool cand_done = false;
                                        while (!cand_done) {
                                            std::vector<double> caps(nl, 0.0);
                                            for (size_t pi = 0; pi < parts.size(); ++pi)
                                                for (size_t j = 0; j < parts[pi].ks.size(); ++j)
                                                    caps[parts[pi].ks[j]] =
                                                        choice_sets[pi][ci[pi]][j];
                                            if (++tried > t.budget) return std::nullopt;
                                            Network net = build_candidate(t, lines, caps);
                                            if (allin_matches(t, net) && traces_match(t, net))
                                                return net;
                                            int p = (int)parts.size() - 1;
                                            while (p >= 0 &&
                                                   ci[p] + 1 == choice_sets[p].size())
                                                ci[p--] = 0;
                                            if (p < 0) cand_done = true;
                                            else ++ci[p];
                                        }
                                    }
                                }
                                int si = (int)states.size() - 1;
                                while (si >= 0 && bi[si] + 1 == bind_opts[si].size())
                                    bi[si--] = 0;
                                if (si < 0) bind_done = true;
                                else ++bi[si];
                            }
                        }
                    }
                    int ti = n_traces - 1;
                    while (ti >= 0 && hyp_idx[ti] + 1 == hyp_space[ti].size())
                        hyp_idx[ti--] = 0;
                    if (ti < 0) hyp_done = true;
                    else ++hyp_idx[ti];
                    if (n_traces == 0) hyp_done = true;
                }
            }
    }
    return std::nullopt;
}

}  // namespace toposwitch
