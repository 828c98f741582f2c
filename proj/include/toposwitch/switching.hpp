#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "toposwitch/dcopf.hpp"
#include "toposwitch/graph.hpp"
#include "toposwitch/model.hpp"

namespace toposwitch {

// Structural safeguard applied to every accepted action. The relaxed N-1 rule
// (connected + load/gen degree >= 2) governs the production heuristics; the
// small didactic instances are certified under plain connectivity, which is
// the only structural premise their traces use.
enum class StructuralRule { relaxed_n1, connectivity_only };

struct MoveSet {
    int max_removals = 1;          // K
    bool allow_reconnect = false;
};

struct HeuristicConfig {
    enum Family { random_family, line_profit, greedy };
    Family family = greedy;
    MoveSet move_set;
    std::uint64_t seed = 0;        // random family only
    double improvement_tolerance = 1e-6;
    StructuralRule rule = StructuralRule::relaxed_n1;
};

struct SwitchAction {
    enum Kind { remove, reconnect };
    Kind kind = remove;
    std::vector<int> line_ids;
    double cost_before = 0.0;
    double cost_after = 0.0;
    long solves_so_far = 0;   // cumulative DCOPF solves when the action landed
};

struct HeuristicTrace {
    bool initial_feasible = false;
    double initial_cost = 0.0;
    std::vector<SwitchAction> actions;
    Topology final_topology;
    double final_cost = 0.0;
    long dcopf_solve_count = 0;
};

namespace swdetail {

inline bool structural_ok(const NetworkView& v, StructuralRule rule) {
    if (rule == StructuralRule::connectivity_only) return is_connected(v);
    return check_relaxed_n1(v).pass;
}

inline NetworkView view_from(const Network& net, const std::vector<bool>& active) {
    NetworkView v;
    v.net = &net;
    v.active = active;
    return v;
}

// deterministic Fisher-Yates on top of a fixed-width generator
inline void shuffle_ids(std::vector<int>& ids, std::mt19937_64& rng) {
    for (size_t i = ids.size(); i > 1; --i) {
        size_t j = (size_t)(rng() % i);
        std::swap(ids[i - 1], ids[j]);
    }
}

}  // namespace swdetail

// Lines whose individual removal keeps the network connected and every
// load/generator bus at in-service degree >= 2.
inline std::vector<int> switchable_set(const NetworkView& v,
                                       StructuralRule rule = StructuralRule::relaxed_n1) {
    const Network& net = v.network();
    std::vector<int> out;
    std::vector<bool> active = v.active;
    for (size_t i = 0; i < net.lines.size(); ++i) {
        if (!v.active[i]) continue;
        active[i] = false;
        if (swdetail::structural_ok(swdetail::view_from(net, active), rule))
            out.push_back(net.lines[i].id);
        active[i] = true;
    }
    return out;
}

inline HeuristicTrace run_heuristic(const Network& net, const HeuristicConfig& cfg) {
    HeuristicTrace trace;
    std::vector<bool> active(net.lines.size());
    for (size_t i = 0; i < net.lines.size(); ++i) active[i] = net.lines[i].in_service;

    auto solve = [&](const std::vector<bool>& a) {
        ++trace.dcopf_solve_count;
        return solve_dcopf(swdetail::view_from(net, a));
    };

    DispatchSolution cur = solve(active);
    trace.initial_feasible = cur.feasible;
    if (!cur.feasible) {
        trace.final_cost = 0.0;
        return trace;
    }
    trace.initial_cost = cur.total_cost;
    double cost = cur.total_cost;
    const double tol = cfg.improvement_tolerance;
    std::mt19937_64 rng(cfg.seed);

    while (true) {
        bool acted = false;
        if (cfg.family == HeuristicConfig::greedy) {
            // enumerate removal subsets up to K (lexicographic by line position),
            // then reconnections; keep the best strict improvement
            std::vector<int> ins, outs;
            for (size_t i = 0; i < net.lines.size(); ++i)
                (active[i] ? ins : outs).push_back((int)i);
            struct Move {
                SwitchAction::Kind kind;
                std::vector<int> positions;
            };
            std::vector<Move> moves;
            int K = std::max(1, cfg.move_set.max_removals);
            std::vector<int> combo;
            std::function<void(size_t, int)> gen = [&](size_t start, int left) {
                if (!combo.empty()) moves.push_back({SwitchAction::remove, combo});
                if (left == 0) return;
                for (size_t i = start; i < ins.size(); ++i) {
                    combo.push_back(ins[i]);
                    gen(i + 1, left - 1);
                    combo.pop_back();
                }
            };
            gen(0, K);
            if (cfg.move_set.allow_reconnect)
                for (int p : outs) moves.push_back({SwitchAction::reconnect, {p}});

            bool have_best = false;
            Move best_move;
            double best_cost = 0.0;
            DispatchSolution best_sol;
            for (const Move& mv : moves) {
                std::vector<bool> trial = active;
                for (int p : mv.positions)
                    trial[p] = (mv.kind == SwitchAction::reconnect);
                if (!swdetail::structural_ok(swdetail::view_from(net, trial), cfg.rule))
                    continue;
                DispatchSolution s = solve(trial);
                if (!s.feasible || s.total_cost >= cost - tol) continue;
                bool better = !have_best || s.total_cost < best_cost - 1e-12;
                // tie-break: removals before reconnects, then lexicographic subset
                if (!better && have_best && std::abs(s.total_cost - best_cost) <= 1e-12) {
                    if (mv.kind < best_move.kind) better = true;
                    else if (mv.kind == best_move.kind &&
                             mv.positions < best_move.positions) better = true;
                }
                if (better) {
                    have_best = true;
                    best_move = mv;
                    best_cost = s.total_cost;
                    best_sol = s;
                }
            }
            if (have_best) {
                SwitchAction a;
                a.kind = best_move.kind;
                for (int p : best_move.positions) a.line_ids.push_back(net.lines[p].id);
                a.cost_before = cost;
                a.cost_after = best_cost;
                a.solves_so_far = trace.dcopf_solve_count;
                trace.actions.push_back(a);
                for (int p : best_move.positions)
                    active[p] = (best_move.kind == SwitchAction::reconnect);
                cost = best_cost;
                cur = best_sol;
                acted = true;
            }
        } else {
            // random / line-profit: one removal per iteration among the
            // switchable lines with strictly negative line profit
            NetworkView v = swdetail::view_from(net, active);
            auto profits = line_profits(v, cur);
            std::vector<int> cand;
            for (int id : switchable_set(v, cfg.rule))
                if (profits.at(id) < 0.0) cand.push_back(id);
            if (cfg.family == HeuristicConfig::line_profit) {
                std::sort(cand.begin(), cand.end(), [&](int a, int b) {
                    if (profits.at(a) != profits.at(b))
                        return profits.at(a) < profits.at(b);
                    return a < b;
                });
            } else {
                swdetail::shuffle_ids(cand, rng);
            }
            for (int id : cand) {
                int p = net.line_index.at(id);
                std::vector<bool> trial = active;
                trial[p] = false;
                DispatchSolution s = solve(trial);
                if (!s.feasible || s.total_cost >= cost - tol) continue;
                SwitchAction a;
                a.kind = SwitchAction::remove;
                a.line_ids = {id};
                a.cost_before = cost;
                a.cost_after = s.total_cost;
                a.solves_so_far = trace.dcopf_solve_count;
                trace.actions.push_back(a);
                active[p] = false;
                cost = s.total_cost;
                cur = s;
                acted = true;
                break;
            }
        }
        if (!acted) break;
    }

    trace.final_cost = cost;
    for (size_t i = 0; i < net.lines.size(); ++i)
        trace.final_topology.statuses[net.lines[i].id] = active[i];
    return trace;
}

struct BruteForceResult {
    bool found = false;
    Topology topology;
    double cost = 0.0;
};

// Exact optimum over all structurally admissible topologies. Ties go to the
// fewest removed lines, then the lexicographically smallest status vector.
inline BruteForceResult brute_force_optimum(
        const Network& net, StructuralRule rule = StructuralRule::relaxed_n1) {
    size_t nl = net.lines.size();
    if (nl > 24) throw model_error("brute force bounded at 24 lines");
    BruteForceResult best;
    int best_removed = 0;
    std::uint32_t best_mask = 0;
    for (std::uint32_t mask = 0; mask < (1u << nl); ++mask) {
        std::vector<bool> active(nl);
        int removed = 0;
        for (size_t i = 0; i < nl; ++i) {
            active[i] = (mask >> i) & 1u;
            if (!active[i]) ++removed;
        }
        NetworkView v = swdetail::view_from(net, active);
        if (!swdetail::structural_ok(v, rule)) continue;
        DispatchSolution s = solve_dcopf(v);
        if (!s.feasible) continue;
        bool better = !best.found || s.total_cost < best.cost - 1e-9;
        if (!better && best.found && std::abs(s.total_cost - best.cost) <= 1e-9) {
            if (removed < best_removed) better = true;
            else if (removed == best_removed && mask < best_mask) better = true;
        }
        if (better) {
            best.found = true;
            best.cost = s.total_cost;
            best_removed = removed;
            best_mask = mask;
            best.topology.statuses.clear();
            for (size_t i = 0; i < nl; ++i)
                best.topology.statuses[net.lines[i].id] = active[i];
        }
    }
    return best;
}

}  // namespace toposwitch
