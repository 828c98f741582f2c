#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <random>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "toposwitch/dcopf.hpp"
#include "toposwitch/model.hpp"
#include "toposwitch/switching.hpp"

namespace toposwitch {

struct MasResult {
    double c_init = 0.0;
    double c_unconstrained = 0.0;
    double mas = 0.0;
};

// Maximum attainable savings: constrained cost of the starting topology minus
// the cost with line limits ignored.
inline MasResult compute_mas(const NetworkView& v) {
    DispatchSolution si = solve_dcopf(v, true);
    if (!si.feasible) throw model_error("base case DCOPF infeasible");
    DispatchSolution su = solve_dcopf(v, false);
    if (!su.feasible) throw model_error("unconstrained DCOPF infeasible");
    return {si.total_cost, su.total_cost, si.total_cost - su.total_cost};
}

struct ExperimentConfig {
    int trials = 50;
    std::uint64_t master_seed = 1;
    double cost_scale_low = 0.5;
    double cost_scale_high = 1.5;
    std::vector<HeuristicConfig::Family> families = {
        HeuristicConfig::random_family, HeuristicConfig::line_profit,
        HeuristicConfig::greedy};
    int workers = 1;
};

struct TrialRow {
    int trial = 0;
    bool excluded = false;
    std::string reason;
    double mas = 0.0;
    // per family, in config order
    std::vector<double> saving;
    std::vector<int> lines_disconnected;
    std::vector<long> solves;
};

struct FamilyStats {
    double saving_mean = 0.0, saving_std = 0.0;
    double lines_mean = 0.0, lines_std = 0.0;
    double solves_mean = 0.0;
    double effort = 0.0;   // solves_mean normalized so greedy = 1
};

struct StatsReport {
    std::vector<HeuristicConfig::Family> families;
    std::vector<FamilyStats> stats;
    std::vector<TrialRow> rows;
    int excluded_trials = 0;
};

namespace mcdetail {

// stable seed mix (splitmix64 step) so trial streams are independent of the
// execution schedule
inline std::uint64_t trial_seed(std::uint64_t master, std::uint64_t t) {
    std::uint64_t z = master + 0x9E3779B97F4A7C15ull * (t + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline double uniform01(std::mt19937_64& rng) {
    return (double)(rng() >> 11) * 0x1.0p-53;
}

inline const char* family_name(HeuristicConfig::Family f) {
    switch (f) {
        case HeuristicConfig::random_family: return "random";
        case HeuristicConfig::line_profit: return "line_profit";
        default: return "greedy";
    }
}

}  // namespace mcdetail

inline StatsReport run_monte_carlo(const Network& base, const ExperimentConfig& cfg) {
    if (cfg.trials < 1) throw model_error("trials must be >= 1");
    if (!(cfg.cost_scale_low > 0.0 && cfg.cost_scale_low <= cfg.cost_scale_high))
        throw model_error("cost scale bounds must satisfy 0 < low <= high");

    StatsReport rep;
    rep.families = cfg.families;
    rep.rows.resize(cfg.trials);

    auto run_trial = [&](int t) {
        TrialRow row;
        row.trial = t;
        std::uint64_t seed = mcdetail::trial_seed(cfg.master_seed, (std::uint64_t)t);
        std::mt19937_64 rng(seed);
        Network net = base;
        for (Generator& g : net.generators) {
            double u = mcdetail::uniform01(rng);
            g.cost_per_mwh *= cfg.cost_scale_low +
                              (cfg.cost_scale_high - cfg.cost_scale_low) * u;
        }
        net.finalize();
        NetworkView v = all_in_view(net);
        DispatchSolution si = solve_dcopf(v, true);
        if (!si.feasible) {
            row.excluded = true;
            row.reason = "infeasible";
            return row;
        }
        DispatchSolution su = solve_dcopf(v, false);
        double mas = si.total_cost - su.total_cost;
        row.mas = mas;
        if (mas <= 1e-6) {
            row.excluded = true;
            row.reason = "uncongested";
            return row;
        }
        for (size_t fi = 0; fi < cfg.families.size(); ++fi) {
            HeuristicConfig hc;
            hc.family = cfg.families[fi];
            hc.move_set = {1, false};
            hc.rule = StructuralRule::relaxed_n1;
            hc.seed = mcdetail::trial_seed(seed, 7000 + fi);
            HeuristicTrace tr = run_heuristic(net, hc);
            int removed = 0;
            for (const auto& [id, in] : tr.final_topology.statuses)
                if (!in) ++removed;
            row.saving.push_back((si.total_cost - tr.final_cost) / mas);
            row.lines_disconnected.push_back(removed);
            row.solves.push_back(tr.dcopf_solve_count);
        }
        return row;
    };

    int workers = std::max(1, cfg.workers);
    if (workers == 1) {
        for (int t = 0; t < cfg.trials; ++t) rep.rows[t] = run_trial(t);
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (int t = next.fetch_add(1); t < cfg.trials; t = next.fetch_add(1))
                    rep.rows[t] = run_trial(t);
            });
        for (auto& th : pool) th.join();
    }

    rep.stats.assign(cfg.families.size(), {});
    int n = 0;
    for (const TrialRow& row : rep.rows) {
        if (row.excluded) {
            ++rep.excluded_trials;
            continue;
        }
        ++n;
        for (size_t fi = 0; fi < cfg.families.size(); ++fi) {
            rep.stats[fi].saving_mean += row.saving[fi];
            rep.stats[fi].lines_mean += row.lines_disconnected[fi];
            rep.stats[fi].solves_mean += (double)row.solves[fi];
        }
    }
    if (n > 0)
        for (FamilyStats& s : rep.stats) {
            s.saving_mean /= n;
            s.lines_mean /= n;
            s.solves_mean /= n;
        }
    if (n > 1) {
        for (const TrialRow& row : rep.rows) {
            if (row.excluded) continue;
            for (size_t fi = 0; fi < cfg.families.size(); ++fi) {
                double ds = row.saving[fi] - rep.stats[fi].saving_mean;
                double dl = row.lines_disconnected[fi] - rep.stats[fi].lines_mean;
                rep.stats[fi].saving_std += ds * ds;
                rep.stats[fi].lines_std += dl * dl;
            }
        }
        for (FamilyStats& s : rep.stats) {
            s.saving_std = std::sqrt(s.saving_std / (n - 1));
            s.lines_std = std::sqrt(s.lines_std / (n - 1));
        }
    }
    // effort normalization: greedy mean = 1 when present, else largest mean
    double denom = 0.0;
    for (size_t fi = 0; fi < cfg.families.size(); ++fi)
        if (cfg.families[fi] == HeuristicConfig::greedy) denom = rep.stats[fi].solves_mean;
    if (denom <= 0.0)
        for (const FamilyStats& s : rep.stats) denom = std::max(denom, s.solves_mean);
    for (FamilyStats& s : rep.stats)
        s.effort = denom > 0.0 ? s.solves_mean / denom : 0.0;
    return rep;
}

enum class ReportFormat { csv, markdown };

inline std::string emit_report(const StatsReport& rep, ReportFormat fmt) {
    std::ostringstream os;
    os << std::fixed;
    if (fmt == ReportFormat::csv) {
        os << "trial,family,mas,saving_over_mas,lines_disconnected,dcopf_solves\n";
        for (const TrialRow& row : rep.rows) {
            if (row.excluded) {
                os << row.trial << ",excluded:" << row.reason << ",,,,\n";
                continue;
            }
            for (size_t fi = 0; fi < rep.families.size(); ++fi)
                os << row.trial << ',' << mcdetail::family_name(rep.families[fi]) << ','
                   << std::setprecision(4) << row.mas << ','
                   << std::setprecision(6) << row.saving[fi] << ','
                   << row.lines_disconnected[fi] << ',' << row.solves[fi] << '\n';
        }
        os << "# excluded_trials," << rep.excluded_trials << '\n';
    } else {
        os << "| Heuristic | Saving/MAS | Lines disconnected | Mean effort |\n";
        os << "|---|---|---|---|\n";
        for (size_t fi = 0; fi < rep.families.size(); ++fi) {
            const FamilyStats& s = rep.stats[fi];
            os << "| " << mcdetail::family_name(rep.families[fi]) << " | "
               << std::setprecision(3) << s.saving_mean << " ± " << s.saving_std
               << " | " << std::setprecision(2) << s.lines_mean << " ± " << s.lines_std
               << " | " << std::setprecision(3) << s.effort << " |\n";
        }
        if (rep.excluded_trials > 0)
            os << "\nExcluded trials: " << rep.excluded_trials << '\n';
    }
    return os.str();
}

}  // namespace toposwitch
