#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "toposwitch/case_io.hpp"
#include "toposwitch/circuit_laws.hpp"
#include "toposwitch/dcopf.hpp"
#include "toposwitch/graph.hpp"
#include "toposwitch/harness.hpp"
#include "toposwitch/lab_instances.hpp"
#include "toposwitch/paradox_lab.hpp"
#include "toposwitch/reduction.hpp"
#include "toposwitch/switching.hpp"

using namespace toposwitch;
using nlohmann::json;

namespace {

Network load_or_die(const std::string& path) {
    try {
        return load_case_file(path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        std::exit(1);
    }
}

int cmd_validate(const std::string& path) {
    Network net;
    try {
        net = load_case_file(path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    N1Result r = check_relaxed_n1(all_in_view(net));
    if (r.pass) return 0;
    if (r.disconnected) std::cerr << "network is disconnected\n";
    for (int b : r.violating_buses) std::cout << b << "\n";
    return 2;
}

int cmd_opf(const std::string& path, bool unconstrained, bool as_json) {
    Network net = load_or_die(path);
    DispatchSolution s = solve_dcopf(all_in_view(net), !unconstrained);
    if (!s.feasible) {
        std::cerr << "infeasible\n";
        return 1;
    }
    if (as_json) {
        json j;
        j["total_cost"] = s.total_cost;
        j["dispatch"] = s.gen_output;
        j["flows"] = s.flows;
        j["prices"] = s.prices;
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    std::printf("total cost: %.4f\n", s.total_cost);
    for (const Generator& g : net.generators)
        std::printf("gen %d @ bus %d: %.4f MW\n", g.id, g.bus, s.gen_output.at(g.id));
    for (const auto& [id, f] : s.flows) std::printf("line %d flow: %.4f MW\n", id, f);
    for (const auto& [bus, p] : s.prices) std::printf("bus %d price: %.4f $/MWh\n", bus, p);
    return 0;
}

int cmd_laws(int trials, std::uint64_t seed) {
    LawsCorpusResult r = run_laws_corpus(trials, seed);
    std::printf("circuits: %d\n", r.circuits);
    std::printf("non-bridge removals checked: %d\n", r.removals_checked);
    std::printf("worst loss decrease: %.3e\n", r.worst_loss_decrease);
    std::printf("max identity relative error: %.3e\n", r.max_identity_rel_err);
    std::printf("zero-current removals: %d (max |delta|: %.3e)\n",
                r.zero_current_removals, r.max_zero_current_delta);
    return 0;
}

int cmd_switch(const std::string& path, const std::string& family, int k,
               bool reconnect, std::uint64_t seed, const std::string& trace_path) {
    Network net = load_or_die(path);
    HeuristicConfig cfg;
    if (family == "random") cfg.family = HeuristicConfig::random_family;
    else if (family == "profit") cfg.family = HeuristicConfig::line_profit;
    else cfg.family = HeuristicConfig::greedy;
    cfg.move_set = {k, reconnect};
    cfg.seed = seed;
    HeuristicTrace tr = run_heuristic(net, cfg);
    if (!tr.initial_feasible) {
        std::cerr << "initial DCOPF infeasible\n";
        return 1;
    }
    std::printf("initial cost: %.4f\n", tr.initial_cost);
    for (size_t i = 0; i < tr.actions.size(); ++i) {
        const SwitchAction& a = tr.actions[i];
        std::string ids;
        for (int id : a.line_ids) ids += (ids.empty() ? "" : ";") + std::to_string(id);
        std::printf("%zu: %s %s  %.4f -> %.4f\n", i + 1,
                    a.kind == SwitchAction::remove ? "remove" : "reconnect",
                    ids.c_str(), a.cost_before, a.cost_after);
    }
    std::printf("final cost: %.4f (%ld DCOPF solves)\n", tr.final_cost,
                tr.dcopf_solve_count);
    if (!trace_path.empty()) {
        std::ofstream out(trace_path);
        out << "iteration,action_kind,line_ids,cost_before,cost_after,solves_so_far\n";
        for (size_t i = 0; i < tr.actions.size(); ++i) {
            const SwitchAction& a = tr.actions[i];
            std::string ids;
            for (int id : a.line_ids)
                ids += (ids.empty() ? "" : ";") + std::to_string(id);
            char buf[160];
            std::snprintf(buf, sizeof buf, "%zu,%s,%s,%.6f,%.6f,%ld\n", i + 1,
                          a.kind == SwitchAction::remove ? "remove" : "reconnect",
                          ids.c_str(), a.cost_before, a.cost_after, a.solves_so_far);
            out << buf;
        }
    }
    return 0;
}

int cmd_reduce(const std::string& set, bool verify) {
    SubsetSumInstance inst;
    std::stringstream ss(set);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) inst.values.push_back(std::stod(tok));
    }
    Network net = reduce_subset_sum(inst);
    std::cout << emit_case(net) << "\n";
    if (verify) {
        ReductionVerdict v = verify_reduction(inst);
        std::printf("agree: %s\n", v.agree ? "yes" : "no");
        std::printf("feasible: %s\n", v.feasible ? "yes" : "no");
        if (v.feasible) {
            std::string w;
            for (double x : v.witness_subset)
                w += (w.empty() ? "" : ", ") + std::to_string(x);
            std::printf("witness subset: {%s}\n", w.c_str());
        }
    }
    return 0;
}

json trace_json(const HeuristicTrace& tr) {
    json j;
    j["initial_cost"] = tr.initial_cost;
    j["final_cost"] = tr.final_cost;
    j["actions"] = json::array();
    for (const SwitchAction& a : tr.actions)
        j["actions"].push_back({{"kind", a.kind == SwitchAction::remove ? "remove"
                                                                        : "reconnect"},
                                {"line_ids", a.line_ids},
                                {"cost_before", a.cost_before},
                                {"cost_after", a.cost_after}});
    return j;
}

int cmd_paradox(const std::string& kind, bool do_search, const std::string& emit) {
    Network net;
    std::optional<ParadoxCertificate> cert;
    if (kind == "commutativity") {
        net = do_search ? search_instance(lab_noncommutative_template())
                              .value_or(lab_noncommutative_instance())
                        : lab_noncommutative_instance();
        cert = certify_non_commutativity(net);
    } else if (kind == "monotonicity") {
        net = do_search ? search_instance(lab_nonmonotone_template())
                              .value_or(lab_nonmonotone_instance())
                        : lab_nonmonotone_instance();
        cert = certify_non_monotonicity(net);
    } else if (kind == "consistency-a") {
        net = do_search ? search_instance(lab_nonconsistent_a_template())
                              .value_or(lab_nonconsistent_a_instance())
                        : lab_nonconsistent_a_instance();
        cert = certify_non_consistency(net, ConsistencyVariant::A);
    } else {
        net = do_search ? search_instance(lab_nonconsistent_b_template())
                              .value_or(lab_nonconsistent_b_instance())
                        : lab_nonconsistent_b_instance();
        cert = certify_non_consistency(net, ConsistencyVariant::B);
    }
    if (!cert) {
        std::cerr << "no certificate\n";
        return 1;
    }
    json j;
    j["kind"] = kind;
    j["summary"] = cert->summary;
    if (cert->kind == ParadoxCertificate::non_commutativity) {
        j["best_single"] = cert->best_single;
        j["single_cost"] = cert->single_cost;
        j["best_pair"] = cert->best_pair;
        j["pair_cost"] = cert->pair_cost;
    } else if (cert->kind == ParadoxCertificate::non_monotonicity) {
        j["reconnect_line"] = cert->reconnect_line;
        j["trace"] = trace_json(cert->trace_a);
    } else {
        j["trace_restricted"] = trace_json(cert->trace_a);
        j["trace_extended"] = trace_json(cert->trace_b);
    }
    std::cout << j.dump(2) << "\n";
    if (!emit.empty()) {
        std::ofstream out(emit);
        out << emit_case(net) << "\n";
    }
    return 0;
}

int cmd_montecarlo(const std::string& path, int trials, std::uint64_t seed,
                   const std::string& families, const std::string& out,
                   const std::string& markdown, int workers) {
    Network net = load_or_die(path);
    ExperimentConfig cfg;
    cfg.trials = trials;
    cfg.master_seed = seed;
    cfg.workers = workers;
    cfg.families.clear();
    std::stringstream ss(families);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok == "random") cfg.families.push_back(HeuristicConfig::random_family);
        else if (tok == "profit") cfg.families.push_back(HeuristicConfig::line_profit);
        else if (tok == "greedy") cfg.families.push_back(HeuristicConfig::greedy);
        else {
            std::cerr << "unknown family: " << tok << "\n";
            return 1;
        }
    }
    StatsReport rep = run_monte_carlo(net, cfg);
    if (!out.empty()) {
        std::ofstream f(out);
        f << emit_report(rep, ReportFormat::csv);
    }
    std::string md = emit_report(rep, ReportFormat::markdown);
    if (!markdown.empty()) {
        std::ofstream f(markdown);
        f << md;
    }
    std::cout << md;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"topology-control workbench for DC power-grid models"};
    app.require_subcommand(1);

    std::string path, family = "greedy", trace_path, set, emit, out, markdown;
    std::string families = "random,profit,greedy";
    int trials = 1000, k = 1, workers = 1, mc_trials = 50;
    std::uint64_t seed = 1;
    bool unconstrained = false, as_json = false, reconnect = false, verify = false,
         do_search = false;

    auto* validate = app.add_subcommand("validate", "parse and structurally check a case");
    validate->add_option("case", path)->required();

    auto* opf = app.add_subcommand("opf", "solve the DC optimal power flow");
    opf->add_option("case", path)->required();
    opf->add_flag("--unconstrained", unconstrained, "ignore line limits");
    opf->add_flag("--json", as_json, "JSON output");

    auto* laws = app.add_subcommand("laws", "run the loss-law property corpus");
    laws->add_option("--trials", trials);
    laws->add_option("--seed", seed);

    auto* sw = app.add_subcommand("switch", "run a switching heuristic");
    sw->add_option("case", path)->required();
    sw->add_option("--family", family)->check(CLI::IsMember({"random", "profit", "greedy"}));
    sw->add_option("--k", k, "max removals per greedy move");
    sw->add_flag("--reconnect", reconnect);
    sw->add_option("--seed", seed);
    sw->add_option("--trace", trace_path, "write the action trace CSV here");

    auto* red = app.add_subcommand("reduce", "emit the subset-sum feasibility gadget");
    red->add_option("--set", set, "comma-separated values")->required();
    red->add_flag("--verify", verify, "run the dual brute-force check");

    std::string kind;
    auto* par = app.add_subcommand("paradox", "certify a switching paradox");
    par->add_option("kind", kind)
        ->required()
        ->check(CLI::IsMember({"commutativity", "monotonicity", "consistency-a",
                               "consistency-b"}));
    par->add_flag("--search", do_search, "re-derive the instance by search");
    par->add_option("--emit", emit, "write the instance case file here");

    auto* mc = app.add_subcommand("montecarlo", "randomized heuristic comparison");
    mc->add_option("case", path)->required();
    mc->add_option("--trials", mc_trials);
    mc->add_option("--seed", seed);
    mc->add_option("--families", families);
    mc->add_option("--out", out, "per-trial CSV path");
    mc->add_option("--markdown", markdown, "summary table path");
    mc->add_option("--workers", workers);

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return cmd_validate(path);
        if (opf->parsed()) return cmd_opf(path, unconstrained, as_json);
        if (laws->parsed()) return cmd_laws(trials, seed);
        if (sw->parsed()) return cmd_switch(path, family, k, reconnect, seed, trace_path);
        if (red->parsed()) return cmd_reduce(set, verify);
        if (par->parsed()) return cmd_paradox(kind, do_search, emit);
        if (mc->parsed())
            return cmd_montecarlo(path, mc_trials, seed, families, out, markdown, workers);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
