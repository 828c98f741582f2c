#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "toposwitch/dcopf.hpp"
#include "toposwitch/lab_instances.hpp"
#include "toposwitch/model.hpp"
#include "toposwitch/simplex.hpp"

using namespace toposwitch;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

// Reference formulation with explicit angle variables: min c'P subject to
// nodal balance, flow definition rows and box bounds. One LP, no cuts.
double angle_formulation_cost(const NetworkView& v) {
    const Network& net = v.network();
    int nb = (int)net.buses.size();
    int ng = (int)net.generators.size();
    std::vector<int> act;
    for (size_t i = 0; i < net.lines.size(); ++i)
        if (v.active[i]) act.push_back((int)i);
    int nl = (int)act.size();

    LpProblem lp;
    int nv = ng + nb + nl;   // P, theta, flow slack
    int m = nb + nl;
    lp.A = Eigen::MatrixXd::Zero(m, nv);
    lp.b = Eigen::VectorXd::Zero(m);
    lp.c = Eigen::VectorXd::Zero(nv);
    lp.lo = Eigen::VectorXd::Constant(nv, -kInf);
    lp.up = Eigen::VectorXd::Constant(nv, kInf);
    for (int g = 0; g < ng; ++g) {
        const Generator& gen = net.generators[g];
        lp.c[g] = gen.cost_per_mwh;
        lp.lo[g] = gen.pmin_mw;
        lp.up[g] = gen.pmax_mw;
        lp.A(net.bus_index.at(gen.bus), g) = 1.0;
    }
    int ref = net.bus_index.at(net.reference_bus);
    lp.lo[ng + ref] = 0.0;
    lp.up[ng + ref] = 0.0;
    for (int k = 0; k < nl; ++k) {
        const Line& l = net.lines[act[k]];
        int a = net.bus_index.at(l.from);
        int b = net.bus_index.at(l.to);
        // balance: generation - outgoing flow = load
        lp.A(a, ng + nb + k) -= 1.0;
        lp.A(b, ng + nb + k) += 1.0;
        // definition: b_l (th_a - th_b) - f_l = 0
        lp.A(nb + k, ng + a) = l.susceptance;
        lp.A(nb + k, ng + b) = -l.susceptance;
        lp.A(nb + k, ng + nb + k) = -1.0;
        lp.lo[ng + nb + k] = -l.capacity_mw;
        lp.up[ng + nb + k] = l.capacity_mw;
    }
    for (int i = 0; i < nb; ++i) lp.b[i] = net.buses[i].load_mw;

    LpSolution s = solve_lp(lp);
    REQUIRE(s.status == LpStatus::optimal);

    // weak duality audit on the reference LP
    Eigen::VectorXd d = lp.c - lp.A.transpose() * s.y;
    double dual = lp.b.dot(s.y);
    for (int j = 0; j < nv; ++j) {
        if (std::abs(d[j]) < 1e-9) continue;
        dual += d[j] > 0 ? d[j] * lp.lo[j] : d[j] * lp.up[j];
    }
    CHECK(std::abs(dual - s.objective) <= 1e-6 * std::max(1.0, std::abs(s.objective)));
    return s.objective;
}

Network random_network(std::mt19937_64& rng, int max_bus = 8) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    int nb = 3 + (int)(rng() % (max_bus - 2));
    Network net;
    for (int i = 1; i <= nb; ++i)
        net.buses.push_back({i, rng() % 2 ? 10.0 + 40.0 * u01(rng) : 0.0});
    int id = 1;
    for (int i = 2; i <= nb; ++i) {
        int j = 1 + (int)(rng() % (i - 1));
        net.lines.push_back({id++, j, i, 0.5 + 4.5 * u01(rng), 20.0 + 80.0 * u01(rng), true});
    }
    int extra = 1 + (int)(rng() % nb);
    for (int e = 0; e < extra; ++e) {
        int a = 1 + (int)(rng() % nb);
        int b = 1 + (int)(rng() % nb);
        if (a == b) continue;
        net.lines.push_back({id++, a, b, 0.5 + 4.5 * u01(rng), 20.0 + 80.0 * u01(rng), true});
    }
    int ngen = 1 + (int)(rng() % 3);
    for (int g = 1; g <= ngen; ++g)
        net.generators.push_back({g, 1 + (int)(rng() % nb), 5.0 + 95.0 * u01(rng),
                                  0.0, 150.0 + 150.0 * u01(rng)});
    net.finalize();
    return net;
}

void check_physics(const Network& net, const DispatchSolution& s) {
    NetworkView v = all_in_view(net);
    // nodal balance at every bus
    for (const Bus& b : net.buses) {
        double net_inj = -b.load_mw;
        for (const Generator& g : net.generators)
            if (g.bus == b.id) net_inj += s.gen_output.at(g.id);
        for (size_t i = 0; i < net.lines.size(); ++i) {
            if (!v.active[i]) continue;
            const Line& l = net.lines[i];
            if (l.from == b.id) net_inj -= s.flows.at(l.id);
            if (l.to == b.id) net_inj += s.flows.at(l.id);
        }
        CHECK(std::abs(net_inj) <= 1e-6);
    }
    // flows follow angles, limits hold
    for (size_t i = 0; i < net.lines.size(); ++i) {
        if (!v.active[i]) continue;
        const Line& l = net.lines[i];
        double f = l.susceptance * (s.angles.at(l.from) - s.angles.at(l.to));
        CHECK(std::abs(f - s.flows.at(l.id)) <=
              1e-8 * std::max(1.0, std::abs(f)));
        CHECK(std::abs(s.flows.at(l.id)) <= l.capacity_mw + 1e-6);
    }
}

}  // namespace

TEST_CASE("three-bus congested dispatch") {
    Network net = lab_noncommutative_instance();
    NetworkView v = all_in_view(net);
    DispatchSolution s = solve_dcopf(v);
    REQUIRE(s.feasible);
    CHECK(s.total_cost == doctest::Approx(710.0));
    CHECK(s.gen_output.at(1) == doctest::Approx(7.0));
    CHECK(s.gen_output.at(2) == doctest::Approx(8.0));
    CHECK(s.prices.at(1) == doctest::Approx(10.0));
    CHECK(s.prices.at(2) == doctest::Approx(-60.0));
    CHECK(s.prices.at(3) == doctest::Approx(80.0));
    check_physics(net, s);

    DispatchSolution u = solve_dcopf(v, false);
    REQUIRE(u.feasible);
    CHECK(u.total_cost == doctest::Approx(150.0));   // cheap unit takes the whole load
    CHECK(u.gen_output.at(1) == doctest::Approx(15.0));
}

TEST_CASE("removals change the congested optimum") {
    Network net = lab_noncommutative_instance();
    Topology t = Topology::all_in(net);

    t.statuses[1] = false;
    DispatchSolution s1 = solve_dcopf(apply_topology(net, t));
    REQUIRE(s1.feasible);
    CHECK(s1.total_cost == doctest::Approx(500.0));
    CHECK(s1.gen_output.at(1) == doctest::Approx(10.0));
    CHECK(s1.gen_output.at(2) == doctest::Approx(5.0));

    t = Topology::all_in(net);
    t.statuses[3] = false;
    t.statuses[4] = false;
    DispatchSolution s2 = solve_dcopf(apply_topology(net, t));
    REQUIRE(s2.feasible);
    CHECK(s2.total_cost == doctest::Approx(150.0));
    CHECK(s2.gen_output.at(1) == doctest::Approx(15.0));
    CHECK(s2.gen_output.at(2) == doctest::Approx(0.0));
}

TEST_CASE("prices do not depend on the reference bus") {
    Network net = lab_noncommutative_instance();
    DispatchSolution s0 = solve_dcopf(all_in_view(net));
    for (int ref : {2, 3}) {
        Network alt = net;
        alt.reference_bus = ref;
        alt.finalize();
        DispatchSolution s = solve_dcopf(all_in_view(alt));
        REQUIRE(s.feasible);
        CHECK(s.total_cost == doctest::Approx(s0.total_cost));
        for (const Bus& b : net.buses)
            CHECK(s.prices.at(b.id) == doctest::Approx(s0.prices.at(b.id)));
    }
}

TEST_CASE("uncongested network prices at the marginal unit") {
    Network net;
    net.buses = {{1, 0.0}, {2, 60.0}};
    net.lines = {{1, 1, 2, 1.0, 500.0, true}};
    net.generators = {{1, 1, 12.0, 0.0, 100.0}, {2, 2, 40.0, 0.0, 100.0}};
    net.finalize();
    DispatchSolution s = solve_dcopf(all_in_view(net));
    REQUIRE(s.feasible);
    CHECK(s.total_cost == doctest::Approx(720.0));
    CHECK(s.prices.at(1) == doctest::Approx(12.0));
    CHECK(s.prices.at(2) == doctest::Approx(12.0));
    auto profits = line_profits(all_in_view(net), s);
    CHECK(std::abs(profits.at(1)) <= 1e-6);
}

TEST_CASE("infeasible when the load exceeds deliverable capacity") {
    Network net;
    net.buses = {{1, 0.0}, {2, 50.0}};
    net.lines = {{1, 1, 2, 1.0, 10.0, true}};
    net.generators = {{1, 1, 10.0, 0.0, 100.0}};
    net.finalize();
    DispatchSolution s = solve_dcopf(all_in_view(net));
    CHECK_FALSE(s.feasible);
    CHECK(s.total_cost == 0.0);
    CHECK(s.flows.empty());
    // dropping the limit restores feasibility
    CHECK(solve_dcopf(all_in_view(net), false).feasible);
}

TEST_CASE("disconnected components solve independently") {
    Network net;
    net.buses = {{1, 0.0}, {2, 30.0}, {3, 20.0}};
    net.lines = {{1, 1, 2, 1.0, 100.0, true},
                 {2, 2, 3, 1.0, 100.0, false}};
    net.generators = {{1, 1, 10.0, 0.0, 100.0}, {2, 3, 50.0, 0.0, 100.0}};
    net.finalize();
    DispatchSolution s = solve_dcopf(all_in_view(net));
    REQUIRE(s.feasible);
    CHECK(s.total_cost == doctest::Approx(30.0 * 10.0 + 20.0 * 50.0));

    // islanding a loaded bus with no generator is infeasible
    Network bad = net;
    bad.generators.pop_back();
    bad.finalize();
    CHECK_FALSE(solve_dcopf(all_in_view(bad)).feasible);
}

TEST_CASE("dc flow solver checks its inputs") {
    Network net = lab_noncommutative_instance();
    NetworkView v = all_in_view(net);
    CHECK_THROWS_WITH_AS(solve_dc_flow(v, {{1, 5.0}, {3, -4.0}}),
                         doctest::Contains("balance to zero"), model_error);
    CHECK_THROWS_WITH_AS(solve_dc_flow(v, {{1, 5.0}, {9, -5.0}}),
                         doctest::Contains("unknown bus 9"), model_error);
    DcFlowResult r = solve_dc_flow(v, {{1, 6.0}, {3, -6.0}});
    double into3 = r.flows.at(2) + r.flows.at(3) + r.flows.at(4) + r.flows.at(5);
    CHECK(into3 == doctest::Approx(6.0));
    CHECK(r.angles.at(1) == doctest::Approx(0.0));
}

TEST_CASE("matches the explicit angle formulation on random networks") {
    std::mt19937_64 rng(20240817);
    int solved = 0;
    for (int t = 0; t < 40; ++t) {
        Network net = random_network(rng);
        NetworkView v = all_in_view(net);
        DispatchSolution s = solve_dcopf(v);
        if (!s.feasible) continue;
        ++solved;
        double ref = angle_formulation_cost(v);
        CHECK(s.total_cost == doctest::Approx(ref).epsilon(1e-7));
        check_physics(net, s);
        // with no binding limit anywhere, all prices collapse to one value
        bool congested = false;
        for (const Line& l : net.lines)
            if (std::abs(s.flows.at(l.id)) > l.capacity_mw - 1e-5) congested = true;
        if (!congested)
            for (const Bus& b : net.buses)
                CHECK(std::abs(s.prices.at(b.id) - s.prices.at(net.buses[0].id)) <= 1e-6);
    }
    CHECK(solved >= 20);
}
