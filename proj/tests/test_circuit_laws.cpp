#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "toposwitch/circuit_laws.hpp"
#include "toposwitch/dcopf.hpp"
#include "toposwitch/lab_instances.hpp"
#include "toposwitch/model.hpp"

using namespace toposwitch;

namespace {

CurrentCircuit parallel_pair() {
    CurrentCircuit c;
    c.nodes = {1, 2};
    c.edges = {{1, 1, 2, 1.0}, {2, 1, 2, 2.0}};
    c.injections = {{1, 3.0}, {2, -3.0}};
    return c;
}

CurrentCircuit triangle() {
    CurrentCircuit c;
    c.nodes = {1, 2, 3};
    c.edges = {{1, 1, 2, 1.0}, {2, 2, 3, 1.0}, {3, 1, 3, 1.0}};
    c.injections = {{1, 3.0}, {3, -3.0}};
    return c;
}

}  // namespace

TEST_CASE("current divider splits by conductance") {
    CurrentCircuit c = parallel_pair();
    CircuitSolution s = solve_current_circuit(c);
    CHECK(s.currents.at(1) == doctest::Approx(1.0));
    CHECK(s.currents.at(2) == doctest::Approx(2.0));
    CHECK(s.potentials.at(1) - s.potentials.at(2) == doctest::Approx(1.0));
    CHECK(total_loss(c, s) == doctest::Approx(3.0));
}

TEST_CASE("removing a parallel branch raises the loss by I*V'") {
    CurrentCircuit c = parallel_pair();
    RemovalDelta d = removal_delta(c, 1);
    // after removal: 3 A through 0.5 ohm -> 4.5 W, up from 3 W
    CHECK(d.delta_loss == doctest::Approx(1.5));
    CHECK(std::abs(d.identity_check) <= 1e-9);

    d = removal_delta(c, 2);
    // after removal: 3 A through 1 ohm -> 9 W
    CHECK(d.delta_loss == doctest::Approx(6.0));
    CHECK(std::abs(d.identity_check) <= 1e-9);
}

TEST_CASE("triangle circuit and edge removal") {
    CurrentCircuit c = triangle();
    CircuitSolution s = solve_current_circuit(c);
    CHECK(s.currents.at(1) == doctest::Approx(1.0));
    CHECK(s.currents.at(2) == doctest::Approx(1.0));
    CHECK(s.currents.at(3) == doctest::Approx(2.0));
    CHECK(total_loss(c, s) == doctest::Approx(6.0));

    RemovalDelta d = removal_delta(c, 1);
    CHECK(d.delta_loss == doctest::Approx(3.0));
    CHECK(std::abs(d.identity_check) <= 1e-9);
}

TEST_CASE("bridge removal is refused") {
    CurrentCircuit c;
    c.nodes = {1, 2, 3};
    c.edges = {{1, 1, 2, 1.0}, {2, 2, 3, 1.0}, {3, 2, 3, 2.0}};
    c.injections = {{1, 1.0}, {3, -1.0}};
    CHECK_THROWS_WITH_AS(removal_delta(c, 1), doctest::Contains("is a bridge"),
                         model_error);
    // the parallel pair is fair game
    CHECK(removal_delta(c, 2).delta_loss >= 0.0);
}

TEST_CASE("balanced bridge arm carries no current and removal is free") {
    CurrentCircuit c;
    c.nodes = {1, 2, 3, 4};
    c.edges = {{1, 1, 2, 1.0}, {2, 1, 3, 1.0}, {3, 2, 4, 1.0},
               {4, 3, 4, 1.0}, {5, 2, 3, 7.0}};
    c.injections = {{1, 2.0}, {4, -2.0}};
    CircuitSolution s = solve_current_circuit(c);
    CHECK(std::abs(s.currents.at(5)) <= 1e-12);
    RemovalDelta d = removal_delta(c, 5);
    CHECK(std::abs(d.delta_loss) <= 1e-12);
}

TEST_CASE("congestion report totals") {
    Network net = lab_noncommutative_instance();
    NetworkView v = all_in_view(net);
    DispatchSolution s = solve_dcopf(v);
    REQUIRE(s.feasible);
    CongestionReport r = congestion_report(v, s.flows);
    // caps 5,10,1,2,5 over unit susceptances
    CHECK(r.total_capacity == doctest::Approx(155.0));
    double loss = 0.0;
    for (const Line& l : net.lines) {
        double f = s.flows.at(l.id);
        loss += f * f / l.susceptance;
    }
    CHECK(r.total_loss == doctest::Approx(loss));
    CHECK(r.margin == doctest::Approx(r.total_capacity - r.total_loss));
}

TEST_CASE("randomized corpus holds the loss laws") {
    LawsCorpusResult r = run_laws_corpus(50, 42);
    CHECK(r.circuits == 50);
    CHECK(r.removals_checked > 50);
    CHECK(r.worst_loss_decrease >= -1e-8);
    CHECK(r.max_identity_rel_err <= 1e-6);
    CHECK(r.max_zero_current_delta <= 1e-9);

    // deterministic under a fixed seed
    LawsCorpusResult r2 = run_laws_corpus(50, 42);
    CHECK(r2.removals_checked == r.removals_checked);
    CHECK(r2.max_identity_rel_err == r.max_identity_rel_err);
}
