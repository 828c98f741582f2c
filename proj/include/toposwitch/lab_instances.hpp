#pragma once

#include "toposwitch/model.hpp"
#include "toposwitch/paradox_lab.hpp"

namespace toposwitch {

// Recorded three-bus study instances. Each one is the first match produced by
// search_instance on the matching template below; they are kept inline so the
// lab, the CLI, and the tests share exact data without re-running searches.

// Best single removal (line 1) is not part of the best pair ({3, 4}).
inline Network lab_noncommutative_instance() {
    Network net;
    net.buses = {{1, 0.0}, {2, 0.0}, {3, 15.0}};
    net.lines = {{1, 1, 2, 1.0, 5.0, true},
                 {2, 1, 3, 1.0, 10.0, true},
                 {3, 2, 3, 1.0, 1.0, true},
                 {4, 2, 3, 1.0, 2.0, true},
                 {5, 2, 3, 1.0, 5.0, true}};
    net.generators = {{1, 1, 10.0, 0.0, 15.0}, {2, 3, 80.0, 0.0, 15.0}};
    net.finalize();
    return net;
}

inline SearchTemplate lab_noncommutative_template() {
    SearchTemplate t;
    t.buses = {{1, 0.0}, {2, 0.0}, {3, 15.0}};
    t.generators = {{1, 1, 10.0, 0.0, 15.0}, {2, 3, 80.0, 0.0, 15.0}};
    t.min_lines = 4;
    t.max_lines = 6;
    for (int c = 1; c <= 10; ++c) t.capacity_grid.push_back(c);
    t.all_in = {710.0, {7.0, 8.0}};
    t.traces = {{{1, false}, 1, {500.0, {10.0, 5.0}}, false},
                {{2, false}, 2, {150.0, {15.0, 0.0}}, false}};
    return t;
}

// Greedy remove-or-reconnect removes the tie line first and brings it back in
// its final step.
inline Network lab_nonmonotone_instance() {
    Network net;
    net.buses = {{1, 0.0}, {2, 0.0}, {3, 100.0}};
    net.lines = {{1, 1, 2, 1e8, 10.0, true},
                 {2, 1, 3, 1.0, 10.0, true},
                 {3, 2, 3, 1.0, 1.0, true},
                 {4, 2, 3, 1.0, 2.0, true},
                 {5, 2, 3, 1.0, 10.0, true},
                 {6, 2, 3, 1.0, 10.0, true}};
    net.generators = {{1, 1, 20.0, 0.0, 100.0},
                      {2, 2, 10.0, 0.0, 100.0},
                      {3, 3, 80.0, 0.0, 100.0}};
    net.finalize();
    return net;
}

inline SearchTemplate lab_nonmonotone_template() {
    SearchTemplate t;
    t.buses = {{1, 0.0}, {2, 0.0}, {3, 100.0}};
    t.generators = {{1, 1, 20.0, 0.0, 100.0},
                    {2, 2, 10.0, 0.0, 100.0},
                    {3, 3, 80.0, 0.0, 100.0}};
    t.stiff_tie = true;
    t.stiff_from = 1;
    t.stiff_to = 2;
    t.min_lines = 3;
    t.max_lines = 5;
    for (int c = 1; c <= 10; ++c) t.capacity_grid.push_back(c);
    t.capacity_grid.insert(t.capacity_grid.end(), {20.0, 30.0, 100.0});
    t.all_in = {7650.0, {0.0, 5.0, 95.0}};
    t.traces = {{{1, true}, 2, {5900.0, {0.0, 30.0, 70.0}}, true}};
    return t;
}

// Removal-only greedy reaches 4950 while remove-or-reconnect stalls at 5200.
inline Network lab_nonconsistent_a_instance() {
    Network net;
    net.buses = {{1, 0.0}, {2, 0.0}, {3, 100.0}};
    net.lines = {{1, 1, 2, 1e8, 10.0, true},
                 {2, 1, 3, 1.0, 10.0, true},
                 {3, 2, 3, 1.0, 1.0, true},
                 {4, 2, 3, 1.0, 1.5, true},
                 {5, 2, 3, 1.0, 10.0, true},
                 {6, 2, 3, 1.0, 15.5, true},
                 {7, 2, 3, 1.0, 35.0, true}};
    net.generators = {{1, 1, 20.0, 0.0, 100.0},
                      {2, 2, 10.0, 0.0, 100.0},
                      {3, 3, 80.0, 0.0, 100.0}};
    net.finalize();
    return net;
}

inline SearchTemplate lab_nonconsistent_a_template() {
    SearchTemplate t;
    t.buses = {{1, 0.0}, {2, 0.0}, {3, 100.0}};
    t.generators = {{1, 1, 20.0, 0.0, 100.0},
                    {2, 2, 10.0, 0.0, 100.0},
                    {3, 3, 80.0, 0.0, 100.0}};
    t.stiff_tie = true;
    t.stiff_from = 1;
    t.stiff_to = 2;
    t.min_lines = 4;
    t.max_lines = 6;
    for (int h = 2; h <= 32; ++h) t.capacity_grid.push_back(h / 2.0);
    t.capacity_grid.insert(t.capacity_grid.end(), {20.0, 25.0, 30.0, 35.0, 100.0});
    t.all_in = {7580.0, {0.0, 6.0, 94.0}};
    t.traces = {{{1, false}, 5, {4950.0, {10.0, 35.0, 55.0}}, false},
                {{1, true}, 2, {5200.0, {0.0, 40.0, 60.0}}, true}};
    return t;
}

// Single-removal greedy reaches 6600; pairwise greedy stops at 6606.86.
inline Network lab_nonconsistent_b_instance() {
    Network net;
    net.buses = {{1, 0.0}, {2, 100.0}, {3, 0.0}};
    net.lines = {{1, 1, 3, 8.0, 1e6, true},
                 {2, 1, 3, 1.1, 1e6, true},
                 {3, 1, 3, 1.1, 1e6, true},
                 {4, 1, 3, 5.0, 1e6, true},
                 {5, 1, 3, 5.0, 1e6, true},
                 {6, 1, 2, 5.0, 10.0, true},
                 {7, 3, 2, 10.0, 10.0, true}};
    net.generators = {{1, 1, 10.0, 0.0, 100.0}, {2, 2, 80.0, 0.0, 100.0}};
    net.finalize();
    return net;
}

inline SearchTemplate lab_nonconsistent_b_template() {
    SearchTemplate t;
    t.buses = {{1, 0.0}, {2, 100.0}, {3, 0.0}};
    t.generators = {{1, 1, 10.0, 0.0, 100.0}, {2, 2, 80.0, 0.0, 100.0}};
    t.fixed_susceptances = {8.0, 1.1, 1.1, 5.0, 5.0, 5.0, 10.0};
    t.fixed_capacities = {1e6, 1e6, 1e6, 1e6, 1e6, 10.0, 10.0};
    t.traces = {{{1, false}, 3, {6600.0, {20.0, 80.0}}, false},
                {{2, false}, 2, {6606.8627450980, {19.9019607843, 80.0980392157}}, false}};
    t.cost_tol = 1.0;
    t.mw_tol = 0.1;
    return t;
}

}  // namespace toposwitch
