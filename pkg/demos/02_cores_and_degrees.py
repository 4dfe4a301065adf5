#!/usr/bin/env python3
# Peeling the complement graph to its 2-core and counting completions by homotopy continuation
from funtf.bigraph import greater_two_core, two_core
from funtf.homotopy import compute_fiber
from funtf.matroid import core_reduction
from funtf.pattern import complement_graph, parse_pattern

e = parse_pattern("00000\n11000\n11100")
g = complement_graph(e)

# two pendant edges peel off; each one doubles the number of completions
red = greater_two_core(g)
print("peeled edges", red.removed_edges, "k =", red.k)
core = two_core(g)
print("core rows", core.rows, "cols", core.cols)
print(core.graph.to_text())

# solve the square system left after fixing the known entries
comp = compute_fiber(e, seed=0)
print(comp.report())

# the core pattern alone: known entries plus the peeled ones
f, k = core_reduction(e)
print(f, "\n")
core_comp = compute_fiber(f, seed=0)
print("core degree", core_comp.degree, "-> 2^k * core degree =", 2 ** k * core_comp.degree)
