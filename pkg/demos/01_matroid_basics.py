#!/usr/bin/env python3
# Which sets of matrix entries determine a unit norm tight frame up to finitely many choices?
import numpy as np

from funtf.frames import frame_residual, jacobian_rank, sample_funtf
from funtf.matroid import classify, matroid_rank
from funtf.pattern import complement_graph, expected_basis_size, parse_pattern

# a random real 3x5 frame: unit columns, rows orthogonal with squared norm 5/3
p = sample_funtf(3, 5, seed=1)
print(np.round(p.matrix, 4))
print("residual", frame_residual(p.matrix))
print("row gram\n", np.round(p.matrix @ p.matrix.T, 12))

# the variety has dimension nr - n(n+1)/2 - r + 1, seen from the Jacobian rank
n, r = 3, 5
print("dimension", expected_basis_size(n, r), "=", n * r, "-", jacobian_rank(n, r, p.matrix).rank)

# a pattern lists the known entries (1 = known)
e = parse_pattern("00000\n11000\n11100")
print(e, "\n")
v = classify(e)
print(v.label, v.method, v.confidence)

# for three rows the answer is combinatorial: the unknown entries form a connected bipartite graph
g = complement_graph(e)
print("unknown entries", sorted(g.edges))

# the numeric route samples points and compares Jacobian ranks
print(classify(e, force_numeric=True).label, "rank", matroid_rank(e))

# a non-basis of the same size: column 1 fully known isolates its vertex
bad = parse_pattern("10000\n10000\n11100")
print(classify(bad).label, classify(bad, force_numeric=True).label)
