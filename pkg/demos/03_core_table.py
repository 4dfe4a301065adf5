#!/usr/bin/env python3
# The finite list of possible 2-cores for three rows, their degrees, and table lookups
# Runs about a minute: 14 homotopy computations of up to 1024 paths each.
import tempfile
from pathlib import Path

from funtf.cores import CoreTable, classify_cores, describe, enumerate_candidate_cores, load_table, save_table
from funtf.matroid import bound_fiber
from funtf.pattern import parse_pattern

cands = enumerate_candidate_cores(3)
print(len(cands), "candidate cores")
for rec in cands:
    print(rec.alpha, "x", rec.beta, rec.key)

records = classify_cores(3, [5, 6], seed=0)
for rec in records:
    print(describe(rec, 3))

table = CoreTable.from_records(3, records, [5, 6], 0)
path = Path(tempfile.mkdtemp()) / "funtf_cores_n3.json"
save_table(table, path)
table = load_table(path)

# any three-row basis is now answered by a lookup: degree = 2^k * degree(core)
for text in ["00000\n11000\n11100", "011111\n000001\n000010"]:
    b = bound_fiber(parse_pattern(text), table)
    print(text.replace("\n", ";"), "->", b.bound, "= 2^%d * %d" % (b.k, b.core_degree))

# larger n: enumeration only (degrees need too many paths for total-degree homotopy)
n4 = enumerate_candidate_cores(4)
print(len(n4), "candidate cores for four rows")
