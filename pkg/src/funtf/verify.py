"""Reproduction checks behind ``funtf verify``.

Each check returns a :class:`CheckResult`. The ``fast`` scope skips every
homotopy run with more than ``2**10`` start paths.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from funtf.bigraph import BipartiteGraph, canonical_form, greater_two_core, incidence_matrix, two_core
from funtf.cores import CoreTable, classify_cores, enumerate_candidate_cores, feasible_shapes
from funtf.frames import frame_residual, jacobian_rank, sample_funtf, trace_identity_defect
from funtf.homotopy import CERTIFY_RESIDUAL, FiberComputation, compute_fiber
from funtf.matroid import certify_core_rank3, classify, core_reduction, is_basis_n3, is_spanning, matroid_rank
from funtf.pattern import EntryPattern, complement_graph, expected_basis_size, parse_pattern

FAST_PATH_LIMIT = 1 << 10

# Known-entry blocks of the seven three-row cores and their fiber degrees.
TABLE1 = {
    "000\n000\n100": 32,
    "0000\n0000": 24,
    "0000\n1100\n0010": 96,
    "0010\n0100\n1000": 128,
    "11100\n00011\n00000": 288,
    "00110\n11000\n00001": 576,
    "00111\n01000\n10000": 384,
}
EXAMPLE_PATTERN = "00000\n11000\n11100"
EXAMPLE_DEGREE = 128
EXAMPLE_CORE_DEGREE = 32
EXAMPLE_K = 2
FEASIBLE_N3 = [(2, 4), (3, 3), (3, 4), (3, 5)]
NOT_SPANNING_PATTERNS = (
    "000000\n000111\n000111\n000111",
    "0000000\n0001111\n0001101\n0001110\n0001111",
)
INCIDENCE_K35 = np.array([
    [1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1],
    [1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0],
    [0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0],
    [0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0],
    [0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0],
    [0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1],
])
DIMENSION_CASES = [(3, 5), (3, 6), (4, 6), (5, 7)]


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str = ""
    skipped: list[str] = field(default_factory=list)
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f" (skipped: {', '.join(self.skipped)})" if self.skipped else ""
        return f"[{status}] {self.number:2d} {self.name}: {self.detail}{extra}"

    def to_dict(self) -> dict:
        return {
            "number": self.number, "name": self.name, "passed": self.passed,
            "detail": self.detail, "skipped": self.skipped, "seconds": round(self.seconds, 3),
        }


def n_paths(e: EntryPattern) -> int:
    return 2 ** (e.n * e.r - e.size)


def core_key_of_block(block: str) -> str:
    return canonical_form(complement_graph(parse_pattern(block)))


def random_basis_n3(r: int, rng: np.random.Generator, min_k: int = 1) -> EntryPattern:
    """Random three-row basis (connected complement) with at least ``min_k`` peeled edges."""
    cells = [(i, a) for i in range(3) for a in range(r)]
    size = expected_basis_size(3, r)
    while True:
        idx = rng.choice(len(cells), size, replace=False)
        e = EntryPattern(3, r, frozenset(cells[j] for j in idx))
        if is_basis_n3(e) and greater_two_core(complement_graph(e)).k >= min_k:
            return e


def random_spanning(n: int, r: int, count: int, rng: np.random.Generator, seed: int = 0) -> list[EntryPattern]:
    """Uniformly random subsets (each entry known with probability 1/2) that are spanning."""
    out = []
    while len(out) < count:
        known = rng.random((n, r)) < 0.5
        e = EntryPattern.from_grid(known)
        if is_spanning(e, seed=seed):
            out.append(e)
    return out


def solver_ok(comp: FiberComputation) -> bool:
    for run in comp.runs:
        sols = run.solutions
        if sols.count("converged") + sols.count("diverged") + sols.count("stalled") != sols.n_paths:
            return False
        if sols.count("stalled") or run.certify_residual >= CERTIFY_RESIDUAL:
            return False
    return len({run.solutions.distinct_count for run in comp.runs}) <= 1


class Suite:
    def __init__(self, scope: str = "fast", seed: int = 0, table: CoreTable | None = None):
        if scope not in ("fast", "full"):
            raise ValueError(f"unknown scope {scope!r}")
        self.scope = scope
        self.seed = seed
        self.table = table
        self.fibers: list[FiberComputation] = []

    def _allowed(self, e: EntryPattern) -> bool:
        return self.scope == "full" or n_paths(e) <= FAST_PATH_LIMIT

    def _fiber(self, e: EntryPattern) -> FiberComputation:
        comp = compute_fiber(e, seed=self.seed)
        self.fibers.append(comp)
        return comp

    def table1(self) -> CheckResult:
        skipped, bad = [], []
        if self.table is not None and self.scope == "full":
            recs = list(self.table.records.values())
        else:
            candidates = enumerate_candidate_cores(3)
            todo = []
            for rec in candidates:
                if self.scope == "fast" and 2 ** rec.edge_count > FAST_PATH_LIMIT:
                    skipped.append(rec.key)
                else:
                    todo.append(rec)
            recs = classify_cores(3, [5, 6], seed=self.seed, records=todo, sink=self.fibers)
        by_key = {rec.key: rec for rec in recs}
        if self.table is None:
            self.table = CoreTable.from_records(3, recs, [5, 6], self.seed)
        for block, degree in TABLE1.items():
            key = core_key_of_block(block)
            if key in skipped:
                continue
            rec = by_key.get(key)
            if rec is None or not rec.is_spanning_core or rec.degree != degree:
                bad.append(f"{key}: {None if rec is None else rec.degree} != {degree}")
                continue
            if rec.beta == 5 and (rec.degrees_by_r.get(5) != rec.degrees_by_r.get(6)):
                bad.append(f"{key}: r=5 and r=6 differ")
        ok = not bad and (len(recs) + len(skipped) == 7)
        found = sorted(rec.degree for rec in recs if rec.degree is not None)
        return CheckResult(1, "core degrees for three rows", ok, "; ".join(bad) or f"degrees {found}", skipped)

    def example(self) -> CheckResult:
        e = parse_pattern(EXAMPLE_PATTERN)
        f, k = core_reduction(e)
        core_key = canonical_form(greater_two_core(complement_graph(e)).gcore)
        core_ok = core_key == canonical_form(complement_graph(f))
        table_key = core_key_of_block("000\n000\n100")
        core_ok = core_ok and canonical_form(two_core(complement_graph(e)).graph) == table_key
        direct = self._fiber(e).degree
        ok = k == EXAMPLE_K and core_ok and direct == EXAMPLE_DEGREE == EXAMPLE_CORE_DEGREE * 2 ** k
        via_table = None
        if self.table is not None:
            rec = self.table.records.get(table_key)
            via_table = None if rec is None or rec.degree is None else rec.degree * 2 ** k
        ok = ok and via_table == EXAMPLE_DEGREE
        return CheckResult(2, "worked example 00000;11000;11100", ok,
                           f"k={k} core_match={core_ok} table={via_table} direct={direct}")

    def enumeration(self) -> CheckResult:
        recs = enumerate_candidate_cores(3)
        shapes = feasible_shapes(recs)
        keys = {rec.key for rec in recs}
        expected = {core_key_of_block(b) for b in TABLE1}
        ok = len(recs) == 7 and shapes == FEASIBLE_N3 and keys == expected
        return CheckResult(3, "candidate core enumeration n=3", ok, f"{len(recs)} cores, shapes {shapes}")

    def oracle_agreement(self) -> CheckResult:
        cells = [(i, a) for i in range(3) for a in range(5)]
        disagree = uncertain = bases = total = 0
        for subset in itertools.combinations(cells, 5):
            e = EntryPattern(3, 5, frozenset(subset))
            total += 1
            v = classify(e, seed=self.seed, force_numeric=True)
            if v.confidence != "probability-one":
                uncertain += 1
            bases += v.is_basis
            disagree += v.is_basis != is_basis_n3(e)
        ok = total == 3003 and disagree == 0 and uncertain == 0
        return CheckResult(4, "numeric vs connectivity over 3003 patterns", ok,
                           f"{disagree} disagreements, {bases} bases")

    def kmatrix(self) -> CheckResult:
        failures = [rec.key for rec in enumerate_candidate_cores(3) if not certify_core_rank3(rec.core, seed=self.seed)]
        return CheckResult(5, "exact K-matrix rank 3", not failures, ", ".join(failures) or "7/7 certified")

    def incidence(self) -> CheckResult:
        m = incidence_matrix(BipartiteGraph.complete(3, 5))
        ok = m.shape == INCIDENCE_K35.shape and bool((m == INCIDENCE_K35).all())
        return CheckResult(6, "incidence matrix of K_{3,5}", ok, f"shape {m.shape}")

    def not_spanning(self) -> CheckResult:
        details, ok = [], True
        for text in NOT_SPANNING_PATTERNS:
            e = parse_pattern(text)
            v = classify(e, seed=self.seed)
            deficient = matroid_rank(e, seed=self.seed) < expected_basis_size(e.n, e.r)
            good = (not v.is_spanning and v.confidence == "certain" and "full_unknown_columns" in v.violations
                    and not is_spanning(e, seed=self.seed) and deficient)
            ok &= good
            details.append(f"{e.n}x{e.r}:{'ok' if good else 'bad'}")
        return CheckResult(7, "three unknown columns are not spanning", ok, " ".join(details))

    def trace_identity(self) -> CheckResult:
        rng = np.random.default_rng([self.seed, 8])
        worst_exact, worst_float = Fraction(0), 0.0
        for _ in range(100):
            n = int(rng.integers(2, 6))
            r = int(rng.integers(n, 9))
            ints = rng.integers(-9, 10, (n, r))
            w = np.array([[Fraction(int(x)) for x in row] for row in ints], dtype=object)
            worst_exact = max(worst_exact, abs(trace_identity_defect(w)))
            worst_float = max(worst_float, abs(float(trace_identity_defect(ints.astype(float) / 3.0))))
        ok = worst_exact == 0 and worst_float < 1e-12
        return CheckResult(8, "trace identity", ok, f"exact {worst_exact}, float {worst_float:.1e}")

    def dimensions(self) -> CheckResult:
        details, ok = [], True
        for n, r in DIMENSION_CASES:
            p = sample_funtf(n, r, seed=self.seed)
            res = jacobian_rank(n, r, p.matrix)
            want = r + n * (n + 1) // 2 - 1
            good = res.rank == want and res.gap_ratio > 1e6 and frame_residual(p.matrix) < 1e-12
            ok &= good
            details.append(f"({n},{r}) rank {res.rank} gap {res.gap_ratio:.1e}")
        return CheckResult(9, "Jacobian rank", ok, "; ".join(details))

    def multiplicativity(self) -> CheckResult:
        rng = np.random.default_rng([self.seed, 10])
        patterns = [parse_pattern(EXAMPLE_PATTERN)]
        patterns += [random_basis_n3(r, rng) for r in (5, 5, 6)]
        details, skipped, ok = [], [], True
        for e in patterns:
            f, k = core_reduction(e)
            if not (self._allowed(e) and self._allowed(f)):
                skipped.append(f"{e.n}x{e.r} k={k}")
                continue
            de, df = self._fiber(e).degree, self._fiber(f).degree
            ok &= de == 2 ** k * df
            details.append(f"{de}=2^{k}*{df}")
        return CheckResult(10, "degree multiplicativity", ok, ", ".join(details), skipped)

    def unknown_column(self) -> CheckResult:
        """Literal check with an appended unknown column, plus the known-column variant.

        The literal property fails for every basis: the pattern keeps ``d``
        entries while the dimension grows to ``d + n - 1``. Only the
        literal outcome decides pass/fail; the known-column count is reported.
        """
        rng = np.random.default_rng([self.seed, 11])
        patterns = random_spanning(3, 5, 10, rng, self.seed)
        literal = sum(is_spanning(e.with_unknown_column(), seed=self.seed) for e in patterns)
        known = sum(is_spanning(e.with_known_column(), seed=self.seed) for e in patterns)
        return CheckResult(11, "appending an unknown column keeps spanning", literal == len(patterns),
                           f"unknown column {literal}/{len(patterns)}, known column {known}/{len(patterns)}")

    def solver(self) -> CheckResult:
        bad = [f"{comp.pattern.n}x{comp.pattern.r}" for comp in self.fibers if not solver_ok(comp)]
        worst = max((comp.residual_max for comp in self.fibers), default=0.0)
        return CheckResult(12, "solver path accounting and certification", not bad and bool(self.fibers),
                           f"{len(self.fibers)} fibers, max residual {worst:.1e}")

    def run(self, progress=None) -> list[CheckResult]:
        checks = [self.table1, self.example, self.enumeration, self.oracle_agreement, self.kmatrix,
                  self.incidence, self.not_spanning, self.trace_identity, self.dimensions,
                  self.multiplicativity, self.unknown_column, self.solver]
        results = []
        for check in checks:
            t0 = time.perf_counter()
            try:
                res = check()
            except Exception as exc:  # a crash is a failed check, not an aborted suite
                res = CheckResult(len(results) + 1, check.__name__, False, f"{type(exc).__name__}: {exc}")
            res.seconds = time.perf_counter() - t0
            results.append(res)
            if progress:
                progress(res)
        return results
