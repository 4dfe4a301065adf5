"""Matroid classification of entry patterns on the funtf variety.

Ranks come from the dual form of the Jacobian criterion: with ``d`` the
dimension and ``E^c`` the unknown entries,

    rank(E) = d - |E^c| + rank J_{E^c}

evaluated at random points of the variety. ``E`` is independent iff
``J_{E^c}`` has the rank of the full Jacobian and spanning iff ``J_{E^c}``
has full column rank. For ``n = 3`` and ``|E| = d`` the answer is exact:
``E`` is a basis iff ``G_E`` is connected.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from funtf.bigraph import BipartiteGraph, greater_two_core, incidence_matrix, is_connected, two_core
from funtf.exactla import RankResult, kernel_basis_exact, matmul_exact, rank_exact, rank_numeric
from funtf.frames import FuntfPoint, jacobian_at, sample_funtf
from funtf.pattern import (
    EntryPattern,
    check_matroid_range,
    complement_graph,
    expected_basis_size,
    format_pattern,
    necessary_conditions,
    pattern_from_graph,
)

DEFAULT_SAMPLES = 3


class RankUncertaintyError(RuntimeError):
    """Sampled ranks disagree or a singular-value gap is too small to trust."""


class InconsistencyError(RuntimeError):
    """A numeric verdict contradicts a proven combinatorial condition."""


class NotBasisError(ValueError):
    pass


@dataclass(frozen=True)
class MatroidVerdict:
    n: int
    r: int
    size: int
    rank_of_E: int
    dim: int
    is_independent: bool
    is_spanning: bool
    is_basis: bool
    method: str  # combinatorial-n3 | numeric-jacobian | necessary-conditions
    confidence: str  # certain | probability-one
    violations: tuple[str, ...] = ()

    def __post_init__(self):
        assert self.is_basis == (self.is_independent and self.is_spanning)
        assert not self.is_basis or self.size == self.dim

    @property
    def label(self) -> str:
        if self.is_basis:
            return "BASIS"
        if not self.is_spanning:
            return "NOT SPANNING"
        return "SPANNING, NOT INDEPENDENT" if not self.is_independent else "NOT A BASIS"


# --- sampled generic points ------------------------------------------------

def _sample_seed(seed: int, k: int) -> int:
    return int(np.random.SeedSequence([seed, k]).generate_state(1)[0])


@lru_cache(maxsize=64)
def sample_points(n: int, r: int, seed: int = 0, count: int = DEFAULT_SAMPLES) -> tuple[FuntfPoint, ...]:
    """Independent random points, cached per ``(n, r, seed, count)``."""
    return tuple(sample_funtf(n, r, _sample_seed(seed, k)) for k in range(count))


@lru_cache(maxsize=64)
def _jacobians(n: int, r: int, seed: int, count: int) -> tuple[np.ndarray, ...]:
    jacs = []
    for p in sample_points(n, r, seed, count):
        jac = jacobian_at(n, r, p.matrix)
        jac.setflags(write=False)
        jacs.append(jac)
    return tuple(jacs)


def _agreed_rank(results: list[RankResult], what: str) -> int:
    ranks = {res.rank for res in results}
    if len(ranks) != 1:
        raise RankUncertaintyError(f"{what}: sampled ranks disagree {sorted(ranks)}")
    if not all(res.certain for res in results):
        worst = min(res.gap_ratio for res in results)
        raise RankUncertaintyError(f"{what}: singular value gap {worst:.2e} below threshold")
    return ranks.pop()


def unknown_columns(e: EntryPattern) -> list[int]:
    """Jacobian column indices (row-major) of the unknown entries."""
    return [i * e.r + a for i, a in e.unknown()]


def complement_rank(e: EntryPattern, seed: int = 0, samples: int = DEFAULT_SAMPLES) -> int:
    """Generic rank of the Jacobian restricted to the unknown entries."""
    cols = unknown_columns(e)
    if not cols:
        return 0
    jacs = _jacobians(e.n, e.r, seed, samples)
    return _agreed_rank([rank_numeric(j[:, cols]) for j in jacs], "J restricted to unknowns")


def full_jacobian_rank(n: int, r: int, seed: int = 0, samples: int = DEFAULT_SAMPLES) -> int:
    jacs = _jacobians(n, r, seed, samples)
    rank = _agreed_rank([rank_numeric(j) for j in jacs], "full Jacobian")
    expected = n * r - expected_basis_size(n, r)
    if rank != expected:
        raise RankUncertaintyError(f"full Jacobian rank {rank}, expected {expected}")
    return rank


def matroid_rank(e: EntryPattern, samples: int = DEFAULT_SAMPLES, seed: int = 0) -> int:
    check_matroid_range(e.n, e.r)
    d = expected_basis_size(e.n, e.r)
    n_unknown = e.n * e.r - e.size
    return d - n_unknown + complement_rank(e, seed, samples)


def is_spanning(e: EntryPattern, seed: int = 0, samples: int = DEFAULT_SAMPLES) -> bool:
    check_matroid_range(e.n, e.r)
    return complement_rank(e, seed, samples) == e.n * e.r - e.size


def is_basis_n3(e: EntryPattern) -> bool:
    """Exact criterion for three rows: ``|E| = 2r - 5`` and ``G_E`` connected."""
    if e.n != 3:
        raise ValueError(f"criterion holds for n = 3 only, got n = {e.n}")
    if e.r < 5:
        raise ValueError("need r >= 5")
    return e.size == 2 * e.r - 5 and is_connected(complement_graph(e))


def classify(e: EntryPattern, seed: int = 0, force_numeric: bool = False,
             samples: int = DEFAULT_SAMPLES) -> MatroidVerdict:
    """Independent / spanning / basis verdict for ``e``.

    Three-row patterns of basis size are decided exactly by connectivity.
    Otherwise ranks are sampled; a violated combinatorial necessary
    condition turns the negative part of the verdict into a certain one and
    is cross-checked against the numeric ranks.
    """
    check_matroid_range(e.n, e.r)
    n, r = e.n, e.r
    d = expected_basis_size(n, r)
    size = e.size

    if e.n == 3 and size == d and not force_numeric:
        basis = is_basis_n3(e)
        # for |E| = d, independent <=> spanning <=> basis
        return MatroidVerdict(n, r, size, d if basis else matroid_rank(e, samples, seed), d,
                              basis, basis, basis, "combinatorial-n3", "certain")

    full_rank = full_jacobian_rank(n, r, seed, samples)
    crank = complement_rank(e, seed, samples)
    n_unknown = n * r - size
    independent = crank == full_rank
    spanning = crank == n_unknown
    rank_e = d - n_unknown + crank
    method, confidence, violations = "numeric-jacobian", "probability-one", ()

    if not force_numeric:
        span_rep = necessary_conditions(e, "spanning")
        basis_rep = necessary_conditions(e, "basis") if size == d else None
        if span_rep.violations:
            if spanning:
                raise InconsistencyError(f"numeric rank says spanning despite {span_rep.violations}")
            method, confidence, violations = "necessary-conditions", "certain", span_rep.violations
        elif basis_rep is not None and basis_rep.violations:
            if independent and spanning:
                raise InconsistencyError(f"numeric rank says basis despite {basis_rep.violations}")
            method, confidence, violations = "necessary-conditions", "certain", basis_rep.violations
    return MatroidVerdict(n, r, size, rank_e, d, independent, spanning, independent and spanning,
                          method, confidence, tuple(violations))


def verdict_json(v: MatroidVerdict, e: EntryPattern, core: str | None = None, k: int | None = None) -> dict:
    return {
        "n": v.n,
        "r": v.r,
        "pattern": format_pattern(e).splitlines(),
        "size": v.size,
        "independent": v.is_independent,
        "spanning": v.is_spanning,
        "basis": v.is_basis,
        "method": v.method,
        "confidence": v.confidence,
        "core": core,
        "k": k,
    }


# --- K-matrix certificate for three-row cores -------------------------------

# (K row, matrix row) -> exponents of (t1, t2) at that column, None for zero.
# K rows are f12, f13, f23; t1 = x2/x1 and t2 = x3/x1 per column.
_K_EXPONENTS = {
    (0, 0): (1, 0), (0, 1): (-1, 0), (0, 2): None,
    (1, 0): (0, 1), (1, 1): None, (1, 2): (0, -1),
    (2, 0): None, (2, 1): (-1, 1), (2, 2): (1, -1),
}


@dataclass(frozen=True)
class KMatrix:
    """Rows ``f12, f13, f23`` of the column-scaled Jacobian, restricted to
    the given edges; entries are Laurent monomials in ``t1[a], t2[a]``."""

    edges: tuple[tuple[int, int], ...]
    n_cols: int
    labels = ("f12", "f13", "f23")

    def exponents(self, k_row: int, edge: tuple[int, int]):
        return _K_EXPONENTS[k_row, edge[0]]

    def evaluate(self, t1, t2) -> list[list[Fraction]]:
        out = []
        for k_row in range(3):
            row = []
            for edge in self.edges:
                ex = self.exponents(k_row, edge)
                if ex is None:
                    row.append(Fraction(0))
                else:
                    a = edge[1]
                    row.append(Fraction(t1[a]) ** ex[0] * Fraction(t2[a]) ** ex[1])
            out.append(row)
        return out

    def symbolic(self):
        """The same matrix over sympy symbols ``t1_a``, ``t2_a``."""
        import sympy

        t1 = sympy.symbols(f"t1_0:{self.n_cols}")
        t2 = sympy.symbols(f"t2_0:{self.n_cols}")
        rows = []
        for k_row in range(3):
            row = []
            for edge in self.edges:
                ex = self.exponents(k_row, edge)
                a = edge[1]
                row.append(0 if ex is None else t1[a] ** ex[0] * t2[a] ** ex[1])
            rows.append(row)
        return sympy.Matrix(rows), t1, t2


@dataclass(frozen=True)
class Rank3Certificate:
    certified: bool
    trials: int
    probabilistic_only: bool

    def __bool__(self) -> bool:
        return self.certified


def _embed_rows(core: BipartiteGraph) -> BipartiteGraph:
    if core.n_rows == 3:
        return core
    if core.n_rows == 2:
        # a two-row core sits in rows 2 and 3 of the three-row setup
        return BipartiteGraph(3, core.n_cols, frozenset((i + 1, a) for i, a in core.edges))
    raise ValueError(f"core must have 2 or 3 row vertices, got {core.n_rows}")


def certify_core_rank3(core: BipartiteGraph, trials: int = 5, seed: int = 0) -> Rank3Certificate:
    """Exact check that ``K' M`` has rank 3 for the core.

    ``M`` holds an exact kernel basis of the core's incidence matrix and
    ``K'`` the K-matrix columns of the core edges. Random rational ``t``
    values are substituted; one rank-3 evaluation proves generic rank 3,
    since 3 is the maximum.
    """
    if core.n_rows not in (2, 3):
        raise ValueError(f"core must have 2 or 3 row vertices, got {core.n_rows}")
    if len(core.edges) != core.n_rows + core.n_cols + 2:
        raise ValueError(
            f"core needs rows + cols + 2 = {core.n_rows + core.n_cols + 2} edges, has {len(core.edges)}"
        )
    kernel = kernel_basis_exact(incidence_matrix(core))
    if len(kernel) != 3:
        raise ValueError(f"cycle space has dimension {len(kernel)}, expected 3")
    m = [list(col) for col in zip(*kernel)]  # edges x 3
    embedded = _embed_rows(core)
    kmat = KMatrix(tuple(embedded.sorted_edges()), core.n_cols)
    rng = np.random.default_rng(seed)

    def rand_rational():
        num = int(rng.integers(1, 10**4 + 1)) * int(rng.choice([-1, 1]))
        return Fraction(num, int(rng.integers(1, 10**4 + 1)))

    for trial in range(1, trials + 1):
        t1 = [rand_rational() for _ in range(core.n_cols)]
        t2 = [rand_rational() for _ in range(core.n_cols)]
        prod = matmul_exact(kmat.evaluate(t1, t2), m)
        if rank_exact(prod).rank == 3:
            return Rank3Certificate(True, trial, False)
    return Rank3Certificate(False, trials, True)


# --- 2-core reduction and the fiber bound ---------------------------------

def core_reduction(e: EntryPattern) -> tuple[EntryPattern, int]:
    """Pattern ``F`` whose complement is the greater 2-core of ``G_E``, and
    the number ``k`` of peeled edges."""
    g = complement_graph(e)
    red = greater_two_core(g)
    if red.k != red.newly_isolated and not is_connected(g):
        raise ValueError(
            f"disconnected complement graph: {red.k} peeled edges but "
            f"{red.newly_isolated} newly isolated vertices"
        )
    return pattern_from_graph(red.gcore), red.k


@dataclass(frozen=True)
class DegreeBound:
    core: BipartiteGraph
    k: int
    core_degree: int
    bound: int
    exact: bool

    def __post_init__(self):
        assert self.bound == self.core_degree * 2 ** self.k


def bound_fiber(e: EntryPattern, table, seed: int = 0) -> DegreeBound:
    """Fiber size bound ``deg(core) * 2^k`` read from a precomputed core table.

    Exact when ``r`` exceeds the number of core columns, otherwise an upper
    bound.
    """
    verdict = classify(e, seed=seed)
    if not verdict.is_basis:
        raise NotBasisError(f"pattern is not a basis ({verdict.label})")
    _, k = core_reduction(e)
    core = two_core(complement_graph(e)).graph
    record = table.lookup(core)
    if record.degree is None:
        raise ValueError("core has no recorded degree")
    exact = e.r >= core.n_cols + 1 and record.degree_exact
    return DegreeBound(core, k, record.degree, record.degree * 2 ** k, exact)

