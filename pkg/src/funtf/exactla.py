"""Exact rank and kernels over the rationals, numeric rank via singular values."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

DEFAULT_RELATIVE_TOLERANCE = 1e-8
DEFAULT_GAP_THRESHOLD = 1e6

RationalMatrix = list[list[Fraction]]


@dataclass(frozen=True)
class RankResult:
    rank: int
    mode: str  # "exact" | "numeric"
    singular_values: tuple[float, ...] | None = None
    gap_ratio: float | None = None
    gap_threshold: float = DEFAULT_GAP_THRESHOLD

    @property
    def certain(self) -> bool:
        if self.mode == "exact":
            return True
        return self.gap_ratio is not None and self.gap_ratio >= self.gap_threshold


def as_rational(m: Sequence[Sequence]) -> RationalMatrix:
    """Copy ``m`` into a list-of-lists of Fractions.

    Floats are converted exactly (binary value), so pass ints or Fractions
    when exactness matters.
    """
    if isinstance(m, np.ndarray):
        m = m.tolist()
    rows = [[Fraction(x) for x in row] for row in m]
    if len({len(r) for r in rows}) > 1:
        raise ValueError("ragged matrix")
    return rows


def _clear_denominators(m: RationalMatrix) -> list[list[int]]:
    out = []
    for row in m:
        lcm = 1
        for x in row:
            lcm = lcm * x.denominator // math.gcd(lcm, x.denominator)
        out.append([int(x * lcm) for x in row])
    return out


def bareiss_echelon(m: Sequence[Sequence]) -> tuple[list[list[int]], list[int]]:
    """Fraction-free row echelon form of an integer-scaled copy of ``m``.

    Each row is first multiplied by the lcm of its denominators, so every
    intermediate entry stays an integer. Returns the echelon rows (only the
    nonzero ones) and their pivot columns.
    """
    a = _clear_denominators(as_rational(m))
    nrows = len(a)
    ncols = len(a[0]) if a else 0
    pivots: list[int] = []
    prev = 1
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        # smallest nonzero pivot keeps numbers short
        cand = [i for i in range(r, nrows) if a[i][c] != 0]
        if not cand:
            continue
        p = min(cand, key=lambda i: abs(a[i][c]))
        a[r], a[p] = a[p], a[r]
        piv = a[r][c]
        for i in range(r + 1, nrows):
            ai = a[i]
            aic = ai[c]
            for j in range(c + 1, ncols):
                ai[j] = (piv * ai[j] - aic * a[r][j]) // prev
            ai[c] = 0
        # rows above r beyond column c are untouched; below, exact division holds
        prev = piv
        pivots.append(c)
        r += 1
    return a[:r], pivots


def rank_exact(m: Sequence[Sequence]) -> RankResult:
    if len(m) == 0 or len(m[0]) == 0:
        return RankResult(0, "exact")
    _, pivots = bareiss_echelon(m)
    return RankResult(len(pivots), "exact")


def kernel_basis_exact(m: Sequence[Sequence]) -> list[list[Fraction]]:
    """Basis of the right kernel, one primitive integer vector per free column."""
    rows = as_rational(m)
    ncols = len(rows[0]) if rows else 0
    if ncols == 0:
        return []
    ech, pivots = bareiss_echelon(rows)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for r in range(len(pivots) - 1, -1, -1):
            pc = pivots[r]
            s = sum((ech[r][j] * x[j] for j in range(pc + 1, ncols) if ech[r][j]), Fraction(0))
            x[pc] = -s / ech[r][pc]
        lcm = 1
        for v in x:
            lcm = lcm * v.denominator // math.gcd(lcm, v.denominator)
        ints = [int(v * lcm) for v in x]
        g = 0
        for v in ints:
            g = math.gcd(g, v)
        basis.append([Fraction(v // g) for v in ints])
    return basis


def matmul_exact(a: Sequence[Sequence], b: Sequence[Sequence]) -> RationalMatrix:
    a, b = as_rational(a), as_rational(b)
    inner = len(b)
    cols = len(b[0]) if b else 0
    return [[sum((row[k] * b[k][j] for k in range(inner)), Fraction(0)) for j in range(cols)]
            for row in a]


def rank_numeric(
    m,
    relative_tolerance: float = DEFAULT_RELATIVE_TOLERANCE,
    gap_threshold: float = DEFAULT_GAP_THRESHOLD,
) -> RankResult:
    """Count singular values above ``relative_tolerance * sigma_max``.

    ``gap_ratio`` is ``sigma_rank / sigma_(rank+1)``, infinite when there is
    no next singular value or it is exactly zero. Results whose gap falls
    below ``gap_threshold`` report ``certain == False``.
    """
    a = np.asarray(m)
    if a.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    if a.size == 0:
        return RankResult(0, "numeric", (), math.inf, gap_threshold)
    s = np.linalg.svd(a, compute_uv=False)
    smax = s[0] if len(s) else 0.0
    rank = int(np.sum(s > relative_tolerance * smax)) if smax > 0 else 0
    if rank == 0 or rank == len(s) or s[rank] == 0:
        gap = math.inf
    else:
        gap = float(s[rank - 1] / s[rank])
    return RankResult(rank, "numeric", tuple(float(x) for x in s), gap, gap_threshold)
