"""Entry patterns and the combinatorial necessary conditions on them.

A pattern is the set ``E`` of known entries of an ``n x r`` matrix. Its text
form is the 0/1 grid with ``1`` marking a known entry. The complement graph
``G_E`` has an edge for every unknown entry.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from funtf.bigraph import BipartiteGraph, is_connected, two_core

Entry = tuple[int, int]


class PatternFormatError(ValueError):
    pass


@dataclass(frozen=True)
class EntryPattern:
    n: int
    r: int
    entries: frozenset[Entry] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.n < 1 or self.r < 1:
            raise ValueError("pattern needs n >= 1 and r >= 1")
        entries = frozenset((int(i), int(a)) for i, a in self.entries)
        for i, a in entries:
            if not (0 <= i < self.n and 0 <= a < self.r):
                raise ValueError(f"entry {(i, a)} outside {self.n}x{self.r}")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_grid(cls, grid) -> EntryPattern:
        g = np.asarray(grid, dtype=bool)
        return cls(g.shape[0], g.shape[1], frozenset(zip(*map(list, np.nonzero(g)))))

    @classmethod
    def full(cls, n: int, r: int) -> EntryPattern:
        return cls(n, r, frozenset((i, a) for i in range(n) for a in range(r)))

    @property
    def known(self) -> np.ndarray:
        grid = np.zeros((self.n, self.r), dtype=bool)
        for i, a in self.entries:
            grid[i, a] = True
        return grid

    @property
    def size(self) -> int:
        return len(self.entries)

    def unknown(self) -> list[Entry]:
        return [(i, a) for i in range(self.n) for a in range(self.r) if (i, a) not in self.entries]

    def permuted(self, row_perm, col_perm) -> EntryPattern:
        return EntryPattern(self.n, self.r, frozenset((row_perm[i], col_perm[a]) for i, a in self.entries))

    def with_unknown_column(self) -> EntryPattern:
        """Append one fully unknown column."""
        return EntryPattern(self.n, self.r + 1, self.entries)

    def with_known_column(self) -> EntryPattern:
        """Append one fully known column."""
        return EntryPattern(self.n, self.r + 1, self.entries | {(i, self.r) for i in range(self.n)})

    def __str__(self) -> str:
        return format_pattern(self)


def parse_pattern(text: str) -> EntryPattern:
    """Parse lines of 0/1 characters, optionally whitespace separated.

    Blank lines and ``#`` comments are ignored.
    """
    rows = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        cells = line.split() if any(ch.isspace() for ch in line) else list(line)
        for ch in cells:
            if ch not in ("0", "1"):
                raise PatternFormatError(f"illegal character {ch!r} in pattern")
        rows.append([ch == "1" for ch in cells])
    if not rows:
        raise PatternFormatError("empty pattern")
    if len({len(r) for r in rows}) != 1:
        raise PatternFormatError("ragged rows in pattern")
    return EntryPattern.from_grid(rows)


def format_pattern(e: EntryPattern) -> str:
    return "\n".join("".join("1" if k else "0" for k in row) for row in e.known)


def complement_graph(e: EntryPattern) -> BipartiteGraph:
    return BipartiteGraph(e.n, e.r, frozenset(e.unknown()))


def pattern_from_graph(g: BipartiteGraph) -> EntryPattern:
    """Inverse of :func:`complement_graph`."""
    return EntryPattern(
        g.n_rows, g.n_cols,
        frozenset((i, a) for i in range(g.n_rows) for a in range(g.n_cols) if (i, a) not in g.edges),
    )


def expected_basis_size(n: int, r: int) -> int:
    """Dimension ``nr - n(n+1)/2 - r + 1`` of the variety, valid for ``r > n >= 2``."""
    if not (r > n >= 2):
        raise ValueError(f"dimension formula needs r > n >= 2, got n={n}, r={r}")
    return n * r - n * (n + 1) // 2 - r + 1


def check_matroid_range(n: int, r: int) -> None:
    """The variety is irreducible, so the matroid is defined, only for r >= n+2 > 4."""
    if not (r >= n + 2 and n + 2 > 4):
        raise ValueError(f"r >= n+2 > 4 required, got n={n}, r={r}")


@dataclass(frozen=True)
class ConditionReport:
    """Outcome of the purely combinatorial checks.

    A violation proves the pattern is not a basis (or not spanning); a clean
    report proves nothing. ``size_ok`` and ``connected`` are ``None`` when
    not evaluated (spanning mode).
    """

    size_ok: bool | None
    connected: bool | None
    full_unknown_columns: int
    core_alpha: int
    core_beta: int
    violations: tuple[str, ...]
    mode: str = "basis"

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        d = asdict(self)
        d["violations"] = list(self.violations)
        del d["mode"]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def necessary_conditions(e: EntryPattern, mode: str = "basis") -> ConditionReport:
    """Necessary conditions for ``e`` to be a basis (or spanning).

    * basis mode: ``|E|`` equals the dimension and ``G_E`` is connected;
    * both modes: at most two columns are entirely unknown;
    * basis mode: the 2-core has ``alpha`` in ``{n-1, n}`` row vertices and
      ``alpha <= beta <= n(n-1)/2 + alpha - 1`` column vertices.
    """
    if mode not in ("basis", "spanning"):
        raise ValueError(f"unknown mode {mode!r}")
    check_matroid_range(e.n, e.r)
    g = complement_graph(e)
    core = two_core(g)
    alpha, beta = core.graph.n_rows, core.graph.n_cols
    full_cols = sum(1 for d in g.col_degrees() if d == e.n)

    violations = []
    size_ok = connected = None
    if mode == "basis":
        size_ok = e.size == expected_basis_size(e.n, e.r)
        if not size_ok:
            violations.append("cardinality")
        connected = is_connected(g)
        if not connected:
            violations.append("disconnected")
    if full_cols > 2:
        violations.append("full_unknown_columns")
    if mode == "basis" and connected:
        if alpha not in (e.n - 1, e.n):
            violations.append("core_alpha")
        if not (alpha <= beta <= e.n * (e.n - 1) // 2 + alpha - 1):
            violations.append("core_beta")
    return ConditionReport(size_ok, connected, full_cols, alpha, beta, tuple(violations), mode)
