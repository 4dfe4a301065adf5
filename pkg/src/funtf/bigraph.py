"""Bipartite graph combinatorics.

Graphs here are the complement graphs of entry patterns: row vertices are
matrix rows, column vertices are matrix columns, and an edge ``(i, a)``
marks an unknown entry. Indices are 0-based. Edges are always listed
row-major (row index outer, column index inner).
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

MAX_ROWS = 8
MAX_COLS = 16
MAX_EDGES = 40

Edge = tuple[int, int]


class GraphSizeError(ValueError):
    """Raised when a graph exceeds the limits of canonization/enumeration."""


@dataclass(frozen=True)
class BipartiteGraph:
    n_rows: int
    n_cols: int
    edges: frozenset[Edge] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.n_rows < 0 or self.n_cols < 0:
            raise ValueError("vertex counts must be non-negative")
        edges = frozenset((int(i), int(a)) for i, a in self.edges)
        for i, a in edges:
            if not (0 <= i < self.n_rows and 0 <= a < self.n_cols):
                raise ValueError(f"edge {(i, a)} outside {self.n_rows}x{self.n_cols}")
        object.__setattr__(self, "edges", edges)

    @classmethod
    def complete(cls, n_rows: int, n_cols: int) -> BipartiteGraph:
        return cls(n_rows, n_cols, frozenset(itertools.product(range(n_rows), range(n_cols))))

    @classmethod
    def from_text(cls, text: str) -> BipartiteGraph:
        """Parse the 0/1 grid form written by :meth:`to_text` ('1' = edge)."""
        rows = [line.replace(" ", "") for line in text.strip().splitlines() if line.strip()]
        if not rows or len({len(r) for r in rows}) != 1:
            raise ValueError("graph text must be a non-empty rectangular 0/1 grid")
        edges = set()
        for i, line in enumerate(rows):
            for a, ch in enumerate(line):
                if ch == "1":
                    edges.add((i, a))
                elif ch != "0":
                    raise ValueError(f"illegal character {ch!r} in graph text")
        return cls(len(rows), len(rows[0]), frozenset(edges))

    def to_text(self) -> str:
        return "\n".join(
            "".join("1" if (i, a) in self.edges else "0" for a in range(self.n_cols))
            for i in range(self.n_rows)
        )

    @property
    def n_vertices(self) -> int:
        return self.n_rows + self.n_cols

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    def row_degrees(self) -> list[int]:
        deg = [0] * self.n_rows
        for i, _ in self.edges:
            deg[i] += 1
        return deg

    def col_degrees(self) -> list[int]:
        deg = [0] * self.n_cols
        for _, a in self.edges:
            deg[a] += 1
        return deg

    def adjacency(self) -> np.ndarray:
        """``n_rows x n_cols`` 0/1 biadjacency matrix."""
        adj = np.zeros((self.n_rows, self.n_cols), dtype=np.int8)
        for i, a in self.edges:
            adj[i, a] = 1
        return adj

    def relabel(self, row_perm, col_perm) -> BipartiteGraph:
        """Image of the graph under ``row i -> row_perm[i]``, ``col a -> col_perm[a]``."""
        return BipartiteGraph(
            self.n_rows, self.n_cols,
            frozenset((row_perm[i], col_perm[a]) for i, a in self.edges),
        )


def connected_components(g: BipartiteGraph) -> list[set[int]]:
    """Components over all vertices; column vertex ``a`` has id ``n_rows + a``."""
    parent = list(range(g.n_vertices))

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for i, a in g.edges:
        ri, ra = find(i), find(g.n_rows + a)
        if ri != ra:
            parent[ri] = ra
    comps: dict[int, set[int]] = {}
    for v in range(g.n_vertices):
        comps.setdefault(find(v), set()).add(v)
    return list(comps.values())


def is_connected(g: BipartiteGraph) -> bool:
    """True iff the graph on all rows and columns, isolated ones included, is connected."""
    return len(connected_components(g)) == 1


@dataclass(frozen=True)
class CoreReduction:
    """Result of peeling a graph down to its greater 2-core.

    ``removed_edges`` lists the peeled edges in removal order; each one was
    incident to a degree-1 vertex when it was removed. ``newly_isolated``
    counts vertices isolated in the core but not in the input.
    """

    gcore: BipartiteGraph
    removed_edges: tuple[Edge, ...]
    newly_isolated: int

    @property
    def k(self) -> int:
        return len(self.removed_edges)


def greater_two_core(g: BipartiteGraph, rng: np.random.Generator | None = None) -> CoreReduction:
    """Iteratively delete edges at degree-1 vertices until none remain.

    With ``rng`` the pending degree-1 vertices are processed in random order;
    the resulting core does not depend on the order.
    """
    nbrs: dict[int, set[int]] = {v: set() for v in range(g.n_vertices)}
    for i, a in g.edges:
        nbrs[i].add(g.n_rows + a)
        nbrs[g.n_rows + a].add(i)
    initially_isolated = {v for v, s in nbrs.items() if not s}

    pending = [v for v in range(g.n_vertices) if len(nbrs[v]) == 1]
    removed: list[Edge] = []
    while pending:
        if rng is not None:
            v = pending.pop(int(rng.integers(len(pending))))
        else:
            v = pending.pop(0)
        if len(nbrs[v]) != 1:
            continue
        (u,) = nbrs[v]
        nbrs[v].clear()
        nbrs[u].discard(v)
        row, col = (v, u) if v < g.n_rows else (u, v)
        removed.append((row, col - g.n_rows))
        if len(nbrs[u]) == 1:
            pending.append(u)

    core_edges = frozenset(g.edges.difference(removed))
    isolated = {v for v, s in nbrs.items() if not s}
    red = CoreReduction(
        BipartiteGraph(g.n_rows, g.n_cols, core_edges),
        tuple(removed),
        len(isolated - initially_isolated),
    )
    # A pendant edge of a connected graph with a cycle isolates exactly one vertex.
    if core_edges and is_connected(g):
        assert red.k == red.newly_isolated, "peeling count mismatch on connected graph"
    return red


@dataclass(frozen=True)
class TwoCore:
    """The 2-core with isolated vertices removed and rows/cols relabeled
    contiguously. ``rows[j]`` is the original index of new row ``j``."""

    graph: BipartiteGraph
    rows: tuple[int, ...]
    cols: tuple[int, ...]


def two_core(g: BipartiteGraph) -> TwoCore:
    core = greater_two_core(g).gcore
    rows = tuple(sorted({i for i, _ in core.edges}))
    cols = tuple(sorted({a for _, a in core.edges}))
    rmap = {old: new for new, old in enumerate(rows)}
    cmap = {old: new for new, old in enumerate(cols)}
    graph = BipartiteGraph(
        len(rows), len(cols), frozenset((rmap[i], cmap[a]) for i, a in core.edges)
    )
    return TwoCore(graph, rows, cols)


def incidence_matrix(g: BipartiteGraph) -> np.ndarray:
    """Vertex-by-edge 0/1 matrix: row vertices first, then column vertices;
    edge columns in row-major order."""
    edges = g.sorted_edges()
    mat = np.zeros((g.n_vertices, len(edges)), dtype=np.int64)
    for k, (i, a) in enumerate(edges):
        mat[i, k] = 1
        mat[g.n_rows + a, k] = 1
    return mat


@dataclass(frozen=True)
class CycleVector:
    """Signed cycle: adjacent edges along the cycle carry opposite signs."""

    entries: dict[Edge, int]

    def as_array(self, edge_order: list[Edge]) -> np.ndarray:
        return np.array([self.entries.get(e, 0) for e in edge_order], dtype=np.int64)


def spanning_forest(g: BipartiteGraph) -> tuple[set[Edge], dict[int, tuple[int, Edge] | None]]:
    """BFS forest. Returns the forest edges and a parent map
    ``vertex -> (parent vertex, edge)`` (``None`` at roots)."""
    nbrs: dict[int, list[tuple[int, Edge]]] = {v: [] for v in range(g.n_vertices)}
    for e in g.sorted_edges():
        i, a = e
        nbrs[i].append((g.n_rows + a, e))
        nbrs[g.n_rows + a].append((i, e))
    parent: dict[int, tuple[int, Edge] | None] = {}
    depth: dict[int, int] = {}
    tree: set[Edge] = set()
    for root in range(g.n_vertices):
        if root in parent:
            continue
        parent[root] = None
        depth[root] = 0
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for u, e in nbrs[v]:
                if u not in parent:
                    parent[u] = (v, e)
                    depth[u] = depth[v] + 1
                    tree.add(e)
                    queue.append(u)
    return tree, parent


def cycle_space_basis(g: BipartiteGraph) -> list[CycleVector]:
    """Fundamental circuits of the non-forest edges of a BFS spanning forest."""
    tree, parent = spanning_forest(g)

    def path_to_root(v):
        path = [v]
        while parent[v] is not None:
            v = parent[v][0]
            path.append(v)
        return path

    basis = []
    for e in g.sorted_edges():
        if e in tree:
            continue
        u, w = e[0], g.n_rows + e[1]
        pu, pw = path_to_root(u), path_to_root(w)
        on_pw = set(pw)
        lca = next(v for v in pu if v in on_pw)
        # walk u -> lca -> w then close with e
        walk = pu[: pu.index(lca) + 1] + list(reversed(pw[: pw.index(lca)]))
        cyc_edges = [parent[v][1] for v in pu[: pu.index(lca)]]
        cyc_edges += [parent[v][1] for v in reversed(pw[: pw.index(lca)])]
        cyc_edges.append(e)
        assert len(walk) == len(cyc_edges) and len(cyc_edges) % 2 == 0
        basis.append(CycleVector({ce: (1 if k % 2 == 0 else -1) for k, ce in enumerate(cyc_edges)}))

    expected = len(g.edges) - g.n_vertices + len(connected_components(g))
    assert len(basis) == expected
    if basis:
        inc = incidence_matrix(g)
        order = g.sorted_edges()
        for vec in basis:
            assert not np.any(inc @ vec.as_array(order))
    return basis


# --- canonical forms -------------------------------------------------------

def _check_size(n_rows: int, n_cols: int) -> None:
    if n_rows > MAX_ROWS or n_cols > MAX_COLS:
        raise GraphSizeError(
            f"{n_rows}x{n_cols} exceeds the {MAX_ROWS}x{MAX_COLS} canonization limit"
        )


def canonical_form(g: BipartiteGraph) -> str:
    """Encoding equal for two graphs iff they are bipartite-isomorphic.

    The encoding is the lexicographically largest row-major reading of the
    biadjacency matrix over all row permutations, with columns sorted in
    decreasing order after each permutation. Rows are chosen one at a time
    and a branch is cut as soon as its leading rows fall below the best
    found so far. Rows with identical neighbourhoods are interchangeable, so
    only one of them is tried at each level.
    """
    _check_size(g.n_rows, g.n_cols)
    nrows, ncols = g.n_rows, g.n_cols
    row_sets = [frozenset(a for i2, a in g.edges if i2 == i) for i in range(nrows)]
    best: list[tuple[int, ...]] = []

    def rows_of(chosen):
        # column keys over the chosen rows, sorted decreasing; row-major read
        keys = sorted(
            (tuple(1 if a in row_sets[i] else 0 for i in chosen) for a in range(ncols)),
            reverse=True,
        )
        return [tuple(k[p] for k in keys) for p in range(len(chosen))]

    def search(chosen, remaining):
        nonlocal best
        if not remaining:
            cand = rows_of(chosen)
            if cand > best:
                best = cand
            return
        seen = set()
        options = []
        for i in remaining:
            if row_sets[i] in seen:
                continue
            seen.add(row_sets[i])
            nxt = chosen + [i]
            prefix = rows_of(nxt)
            options.append((prefix, i))
        options.sort(reverse=True)
        for prefix, i in options:
            depth = len(prefix)
            if best and prefix < best[:depth]:
                continue
            search(chosen + [i], [j for j in remaining if j != i])

    search([], list(range(nrows)))
    body = "".join("".join(map(str, row)) for row in best)
    return f"{nrows}x{ncols}:{body}"


def graph_from_canonical(code: str) -> BipartiteGraph:
    dims, body = code.split(":")
    nrows, ncols = (int(x) for x in dims.split("x"))
    edges = frozenset(
        (i, a) for i in range(nrows) for a in range(ncols) if body[i * ncols + a] == "1"
    )
    return BipartiteGraph(nrows, ncols, edges)


def bipartite_isomorphic(g: BipartiteGraph, h: BipartiteGraph) -> bool:
    return canonical_form(g) == canonical_form(h)


# --- orderly enumeration ---------------------------------------------------

@lru_cache(maxsize=None)
def _perm_tables(n_rows: int) -> np.ndarray:
    """``tables[p, mask]`` is ``mask`` with its row bits permuted by the p-th
    permutation. Bit ``n_rows-1-i`` holds row ``i`` (row 0 most significant)."""
    perms = list(itertools.permutations(range(n_rows)))
    size = 1 << n_rows
    dtype = np.uint8 if n_rows <= 8 else np.uint16
    tables = np.zeros((len(perms), size), dtype=dtype)
    for p, perm in enumerate(perms):
        for mask in range(size):
            out = 0
            for i in range(n_rows):
                if mask >> (n_rows - 1 - i) & 1:
                    out |= 1 << (n_rows - 1 - perm[i])
            tables[p, mask] = out
    return tables


def _is_canonical_prefix(prefix: list[int], tables: np.ndarray) -> bool:
    """True iff the decreasing mask sequence is the largest among all its row
    permutations (each image re-sorted decreasingly)."""
    arr = np.asarray(prefix, dtype=np.int64)
    images = np.sort(tables[:, arr].astype(np.int64), axis=1)[:, ::-1]
    diff = images - arr
    nz = diff != 0
    has = nz.any(axis=1)
    if not has.any():
        return True
    first = np.argmax(nz, axis=1)
    lead = diff[np.arange(len(diff)), first]
    return not np.any(has & (lead > 0))


def _masks_connected(masks: list[int], n_rows: int) -> bool:
    g = BipartiteGraph(
        n_rows, len(masks),
        frozenset(
            (i, a) for a, m in enumerate(masks) for i in range(n_rows) if m >> (n_rows - 1 - i) & 1
        ),
    )
    return is_connected(g)


def enumerate_bipartite(
    n_rows: int,
    n_cols: int,
    edge_count: int,
    min_degree: int = 0,
    connected_only: bool = False,
) -> list[BipartiteGraph]:
    """All bipartite graphs on exactly ``n_rows + n_cols`` vertices with
    ``edge_count`` edges and every vertex degree ``>= min_degree``, one per
    bipartite-isomorphism class, sorted by canonical encoding.

    Orderly generation: a graph is a decreasing sequence of column bitmasks,
    built one column at a time, keeping only prefixes that are maximal under
    row permutations. The decreasingly sorted top-j columns of a maximal
    sequence are themselves maximal, so no canonical graph is missed.
    """
    _check_size(n_rows, n_cols)
    if edge_count > MAX_EDGES:
        raise GraphSizeError(f"edge count {edge_count} exceeds {MAX_EDGES}")
    if n_rows == 0 or n_cols == 0:
        return [BipartiteGraph(n_rows, n_cols)] if edge_count == 0 and min_degree == 0 else []

    tables = _perm_tables(n_rows)
    popcount = [bin(m).count("1") for m in range(1 << n_rows)]
    lo = max(min_degree, 0)
    allowed = [m for m in range(1 << n_rows) if popcount[m] >= lo]
    allowed.sort(reverse=True)
    if not allowed:
        return []
    max_pop = n_rows

    found: list[list[int]] = []

    def extend(prefix: list[int], edges_used: int):
        left = n_cols - len(prefix)
        if left == 0:
            if edges_used != edge_count:
                return
            row_deg = [0] * n_rows
            for m in prefix:
                for i in range(n_rows):
                    row_deg[i] += m >> (n_rows - 1 - i) & 1
            if min(row_deg) < min_degree:
                return
            if connected_only and not _masks_connected(prefix, n_rows):
                return
            found.append(list(prefix))
            return
        upper = prefix[-1] if prefix else allowed[0]
        for m in allowed:
            if m > upper:
                continue
            used = edges_used + popcount[m]
            rest = left - 1
            if used + rest * lo > edge_count or used + rest * max_pop < edge_count:
                continue
            prefix.append(m)
            if _is_canonical_prefix(prefix, tables):
                extend(prefix, used)
            prefix.pop()

    extend([], 0)
    graphs = []
    for masks in found:
        edges = frozenset(
            (i, a) for a, m in enumerate(masks)
            for i in range(n_rows) if m >> (n_rows - 1 - i) & 1
        )
        graphs.append(BipartiteGraph(n_rows, n_cols, edges))
    graphs.sort(key=canonical_form)
    return graphs
