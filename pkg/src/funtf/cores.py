"""Candidate 2-cores for fixed ``n``, their classification and the core table.

For a basis ``E`` with connected ``G_E``, the 2-core has ``alpha`` row
vertices with ``alpha in {n-1, n}``, ``beta`` column vertices with
``alpha <= beta <= n(n-1)/2 + alpha - 1`` and exactly
``n(n-1)/2 + alpha + beta - 1`` edges. Enumerating those graphs gives the
finite candidate list; each candidate is embedded in the top-left corner of
an ``n x r`` pattern (everything else known), tested for spanning, and its
fiber degree computed.
"""

from __future__ import annotations

import json
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

from funtf.bigraph import BipartiteGraph, canonical_form, enumerate_bipartite, graph_from_canonical
from funtf.homotopy import MAX_PATHS, TrackerConfig, compute_fiber
from funtf.matroid import is_spanning
from funtf.pattern import EntryPattern, format_pattern

TABLE_FORMAT = "funtf-core-table"
TABLE_VERSION = 1
GENERATOR_VERSION = "orderly-colmask-1"
SUPPORTED_N = (3, 4, 5)


class TableError(ValueError):
    """Malformed or incompatible core table file."""


class CoreNotFoundError(KeyError):
    pass


@dataclass
class CoreRecord:
    core: BipartiteGraph
    alpha: int
    beta: int
    edge_count: int
    is_spanning_core: bool | None = None
    degree: int | None = None
    degree_r_values: list[int] = field(default_factory=list)
    degrees_by_r: dict[int, int] = field(default_factory=dict)
    spanning_by_r: dict[int, bool] = field(default_factory=dict)
    degree_exact: bool = False
    degree_flag: str | None = None
    residual_max: float | None = None

    @property
    def key(self) -> str:
        return canonical_form(self.core)

    @property
    def pattern_repr(self) -> str:
        """Known-entry grid of the core block (``1`` = known)."""
        return "\n".join(
            "".join("0" if (i, a) in self.core.edges else "1" for a in range(self.beta))
            for i in range(self.alpha)
        )

    def to_dict(self) -> dict:
        return {
            "key": self.key,
            "alpha": self.alpha,
            "beta": self.beta,
            "edge_count": self.edge_count,
            "is_spanning_core": self.is_spanning_core,
            "degree": self.degree,
            "degree_r_values": self.degree_r_values,
            "degrees_by_r": {str(r): d for r, d in self.degrees_by_r.items()},
            "spanning_by_r": {str(r): s for r, s in self.spanning_by_r.items()},
            "degree_exact": self.degree_exact,
            "degree_flag": self.degree_flag,
            "residual_max": self.residual_max,
            "pattern_repr": self.pattern_repr.splitlines(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> CoreRecord:
        core = graph_from_canonical(d["key"])
        return cls(
            core=core,
            alpha=d["alpha"],
            beta=d["beta"],
            edge_count=d["edge_count"],
            is_spanning_core=d["is_spanning_core"],
            degree=d["degree"],
            degree_r_values=list(d["degree_r_values"]),
            degrees_by_r={int(r): v for r, v in d["degrees_by_r"].items()},
            spanning_by_r={int(r): v for r, v in d.get("spanning_by_r", {}).items()},
            degree_exact=d["degree_exact"],
            degree_flag=d.get("degree_flag"),
            residual_max=d.get("residual_max"),
        )


def enumerate_candidate_cores(n: int) -> list[CoreRecord]:
    if n not in SUPPORTED_N:
        raise ValueError(f"core enumeration supports n in {SUPPORTED_N}, got {n}")
    pairs = n * (n - 1) // 2
    records = []
    for alpha in (n - 1, n):
        for beta in range(alpha, pairs + alpha):
            edges = pairs + alpha + beta - 1
            if edges > alpha * beta:
                continue
            for g in enumerate_bipartite(alpha, beta, edges, min_degree=2, connected_only=True):
                records.append(CoreRecord(g, alpha, beta, edges))
    return records


def feasible_shapes(records: list[CoreRecord]) -> list[tuple[int, int]]:
    return sorted({(rec.alpha, rec.beta) for rec in records})


def embed_core(core: BipartiteGraph, n: int, r: int) -> EntryPattern:
    """Pattern with the core edges unknown in the top-left block, all else known."""
    if core.n_rows > n or core.n_cols > r:
        raise ValueError(f"{core.n_rows}x{core.n_cols} core does not fit in {n}x{r}")
    return EntryPattern(
        n, r,
        frozenset((i, a) for i in range(n) for a in range(r) if (i, a) not in core.edges),
    )


def classify_core(record: CoreRecord, n: int, r_values, seed: int = 0,
                  cfg: TrackerConfig | None = None, sink: list | None = None,
                  with_degrees: bool = True) -> CoreRecord:
    """Spanning test and fiber degree of one candidate at every usable ``r``.

    Spanning can only switch from false to true as ``r`` grows, and at
    ``r = beta`` it may still be false; the verdict is taken at ``r >= beta + 1``
    when such an ``r`` is given. ``sink`` collects the fiber computations.
    """
    usable = sorted(r for r in set(r_values) if r >= n + 2 and r >= record.beta)
    if not usable:
        return replace(record, degree_flag="no usable r")
    spanning = {r: is_spanning(embed_core(record.core, n, r), seed=seed) for r in usable}
    flags = []
    if any(spanning[a] and not spanning[b] for a, b in zip(usable, usable[1:])):
        flags.append(f"spanning not monotone in r: {spanning}")
    decisive = [r for r in usable if r >= record.beta + 1] or usable
    verdict = spanning[decisive[-1]]
    out = replace(record, is_spanning_core=verdict, spanning_by_r=spanning)
    if not verdict or not with_degrees:
        out.degree_flag = "; ".join(flags) or None
        return out
    if 2 ** record.edge_count > MAX_PATHS:
        flags.append(f"degree not computed: 2^{record.edge_count} paths exceed the solver limit")
        out.degree_flag = "; ".join(flags)
        return out
    degrees, residual = {}, 0.0
    for r in usable:
        if not spanning[r]:
            continue
        comp = compute_fiber(embed_core(record.core, n, r), seed=seed, cfg=cfg, check_spanning=False)
        degrees[r] = comp.degree
        residual = max(residual, comp.residual_max)
        if sink is not None:
            sink.append(comp)
    out.degrees_by_r, out.degree_r_values, out.residual_max = degrees, sorted(degrees), residual
    values = set(degrees.values())
    if len(values) == 1:
        out.degree = values.pop()
        out.degree_exact = any(r >= record.beta + 1 for r in degrees)
        if not out.degree_exact:
            flags.append("upper bound only (r = beta)")
    else:
        flags.append(f"degree differs across r: {degrees}")
    out.degree_flag = "; ".join(flags) or None
    return out


def classify_cores(n: int, r_values, seed: int = 0, threads: int = 1,
                   cfg: TrackerConfig | None = None,
                   records: list[CoreRecord] | None = None, sink: list | None = None,
                   with_degrees: bool = True) -> list[CoreRecord]:
    records = enumerate_candidate_cores(n) if records is None else records

    def work(rec):
        return classify_core(rec, n, r_values, seed, cfg, sink, with_degrees)

    if threads <= 1:
        return [work(rec) for rec in records]
    # list.append is atomic, and every record uses its own seeds, so results
    # do not depend on scheduling
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(work, records))


@dataclass
class CoreTable:
    n: int
    records: dict[str, CoreRecord]
    r_values: list[int] = field(default_factory=list)
    solver_seed: int = 0
    generator_version: str = GENERATOR_VERSION

    @classmethod
    def from_records(cls, n: int, records, r_values=(), solver_seed: int = 0) -> CoreTable:
        return cls(n, {rec.key: rec for rec in records}, list(r_values), solver_seed)

    def lookup(self, core: BipartiteGraph) -> CoreRecord:
        key = canonical_form(core)
        if key not in self.records:
            raise CoreNotFoundError(f"core {key} not in the n={self.n} table")
        return self.records[key]

    def __len__(self) -> int:
        return len(self.records)

    def to_dict(self) -> dict:
        return {
            "format": TABLE_FORMAT,
            "version": TABLE_VERSION,
            "n": self.n,
            "generator_version": self.generator_version,
            "solver_seed": self.solver_seed,
            "r_values": self.r_values,
            "records": [rec.to_dict() for rec in sorted(self.records.values(), key=lambda x: x.key)],
        }


def save_table(table: CoreTable, path) -> None:
    """Write the table as JSON atomically (temp file then rename)."""
    path = Path(path)
    data = json.dumps(table.to_dict(), indent=1)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_table(path) -> CoreTable:
    try:
        d = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise TableError(f"malformed table file {path}: {exc}") from exc
    if not isinstance(d, dict) or d.get("format") != TABLE_FORMAT:
        raise TableError(f"{path} is not a core table")
    if d.get("version") != TABLE_VERSION:
        raise TableError(f"table version {d.get('version')} != supported {TABLE_VERSION}")
    try:
        records = [CoreRecord.from_dict(rec) for rec in d["records"]]
        for rec, raw in zip(records, d["records"]):
            if rec.key != raw["key"]:
                raise TableError(f"non-canonical key {raw['key']}")
        return CoreTable(
            d["n"], {rec.key: rec for rec in records}, list(d.get("r_values", [])),
            d.get("solver_seed", 0), d.get("generator_version", GENERATOR_VERSION),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, TableError):
            raise
        raise TableError(f"malformed table file {path}: {exc}") from exc


def default_table_path(n: int) -> Path:
    return Path(f"funtf_cores_n{n}.json")


def describe(record: CoreRecord, n: int) -> str:
    lines = [f"core {record.key}  alpha={record.alpha} beta={record.beta} edges={record.edge_count}"]
    lines.append("  block (1 = known):")
    lines += ["    " + row for row in record.pattern_repr.splitlines()]
    if record.is_spanning_core is not None:
        lines.append(f"  spanning: {record.is_spanning_core}")
    if record.degree is not None:
        lines.append(f"  degree: {record.degree} (r = {record.degree_r_values})")
    if record.degree_flag:
        lines.append(f"  note: {record.degree_flag}")
    return "\n".join(lines)


__all__ = [
    "CoreNotFoundError", "CoreRecord", "CoreTable", "TableError", "classify_core", "classify_cores",
    "default_table_path", "describe", "embed_core", "enumerate_candidate_cores", "feasible_shapes",
    "format_pattern", "load_table", "save_table",
]
