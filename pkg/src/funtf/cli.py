"""Command line front end: ``funtf <command> [options]``.

Exit codes: 0 success, 1 negative verdict (or failed verification), 2 error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from funtf.bigraph import canonical_form, greater_two_core, is_connected, two_core
from funtf.cores import (
    CoreNotFoundError, CoreTable, TableError, classify_cores, default_table_path, describe,
    enumerate_candidate_cores, load_table, save_table,
)
from funtf.frames import SamplingError, frame_residual, jacobian_rank, sample_funtf
from funtf.homotopy import SolverError, compute_fiber
from funtf.matroid import (
    DEFAULT_SAMPLES, InconsistencyError, MatroidVerdict, NotBasisError, RankUncertaintyError,
    bound_fiber, classify, verdict_json,
)
from funtf.pattern import (
    EntryPattern, PatternFormatError, complement_graph, expected_basis_size,
    necessary_conditions, parse_pattern,
)

SCHEMA = "funtf-cli/1"
EXIT_OK, EXIT_NEGATIVE, EXIT_ERROR = 0, 1, 2

_EXPECTED_ERRORS = (
    ValueError, OSError, RankUncertaintyError, InconsistencyError, SolverError, SamplingError,
    CoreNotFoundError,
)


class CliError(Exception):
    """Error carrying an optional JSON payload for the report."""

    def __init__(self, message: str, payload: dict | None = None):
        super().__init__(message)
        self.payload = payload or {}


@dataclass
class CommandResult:
    command: str
    payload: dict = field(default_factory=dict)
    text: str = ""
    exit_code: int = EXIT_OK
    as_json: bool = False

    def render(self, as_json: bool) -> str:
        if as_json:
            return json.dumps({"schema": SCHEMA, "command": self.command, "exit_code": self.exit_code,
                               **self.payload}, indent=1)
        return self.text


# --- helpers ---------------------------------------------------------------

def read_pattern(path: str, n: int | None = None, r: int | None = None) -> EntryPattern:
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    e = parse_pattern(text)
    # dimensions come from the file; the flags only validate
    if n is not None and n != e.n:
        raise ValueError(f"--n {n} does not match the pattern ({e.n} rows)")
    if r is not None and r != e.r:
        raise ValueError(f"--r {r} does not match the pattern ({e.r} columns)")
    return e


def table_path(args, n: int) -> Path:
    return Path(args.table) if args.table else default_table_path(n)


def describe_violation(name: str, e: EntryPattern, report) -> str:
    if name == "full_unknown_columns":
        return f"{report.full_unknown_columns} fully unknown columns"
    if name == "cardinality":
        return f"|E| = {e.size}, basis size is {expected_basis_size(e.n, e.r)}"
    if name == "disconnected":
        return "complement graph is disconnected"
    if name == "core_alpha":
        return f"2-core has {report.core_alpha} rows, needs {e.n - 1} or {e.n}"
    if name == "core_beta":
        return f"2-core has {report.core_beta} columns, outside the feasible range"
    return name


def verdict_headline(v: MatroidVerdict, e: EntryPattern) -> str:
    if v.method == "combinatorial-n3":
        return f"{v.label} ({v.confidence}, combinatorial n=3)"
    if v.method == "necessary-conditions":
        mode = "spanning" if "full_unknown_columns" in v.violations else "basis"
        report = necessary_conditions(e, mode)
        reasons = ", ".join(describe_violation(name, e, report) for name in v.violations)
        return f"{v.label} ({v.confidence}: {reasons})"
    return f"{v.label} ({v.confidence}, numeric Jacobian rank, {DEFAULT_SAMPLES} samples)"


def verdict_payload(v: MatroidVerdict, e: EntryPattern) -> dict:
    g = complement_graph(e)
    core = two_core(g).graph
    return verdict_json(v, e, canonical_form(core) if core.edges else None, greater_two_core(g).k)


def parse_r_list(text: str) -> list[int]:
    try:
        values = [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad r list {text!r}") from exc
    if not values:
        raise argparse.ArgumentTypeError("empty r list")
    return values


def non_negative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return value


# --- commands --------------------------------------------------------------

def cmd_check(args) -> CommandResult:
    e = read_pattern(args.pattern, args.n, args.r)
    v = classify(e, seed=args.seed, force_numeric=args.force_numeric)
    report = necessary_conditions(e, "basis")
    lines = [
        verdict_headline(v, e),
        f"pattern {e.n}x{e.r}, |E| = {e.size}, basis size {v.dim}, rank {v.rank_of_E}",
        f"independent: {v.is_independent}  spanning: {v.is_spanning}",
        f"complement graph connected: {report.connected}, fully unknown columns: {report.full_unknown_columns}",
        f"2-core: {report.core_alpha} rows x {report.core_beta} columns",
    ]
    if report.violations:
        lines.append("violated necessary conditions: " + ", ".join(report.violations))
    payload = {"verdict": verdict_payload(v, e), "conditions": report.to_dict()}
    return CommandResult("check", payload, "\n".join(lines), EXIT_OK if v.is_basis else EXIT_NEGATIVE)


def cmd_core(args) -> CommandResult:
    e = read_pattern(args.pattern, args.n, args.r)
    g = complement_graph(e)
    red = greater_two_core(g)
    tc = two_core(g)
    key = canonical_form(tc.graph) if tc.graph.edges else None
    lines = [
        f"k = {red.k} (peeled edges)",
        f"alpha = {len(tc.rows)}, beta = {len(tc.cols)}",
        f"complement graph connected: {is_connected(g)}",
    ]
    if key is None:
        lines.append("2-core is empty")
    else:
        lines.append(f"2-core {key} on rows {[i + 1 for i in tc.rows]} and columns {[a + 1 for a in tc.cols]}")
        lines.append("known entries of the core block (1 = known):")
        for i in tc.rows:
            lines.append("  " + "".join("0" if (i, a) in red.gcore.edges else "1" for a in tc.cols))
    payload = {
        "k": red.k,
        "alpha": len(tc.rows),
        "beta": len(tc.cols),
        "core": key,
        "core_rows": list(tc.rows),
        "core_cols": list(tc.cols),
        "removed_edges": [list(edge) for edge in red.removed_edges],
        "connected": is_connected(g),
    }
    return CommandResult("core", payload, "\n".join(lines))


def cmd_enumerate_cores(args) -> CommandResult:
    records = enumerate_candidate_cores(args.n)
    lines = [f"{len(records)} candidate cores for n = {args.n}"]
    counts: dict[tuple[int, int], int] = {}
    for rec in records:
        counts[(rec.alpha, rec.beta)] = counts.get((rec.alpha, rec.beta), 0) + 1
    lines += [f"  alpha={a} beta={b}: {c}" for (a, b), c in sorted(counts.items())]
    if args.list:
        lines += [describe(rec, args.n) for rec in records]
    payload = {
        "n": args.n,
        "count": len(records),
        "shapes": [{"alpha": a, "beta": b, "count": c} for (a, b), c in sorted(counts.items())],
        "cores": [{"key": rec.key, "alpha": rec.alpha, "beta": rec.beta, "edges": rec.edge_count,
                   "block": rec.pattern_repr.splitlines()} for rec in records] if args.list else None,
    }
    return CommandResult("enumerate-cores", payload, "\n".join(lines))


def cmd_classify_cores(args) -> CommandResult:
    out = Path(args.out) if args.out else table_path(args, args.n)
    r_values = args.r or [args.n + 2]
    records = classify_cores(args.n, r_values, seed=args.seed, threads=args.threads,
                             with_degrees=not args.spanning_only)
    table = CoreTable.from_records(args.n, records, r_values, args.seed)
    save_table(table, out)
    spanning = [rec for rec in records if rec.is_spanning_core]
    lines = [f"classified {len(records)} candidate cores for n = {args.n} at r = {r_values}",
             f"spanning: {len(spanning)}; table written to {out}"]
    for rec in sorted(records, key=lambda x: (x.alpha, x.beta, x.key)):
        deg = "-" if rec.degree is None else str(rec.degree)
        note = f"  [{rec.degree_flag}]" if rec.degree_flag else ""
        lines.append(f"  {rec.key:<24} spanning={rec.is_spanning_core!s:<5} degree={deg}{note}")
    payload = {"n": args.n, "r_values": r_values, "table_path": str(out),
               "records": [rec.to_dict() for rec in records]}
    return CommandResult("classify-cores", payload, "\n".join(lines))


def cmd_degree(args) -> CommandResult:
    e = read_pattern(args.pattern, args.n, args.r)
    v = classify(e, seed=args.seed)
    if not v.is_basis:
        raise CliError(f"pattern is not a basis: {verdict_headline(v, e)}", {"verdict": verdict_payload(v, e)})
    payload: dict = {"verdict": verdict_payload(v, e)}
    lines = [verdict_headline(v, e)]
    via_table = direct = None
    if args.mode in ("table", "both"):
        path = table_path(args, e.n)
        table = load_table(path)
        if table.n != e.n:
            raise TableError(f"{path} is a table for n = {table.n}, pattern has n = {e.n}")
        bound = bound_fiber(e, table, seed=args.seed)
        via_table = bound.bound
        payload["table"] = {"core": canonical_form(bound.core), "k": bound.k, "core_degree": bound.core_degree,
                            "degree": bound.bound, "exact": bound.exact}
        kind = "degree" if bound.exact else "upper bound"
        lines.append(f"table: {kind} {bound.bound} = 2^{bound.k} * {bound.core_degree}")
    if args.mode in ("direct", "both"):
        comp = compute_fiber(e, seed=args.seed)
        direct = comp.degree
        payload["direct"] = comp.report()
        lines.append(f"direct homotopy: degree {direct} ({comp.report()['paths']} paths per run, "
                     f"{len(comp.runs)} runs, max residual {comp.residual_max:.1e})")
    payload["degree"] = direct if direct is not None else via_table
    if args.mode == "both":
        exact = payload["table"]["exact"]
        agree = via_table == direct if exact else direct <= via_table
        payload["agree"] = agree
        if not agree:
            raise CliError(f"table gives {via_table}, direct homotopy gives {direct}", payload)
        lines.append("table and direct computation agree")
    return CommandResult("degree", payload, "\n".join(lines))


def cmd_sample(args) -> CommandResult:
    n, r = args.n, args.r
    if not (r >= n + 2 > 4):
        print(f"warning: ({n},{r}) is outside the matroid range r >= n+2 > 4", file=sys.stderr)
    point = sample_funtf(n, r, seed=args.seed, complex_point=args.complex)
    res = jacobian_rank(n, r, point.matrix)
    payload = {"point": json.loads(point.to_json()), "jacobian_rank": res.rank,
               "expected_rank": n * r - expected_basis_size(n, r), "gap_ratio": res.gap_ratio}
    lines = [f"unit norm tight frame {n}x{r} (seed {args.seed})"]
    lines += ["  " + " ".join(f"{x: .6f}" for x in row) for row in point.matrix]
    lines.append(f"residual {frame_residual(point.matrix):.1e}, Jacobian rank {res.rank}")
    return CommandResult("sample", payload, "\n".join(lines))


def cmd_table(args) -> CommandResult:
    if args.table is None and args.n is None:
        raise ValueError("give --n or --table")
    path = Path(args.table) if args.table else default_table_path(args.n)
    table = load_table(path)
    lines = [f"core table {path}: n = {table.n}, r = {table.r_values}, {len(table)} records, "
             f"solver seed {table.solver_seed}"]
    for rec in sorted(table.records.values(), key=lambda x: (x.alpha, x.beta, x.key)):
        lines.append(describe(rec, table.n))
    return CommandResult("table", table.to_dict(), "\n".join(lines))


def cmd_verify(args) -> CommandResult:
    from funtf.verify import Suite

    table = None
    path = Path(args.table) if args.table else default_table_path(3)
    if args.table or path.exists():
        table = load_table(path)
        if table.n != 3:
            raise TableError(f"{path} is a table for n = {table.n}, verification needs n = 3")
    progress = None if args.json else (lambda res: print(res.line(), flush=True))
    results = Suite(args.scope, seed=args.seed, table=table).run(progress)
    passed = sum(res.passed for res in results)
    text = f"{passed}/{len(results)} checks passed ({args.scope})"
    payload = {"scope": args.scope, "checks": [res.to_dict() for res in results], "passed": passed}
    return CommandResult("verify", payload, text, EXIT_OK if passed == len(results) else EXIT_NEGATIVE)


# --- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    # global flags are accepted before or after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="print a machine readable JSON report")
    common.add_argument("--seed", type=non_negative, default=argparse.SUPPRESS, help="random seed (default 0)")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS, help="worker threads (default 1)")
    common.add_argument("--table", default=argparse.SUPPRESS,
                        help="core table path (default ./funtf_cores_n{n}.json)")

    parser = argparse.ArgumentParser(
        prog="funtf", parents=[common],
        description="Matroid bases and projection degrees for entry patterns of unit norm tight frames.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def pattern_cmd(name, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("pattern", help="pattern file of 0/1 rows, 1 = known entry ('-' for stdin)")
        p.add_argument("--n", type=int, help="expected number of rows (validation only)")
        p.add_argument("--r", type=int, help="expected number of columns (validation only)")
        return p

    p = pattern_cmd("check", "independent / spanning / basis verdict")
    p.add_argument("--force-numeric", action="store_true", help="skip the combinatorial shortcuts")
    p.set_defaults(func=cmd_check)

    p = pattern_cmd("core", "2-core of the complement graph and the peel count k")
    p.set_defaults(func=cmd_core)

    p = sub.add_parser("enumerate-cores", parents=[common], help="list candidate 2-cores for n rows")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--list", action="store_true", help="print every core")
    p.set_defaults(func=cmd_enumerate_cores)

    p = sub.add_parser("classify-cores", parents=[common], help="spanning test and degree of every candidate core")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=parse_r_list, help="comma separated column counts (default n+2)")
    p.add_argument("--out", help="output table path (default --table or ./funtf_cores_n{n}.json)")
    p.add_argument("--spanning-only", action="store_true", help="skip the homotopy degree computations")
    p.set_defaults(func=cmd_classify_cores)

    p = pattern_cmd("degree", "degree of the projection onto a basis")
    p.add_argument("--mode", choices=("table", "direct", "both"), default="table")
    p.set_defaults(func=cmd_degree)

    p = sub.add_parser("sample", parents=[common], help="random real unit norm tight frame")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--complex", action="store_true", help="complex point of the variety")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("table", parents=[common], help="show a stored core table")
    p.add_argument("--n", type=int)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("verify", parents=[common], help="run the reproduction checks")
    p.add_argument("--scope", choices=("fast", "full"), default="fast")
    p.set_defaults(func=cmd_verify)
    return parser


def run(argv=None) -> CommandResult:
    args = build_parser().parse_args(argv)
    for name, default in (("json", False), ("seed", 0), ("threads", 1), ("table", None)):
        if not hasattr(args, name):
            setattr(args, name, default)
    try:
        result = args.func(args)
    except (CliError, PatternFormatError, TableError, NotBasisError, *_EXPECTED_ERRORS) as exc:
        payload = exc.payload if isinstance(exc, CliError) else {}
        message = str(exc) if not isinstance(exc, KeyError) else exc.args[0]
        result = CommandResult(args.command, {**payload, "error": message, "error_type": type(exc).__name__},
                               f"error: {message}", EXIT_ERROR)
    result.as_json = args.json
    return result


def main(argv=None) -> int:
    try:
        result = run(argv)
    except SystemExit as exc:  # argparse usage errors
        return EXIT_ERROR if exc.code not in (0, None) else EXIT_OK
    stream = sys.stderr if result.exit_code == EXIT_ERROR and not result.as_json else sys.stdout
    print(result.render(result.as_json), file=stream)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
