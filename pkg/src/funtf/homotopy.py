"""Total-degree homotopy continuation for square quadratic systems.

Start system ``x_i^2 - c_i`` (random complex ``c_i``, ``2^N`` start points),
homotopy ``H(x, t) = gamma (1 - t) S(x) + t F(x)`` tracked from ``t = 0`` to
``t = 1``. All paths are advanced together as one batch: an explicit Euler
predictor on ``H_x dx/dt = -H_t``, a Newton corrector, and per-path step
size control.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

import numpy as np

from funtf.frames import (
    QuadraticSystem,
    defining_system,
    drop_redundant,
    sample_funtf,
    substitute,
)
from funtf.pattern import EntryPattern, check_matroid_range, expected_basis_size

CONVERGED, DIVERGED, STALLED = "converged", "diverged", "stalled"
CERTIFY_RESIDUAL = 1e-9
MAX_PATHS = 1 << 14


class SolverError(RuntimeError):
    pass


class DegreeMismatchError(SolverError):
    """Independent runs returned different solution counts."""


class NotSpanningError(ValueError):
    pass


@dataclass(frozen=True)
class TrackerConfig:
    gamma: complex | None = None
    initial_step: float = 0.05
    max_step: float = 0.1
    min_step: float = 1e-9
    newton_tolerance: float = 1e-11
    max_newton_iters: int = 5
    divergence_norm: float = 1e8
    dedup_distance: float = 1e-6
    final_residual: float = 1e-10
    singular_condition: float = 1e10
    near_end: float = 0.99
    seed: int = 0

    def __post_init__(self):
        if not (0 < self.min_step < self.initial_step < 1):
            raise ValueError("need 0 < min_step < initial_step < 1")
        if min(self.newton_tolerance, self.final_residual, self.dedup_distance) <= 0:
            raise ValueError("tolerances must be positive")

    def resolved_gamma(self) -> complex:
        if self.gamma is not None:
            return complex(self.gamma)
        rng = np.random.default_rng([self.seed, 0x6A])
        return complex(np.exp(2j * np.pi * rng.random()))


@dataclass
class SolutionSet:
    points: np.ndarray  # distinct nonsingular solutions, one per row
    statuses: list[str]
    residuals: np.ndarray  # per path, nan unless the path reached t = 1
    distinct_count: int
    singular_count: int
    gamma: complex
    endpoints: np.ndarray = field(repr=False, default=None)
    wall_time: float = 0.0

    @property
    def n_paths(self) -> int:
        return len(self.statuses)

    def count(self, status: str) -> int:
        return sum(1 for s in self.statuses if s == status)

    def report(self) -> dict:
        finite = self.residuals[np.isfinite(self.residuals)]
        return {
            "paths": self.n_paths,
            "converged": self.count(CONVERGED),
            "diverged": self.count(DIVERGED),
            "stalled": self.count(STALLED),
            "distinct": self.distinct_count,
            "singular": self.singular_count,
            "residual_max": float(finite.max()) if finite.size else 0.0,
            "wall_time": self.wall_time,
        }


class _Target:
    """Dense quadratic map ``F(x) = c + L x + x^T Q x`` evaluated on batches."""

    def __init__(self, c, lin, quad):
        self.c = np.asarray(c, dtype=complex)
        self.lin = np.asarray(lin, dtype=complex)
        quad = np.asarray(quad, dtype=complex)
        self.quad = quad
        self.quad_sym = quad + quad.transpose(0, 2, 1)

    @classmethod
    def from_system(cls, system: QuadraticSystem) -> _Target:
        return cls(*system.to_arrays())

    def __call__(self, x):
        return self.c + x @ self.lin.T + np.einsum("pk,mkl,pl->pm", x, self.quad, x)

    def jac(self, x):
        return self.lin[None] + np.einsum("mkl,pl->pmk", self.quad_sym, x)


def _batched_solve(a, b):
    try:
        return np.linalg.solve(a, b[..., None])[..., 0], np.ones(len(a), dtype=bool)
    except np.linalg.LinAlgError:
        out = np.zeros_like(b)
        ok = np.ones(len(a), dtype=bool)
        for k in range(len(a)):
            try:
                out[k] = np.linalg.solve(a[k], b[k])
            except np.linalg.LinAlgError:
                ok[k] = False
        return out, ok


def _check_square(system: QuadraticSystem) -> None:
    if any(eq.is_constant for eq in system.equations):
        raise ValueError("system has constant equations; remove them before solving")
    if len(system.equations) != len(system.variables):
        raise ValueError(
            f"non-square system: {len(system.equations)} equations, {len(system.variables)} variables"
        )
    if any(eq.degree > 2 for eq in system.equations):
        raise ValueError("only quadratic systems are supported")


def solve_total_degree(system: QuadraticSystem | _Target, cfg: TrackerConfig | None = None) -> SolutionSet:
    cfg = cfg or TrackerConfig()
    if isinstance(system, QuadraticSystem):
        _check_square(system)
        target = _Target.from_system(system)
    else:
        target = system
    nvar = target.lin.shape[1]
    if target.c.shape[0] != nvar:
        raise ValueError("non-square system")
    t_start = time.perf_counter()
    gamma = cfg.resolved_gamma()
    if nvar == 0:
        return SolutionSet(np.zeros((1, 0), complex), [CONVERGED], np.zeros(1), 1, 0, gamma,
                           np.zeros((1, 0), complex), 0.0)
    n_paths = 1 << nvar
    if n_paths > MAX_PATHS:
        raise ValueError(f"{n_paths} paths exceed the {MAX_PATHS} limit")

    rng = np.random.default_rng([cfg.seed, 0x5C])
    c0 = np.exp(2j * np.pi * rng.random(nvar))
    roots = np.sqrt(c0)
    signs = np.array(list(itertools.product([1.0, -1.0], repeat=nvar)))
    x = signs * roots

    def h_val(x, t):
        return gamma * (1 - t)[:, None] * (x * x - c0) + t[:, None] * target(x)

    def h_x(x, t):
        d = gamma * (1 - t)[:, None] * 2 * x
        jac = t[:, None, None] * target.jac(x)
        idx = np.arange(nvar)
        jac[:, idx, idx] += d
        return jac

    def h_t(x):
        return target(x) - gamma * (x * x - c0)

    t = np.zeros(n_paths)
    h = np.full(n_paths, cfg.initial_step)
    streak = np.zeros(n_paths, dtype=int)
    state = np.zeros(n_paths, dtype=int)  # 0 active, 1 reached t=1, 2 diverged, 3 stalled

    while True:
        act = np.nonzero(state == 0)[0]
        if act.size == 0:
            break
        xa, ta, ha = x[act], t[act], h[act]
        t1 = np.minimum(ta + ha, 1.0)
        dt = t1 - ta
        vel, ok = _batched_solve(h_x(xa, ta), -h_t(xa))
        xp = xa + dt[:, None] * vel
        # Newton corrector at t1
        conv = np.zeros(len(act), dtype=bool)
        alive = ok.copy()
        prev = np.full(len(act), np.inf)
        for _ in range(cfg.max_newton_iters):
            live = np.nonzero(alive & ~conv)[0]
            if live.size == 0:
                break
            delta, sok = _batched_solve(h_x(xp[live], t1[live]), -h_val(xp[live], t1[live]))
            xp[live] += delta
            dn = np.linalg.norm(delta, axis=1)
            scale = 1 + np.linalg.norm(xp[live], axis=1)
            bad = ~sok | ~np.isfinite(dn) | (dn > 0.5 * prev[live])
            alive[live[bad]] = False
            prev[live] = dn
            conv[live[~bad & (dn < cfg.newton_tolerance * scale)]] = True
        acc = conv & alive
        rej = ~acc

        ia = act[acc]
        x[ia] = xp[acc]
        t[ia] = t1[acc]
        streak[ia] += 1
        grow = ia[streak[ia] >= 3]
        h[grow] = np.minimum(2 * h[grow], cfg.max_step)
        streak[grow] = 0
        ir = act[rej]
        h[ir] /= 2
        streak[ir] = 0

        norms = np.linalg.norm(x[act], axis=1)
        state[act[t[act] >= 1.0]] = 1
        state[act[(state[act] == 0) & (norms > cfg.divergence_norm)]] = 2
        small = act[(state[act] == 0) & (h[act] < cfg.min_step)]
        state[small[t[small] >= cfg.near_end]] = 2
        state[small[t[small] < cfg.near_end]] = 3

    statuses = [DIVERGED if s == 2 else STALLED for s in state]
    residuals = np.full(n_paths, np.nan)
    reached = np.nonzero(state == 1)[0]
    good_idx: list[int] = []
    singular = 0
    if reached.size:
        xr = x[reached].copy()
        for _ in range(2):
            delta, _ok = _batched_solve(target.jac(xr), -target(xr))
            xr = xr + np.where(np.isfinite(delta), delta, 0)
        res = np.max(np.abs(target(xr)), axis=1)
        norms = np.linalg.norm(xr, axis=1)
        conds = np.linalg.cond(target.jac(xr))
        for k, p in enumerate(reached):
            x[p] = xr[k]
            residuals[p] = res[k]
            if norms[k] > cfg.divergence_norm or not np.isfinite(res[k]):
                statuses[p] = DIVERGED
            elif res[k] < cfg.final_residual:
                statuses[p] = CONVERGED
                if conds[k] < cfg.singular_condition:
                    good_idx.append(p)
                else:
                    singular += 1
            else:
                statuses[p] = STALLED

    distinct = _dedup(x[good_idx], cfg.dedup_distance) if good_idx else np.zeros((0, nvar), complex)
    return SolutionSet(distinct, statuses, residuals, len(distinct), singular, gamma,
                       x.copy(), time.perf_counter() - t_start)


def _dedup(points: np.ndarray, dist: float) -> np.ndarray:
    kept: list[np.ndarray] = []
    for p in points:
        scale = max(1.0, float(np.linalg.norm(p)))
        if all(np.linalg.norm(p - q) >= dist * scale for q in kept):
            kept.append(p)
    return np.array(kept) if kept else np.zeros((0, points.shape[1]), complex)


# --- fibers of coordinate projections ---------------------------------------

@dataclass
class FiberRun:
    solutions: SolutionSet
    dropped: tuple[str, ...]
    squared_up: bool
    data: str  # "random" | "point"
    certify_residual: float


@dataclass
class FiberComputation:
    pattern: EntryPattern
    degree: int
    runs: list[FiberRun]

    @property
    def residual_max(self) -> float:
        return max((run.certify_residual for run in self.runs), default=0.0)

    def report(self) -> dict:
        first = self.runs[0].solutions.report() if self.runs else {}
        return {
            "paths": first.get("paths", 1),
            "converged": [run.solutions.count(CONVERGED) for run in self.runs],
            "diverged": [run.solutions.count(DIVERGED) for run in self.runs],
            "distinct": [run.solutions.distinct_count for run in self.runs],
            "degree": self.degree,
            "gamma_runs": len(self.runs),
            "residual_max": self.residual_max,
            "wall_time": sum(run.solutions.wall_time for run in self.runs),
        }


def _annulus(rng: np.random.Generator, size: int) -> np.ndarray:
    return rng.uniform(0.5, 1.5, size) * np.exp(2j * np.pi * rng.random(size))


def _fiber_run(e: EntryPattern, basis: bool, seed_seq: np.random.SeedSequence,
               cfg: TrackerConfig) -> FiberRun:
    n, r = e.n, e.r
    rng = np.random.default_rng(seed_seq)
    known = sorted(e.entries)
    if basis:
        vals = _annulus(rng, len(known))
        assignment = {ent: complex(v) for ent, v in zip(known, vals)}
        data = "random"
    else:
        point = sample_funtf(n, r, int(rng.integers(2**31)), complex_point=True)
        assignment = {ent: complex(point.matrix[ent]) for ent in known}
        data = "point"
    sub = substitute(defining_system(n, r), assignment)
    const = [abs(complex(eq.constant)) for eq in sub.equations if eq.is_constant]
    if const and max(const) > 1e-9:
        raise SolverError(f"inconsistent known data (constant residual {max(const):.2e})")
    reduced = drop_redundant(sub.nonconstant())
    target = _Target.from_system(reduced)
    nvar = len(reduced.variables)
    neq = len(reduced.equations)
    squared = False
    if neq < nvar:
        raise NotSpanningError("fewer equations than unknowns: fiber is not finite")
    if neq > nvar:
        a = rng.standard_normal((nvar, neq)) + 1j * rng.standard_normal((nvar, neq))
        target = _Target(a @ target.c, a @ target.lin, np.einsum("jm,mkl->jkl", a, target.quad))
        squared = True
    tcfg = TrackerConfig(**{**cfg.__dict__, "seed": int(rng.integers(2**31)), "gamma": None})
    sols = solve_total_degree(target, tcfg)

    full = _Target.from_system(sub)
    if sols.distinct_count:
        certify = np.max(np.abs(full(sols.points)), axis=1)
        worst = float(certify.max())
    else:
        worst = 0.0
    if squared and sols.distinct_count:
        keep = certify < CERTIFY_RESIDUAL
        sols.points = sols.points[keep]
        sols.distinct_count = int(keep.sum())
        worst = float(certify[keep].max()) if keep.any() else 0.0
    return FiberRun(sols, reduced.dropped, squared, data, worst)


def compute_fiber(e: EntryPattern, seed: int = 0, runs: int = 2,
                  cfg: TrackerConfig | None = None, check_spanning: bool = True) -> FiberComputation:
    """Count the generic fiber of the projection onto the known entries.

    For a basis the known entries get independent random complex values;
    otherwise they are read off a random complex point of the variety. Each
    run uses fresh data and a fresh ``gamma``; all runs must agree.
    """
    from funtf.matroid import is_spanning

    check_matroid_range(e.n, e.r)
    cfg = cfg or TrackerConfig()
    if e.size == e.n * e.r:
        return FiberComputation(e, 1, [])
    if check_spanning and not is_spanning(e, seed=seed):
        raise NotSpanningError("pattern is not spanning; the fiber is positive dimensional")
    basis = e.size == expected_basis_size(e.n, e.r)
    root = np.random.SeedSequence([seed, 0xF1])
    results = []
    children = iter(root.spawn(3 * runs))
    for _ in range(runs):
        # a stalled path means an unreliable count; retry with fresh data
        for _attempt in range(3):
            run = _fiber_run(e, basis, next(children), cfg)
            if run.solutions.count(STALLED) == 0:
                break
        else:
            raise SolverError("paths stalled in every attempt")
        if run.certify_residual >= CERTIFY_RESIDUAL:
            raise SolverError(f"solution residual {run.certify_residual:.2e} on the full system")
        results.append(run)
    counts = {run.solutions.distinct_count for run in results}
    if len(counts) != 1:
        raise DegreeMismatchError(f"runs disagree on the fiber size: {sorted(counts)}")
    return FiberComputation(e, counts.pop(), results)


def fiber_degree(e: EntryPattern, seed: int = 0, cfg: TrackerConfig | None = None) -> int:
    return compute_fiber(e, seed=seed, cfg=cfg).degree


def degree_via_core(e: EntryPattern, table) -> int:
    """Table degree of the 2-core times ``2^k``."""
    from funtf.matroid import bound_fiber

    bound = bound_fiber(e, table)
    if not bound.exact:
        raise ValueError("core degree in the table is only an upper bound at this r")
    return bound.bound
