"""Defining equations of the funtf variety and sampling points on it.

An ``n x r`` matrix ``W`` is a finite unit norm tight frame when its
columns have unit norm and ``W W^T = (r/n) I``. The equations are

* ``g_a = sum_i x_{ia}^2 - 1`` for each column ``a``;
* ``f_ij = sum_a x_{ia} x_{ja} - (r/n) [i == j]`` for ``i <= j``,

ordered ``g_1..g_r, f_11, f_12, .., f_1n, f_22, .., f_nn``. Variables are the
entries ``(i, a)`` in row-major order. All indices in code are 0-based;
equation labels are 1-based for readability.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Mapping

import numpy as np
from scipy.stats import ortho_group

from funtf.exactla import rank_numeric

Entry = tuple[int, int]

RESIDUAL_TOL = 1e-12
GN_MAX_ITERS = 100
SAMPLE_RETRIES = 20
PERTURBATION = 0.1


class SamplingError(RuntimeError):
    """Gauss-Newton retraction did not reach the residual target."""


@dataclass(frozen=True)
class QuadPoly:
    """``constant + sum c*x_k + sum c*x_k*x_l`` over variable indices."""

    constant: object = 0
    linear: tuple[tuple[int, object], ...] = ()
    quadratic: tuple[tuple[int, int, object], ...] = ()

    @property
    def is_constant(self) -> bool:
        return not self.linear and not self.quadratic

    @property
    def degree(self) -> int:
        return 2 if self.quadratic else (1 if self.linear else 0)

    def evaluate(self, x):
        val = self.constant
        for k, c in self.linear:
            val = val + c * x[k]
        for k, l, c in self.quadratic:
            val = val + c * x[k] * x[l]
        return val


@dataclass(frozen=True)
class QuadraticSystem:
    n: int
    r: int
    variables: tuple[Entry, ...]
    equations: tuple[QuadPoly, ...]
    labels: tuple[str, ...]
    dropped: tuple[str, ...] = ()

    @property
    def n_equations(self) -> int:
        return len(self.equations)

    @property
    def constant_flags(self) -> tuple[bool, ...]:
        return tuple(eq.is_constant for eq in self.equations)

    def nonconstant(self) -> QuadraticSystem:
        keep = [k for k, eq in enumerate(self.equations) if not eq.is_constant]
        return replace(
            self,
            equations=tuple(self.equations[k] for k in keep),
            labels=tuple(self.labels[k] for k in keep),
        )

    def evaluate(self, x) -> list:
        return [eq.evaluate(x) for eq in self.equations]

    def residual(self, x) -> float:
        vals = self.evaluate(x)
        return max((abs(complex(v)) for v in vals), default=0.0)

    def to_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Dense ``(c, L, Q)`` with ``F(x) = c + L x + sum_kl Q[m,k,l] x_k x_l``."""
        m, nv = len(self.equations), len(self.variables)
        c = np.zeros(m, dtype=complex)
        lin = np.zeros((m, nv), dtype=complex)
        quad = np.zeros((m, nv, nv), dtype=complex)
        for e, eq in enumerate(self.equations):
            c[e] = complex(eq.constant)
            for k, coef in eq.linear:
                lin[e, k] += complex(coef)
            for k, l, coef in eq.quadratic:
                quad[e, k, l] += complex(coef)
        return c, lin, quad


def equation_labels(n: int, r: int) -> tuple[str, ...]:
    labels = [f"g{a + 1}" for a in range(r)]
    labels += [f"f{i + 1}{j + 1}" for i in range(n) for j in range(i, n)]
    return tuple(labels)


def defining_system(n: int, r: int) -> QuadraticSystem:
    """The ``r + n(n+1)/2`` equations with exact rational constants."""
    if not (r >= n >= 2):
        raise ValueError(f"need r >= n >= 2, got n={n}, r={r}")
    idx = {(i, a): i * r + a for i in range(n) for a in range(r)}
    eqs = []
    for a in range(r):
        eqs.append(QuadPoly(-1, (), tuple((idx[i, a], idx[i, a], 1) for i in range(n))))
    ratio = Fraction(r, n)
    for i in range(n):
        for j in range(i, n):
            const = -ratio if i == j else Fraction(0)
            eqs.append(QuadPoly(const, (), tuple((idx[i, a], idx[j, a], 1) for a in range(r))))
    return QuadraticSystem(n, r, tuple(sorted(idx, key=idx.get)), tuple(eqs), equation_labels(n, r))


def evaluate_equations(w) -> np.ndarray:
    """Vectorized ``[g_1..g_r, f_11, f_12, .., f_nn]`` at the matrix ``w``.

    Works for float, complex and object (Fraction) arrays.
    """
    w = np.asarray(w)
    n, r = w.shape
    g = (w * w).sum(axis=0) - 1
    gram = w @ w.T
    f = [gram[i, j] - (Fraction(r, n) if w.dtype == object else r / n) * (i == j)
         for i in range(n) for j in range(i, n)]
    return np.concatenate([g, np.array(f, dtype=w.dtype if w.dtype == object else None)])


def frame_residual(w) -> float:
    return float(np.max(np.abs(evaluate_equations(w))))


def trace_identity_defect(w):
    """``sum_i f_ii - sum_a g_a``, identically zero as a polynomial."""
    w = np.asarray(w)
    n, r = w.shape
    vals = evaluate_equations(w)
    g = vals[:r]
    f = vals[r:]
    diag_pos = [k for k, (i, j) in enumerate((i, j) for i in range(n) for j in range(i, n)) if i == j]
    return sum(f[k] for k in diag_pos) - sum(g)


def jacobian_at(n: int, r: int, point) -> np.ndarray:
    """``(r + n(n+1)/2) x nr`` Jacobian of the defining equations."""
    w = np.asarray(point).reshape(n, r)
    if not np.all(np.isfinite(w)):
        raise ValueError("point has non-finite entries")
    rows = r + n * (n + 1) // 2
    jac = np.zeros((rows, n * r), dtype=np.result_type(w.dtype, float))
    for a in range(r):
        for i in range(n):
            jac[a, i * r + a] = 2 * w[i, a]
    row = r
    for i in range(n):
        for j in range(i, n):
            for a in range(r):
                if i == j:
                    jac[row, i * r + a] = 2 * w[i, a]
                else:
                    jac[row, i * r + a] = w[j, a]
                    jac[row, j * r + a] = w[i, a]
            row += 1
    return jac


def substitute(system: QuadraticSystem, assignment: Mapping[Entry, object]) -> QuadraticSystem:
    """Fix the assigned entries to values and fold constants.

    Equations that become constant are kept; their values certify (in)feasibility
    of the assignment.
    """
    pos = {v: k for k, v in enumerate(system.variables)}
    for e in assignment:
        if e not in pos:
            raise KeyError(f"entry {e} is not a variable of the system")
    remaining = [v for v in system.variables if v not in assignment]
    new_idx = {pos[v]: k for k, v in enumerate(remaining)}
    value = {pos[e]: val for e, val in assignment.items()}

    eqs = []
    for eq in system.equations:
        const = eq.constant
        lin: dict[int, object] = {}
        quad: dict[tuple[int, int], object] = {}
        for k, c in eq.linear:
            if k in value:
                const = const + c * value[k]
            else:
                lin[new_idx[k]] = lin.get(new_idx[k], 0) + c
        for k, l, c in eq.quadratic:
            kv, lv = k in value, l in value
            if kv and lv:
                const = const + c * value[k] * value[l]
            elif kv:
                lin[new_idx[l]] = lin.get(new_idx[l], 0) + c * value[k]
            elif lv:
                lin[new_idx[k]] = lin.get(new_idx[k], 0) + c * value[l]
            else:
                key = (new_idx[k], new_idx[l])
                quad[key] = quad.get(key, 0) + c
        eqs.append(QuadPoly(
            const,
            tuple(sorted(lin.items())),
            tuple((k, l, c) for (k, l), c in sorted(quad.items())),
        ))
    return replace(system, variables=tuple(remaining), equations=tuple(eqs))


def drop_redundant(system: QuadraticSystem) -> QuadraticSystem:
    """Remove the last non-constant ``g`` equation.

    It equals ``sum_i f_ii`` minus the other ``g``'s, so on consistent data
    it carries no information.
    """
    target = None
    for k, (lab, eq) in enumerate(zip(system.labels, system.equations)):
        if lab.startswith("g") and not eq.is_constant:
            target = k
    if target is None:
        raise ValueError("no non-constant column equation to drop")
    return replace(
        system,
        equations=system.equations[:target] + system.equations[target + 1:],
        labels=system.labels[:target] + system.labels[target + 1:],
        dropped=system.dropped + (system.labels[target],),
    )


# --- sampling --------------------------------------------------------------

@dataclass(frozen=True)
class FuntfPoint:
    matrix: np.ndarray
    residual: float
    seed: int | None = None
    attempts: int = 1
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def r(self) -> int:
        return self.matrix.shape[1]

    def to_json(self) -> str:
        m = self.matrix
        out = {
            "n": self.n,
            "r": self.r,
            "matrix": [float(x) for x in np.real(m).ravel()],
            "residual": self.residual,
        }
        if np.iscomplexobj(m):
            out["matrix_imag"] = [float(x) for x in np.imag(m).ravel()]
        if self.seed is not None:
            out["seed"] = self.seed
        return json.dumps(out)

    @classmethod
    def from_json(cls, text: str) -> FuntfPoint:
        d = json.loads(text)
        m = np.array(d["matrix"], dtype=float)
        if "matrix_imag" in d:
            m = m + 1j * np.array(d["matrix_imag"], dtype=float)
        return cls(m.reshape(d["n"], d["r"]), d["residual"], d.get("seed"))


def harmonic_frame(n: int, r: int) -> np.ndarray:
    """Harmonic unit norm tight frame built from the first ``n//2`` frequencies."""
    m = n // 2
    j = np.arange(r)
    rows = []
    for k in range(1, m + 1):
        rows.append(np.sqrt(2 / n) * np.cos(2 * np.pi * k * j / r))
        rows.append(np.sqrt(2 / n) * np.sin(2 * np.pi * k * j / r))
    if n % 2:
        rows.append(np.full(r, 1 / np.sqrt(n)))
    return np.array(rows)


def tangent_basis(w: np.ndarray) -> np.ndarray:
    """Orthonormal basis (columns) of the Jacobian kernel at ``w``."""
    n, r = w.shape
    jac = jacobian_at(n, r, w)
    _, s, vh = np.linalg.svd(jac)
    rank = int(np.sum(s > 1e-10 * s[0]))
    return vh[rank:].conj().T


def gauss_newton(w: np.ndarray, tol: float = RESIDUAL_TOL, max_iters: int = GN_MAX_ITERS):
    """Pseudo-inverse Newton steps with step halving onto the variety."""
    n, r = w.shape
    x = w.ravel().copy()
    res = frame_residual(x.reshape(n, r))
    for it in range(max_iters):
        if res < tol:
            return x.reshape(n, r), res, it
        jac = jacobian_at(n, r, x)
        step = np.linalg.lstsq(jac, evaluate_equations(x.reshape(n, r)), rcond=None)[0]
        lam = 1.0
        while lam > 1e-6:
            trial = x - lam * step
            tres = frame_residual(trial.reshape(n, r))
            if tres < res:
                break
            lam /= 2
        else:
            break
        x, res = trial, tres
    return x.reshape(n, r), res, max_iters


def sample_funtf(n: int, r: int, seed: int = 0, complex_point: bool = False) -> FuntfPoint:
    """A random point on the funtf variety.

    Starting from a harmonic frame, applies a random rotation, column signs
    and column order (all preserve the variety), then a random tangent step
    of RMS size 0.1 per entry followed by Gauss-Newton retraction. With
    ``complex_point`` the tangent step has complex coefficients, giving a
    non-real point.
    """
    if not (r > n >= 2):
        raise ValueError(f"need r > n >= 2, got n={n}, r={r}")
    seed0 = harmonic_frame(n, r)
    base_res = frame_residual(seed0)
    if base_res > 1e-12:
        raise SamplingError(f"harmonic seed residual {base_res:.2e}")
    root = np.random.SeedSequence(seed)
    last = math.inf
    for attempt, child in enumerate(root.spawn(SAMPLE_RETRIES), start=1):
        rng = np.random.default_rng(child)
        rot = ortho_group.rvs(n, random_state=rng) if n > 1 else np.eye(1)
        w = rot @ seed0 * rng.choice([-1.0, 1.0], size=r)
        w = w[:, rng.permutation(r)]
        basis = tangent_basis(w)
        coef = rng.standard_normal(basis.shape[1])
        if complex_point:
            coef = coef + 1j * rng.standard_normal(basis.shape[1])
        step = basis @ coef
        step *= PERTURBATION * math.sqrt(n * r) / np.linalg.norm(step)
        w = w + step.reshape(n, r)
        w, res, _ = gauss_newton(w)
        last = res
        if res < RESIDUAL_TOL:
            return FuntfPoint(w, res, seed, attempt)
    raise SamplingError(f"retraction failed after {SAMPLE_RETRIES} attempts (residual {last:.2e})")


def jacobian_rank(n: int, r: int, point) -> object:
    return rank_numeric(jacobian_at(n, r, point))
