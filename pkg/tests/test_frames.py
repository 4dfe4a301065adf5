from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, strategies as st

from funtf.frames import (
    FuntfPoint, QuadPoly, SamplingError, defining_system, drop_redundant, equation_labels,
    evaluate_equations, frame_residual, harmonic_frame, jacobian_at, jacobian_rank, sample_funtf,
    substitute, trace_identity_defect,
)

shapes = st.tuples(st.integers(2, 5), st.integers(0, 4)).map(lambda t: (t[0], t[0] + t[1]))


def test_labels_order():
    assert equation_labels(3, 5) == ("g1", "g2", "g3", "g4", "g5", "f11", "f12", "f13", "f22", "f23", "f33")


def test_defining_system_shape():
    s = defining_system(3, 5)
    assert s.n_equations == 5 + 6
    assert s.variables[:6] == ((0, 0), (0, 1), (0, 2), (0, 3), (0, 4), (1, 0))
    assert s.equations[5].constant == Fraction(-5, 3)
    with pytest.raises(ValueError):
        defining_system(3, 2)


@given(shapes, st.integers(0, 2**32 - 1))
def test_system_agrees_with_vectorized(shape, seed):
    n, r = shape
    w = np.random.default_rng(seed).standard_normal((n, r))
    s = defining_system(n, r)
    assert np.allclose(s.evaluate(w.ravel()), evaluate_equations(w))


@given(shapes, st.data())
def test_trace_identity_exact(shape, data):
    n, r = shape
    ints = data.draw(st.lists(st.integers(-50, 50), min_size=n * r, max_size=n * r))
    w = np.array([Fraction(x, 7) for x in ints], dtype=object).reshape(n, r)
    assert trace_identity_defect(w) == 0


@given(shapes, st.integers(0, 2**32 - 1))
def test_trace_identity_float(shape, seed):
    n, r = shape
    w = np.random.default_rng(seed).uniform(-2, 2, (n, r))
    assert abs(trace_identity_defect(w)) < 1e-12


def test_jacobian_matches_sympy():
    n, r = 3, 5
    xs = sympy.symbols(f"x0:{n * r}")
    w = sympy.Matrix(n, r, xs)
    polys = [sum(w[i, a] ** 2 for i in range(n)) - 1 for a in range(r)]
    polys += [(w[i, :] * w[j, :].T)[0] - (sympy.Rational(r, n) if i == j else 0)
              for i in range(n) for j in range(i, n)]
    jac = sympy.Matrix(polys).jacobian(xs)
    point = np.random.default_rng(1).integers(-4, 5, n * r)
    symbolic = np.array(jac.subs(dict(zip(xs, point.tolist()))).tolist(), dtype=float)
    assert np.array_equal(jacobian_at(n, r, point.astype(float)), symbolic)


@given(shapes, st.integers(0, 2**32 - 1))
def test_jacobian_finite_difference(shape, seed):
    n, r = shape
    x = np.random.default_rng(seed).standard_normal(n * r)
    jac = jacobian_at(n, r, x)
    h = 1e-6
    for k in range(n * r):
        e = np.zeros(n * r)
        e[k] = h
        fd = (evaluate_equations((x + e).reshape(n, r)) - evaluate_equations((x - e).reshape(n, r))) / (2 * h)
        assert np.allclose(fd, jac[:, k], atol=1e-6)


@pytest.mark.parametrize("n,r", [(2, 3), (3, 4), (3, 5), (4, 6), (5, 7), (5, 12)])
def test_harmonic_frame_is_tight(n, r):
    assert frame_residual(harmonic_frame(n, r)) < 1e-12


@pytest.mark.parametrize("n,r", [(3, 5), (3, 6), (4, 6), (5, 7)])
def test_generic_jacobian_rank(n, r):
    p = sample_funtf(n, r, seed=5)
    assert p.residual < 1e-12
    res = jacobian_rank(n, r, p.matrix)
    assert res.rank == r + n * (n + 1) // 2 - 1
    assert res.gap_ratio > 1e6


def test_samples_differ_and_repeat():
    a, b = sample_funtf(3, 5, seed=1), sample_funtf(3, 5, seed=2)
    assert not np.allclose(a.matrix, b.matrix)
    assert np.array_equal(a.matrix, sample_funtf(3, 5, seed=1).matrix)


def test_sample_is_not_harmonic():
    p = sample_funtf(3, 5, seed=0)
    h = harmonic_frame(3, 5)
    # generic entries: no zero and no repeated absolute values
    assert np.min(np.abs(p.matrix)) > 1e-6
    assert not np.allclose(np.sort(np.abs(p.matrix.ravel())), np.sort(np.abs(h.ravel())))


def test_complex_sample():
    p = sample_funtf(3, 5, seed=3, complex_point=True)
    assert np.iscomplexobj(p.matrix) and np.abs(p.matrix.imag).max() > 1e-3
    assert frame_residual(p.matrix) < 1e-12


def test_sample_range():
    with pytest.raises(ValueError):
        sample_funtf(3, 3)
    assert SamplingError.__mro__[1] is RuntimeError


@pytest.mark.parametrize("complex_point", [False, True])
def test_point_json_round_trip(complex_point):
    p = sample_funtf(3, 5, seed=4, complex_point=complex_point)
    q = FuntfPoint.from_json(p.to_json())
    assert np.array_equal(p.matrix, q.matrix)
    assert q.residual == p.residual and q.seed == p.seed


def test_substitute_and_drop():
    s = defining_system(3, 5)
    point = sample_funtf(3, 5, seed=0).matrix
    known = {(i, a): point[i, a] for i in range(3) for a in range(5) if a < 3}
    sub = substitute(s, known)
    assert len(sub.variables) == 6
    assert sub.constant_flags == (True,) * 3 + (False,) * 8
    unknown = np.array([point[v] for v in sub.variables])
    assert sub.residual(unknown) < 1e-12
    reduced = drop_redundant(sub.nonconstant())
    assert reduced.dropped == ("g5",)
    assert reduced.n_equations == 7


def test_substitute_keeps_constant_equations():
    s = defining_system(3, 5)
    p = sample_funtf(3, 5, seed=2).matrix
    col0 = {(i, 0): Fraction(p[i, 0]).limit_denominator(10**12) for i in range(3)}
    sub = substitute(s, col0)
    assert sub.constant_flags[0]
    assert abs(float(sub.equations[0].constant)) < 1e-9
    full = substitute(s, {(i, a): 0 for i in range(3) for a in range(5)})
    assert all(full.constant_flags)
    with pytest.raises(ValueError):
        drop_redundant(full.nonconstant())


def test_quadpoly_arrays():
    q = QuadPoly(2, ((0, 3),), ((0, 1, 1),))
    assert q.degree == 2 and q.evaluate([1, 2]) == 7
    assert QuadPoly(5).is_constant
    c, lin, quad = defining_system(2, 3).to_arrays()
    x = np.arange(6.0)
    direct = c + lin @ x + np.einsum("mkl,k,l->m", quad, x, x)
    assert np.allclose(direct, evaluate_equations(x.reshape(2, 3)))
