import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from syzlab.linalg import (EchelonSpace, Field, LinearSolver, NoSolutionError, kernel_basis, matmul, rank, rref,
                           solve_one)
from syzlab.linalg import _rref_simple


def span_size_by_enumeration(a, p):
    """Number of distinct vectors in the row space, by listing every combination."""
    rows = [np.array(r) for r in a]
    seen = set()
    for coeffs in itertools.product(range(p), repeat=len(rows)):
        v = sum((c * r for c, r in zip(coeffs, rows)), np.zeros(a.shape[1], dtype=np.int64)) % p
        seen.add(tuple(v))
    return len(seen)


small_fp = st.sampled_from([2, 3, 5])


@settings(max_examples=60, deadline=None)
@given(p=small_fp, rows=st.integers(1, 4), cols=st.integers(1, 5), data=st.data())
def test_rank_matches_enumeration(p, rows, cols, data):
    entries = data.draw(st.lists(st.integers(0, p - 1), min_size=rows * cols, max_size=rows * cols))
    a = np.array(entries, dtype=np.int64).reshape(rows, cols)
    assert p ** rank(a, Field(p)) == span_size_by_enumeration(a, p)


@settings(max_examples=60, deadline=None)
@given(p=small_fp, rows=st.integers(1, 6), cols=st.integers(1, 6), data=st.data())
def test_kernel_vectors_are_killed_and_count(p, rows, cols, data):
    f = Field(p)
    entries = data.draw(st.lists(st.integers(0, p - 1), min_size=rows * cols, max_size=rows * cols))
    a = np.array(entries, dtype=np.int64).reshape(rows, cols)
    ker = kernel_basis(a, f)
    assert len(ker) == cols - rank(a, f)
    for v in ker:
        assert not np.any(matmul(a, v.reshape(-1, 1), f))


def test_kernel_example():
    ker = kernel_basis(np.array([[1, 2], [2, 4]]), Field(5))
    assert [list(v) for v in ker] == [[3, 1]]


def test_rational_rank_and_solve():
    f = Field(None)
    a = f.array([[1, 2, 3], [2, 4, 6], [1, 0, Fraction(1, 2)]])
    assert rank(a, f) == 2
    t = f.array([6, 12, Fraction(3, 2)])
    x = solve_one(a, t, f)
    assert list(matmul(a, x.reshape(-1, 1), f)[:, 0]) == list(t)
    with pytest.raises(NoSolutionError):
        solve_one(a, f.array([1, 0, 0]), f)


def test_blocked_rref_equals_simple():
    rng = np.random.default_rng(0)
    f = Field(7)
    a = rng.integers(0, 7, size=(130, 120))
    a[:, 60:] = (a[:, :60] @ rng.integers(0, 7, size=(60, 60))) % 7  # rank deficient
    r1, p1 = rref(a, f)
    r2, p2 = _rref_simple(a.copy(), f, a.shape[1], True)
    assert p1 == p2
    assert np.array_equal(r1[: len(p1)], r2[: len(p2)])


@settings(max_examples=40, deadline=None)
@given(p=small_fp, data=st.data())
def test_linear_solver_many(p, data):
    f = Field(p)
    rng = np.random.default_rng(data.draw(st.integers(0, 10**6)))
    a = rng.integers(0, p, size=(5, 4))
    xs = rng.integers(0, p, size=(4, 3))
    ts = matmul(a, xs, f)
    sol = LinearSolver(a, f).solve_many(ts)
    assert np.array_equal(matmul(a, sol, f), ts)


def test_echelon_space_membership():
    f = Field(3)
    sp = EchelonSpace(4, f)
    new = sp.add(np.array([[1, 1, 0, 0], [2, 2, 0, 0], [0, 0, 1, 2]]))
    assert len(new) == 2 and sp.dim == 2
    assert sp.contains(np.array([1, 1, 2, 1]))
    assert not sp.contains(np.array([1, 0, 0, 0]))


def test_field_parsing_and_inverse():
    assert Field.parse("F5").p == 5
    assert Field.parse({"kind": "Fp", "p": 3}).p == 3
    assert Field.parse("Q").p is None
    with pytest.raises(ValueError):
        Field(4)
    f = Field(11)
    assert all(f(f.inv(x) * x) == 1 for x in range(1, 11))
    assert Field(None).inv(Fraction(2, 3)) == Fraction(3, 2)


def test_float_path_is_exact_near_bound():
    f = Field(2**31 - 1)
    a = np.full((1, 3), 2**31 - 2, dtype=np.int64)
    b = np.full((3, 1), 2**31 - 2, dtype=np.int64)
    expected = (3 * (2**31 - 2) ** 2) % (2**31 - 1)
    assert matmul(a, b, f)[0, 0] == expected
