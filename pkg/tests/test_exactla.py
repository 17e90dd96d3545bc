from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from obstruct.exactla import (
    GF,
    QQ,
    Matrix,
    is_prime,
    nullspace_mod,
    rank_mod,
    rref_mod,
    solve_mod,
    _rref_mod_numpy,
)

F3 = GF(3)
F5 = GF(5)


def test_zero_matrix_rref():
    m = Matrix.zeros(F3, 3, 4)
    red, piv = m.rref()
    assert piv == []
    assert red.entries == m.entries


def test_identity_rref():
    m = Matrix.identity(F3, 3)
    red, piv = m.rref()
    assert red.entries == m.entries
    assert piv == [0, 1, 2]


def test_rank_one_rref_over_f5():
    # row 2 = 2 * row 1, so elimination leaves a single pivot
    m = Matrix.from_rows(F5, [[1, 2], [2, 4]])
    red, piv = m.rref()
    assert red.entries == ((1, 2), (0, 0))
    assert piv == [0]


def test_solve_identity():
    m = Matrix.identity(F3, 3)
    x, ker = m.solve([1, 2, 0])
    assert x == (1, 2, 0)
    assert ker == []


def test_solve_rank_one():
    m = Matrix.from_rows(F5, [[1, 2], [2, 4]])
    x, ker = m.solve([1, 2])
    assert x == (1, 0)
    assert ker == [(3, 1)]
    a = m.to_numpy()
    assert (a @ np.array(x) % 5 == np.array([1, 2])).all()
    assert not (a @ np.array(ker[0]) % 5).any()


def test_solve_inconsistent():
    m = Matrix.from_rows(F3, [[0]])
    assert m.solve([1]) is None


def test_solve_dimension_mismatch():
    m = Matrix.identity(F3, 2)
    with pytest.raises(ValueError):
        m.solve([1, 2, 3])


def test_rref_idempotent_random():
    rng = np.random.default_rng(0)
    for _ in range(25):
        a = rng.integers(0, 7, size=(rng.integers(1, 8), rng.integers(1, 8)))
        red, piv = rref_mod(a, 7)
        red2, piv2 = rref_mod(red, 7)
        assert (red == red2).all()
        assert piv == piv2


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 10_000))
def test_rank_nullity(rows, cols, seed):
    rng = np.random.default_rng(seed)
    a = rng.integers(0, 5, size=(rows, cols))
    assert rank_mod(a, 5) + nullspace_mod(a, 5).shape[0] == cols


def test_solution_is_exact_random():
    rng = np.random.default_rng(1)
    for _ in range(30):
        a = rng.integers(0, 3, size=(rng.integers(1, 9), rng.integers(1, 9)))
        x0 = rng.integers(0, 3, size=a.shape[1])
        b = (a @ x0) % 3
        x = solve_mod(a, b, 3)
        assert x is not None
        assert ((a @ x - b) % 3 == 0).all()
        for v in nullspace_mod(a, 3):
            assert not ((a @ v) % 3).any()


def test_numba_and_numpy_paths_agree():
    rng = np.random.default_rng(2)
    for p in (2, 3, 5):
        for _ in range(10):
            a = rng.integers(0, p, size=(rng.integers(1, 10), rng.integers(1, 10)))
            red, piv = rref_mod(a, p)
            work = a.astype(np.int64).copy()
            piv2 = _rref_mod_numpy(work, p)
            assert (red == work).all()
            assert piv == [int(c) for c in piv2]


def test_rational_field():
    m = Matrix.from_rows(QQ, [[1, 2], [3, 4]])
    x, ker = m.solve([Fraction(1), Fraction(0)])
    assert x == (Fraction(-2), Fraction(3, 2))
    assert ker == []
    red, piv = m.rref()
    assert piv == [0, 1]
    assert red.entries == ((Fraction(1), Fraction(0)), (Fraction(0), Fraction(1)))


def test_rational_underdetermined():
    m = Matrix.from_rows(QQ, [[1, 2, 3]])
    x, ker = m.solve([Fraction(6)])
    assert x == (Fraction(6), Fraction(0), Fraction(0))
    assert len(ker) == 2
    for v in ker:
        assert sum(c * vi for c, vi in zip((1, 2, 3), v)) == 0


def test_gf_requires_prime():
    with pytest.raises(ValueError):
        GF(6)
    assert is_prime(2) and is_prime(97) and not is_prime(1)


def test_gf_scalar_normalisation():
    assert F5(-3) == 2
    assert F5(Fraction(1, 2)) == 3  # 2 * 3 = 6 = 1 mod 5
    assert F5.inv(3) == 2
