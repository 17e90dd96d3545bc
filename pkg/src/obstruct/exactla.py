"""Exact linear algebra over the prime fields GF(p) and over the rationals.

Everything downstream (Hochschild solves, cohomology splittings, module
quotients) reduces to the routines here.  The GF(p) path works on int64
numpy arrays and is the hot path: ``rref_mod`` / ``solve_mod`` dispatch to
a numba kernel, with a pure-numpy fallback selected by ``OBSTRUCT_NO_NUMBA``.
The rational path uses ``fractions.Fraction`` and plain Python lists.

Pivot choice is fixed (first nonzero entry, scanning top to bottom, left to
right) so that every reduced row echelon form, and with it every canonical
representative chosen downstream, is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from ._jit import JIT_ENABLED, njit

__all__ = [
    "GF",
    "QQ",
    "Matrix",
    "rref_mod",
    "solve_mod",
    "nullspace_mod",
    "rank_mod",
    "is_prime",
]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


# ---------------------------------------------------------------------------
# GF(p) kernels
# ---------------------------------------------------------------------------


@njit(cache=True)
def _inv_mod(x: int, p: int) -> int:
    # Fermat: x^(p-2) mod p
    result = 1
    base = x % p
    e = p - 2
    while e > 0:
        if e & 1:
            result = (result * base) % p
        base = (base * base) % p
        e >>= 1
    return result


@njit(cache=True)
def _rref_mod_njit(a: np.ndarray, p: int) -> np.ndarray:
    rows, cols = a.shape
    pivots = np.empty(min(rows, cols), dtype=np.int64)
    npiv = 0
    r = 0
    for c in range(cols):
        if r == rows:
            break
        piv = -1
        for i in range(r, rows):
            if a[i, c] != 0:
                piv = i
                break
        if piv == -1:
            continue
        if piv != r:
            for j in range(cols):
                tmp = a[r, j]
                a[r, j] = a[piv, j]
                a[piv, j] = tmp
        inv = _inv_mod(a[r, c], p)
        for j in range(cols):
            a[r, j] = (a[r, j] * inv) % p
        for i in range(rows):
            if i != r and a[i, c] != 0:
                f = a[i, c]
                for j in range(cols):
                    a[i, j] = (a[i, j] - f * a[r, j]) % p
        pivots[npiv] = c
        npiv += 1
        r += 1
    return pivots[:npiv]


def _rref_mod_numpy(a: np.ndarray, p: int) -> np.ndarray:
    rows, cols = a.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        inv = pow(int(a[r, c]), p - 2, p)
        a[r] = (a[r] * inv) % p
        fac = a[:, c].copy()
        fac[r] = 0
        np.subtract(a, np.outer(fac, a[r]), out=a)
        np.mod(a, p, out=a)
        pivots.append(c)
        r += 1
    return np.array(pivots, dtype=np.int64)


def rref_mod(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of an int matrix mod p.

    Returns a fresh array together with the strictly increasing pivot
    column list.
    """
    work = np.array(a, dtype=np.int64, copy=True) % p
    if work.size == 0:
        return work, []
    if JIT_ENABLED:
        piv = _rref_mod_njit(work, p)
    else:
        piv = _rref_mod_numpy(work, p)
    return work, [int(c) for c in piv]


def rank_mod(a: np.ndarray, p: int) -> int:
    _, piv = rref_mod(a, p)
    return len(piv)


def solve_mod(a: np.ndarray, b: np.ndarray, p: int) -> Optional[np.ndarray]:
    """One solution of a.x = b mod p, or None if the system is inconsistent.

    Free variables are set to zero, which is the minimal-support canonical
    choice used throughout.
    """
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if b.ndim != 1 or b.shape[0] != a.shape[0]:
        raise ValueError(f"rhs length {b.shape} does not match {a.shape[0]} rows")
    aug = np.concatenate([a % p, (b % p).reshape(-1, 1)], axis=1)
    red, piv = rref_mod(aug, p)
    ncols = a.shape[1]
    if ncols in piv:
        return None
    x = np.zeros(ncols, dtype=np.int64)
    for r, c in enumerate(piv):
        x[c] = red[r, ncols]
    return x


def nullspace_mod(a: np.ndarray, p: int) -> np.ndarray:
    """Basis of the null space of a mod p, one vector per row."""
    a = np.asarray(a, dtype=np.int64)
    red, piv = rref_mod(a, p)
    ncols = a.shape[1]
    free = [c for c in range(ncols) if c not in set(piv)]
    basis = np.zeros((len(free), ncols), dtype=np.int64)
    for k, fc in enumerate(free):
        basis[k, fc] = 1
        for r, c in enumerate(piv):
            basis[k, c] = (-red[r, fc]) % p
    return basis


# ---------------------------------------------------------------------------
# Fields and the generic Matrix wrapper
# ---------------------------------------------------------------------------


class GF:
    """The prime field with p elements; scalars are residues in [0, p)."""

    def __init__(self, p: int):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.characteristic = p

    def __call__(self, x: Union[int, Fraction]) -> int:
        if type(x) is int:
            return x % self.p
        if isinstance(x, Fraction):
            return (x.numerator * pow(x.denominator, self.p - 2, self.p)) % self.p
        return int(x) % self.p

    def inv(self, x: int) -> int:
        x %= self.p
        if x == 0:
            raise ZeroDivisionError("inverse of 0")
        return pow(x, self.p - 2, self.p)

    def __eq__(self, other) -> bool:
        return isinstance(other, GF) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("GF", self.p))

    def __repr__(self) -> str:
        return f"GF({self.p})"


class _RationalField:
    """The rationals; scalars are Fractions in lowest terms."""

    characteristic = 0

    def __call__(self, x) -> Fraction:
        return Fraction(x)

    def inv(self, x) -> Fraction:
        return 1 / Fraction(x)

    def __repr__(self) -> str:
        return "QQ"


QQ = _RationalField()


@dataclass(frozen=True)
class Matrix:
    """Immutable dense matrix over GF(p) or QQ."""

    field: Union[GF, _RationalField]
    rows: int
    cols: int
    entries: tuple

    @staticmethod
    def from_rows(field, rows: Sequence[Sequence]) -> "Matrix":
        nrows = len(rows)
        ncols = len(rows[0]) if nrows else 0
        data = []
        for row in rows:
            if len(row) != ncols:
                raise ValueError("ragged rows")
            data.append(tuple(field(x) for x in row))
        return Matrix(field, nrows, ncols, tuple(data))

    @staticmethod
    def zeros(field, rows: int, cols: int) -> "Matrix":
        zero = field(0)
        return Matrix(field, rows, cols, tuple(tuple(zero for _ in range(cols)) for _ in range(rows)))

    @staticmethod
    def identity(field, n: int) -> "Matrix":
        one, zero = field(1), field(0)
        return Matrix(field, n, n, tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n)))

    def to_numpy(self) -> np.ndarray:
        if isinstance(self.field, GF):
            return np.array(self.entries, dtype=np.int64).reshape(self.rows, self.cols)
        raise TypeError("to_numpy only for GF matrices")

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ValueError("dimension mismatch")
        if isinstance(self.field, GF):
            p = self.field.p
            prod = (self.to_numpy() @ other.to_numpy()) % p
            return Matrix(self.field, self.rows, other.cols, tuple(tuple(int(x) for x in row) for row in prod))
        out = []
        for i in range(self.rows):
            out.append(tuple(
                sum((self.entries[i][k] * other.entries[k][j] for k in range(self.cols)), Fraction(0))
                for j in range(other.cols)
            ))
        return Matrix(self.field, self.rows, other.cols, tuple(out))

    def rref(self) -> tuple["Matrix", list[int]]:
        """Reduced row echelon form and the pivot column list."""
        if isinstance(self.field, GF):
            red, piv = rref_mod(self.to_numpy(), self.field.p)
            return Matrix.from_rows(self.field, red.tolist()), piv
        work = [list(row) for row in self.entries]
        pivots = []
        r = 0
        for c in range(self.cols):
            if r == self.rows:
                break
            piv_row = next((i for i in range(r, self.rows) if work[i][c] != 0), None)
            if piv_row is None:
                continue
            work[r], work[piv_row] = work[piv_row], work[r]
            inv = 1 / work[r][c]
            work[r] = [x * inv for x in work[r]]
            for i in range(self.rows):
                if i != r and work[i][c] != 0:
                    f = work[i][c]
                    work[i] = [x - f * y for x, y in zip(work[i], work[r])]
            pivots.append(c)
            r += 1
        return Matrix.from_rows(self.field, work), pivots

    def rank(self) -> int:
        return len(self.rref()[1])

    def solve(self, b: Sequence) -> Optional[tuple[tuple, list[tuple]]]:
        """Particular solution of self.x = b plus a kernel basis, or None.

        The kernel basis spans the full null space; absence means the
        system is inconsistent.
        """
        if len(b) != self.rows:
            raise ValueError(f"rhs length {len(b)} does not match {self.rows} rows")
        if isinstance(self.field, GF):
            p = self.field.p
            x = solve_mod(self.to_numpy(), np.array([self.field(v) for v in b], dtype=np.int64), p)
            if x is None:
                return None
            ker = nullspace_mod(self.to_numpy(), p)
            return tuple(int(v) for v in x), [tuple(int(v) for v in row) for row in ker]
        aug = Matrix.from_rows(self.field, [list(row) + [bv] for row, bv in zip(self.entries, b)])
        red, piv = aug.rref()
        if self.cols in piv:
            return None
        x = [Fraction(0)] * self.cols
        for r, c in enumerate(piv):
            x[c] = red.entries[r][self.cols]
        base, base_piv = self.rref()
        free = [c for c in range(self.cols) if c not in set(base_piv)]
        ker = []
        for fc in free:
            v = [Fraction(0)] * self.cols
            v[fc] = Fraction(1)
            for r, c in enumerate(base_piv):
                v[c] = -base.entries[r][fc]
            ker.append(tuple(v))
        return tuple(x), ker

    def nullspace(self) -> list[tuple]:
        sol = self.solve([self.field(0)] * self.rows)
        assert sol is not None
        return sol[1]
