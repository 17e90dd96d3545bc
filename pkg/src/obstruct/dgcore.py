"""Cochain complexes, dg algebras, Hom complexes and pullbacks, windowed.

Complexes live on a finite degree window with exact mod-p matrices for the
differential.  A complex that is the truncation of an infinite object (the
endomorphism complex of a truncated resolution) carries coordinate filters:
``class_filter`` selects the coordinates on which cohomology classes are
read, ``solve_filter`` the equations used for boundary solves.  Truncation
artifacts live near the cut-off and are excluded by the filters; every
verdict records the window it used.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .exactla import nullspace_mod, rank_mod, rref_mod, solve_mod
from .graded import GradedVectorSpace

__all__ = [
    "CochainComplex",
    "CohomologySplitting",
    "cohomology",
    "DgAlgebra",
    "ChainMap",
    "check_leibniz",
    "pullback_dga",
    "quasi_iso_check",
    "induced_cohomology_map",
    "FiniteAlgebra",
    "FreeComplex",
    "hom_complex",
    "end_dga",
]


@dataclass
class CochainComplex:
    """Finite window of based vector spaces with a degree +1 differential.

    ``trusted`` marks the degrees where truncation artifacts cannot leak;
    it defaults to the full window for complexes that are not truncations.
    """

    p: int
    lo: int
    hi: int
    dims: dict
    d: dict
    labels: Optional[dict] = None
    trusted: Optional[tuple] = None
    class_filter: Optional[dict] = None
    solve_filter: Optional[dict] = None

    def __post_init__(self):
        if self.trusted is None:
            self.trusted = (self.lo, self.hi)

    def dim(self, n: int) -> int:
        return self.dims.get(n, 0)

    def d_matrix(self, n: int) -> np.ndarray:
        m = self.d.get(n)
        if m is None:
            return np.zeros((self.dim(n + 1), self.dim(n)), dtype=np.int64)
        return m

    def filter_indices(self, n: int, kind: str) -> np.ndarray:
        table = self.class_filter if kind == "class" else self.solve_filter
        if table is None or n not in table:
            return np.arange(self.dim(n))
        return np.asarray(table[n], dtype=np.int64)

    def d_squared_violations(self) -> list:
        bad = []
        for n in range(self.trusted[0], min(self.trusted[1] - 1, self.hi - 1)):
            prod = (self.d_matrix(n + 1) @ self.d_matrix(n)) % self.p
            if prod.any():
                bad.append(n)
        return bad

    def space(self) -> GradedVectorSpace:
        basis = {}
        for n in range(self.lo, self.hi + 1):
            if self.dim(n):
                if self.labels and n in self.labels:
                    basis[n] = tuple(self.labels[n])
                else:
                    basis[n] = tuple(range(self.dim(n)))
        return GradedVectorSpace(self.lo, self.hi, basis)

    def to_json(self) -> dict:
        out = {
            "p": self.p,
            "window": [self.lo, self.hi],
            "dims": {str(n): self.dim(n) for n in range(self.lo, self.hi + 1) if self.dim(n)},
            "differential": [
                [n, int(r), int(c), int(v)]
                for n in sorted(self.d)
                for (r, c), v in np.ndenumerate(self.d[n])
                if v
            ],
            "trusted": list(self.trusted),
        }
        return out

    @staticmethod
    def from_json(data: dict) -> "CochainComplex":
        lo, hi = data["window"]
        dims = {int(k): v for k, v in data["dims"].items()}
        p = data["p"]
        d = {}
        for n, r, c, v in data.get("differential", []):
            if n not in d:
                d[n] = np.zeros((dims.get(n + 1, 0), dims.get(n, 0)), dtype=np.int64)
            d[n][r, c] = v % p
        return CochainComplex(p, lo, hi, dims, d, trusted=tuple(data.get("trusted", (lo, hi))))


class CohomologySplitting:
    """Cycles, boundaries, canonical representatives and the projection pi.

    Classes are compared on the ``class_filter`` coordinates, boundary
    solves use the ``solve_filter`` equations; on honest (untruncated)
    complexes both are the identity and everything is exact.
    """

    def __init__(self, complex: CochainComplex):
        self.complex = complex
        self.p = complex.p
        self._cache: dict = {}

    def _analyse(self, n: int) -> dict:
        if n in self._cache:
            return self._cache[n]
        cx = self.complex
        p = self.p
        z = nullspace_mod(cx.d_matrix(n), p)  # rows span cycles
        b = cx.d_matrix(n - 1).T % p  # rows span boundaries
        sel = cx.filter_indices(n, "class")
        bf = b[:, sel] if b.size else np.zeros((b.shape[0], len(sel)), dtype=np.int64)
        b_red, b_piv = rref_mod(bf, p)
        b_red = b_red[: len(b_piv)]

        def reduce_by_b(vec):
            v = vec.copy() % p
            for r, c in enumerate(b_piv):
                if v[c]:
                    v = (v - v[c] * b_red[r]) % p
            return v

        reduced = []
        for row in z:
            r = reduce_by_b(row[sel])
            if r.any():
                reduced.append(r)
        if reduced:
            h_red, h_piv = rref_mod(np.array(reduced, dtype=np.int64), p)
            h_red = h_red[: len(h_piv)]
        else:
            h_red, h_piv = np.zeros((0, len(sel)), dtype=np.int64), []
        # full-coordinate representatives: cocycles whose filtered image is
        # the canonical reduced vector modulo boundaries
        reps = []
        for k in range(len(h_piv)):
            target = h_red[k]
            nz = z.shape[0]
            nb = bf.shape[0]
            # unknowns: cycle mixing coefficients and boundary corrections
            a = np.concatenate([z[:, sel].T % p, (-bf.T) % p], axis=1) if nz + nb else np.zeros((len(sel), 0), dtype=np.int64)
            sol = solve_mod(a, target, p)
            if sol is None:
                raise RuntimeError(f"no representative for class {k} in degree {n}")
            mix = sol[:nz]
            rep = (mix @ z) % p if nz else np.zeros(cx.dim(n), dtype=np.int64)
            reps.append(rep)
        info = {
            "Z": z,
            "B": b,
            "sel": sel,
            "b_red": b_red,
            "b_piv": b_piv,
            "h_red": h_red,
            "h_piv": h_piv,
            "reps": np.array(reps, dtype=np.int64) if reps else np.zeros((0, cx.dim(n)), dtype=np.int64),
            "reduce_by_b": reduce_by_b,
        }
        self._cache[n] = info
        return info

    def h_dim(self, n: int) -> int:
        return self._analyse(n)["reps"].shape[0]

    def representative(self, n: int, h_coords: np.ndarray) -> np.ndarray:
        info = self._analyse(n)
        if info["reps"].shape[0] == 0:
            return np.zeros(self.complex.dim(n), dtype=np.int64)
        return (np.asarray(h_coords, dtype=np.int64) @ info["reps"]) % self.p

    def pi(self, n: int, vec: np.ndarray) -> np.ndarray:
        """Class coordinates of a cocycle; raises if the vector is not a
        cycle modulo boundaries on the comparison coordinates."""
        info = self._analyse(n)
        sel = info["sel"]
        nh = info["reps"].shape[0]
        nb = info["B"].shape[0]
        cols = []
        if nh:
            cols.append(info["reps"][:, sel].T % self.p)
        if nb:
            cols.append(info["B"][:, sel].T % self.p)
        if not cols:
            if (np.asarray(vec)[sel] % self.p).any():
                raise ValueError(f"vector is not a boundary in degree {n}")
            return np.zeros(0, dtype=np.int64)
        a = np.concatenate(cols, axis=1)
        sol = solve_mod(a, np.asarray(vec, dtype=np.int64)[sel], self.p)
        if sol is None:
            raise ValueError(f"vector has no class in degree {n}; window too tight?")
        return sol[:nh] % self.p

    def is_boundary(self, n: int, vec: np.ndarray) -> bool:
        return not self.pi(n, vec).any()

    def boundary_witness(self, n: int, vec: np.ndarray) -> Optional[np.ndarray]:
        """u with d(u) = vec on the solve-filter equations of degree n."""
        cx = self.complex
        sel = cx.filter_indices(n, "solve")
        a = cx.d_matrix(n - 1)[sel, :]
        return solve_mod(a, np.asarray(vec, dtype=np.int64)[sel], self.p)


def cohomology(cx: CochainComplex) -> tuple[GradedVectorSpace, CohomologySplitting]:
    """Cohomology dimensions on the trusted window with a chosen splitting."""
    split = CohomologySplitting(cx)
    basis = {}
    for n in range(cx.trusted[0], cx.trusted[1] + 1):
        hd = split.h_dim(n)
        if hd:
            basis[n] = tuple(f"h{n}_{i}" for i in range(hd))
    return GradedVectorSpace(cx.trusted[0], cx.trusted[1], basis), split


# ---------------------------------------------------------------------------
# dg algebras
# ---------------------------------------------------------------------------


class DgAlgebra:
    """A cochain complex with a multiplication and unit.

    The generic implementation keeps lazy dense tables per degree pair;
    subclasses with structured bases override ``mult_vec``.
    """

    def __init__(self, complex: CochainComplex, mult: Optional[Callable] = None,
                 unit: Optional[np.ndarray] = None, tables: Optional[dict] = None):
        self.complex = complex
        self.p = complex.p
        self._mult_fn = mult
        self._tables = tables if tables is not None else {}
        if unit is None:
            raise ValueError("a dg algebra needs a unit vector in degree 0")
        self.unit = np.asarray(unit, dtype=np.int64) % self.p

    def table(self, d1: int, d2: int) -> np.ndarray:
        key = (d1, d2)
        if key not in self._tables:
            cx = self.complex
            t = np.zeros((cx.dim(d1), cx.dim(d2), cx.dim(d1 + d2)), dtype=np.int64)
            for i in range(cx.dim(d1)):
                e1 = np.zeros(cx.dim(d1), dtype=np.int64)
                e1[i] = 1
                for j in range(cx.dim(d2)):
                    e2 = np.zeros(cx.dim(d2), dtype=np.int64)
                    e2[j] = 1
                    t[i, j] = self.mult_vec(d1, e1, d2, e2)
            self._tables[key] = t
        return self._tables[key]

    def mult_vec(self, d1: int, v1: np.ndarray, d2: int, v2: np.ndarray) -> np.ndarray:
        if self._mult_fn is not None:
            return self._mult_fn(d1, v1, d2, v2) % self.p
        t = self._tables.get((d1, d2))
        if t is None:
            raise ValueError(f"no multiplication table for degrees {(d1, d2)}")
        return np.einsum("i,j,ijk->k", v1 % self.p, v2 % self.p, t) % self.p

    def to_json(self) -> dict:
        out = self.complex.to_json()
        cx = self.complex
        triples = []
        for d1 in range(cx.lo, cx.hi + 1):
            for d2 in range(cx.lo, cx.hi + 1):
                if cx.dim(d1) and cx.dim(d2) and cx.lo <= d1 + d2 <= cx.hi:
                    t = self.table(d1, d2)
                    for (i, j, k), v in np.ndenumerate(t):
                        if v:
                            triples.append([d1, int(i), d2, int(j), int(k), int(v)])
        out["multiplication"] = triples
        out["unit"] = [int(x) for x in self.unit]
        return out


def check_leibniz(dga: DgAlgebra, degree_range: Optional[tuple] = None) -> list:
    """Basis pairs violating d(xy) = d(x)y + (-1)^{|x|} x d(y)."""
    cx = dga.complex
    lo, hi = degree_range if degree_range else cx.trusted
    bad = []
    for d1 in range(lo, hi + 1):
        for d2 in range(lo, hi + 1):
            if d1 + d2 + 1 > hi or not cx.dim(d1) or not cx.dim(d2):
                continue
            dm1, dm2, dm12 = cx.d_matrix(d1), cx.d_matrix(d2), cx.d_matrix(d1 + d2)
            sign = -1 if d1 % 2 else 1
            for i in range(cx.dim(d1)):
                e1 = np.zeros(cx.dim(d1), dtype=np.int64)
                e1[i] = 1
                de1 = dm1[:, i]
                for j in range(cx.dim(d2)):
                    e2 = np.zeros(cx.dim(d2), dtype=np.int64)
                    e2[j] = 1
                    lhs = (dm12 @ dga.mult_vec(d1, e1, d2, e2)) % dga.p
                    rhs = (dga.mult_vec(d1 + 1, de1, d2, e2)
                           + sign * dga.mult_vec(d1, e1, d2 + 1, dm2[:, j])) % dga.p
                    if ((lhs - rhs) % dga.p).any():
                        bad.append((d1, i, d2, j))
    return bad


def check_associativity(dga: DgAlgebra, degree_range: Optional[tuple] = None) -> list:
    cx = dga.complex
    lo, hi = degree_range if degree_range else cx.trusted
    bad = []
    for d1 in range(lo, hi + 1):
        for d2 in range(lo, hi + 1):
            for d3 in range(lo, hi + 1):
                if d1 + d2 + d3 > hi or not (cx.dim(d1) and cx.dim(d2) and cx.dim(d3)):
                    continue
                for i in range(cx.dim(d1)):
                    e1 = np.zeros(cx.dim(d1), dtype=np.int64)
                    e1[i] = 1
                    for j in range(cx.dim(d2)):
                        e2 = np.zeros(cx.dim(d2), dtype=np.int64)
                        e2[j] = 1
                        e12 = dga.mult_vec(d1, e1, d2, e2)
                        for k in range(cx.dim(d3)):
                            e3 = np.zeros(cx.dim(d3), dtype=np.int64)
                            e3[k] = 1
                            left = dga.mult_vec(d1 + d2, e12, d3, e3)
                            right = dga.mult_vec(d1, e1, d2 + d3, dga.mult_vec(d2, e2, d3, e3))
                            if ((left - right) % dga.p).any():
                                bad.append((d1, i, d2, j, d3, k))
    return bad


# ---------------------------------------------------------------------------
# Chain maps, pullbacks, quasi-isomorphisms
# ---------------------------------------------------------------------------


@dataclass
class ChainMap:
    """Degree-preserving map of complexes, one matrix per degree."""

    source: CochainComplex
    target: CochainComplex
    matrices: dict

    def matrix(self, n: int) -> np.ndarray:
        m = self.matrices.get(n)
        if m is None:
            return np.zeros((self.target.dim(n), self.source.dim(n)), dtype=np.int64)
        return m

    def apply(self, n: int, vec: np.ndarray) -> np.ndarray:
        return (self.matrix(n) @ (np.asarray(vec) % self.source.p)) % self.source.p

    def chain_map_violations(self) -> list:
        p = self.source.p
        bad = []
        lo = max(self.source.lo, self.target.lo)
        hi = min(self.source.hi, self.target.hi) - 1
        for n in range(lo, hi + 1):
            lhs = (self.target.d_matrix(n) @ self.matrix(n)) % p
            rhs = (self.matrix(n + 1) @ self.source.d_matrix(n)) % p
            if ((lhs - rhs) % p).any():
                bad.append(n)
        return bad

    def is_surjective(self, degrees=None) -> bool:
        p = self.source.p
        rng = degrees if degrees is not None else range(self.target.lo, self.target.hi + 1)
        for n in rng:
            if self.target.dim(n) and rank_mod(self.matrix(n), p) < self.target.dim(n):
                return False
        return True


def induced_cohomology_map(f: ChainMap, split_src: CohomologySplitting,
                           split_tgt: CohomologySplitting, n: int) -> np.ndarray:
    """Matrix of H^n(f) with respect to the chosen class bases."""
    hs = split_src.h_dim(n)
    ht = split_tgt.h_dim(n)
    mat = np.zeros((ht, hs), dtype=np.int64)
    for i in range(hs):
        coords = np.zeros(hs, dtype=np.int64)
        coords[i] = 1
        rep = split_src.representative(n, coords)
        mat[:, i] = split_tgt.pi(n, f.apply(n, rep))
    return mat


def quasi_iso_check(f: ChainMap, degrees: Optional[range] = None) -> bool:
    """True iff H^n(f) is bijective for all trusted degrees."""
    split_src = CohomologySplitting(f.source)
    split_tgt = CohomologySplitting(f.target)
    if degrees is None:
        lo = max(f.source.trusted[0], f.target.trusted[0])
        hi = min(f.source.trusted[1], f.target.trusted[1])
        degrees = range(lo, hi + 1)
    p = f.source.p
    for n in degrees:
        hs, ht = split_src.h_dim(n), split_tgt.h_dim(n)
        if hs != ht:
            return False
        if hs == 0:
            continue
        mat = induced_cohomology_map(f, split_src, split_tgt, n)
        if rank_mod(mat, p) != hs:
            return False
    return True


def pullback_dga(a_dga: DgAlgebra, b_dga: DgAlgebra, m_complex: CochainComplex,
                 alpha: ChainMap, beta: ChainMap) -> tuple[DgAlgebra, ChainMap, ChainMap]:
    """The pullback dg algebra X = {(a, b) : alpha(a) = beta(b)}.

    X is computed degreewise as a kernel, with differential (d_A, d_B) and
    componentwise multiplication; closure under multiplication and the unit
    condition alpha(1) = beta(1) are verified and raised on failure.
    """
    p = a_dga.p
    ca, cb, cm = a_dga.complex, b_dga.complex, m_complex
    if ((alpha.apply(0, a_dga.unit) - beta.apply(0, b_dga.unit)) % p).any():
        raise ValueError("unit mismatch: alpha(1) != beta(1)")
    lo = max(ca.lo, cb.lo)
    hi = min(ca.hi, cb.hi)
    dims = {}
    basis = {}  # rows spanning the kernel, coordinates (a | b)
    free_cols = {}  # nullspace_mod puts an identity on the free columns
    for n in range(lo, hi + 1):
        big = np.concatenate([alpha.matrix(n), (-beta.matrix(n)) % p], axis=1) % p
        _red, piv = rref_mod(big, p)
        pivset = set(piv)
        free_cols[n] = np.array([c for c in range(big.shape[1]) if c not in pivset], dtype=np.int64)
        ker = nullspace_mod(big, p)
        basis[n] = ker
        dims[n] = ker.shape[0]

    def express(n: int, img: np.ndarray, what: str) -> np.ndarray:
        if dims.get(n, 0) == 0:
            if img.any():
                raise ValueError(f"{what} leaves the pullback in degree {n}")
            return np.zeros(0, dtype=np.int64)
        coords = img[free_cols[n]] % p
        if ((coords @ basis[n] - img) % p).any():
            raise ValueError(f"{what} leaves the pullback in degree {n}")
        return coords

    d = {}
    for n in range(lo, hi):
        da = ca.dim(n)
        if dims.get(n, 0) == 0:
            continue
        mat = np.zeros((dims.get(n + 1, 0), dims[n]), dtype=np.int64)
        for c, row in enumerate(basis[n]):
            va, vb = row[:da], row[da:]
            img = np.concatenate([(ca.d_matrix(n) @ va) % p, (cb.d_matrix(n) @ vb) % p])
            mat[:, c] = express(n + 1, img, "differential")
        d[n] = mat
    cx = CochainComplex(p, lo, hi, dims, d, trusted=(lo, max(lo, hi - 1)))

    def mult(d1, v1, d2, v2):
        da1, da2 = ca.dim(d1), ca.dim(d2)
        r1 = (np.asarray(v1) @ basis[d1]) % p
        r2 = (np.asarray(v2) @ basis[d2]) % p
        pa = a_dga.mult_vec(d1, r1[:da1], d2, r2[:da2])
        pb = b_dga.mult_vec(d1, r1[da1:], d2, r2[da2:])
        return express(d1 + d2, np.concatenate([pa, pb]), "product")

    unit = express(0, np.concatenate([a_dga.unit, b_dga.unit]), "unit")
    x = DgAlgebra(cx, mult=mult, unit=unit)
    da_by_n = {n: basis[n][:, : ca.dim(n)].T % p for n in basis}
    db_by_n = {n: basis[n][:, ca.dim(n):].T % p for n in basis}
    p1 = ChainMap(cx, ca, da_by_n)
    p2 = ChainMap(cx, cb, db_by_n)
    return x, p1, p2


# ---------------------------------------------------------------------------
# Complexes of free modules over a finite commutative algebra
# ---------------------------------------------------------------------------


class FiniteAlgebra:
    """Commutative algebra with a finite k-basis and structure constants."""

    def __init__(self, p: int, names: list, table: np.ndarray, unit_index: int = 0):
        self.p = p
        self.names = names
        self.dim = len(names)
        self.table = table % p  # table[i, j] = basis expansion of e_i e_j
        self.unit_index = unit_index

    @staticmethod
    def truncated_polynomial(p: int, r: int) -> "FiniteAlgebra":
        """k[T]/(T^r): the group algebra of the cyclic group of order r in
        characteristic p when r is a power of p."""
        table = np.zeros((r, r, r), dtype=np.int64)
        for i in range(r):
            for j in range(r):
                if i + j < r:
                    table[i, j, i + j] = 1
        return FiniteAlgebra(p, [f"T^{e}" if e else "1" for e in range(r)], table)

    def mult(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        return np.einsum("i,j,ijk->k", u % self.p, v % self.p, self.table) % self.p

    def element(self, power: int, coeff: int = 1) -> np.ndarray:
        v = np.zeros(self.dim, dtype=np.int64)
        v[power] = coeff % self.p
        return v


@dataclass
class FreeComplex:
    """Complex of finitely generated free modules over a FiniteAlgebra.

    ``diff[n]`` has shape (rank(n+1), rank(n), dim A): each entry is the
    algebra element the differential multiplies by (acting on the left).
    """

    algebra: FiniteAlgebra
    lo: int
    hi: int
    ranks: dict
    diff: dict

    def rank(self, n: int) -> int:
        return self.ranks.get(n, 0)

    def diff_block(self, n: int) -> np.ndarray:
        m = self.diff.get(n)
        if m is None:
            return np.zeros((self.rank(n + 1), self.rank(n), self.algebra.dim), dtype=np.int64)
        return m

    def d_squared_violations(self) -> list:
        a = self.algebra
        bad = []
        for n in range(self.lo, self.hi - 1):
            d0, d1 = self.diff_block(n), self.diff_block(n + 1)
            for r in range(self.rank(n + 2)):
                for c in range(self.rank(n)):
                    acc = np.zeros(a.dim, dtype=np.int64)
                    for m in range(self.rank(n + 1)):
                        acc = (acc + a.mult(d1[r, m], d0[m, c])) % a.p
                    if acc.any():
                        bad.append((n, r, c))
        return bad

    def shift(self, t: int) -> "FreeComplex":
        """Suspension: (X[t])^n = X^{n+t} with differential (-1)^t d."""
        sign = -1 if t % 2 else 1
        ranks = {n - t: r for n, r in self.ranks.items()}
        diff = {n - t: (sign * m) % self.algebra.p for n, m in self.diff.items()}
        return FreeComplex(self.algebra, self.lo - t, self.hi - t, ranks, diff)

    def direct_sum(self, other: "FreeComplex") -> "FreeComplex":
        a = self.algebra
        lo, hi = min(self.lo, other.lo), max(self.hi, other.hi)
        ranks = {n: self.rank(n) + other.rank(n) for n in range(lo, hi + 1)}
        diff = {}
        for n in range(lo, hi):
            m = np.zeros((ranks[n + 1], ranks[n], a.dim), dtype=np.int64)
            m[: self.rank(n + 1), : self.rank(n)] = self.diff_block(n)
            m[self.rank(n + 1):, self.rank(n):] = other.diff_block(n)
            diff[n] = m
        return FreeComplex(a, lo, hi, ranks, diff)

    def contractible_hull(self) -> "FreeComplex":
        """The injective dg module M + M[1] with differential (0 id; 0 0).

        Block n is M_n + M_{n+1}, so the hull starts one degree below M."""
        a = self.algebra
        lo, hi = self.lo - 1, self.hi
        ranks = {n: self.rank(n) + self.rank(n + 1) for n in range(lo, hi + 1)}
        ranks = {n: r for n, r in ranks.items() if r}
        diff = {}
        for n in range(lo, hi):
            rn = self.rank(n)
            rn1 = self.rank(n + 1)
            m = np.zeros((ranks.get(n + 1, 0), ranks.get(n, 0), a.dim), dtype=np.int64)
            for i in range(rn1):
                m[i, rn + i, a.unit_index] = 1
            diff[n] = m
        return FreeComplex(a, lo, hi, ranks, diff)

    def hull_embedding(self) -> "FreeBlockMap":
        """The split monomorphism M -> M + M[1], m -> (m, dm)."""
        hull = self.contractible_hull()
        mats = {}
        a = self.algebra
        for n in range(self.lo, self.hi + 1):
            m = np.zeros((hull.rank(n), self.rank(n), a.dim), dtype=np.int64)
            for i in range(self.rank(n)):
                m[i, i, a.unit_index] = 1
            d = self.diff_block(n)
            for r in range(self.rank(n + 1)):
                for c in range(self.rank(n)):
                    m[self.rank(n) + r, c] = d[r, c]
            mats[n] = m
        return FreeBlockMap(self, hull, 0, mats)


@dataclass
class FreeBlockMap:
    """Graded map of free complexes with algebra-element entries."""

    source: FreeComplex
    target: FreeComplex
    degree: int
    matrices: dict  # n -> (target.rank(n+degree), source.rank(n), dimA)

    def matrix(self, n: int) -> np.ndarray:
        m = self.matrices.get(n)
        if m is None:
            return np.zeros((self.target.rank(n + self.degree), self.source.rank(n),
                             self.source.algebra.dim), dtype=np.int64)
        return m


def hom_complex(x: FreeComplex, y: FreeComplex, lo: int, hi: int,
                trusted: Optional[tuple] = None) -> CochainComplex:
    """The homomorphism complex of graded A-linear maps X -> Y.

    Degree n basis: (block j, target generator, source generator, algebra
    basis element) for maps X_j -> Y_{j+n}; the differential is
    d(f) = d_Y f - (-1)^n f d_X.
    """
    a = x.algebra
    p = a.p
    labels = {}
    index = {}
    dims = {}
    for n in range(lo, hi + 1):
        labs = []
        for j in range(x.lo, x.hi + 1):
            if x.rank(j) and y.rank(j + n):
                for r in range(y.rank(j + n)):
                    for c in range(x.rank(j)):
                        for e in range(a.dim):
                            labs.append((j, r, c, e))
        labels[n] = labs
        index[n] = {lab: i for i, lab in enumerate(labs)}
        dims[n] = len(labs)
    d = {}
    for n in range(lo, hi):
        mat = np.zeros((dims[n + 1], dims[n]), dtype=np.int64)
        sign = -1 if n % 2 else 1
        for col, (j, r, c, e) in enumerate(labels[n]):
            ae = a.element(e)
            # d_Y . f : block j -> Y_{j+n+1}
            dy = y.diff_block(j + n)
            for r2 in range(y.rank(j + n + 1)):
                prod = a.mult(dy[r2, r], ae)
                for e2, v in enumerate(prod):
                    if v:
                        row = index[n + 1].get((j, r2, c, e2))
                        if row is not None:
                            mat[row, col] = (mat[row, col] + v) % p
            # -(-1)^n f . d_X : block j-1 -> Y_{j+n}
            dx = x.diff_block(j - 1)
            for c2 in range(x.rank(j - 1)):
                prod = a.mult(ae, dx[c, c2])
                for e2, v in enumerate(prod):
                    if v:
                        row = index[n + 1].get((j - 1, r, c2, e2))
                        if row is not None:
                            mat[row, col] = (mat[row, col] - sign * v) % p
        d[n] = mat
    return CochainComplex(p, lo, hi, dims, d, labels=labels, trusted=trusted)


class HomDgAlgebra(DgAlgebra):
    """End(X) with multiplication given by composition of graded maps."""

    def __init__(self, x: FreeComplex, complex: CochainComplex):
        self.x = x
        self._index = {n: {lab: i for i, lab in enumerate(complex.labels[n])} for n in complex.labels}
        unit = np.zeros(complex.dim(0), dtype=np.int64)
        for j in range(x.lo, x.hi + 1):
            for r in range(x.rank(j)):
                unit[self._index[0][(j, r, r, x.algebra.unit_index)]] = 1
        super().__init__(complex, unit=unit)

    def mult_vec(self, d1, v1, d2, v2):
        # (f g)_j = f_{j + d2} g_j
        a = self.x.algebra
        cx = self.complex
        out = np.zeros(cx.dim(d1 + d2), dtype=np.int64)
        idx_out = self._index[d1 + d2]
        nz1 = np.nonzero(np.asarray(v1) % self.p)[0]
        nz2 = np.nonzero(np.asarray(v2) % self.p)[0]
        labs1 = cx.labels[d1]
        labs2 = cx.labels[d2]
        for i1 in nz1:
            j1, r1, c1, e1 = labs1[i1]
            co1 = int(v1[i1]) % self.p
            for i2 in nz2:
                j2, r2, c2, e2 = labs2[i2]
                if j1 != j2 + d2 or c1 != r2:
                    continue
                prod = a.mult(a.element(e1), a.element(e2))
                co = (co1 * int(v2[i2])) % self.p
                for e3, v in enumerate(prod):
                    if v:
                        row = idx_out.get((j2, r1, c2, e3))
                        if row is not None:
                            out[row] = (out[row] + co * v) % self.p
        return out


def end_dga(x: FreeComplex, lo: int, hi: int, trusted: Optional[tuple] = None) -> HomDgAlgebra:
    cx = hom_complex(x, x, lo, hi, trusted=trusted)
    return HomDgAlgebra(x, cx)


def hom_onesided_maps(x: FreeComplex, yhat: FreeComplex, nu: FreeBlockMap,
                      end_x: HomDgAlgebra, end_y: HomDgAlgebra,
                      hom_xy: CochainComplex) -> tuple[ChainMap, ChainMap]:
    """The chain maps f -> nu f (on End X) and g -> g nu (on End Yhat) into
    Hom(X, Yhat), the legs of the zigzag pullback."""
    a = x.algebra
    p = a.p
    idx = {n: {lab: i for i, lab in enumerate(hom_xy.labels[n])} for n in hom_xy.labels}
    alpha_m = {}
    beta_m = {}
    for n in range(hom_xy.lo, hom_xy.hi + 1):
        am = np.zeros((hom_xy.dim(n), end_x.complex.dim(n)), dtype=np.int64)
        for col, (j, r, c, e) in enumerate(end_x.complex.labels[n]):
            numat = nu.matrix(j + n)
            for r2 in range(yhat.rank(j + n)):
                prod = a.mult(numat[r2, r], a.element(e))
                for e2, v in enumerate(prod):
                    if v:
                        row = idx[n].get((j, r2, c, e2))
                        if row is not None:
                            am[row, col] = (am[row, col] + v) % p
        alpha_m[n] = am
        bm = np.zeros((hom_xy.dim(n), end_y.complex.dim(n)), dtype=np.int64)
        for col, (j, r, c, e) in enumerate(end_y.complex.labels[n]):
            numat = nu.matrix(j)
            for c2 in range(x.rank(j)):
                prod = a.mult(a.element(e), numat[c, c2])
                for e2, v in enumerate(prod):
                    if v:
                        row = idx[n].get((j, r, c2, e2))
                        if row is not None:
                            bm[row, col] = (bm[row, col] + v) % p
        beta_m[n] = bm
    return (ChainMap(end_x.complex, hom_xy, alpha_m), ChainMap(end_y.complex, hom_xy, beta_m))
