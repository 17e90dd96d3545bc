"""Cyclic p-groups: periodic resolutions, endomorphism dg algebras, group
cohomology rings, Tate rings, and the canonical class verdicts.

The group algebra of the cyclic group of order r = p^n over a field of
characteristic p is k[T]/(T^r); the trivial module has the 2-periodic
injective resolution

    I_0 --T--> I_1 --(-T^{r-1})--> I_2 --T--> I_3 --> ...

Everything here is windowed: a resolution of length N = 2(window+2)+4
makes End-degree computations up to the window clear of the truncation
edge; class reads and boundary solves are restricted to low blocks by
coordinate filters.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from ._jit import njit
from .dgcore import (
    CohomologySplitting,
    FiniteAlgebra,
    FreeComplex,
    HomDgAlgebra,
    cohomology,
    end_dga as build_end_dga,
)
from .exactla import GF, is_prime
from .graded import GradedAlgebraPresentation, tensor_algebra
from .hochschild import (
    HochschildCochain,
    ObstructionVerdict,
    coboundary_solve,
    decide_coboundary,
    delta,
    delta_violations,
    gamma_cochain,
    kunneth_m3,
)
from .kadeishvili import secondary_multiplication, transfer_to_cochain
from .localise import LocalisedAlgebra, localise_algebra

__all__ = [
    "CyclicGroupData",
    "periodic_injective_resolution",
    "end_dga",
    "end_leibniz_violations",
    "end_associativity_violations",
    "group_cohomology_ring",
    "ring_identification",
    "tate_ring",
    "mu_G",
    "mu_G_tate",
    "mu_product",
    "m3_cochain",
    "factory",
]

CLASS_BLOCKS = 6  # blocks used for class comparison
SOLVE_MARGIN = 6  # solve filter reaches CLASS_BLOCKS + window


@dataclass(frozen=True)
class CyclicGroupData:
    """Cyclic group of order p^n over a field of characteristic p."""

    p: int
    n: int
    window: int = 8

    def __post_init__(self):
        if not is_prime(self.p) or self.n < 1:
            raise ValueError("need a prime p and n >= 1")

    @property
    def r(self) -> int:
        return self.p ** self.n

    def resolution_length(self) -> int:
        return 2 * (self.window + 2) + 4


def periodic_injective_resolution(data: CyclicGroupData) -> FreeComplex:
    """The 2-periodic injective resolution of the trivial module.

    Differentials alternate multiplication by T and by -T^{r-1}; the signs
    are kept literal so odd characteristic is uniform."""
    r, p = data.r, data.p
    big_n = data.resolution_length()
    algebra = FiniteAlgebra.truncated_polynomial(p, r)
    ranks = {i: 1 for i in range(big_n + 1)}
    diff = {}
    for i in range(big_n):
        m = np.zeros((1, 1, r), dtype=np.int64)
        if i % 2 == 0:
            m[0, 0, 1] = 1
        else:
            m[0, 0, r - 1] = (-1) % p
        diff[i] = m
    return FreeComplex(algebra, 0, big_n, ranks, diff)


def end_dga(data: CyclicGroupData) -> HomDgAlgebra:
    """End(ik), windowed, with truncation filters installed."""
    ik = periodic_injective_resolution(data)
    dga = build_end_dga(ik, -2, data.window + 2, trusted=(0, data.window))
    cls_cut = CLASS_BLOCKS
    sol_cut = CLASS_BLOCKS + data.window
    cx = dga.complex
    cx.class_filter = {
        n: np.array([i for i, (j, _, _, _) in enumerate(cx.labels[n]) if j <= cls_cut], dtype=np.int64)
        for n in cx.labels
    }
    cx.solve_filter = {
        n: np.array([i for i, (j, _, _, _) in enumerate(cx.labels[n]) if j <= sol_cut], dtype=np.int64)
        for n in cx.labels
    }
    return dga


# ---------------------------------------------------------------------------
# Structured Leibniz / associativity sweeps
#
# On the block basis (j, T^e) every product is a monomial, so both sides of
# the Leibniz rule are supported on at most two blocks and the exhaustive
# sweep is exponent arithmetic.  Pairs whose blocks do not align compose to
# zero on both sides and are covered by the generic multiplication in the
# cross-check tests.
# ---------------------------------------------------------------------------


def _leibniz_sweep(big_n, r, p, dexp, dco, lo, hi):
    bad = 0
    for d1 in range(lo, hi + 1):
        for d2 in range(lo, hi + 1):
            n = d1 + d2
            if n + 1 > hi:
                continue
            for j2 in range(0, big_n - d2 + 1):
                for align in range(2):
                    j1 = j2 + d2 + align
                    if j1 < 0 or j1 > big_n - d1:
                        continue
                    for e1 in range(r):
                        for e2 in range(r):
                            for jb in (j2 - 1, j2):
                                if jb < 0 or jb > big_n - (n + 1):
                                    continue
                                acc = np.zeros(3 * r + 2, dtype=np.int64)
                                # lhs: d(xy)
                                if j1 == j2 + d2 and e1 + e2 < r:
                                    e = e1 + e2
                                    if jb == j2 and j2 + n < big_n:
                                        acc[e + dexp[j2 + n]] += dco[j2 + n]
                                    if jb == j2 - 1:
                                        sgn = -1 if n % 2 == 0 else 1
                                        acc[e + dexp[j2 - 1]] += sgn * dco[j2 - 1]
                                # rhs: -(d(x) y + (-1)^{d1} x d(y))
                                s1 = 1 if d1 % 2 == 0 else -1
                                # d(x) terms: (j1, e1+dexp[j1+d1]) and (j1-1, ...)
                                if j1 + d1 < big_n and j1 == j2 + d2 and jb == j2:
                                    acc[e1 + dexp[j1 + d1] + e2] -= dco[j1 + d1]
                                if j1 >= 1 and j1 - 1 == j2 + d2 and jb == j2:
                                    sgn = -1 if d1 % 2 == 0 else 1
                                    acc[e1 + dexp[j1 - 1] + e2] -= sgn * dco[j1 - 1]
                                # x d(y) terms: d(y) at (j2, ...) and (j2-1, ...)
                                if j2 + d2 < big_n and j1 == j2 + (d2 + 1) and jb == j2:
                                    acc[e1 + e2 + dexp[j2 + d2]] -= s1 * dco[j2 + d2]
                                if j2 >= 1 and j1 == (j2 - 1) + (d2 + 1) and jb == j2 - 1:
                                    sgn = -1 if d2 % 2 == 0 else 1
                                    acc[e1 + e2 + dexp[j2 - 1]] -= s1 * sgn * dco[j2 - 1]
                                for e in range(r):
                                    if acc[e] % p:
                                        bad += 1
    return bad


def _assoc_sweep(big_n, r, p, lo, hi):
    bad = 0
    for d1 in range(lo, hi + 1):
        for d2 in range(lo, hi + 1):
            for d3 in range(lo, hi + 1):
                n = d1 + d2 + d3
                if n > hi:
                    continue
                for j3 in range(0, big_n - d3 + 1):
                    j2 = j3 + d3
                    j1 = j2 + d2
                    if j2 > big_n - d2 or j1 > big_n - d1:
                        continue
                    if j3 > big_n - n:
                        continue
                    for e1 in range(r):
                        for e2 in range(r):
                            for e3 in range(r):
                                lhs = e1 + e2 + e3 if (e1 + e2 < r and e1 + e2 + e3 < r) else -1
                                rhs = e1 + e2 + e3 if (e2 + e3 < r and e1 + e2 + e3 < r) else -1
                                if lhs != rhs:
                                    bad += 1
    return bad


_leibniz_sweep_jit = njit(cache=True)(_leibniz_sweep)
_assoc_sweep_jit = njit(cache=True)(_assoc_sweep)


def _d_monomials(data: CyclicGroupData) -> tuple[np.ndarray, np.ndarray]:
    big_n = data.resolution_length()
    dexp = np.zeros(big_n, dtype=np.int64)
    dco = np.zeros(big_n, dtype=np.int64)
    for i in range(big_n):
        if i % 2 == 0:
            dexp[i], dco[i] = 1, 1
        else:
            dexp[i], dco[i] = data.r - 1, (-1) % data.p
    return dexp, dco


def end_leibniz_violations(data: CyclicGroupData) -> int:
    """Exhaustive Leibniz check of End(ik) over the trusted degree window."""
    dexp, dco = _d_monomials(data)
    return int(_leibniz_sweep_jit(data.resolution_length(), data.r, data.p, dexp, dco, 0, data.window))


def end_associativity_violations(data: CyclicGroupData) -> int:
    """Exhaustive associativity check of End(ik) over the trusted window."""
    return int(_assoc_sweep_jit(data.resolution_length(), data.r, data.p, 0, data.window))


# ---------------------------------------------------------------------------
# The cohomology ring and the identification with its presentation
# ---------------------------------------------------------------------------


def group_cohomology_ring(data: CyclicGroupData) -> GradedAlgebraPresentation:
    """k[X] for order 2; k[X,Y]/(X^2) with |X| = 1, |Y| = 2 otherwise."""
    field = GF(data.p)
    if data.r == 2:
        return GradedAlgebraPresentation(field, [("X", 1)], [], graded_commutative=True,
                                         window=data.window)
    return GradedAlgebraPresentation(field, [("X", 1), ("Y", 2)], [((0, 0), {})],
                                     graded_commutative=True, window=data.window)


@dataclass
class CyclicPipeline:
    data: CyclicGroupData
    dga: HomDgAlgebra
    splitting: CohomologySplitting
    transfer: object
    ring: GradedAlgebraPresentation
    iso: dict
    m3: HochschildCochain


def ring_identification(dga, splitting, transfer, ring: GradedAlgebraPresentation,
                        window: int) -> dict:
    """Degreewise matrices taking presentation coordinates to class
    coordinates, built by multiplying out the generator classes.

    Validates the presentation against H*(End): one class per degree and
    all products matching, in particular X^2 = 0 for order >= 3."""
    p = ring.field.p
    iso = {}
    # class coordinates of the generators
    gen_classes = {}
    for g, deg in enumerate(ring.gen_degrees):
        if splitting.h_dim(deg) != 1:
            raise ValueError(f"H^{deg}(End) is not one-dimensional")
        gen_classes[g] = (deg, np.array([1], dtype=np.int64))
    unit_cls = splitting.pi(0, dga.unit)
    for d in range(0, window + 1):
        dim = ring.dim(d)
        hd = splitting.h_dim(d)
        if hd != dim:
            raise ValueError(f"H^{d}(End) has dimension {hd}, presentation has {dim}")
        mat = np.zeros((hd, dim), dtype=np.int64)
        for col, w in enumerate(ring.basis(d)):
            if not w:
                mat[:, col] = unit_cls
                continue
            cur_deg, cur = gen_classes[w[0]]
            for g in w[1:]:
                gd, gc = gen_classes[g]
                cur = transfer.m2_vec(cur_deg, cur, gd, gc)
                cur_deg += gd
            mat[:, col] = cur
        iso[d] = mat
    # cross-validate all products on the window
    for d1 in range(0, window + 1):
        for d2 in range(0, window + 1 - d1):
            for c1, w1 in enumerate(ring.basis(d1)):
                v1 = iso[d1][:, c1]
                for c2, w2 in enumerate(ring.basis(d2)):
                    v2 = iso[d2][:, c2]
                    prod = ring.multiply_words(w1, w2)
                    expect = np.zeros(splitting.h_dim(d1 + d2), dtype=np.int64)
                    for w, c in prod.items():
                        k = ring.basis(d1 + d2).index(w)
                        expect = (expect + int(c) * iso[d1 + d2][:, k]) % p
                    got = transfer.m2_vec(d1, v1, d2, v2)
                    if ((got - expect) % p).any():
                        raise ValueError(
                            f"H*(End) does not match the presentation at {w1} * {w2}")
    return iso


@lru_cache(maxsize=32)
def _pipeline(p: int, n: int, window: int) -> CyclicPipeline:
    data = CyclicGroupData(p, n, window)
    dga = end_dga(data)
    _, splitting = cohomology(dga.complex)
    transfer = secondary_multiplication(dga, splitting, window)
    ring = group_cohomology_ring(data)
    iso = ring_identification(dga, splitting, transfer, ring, window)
    m3 = transfer_to_cochain(transfer, ring, iso)
    return CyclicPipeline(data, dga, splitting, transfer, ring, iso, m3)


def m3_cochain(data: CyclicGroupData, window: Optional[int] = None) -> HochschildCochain:
    w = window if window is not None else data.window
    return _pipeline(data.p, data.n, w).m3


def perturbed_m3(data: CyclicGroupData, window: int, rng) -> HochschildCochain:
    """m3 recomputed from a random valid re-selection of cycle representatives.

    The induced products of H and the ring identification are unchanged by
    the choice, so only the transfer is rerun."""
    from .kadeishvili import cycle_selection, perturb_cycle_selection

    pipe = _pipeline(data.p, data.n, window)
    f1 = perturb_cycle_selection(pipe.dga, cycle_selection(pipe.dga, pipe.splitting, window), rng)
    transfer = secondary_multiplication(pipe.dga, pipe.splitting, window, f1=f1)
    return transfer_to_cochain(transfer, pipe.ring, pipe.iso)


def mu_G(data: CyclicGroupData) -> tuple[HochschildCochain, ObstructionVerdict]:
    """Secondary multiplication of H*(G,k) and its Hochschild class verdict."""
    m3 = m3_cochain(data)
    verdict = decide_coboundary(lambda w: m3_cochain(data, w), data.window)
    return m3, verdict


# ---------------------------------------------------------------------------
# Tate cohomology via localisation
# ---------------------------------------------------------------------------


def tate_ring(data: CyclicGroupData, window: Optional[int] = None) -> LocalisedAlgebra:
    """Localisation of the group cohomology ring at the periodicity
    generator: k[X, X^{-1}] for order 2, k[X, Y, Y^{-1}]/(X^2) otherwise."""
    w = window if window is not None else data.window
    ring = _pipeline(data.p, data.n, w).ring
    if data.r == 2:
        return localise_algebra(ring, ["X"], window=w)
    return localise_algebra(ring, ["Y"], window=w)


def mu_G_tate(data: CyclicGroupData) -> ObstructionVerdict:
    """Verdict for Gamma(mu) over the Tate ring, on the induced complex."""

    def builder(w: int) -> HochschildCochain:
        m3 = m3_cochain(data, w)
        loc = tate_ring(data, w)
        return gamma_cochain(m3, loc.algebra, loc.can)

    return decide_coboundary(builder, data.window)


# ---------------------------------------------------------------------------
# Kuenneth products of cyclic groups
# ---------------------------------------------------------------------------


def _reduced_factor(data: CyclicGroupData, window: int) -> HochschildCochain:
    """The factor's m3, replaced by the cohomologous zero table when its
    class is trivial on the window (a legitimate choice of secondary
    multiplication, which keeps the Kuenneth cocycle small)."""
    m3 = m3_cochain(data, window)
    witness, _stats = coboundary_solve(m3)
    if witness is None:
        return m3
    reduced = m3.add(delta(witness), scale=-1)
    return reduced


def product_m3(datas: list, window: int) -> tuple[GradedAlgebraPresentation, HochschildCochain]:
    """Fold kunneth_m3 over the factors, reducing trivial factors first."""
    if len(datas) < 2:
        raise ValueError("a product needs at least two factors")
    chars = {d.p for d in datas}
    if len(chars) != 1:
        raise ValueError("mismatched characteristic")
    cur = _reduced_factor(datas[0], window)
    for nxt_data in datas[1:]:
        nxt = _reduced_factor(nxt_data, window)
        prod = tensor_algebra(cur.algebra, nxt.algebra, window=(0, window))
        cur = kunneth_m3(cur, nxt, prod)
    return cur.algebra, cur


def mu_product(datas: list, window: Optional[int] = None) -> tuple[HochschildCochain, ObstructionVerdict]:
    """Canonical class of a product of cyclic groups via the Kuenneth
    cocycle; the verdict is a coboundary decision over the tensor ring."""
    w = window if window is not None else max(d.window for d in datas)
    _, m = product_m3(datas, w)
    verdict = decide_coboundary(lambda ww: product_m3(datas, ww)[1], w)
    return m, verdict


# ---------------------------------------------------------------------------
# CLI-facing factory
# ---------------------------------------------------------------------------


def _prime_power(r: int) -> tuple[int, int]:
    for p in range(2, r + 1):
        if is_prime(p) and r % p == 0:
            n = 0
            m = r
            while m % p == 0:
                m //= p
                n += 1
            if m != 1:
                raise ValueError(f"{r} is not a prime power")
            return p, n
    raise ValueError(f"{r} is not a prime power")


def factory(name: str, window: int = 8):
    """Resolve "cyclic:p^n", "product:r1,r2,...", "tate:cyclic:r" names."""
    name = name.strip()
    if name.startswith("tate:"):
        inner = factory(name[len("tate:"):], window)
        if not isinstance(inner, CyclicGroupData):
            raise ValueError("tate: expects a cyclic group")
        return ("tate", inner)
    if name.startswith("cyclic:"):
        r = int(name[len("cyclic:"):])
        p, n = _prime_power(r)
        return CyclicGroupData(p, n, window)
    if name.startswith("product:"):
        orders = [int(x) for x in name[len("product:"):].split(",") if x]
        groups = []
        for r in orders:
            p, n = _prime_power(r)
            groups.append(CyclicGroupData(p, n, window))
        return ("product", groups)
    raise ValueError(f"unknown factory name {name!r}")
