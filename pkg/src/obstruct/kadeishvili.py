"""Transfer of the secondary multiplication m3 onto the cohomology of a
dg algebra.

Given a dg algebra A with a chosen cohomology splitting, pick a linear
cycle selection f1 with pi . f1 = id, a homotopy f2 with

    d f2(x, y) = f1(xy) - f1(x) f1(y),

and set

    Phi3(a, b, c) = (-1)^{|a|} f1(a) f2(b, c) - f2(a, b) f1(c)
                    - f2(ab, c) + f2(a, bc),
    m3 = pi . Phi3.

Phi3 lands in the cycles, m3 is a (3,-1) Hochschild cocycle, and its class
does not depend on the choices; changing f1 or f2 moves m3 by a coboundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np

from .dgcore import CohomologySplitting, DgAlgebra
from .graded import GradedAlgebraPresentation
from .hochschild import HochschildCochain

__all__ = [
    "AInfinityTransfer",
    "cycle_selection",
    "perturb_cycle_selection",
    "homotopy_f2",
    "secondary_multiplication",
    "transfer_to_cochain",
]


@dataclass
class AInfinityTransfer:
    """The data (f1, f2, m3) produced by the transfer, plus the H-products.

    f1[n] maps class coordinates to cocycle vectors (columns are the chosen
    representatives); f2 and m3 are tables over class-basis indices; m2
    holds the induced multiplication of H in class coordinates.
    """

    dga: DgAlgebra
    splitting: CohomologySplitting
    max_degree: int
    f1: dict = dc_field(default_factory=dict)
    f2: dict = dc_field(default_factory=dict)
    m2: dict = dc_field(default_factory=dict)
    m3: dict = dc_field(default_factory=dict)
    f3: dict = dc_field(default_factory=dict)

    def h_dim(self, n: int) -> int:
        return self.splitting.h_dim(n)

    def f1_vec(self, n: int, coords: np.ndarray) -> np.ndarray:
        mat = self.f1.get(n)
        if mat is None or mat.size == 0:
            return np.zeros(self.dga.complex.dim(n), dtype=np.int64)
        return (mat @ (np.asarray(coords, dtype=np.int64) % self.dga.p)) % self.dga.p

    def f2_vec(self, n1: int, c1: np.ndarray, n2: int, c2: np.ndarray) -> np.ndarray:
        out = np.zeros(self.dga.complex.dim(n1 + n2 - 1), dtype=np.int64)
        for i1, a in enumerate(np.asarray(c1) % self.dga.p):
            if not a:
                continue
            for i2, b in enumerate(np.asarray(c2) % self.dga.p):
                if not b:
                    continue
                vec = self.f2.get((n1, i1, n2, i2))
                if vec is not None:
                    out = (out + int(a) * int(b) * vec) % self.dga.p
        return out

    def m2_vec(self, n1: int, c1: np.ndarray, n2: int, c2: np.ndarray) -> np.ndarray:
        out = np.zeros(self.h_dim(n1 + n2), dtype=np.int64)
        for i1, a in enumerate(np.asarray(c1) % self.dga.p):
            if not a:
                continue
            for i2, b in enumerate(np.asarray(c2) % self.dga.p):
                if not b:
                    continue
                out = (out + int(a) * int(b) * self.m2[(n1, i1, n2, i2)]) % self.dga.p
        return out


def cycle_selection(dga: DgAlgebra, splitting: CohomologySplitting, max_degree: int,
                    lo: int = 0) -> dict:
    """f1: class coordinates -> canonical cocycle representatives.

    The representative of the unit class is forced to be the unit."""
    p = dga.p
    f1 = {}
    for n in range(lo, max_degree + 1):
        hd = splitting.h_dim(n)
        mat = np.zeros((dga.complex.dim(n), hd), dtype=np.int64)
        for i in range(hd):
            coords = np.zeros(hd, dtype=np.int64)
            coords[i] = 1
            mat[:, i] = splitting.representative(n, coords)
        f1[n] = mat
    u = splitting.pi(0, dga.unit)
    if u.any():
        z = (f1[0] @ u) % p
        k = int(np.nonzero(u)[0][0])
        w = np.zeros_like(u)
        w[k] = pow(int(u[k]), p - 2, p)
        f1[0] = (f1[0] + np.outer((dga.unit - z) % p, w)) % p
    return f1


def perturb_cycle_selection(dga: DgAlgebra, f1: dict, rng) -> dict:
    """A different valid cycle selection: add random boundaries columnwise."""
    out = {}
    p = dga.p
    for n, mat in f1.items():
        dm = dga.complex.d_matrix(n - 1)
        new = mat.copy()
        for c in range(mat.shape[1]):
            u = rng.integers(0, p, size=dga.complex.dim(n - 1))
            new[:, c] = (new[:, c] + dm @ u) % p
        out[n] = new
    return out


def homotopy_f2(dga: DgAlgebra, splitting: CohomologySplitting, f1: dict,
                max_total: int) -> tuple[dict, dict]:
    """Choose f2 with d f2(x,y) = f1(xy) - f1(x) f1(y) on all class pairs.

    Also returns the induced multiplication table of H.  Raises when a
    defect fails to bound, which signals an invalid f1 or a corrupted
    algebra."""
    p = dga.p
    f2: dict = {}
    m2: dict = {}
    degrees = sorted(f1)
    for n1 in degrees:
        for n2 in degrees:
            if n1 + n2 > max_total or (n1 + n2) not in f1:
                continue
            for i1 in range(f1[n1].shape[1]):
                x = f1[n1][:, i1]
                for i2 in range(f1[n2].shape[1]):
                    y = f1[n2][:, i2]
                    prod = dga.mult_vec(n1, x, n2, y)
                    cls = splitting.pi(n1 + n2, prod)
                    m2[(n1, i1, n2, i2)] = cls
                    defect = (f1[n1 + n2] @ cls - prod) % p
                    if not defect.any():
                        f2[(n1, i1, n2, i2)] = np.zeros(dga.complex.dim(n1 + n2 - 1), dtype=np.int64)
                        continue
                    u = splitting.boundary_witness(n1 + n2, defect)
                    if u is None:
                        raise ValueError(
                            f"multiplication defect at classes ({n1},{i1})({n2},{i2}) is not a boundary")
                    f2[(n1, i1, n2, i2)] = u % p
    return f2, m2


def phi3(transfer: AInfinityTransfer, n1: int, i1: int, n2: int, i2: int,
         n3: int, i3: int) -> np.ndarray:
    """(-1)^{|a|} f1(a) f2(b,c) - f2(a,b) f1(c) - f2(ab,c) + f2(a,bc)."""
    dga = transfer.dga
    p = dga.p
    e1 = np.zeros(transfer.h_dim(n1), dtype=np.int64)
    e1[i1] = 1
    e2 = np.zeros(transfer.h_dim(n2), dtype=np.int64)
    e2[i2] = 1
    e3 = np.zeros(transfer.h_dim(n3), dtype=np.int64)
    e3[i3] = 1
    a = transfer.f1_vec(n1, e1)
    c = transfer.f1_vec(n3, e3)
    f2bc = transfer.f2_vec(n2, e2, n3, e3)
    f2ab = transfer.f2_vec(n1, e1, n2, e2)
    sign = -1 if n1 % 2 else 1
    out = sign * dga.mult_vec(n1, a, n2 + n3 - 1, f2bc)
    out = (out - dga.mult_vec(n1 + n2 - 1, f2ab, n3, c)) % p
    ab = transfer.m2_vec(n1, e1, n2, e2)
    out = (out - transfer.f2_vec(n1 + n2, ab, n3, e3)) % p
    bc = transfer.m2_vec(n2, e2, n3, e3)
    out = (out + transfer.f2_vec(n1, e1, n2 + n3, bc)) % p
    return out


def secondary_multiplication(dga: DgAlgebra, splitting: CohomologySplitting,
                             max_total: int, f1: Optional[dict] = None) -> AInfinityTransfer:
    """Run the transfer up to total class degree max_total."""
    if f1 is None:
        f1 = cycle_selection(dga, splitting, max_total)
    f2, m2 = homotopy_f2(dga, splitting, f1, max_total)
    transfer = AInfinityTransfer(dga, splitting, max_total, f1, f2, m2)
    degrees = sorted(f1)
    for n1 in degrees:
        for n2 in degrees:
            for n3 in degrees:
                if n1 + n2 + n3 > max_total:
                    continue
                for i1 in range(transfer.h_dim(n1)):
                    for i2 in range(transfer.h_dim(n2)):
                        for i3 in range(transfer.h_dim(n3)):
                            vec = phi3(transfer, n1, i1, n2, i2, n3, i3)
                            cls = splitting.pi(n1 + n2 + n3 - 1, vec)
                            if cls.any():
                                transfer.m3[(n1, i1, n2, i2, n3, i3)] = cls
    return transfer


def compute_f3(transfer: AInfinityTransfer) -> dict:
    """On demand: f3 with d f3 = f1(m3(a,b,c)) - Phi3(a,b,c)."""
    dga = transfer.dga
    splitting = transfer.splitting
    p = dga.p
    f3 = {}
    degrees = sorted(transfer.f1)
    for n1 in degrees:
        for n2 in degrees:
            for n3 in degrees:
                if n1 + n2 + n3 > transfer.max_degree:
                    continue
                for i1 in range(transfer.h_dim(n1)):
                    for i2 in range(transfer.h_dim(n2)):
                        for i3 in range(transfer.h_dim(n3)):
                            vec = phi3(transfer, n1, i1, n2, i2, n3, i3)
                            cls = transfer.m3.get((n1, i1, n2, i2, n3, i3))
                            target = -vec % p
                            if cls is not None:
                                target = (transfer.f1_vec(n1 + n2 + n3 - 1, cls) - vec) % p
                            u = splitting.boundary_witness(n1 + n2 + n3 - 1, target)
                            if u is None:
                                raise ValueError("f1 m3 - Phi3 failed to bound; window too tight")
                            f3[(n1, i1, n2, i2, n3, i3)] = u
    transfer.f3 = f3
    return f3


def transfer_to_cochain(transfer: AInfinityTransfer, presentation: GradedAlgebraPresentation,
                        iso: dict) -> HochschildCochain:
    """Express m3 as a (3,-1) Hochschild cochain over a presented ring.

    ``iso[n]`` is the matrix taking presentation basis coordinates in
    degree n to class coordinates; it must be invertible degreewise.
    """
    from .exactla import solve_mod

    p = presentation.field.p
    out = HochschildCochain(presentation, 3, -1)
    from .hochschild import CochainSpace

    space = CochainSpace(presentation, 3, -1, out.coefficients)
    for t in space.tuples():
        degs = [presentation.degree(w) for w in t]
        coords = []
        for w, dg in zip(t, degs):
            vec = presentation.to_vector({w: presentation.field(1)}, dg)
            coords.append((iso[dg] @ vec) % p)
        n1, n2, n3 = degs
        acc = np.zeros(transfer.h_dim(sum(degs) - 1), dtype=np.int64)
        for i1, a in enumerate(coords[0]):
            if not a:
                continue
            for i2, b in enumerate(coords[1]):
                if not b:
                    continue
                for i3, c in enumerate(coords[2]):
                    if not c:
                        continue
                    cls = transfer.m3.get((n1, i1, n2, i2, n3, i3))
                    if cls is not None:
                        acc = (acc + int(a) * int(b) * int(c) * cls) % p
        if acc.any():
            vdeg = sum(degs) - 1
            pres_vec = solve_mod(iso[vdeg], acc, p)
            if pres_vec is None:
                raise ValueError(f"class in degree {vdeg} is not in the image of the ring identification")
            elem = presentation.from_vector(pres_vec, vdeg)
            if elem:
                out.values[t] = elem
    return out
