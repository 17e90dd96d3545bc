"""The acceptance suite: every verdict the package must reproduce, runnable
from pytest (tests/test_acceptance.py) or the command line (obstruct demo).

All arithmetic is exact, so there are no tolerances anywhere; each check
returns pass/fail plus timing and a detail payload.
"""

from __future__ import annotations

import time
from typing import Callable

import numpy as np

from .dgcore import (
    CohomologySplitting,
    FiniteAlgebra,
    FreeBlockMap,
    FreeComplex,
    check_leibniz,
    end_dga as generic_end_dga,
    hom_complex,
    hom_onesided_maps,
    induced_cohomology_map,
    pullback_dga,
    quasi_iso_check,
)
from .exactla import GF, nullspace_mod
from .graded import ComputedModule, GradedAlgebraPresentation, ModulePresentation
from .groupcohom import (
    CyclicGroupData,
    end_associativity_violations,
    end_leibniz_violations,
    m3_cochain,
    mu_G,
    mu_G_tate,
    mu_product,
    perturbed_m3,
    _pipeline,
)
from .hochschild import (
    HochschildCochain,
    coboundary_solve,
    cup,
    delta,
    delta_violations,
    random_cochain,
    random_cocycles,
    realisability_verdict,
    yoneda,
)
from .localise import local_global_check


def _z3_ring(window: int = 8) -> GradedAlgebraPresentation:
    return GradedAlgebraPresentation(GF(3), [("X", 1), ("Y", 2)], [((0, 0), {})],
                                     graded_commutative=True, window=window)


def paper_m3_table(ring: GradedAlgebraPresentation) -> HochschildCochain:
    """m3(X Y^i, X Y^j, X Y^l) = Y^{i+j+l+1}, zero on other monomial triples."""
    out = HochschildCochain(ring, 3, -1)
    top = ring.window_hi
    x, y = 0, 1
    bound = (top - 3) // 2
    for i in range(bound + 1):
        for j in range(bound + 1):
            for l in range(bound + 1):
                if 3 + 2 * (i + j + l) <= top:
                    out.set_value(((x,) + (y,) * i, (x,) + (y,) * j, (x,) + (y,) * l),
                                  {(y,) * (i + j + l + 1): 1})
    return out


def crit_1_delta_squared() -> dict:
    ring = _z3_ring(8)
    rng = np.random.default_rng(101)
    checked = 0
    for _ in range(500):
        arity = int(rng.integers(0, 4))
        m = int(rng.integers(-2, 3))
        phi = random_cochain(ring, arity, m, rng)
        if delta_violations(delta(phi)):
            return {"passed": False, "details": f"delta^2 != 0 at arity {arity}, m {m}"}
        checked += 1
    return {"passed": True, "details": f"{checked} random cochains, arities <= 3, window 8"}


def crit_2_leibniz_associativity() -> dict:
    cases = [(2, 1), (2, 2), (3, 1), (3, 2), (5, 1)]
    for p, n in cases:
        data = CyclicGroupData(p, n, 8)
        lb = end_leibniz_violations(data)
        ab = end_associativity_violations(data)
        if lb or ab:
            return {"passed": False, "details": f"cyclic:{p ** n}: {lb} Leibniz / {ab} assoc violations"}
    return {"passed": True, "details": f"end_dga of cyclic:{{2,4,3,9,5}}, window 8, exhaustive"}


def crit_3_cohomology_ring() -> dict:
    pipe = _pipeline(3, 1, 8)
    dims = {d: pipe.splitting.h_dim(d) for d in range(0, 9)}
    if any(v != 1 for v in dims.values()):
        return {"passed": False, "details": f"H dims {dims}"}
    # X^2 = 0 in H and XY = YX, read through the identification
    xcls = pipe.iso[1][:, 0]
    x2 = pipe.transfer.m2_vec(1, xcls, 1, xcls)
    if x2.any():
        return {"passed": False, "details": "X^2 is nonzero in H*(End)"}
    ycls = pipe.iso[2][:, 0]
    xy = pipe.transfer.m2_vec(1, xcls, 2, ycls)
    yx = pipe.transfer.m2_vec(2, ycls, 1, xcls)
    if ((xy - yx) % 3).any():
        return {"passed": False, "details": "XY != YX in H*(End)"}
    return {"passed": True, "details": "dim H^n = 1 for n <= 8; X^2 = 0; XY = YX; all products match k[X,Y]/(X^2)"}


def crit_4_m3_table() -> dict:
    data = CyclicGroupData(3, 1, 8)
    for w in (8, 12):
        m3 = m3_cochain(data, w)
        if delta_violations(m3):
            return {"passed": False, "details": f"m3 is not a cocycle at window {w}"}
        diff = m3.add(paper_m3_table(m3.algebra), scale=-1)
        witness, _ = coboundary_solve(diff)
        if witness is None:
            return {"passed": False, "details": f"m3 differs from the Y^(i+j+l+1) table by a non-coboundary at window {w}"}
    return {"passed": True, "details": "cocycle; coboundary witnesses to the table at windows 8 and 12"}


def crit_5_cyclic_verdicts() -> dict:
    _, v3 = mu_G(CyclicGroupData(3, 1, 8))
    if v3.kind != "NONTRIVIAL":
        return {"passed": False, "details": f"cyclic:3 gave {v3.kind}"}
    outcomes = {}
    for r, (p, n) in [(2, (2, 1)), (4, (2, 2)), (9, (3, 2)), (5, (5, 1)), (7, (7, 1))]:
        _, v = mu_G(CyclicGroupData(p, n, 8))
        outcomes[r] = v.kind
        if v.kind != "TRIVIAL_UP_TO_WINDOW":
            return {"passed": False, "details": f"cyclic:{r} gave {v.kind}"}
    return {"passed": True, "details": "cyclic:3 NONTRIVIAL; cyclic:{2,4,9,5,7} trivial at windows 8 and 12"}


def crit_6_kunneth() -> dict:
    z2 = CyclicGroupData(2, 1, 8)
    _, v2 = mu_product([z2, z2])
    _, v3 = mu_product([z2, z2, z2])
    ok = v2.kind == "TRIVIAL_UP_TO_WINDOW" and v3.kind == "TRIVIAL_UP_TO_WINDOW"
    return {"passed": ok, "details": f"(Z/2)^2: {v2.kind}, (Z/2)^3: {v3.kind}"}


def crit_7_tate_gamma() -> dict:
    v3 = mu_G_tate(CyclicGroupData(3, 1, 8))
    v9 = mu_G_tate(CyclicGroupData(3, 2, 8))
    ok = v3.kind == "NONTRIVIAL" and v9.kind == "TRIVIAL_UP_TO_WINDOW"
    return {"passed": ok, "details": f"Gamma(mu) on the Tate ring: Z/3 {v3.kind}, Z/9 {v9.kind}"}


def crit_8_realisability() -> dict:
    data = CyclicGroupData(3, 1, 8)

    def builder(gens, rels):
        def build(w):
            phi = m3_cochain(data, w)
            pres = ModulePresentation(phi.algebra, gens, [[dict(c) for c in rel] for rel in rels])
            return ComputedModule(pres), phi
        return build

    x_word = (0,)
    v_free = realisability_verdict(builder([("e", 0)], []), 8)
    if not (v_free.trivial and v_free.witness and v_free.witness.get("witness") == {}):
        return {"passed": False, "details": f"free module: {v_free.kind} witness {v_free.witness}"}
    v_x = realisability_verdict(builder([("e", 0)], [[{x_word: 1}]]), 8)
    if v_x.kind != "NONTRIVIAL":
        return {"passed": False, "details": f"Lambda/(X): {v_x.kind}"}
    v_sum = realisability_verdict(builder([("e", 0), ("f", 0)], [[{x_word: 1}, {}]]), 8)
    if v_sum.kind != v_x.kind:
        return {"passed": False, "details": f"direct sum changed the verdict: {v_sum.kind} vs {v_x.kind}"}
    return {"passed": True, "details": "kappa(free) trivial with zero witness; kappa(Lambda/(X)) NONTRIVIAL; verdict(X + Lambda) = verdict(X)"}


def crit_9_local_global() -> dict:
    data = CyclicGroupData(3, 1, 8)

    def mu(w):
        return m3_cochain(data, w)

    ring = mu(8).algebra
    pres = ModulePresentation(ring, [("e", 0)], [[{(0,): 1}]])
    table = local_global_check(pres, mu, 8)
    prime_kinds = {tuple(r["prime"]): r["verdict"].kind for r in table["primes"]}
    if prime_kinds.get(("X",)) != "NONTRIVIAL" or prime_kinds.get(("X", "Y")) != "NONTRIVIAL":
        return {"passed": False, "details": f"Lambda/(X) prime table {prime_kinds}"}
    rng = np.random.default_rng(9)
    trivial_count = 0
    for k in range(20):
        ngens = int(rng.integers(1, 3))
        gens = [(f"e{i}", int(rng.integers(0, 2))) for i in range(ngens)]
        rels = []
        for _ in range(int(rng.integers(0, 3))):
            rdeg = int(rng.integers(1, 4))
            rel = []
            for _, gd in gens:
                cd = rdeg - gd
                basis = ring.basis(cd) if cd >= 0 else []
                if not basis or rng.integers(0, 2) == 0:
                    rel.append({})
                else:
                    rel.append({basis[int(rng.integers(0, len(basis)))]: int(rng.integers(1, 3))})
            if any(rel):
                rels.append(rel)
        out = local_global_check(ModulePresentation(ring, gens, rels), mu, 8)
        if out["global"].trivial:
            trivial_count += 1
            if not all(r["verdict"].trivial for r in out["primes"]):
                return {"passed": False, "details": f"module {k}: global trivial but a prime is not"}
    return {"passed": True,
            "details": f"Lambda/(X) NONTRIVIAL at (X) and (X,Y); 20 random modules ({trivial_count} globally trivial) satisfy the implication"}


def crit_10_product_identities() -> dict:
    ring = _z3_ring(8)
    rng = np.random.default_rng(10)
    bidegrees = [(1, 0), (1, 1), (2, -1), (2, 0), (1, 2)]
    pool = {bd: random_cocycles(ring, bd[0], bd[1], rng, 12) for bd in bidegrees}
    for k in range(100):
        bd1 = bidegrees[int(rng.integers(0, len(bidegrees)))]
        bd2 = bidegrees[int(rng.integers(0, len(bidegrees)))]
        zeta = pool[bd1][int(rng.integers(0, 12))]
        eta = pool[bd2][int(rng.integers(0, 12))]
        m, i = zeta.arity, zeta.internal_degree
        n, j = eta.arity, eta.internal_degree
        c = cup(zeta, eta)
        if yoneda(zeta, eta, lifting="delta").values != c.values:
            return {"passed": False, "details": f"pair {k}: yoneda(delta) != cup at bidegrees {bd1}, {bd2}"}
        sign = -1 if (m * n + i * j) % 2 else 1
        scaled = {t: ring.scale(v, sign) for t, v in c.values.items()}
        if yoneda(eta, zeta, lifting="shift").values != scaled:
            return {"passed": False, "details": f"pair {k}: yoneda(shift) != signed cup at bidegrees {bd1}, {bd2}"}
    return {"passed": True, "details": "100 random cocycle pairs: both lifting identities hold on every window tuple"}


def crit_11_choice_robustness() -> dict:
    data = CyclicGroupData(3, 1, 8)
    rng = np.random.default_rng(11)
    base12 = m3_cochain(data, 12)
    base8 = m3_cochain(data, 8)
    for k in range(5):
        m12 = perturbed_m3(data, 12, rng)
        if delta_violations(m12):
            return {"passed": False, "details": f"re-selection {k}: m3 is not a cocycle"}
        if coboundary_solve(m12.add(base12, scale=-1))[0] is None:
            return {"passed": False, "details": f"re-selection {k}: difference not a coboundary at window 12"}
        m8 = m12.rebase(base8.algebra)
        if coboundary_solve(m8.add(base8, scale=-1))[0] is None:
            return {"passed": False, "details": f"re-selection {k}: difference not a coboundary at window 8"}
    return {"passed": True, "details": "5 random valid re-selections of f1 change m3 by coboundaries (windows 8 and 12)"}


def zigzag_pullback_data(p: int = 3, r: int = 3):
    """The 4-term complex, its hull, and the one-sided composition maps."""
    algebra = FiniteAlgebra.truncated_polynomial(p, r)
    ranks = {n: 1 for n in range(4)}
    diff = {}
    for n in range(3):
        m = np.zeros((1, 1, r), dtype=np.int64)
        if n % 2 == 0:
            m[0, 0, 1] = 1
        else:
            m[0, 0, r - 1] = (-1) % p
        diff[n] = m
    y = FreeComplex(algebra, 0, 3, ranks, diff)
    yhat = y.direct_sum(y.contractible_hull())
    mats = {}
    for n in range(yhat.lo, yhat.hi + 1):
        m = np.zeros((yhat.rank(n), y.rank(n), algebra.dim), dtype=np.int64)
        for i in range(y.rank(n)):
            m[i, i, algebra.unit_index] = 1
        mats[n] = m
    inc = FreeBlockMap(y, yhat, 0, mats)
    lo, hi = -4, 4
    end_y = generic_end_dga(y, lo, hi, trusted=(0, 1))
    end_h = generic_end_dga(yhat, lo, hi, trusted=(0, 1))
    homc = hom_complex(y, yhat, lo, hi, trusted=(0, 1))
    alpha, beta = hom_onesided_maps(y, yhat, inc, end_y, end_h, homc)
    return end_y, end_h, homc, alpha, beta


def crit_12_pullback() -> dict:
    end_y, end_h, homc, alpha, beta = zigzag_pullback_data()
    p = end_y.p
    if not beta.is_surjective(range(-3, 4)) or not quasi_iso_check(beta, range(-2, 3)):
        return {"passed": False, "details": "beta is not a surjective quasi-isomorphism"}
    x, p1, p2 = pullback_dga(end_y, end_h, homc, alpha, beta)
    if p1.chain_map_violations() or p2.chain_map_violations():
        return {"passed": False, "details": "projections are not chain maps"}
    if check_leibniz(x, (0, 1)):
        return {"passed": False, "details": "pullback fails Leibniz"}
    for d1 in range(0, 2):
        for d2 in range(0, 2 - d1):
            for i in range(x.complex.dim(d1)):
                e1 = np.zeros(x.complex.dim(d1), dtype=np.int64)
                e1[i] = 1
                for j in range(x.complex.dim(d2)):
                    e2 = np.zeros(x.complex.dim(d2), dtype=np.int64)
                    e2[j] = 1
                    prod = x.mult_vec(d1, e1, d2, e2)
                    for proj, dga in ((p1, end_y), (p2, end_h)):
                        lhs = proj.apply(d1 + d2, prod)
                        rhs = dga.mult_vec(d1, proj.apply(d1, e1), d2, proj.apply(d2, e2))
                        if ((lhs - rhs) % p).any():
                            return {"passed": False, "details": "projections are not multiplicative"}
    if not quasi_iso_check(p1, range(-2, 3)):
        return {"passed": False, "details": "p1 is not a quasi-isomorphism"}
    s_x, s_a = CohomologySplitting(x.complex), CohomologySplitting(end_y.complex)
    s_b, s_m = CohomologySplitting(end_h.complex), CohomologySplitting(homc)
    for n in range(-2, 3):
        fa = induced_cohomology_map(alpha, s_a, s_m, n)
        fb = induced_cohomology_map(beta, s_b, s_m, n)
        pb_dim = nullspace_mod(np.concatenate([fa, (-fb) % p], axis=1), p).shape[0]
        if s_x.h_dim(n) != pb_dim:
            return {"passed": False, "details": f"H^{n}(X) = {s_x.h_dim(n)} but the pullback has dimension {pb_dim}"}
    return {"passed": True, "details": "projections are dg maps, p1 is a quasi-isomorphism, H*(X) is the cohomology pullback"}


CRITERIA: list[tuple[str, str, float, Callable[[], dict]]] = [
    ("1", "delta^2 = 0 on 500 random cochains over k[X,Y]/(X^2) char 3", 5.0, crit_1_delta_squared),
    ("2", "Leibniz + associativity for end_dga of cyclic:{2,4,3,9,5}", 10.0, crit_2_leibniz_associativity),
    ("3", "H*(End) of cyclic:3 matches k[X,Y]/(X^2)", 60.0, crit_3_cohomology_ring),
    ("4", "m3 of cyclic:3 is a (3,-1)-cocycle matching the Y^(i+j+l+1) table up to coboundary", 30.0, crit_4_m3_table),
    ("5", "class verdicts for cyclic:{3,2,4,9,5,7} at windows 8 and 12", 60.0, crit_5_cyclic_verdicts),
    ("6", "Kuenneth verdicts for (Z/2)^2 and (Z/2)^3", 60.0, crit_6_kunneth),
    ("7", "Tate verdicts via Gamma for Z/3 and Z/9", 60.0, crit_7_tate_gamma),
    ("8", "realisability: free trivial, Lambda/(X) nontrivial, direct-sum additivity", 30.0, crit_8_realisability),
    ("9", "local-global realisability table and 20 random modules", 60.0, crit_9_local_global),
    ("10", "yoneda = cup identities, literal, 100 random cocycle pairs", 30.0, crit_10_product_identities),
    ("11", "m3 changes by a coboundary under 5 cycle re-selections", 60.0, crit_11_choice_robustness),
    ("12", "pullback dg algebra along a surjective quasi-isomorphism", 5.0, crit_12_pullback),
]


def run_criterion(cid: str) -> dict:
    for c, desc, budget, fn in CRITERIA:
        if c == cid:
            start = time.time()
            out = fn()
            out.update({"id": c, "description": desc, "elapsed": round(time.time() - start, 3),
                        "budget_seconds": budget})
            out["within_budget"] = out["elapsed"] <= budget
            return out
    raise KeyError(cid)


def run_all(jobs: int = 1) -> list:
    ids = [c for c, *_ in CRITERIA]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(run_criterion, ids))
    return [run_criterion(c) for c in ids]
