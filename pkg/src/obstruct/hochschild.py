"""The bigraded Hochschild complex of a graded algebra, windowed.

Cochains of arity n and internal degree m are tables on n-tuples of window
basis monomials; the differential is

    (d phi)(l_1, ..., l_{n+1}) = (-1)^{m |l_1|} l_1 phi(l_2, ..., l_{n+1})
        + sum_i (-1)^i phi(..., l_i l_{i+1}, ...)
        + (-1)^{n+1} phi(l_1, ..., l_n) l_{n+1}.

Coboundary questions are decided by exact linear solves restricted to the
window.  Unsolvability of the windowed system is sound for nontriviality
(it is a subsystem of the unwindowed one); solvability is reported as
trivial-up-to-window and is rechecked at an enlarged window by the callers.

When the algebra multiplies monomials to scalar multiples of monomials,
the solve splits into independent blocks along the exponent-lattice key
exp(value) - sum exp(arguments), and only blocks meeting the support of
the right hand side are ever assembled.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .exactla import GF, rank_mod, solve_mod, nullspace_mod
from .graded import (
    AlgebraBimodule,
    ComputedModule,
    Element,
    GradedAlgebraPresentation,
    MappedAlgebraBimodule,
    ModulePresentation,
    Word,
    WindowOverflowError,
)

__all__ = [
    "HochschildCochain",
    "CochainSpace",
    "delta",
    "delta_violations",
    "coboundary_solve",
    "decide_coboundary",
    "ObstructionVerdict",
    "BarWindow",
    "tilde_eval",
    "tilde_inverse",
    "cup",
    "yoneda",
    "gamma_cochain",
    "eta_pullback",
    "kunneth_m3",
    "cup_pairing",
    "realisability_solve",
    "ModuleCochain",
    "random_cochain",
    "random_cocycles",
]


# ---------------------------------------------------------------------------
# Cochains
# ---------------------------------------------------------------------------


class HochschildCochain:
    """A bidegree (n, m) cochain on n-tuples of window basis monomials.

    ``values`` maps tuples of normal-form words to homogeneous coefficient
    elements of degree (sum of input degrees) + m.  Missing tuples are zero.
    The coefficient bimodule defaults to the algebra itself.
    """

    def __init__(self, algebra: GradedAlgebraPresentation, arity: int, internal_degree: int,
                 values: Optional[dict] = None, coefficients=None):
        self.algebra = algebra
        self.arity = arity
        self.internal_degree = internal_degree
        self.coefficients = coefficients if coefficients is not None else AlgebraBimodule(algebra)
        self.values: dict = {}
        if values:
            for t, v in values.items():
                self.set_value(tuple(t), v)

    def set_value(self, t: tuple, v: Element) -> None:
        if len(t) != self.arity:
            raise ValueError(f"tuple arity {len(t)} != {self.arity}")
        if not v:
            self.values.pop(t, None)
            return
        total = sum(self.algebra.degree(w) for w in t)
        vdeg = self.coefficients.coefficients.element_degree(v)
        if vdeg is not None and vdeg != total + self.internal_degree:
            raise ValueError(f"value degree {vdeg} != {total} + {self.internal_degree}")
        self.values[t] = v

    def __call__(self, t: tuple) -> Element:
        return self.values.get(tuple(t), {})

    def eval_linear(self, parts: Sequence[Element]) -> Element:
        """Multilinear extension over tuples of algebra elements."""
        coeff_alg = self.coefficients.coefficients
        out: Element = {}
        stack = [((), self.algebra.field(1))]
        for part in parts:
            stack = [
                (words + (w,), self.algebra._fmul(c, cw))
                for words, c in stack
                for w, cw in part.items()
            ]
        for words, c in stack:
            for w, cv in self(words).items():
                s = coeff_alg._fadd(out.get(w, coeff_alg.field(0)), coeff_alg._fmul(c, cv))
                if s == coeff_alg.field(0):
                    out.pop(w, None)
                else:
                    out[w] = s
        return out

    def is_normalised(self) -> bool:
        return all(() not in t for t in self.values)

    def support_keys(self):
        keys = set()
        km = _KeyMaker(self.algebra, self.coefficients)
        if not km.enabled:
            return None
        for t, v in self.values.items():
            for w in v:
                keys.add(km.key(t, w))
        return keys

    def rebase(self, algebra: GradedAlgebraPresentation, coefficients=None) -> "HochschildCochain":
        """Move the table to another window of the same presentation."""
        coeff = coefficients if coefficients is not None else AlgebraBimodule(algebra)
        space = CochainSpace(algebra, self.arity, self.internal_degree, coeff)
        out = HochschildCochain(algebra, self.arity, self.internal_degree, coefficients=coeff)
        admissible = set(space.tuples())
        for t, v in self.values.items():
            if t in admissible:
                out.set_value(t, v)
        return out

    def add(self, other: "HochschildCochain", scale: int = 1) -> "HochschildCochain":
        alg = self.algebra
        coeff_alg = self.coefficients.coefficients
        out = HochschildCochain(alg, self.arity, self.internal_degree, dict(self.values), self.coefficients)
        for t, v in other.values.items():
            merged = coeff_alg.add(out(t), coeff_alg.scale(v, scale))
            out.values.pop(t, None)
            if merged:
                out.values[t] = merged
        return out

    def to_json(self) -> dict:
        alg = self.algebra
        coeff_alg = self.coefficients.coefficients
        return {
            "arity": self.arity,
            "internal_degree": self.internal_degree,
            "values": [
                {
                    "tuple": [alg.monomial_str(w) for w in t],
                    "value": [{"coeff": int(c), "word": coeff_alg.monomial_str(w)} for w, c in v.items()],
                }
                for t, v in sorted(self.values.items())
            ],
        }


# ---------------------------------------------------------------------------
# Windowed tuple spaces
# ---------------------------------------------------------------------------


class CochainSpace:
    """Admissible tuples for a (n, m) cochain table inside the window.

    A tuple is admissible when every component and the total degree sit in
    the algebra window and the value degree is either materialised in the
    coefficient window or provably zero there.
    """

    def __init__(self, algebra: GradedAlgebraPresentation, arity: int, internal_degree: int,
                 coefficients=None, normalised: bool = False):
        self.algebra = algebra
        self.arity = arity
        self.m = internal_degree
        self.coefficients = coefficients if coefficients is not None else AlgebraBimodule(algebra)
        self.normalised = normalised
        coeff_alg = self.coefficients.coefficients
        self._coeff_nonneg = min(coeff_alg.gen_degrees, default=0) >= 0
        self._alg_nonneg = min(algebra.gen_degrees, default=0) >= 0
        self._tuples: Optional[list] = None
        self._rows: Optional[list] = None
        self._vdim: dict = {}
        # enumerations depend only on the coefficient algebra, so they are
        # shared across bimodules with the same coefficients
        self._cache_key = (arity, internal_degree, normalised, coeff_alg)
        cached = algebra._space_cache.get(self._cache_key)
        if cached is not None:
            self._tuples, self._rows = cached

    # value-space classification at a given total input degree
    def value_dim(self, total: int) -> Optional[int]:
        """Dimension of the value space, or None if unmaterialised."""
        if total in self._vdim:
            return self._vdim[total]
        coeff_alg = self.coefficients.coefficients
        d = total + self.m
        if coeff_alg.window_lo <= d <= coeff_alg.window_hi:
            out = len(coeff_alg.basis(d))
        elif self._coeff_nonneg and d < 0:
            out = 0
        else:
            out = None
        self._vdim[total] = out
        return out

    def degree_ok(self, d: int) -> bool:
        return self.algebra.window_lo <= d <= self.algebra.window_hi

    def tuple_total(self, t: tuple) -> int:
        return sum(self.algebra.degree(w) for w in t)

    def tuple_admissible(self, t: tuple) -> bool:
        total = 0
        for w in t:
            d = self.algebra.degree(w)
            if not self.degree_ok(d):
                return False
            if self.normalised and w == ():
                return False
            total += d
        return self.degree_ok(total) and self.value_dim(total) is not None

    def tuples(self) -> list:
        if self._tuples is not None:
            return self._tuples
        alg = self.algebra
        degs = [d for d in range(alg.window_lo, alg.window_hi + 1) if alg.dim(d)]
        if self.normalised:
            degs = [d for d in degs if d != 0 or any(w != () for w in alg.basis(0))]
        out: list = []

        def rec(prefix_words, total, k):
            if k == self.arity:
                if self.degree_ok(total) and self.value_dim(total) is not None:
                    out.append(tuple(prefix_words))
                return
            remaining = self.arity - k
            for d in degs:
                nt = total + d
                if self._alg_nonneg and nt > alg.window_hi:
                    continue
                for w in alg.basis(d):
                    if self.normalised and w == ():
                        continue
                    prefix_words.append(w)
                    rec(prefix_words, nt, k + 1)
                    prefix_words.pop()

        rec([], 0, 0)
        self._tuples = out
        self.algebra._space_cache[self._cache_key] = (self._tuples, self._rows)
        return out

    def rows(self) -> list:
        """Admissible row tuples (those whose differential stays windowed)."""
        if self._rows is None:
            self._rows = [t for t in self.tuples() if self.row_admissible(t)]
            self.algebra._space_cache[self._cache_key] = (self._tuples, self._rows)
        return self._rows

    def row_admissible(self, t: tuple) -> bool:
        """Every sub-evaluation of the differential at t stays in the window."""
        if not self.tuple_admissible(t):
            return False
        n1 = len(t)
        degrees = [self.algebra.degree(w) for w in t]
        total = sum(degrees)
        # merges keep the total; the merged component must stay materialised
        for i in range(n1 - 1):
            if not self.degree_ok(degrees[i] + degrees[i + 1]):
                return False
        # end drops change the total
        for dropped in (degrees[0], degrees[-1]):
            sub_total = total - dropped
            if self._alg_nonneg and self.degree_ok(sub_total):
                ok = True
            elif self.degree_ok(sub_total):
                ok = True
            else:
                ok = False
            if not ok:
                return False
            if self.value_dim(sub_total) is None:
                return False
        return True


class _KeyMaker:
    """Exponent-lattice block key exp(value) - sum exp(can(argument))."""

    def __init__(self, algebra: GradedAlgebraPresentation, coefficients):
        coeff_alg = coefficients.coefficients
        self.coeff_alg = coeff_alg
        self.enabled = algebra.has_scalar_monomial_products() and coeff_alg.has_scalar_monomial_products()
        self._arg_exp: dict = {}
        if not self.enabled:
            return
        self.algebra = algebra
        self.ngens = len(coeff_alg.generators)
        for d in range(algebra.window_lo, algebra.window_hi + 1):
            for w in algebra.basis(d):
                img = coefficients.map_scalar({w: algebra.field(1)})
                if len(img) == 1:
                    self._arg_exp[w] = coeff_alg.exponents(next(iter(img)))
                elif len(img) == 0:
                    self._arg_exp[w] = None
                else:
                    self.enabled = False
                    return

    def arg_exp(self, w: Word):
        return self._arg_exp.get(w)

    def key(self, t: tuple, value_word: Word):
        total = [0] * self.ngens
        for w in t:
            e = self._arg_exp.get(w)
            if e is None:
                return ("nokey", t)
            for i, x in enumerate(e):
                total[i] += x
        ve = self.coeff_alg.exponents(value_word)
        return tuple(v - s for v, s in zip(ve, total))


# ---------------------------------------------------------------------------
# The differential
# ---------------------------------------------------------------------------


def _delta_terms(alg: GradedAlgebraPresentation, m: int, t: tuple):
    """Symbolic expansion of the differential at an (n+1)-tuple.

    Yields (kind, sub_tuple, data, sign) with kind one of 'lmul'
    (data = left factor word), 'merge' (data = (slot, word, coeff) baked
    into sub_tuple), 'rmul' (data = right factor word).
    """
    n1 = len(t)
    sign_l = -1 if (m % 2) and (alg.degree(t[0]) % 2) else 1
    yield ("lmul", t[1:], t[0], sign_l)
    for i in range(n1 - 1):
        prod = alg.multiply_words(t[i], t[i + 1])
        sign = -1 if (i + 1) % 2 else 1
        for w, c in prod.items():
            sub = t[:i] + (w,) + t[i + 2:]
            yield ("merge", sub, c, sign)
    sign_r = -1 if n1 % 2 else 1
    yield ("rmul", t[:-1], t[-1], sign_r)


def delta_eval(phi: HochschildCochain, t: tuple) -> Element:
    """(d phi)(t) for an (arity+1)-tuple t."""
    alg = phi.algebra
    coeff = phi.coefficients
    coeff_alg = coeff.coefficients
    out: Element = {}

    def acc(elem: Element, scalar):
        nonlocal out
        if scalar != 1:
            elem = coeff_alg.scale(elem, scalar)
        out = coeff_alg.add(out, elem)

    for kind, sub, data, sign in _delta_terms(alg, phi.internal_degree, t):
        val = phi(sub)
        if not val:
            continue
        if kind == "lmul":
            acc(coeff.lmul_word(data, val), sign)
        elif kind == "rmul":
            acc(coeff.rmul_word(val, data), sign)
        else:
            acc(val, alg._fmul(alg.field(sign), data))
    return out


def delta(phi: HochschildCochain) -> HochschildCochain:
    """The Hochschild differential, tabulated on all admissible rows."""
    space = CochainSpace(phi.algebra, phi.arity + 1, phi.internal_degree, phi.coefficients)
    out = HochschildCochain(phi.algebra, phi.arity + 1, phi.internal_degree, coefficients=phi.coefficients)
    for t in space.rows():
        v = delta_eval(phi, t)
        if v:
            out.values[t] = v
    return out


def delta_violations(phi: HochschildCochain) -> list:
    """Rows where d(phi) is nonzero; empty means phi is a windowed cocycle."""
    if not phi.values:
        return []
    space = CochainSpace(phi.algebra, phi.arity + 1, phi.internal_degree, phi.coefficients)
    keys = phi.support_keys()
    km = _KeyMaker(phi.algebra, phi.coefficients) if keys is not None else None
    coeff_alg = phi.coefficients.coefficients
    bad = []
    for t in space.rows():
        if keys is not None:
            # the differential preserves the block key, so rows whose value
            # keys all avoid the support are zero without evaluation
            total = space.tuple_total(t)
            if not any(km.key(t, w) in keys for w in coeff_alg.basis(total + phi.internal_degree)):
                continue
        if delta_eval(phi, t):
            bad.append(t)
    return bad


# ---------------------------------------------------------------------------
# Coboundary solving
# ---------------------------------------------------------------------------


@dataclass
class SolveStats:
    window: tuple
    unknowns: int
    equations: int
    blocks: int
    solved_blocks: int
    failing_block: Optional[dict] = None

    def to_json(self) -> dict:
        out = {
            "window": list(self.window),
            "unknowns": self.unknowns,
            "equations": self.equations,
            "blocks": self.blocks,
            "solved_blocks": self.solved_blocks,
        }
        if self.failing_block:
            out["failing_block"] = self.failing_block
        return out


def coboundary_solve(phi: HochschildCochain, normalised: bool = True,
                     ) -> tuple[Optional[HochschildCochain], SolveStats]:
    """Solve d(g) = phi for g of arity n-1 on the window.

    Returns (witness, stats); witness None means the windowed system is
    inconsistent, which is sound evidence of global nontriviality.  phi
    must be a windowed cocycle.
    """
    alg = phi.algebra
    if not isinstance(alg.field, GF):
        raise TypeError("coboundary solving requires a finite prime field")
    p = alg.field.p
    if phi.arity == 0:
        raise ValueError("0-cochains have no potential")
    if not phi.values:
        zero = HochschildCochain(alg, phi.arity - 1, phi.internal_degree, coefficients=phi.coefficients)
        return zero, SolveStats((alg.window_lo, alg.window_hi), 0, 0, 0, 0)
    if normalised and not phi.is_normalised():
        normalised = False
    coeff = phi.coefficients
    coeff_alg = coeff.coefficients
    g_space = CochainSpace(alg, phi.arity - 1, phi.internal_degree, coeff, normalised)
    row_space = CochainSpace(alg, phi.arity, phi.internal_degree, coeff, normalised)
    km = _KeyMaker(alg, coeff)

    def colkey(t, w):
        return km.key(t, w) if km.enabled else None

    # columns: (tuple, value basis word)
    col_index: dict = {}
    col_blocks: dict = {}
    for t in g_space.tuples():
        total = g_space.tuple_total(t)
        for w in coeff_alg.basis(total + phi.internal_degree):
            col_index[(t, w)] = len(col_index)
            col_blocks.setdefault(colkey(t, w), []).append((t, w))

    needed_keys = phi.support_keys() if km.enabled else None

    rows_by_block: dict = {}
    n_equations = 0
    for t in row_space.rows():
        rhs = phi(t)
        # expand the differential into column contributions, split by value word
        per_value: dict = {}
        for kind, sub, data, sign in _delta_terms(alg, phi.internal_degree, t):
            sub_total = sum(alg.degree(w) for w in sub)
            vdim = g_space.value_dim(sub_total)
            if vdim is None or vdim == 0:
                continue
            if normalised and () in sub:
                continue
            for w in coeff_alg.basis(sub_total + phi.internal_degree):
                if kind == "lmul":
                    moved = coeff.lmul_word(data, {w: coeff_alg.field(1)})
                    scale = sign
                elif kind == "rmul":
                    moved = coeff.rmul_word({w: coeff_alg.field(1)}, data)
                    scale = sign
                else:
                    moved = {w: coeff_alg.field(1)}
                    scale = (sign * data) % p
                col = col_index.get((sub, w))
                if col is None:
                    continue
                for vw, vc in moved.items():
                    entry = per_value.setdefault(vw, {})
                    entry[col] = (entry.get(col, 0) + scale * vc) % p
        row_total = row_space.tuple_total(t)
        for vw in coeff_alg.basis(row_total + phi.internal_degree):
            entries = {c: x for c, x in per_value.get(vw, {}).items() if x % p}
            b = int(rhs.get(vw, 0)) % p
            if not entries and b == 0:
                continue
            key = colkey(t, vw)
            if needed_keys is not None and key not in needed_keys:
                # d preserves the block key, so blocks without rhs support
                # are solved by zero
                continue
            rows_by_block.setdefault(key, []).append((entries, b))
            n_equations += 1

    witness = HochschildCochain(alg, phi.arity - 1, phi.internal_degree, coefficients=coeff)
    n_blocks = 0
    solved = 0
    active_keys = set(rows_by_block)
    if needed_keys is not None:
        active_keys |= set(needed_keys)
    for key in sorted(active_keys, key=repr):
        rows = rows_by_block.get(key, [])
        if not rows:
            continue
        n_blocks += 1
        cols = col_blocks.get(key, []) if km.enabled else list(col_index)
        local = {cw: i for i, cw in enumerate(cols)}
        a = np.zeros((len(rows), len(cols)), dtype=np.int64)
        b = np.zeros(len(rows), dtype=np.int64)
        global_to_local = {col_index[cw]: i for cw, i in local.items()}
        for r, (entries, rhs_c) in enumerate(rows):
            b[r] = rhs_c
            for gcol, coef in entries.items():
                lcol = global_to_local.get(gcol)
                if lcol is None:
                    raise AssertionError("differential left its exponent block")
                a[r, lcol] = coef
        sol = solve_mod(a, b, p)
        if sol is None:
            stats = SolveStats(
                (alg.window_lo, alg.window_hi), len(col_index), n_equations, n_blocks, solved,
                failing_block={
                    "key": repr(key),
                    "rows": len(rows),
                    "cols": len(cols),
                    "rank": rank_mod(a, p),
                    "aug_rank": rank_mod(np.concatenate([a, b.reshape(-1, 1)], axis=1), p),
                },
            )
            return None, stats
        solved += 1
        for (t, w), i in local.items():
            c = int(sol[i]) % p
            if c:
                cur = witness(t)
                merged = coeff_alg.add(cur, {w: c})
                witness.values.pop(t, None)
                if merged:
                    witness.values[t] = merged
    stats = SolveStats((alg.window_lo, alg.window_hi), len(col_index), n_equations, n_blocks, solved)
    return witness, stats


@dataclass
class ObstructionVerdict:
    """NONTRIVIAL is exact; TRIVIAL_UP_TO_WINDOW carries a witness.

    Nontriviality is sound because the windowed coboundary system is a
    subsystem of the unwindowed one; triviality is certified on the window
    and rechecked at the enlarged window before being reported.
    """

    kind: str
    windows: list
    systems: list
    witness: Optional[dict] = None

    @property
    def trivial(self) -> bool:
        return self.kind == "TRIVIAL_UP_TO_WINDOW"

    def to_json(self) -> dict:
        out = {"verdict": self.kind, "windows": self.windows, "systems": [s.to_json() for s in self.systems]}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def decide_coboundary(builder: Callable[[int], HochschildCochain], window: int,
                      stability_step: int = 4, normalised: bool = True) -> ObstructionVerdict:
    """Two-window triviality decision.

    ``builder(W)`` must produce the cochain over a window-W materialisation.
    TRIVIAL_UP_TO_WINDOW requires solvability at both ``window`` and
    ``window + stability_step``; inconsistency at either is NONTRIVIAL.
    """
    windows = [window, window + stability_step]
    systems = []
    witness_json = None
    for i, w in enumerate(windows):
        phi = builder(w)
        bad = delta_violations(phi)
        if bad:
            raise ValueError(f"input is not a cocycle at window {w}: first violation at {bad[0]}")
        witness, stats = coboundary_solve(phi, normalised=normalised)
        systems.append(stats)
        if witness is None:
            return ObstructionVerdict("NONTRIVIAL", windows[: i + 1], systems)
        if i == 0:
            witness_json = witness.to_json()
    return ObstructionVerdict("TRIVIAL_UP_TO_WINDOW", windows, systems, witness_json)


# ---------------------------------------------------------------------------
# Bar window and the tilde translation
# ---------------------------------------------------------------------------


class BarWindow:
    """Windowed graded bar resolution: B_n = algebra^(n+2), truncated by
    total internal degree, with the alternating merge differential."""

    def __init__(self, algebra: GradedAlgebraPresentation, n_max: int):
        self.algebra = algebra
        self.n_max = n_max
        self._basis: dict = {}

    def basis(self, n: int) -> list:
        if n in self._basis:
            return self._basis[n]
        alg = self.algebra
        space = CochainSpace(alg, n + 2, 0, AlgebraBimodule(alg))
        self._basis[n] = space.tuples()
        return self._basis[n]

    def differential(self, t: tuple) -> dict:
        """d_n on a bar basis tuple, as a dict tuple -> coefficient."""
        alg = self.algebra
        out: dict = {}
        n1 = len(t) - 1
        for i in range(n1):
            prod = alg.multiply_words(t[i], t[i + 1])
            sign = -1 if i % 2 else 1
            for w, c in prod.items():
                sub = t[:i] + (w,) + t[i + 2:]
                cur = (out.get(sub, 0) + sign * c) % alg.field.p
                if cur:
                    out[sub] = cur
                else:
                    out.pop(sub, None)
        return out

    def d_squared_violations(self, n: int) -> list:
        bad = []
        for t in self.basis(n):
            acc: dict = {}
            for s, c in self.differential(t).items():
                for s2, c2 in self.differential(s).items():
                    cur = (acc.get(s2, 0) + c * c2) % self.algebra.field.p
                    if cur:
                        acc[s2] = cur
                    else:
                        acc.pop(s2, None)
            if acc:
                bad.append(t)
        return bad


def tilde_eval(phi: HochschildCochain, bar_tuple: tuple) -> Element:
    """Bimodule form of a k-linear cochain on a bar tuple (l_0, ..., l_{s+1}):
    (-1)^{m |l_0|} l_0 phi(l_1, ..., l_s) l_{s+1}."""
    alg = phi.algebra
    coeff = phi.coefficients
    l0, mid, lend = bar_tuple[0], bar_tuple[1:-1], bar_tuple[-1]
    val = phi(mid)
    if not val:
        return {}
    out = coeff.rmul(coeff.lmul({l0: alg.field(1)}, val), {lend: alg.field(1)})
    if (phi.internal_degree % 2) and (alg.degree(l0) % 2):
        out = coeff.coefficients.scale(out, -1)
    return out


def tilde_inverse(barfunc: Callable[[tuple], Element], algebra: GradedAlgebraPresentation,
                  arity: int, internal_degree: int, coefficients=None) -> HochschildCochain:
    """Recover the k-linear cochain: phi(v) = tilde(phi)(1, v, 1)."""
    out = HochschildCochain(algebra, arity, internal_degree, coefficients=coefficients)
    space = CochainSpace(algebra, arity, internal_degree, out.coefficients)
    for t in space.tuples():
        v = barfunc(((),) + t + ((),))
        if v:
            out.values[t] = v
    return out


# ---------------------------------------------------------------------------
# Cup and Yoneda products
# ---------------------------------------------------------------------------


def cup(zeta: HochschildCochain, eta: HochschildCochain) -> HochschildCochain:
    """(zeta u eta)(v_1..v_{m+n}) =
    (-1)^{j (|v_1|+..+|v_m|)} zeta(v_1..v_m) eta(v_{m+1}..v_{m+n})."""
    alg = zeta.algebra
    if eta.algebra is not alg:
        raise ValueError("cup requires cochains over the same algebra")
    m, n = zeta.arity, eta.arity
    j = eta.internal_degree
    out = HochschildCochain(alg, m + n, zeta.internal_degree + j)
    space = CochainSpace(alg, m + n, out.internal_degree, out.coefficients)
    for t in space.tuples():
        left, right = t[:m], t[m:]
        zv = zeta(left)
        if not zv:
            continue
        ev = eta(right)
        if not ev:
            continue
        val = alg.multiply(zv, ev)
        if (j % 2) and (sum(alg.degree(w) for w in left) % 2):
            val = alg.scale(val, -1)
        if val:
            out.values[t] = val
    return out


def yoneda(zeta: HochschildCochain, eta: HochschildCochain, lifting: str = "delta") -> HochschildCochain:
    """Yoneda product through an explicit graded lifting of eta.

    lifting='delta' lifts through the diagonal chain map B -> B (x) B and
    agrees with cup on the nose; lifting='shift' uses the shifted lifting
    (l_0..l_{p+n+1}) -> (-1)^{np} (eta~(l_0..l_n, 1), l_{n+1}, ...), which
    realises the bigraded commutation rule exactly at cochain level.
    """
    alg = zeta.algebra
    if eta.algebra is not alg:
        raise ValueError("yoneda requires cochains over the same algebra")
    m, i = zeta.arity, zeta.internal_degree
    n, j = eta.arity, eta.internal_degree
    one = alg.field(1)

    def bar_value(t: tuple) -> Element:
        # t is a bar tuple of length m + n + 2
        if lifting == "delta":
            # diagonal: keep the summand landing in B_m (x) B_n, apply eta~
            # to the right factor with the Koszul sign, multiply into the
            # last slot, then apply zeta~
            q = m
            left = t[: q + 1]
            right = ((),) + t[q + 1:]
            ev = tilde_eval(eta, right)
            if not ev:
                return {}
            sign = -1 if (j % 2) and (sum(alg.degree(w) for w in left) % 2) else 1
            out: Element = {}
            for w, c in ev.items():
                lifted = left + (w,)
                zv = tilde_eval(zeta, lifted)
                if zv:
                    out = alg.add(out, alg.scale(zv, (sign * c)))
            return out
        if lifting == "shift":
            head = t[: n + 2 - 1] + ((),)
            ev = tilde_eval(eta, head)
            if not ev:
                return {}
            sign = -1 if (n % 2) and (m % 2) else 1
            out = {}
            for w, c in ev.items():
                lifted = (w,) + t[n + 1:]
                zv = tilde_eval(zeta, lifted)
                if zv:
                    out = alg.add(out, alg.scale(zv, sign * c))
            return out
        raise ValueError(f"unknown lifting {lifting!r}")

    return tilde_inverse(bar_value, alg, m + n, i + j)


# ---------------------------------------------------------------------------
# The Gamma map along a flat epimorphism R -> T
# ---------------------------------------------------------------------------


def gamma_cochain(phi: HochschildCochain, target: GradedAlgebraPresentation,
                  can: Callable[[Element], Element]) -> HochschildCochain:
    """Image of an R-cochain on the induced resolution T (x) B(R) (x) T.

    T^e-linear cochains on the induced resolution are exactly R-bimodule
    cochains with coefficients in T pulled back along the canonical map, so
    Gamma(phi) is stored as can . phi in C^{*,*}(R, T).
    """
    coeff = MappedAlgebraBimodule(phi.algebra, target, can)
    out = HochschildCochain(phi.algebra, phi.arity, phi.internal_degree, coefficients=coeff)
    space = CochainSpace(phi.algebra, phi.arity, phi.internal_degree, coeff)
    for t in space.tuples():
        v = phi(t)
        if v:
            img = can(v)
            if img:
                out.values[t] = img
    return out


def eta_pullback(psi_values: Callable[[tuple], Element], source: GradedAlgebraPresentation,
                 target: GradedAlgebraPresentation, can: Callable[[Element], Element],
                 arity: int, internal_degree: int) -> HochschildCochain:
    """Pull a bar-of-T cochain back along the comparison chain map
    eta: T (x) B(R) (x) T -> B(T); on k-linear parts this is psi . can^(x n)."""
    coeff = MappedAlgebraBimodule(source, target, can)
    out = HochschildCochain(source, arity, internal_degree, coefficients=coeff)
    space = CochainSpace(source, arity, internal_degree, coeff)
    for t in space.tuples():
        imgs = [can({w: source.field(1)}) for w in t]
        acc: Element = {}
        stack = [((), 1)]
        for img in imgs:
            stack = [(ws + (w,), (c * cw) % source.field.p) for ws, c in stack for w, cw in img.items()]
        for ws, c in stack:
            v = psi_values(ws)
            if v:
                acc = target.add(acc, target.scale(v, c))
        if acc:
            out.values[t] = acc
    return out


# ---------------------------------------------------------------------------
# Kuenneth combination of secondary multiplications
# ---------------------------------------------------------------------------


def kunneth_m3(m3a: HochschildCochain, m3b: HochschildCochain,
               product: GradedAlgebraPresentation) -> HochschildCochain:
    """Combine secondary multiplications over A and B to one over A (x) B:

    m(x1(x)y1, x2(x)y2, x3(x)y3) = (-1)^{|x3||y1|+|x3||y2|+|x2||y1|}
        m3^A(x1,x2,x3) . y1y2y3  +  x1x2x3 . m3^B(y1,y2,y3).

    ``product`` must be the tensor presentation with the A generators first.
    """
    a, b = m3a.algebra, m3b.algebra
    na = len(a.generators)
    p = product.field.p

    def split(w: Word) -> tuple[Word, Word]:
        wa = tuple(g for g in w if g < na)
        wb = tuple(g - na for g in w if g >= na)
        return wa, wb

    def join(ea: Element, eb: Element) -> Element:
        out: Element = {}
        for wa, ca in ea.items():
            for wb, cb in eb.items():
                w = tuple(wa) + tuple(g + na for g in wb)
                cur = (out.get(w, 0) + ca * cb) % p
                if cur:
                    out[w] = cur
                else:
                    out.pop(w, None)
        return out

    out = HochschildCochain(product, 3, -1)

    def other_triples(alg, bound):
        degs = [d for d in range(0, min(alg.window_hi, bound) + 1) if alg.dim(d)]
        triples = []

        def rec(parts, total, k):
            if k == 3:
                triples.append(tuple(parts))
                return
            for d in degs:
                if total + d > bound:
                    continue
                for w in alg.basis(d):
                    parts.append(w)
                    rec(parts, total + d, k + 1)
                    parts.pop()

        rec([], 0, 0)
        return triples

    acc: dict = {}

    def bump(t, val):
        if not val:
            return
        cur = product.add(acc.get(t, {}), val)
        if cur:
            acc[t] = cur
        else:
            acc.pop(t, None)

    hi = product.window_hi
    # first summand: supported on the m3a support times anything in B
    for (x1, x2, x3), ma in m3a.values.items():
        da = sum(a.degree(x) for x in (x1, x2, x3))
        for (y1, y2, y3) in other_triples(b, hi - da):
            dy = [b.degree(y) for y in (y1, y2, y3)]
            yyy = b.multiply(b.multiply_words(y1, y2), {y3: b.field(1)})
            if not yyy:
                continue
            dx3 = a.degree(x3)
            dx2 = a.degree(x2)
            sign = -1 if (dx3 * dy[0] + dx3 * dy[1] + dx2 * dy[0]) % 2 else 1
            t = tuple(tuple(x) + tuple(g + na for g in y)
                      for x, y in ((x1, y1), (x2, y2), (x3, y3)))
            bump(t, product.scale(join(ma, yyy), sign))
    # second summand: anything in A times the m3b support
    for (y1, y2, y3), mb in m3b.values.items():
        db = sum(b.degree(y) for y in (y1, y2, y3))
        for (x1, x2, x3) in other_triples(a, hi - db):
            xxx = a.multiply(a.multiply_words(x1, x2), {x3: a.field(1)})
            if not xxx:
                continue
            dx = [a.degree(x) for x in (x1, x2, x3)]
            dy = [b.degree(y) for y in (y1, y2, y3)]
            # unshuffle sign plus the Koszul sign for sliding the degree -1
            # map m3^B past x1 x2 x3; this is the unique convention under
            # which the combined table is again a cocycle
            exp = dx[2] * dy[0] + dx[2] * dy[1] + dx[1] * dy[0] + dx[0] + dx[1] + dx[2]
            sign = -1 if exp % 2 else 1
            t = tuple(tuple(x) + tuple(g + na for g in y)
                      for x, y in ((x1, y1), (x2, y2), (x3, y3)))
            bump(t, product.scale(join(xxx, mb), sign))
    for t, val in acc.items():
        out.set_value(t, val)
    return out


# ---------------------------------------------------------------------------
# Cup product pairing and realisability
# ---------------------------------------------------------------------------


class ModuleCochain:
    """Ext-cochain on the induced resolution X (x) B(R) (x) X's ring.

    By right-linearity a value is stored per (module degree, module basis
    index, s-tuple of monomials of the argument ring R); the value is a
    coordinate vector of X in degree d + total + internal_degree.  For a
    local module the argument ring is the un-localised base ring and
    ``embed`` is the canonical map into the module's ring.
    """

    def __init__(self, module: ComputedModule, arity: int, internal_degree: int,
                 arg_algebra: Optional[GradedAlgebraPresentation] = None,
                 embed: Optional[Callable[[Element], Element]] = None):
        self.module = module
        self.arity = arity
        self.internal_degree = internal_degree
        self.arg_algebra = arg_algebra if arg_algebra is not None else module.algebra
        self.embed = embed if embed is not None else (lambda e: e)
        self.values: dict = {}

    def value(self, d: int, x_idx: int, t: tuple) -> Optional[np.ndarray]:
        return self.values.get((d, x_idx, t))

    def to_json(self) -> dict:
        alg = self.arg_algebra
        return {
            "arity": self.arity,
            "internal_degree": self.internal_degree,
            "values": [
                {"degree": d, "basis": x, "tuple": [alg.monomial_str(w) for w in t],
                 "value": [int(c) for c in v]}
                for (d, x, t), v in sorted(self.values.items(), key=repr)
            ],
        }


def cup_pairing(module: ComputedModule, phi: HochschildCochain,
                endo: Optional[dict] = None) -> ModuleCochain:
    """The Ext-cocycle f (x) phi on the bar-type resolution of the module.

    On a basis element (x, l_1..l_s, 1) the value is
    (-1)^{t |x|} f(x) . phi(l_1, ..., l_s); ``endo`` gives f as per-degree
    matrices on module coordinates (identity when omitted).  The arguments
    run over phi's algebra; phi's coefficients must land in the module's
    ring (the induced-resolution setup for localised modules).
    """
    arg = phi.algebra
    if phi.coefficients.coefficients is not module.algebra:
        raise ValueError("cochain values must live in the module's ring")
    p = module.p
    t_deg = phi.internal_degree
    out = ModuleCochain(module, phi.arity, t_deg, arg, phi.coefficients.map_scalar)
    space = CochainSpace(arg, phi.arity, 0, AlgebraBimodule(arg))
    for t in space.tuples():
        val = phi(t)
        if not val:
            continue
        total = sum(arg.degree(w) for w in t)
        for d in range(module.lo, module.hi + 1):
            vd = d + total + t_deg
            if not (module.lo <= vd <= module.hi) or module.dim(vd) == 0:
                continue
            for x_idx in range(module.dim(d)):
                coords = np.zeros(module.dim(d), dtype=np.int64)
                coords[x_idx] = 1
                if endo is not None:
                    coords = (endo[d] @ coords) % p
                _, acted = module.act(d, coords, val)
                if (t_deg % 2) and (d % 2):
                    acted = (-acted) % p
                if acted.any():
                    out.values[(d, x_idx, t)] = acted
    return out


def _action_matrix(module: ComputedModule, d: int, word: Word, cache: dict) -> Optional[np.ndarray]:
    """Matrix of right multiplication by an argument monomial, X_d -> X_{d+|w|}."""
    key = (d, word)
    if key in cache:
        return cache[key]
    arg, embed = cache["__arg__"], cache["__embed__"]
    elem = embed({word: arg.field(1)})
    nd = d + arg.degree(word)
    if not (module.lo <= nd <= module.hi):
        cache[key] = None
        return None
    mat = np.zeros((module.dim(nd), module.dim(d)), dtype=np.int64)
    if elem:
        for x_idx in range(module.dim(d)):
            coords = np.zeros(module.dim(d), dtype=np.int64)
            coords[x_idx] = 1
            _, acted = module.act(d, coords, elem)
            mat[:, x_idx] = acted
    cache[key] = mat
    return mat


def realisability_solve(module: ComputedModule, kappa: ModuleCochain,
                        normalised: bool = True) -> tuple[Optional[dict], SolveStats]:
    """Decide whether kappa bounds in Hom(bar resolution of X, X).

    Unknowns are the right-linear maps g, one value vector per module basis
    element and (s-1)-tuple; the equation at (x at degree d, l_1..l_s) is

      g(x l_1; l_2..l_s) + sum_i (-1)^i g(x; ..l_i l_{i+1}..)
        + (-1)^s g(x; l_1..l_{s-1}) l_s  =  kappa(x; l_1..l_s).

    Arguments run over kappa.arg_algebra and act through kappa.embed.
    """
    alg = kappa.arg_algebra
    embed = kappa.embed
    p = module.p
    s = kappa.arity
    t_deg = kappa.internal_degree
    sub_space = CochainSpace(alg, s - 1, 0, AlgebraBimodule(alg), normalised)
    row_space = CochainSpace(alg, s, 0, AlgebraBimodule(alg), normalised)
    act_cache: dict = {"__arg__": alg, "__embed__": embed}

    col_index: dict = {}
    for t in sub_space.tuples():
        total = sub_space.tuple_total(t)
        for d in range(module.lo, module.hi + 1):
            vd = d + total + t_deg
            if not (module.lo <= vd <= module.hi):
                continue
            if module.dim(d) == 0 or module.dim(vd) == 0:
                continue
            for x_idx in range(module.dim(d)):
                for v_idx in range(module.dim(vd)):
                    col_index[(d, x_idx, t, v_idx)] = len(col_index)

    rows: list = []
    rhs_list: list = []
    for t in row_space.rows():
        total = row_space.tuple_total(t)
        for d in range(module.lo, module.hi + 1):
            vd = d + total + t_deg
            if not (module.lo <= vd <= module.hi):
                continue
            if module.dim(d) == 0 or module.dim(vd) == 0:
                continue
            for x_idx in range(module.dim(d)):
                # per-target-coordinate scalar equations
                per_v: list = [dict() for _ in range(module.dim(vd))]
                # term 1: g((x.l_1); l_2..l_s), same value degree vd
                sub1 = t[1:]
                d1 = d + alg.degree(t[0])
                if not (normalised and () in sub1) and module.lo <= d1 <= module.hi:
                    elem = embed({t[0]: alg.field(1)})
                    if elem:
                        coords = np.zeros(module.dim(d), dtype=np.int64)
                        coords[x_idx] = 1
                        _, acted = module.act(d, coords, elem)
                        for xi, c in enumerate(acted):
                            c = int(c) % p
                            if c == 0:
                                continue
                            for v_idx in range(module.dim(vd)):
                                col = col_index.get((d1, xi, sub1, v_idx))
                                if col is not None:
                                    per_v[v_idx][col] = (per_v[v_idx].get(col, 0) + c) % p
                # merge terms
                for i in range(s - 1):
                    prod = alg.multiply_words(t[i], t[i + 1])
                    sign = -1 if (i + 1) % 2 else 1
                    for w, c in prod.items():
                        subm = t[:i] + (w,) + t[i + 2:]
                        if normalised and () in subm:
                            continue
                        cc = (sign * int(c)) % p
                        if cc == 0:
                            continue
                        for v_idx in range(module.dim(vd)):
                            col = col_index.get((d, x_idx, subm, v_idx))
                            if col is not None:
                                per_v[v_idx][col] = (per_v[v_idx].get(col, 0) + cc) % p
                # term 3: (-1)^s g(x; l_1..l_{s-1}) . l_s
                sub3 = t[:-1]
                if not (normalised and () in sub3):
                    sign = -1 if s % 2 else 1
                    svd = vd - alg.degree(t[-1])
                    if module.lo <= svd <= module.hi and module.dim(svd):
                        mat = _action_matrix(module, svd, t[-1], act_cache)
                        if mat is not None:
                            for v_idx in range(module.dim(vd)):
                                for vp in range(module.dim(svd)):
                                    c = (sign * int(mat[v_idx, vp])) % p
                                    if c == 0:
                                        continue
                                    col = col_index.get((d, x_idx, sub3, vp))
                                    if col is not None:
                                        per_v[v_idx][col] = (per_v[v_idx].get(col, 0) + c) % p
                kval = kappa.value(d, x_idx, t)
                for v_idx in range(module.dim(vd)):
                    entries = {c: x for c, x in per_v[v_idx].items() if x % p}
                    b = int(kval[v_idx]) % p if kval is not None else 0
                    if entries or b:
                        rows.append(entries)
                        rhs_list.append(b)

    a = np.zeros((len(rows), len(col_index)), dtype=np.int64)
    b = np.array(rhs_list, dtype=np.int64)
    for r, entries in enumerate(rows):
        for c, x in entries.items():
            a[r, c] = x
    sol = solve_mod(a, b, p) if len(rows) else np.zeros(len(col_index), dtype=np.int64)
    stats = SolveStats((alg.window_lo, alg.window_hi), len(col_index), len(rows), 1, 1 if sol is not None else 0)
    if sol is None:
        stats.failing_block = {
            "key": None,
            "rows": len(rows),
            "cols": len(col_index),
            "rank": rank_mod(a, p),
            "aug_rank": rank_mod(np.concatenate([a, b.reshape(-1, 1)], axis=1), p),
        }
        return None, stats
    witness = {}
    for (d, x_idx, t, v_idx), col in col_index.items():
        c = int(sol[col]) % p
        if c:
            witness.setdefault((d, x_idx, t), {})[v_idx] = c
    return witness, stats


def realisability_verdict(builder: Callable[[int], tuple[ComputedModule, HochschildCochain]],
                          window: int, stability_step: int = 4,
                          normalised: bool = True) -> ObstructionVerdict:
    """Two-window decision for kappa(X) = id_X cup mu.

    A presentation without relations is free: the obstruction class of a
    free module vanishes and the zero witness certifies it directly, so no
    linear system is solved in that case.
    """
    windows = [window, window + stability_step]
    systems = []
    witness_json = None
    for i, w in enumerate(windows):
        module, mu = builder(w)
        if module.presentation.is_free():
            systems.append(SolveStats((module.lo, module.hi), 0, 0, 0, 0))
            witness_json = {"free_module": True, "witness": {}}
            continue
        kappa = cup_pairing(module, mu)
        witness, stats = realisability_solve(module, kappa, normalised=normalised)
        systems.append(stats)
        if witness is None:
            return ObstructionVerdict("NONTRIVIAL", windows[: i + 1], systems)
        if i == 0:
            alg = module.algebra
            witness_json = {
                "witness": [
                    {"degree": d, "basis": x, "tuple": [alg.monomial_str(w2) for w2 in t],
                     "value": {str(k): v for k, v in val.items()}}
                    for (d, x, t), val in sorted(witness.items(), key=repr)
                ]
            }
    return ObstructionVerdict("TRIVIAL_UP_TO_WINDOW", windows, systems, witness_json)


# ---------------------------------------------------------------------------
# Random cochains (test support)
# ---------------------------------------------------------------------------


def random_cochain(algebra: GradedAlgebraPresentation, arity: int, internal_degree: int,
                   rng, coefficients=None, normalised: bool = False) -> HochschildCochain:
    out = HochschildCochain(algebra, arity, internal_degree, coefficients=coefficients)
    space = CochainSpace(algebra, arity, internal_degree, out.coefficients, normalised)
    coeff_alg = out.coefficients.coefficients
    p = algebra.field.p
    for t in space.tuples():
        total = space.tuple_total(t)
        vals = coeff_alg.basis(total + internal_degree)
        elem = {w: int(rng.integers(0, p)) for w in vals}
        elem = {w: c for w, c in elem.items() if c}
        if elem:
            out.values[t] = elem
    return out


def delta_matrix(algebra: GradedAlgebraPresentation, arity: int, internal_degree: int,
                 coefficients=None, normalised: bool = False):
    """Matrix of the differential from arity to arity+1 on the window.

    Returns (columns, rows, matrix) where columns are (tuple, value word)
    coordinates of the source and rows those of the admissible targets.
    """
    coeff = coefficients if coefficients is not None else AlgebraBimodule(algebra)
    coeff_alg = coeff.coefficients
    p = algebra.field.p
    src = CochainSpace(algebra, arity, internal_degree, coeff, normalised)
    dst = CochainSpace(algebra, arity + 1, internal_degree, coeff, normalised)
    cols = []
    col_index = {}
    for t in src.tuples():
        for w in coeff_alg.basis(src.tuple_total(t) + internal_degree):
            col_index[(t, w)] = len(cols)
            cols.append((t, w))
    rows = []
    row_entries = []
    for t in dst.tuples():
        if not dst.row_admissible(t):
            continue
        per_value: dict = {}
        for kind, sub, data, sign in _delta_terms(algebra, internal_degree, t):
            if normalised and () in sub:
                continue
            sub_total = sum(algebra.degree(w) for w in sub)
            vdim = src.value_dim(sub_total)
            if not vdim:
                continue
            for w in coeff_alg.basis(sub_total + internal_degree):
                col = col_index.get((sub, w))
                if col is None:
                    continue
                if kind == "lmul":
                    moved = coeff.lmul_word(data, {w: coeff_alg.field(1)})
                    scale = sign
                elif kind == "rmul":
                    moved = coeff.rmul_word({w: coeff_alg.field(1)}, data)
                    scale = sign
                else:
                    moved = {w: coeff_alg.field(1)}
                    scale = (sign * data) % p
                for vw, vc in moved.items():
                    entry = per_value.setdefault(vw, {})
                    entry[col] = (entry.get(col, 0) + scale * vc) % p
        for vw in coeff_alg.basis(dst.tuple_total(t) + internal_degree):
            entries = {c: x % p for c, x in per_value.get(vw, {}).items() if x % p}
            rows.append((t, vw))
            row_entries.append(entries)
    mat = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for r, entries in enumerate(row_entries):
        for c, x in entries.items():
            mat[r, c] = x
    return cols, rows, mat


def random_cocycles(algebra: GradedAlgebraPresentation, arity: int, internal_degree: int,
                    rng, count: int, normalised: bool = False) -> list:
    """Random elements of ker(delta) at the given bidegree."""
    cols, _rows, mat = delta_matrix(algebra, arity, internal_degree, normalised=normalised)
    p = algebra.field.p
    basis = nullspace_mod(mat, p)
    out = []
    for _ in range(count):
        if len(basis) == 0:
            vec = np.zeros(len(cols), dtype=np.int64)
        else:
            mix = rng.integers(0, p, size=len(basis))
            vec = (mix @ basis) % p
        phi = HochschildCochain(algebra, arity, internal_degree)
        for (t, w), c in zip(cols, vec):
            if c % p:
                cur = phi.values.setdefault(t, {})
                cur[w] = int(c) % p
        phi.values = {t: v for t, v in phi.values.items() if v}
        out.append(phi)
    return out
