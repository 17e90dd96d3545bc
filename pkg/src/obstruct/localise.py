"""Graded-commutative rings and modules of fractions, graded primes, and
per-prime realisability checks.

Denominators are forced to even degree up front (odd generators of the
multiplicative set are replaced by their squares), so fraction arithmetic
is sign-free:  r/s ~ r'/s'  iff  r s' t = r' s t  for some even t.

The graded spectrum is enumerated only for the supported family: after
killing the homogeneous nilpotent generators the ring must be a polynomial
ring on one generator (or a graded field); anything else needs an
explicitly supplied prime list.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .graded import (
    AlgebraBimodule,
    ComputedModule,
    Element,
    GradedAlgebraPresentation,
    MappedAlgebraBimodule,
    ModulePresentation,
    parse_element,
)
from .hochschild import (
    HochschildCochain,
    ObstructionVerdict,
    SolveStats,
    cup_pairing,
    gamma_cochain,
    realisability_solve,
    realisability_verdict,
)

__all__ = [
    "MultiplicativeSet",
    "LocalisedAlgebra",
    "localise_algebra",
    "localise_module",
    "GradedPrime",
    "graded_primes",
    "local_global_check",
    "localised_realisability_verdict",
]


@dataclass
class MultiplicativeSet:
    """Finitely many homogeneous monomial generators of S.

    Only powers of a single generator of the ambient ring are supported per
    S-generator; odd-degree ones are replaced by their squares to make all
    denominators even (the even reduction S_ev)."""

    algebra: GradedAlgebraPresentation
    generators: list  # list of Elements

    @staticmethod
    def from_strings(algebra: GradedAlgebraPresentation, exprs: Sequence[str]) -> "MultiplicativeSet":
        return MultiplicativeSet(algebra, [parse_element(algebra, s) for s in exprs])

    def even_generators(self) -> list:
        """S_ev: squares replace odd-degree generators; words must be powers
        of a single ring generator."""
        out = []
        for g in self.generators:
            if len(g) != 1:
                raise ValueError("unsupported multiplicative set: generator is not a monomial")
            word = next(iter(g))
            if not word:
                continue  # units change nothing
            if len(set(word)) != 1:
                raise ValueError("unsupported multiplicative set: mixed-letter monomial")
            deg = self.algebra.degree(word)
            if deg % 2:
                word = word + word
            nf = self.algebra.normalise_word(word)
            if nf != {word: self.algebra.field(1)}:
                if not nf:
                    out.append(None)  # nilpotent: collapse marker
                    continue
                raise ValueError("unsupported multiplicative set: square is not a basis monomial")
            out.append(word)
        return out


class LocalisedAlgebra:
    """Ring of fractions S^{-1}R on a symmetric Laurent window.

    The underlying presentation adds one inverse generator per even
    S-generator; ``can`` is the canonical map r -> r/1.  ``collapsed``
    marks the zero ring (an inverted nilpotent)."""

    def __init__(self, base: GradedAlgebraPresentation, sset: MultiplicativeSet, window: int):
        self.base = base
        self.sset = sset
        self.window = window
        even = sset.even_generators()
        self.collapsed = any(w is None for w in even)
        even = [w for w in even if w is not None]
        # nilpotency of s within reach of the window also collapses the ring
        for w in even:
            power = {(): base.field(1)}
            step = {w: base.field(1)}
            total = 0
            while total + base.degree(w) <= base.window_hi:
                power = base.multiply(power, step) if total else dict(step)
                total += base.degree(w)
                if not power:
                    self.collapsed = True
                    break
        self.inverted_words = even
        gens = list(base.generators)
        rules = [(pat, dict(rep)) for pat, rep in base.rules_declared()]
        inv_names = []
        for k, w in enumerate(even):
            name = "inv_" + "_".join(base.gen_names[g] for g in sorted(set(w)))
            if name in [n for n, _ in gens]:
                name = f"{name}_{k}"
            inv_names.append(name)
            gens.append((name, -base.degree(w)))
        n0 = len(base.generators)
        for k, w in enumerate(even):
            u = n0 + k
            rules.append((tuple(w) + (u,), {(): base.field(1)}))
            rules.append(((u,) + tuple(w), {(): base.field(1)}))
        self.algebra = GradedAlgebraPresentation(
            base.field, gens, rules, graded_commutative=base.graded_commutative,
            window=(-window, window),
        )

    def can(self, elem: Element) -> Element:
        """The canonical map r -> r/1 (identity on monomial words)."""
        out: Element = {}
        for w, c in elem.items():
            for w2, c2 in self.algebra.normalise_word(w).items():
                cur = self.algebra._fadd(out.get(w2, self.algebra.field(0)), self.algebra._fmul(c, c2))
                if cur == self.algebra.field(0):
                    out.pop(w2, None)
                else:
                    out[w2] = cur
        return out

    def fraction(self, numerator: Element, denominator_word: tuple) -> Element:
        """r/s for s a product of inverted generators."""
        inv_word = []
        for g in denominator_word:
            # find which inverted word this letter belongs to
            matched = None
            for k, w in enumerate(self.inverted_words):
                if g in w:
                    matched = k
                    break
            if matched is None:
                raise ValueError("denominator is not in the multiplicative set")
        # denominators are powers of inverted words; invert literally
        elem = self.can(numerator)
        n0 = len(self.base.generators)
        for k, w in enumerate(self.inverted_words):
            count = 0
            rest = list(denominator_word)
            # count how many copies of w divide the denominator word
            while len(rest) >= len(w) and all(g in rest for g in w):
                for g in w:
                    rest.remove(g)
                count += 1
            if rest and count:
                raise ValueError("denominator is not a power of an inverted element")
            for _ in range(count):
                elem = self.algebra.multiply(elem, {(n0 + k,): self.algebra.field(1)})
            if count:
                break
        return elem

    def fractions_equal(self, r1: Element, s1: tuple, r2: Element, s2: tuple) -> bool:
        """r1/s1 ~ r2/s2 via the even-denominator relation r1 s2 t = r2 s1 t."""
        lhs = self.base.multiply(r1, {s2: self.base.field(1)})
        rhs = self.base.multiply(r2, {s1: self.base.field(1)})
        if lhs == rhs:
            return True
        # multiply by powers of the inverted words until the window is exhausted
        for w in self.inverted_words:
            t = {w: self.base.field(1)}
            l2, r2_ = lhs, rhs
            while True:
                dl = self.base.element_degree(l2)
                dr = self.base.element_degree(r2_)
                dmax = max(d for d in (dl, dr, 0) if d is not None)
                if dmax + self.base.degree(w) > self.base.window_hi:
                    break
                l2 = self.base.multiply(l2, t)
                r2_ = self.base.multiply(r2_, t)
                if l2 == r2_:
                    return True
        return False


def localise_algebra(base: GradedAlgebraPresentation, sset, window: Optional[int] = None) -> LocalisedAlgebra:
    """Ring of fractions with respect to a multiplicative set.

    ``sset`` may be a MultiplicativeSet, a list of generator expressions, or
    a list of Elements; S = {1} returns a localisation whose algebra is the
    base ring itself (fresh window, identity canonical map)."""
    if window is None:
        window = base.window_hi
    if isinstance(sset, MultiplicativeSet):
        ms = sset
    elif all(isinstance(s, str) for s in sset):
        ms = MultiplicativeSet.from_strings(base, sset)
    else:
        ms = MultiplicativeSet(base, list(sset))
    return LocalisedAlgebra(base, ms, window)


def localise_module(module: ModulePresentation, loc: LocalisedAlgebra) -> ModulePresentation:
    """Same generators and relations over the localised ring."""
    return ModulePresentation(
        loc.algebra,
        list(module.generators),
        [[loc.can(c) if c else {} for c in rel] for rel in module.relations],
    )


# ---------------------------------------------------------------------------
# Graded primes
# ---------------------------------------------------------------------------


@dataclass
class GradedPrime:
    """A graded prime ideal given by monomial generators (generator indices)."""

    algebra: GradedAlgebraPresentation
    generators: list  # list of generator indices
    maximal: bool

    def contains_generator(self, g: int) -> bool:
        return g in self.generators

    def contains(self, word: tuple) -> bool:
        """Membership of a monomial: some letter generates the ideal."""
        return any(g in self.generators for g in word) and bool(word)

    def primality_violations(self) -> list:
        """Exhaustive window probe of ab in p -> a in p or b in p."""
        alg = self.algebra
        bad = []
        degs = [d for d in range(alg.window_lo, alg.window_hi + 1) if alg.dim(d)]
        for da in degs:
            for db in degs:
                if not (alg.window_lo <= da + db <= alg.window_hi):
                    continue
                for wa in alg.basis(da):
                    for wb in alg.basis(db):
                        prod = alg.multiply_words(wa, wb)
                        in_p = all(self.contains(w) for w in prod) if prod else True
                        if in_p and prod and not (self.contains(wa) or self.contains(wb)):
                            bad.append((wa, wb))
        return bad

    def names(self) -> list:
        return [self.algebra.gen_names[g] for g in self.generators]


def _nilpotent_generators(alg: GradedAlgebraPresentation) -> list:
    out = []
    for g, deg in enumerate(alg.gen_degrees):
        if deg == 0:
            continue
        power: Element = {(g,): alg.field(1)}
        total = deg
        nil = False
        while total + deg <= alg.window_hi:
            power = alg.multiply(power, {(g,): alg.field(1)})
            total += deg
            if not power:
                nil = True
                break
        if nil:
            out.append(g)
    return out


def graded_primes(alg: GradedAlgebraPresentation,
                  supplied: Optional[list] = None) -> list:
    """All graded primes for the supported family.

    After quotienting the nilpotent generators the ring must be k (graded
    field) or a polynomial ring on the single remaining generator; outside
    that family a user-supplied list of generator-index lists is required.
    """
    if supplied is not None:
        return [GradedPrime(alg, list(p), bool(m)) for p, m in supplied]
    nil = _nilpotent_generators(alg)
    rest = [g for g in range(len(alg.generators)) if g not in nil and alg.gen_degrees[g] != 0]
    if len(rest) == 0:
        return [GradedPrime(alg, nil, True)]
    if len(rest) > 1:
        raise ValueError("graded spectrum outside the supported family; supply the primes explicitly")
    y = rest[0]
    # verify R / nil is the polynomial ring k[y] on the window
    quotient_rules = [(pat, dict(rep)) for pat, rep in alg.rules_declared()] + [((g,), {}) for g in nil]
    qalg = GradedAlgebraPresentation(alg.field, list(alg.generators), quotient_rules,
                                     alg.graded_commutative, (alg.window_lo, alg.window_hi))
    ydeg = alg.gen_degrees[y]
    for d in range(max(alg.window_lo, 0), alg.window_hi + 1):
        expect = 1 if d % ydeg == 0 else 0
        if qalg.dim(d) != expect:
            raise ValueError("quotient by nilpotents is not a single-variable polynomial ring")
    return [
        GradedPrime(alg, nil, False),
        GradedPrime(alg, nil + [y], True),
    ]


# ---------------------------------------------------------------------------
# Per-prime realisability
# ---------------------------------------------------------------------------


def localised_realisability_verdict(builder: Callable[[int], tuple], window: int,
                                    stability_step: int = 4) -> ObstructionVerdict:
    """Realisability of a localised module against a localised obstruction.

    ``builder(W)`` returns (computed module over S^{-1}R, cochain over R
    with S^{-1}R coefficients); the obstruction is paired through the
    induced resolution X_p (x) B(R) (x) S^{-1}R, so tuples run over R while
    values live in the localised module.
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
        if module.is_zero_module():
            systems.append(SolveStats((module.lo, module.hi), 0, 0, 0, 0))
            witness_json = {"zero_module": True, "witness": {}}
            continue
        kappa = cup_pairing(module, mu)
        witness, stats = realisability_solve(module, kappa)
        systems.append(stats)
        if witness is None:
            return ObstructionVerdict("NONTRIVIAL", windows[: i + 1], systems)
        if i == 0:
            witness_json = {"witness_size": len(witness)}
    return ObstructionVerdict("TRIVIAL_UP_TO_WINDOW", windows, systems, witness_json)


def local_global_check(module: ModulePresentation, mu: Callable[[int], HochschildCochain],
                       window: int, primes: Optional[list] = None,
                       stability_step: int = 4) -> dict:
    """Realisability verdict at every graded prime plus the global verdict.

    Localisation at a prime inverts the even reductions of the generators
    outside the prime; at a maximal ideal of the supported family this is
    the identity localisation.
    """
    alg = module.algebra

    def global_builder(w: int):
        phi = mu(w)
        base_w = phi.algebra
        pres_w = ModulePresentation(base_w, list(module.generators),
                                    [[dict(c) for c in rel] for rel in module.relations])
        return ComputedModule(pres_w), phi

    global_verdict = realisability_verdict(global_builder, window, stability_step)
    if primes is None:
        primes = graded_primes(alg)
    table = []
    for prime in primes:
        complement = [g for g in range(len(alg.generators))
                      if g not in prime.generators and alg.gen_degrees[g] != 0]

        def prime_builder(w: int, complement=complement):
            phi = mu(w)
            base_w = phi.algebra
            pres_w = ModulePresentation(base_w, list(module.generators),
                                        [[dict(c) for c in rel] for rel in module.relations])
            if not complement:
                return ComputedModule(pres_w), phi
            sset = MultiplicativeSet(base_w, [{(g,): base_w.field(1)} for g in complement])
            loc = LocalisedAlgebra(base_w, sset, w)
            mod_p = ComputedModule(localise_module(pres_w, loc))
            mu_p = gamma_cochain(phi, loc.algebra, loc.can)
            return mod_p, mu_p

        verdict = localised_realisability_verdict(prime_builder, window, stability_step)
        table.append({"prime": prime.names(), "maximal": prime.maximal, "verdict": verdict})
    return {"global": global_verdict, "primes": table}
