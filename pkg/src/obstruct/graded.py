"""Graded vector spaces, graded maps, and finitely presented graded algebras.

An algebra is presented by generators with degrees and rewriting rules that
send words in the generators to linear combinations of words.  Normal forms
are the rule-free words; the per-degree monomial basis is materialised
lazily inside a degree window, so infinite dimensional algebras such as
k[X,Y]/(X^2) are handled one degree at a time.

Every sign in this file comes from the Koszul rule
(f (x) g)(m (x) n) = (-1)^{|g||m|} f(m) (x) g(n).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .exactla import GF, QQ

__all__ = [
    "WindowOverflowError",
    "GradedVectorSpace",
    "GradedMap",
    "tensor_space",
    "tensor_map",
    "GradedAlgebraPresentation",
    "tensor_algebra",
    "AlgebraBimodule",
    "MappedAlgebraBimodule",
    "shift_bimodule",
    "ModulePresentation",
    "ComputedModule",
    "parse_element",
]

Word = tuple[int, ...]
Element = dict  # Word -> coefficient


class WindowOverflowError(Exception):
    """An operation left the materialised degree window."""


# ---------------------------------------------------------------------------
# Graded vector spaces and maps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GradedVectorSpace:
    """Basis labels per degree on a finite degree window."""

    lo: int
    hi: int
    basis: dict

    def dim(self, d: int) -> int:
        return len(self.basis.get(d, ()))

    def labels(self, d: int) -> tuple:
        return self.basis.get(d, ())

    def degrees(self) -> range:
        return range(self.lo, self.hi + 1)

    def total_dim(self) -> int:
        return sum(self.dim(d) for d in self.degrees())


@dataclass(frozen=True)
class GradedMap:
    """Degree-homogeneous linear map, one matrix per source degree.

    ``matrices[d]`` has shape (dim target(d + degree), dim source(d)) and
    acts on column vectors.
    """

    degree: int
    source: GradedVectorSpace
    target: GradedVectorSpace
    matrices: dict

    def matrix(self, d: int) -> np.ndarray:
        m = self.matrices.get(d)
        if m is None:
            return np.zeros((self.target.dim(d + self.degree), self.source.dim(d)), dtype=np.int64)
        return m

    def apply(self, d: int, vec: np.ndarray, p: int) -> np.ndarray:
        return (self.matrix(d) @ vec) % p


def tensor_space(v: GradedVectorSpace, w: GradedVectorSpace) -> GradedVectorSpace:
    lo, hi = v.lo + w.lo, v.hi + w.hi
    basis = {}
    for d in range(lo, hi + 1):
        labels = []
        for dv in v.degrees():
            dw = d - dv
            if w.lo <= dw <= w.hi:
                labels.extend((a, b) for a in v.labels(dv) for b in w.labels(dw))
        if labels:
            basis[d] = tuple(labels)
    return GradedVectorSpace(lo, hi, basis)


def tensor_map(f: GradedMap, g: GradedMap, p: int) -> GradedMap:
    """Koszul-signed tensor product: (f(x)g)(m(x)n) = (-1)^{|g||m|} f(m)(x)g(n)."""
    src = tensor_space(f.source, g.source)
    tgt = tensor_space(f.target, g.target)
    deg = f.degree + g.degree
    mats = {}
    for d in src.degrees():
        sdim = src.dim(d)
        tdim = tgt.dim(d + deg)
        if sdim == 0 or tdim == 0:
            continue
        tgt_index = {lab: i for i, lab in enumerate(tgt.labels(d + deg))}
        mat = np.zeros((tdim, sdim), dtype=np.int64)
        col = 0
        for dv in f.source.degrees():
            dw = d - dv
            if not (g.source.lo <= dw <= g.source.hi):
                continue
            fm = f.matrix(dv)
            gm = g.matrix(dw)
            sign = -1 if (g.degree % 2) and (dv % 2) else 1
            for a_i, _a in enumerate(f.source.labels(dv)):
                for b_i, _b in enumerate(g.source.labels(dw)):
                    for ta_i, ta in enumerate(f.target.labels(dv + f.degree)):
                        ca = int(fm[ta_i, a_i])
                        if ca == 0:
                            continue
                        for tb_i, tb in enumerate(g.target.labels(dw + g.degree)):
                            cb = int(gm[tb_i, b_i])
                            if cb == 0:
                                continue
                            mat[tgt_index[(ta, tb)], col] = (mat[tgt_index[(ta, tb)], col] + sign * ca * cb) % p
                    col += 1
        mats[d] = mat % p
    return GradedMap(deg, src, tgt, mats)


# ---------------------------------------------------------------------------
# Algebra presentations
# ---------------------------------------------------------------------------

_BASIS_CAP = 4096
_REWRITE_CAP = 100_000


class GradedAlgebraPresentation:
    """Graded algebra given by generators, degrees and rewriting rules.

    Rules map a word (tuple of generator indices) to a linear combination of
    words; normalisation applies the first matching rule at the leftmost
    position until no rule matches.  If ``graded_commutative`` is set,
    sorting rules g_j g_i -> (-1)^{|g_i||g_j|} g_i g_j (for j declared after
    i) are appended, together with g^2 -> 0 for odd-degree generators in odd
    characteristic, which graded commutativity forces.
    """

    def __init__(
        self,
        field: Union[GF, type(QQ)],
        generators: Sequence[tuple[str, int]],
        rules: Sequence[tuple[Word, Element]] = (),
        graded_commutative: bool = False,
        window: Union[int, tuple[int, int]] = 12,
    ):
        self.field = field
        self.generators = list(generators)
        self.gen_names = [n for n, _ in generators]
        self.gen_degrees = [d for _, d in generators]
        self.name_index = {n: i for i, (n, _) in enumerate(generators)}
        if isinstance(window, int):
            # symmetric Laurent window when any generator has negative degree
            if min(self.gen_degrees, default=0) < 0:
                window = (-window, window)
            else:
                window = (0, window)
        self.window_lo, self.window_hi = window
        self.graded_commutative = graded_commutative
        self.rules: list[tuple[Word, Element]] = [(tuple(pat), dict(rep)) for pat, rep in rules]
        if graded_commutative:
            self.rules.extend(self._commutation_rules())
        self._nf_memo: dict[Word, Element] = {}
        self._deg_memo: dict[Word, int] = {}
        self._mul_memo: dict[tuple, Element] = {}
        self._space_cache: dict = {}
        self._basis: dict[int, list[Word]] = {}
        self._basis_built = False
        self._scalar_products: Optional[bool] = None

    # -- construction helpers

    def _commutation_rules(self) -> list[tuple[Word, Element]]:
        out = []
        for j in range(len(self.generators)):
            for i in range(j):
                sign = -1 if (self.gen_degrees[i] % 2) and (self.gen_degrees[j] % 2) else 1
                out.append(((j, i), {(i, j): self.field(sign)}))
        if self.field.characteristic != 2:
            for i, d in enumerate(self.gen_degrees):
                if d % 2:
                    out.append(((i, i), {}))
        return out

    def degree(self, word: Word) -> int:
        d = self._deg_memo.get(word)
        if d is None:
            d = sum(self.gen_degrees[g] for g in word)
            self._deg_memo[word] = d
        return d

    # -- normal forms

    def normalise_word(self, word: Word) -> Element:
        memo = self._nf_memo
        known = memo.get(word)
        if known is not None:
            return dict(known)
        result: Element = {}
        pending: list[tuple[Word, object]] = [(word, self.field(1))]
        steps = 0
        while pending:
            w, coeff = pending.pop()
            steps += 1
            if steps > _REWRITE_CAP:
                raise RuntimeError(f"rewriting did not terminate on {word}")
            hit = None
            for pos in range(len(w)):
                for pat, rep in self.rules:
                    if w[pos : pos + len(pat)] == pat:
                        hit = (pos, pat, rep)
                        break
                if hit:
                    break
            if hit is None:
                result[w] = self._fadd(result.get(w, self.field(0)), coeff)
                continue
            pos, pat, rep = hit
            head, tail = w[:pos], w[pos + len(pat):]
            for rw, rc in rep.items():
                pending.append((head + rw + tail, self._fmul(coeff, rc)))
        out = {w: c for w, c in result.items() if c != self.field(0)}
        memo[word] = dict(out)
        return out

    def _fadd(self, a, b):
        if isinstance(self.field, GF):
            return (a + b) % self.field.p
        return a + b

    def _fmul(self, a, b):
        if isinstance(self.field, GF):
            return (a * b) % self.field.p
        return a * b

    def scale(self, elem: Element, c) -> Element:
        c = self.field(c)
        return {w: self._fmul(v, c) for w, v in elem.items() if self._fmul(v, c) != self.field(0)}

    def add(self, a: Element, b: Element) -> Element:
        out = dict(a)
        for w, c in b.items():
            s = self._fadd(out.get(w, self.field(0)), c)
            if s == self.field(0):
                out.pop(w, None)
            else:
                out[w] = s
        return out

    def element_degree(self, elem: Element) -> Optional[int]:
        it = iter(elem)
        first = next(it, None)
        if first is None:
            return None
        d = self.degree(first)
        for w in it:
            if self.degree(w) != d:
                raise ValueError(f"inhomogeneous element with degrees {d} and {self.degree(w)}")
        return d

    def multiply(self, a: Element, b: Element) -> Element:
        """Product of two homogeneous elements in monomial normal form."""
        da, db = self.element_degree(a), self.element_degree(b)
        if da is not None and db is not None and not (self.window_lo <= da + db <= self.window_hi):
            raise WindowOverflowError(f"product degree {da + db} outside window [{self.window_lo}, {self.window_hi}]")
        out: Element = {}
        zero = self.field(0)
        for wa, ca in a.items():
            for wb, cb in b.items():
                cab = self._fmul(ca, cb)
                for w, c in self.multiply_words(wa, wb).items():
                    s = self._fadd(out.get(w, zero), self._fmul(cab, c))
                    if s == zero:
                        out.pop(w, None)
                    else:
                        out[w] = s
        return out

    def multiply_words(self, wa: Word, wb: Word) -> Element:
        """Memoised monomial product; treat the returned dict as immutable."""
        key = (wa, wb)
        out = self._mul_memo.get(key)
        if out is None:
            da, db = self.degree(wa), self.degree(wb)
            if not (self.window_lo <= da + db <= self.window_hi):
                raise WindowOverflowError(
                    f"product degree {da + db} outside window [{self.window_lo}, {self.window_hi}]")
            out = self.normalise_word(wa + wb)
            self._mul_memo[key] = out
        return out

    @property
    def one(self) -> Element:
        return {(): self.field(1)}

    def gen_element(self, name: str, power: int = 1) -> Element:
        idx = self.name_index[name]
        return self.normalise_word((idx,) * power)

    # -- windowed monomial basis

    def _build_basis(self) -> None:
        if self._basis_built:
            return
        lo, hi = self.window_lo, self.window_hi
        basis: dict[int, list[Word]] = {d: [] for d in range(lo, hi + 1)}
        seen = set()
        queue: list[Word] = []
        if lo <= 0 <= hi:
            basis[0].append(())
            seen.add(())
            queue.append(())
        while queue:
            w = queue.pop()
            d = self.degree(w)
            for g, gd in enumerate(self.gen_degrees):
                nd = d + gd
                if not (lo <= nd <= hi):
                    continue
                for term in self.normalise_word(w + (g,)):
                    if term not in seen:
                        seen.add(term)
                        basis[self.degree(term)].append(term)
                        queue.append(term)
                        if len(seen) > _BASIS_CAP:
                            raise RuntimeError("monomial basis exceeds cap; window too large?")
        for d in basis:
            basis[d].sort()
        self._basis = basis
        self._basis_built = True

    def basis(self, d: int) -> list[Word]:
        if not (self.window_lo <= d <= self.window_hi):
            return []
        self._build_basis()
        return self._basis[d]

    def dim(self, d: int) -> int:
        return len(self.basis(d))

    def space(self) -> GradedVectorSpace:
        self._build_basis()
        return GradedVectorSpace(self.window_lo, self.window_hi, {d: tuple(b) for d, b in self._basis.items() if b})

    def basis_index(self, d: int) -> dict:
        return {w: i for i, w in enumerate(self.basis(d))}

    def to_vector(self, elem: Element, d: int) -> np.ndarray:
        idx = self.basis_index(d)
        vec = np.zeros(len(idx), dtype=np.int64)
        for w, c in elem.items():
            vec[idx[w]] = c
        return vec

    def from_vector(self, vec: Iterable, d: int) -> Element:
        out = {}
        for w, c in zip(self.basis(d), vec):
            c = self.field(int(c)) if isinstance(self.field, GF) else self.field(c)
            if c != self.field(0):
                out[w] = c
        return out

    # -- structural probes

    def exponents(self, word: Word) -> tuple[int, ...]:
        e = [0] * len(self.generators)
        for g in word:
            e[g] += 1
        return tuple(e)

    def has_scalar_monomial_products(self) -> bool:
        """True if every product of window basis monomials is coeff * monomial
        with added exponent vectors.  Enables exponent-block decompositions."""
        if self._scalar_products is None:
            ok = True
            degs = [d for d in range(self.window_lo, self.window_hi + 1) if self.dim(d)]
            for da in degs:
                for db in degs:
                    if not (self.window_lo <= da + db <= self.window_hi):
                        continue
                    for wa in self.basis(da):
                        for wb in self.basis(db):
                            prod = self.normalise_word(wa + wb)
                            if len(prod) > 1:
                                ok = False
                            elif prod:
                                w = next(iter(prod))
                                if self.exponents(w) != tuple(
                                    x + y for x, y in zip(self.exponents(wa), self.exponents(wb))
                                ):
                                    ok = False
                            if not ok:
                                break
                        if not ok:
                            break
                    if not ok:
                        break
                if not ok:
                    break
            self._scalar_products = ok
        return self._scalar_products

    def check_associativity(self, max_total: Optional[int] = None) -> list[tuple]:
        """All window basis triples violating (ab)c = a(bc); empty means pass."""
        hi = self.window_hi if max_total is None else max_total
        bad = []
        degs = [d for d in range(self.window_lo, self.window_hi + 1) if self.dim(d)]
        for da in degs:
            for db in degs:
                for dc in degs:
                    if not (self.window_lo <= da + db + dc <= hi):
                        continue
                    if not (self.window_lo <= da + db <= self.window_hi):
                        continue
                    if not (self.window_lo <= db + dc <= self.window_hi):
                        continue
                    for wa in self.basis(da):
                        for wb in self.basis(db):
                            ab = self.multiply_words(wa, wb)
                            for wc in self.basis(dc):
                                left = self.multiply(ab, {wc: self.field(1)})
                                right = self.multiply({wa: self.field(1)}, self.multiply_words(wb, wc))
                                if left != right:
                                    bad.append((wa, wb, wc))
        return bad

    def check_graded_commutative(self) -> list[tuple]:
        """Window basis pairs violating ab = (-1)^{|a||b|} ba."""
        bad = []
        degs = [d for d in range(self.window_lo, self.window_hi + 1) if self.dim(d)]
        for da in degs:
            for db in degs:
                if not (self.window_lo <= da + db <= self.window_hi):
                    continue
                for wa in self.basis(da):
                    for wb in self.basis(db):
                        ab = self.multiply_words(wa, wb)
                        ba = self.multiply_words(wb, wa)
                        sign = -1 if (da % 2) and (db % 2) else 1
                        if ab != self.scale(ba, sign):
                            bad.append((wa, wb))
        return bad

    def check_unit(self) -> bool:
        for d in range(self.window_lo, self.window_hi + 1):
            for w in self.basis(d):
                if self.multiply_words((), w) != {w: self.field(1)}:
                    return False
                if self.multiply_words(w, ()) != {w: self.field(1)}:
                    return False
        return True

    # -- derived algebras

    def opposite(self) -> "GradedAlgebraPresentation":
        """Opposite algebra r *op* r' = (-1)^{|r||r'|} r'r.

        Graded-commutative algebras are their own opposite; otherwise the
        rules are reversed with the reversing Koszul sign.
        """
        if self.graded_commutative:
            return self
        if isinstance(self.field, GF):
            sgn = lambda s: self.field(-1) if s else self.field(1)
        else:
            sgn = lambda s: self.field(-1 if s else 1)

        def reverse_sign(word: Word) -> bool:
            # parity of sum_{a<b} |w_a||w_b|
            total = 0
            for a in range(len(word)):
                for b in range(a + 1, len(word)):
                    total += self.gen_degrees[word[a]] * self.gen_degrees[word[b]]
            return total % 2 == 1

        rules = []
        for pat, rep in self.rules:
            new_rep = {}
            for w, c in rep.items():
                s = self._fmul(c, sgn(reverse_sign(pat) != reverse_sign(w)))
                new_rep[tuple(reversed(w))] = s
            rules.append((tuple(reversed(pat)), new_rep))
        return GradedAlgebraPresentation(
            self.field, list(self.generators), rules, False, (self.window_lo, self.window_hi)
        )

    def enveloping(self) -> "GradedAlgebraPresentation":
        """The enveloping algebra A^op (x) A.

        Generators are the op-side copies followed by the plain copies;
        tensor factors past each other pick up (-1)^{|r'||s|}.
        """
        n = len(self.generators)
        gens = [(f"{name}.op", d) for name, d in self.generators] + list(self.generators)
        op = self.opposite()
        rules: list[tuple[Word, Element]] = []
        for pat, rep in op.rules:
            rules.append((pat, dict(rep)))
        for pat, rep in self.rules:
            rules.append((tuple(g + n for g in pat), {tuple(g + n for g in w): c for w, c in rep.items()}))
        for i in range(n):  # plain copy letter
            for j in range(n):  # op copy letter
                sign = -1 if (self.gen_degrees[i] % 2) and (self.gen_degrees[j] % 2) else 1
                rules.append(((i + n, j), {(j, i + n): self.field(sign)}))
        return GradedAlgebraPresentation(
            self.field, gens, rules, False, (2 * self.window_lo, self.window_hi)
        )

    # -- serialisation

    def to_json(self) -> dict:
        return {
            "char": self.field.characteristic,
            "generators": [{"name": n, "degree": d} for n, d in self.generators],
            "relations": [
                {
                    "pattern": [self.gen_names[g] for g in pat],
                    "result": [
                        {"coeff": int(c) if isinstance(self.field, GF) else str(c),
                         "word": [self.gen_names[g] for g in w]}
                        for w, c in rep.items()
                    ],
                }
                for pat, rep in self.rules_declared()
            ],
            "graded_commutative": self.graded_commutative,
            "window": [self.window_lo, self.window_hi],
        }

    def rules_declared(self) -> list[tuple[Word, Element]]:
        if not self.graded_commutative:
            return self.rules
        return self.rules[: len(self.rules) - len(self._commutation_rules())]

    @staticmethod
    def from_json(data: dict) -> "GradedAlgebraPresentation":
        char = data["char"]
        field = GF(char) if char else QQ
        gens = [(g["name"], g["degree"]) for g in data["generators"]]
        name_index = {n: i for i, (n, _) in enumerate(gens)}
        rules = []
        for rel in data.get("relations", []):
            pat = tuple(name_index[n] for n in rel["pattern"])
            rep = {}
            for term in rel["result"]:
                rep[tuple(name_index[n] for n in term["word"])] = field(term["coeff"])
            rules.append((pat, rep))
        window = data.get("window", 12)
        if isinstance(window, list):
            window = tuple(window)
        return GradedAlgebraPresentation(field, gens, rules, data.get("graded_commutative", False), window)

    def monomial_str(self, word: Word) -> str:
        if not word:
            return "1"
        out = []
        i = 0
        while i < len(word):
            j = i
            while j < len(word) and word[j] == word[i]:
                j += 1
            name = self.gen_names[word[i]]
            out.append(name if j - i == 1 else f"{name}^{j - i}")
            i = j
        return "*".join(out)

    def element_str(self, elem: Element) -> str:
        if not elem:
            return "0"
        return " + ".join(
            (f"{c}*" if c != self.field(1) else "") + self.monomial_str(w) for w, c in sorted(elem.items())
        )


def tensor_algebra(a: GradedAlgebraPresentation, b: GradedAlgebraPresentation,
                   window: Optional[tuple[int, int]] = None) -> GradedAlgebraPresentation:
    """A (x) B with (a (x) s)(a' (x) s') = (-1)^{|a'||s|}(aa' (x) ss')."""
    if a.field != b.field:
        raise ValueError("mismatched coefficient fields")
    n = len(a.generators)
    gens = [(f"{name}", d) for name, d in a.generators] + [(name, d) for name, d in b.generators]
    names = [g for g, _ in gens]
    if len(set(names)) != len(names):
        gens = [(f"{name}@1", d) for name, d in a.generators] + [(f"{name}@2", d) for name, d in b.generators]
    rules: list[tuple[Word, Element]] = []
    for pat, rep in a.rules:
        rules.append((pat, dict(rep)))
    for pat, rep in b.rules:
        rules.append((tuple(g + n for g in pat), {tuple(g + n for g in w): c for w, c in rep.items()}))
    for i in range(n):
        for j in range(len(b.generators)):
            sign = -1 if (a.gen_degrees[i] % 2) and (b.gen_degrees[j] % 2) else 1
            rules.append(((j + n, i), {(i, j + n): a.field(sign)}))
    if window is None:
        window = (a.window_lo + b.window_lo, max(a.window_hi, b.window_hi))
    return GradedAlgebraPresentation(a.field, gens, rules, False, window)


# ---------------------------------------------------------------------------
# Bimodules
# ---------------------------------------------------------------------------


class AlgebraBimodule:
    """The algebra as a bimodule over itself."""

    def __init__(self, algebra: GradedAlgebraPresentation):
        self.algebra = algebra
        self.coefficients = algebra

    def basis(self, d: int) -> list:
        return self.coefficients.basis(d)

    def lmul(self, r: Element, x: Element) -> Element:
        return self.coefficients.multiply(r, x)

    def rmul(self, x: Element, r: Element) -> Element:
        return self.coefficients.multiply(x, r)

    def lmul_word(self, w: Word, x: Element) -> Element:
        alg = self.coefficients
        out: Element = {}
        zero = alg.field(0)
        for xw, c in x.items():
            for ww, cc in alg.multiply_words(w, xw).items():
                s = alg._fadd(out.get(ww, zero), alg._fmul(c, cc))
                if s == zero:
                    out.pop(ww, None)
                else:
                    out[ww] = s
        return out

    def rmul_word(self, x: Element, w: Word) -> Element:
        alg = self.coefficients
        out: Element = {}
        zero = alg.field(0)
        for xw, c in x.items():
            for ww, cc in alg.multiply_words(xw, w).items():
                s = alg._fadd(out.get(ww, zero), alg._fmul(c, cc))
                if s == zero:
                    out.pop(ww, None)
                else:
                    out[ww] = s
        return out

    def map_scalar(self, r: Element) -> Element:
        return r


class MappedAlgebraBimodule:
    """A target algebra T viewed as a bimodule over R along a map on monomials.

    ``can`` sends an R-element to a T-element; both actions go through it.
    """

    def __init__(self, source: GradedAlgebraPresentation, target: GradedAlgebraPresentation, can):
        self.algebra = source
        self.coefficients = target
        self.can = can
        self._can_word: dict = {}

    def basis(self, d: int) -> list:
        return self.coefficients.basis(d)

    def _word_image(self, w: Word) -> Element:
        img = self._can_word.get(w)
        if img is None:
            img = self.can({w: self.algebra.field(1)})
            self._can_word[w] = img
        return img

    def lmul(self, r: Element, x: Element) -> Element:
        return self.coefficients.multiply(self.can(r), x)

    def rmul(self, x: Element, r: Element) -> Element:
        return self.coefficients.multiply(x, self.can(r))

    def lmul_word(self, w: Word, x: Element) -> Element:
        return self.coefficients.multiply(self._word_image(w), x)

    def rmul_word(self, x: Element, w: Word) -> Element:
        return self.coefficients.multiply(x, self._word_image(w))

    def map_scalar(self, r: Element) -> Element:
        return self.can(r)


class _ShiftedBimodule:
    """t-fold shift: right action unchanged, left action signed (-1)^{t|r|}."""

    def __init__(self, base, t: int):
        self.base = base
        self.t = t
        self.algebra = base.algebra
        self.coefficients = base.coefficients

    def basis(self, d: int) -> list:
        return self.base.basis(d + self.t)

    def lmul(self, r: Element, x: Element) -> Element:
        alg = self.algebra
        out = self.base.lmul(r, x)
        rdeg = alg.element_degree(r)
        if self.t % 2 and rdeg is not None and rdeg % 2:
            return {w: alg._fmul(c, alg.field(-1)) for w, c in out.items()}
        return out

    def rmul(self, x: Element, r: Element) -> Element:
        return self.base.rmul(x, r)


def shift_bimodule(m, t: int):
    return _ShiftedBimodule(m, t)


# ---------------------------------------------------------------------------
# Finitely presented modules
# ---------------------------------------------------------------------------


@dataclass
class ModulePresentation:
    """Right module over a graded algebra: generators and homogeneous relations.

    A relation is a list of algebra elements, one coefficient per generator;
    the module is F0 / <relations . monomials> computed per degree.
    """

    algebra: GradedAlgebraPresentation
    generators: list  # (name, degree)
    relations: list  # list of coefficient vectors (list of Elements)

    def __post_init__(self):
        for rel in self.relations:
            if len(rel) != len(self.generators):
                raise ValueError("relation length does not match generator count")
            degs = set()
            for (name, gd), coeff in zip(self.generators, rel):
                if coeff:
                    degs.add(gd + self.algebra.element_degree(coeff))
            if len(degs) > 1:
                raise ValueError(f"inhomogeneous relation (degrees {sorted(degs)})")

    def relation_degree(self, rel) -> Optional[int]:
        for (name, gd), coeff in zip(self.generators, rel):
            if coeff:
                return gd + self.algebra.element_degree(coeff)
        return None

    def to_json(self) -> dict:
        alg = self.algebra
        return {
            "algebra": alg.to_json(),
            "generators": [{"name": n, "degree": d} for n, d in self.generators],
            "relations": [
                [
                    [{"coeff": int(c), "word": [alg.gen_names[g] for g in w]} for w, c in coeff.items()]
                    for coeff in rel
                ]
                for rel in self.relations
            ],
        }

    @staticmethod
    def from_json(data: dict, algebra: Optional[GradedAlgebraPresentation] = None) -> "ModulePresentation":
        alg = algebra if algebra is not None else GradedAlgebraPresentation.from_json(data["algebra"])
        gens = [(g["name"], g["degree"]) for g in data["generators"]]
        rels = []
        for rel in data.get("relations", []):
            vec = []
            for coeff in rel:
                elem = {}
                for term in coeff:
                    elem[tuple(alg.name_index[n] for n in term["word"])] = alg.field(term["coeff"])
                vec.append(elem)
            rels.append(vec)
        return ModulePresentation(alg, gens, rels)

    def is_free(self) -> bool:
        return all(all(not c for c in rel) for rel in self.relations)


class ComputedModule:
    """Windowed k-basis of a finitely presented module with its right action.

    Degree d carries the free basis {(i, m)} of F0 and the reduction map
    modulo the relation submodule; the quotient basis is the non-pivot
    part of the canonical rref, so representatives are deterministic.
    """

    def __init__(self, presentation: ModulePresentation):
        from .exactla import rref_mod

        self.presentation = presentation
        self.algebra = presentation.algebra
        alg = self.algebra
        if not isinstance(alg.field, GF):
            raise TypeError("computed modules require a finite prime field")
        self.p = alg.field.p
        lo, hi = alg.window_lo, alg.window_hi
        self.lo, self.hi = lo, hi
        self.free_basis: dict[int, list] = {}
        for d in range(lo, hi + 1):
            fb = []
            for i, (_n, gd) in enumerate(presentation.generators):
                if lo <= d - gd <= hi:
                    fb.extend((i, w) for w in alg.basis(d - gd))
            self.free_basis[d] = fb
        self._reduce: dict[int, tuple] = {}
        for d in range(lo, hi + 1):
            fb = self.free_basis[d]
            index = {lab: k for k, lab in enumerate(fb)}
            rows = []
            for rel in presentation.relations:
                rdeg = presentation.relation_degree(rel)
                if rdeg is None:
                    continue
                mdeg = d - rdeg
                if not (lo <= mdeg <= hi):
                    continue
                for m in alg.basis(mdeg):
                    row = np.zeros(len(fb), dtype=np.int64)
                    for i, coeff in enumerate(rel):
                        if not coeff:
                            continue
                        prod = alg.multiply(coeff, {m: alg.field(1)})
                        for w, c in prod.items():
                            row[index[(i, w)]] = c
                    rows.append(row)
            if rows:
                mat = np.array(rows, dtype=np.int64)
                red, piv = rref_mod(mat, self.p)
            else:
                red, piv = np.zeros((0, len(fb)), dtype=np.int64), []
            pivset = set(piv)
            quotient = [k for k in range(len(fb)) if k not in pivset]
            self._reduce[d] = (red[: len(piv)], piv, quotient, index)

    def dim(self, d: int) -> int:
        if not (self.lo <= d <= self.hi):
            return 0
        return len(self._reduce[d][2])

    def basis_labels(self, d: int) -> list:
        red, piv, quotient, index = self._reduce[d]
        fb = self.free_basis[d]
        return [fb[k] for k in quotient]

    def reduce_free(self, d: int, vec: np.ndarray) -> np.ndarray:
        """Coordinates in the quotient basis of a free-module vector."""
        red, piv, quotient, _ = self._reduce[d]
        v = vec.copy() % self.p
        for r, c in enumerate(piv):
            if v[c]:
                v = (v - v[c] * red[r]) % self.p
        return v[quotient]

    def gen_vector(self, gen_index: int, word, d: int) -> np.ndarray:
        _, _, _, index = self._reduce[d]
        vec = np.zeros(len(self.free_basis[d]), dtype=np.int64)
        vec[index[(gen_index, word)]] = 1
        return vec

    def act(self, d: int, coords: np.ndarray, r: Element) -> tuple[int, np.ndarray]:
        """Right action of a homogeneous algebra element on quotient coords."""
        alg = self.algebra
        rdeg = alg.element_degree(r)
        if rdeg is None:
            return d, np.zeros(self.dim(d), dtype=np.int64)
        nd = d + rdeg
        if not (self.lo <= nd <= self.hi):
            raise WindowOverflowError(f"module action lands in degree {nd}")
        _, _, _, index = self._reduce[nd]
        out = np.zeros(len(self.free_basis[nd]), dtype=np.int64)
        labels = self.basis_labels(d)
        for k, c in enumerate(coords):
            if c % self.p == 0:
                continue
            i, w = labels[k]
            prod = alg.multiply({w: alg.field(1)}, r)
            for ww, cc in prod.items():
                out[index[(i, ww)]] = (out[index[(i, ww)]] + int(c) * cc) % self.p
        return nd, self.reduce_free(nd, out)

    def is_zero_module(self) -> bool:
        return all(self.dim(d) == 0 for d in range(self.lo, self.hi + 1))


def parse_element(algebra: GradedAlgebraPresentation, text: str) -> Element:
    """Parse 'X*Y^2' style monomial expressions into an algebra element."""
    text = text.strip()
    if text in ("1", ""):
        return algebra.one
    word: list[int] = []
    for factor in text.replace(" ", "").split("*"):
        if "^" in factor:
            name, exp = factor.split("^")
            exp = int(exp)
        else:
            name, exp = factor, 1
        if name not in algebra.name_index:
            raise KeyError(f"unknown generator {name!r}")
        word.extend([algebra.name_index[name]] * exp)
    return algebra.normalise_word(tuple(word))
