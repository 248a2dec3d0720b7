"""Free *-algebra arithmetic over a finite set of generators.

Words are finite sequences of possibly-starred generator letters, polynomials
are finite complex combinations of words, and a presentation bundles the
generators with a terminating rewrite system (explicit rules plus the implicit
ones induced by self-adjointness and declared commuting pairs).  Normal forms
are computed by leftmost-innermost rewriting to a fixpoint.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

COEFF_EPS = 1e-12
REWRITE_STEP_CAP = 10_000

# A letter is (generator index, starred flag).  In the term order used
# throughout, words compare by degree, then letter-wise by generator index
# with a starred letter ranking above the unstarred one.
Letter = tuple[int, bool]


class RewriteLimitError(RuntimeError):
    """Raised when rewriting a single word exceeds the step budget."""


class AlgebraError(ValueError):
    pass


@dataclass(frozen=True)
class Generator:
    name: str
    selfadjoint: bool = False


@dataclass(frozen=True)
class Word:
    """An immutable product of generator letters; the empty word is the unit."""

    letters: tuple[Letter, ...] = ()

    def degree(self) -> int:
        return len(self.letters)

    def adjoint(self) -> "Word":
        return Word(tuple((g, not s) for g, s in reversed(self.letters)))

    def concat(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def is_unit(self) -> bool:
        return not self.letters

    def key(self):
        return (len(self.letters), self.letters)

    def __lt__(self, other: "Word") -> bool:
        return self.key() < other.key()


UNIT_WORD = Word()


def word_adjoint(w: Word) -> Word:
    """Reverse the letter sequence and toggle every star flag."""
    return w.adjoint()


def single(gen_index: int, starred: bool = False) -> Word:
    return Word(((gen_index, starred),))


class Polynomial:
    """Finite complex combination of words, stored sparsely.

    Coefficients with magnitude below COEFF_EPS are pruned on construction,
    so equality of polynomials is plain structural equality of the term maps.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Word, complex] | None = None):
        clean: dict[Word, complex] = {}
        if terms:
            for w, c in terms.items():
                c = complex(c)
                if abs(c) >= COEFF_EPS:
                    clean[w] = c
        self._terms = clean

    @staticmethod
    def zero() -> "Polynomial":
        return Polynomial()

    @staticmethod
    def unit(coeff: complex = 1.0) -> "Polynomial":
        return Polynomial({UNIT_WORD: coeff})

    @staticmethod
    def from_word(w: Word, coeff: complex = 1.0) -> "Polynomial":
        return Polynomial({w: coeff})

    def terms(self) -> list[tuple[Word, complex]]:
        """Terms in canonical order: degree first, then letter-wise."""
        return sorted(self._terms.items(), key=lambda t: t[0].key())

    def words(self) -> list[Word]:
        return [w for w, _ in self.terms()]

    def coeff(self, w: Word) -> complex:
        return self._terms.get(w, 0j)

    def degree(self) -> int:
        return max((w.degree() for w in self._terms), default=0)

    def is_zero(self) -> bool:
        return not self._terms

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def adjoint(self) -> "Polynomial":
        return Polynomial({w.adjoint(): c.conjugate() for w, c in self._terms.items()})

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[tuple[Word, complex]]:
        return iter(self.terms())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self._terms == other._terms

    def __add__(self, other: "Polynomial") -> "Polynomial":
        acc = dict(self._terms)
        for w, c in other._terms.items():
            acc[w] = acc.get(w, 0j) + c
        return Polynomial(acc)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __neg__(self) -> "Polynomial":
        return Polynomial({w: -c for w, c in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            return poly_mul(self, other)
        return self.scale(other)

    def __rmul__(self, scalar) -> "Polynomial":
        return self.scale(scalar)

    def scale(self, scalar: complex) -> "Polynomial":
        return Polynomial({w: c * scalar for w, c in self._terms.items()})

    def close_to(self, other: "Polynomial", tol: float = 1e-9) -> bool:
        words = set(self._terms) | set(other._terms)
        return all(abs(self.coeff(w) - other.coeff(w)) <= tol for w in words)

    def __repr__(self) -> str:
        if self.is_zero():
            return "Polynomial(0)"
        bits = ", ".join(f"{w.letters}:{c:g}" for w, c in self.terms())
        return f"Polynomial({bits})"


def poly_mul(p: Polynomial, q: Polynomial) -> Polynomial:
    """Concatenation product extended bilinearly."""
    acc: dict[Word, complex] = {}
    for wp, cp in p._terms.items():
        for wq, cq in q._terms.items():
            w = wp.concat(wq)
            acc[w] = acc.get(w, 0j) + cp * cq
    return Polynomial(acc)


@dataclass(frozen=True)
class RewriteRule:
    """Oriented rule lhs -> rhs with every rhs word strictly smaller."""

    lhs: Word
    rhs: Polynomial

    def __post_init__(self):
        if self.lhs.is_unit():
            raise AlgebraError("rewrite rule left side must be a nonempty word")
        for w in self.rhs.words():
            if not w.key() < self.lhs.key():
                raise AlgebraError(
                    "rewrite rule is not order-decreasing: "
                    f"right side word of degree {w.degree()} does not precede the left side"
                )


@dataclass
class Presentation:
    """Generators, explicit rewrite rules and commuting generator pairs.

    Treated as immutable after construction; a private normal-form cache is
    the only mutable state.
    """

    generators: tuple[Generator, ...]
    rules: tuple[RewriteRule, ...] = ()
    commuting: frozenset[tuple[int, int]] = frozenset()

    def __post_init__(self):
        names = [g.name for g in self.generators]
        if len(set(names)) != len(names):
            raise AlgebraError("duplicate generator names")
        n = len(self.generators)
        for a, b in self.commuting:
            if not (0 <= a < n and 0 <= b < n):
                raise AlgebraError("commuting pair references unknown generator")
            if a >= b:
                raise AlgebraError("commuting pairs must be stored with a < b")
        for rule in self.rules:
            for w in (rule.lhs, *rule.rhs.words()):
                for g, _ in w.letters:
                    if not (0 <= g < n):
                        raise AlgebraError("rule references unknown generator")
        object.__setattr__(self, "_by_name", {g.name: i for i, g in enumerate(self.generators)})
        # Rules grouped by left-side length; declaration order preserved within a length.
        by_len: dict[int, list[RewriteRule]] = {}
        for rule in self.rules:
            by_len.setdefault(rule.lhs.degree(), []).append(rule)
        object.__setattr__(self, "_rules_by_len", by_len)
        object.__setattr__(self, "_rule_lengths", sorted(by_len))
        object.__setattr__(self, "_nf_cache", {})

    def index(self, name: str) -> int:
        try:
            return self._by_name[name]
        except KeyError:
            raise AlgebraError(f"unknown generator {name!r}") from None

    def selfadjoint(self, i: int) -> bool:
        return self.generators[i].selfadjoint

    def commutes(self, a: int, b: int) -> bool:
        if a == b:
            return False
        lo, hi = (a, b) if a < b else (b, a)
        return (lo, hi) in self.commuting

    def word(self, *names: str) -> Word:
        """Convenience: build an unstarred word from generator names."""
        return Word(tuple((self.index(n), False) for n in names))


def _find_redex(letters: tuple[Letter, ...], pres: Presentation):
    """Leftmost-innermost redex: scan positions left to right; at each
    position try shorter matches first, implicit rules before explicit ones
    of the same length."""
    n = len(letters)
    lengths = pres._rule_lengths
    by_len = pres._rules_by_len
    max_len = max(lengths[-1] if lengths else 0, 2)
    for pos in range(n):
        g, s = letters[pos]
        remaining = n - pos
        for length in range(1, min(max_len, remaining) + 1):
            if length == 1 and s and pres.generators[g].selfadjoint:
                return pos, 1, Polynomial.from_word(single(g, False))
            if length == 2:
                h, t = letters[pos + 1]
                if t == s and h < g and pres.commutes(g, h):
                    return pos, 2, Polynomial.from_word(Word(((h, t), (g, s))))
            for rule in by_len.get(length, ()):
                if letters[pos : pos + length] == rule.lhs.letters:
                    return pos, length, rule.rhs
    return None


def is_normal_form(w: Word, pres: Presentation) -> bool:
    """True when the word contains no rewritable subword."""
    return _find_redex(w.letters, pres) is None


def normal_form_word(w: Word, pres: Presentation, step_cap: int = REWRITE_STEP_CAP) -> Polynomial:
    """Rewrite a single word to its normal form polynomial."""
    cached = pres._nf_cache.get(w)
    if cached is not None:
        return cached
    acc: dict[Word, complex] = {}
    stack: list[tuple[Word, complex]] = [(w, 1.0 + 0j)]
    steps = 0
    while stack:
        word, coeff = stack.pop()
        hit = pres._nf_cache.get(word)
        if hit is not None:
            for u, c in hit._terms.items():
                acc[u] = acc.get(u, 0j) + coeff * c
            continue
        redex = _find_redex(word.letters, pres)
        if redex is None:
            acc[word] = acc.get(word, 0j) + coeff
            continue
        steps += 1
        if steps > step_cap:
            raise RewriteLimitError(
                f"rewriting exceeded {step_cap} steps on a word of degree {w.degree()}"
            )
        pos, length, repl = redex
        prefix = word.letters[:pos]
        suffix = word.letters[pos + length :]
        for rw, rc in repl._terms.items():
            stack.append((Word(prefix + rw.letters + suffix), coeff * rc))
    result = Polynomial(acc)
    pres._nf_cache[w] = result
    return result


def normal_form(p: Polynomial | Word, pres: Presentation, step_cap: int = REWRITE_STEP_CAP) -> Polynomial:
    """Normal form of a polynomial (or a bare word) under the presentation."""
    if isinstance(p, Word):
        return normal_form_word(p, pres, step_cap)
    acc: dict[Word, complex] = {}
    for w, c in p._terms.items():
        for u, d in normal_form_word(w, pres, step_cap)._terms.items():
            acc[u] = acc.get(u, 0j) + c * d
    return Polynomial(acc)


def is_selfadjoint_poly(p: Polynomial, pres: Presentation, tol: float = 1e-9) -> bool:
    """Whether p equals its adjoint up to rewriting, coefficient-wise."""
    return normal_form(p, pres).close_to(normal_form(p.adjoint(), pres), tol)
