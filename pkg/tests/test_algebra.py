"""Word and polynomial arithmetic plus rewriting, checked against hand
derivations and seeded fuzzing."""

import random

import pytest

from starsdp.algebra import (
    AlgebraError,
    Generator,
    Polynomial,
    Presentation,
    RewriteLimitError,
    RewriteRule,
    UNIT_WORD,
    Word,
    is_selfadjoint_poly,
    normal_form,
    normal_form_word,
    poly_mul,
    single,
    word_adjoint,
)


def chsh_presentation():
    gens = tuple(Generator(n, selfadjoint=True) for n in ("A0", "A1", "B0", "B1"))
    rules = tuple(
        RewriteRule(Word(((i, False), (i, False))), Polynomial.unit()) for i in range(4)
    )
    commuting = frozenset((a, b) for a in (0, 1) for b in (2, 3))
    return Presentation(gens, rules, commuting)


def word(*letters):
    return Word(tuple(letters))


class TestWord:
    def test_adjoint_reverses_and_toggles(self):
        w = word((0, False), (1, True), (2, False))
        assert word_adjoint(w) == word((2, True), (1, False), (0, True))

    def test_adjoint_involution(self):
        w = word((3, True), (0, False))
        assert word_adjoint(word_adjoint(w)) == w

    def test_unit_adjoint(self):
        assert word_adjoint(UNIT_WORD) == UNIT_WORD

    def test_order_degree_then_lex_star_breaks_ties(self):
        # degree dominates; within a degree, generator index, then star
        assert UNIT_WORD < single(0)
        assert single(0) < single(0, True)
        assert single(0, True) < single(1)
        assert single(3) < word((0, False), (0, False))


class TestPolynomial:
    def test_zero_prune(self):
        p = Polynomial({single(0): 1e-13})
        assert p.is_zero()

    def test_structural_equality(self):
        p = Polynomial({single(0): 1.0, single(1): 2.0})
        q = Polynomial({single(1): 2.0, single(0): 1.0})
        assert p == q

    def test_add_cancel(self):
        p = Polynomial.from_word(single(0))
        assert (p - p).is_zero()

    def test_mul_distributes(self):
        a, b = single(0), single(2)
        p = Polynomial.from_word(a) + Polynomial.from_word(single(1))
        q = Polynomial.from_word(b)
        r = poly_mul(p, q)
        assert r.coeff(a.concat(b)) == 1
        assert r.coeff(single(1).concat(b)) == 1
        assert len(r) == 2

    def test_scalar_and_neg(self):
        p = 2.0 * Polynomial.from_word(single(0))
        assert (-p).coeff(single(0)) == -2.0

    def test_adjoint_conjugates_coefficients(self):
        p = Polynomial.from_word(word((0, False), (1, False)), 1j)
        q = p.adjoint()
        assert q.coeff(word((1, True), (0, True))) == -1j


class TestRewriteRule:
    def test_rejects_unit_lhs(self):
        with pytest.raises(AlgebraError):
            RewriteRule(UNIT_WORD, Polynomial.unit())

    def test_rejects_order_increase(self):
        # x -> x x is not decreasing
        with pytest.raises(AlgebraError):
            RewriteRule(single(0), Polynomial.from_word(word((0, False), (0, False))))

    def test_rejects_equal(self):
        with pytest.raises(AlgebraError):
            RewriteRule(single(0), Polynomial.from_word(single(0)))


class TestNormalFormChsh:
    def setup_method(self):
        self.pres = chsh_presentation()

    def test_square_collapses(self):
        # A0 A0 -> 1
        p = normal_form_word(word((0, False), (0, False)), self.pres)
        assert p == Polynomial.unit()

    def test_commutation_orders_cross_pairs(self):
        # B0 A0 -> A0 B0
        p = normal_form_word(word((2, False), (0, False)), self.pres)
        assert p == Polynomial.from_word(word((0, False), (2, False)))

    def test_same_side_does_not_commute(self):
        w = word((1, False), (0, False))  # A1 A0 stays put
        assert normal_form_word(w, self.pres) == Polynomial.from_word(w)

    def test_starred_chain_reduces(self):
        # A1* B0* A1 -> A1 B0 A1 -> A1 A1 B0 -> B0
        w = word((1, True), (2, True), (1, False))
        assert normal_form_word(w, self.pres) == Polynomial.from_word(single(2))

    def test_star_removal_on_selfadjoint(self):
        assert normal_form_word(single(0, True), self.pres) == Polynomial.from_word(single(0))

    def test_starred_pair_commutes(self):
        # B0* A0* -> A0* B0* -> A0 B0 after star removal
        w = word((2, True), (0, True))
        assert normal_form_word(w, self.pres) == Polynomial.from_word(
            word((0, False), (2, False))
        )


class TestNormalFormGeneral:
    def test_sum_rule_expands(self):
        # x^2 -> 1 - x, so x^3 -> x - x^2 -> -1 + 2x
        x = Generator("x", selfadjoint=True)
        sq = RewriteRule(
            Word(((0, False), (0, False))),
            Polynomial.unit() - Polynomial.from_word(single(0)),
        )
        pres = Presentation((x,), (sq,))
        p = normal_form_word(word((0, False), (0, False), (0, False)), pres)
        assert p == Polynomial.unit(-1.0) + 2.0 * Polynomial.from_word(single(0))

    def test_complex_rule(self):
        # u* -> i u and u u -> -i 1 describe a phase-rotated involution
        u = Generator("u", selfadjoint=False)
        r1 = RewriteRule(single(0, True), Polynomial.from_word(single(0), 1j))
        r2 = RewriteRule(word((0, False), (0, False)), Polynomial.unit(-1j))
        pres = Presentation((u,), (r1, r2))
        # u u* -> i u u -> i(-i) = 1
        p = normal_form_word(word((0, False), (0, True)), pres)
        assert p == Polynomial.unit()
        # u* u -> (i u) u -> i(-i) = 1
        p = normal_form_word(word((0, True), (0, False)), pres)
        assert p == Polynomial.unit()

    def test_step_cap_raises(self):
        pres = chsh_presentation()
        w = Word(tuple((0, False) for _ in range(12)))
        with pytest.raises(RewriteLimitError):
            normal_form_word(w, pres, step_cap=2)

    def test_selfadjointness_check(self):
        pres = chsh_presentation()
        chsh = (
            Polynomial.from_word(pres.word("A0", "B0"))
            + Polynomial.from_word(pres.word("A1", "B1"))
            + Polynomial.from_word(pres.word("A0", "B1"))
            - Polynomial.from_word(pres.word("A1", "B0"))
        )
        assert is_selfadjoint_poly(chsh, pres)
        assert not is_selfadjoint_poly(Polynomial.from_word(pres.word("A0", "A1")), pres)


def random_word(rng, n_gens, max_len, allow_star=True):
    k = rng.randrange(max_len + 1)
    return Word(
        tuple((rng.randrange(n_gens), allow_star and rng.random() < 0.5) for _ in range(k))
    )


class TestRewritingLaws:
    """Idempotence, involution compatibility and the anti-homomorphism law
    on seeded fuzzed words."""

    def fuzz(self, pres, n_words=300, seed=7):
        rng = random.Random(seed)
        n = len(pres.generators)
        for _ in range(n_words):
            w = random_word(rng, n, 6)
            v = random_word(rng, n, 4)
            nf = normal_form_word(w, pres)
            # idempotence
            assert normal_form(nf, pres) == nf
            # involution: NF(w*) equals NF(NF(w)*)
            assert normal_form_word(w.adjoint(), pres).close_to(
                normal_form(nf.adjoint(), pres), 1e-9
            )
            # anti-homomorphism of adjoint over concatenation
            lhs = normal_form_word(w.concat(v).adjoint(), pres)
            rhs = normal_form(
                poly_mul(
                    normal_form_word(v.adjoint(), pres), normal_form_word(w.adjoint(), pres)
                ),
                pres,
            )
            assert lhs.close_to(rhs, 1e-9)

    def test_chsh(self):
        self.fuzz(chsh_presentation())

    def test_single_variable(self):
        pres = Presentation((Generator("x", selfadjoint=True),))
        self.fuzz(pres, n_words=150, seed=11)

    def test_phase_unitary(self):
        u = Generator("u")
        r1 = RewriteRule(single(0, True), Polynomial.from_word(single(0), 1j))
        r2 = RewriteRule(word((0, False), (0, False)), Polynomial.unit(-1j))
        self.fuzz(Presentation((u,), (r1, r2)), n_words=200, seed=13)
