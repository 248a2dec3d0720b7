"""Oracle sanity: realizations, grid search, hand-checked CHSH values."""

import numpy as np
import pytest

from starsdp.algebra import (
    Generator, Polynomial, Presentation, RewriteRule, Word, single,
    UNIT_WORD, normal_form,
)
from starsdp.problems import parse_problem
from starsdp.oracles import (
    ConcreteRealization, RealizationError, EmptyFeasibleGrid,
    realize_moments, grid_min,
    chsh_tsirelson_realization, chsh_classical_max,
)

CHSH_TEXT = """
[generators]
A0 selfadjoint
A1 selfadjoint
B0 selfadjoint
B1 selfadjoint

[relations]
A0^2 = 1
A1^2 = 1
B0^2 = 1
B1^2 = 1

[commute]
{A0, A1} with {B0, B1}

[objective]
maximize A0*B0 + A1*B1 + A0*B1 - A1*B0
"""


@pytest.fixture
def chsh():
    return parse_problem(CHSH_TEXT)


class TestRealizationValidation:
    def test_tsirelson_realization_valid(self, chsh):
        chsh_tsirelson_realization(chsh.presentation)

    def test_wrong_square_rejected(self, chsh):
        mats = {n: 2 * np.eye(2) for n in ("A0", "A1", "B0", "B1")}
        with pytest.raises(RealizationError, match="relation"):
            ConcreteRealization(chsh.presentation, mats,
                                np.array([1.0, 0.0]))

    def test_noncommuting_rejected(self, chsh):
        sz = np.diag([1.0, -1.0])
        sx = np.array([[0.0, 1.0], [1.0, 0.0]])
        mats = {"A0": sz, "A1": sx, "B0": sz, "B1": sx}
        with pytest.raises(RealizationError, match="commut"):
            ConcreteRealization(chsh.presentation, mats,
                                np.array([1.0, 0.0]))

    def test_unnormalized_state_rejected(self, chsh):
        mats = {n: np.eye(2) for n in ("A0", "A1", "B0", "B1")}
        with pytest.raises(RealizationError, match="normalized"):
            ConcreteRealization(chsh.presentation, mats,
                                np.array([1.0, 1.0]))

    def test_density_state_accepted(self, chsh):
        mats = {n: np.eye(2) for n in ("A0", "A1", "B0", "B1")}
        rho = np.eye(2) / 2
        r = ConcreteRealization(chsh.presentation, mats, rho)
        assert abs(r.expect(Polynomial.unit()) - 1.0) < 1e-12

    def test_nonselfadjoint_matrix_rejected(self, chsh):
        mats = {n: np.eye(2) for n in ("A0", "A1", "B0", "B1")}
        mats["A0"] = np.array([[0.0, 1.0], [0.0, 0.0]])
        with pytest.raises(RealizationError, match="selfadjoint"):
            ConcreteRealization(chsh.presentation, mats,
                                np.array([1.0, 0.0]))


class TestExpectations:
    def test_tsirelson_correlators(self, chsh):
        r = chsh_tsirelson_realization(chsh.presentation)
        pres = chsh.presentation
        s = 1.0 / np.sqrt(2.0)
        pairs = {("A0", "B0"): s, ("A1", "B1"): s,
                 ("A0", "B1"): s, ("A1", "B0"): -s}
        for (a, b), want in pairs.items():
            w = pres.word(a, b)
            assert abs(r.expect(w) - want) < 1e-12

    def test_tsirelson_objective_value(self, chsh):
        r = chsh_tsirelson_realization(chsh.presentation)
        v = r.expect(chsh.objective)
        assert abs(v - 2.0 * np.sqrt(2.0)) < 1e-12

    def test_classical_bound_is_two(self):
        assert chsh_classical_max() == 2.0

    def test_moment_dict_covers_words(self, chsh):
        r = chsh_tsirelson_realization(chsh.presentation)
        pres = chsh.presentation
        words = [UNIT_WORD, pres.word("A0"), pres.word("A0", "B0")]
        m = realize_moments(r, words)
        assert abs(m[UNIT_WORD] - 1.0) < 1e-12
        assert abs(m[pres.word("A0")]) < 1e-12

    def test_expectation_respects_rewriting(self, chsh):
        # the oracle never rewrites, so agreement with the normal form is a
        # genuine cross-check of both sides
        r = chsh_tsirelson_realization(chsh.presentation)
        pres = chsh.presentation
        w = pres.word("B0", "A0", "A0", "B0", "A1")
        nf = normal_form(w, pres)
        assert abs(r.expect(Polynomial.from_word(w)) - r.expect(nf)) < 1e-10


class TestGridOracle:
    def test_quartic_single_variable(self):
        pres = Presentation([Generator("x", selfadjoint=True)], [], frozenset())
        x = Polynomial.from_word(single(0))
        obj = x * x * x * x - x * x
        assert abs(grid_min(pres, obj, points=2001) + 0.25) < 1e-4

    def test_constrained_quartic(self):
        pres = Presentation([Generator("x", selfadjoint=True)], [], frozenset())
        x = Polynomial.from_word(single(0))
        obj = x * x * x * x - x * x
        # restricting to x >= 1 moves the minimum to x = 1
        cons = [(Polynomial.from_word(single(0)), ">=", 1.0)]
        assert abs(grid_min(pres, obj, cons, points=2001) - 0.0) < 1e-3

    def test_two_commuting_variables(self):
        pres = Presentation(
            [Generator("x", selfadjoint=True), Generator("y", selfadjoint=True)],
            [], frozenset({(0, 1)}))
        x = Polynomial.from_word(single(0))
        y = Polynomial.from_word(single(1))
        obj = x * x + y * y - x - y
        # minimum at x = y = 1/2 is -1/2
        assert abs(grid_min(pres, obj, points=401) + 0.5) < 1e-3

    def test_empty_grid_raises(self):
        pres = Presentation([Generator("x", selfadjoint=True)], [], frozenset())
        x = Polynomial.from_word(single(0))
        cons = [(x, ">=", 10.0)]
        with pytest.raises(EmptyFeasibleGrid):
            grid_min(pres, x, cons)

    def test_noncommuting_rejected(self):
        pres = Presentation(
            [Generator("x", selfadjoint=True), Generator("y", selfadjoint=True)],
            [], frozenset())
        with pytest.raises(Exception, match="commut"):
            grid_min(pres, Polynomial.from_word(single(0)))
