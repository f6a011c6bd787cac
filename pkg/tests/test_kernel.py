"""Base layer: monomials, presentations, rewriting, decisions, semirings."""

from __future__ import annotations

import pytest

from bluealg import (
    Budget,
    DEFAULT_BUDGET,
    Decision,
    FiniteSemiring,
    FormalSum,
    InvalidPresentation,
    Monomial,
    MonoidPresentation,
    ZERO_MONOMIAL,
    all_hold,
    check_semiring_axioms,
    semiring_boolean,
    semiring_nat_truncated,
    semiring_zmod,
    subset_generates,
)
from bluealg.kernel import InvalidSemiring

from oracle import BruteClosure


def _pres_xy(*relations, has_zero=False) -> MonoidPresentation:
    return MonoidPresentation(("x", "y"), tuple(relations), has_zero)


def _diamond() -> FiniteSemiring:
    """The distributive lattice 0 < a, b < 1 as a semiring: + is join,
    * is meet."""
    return FiniteSemiring(
        ("0", "a", "b", "1"),
        ((0, 1, 2, 3), (1, 1, 3, 3), (2, 3, 2, 3), (3, 3, 3, 3)),
        ((0, 0, 0, 0), (0, 1, 0, 1), (0, 0, 2, 2), (0, 1, 2, 3)),
        zero=0, one=3)


class TestDecision:
    def test_kinds(self):
        assert Decision.holds().is_holds
        assert Decision.fails(reason="r").is_fails
        assert Decision.unknown(steps=3).is_unknown
        assert Decision.unknown(steps=3).info() == {"steps": 3}

    def test_all_hold_priority(self):
        h, f, u = Decision.holds(), Decision.fails(), Decision.unknown()
        assert all_hold([h, h]).is_holds
        assert all_hold([h, u, h]).is_unknown
        assert all_hold([u, f]).is_fails
        assert all_hold([]).is_holds


class TestMonomial:
    def test_zero_is_distinguished(self):
        assert ZERO_MONOMIAL.is_zero
        assert ZERO_MONOMIAL != Monomial((0,))
        assert ZERO_MONOMIAL.key() < Monomial((0,)).key()

    def test_formal_sum_is_sorted_multiset(self):
        a, b = Monomial((1, 0)), Monomial((0, 1))
        s = FormalSum.of([b, a, b])
        assert s == FormalSum.of([b, a, b][::-1])
        assert len(s.terms) == 3
        assert FormalSum.empty() != FormalSum.single(ZERO_MONOMIAL)


class TestMonoidPresentation:
    def test_reserved_and_duplicate_names(self):
        for bad in ("0", "1", "empty"):
            with pytest.raises(InvalidPresentation):
                MonoidPresentation((bad,), (), False)
        with pytest.raises(InvalidPresentation):
            MonoidPresentation(("x", "x"), (), False)

    def test_zero_needs_declaration(self):
        with pytest.raises(InvalidPresentation):
            MonoidPresentation(("x",), ((Monomial((2,)), ZERO_MONOMIAL),), False)

    def test_normalize_is_idempotent(self):
        pres = _pres_xy((Monomial((2, 0)), Monomial((0, 1))))
        for exps in [(3, 0), (2, 2), (5, 1), (0, 0)]:
            n = pres.normalize(Monomial(exps))
            assert pres.normalize(n) == n

    def test_word_problem_against_oracle(self):
        # x^2 = y makes x^4, y^2 and x^2*y all equal
        pres = _pres_xy((Monomial((2, 0)), Monomial((0, 1))))
        oracle = BruteClosure(2, (((2, 0), (0, 1)),), False, (), max_degree=6)
        pairs = [((4, 0), (0, 2)), ((2, 1), (0, 2)), ((1, 0), (0, 1)),
                 ((3, 0), (1, 1)), ((1, 1), (0, 1))]
        for a, b in pairs:
            got = pres.monoid_equal(Monomial(a), Monomial(b))
            assert not got.is_unknown
            assert got.is_holds == (oracle.nf(a) == oracle.nf(b))

    def test_absorbing_zero(self):
        pres = MonoidPresentation(("x",), (), True)
        x = pres.gen("x")
        assert pres.mul(x, ZERO_MONOMIAL).is_zero
        assert pres.gen("0").is_zero

    def test_finite_carrier_enumeration(self):
        pres = MonoidPresentation(("e",), ((Monomial((2,)), Monomial((1,))),), True)
        els = pres.finite_elements()
        assert els is not None
        assert sorted(pres.render(m) for m in els) == ["0", "1", "e"]

    def test_infinite_carrier_reports_none(self):
        assert MonoidPresentation(("x",), (), True).finite_elements() is None

    def test_render_round_trip_forms(self):
        pres = _pres_xy()
        assert pres.render(Monomial((0, 0))) == "1"
        assert pres.render(Monomial((2, 1))) == "x^2*y"
        assert pres.render_sum(FormalSum.empty()) == "empty"
        assert pres.render_sum(FormalSum.of([Monomial((1, 0))])) == "x"


class TestFiniteSemiring:
    def test_boolean_tables(self):
        R = semiring_boolean()
        assert check_semiring_axioms(R).is_holds
        i1 = R.one
        assert R.add[i1][i1] == i1

    def test_zmod_and_truncated(self):
        assert check_semiring_axioms(semiring_zmod(5)).is_holds
        R = semiring_nat_truncated(3)
        assert check_semiring_axioms(R).is_holds
        top = R.size - 1
        assert R.add[top][top] == top

    def test_planted_axiom_violation(self):
        # 0 + 1 = 0 breaks the additive unit; table shape stays valid
        broken = FiniteSemiring(("0", "1"), ((0, 0), (0, 1)),
                                ((0, 0), (0, 1)), 0, 1)
        d = check_semiring_axioms(broken)
        assert d.is_fails
        assert d.info()["axiom"] == "additive unit"

    def test_invalid_tables_rejected(self):
        with pytest.raises(InvalidSemiring):
            FiniteSemiring(("0", "1"), ((0, 1),), ((0, 0), (0, 1)), 0, 1)

    def test_subset_generates(self):
        # diamond lattice 0 < a, b < 1 under join and meet
        R = _diamond()
        assert check_semiring_axioms(R).is_holds
        assert subset_generates(R, ()).is_fails
        d = subset_generates(R, (R.index("a"),))
        assert d.is_fails and d.info()["missing"] == ("b",)
        assert subset_generates(R, (R.index("a"), R.index("b"))).is_holds


class TestBudget:
    def test_defaults_and_shrink(self):
        assert DEFAULT_BUDGET.max_terms >= 3
        b = Budget(max_degree=9).shrink_degree(4)
        assert b.max_degree == 4
        assert Budget().shrink_degree(99).max_degree == Budget().max_degree

    def test_budget_exhaustion_is_unknown(self):
        # non-confluence plus a tiny step budget forces an honest Unknown
        pres = _pres_xy((Monomial((3, 0)), Monomial((0, 1))),
                        (Monomial((1, 2)), Monomial((2, 0))))
        tiny = Budget(max_steps=1, max_degree=2)
        d = pres.monoid_equal(Monomial((5, 0)), Monomial((0, 5)), tiny)
        assert not d.is_fails
