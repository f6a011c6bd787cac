"""Shared example blueprints for the test modules.

Builders return fresh objects so tests can mutate budgets freely; the
catalog() list is the fixed collection exercised by the acceptance
criteria (spectra, globalization, base extension, localization).
"""

from __future__ import annotations

from typing import List, Tuple

from bluealg import (
    Budget,
    DEFAULT_BUDGET,
    EmbeddedBlueprint,
    FormalSum,
    Monomial,
    MonoidPresentation,
    PresentedBlueprint,
    ZERO_MONOMIAL,
    cyclotomic,
    from_monoid,
    from_monoid_with_zero,
    from_semiring,
    semiring_boolean,
    semiring_zmod,
)

ZERO_SUM = FormalSum.single(ZERO_MONOMIAL)
ZERO_PAIR = (ZERO_SUM, FormalSum.empty())


def f1() -> PresentedBlueprint:
    return from_monoid_with_zero(MonoidPresentation((), (), True), label="F1")


def f1x() -> PresentedBlueprint:
    return from_monoid_with_zero(MonoidPresentation(("x",), (), True),
                                 label="F1[x]")


def f1xy() -> PresentedBlueprint:
    return from_monoid_with_zero(MonoidPresentation(("x", "y"), (), True),
                                 label="F1[x,y]")


def idempotent_pair() -> PresentedBlueprint:
    """Carrier {0, e, 1} with e*e = e and no sum relations."""
    pres = MonoidPresentation(("e",), ((Monomial((2,)), Monomial((1,))),), True)
    return from_monoid_with_zero(pres, label="idem")


def boolean_blueprint() -> EmbeddedBlueprint:
    return from_semiring(semiring_boolean(), label="B1")


def field_two() -> EmbeddedBlueprint:
    return from_semiring(semiring_zmod(2), label="F2")


def pres_mul(a: Monomial, b: Monomial) -> Monomial:
    return Monomial(tuple(x + y for x, y in zip(a.exps, b.exps)))


def cover(budget: Budget = DEFAULT_BUDGET) -> PresentedBlueprint:
    """Two opens covering the spectrum with a section that has no global
    preimage: generators a1, a2, h1, h2 with a1*h2 = a2*h1 and h1 + h2 = 1."""
    a1, a2, h1, h2 = (Monomial(tuple(1 if i == j else 0 for i in range(4)))
                      for j in range(4))
    pres = MonoidPresentation(("a1", "a2", "h1", "h2"),
                              ((pres_mul(a1, h2), pres_mul(a2, h1)),), True)
    one = FormalSum.single(Monomial((0, 0, 0, 0)))
    preadd = (ZERO_PAIR, (FormalSum.of([h1, h2]), one))
    return PresentedBlueprint(pres, preadd, budget, label="cover")


def axes(budget: Budget = DEFAULT_BUDGET) -> PresentedBlueprint:
    """Two idempotent coordinate lines meeting at the origin."""
    x, y = Monomial((1, 0)), Monomial((0, 1))
    pres = MonoidPresentation(
        ("x", "y"),
        ((pres_mul(x, x), x), (pres_mul(y, y), y), (pres_mul(x, y), ZERO_MONOMIAL)),
        True)
    return PresentedBlueprint(pres, (ZERO_PAIR,), budget, label="axes")


def zero_free_pair() -> PresentedBlueprint:
    """The two element monoid {1, o} with o*o = o and the empty
    pre-addition: o acts absorbingly but is not a blueprint zero."""
    pres = MonoidPresentation(("o",), ((Monomial((2,)), Monomial((1,))),), False)
    return from_monoid(pres, label="pair")


def catalog() -> List[Tuple[str, object]]:
    out: List[Tuple[str, object]] = [
        ("F1", f1()),
        ("F1[x]", f1x()),
        ("F1[x,y]", f1xy()),
        ("idem", idempotent_pair()),
        ("B1", boolean_blueprint()),
        ("F2", field_two()),
    ]
    for n in range(1, 7):
        out.append(("cyclotomic(%d)" % n, cyclotomic(n)))
    out.append(("cover", cover()))
    return out
