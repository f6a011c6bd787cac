"""Blueprints: monoids equipped with a partial additive structure.

A blueprint couples a commutative monoid with a pre-addition, an
equivalence on formal sums of monoid elements that is closed under adding
and multiplying relations.  Monoids embed as blueprints with the smallest
possible pre-addition, semirings as blueprints where the pre-addition is
actual equality of sums, and everything in between is allowed: the additive
structure may be defined only partially.

Two backends implement the same element protocol:

  * ``PresentedBlueprint``: monoid presentation plus finitely many
    generating sum relations; membership in the generated pre-addition is
    semi-decided by the bounded engine in :mod:`bluealg.saturation`.
  * ``EmbeddedBlueprint``: a multiplicative subset of a finite semiring;
    the pre-addition is evaluated exactly in the addition table.

``ProductBlueprint`` and ``EqualizerBlueprint`` complete the limit
constructions; colimit-side constructions (tensor products) are compiled
down to presentations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple, Union

from .kernel import (
    BlueError,
    Budget,
    DEFAULT_BUDGET,
    Decision,
    FiniteSemiring,
    FormalSum,
    Monomial,
    MonoidPresentation,
    ZERO_MONOMIAL,
    ZeroPresent,
    all_hold,
    check_semiring_axioms,
)
from .saturation import SeparatorFamily, engine_for, separators_for

SumPair = Tuple[FormalSum, FormalSum]


class NoZero(BlueError):
    """The construction requires a monoid with a zero element."""


class AxiomViolation(BlueError):
    """The multiplication/addition tables do not form a semiring."""


class NameClash(BlueError):
    """A fresh generator name collides with an existing one."""


class UndeclaredGenerator(BlueError):
    """An element mentions a generator the blueprint does not declare."""


class NotMultiplicative(BlueError):
    """The given subset is not closed under multiplication."""


class SourceMismatch(BlueError):
    """Tensor factors must share their base morphism source."""


class NotParallel(BlueError):
    """Equalizers need two morphisms with equal source and target."""


class TypeMismatch(BlueError):
    """Morphism data does not fit the given source and target."""


# ---------------------------------------------------------------------------
# the element protocol


class Blueprint:
    """Common protocol of all backends.

    Elements are backend-specific values (monomials, carrier indices, or
    tuples); formal sums are plain sequences of elements, with ``[]`` the
    empty sum.  All operations are pure.
    """

    label: str = ""

    def one(self):
        raise NotImplementedError

    def zero(self):
        """The distinguished absorbing element, or None if the carrier
        declares none."""
        raise NotImplementedError

    def elements(self, max_degree: Optional[int] = None) -> Tuple:
        raise NotImplementedError

    def is_finite(self) -> bool:
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def power(self, a, n: int):
        out = self.one()
        for _ in range(n):
            out = self.mul(out, a)
        return out

    def eq(self, a, b) -> bool:
        raise NotImplementedError

    def monoid_eq_decision(self, a, b) -> Decision:
        return Decision.holds() if self.eq(a, b) else Decision.fails()

    def holds(self, lhs: Iterable, rhs: Iterable) -> Decision:
        """Whether the two formal sums are related by the pre-addition."""
        raise NotImplementedError

    def render(self, a) -> str:
        raise NotImplementedError

    def render_sum(self, els: Iterable) -> str:
        parts = [self.render(a) for a in self._sorted(els)]
        return " + ".join(parts) if parts else "empty"

    def element_key(self, a):
        raise NotImplementedError

    def _sorted(self, els: Iterable) -> List:
        return sorted(els, key=self.element_key)

    # derived conveniences

    def is_with_zero(self) -> Decision:
        return classify(self).with_zero

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return "<blueprint %s>" % (self.label or type(self).__name__)


@dataclass(frozen=True)
class PresentedBlueprint(Blueprint):
    pres: MonoidPresentation
    preadd: Tuple[SumPair, ...] = ()
    budget: Budget = DEFAULT_BUDGET
    cancellative_rule: bool = False
    label: str = ""

    def __post_init__(self) -> None:
        for x, y in self.preadd:
            for m in x.terms + y.terms:
                self._check_monomial(m)

    def _check_monomial(self, m: Monomial) -> None:
        if m.is_zero:
            if not self.pres.has_zero:
                raise UndeclaredGenerator("zero element not declared")
        elif len(m.exps) != self.pres.ngens:
            raise UndeclaredGenerator("monomial over a different generator list")

    @property
    def engine(self):
        return engine_for(self.pres, self.preadd, self.budget,
                          self.cancellative_rule)

    @property
    def separators(self) -> SeparatorFamily:
        return separators_for(self.pres, self.preadd)

    def one(self) -> Monomial:
        return self.pres.one()

    def zero(self) -> Optional[Monomial]:
        return ZERO_MONOMIAL if self.pres.has_zero else None

    def generator(self, name: str) -> Monomial:
        return self.pres.gen(name)

    def elements(self, max_degree: Optional[int] = None) -> Tuple[Monomial, ...]:
        fin = self.pres.finite_elements(self.budget)
        if fin is not None:
            return tuple(sorted(fin, key=lambda m: m.key()))
        d = self.budget.max_degree if max_degree is None else max_degree
        return tuple(sorted(set(self.pres.elements(d, self.budget)),
                            key=lambda m: m.key()))

    def is_finite(self) -> bool:
        return self.pres.finite_elements(self.budget) is not None

    def mul(self, a: Monomial, b: Monomial) -> Monomial:
        return self.pres.mul(a, b)

    def eq(self, a: Monomial, b: Monomial) -> bool:
        return self.pres.monoid_equal(a, b, self.budget).is_holds

    def monoid_eq_decision(self, a: Monomial, b: Monomial) -> Decision:
        return self.pres.monoid_equal(a, b, self.budget)

    def sum_of(self, els: Union[FormalSum, Iterable[Monomial]]) -> FormalSum:
        if isinstance(els, FormalSum):
            return els
        terms = list(els)
        for m in terms:
            self._check_monomial(m)
        return FormalSum.of(terms)

    def holds(self, lhs, rhs) -> Decision:
        return self.engine.decide(self.sum_of(lhs), self.sum_of(rhs),
                                  self.separators)

    def render(self, a: Monomial) -> str:
        return self.pres.render(a)

    def render_sum(self, els) -> str:
        return self.pres.render_sum(self.sum_of(els))

    def element_key(self, a: Monomial):
        return a.key()


@dataclass(frozen=True)
class EmbeddedBlueprint(Blueprint):
    """A multiplicative subset of a finite semiring, carrying the exact
    pre-addition: sums are related iff they evaluate equally."""

    semiring: FiniteSemiring
    subset: Tuple[int, ...]
    label: str = ""

    def __post_init__(self) -> None:
        R = self.semiring
        members = set(self.subset)
        if R.zero not in members or R.one not in members:
            raise NotMultiplicative("subset must contain zero and one")
        for a in self.subset:
            for b in self.subset:
                if R.mul[a][b] not in members:
                    raise NotMultiplicative(
                        "subset not closed: %s * %s" % (R.labels[a], R.labels[b]))

    def one(self) -> int:
        return self.semiring.one

    def zero(self) -> int:
        return self.semiring.zero

    def elements(self, max_degree: Optional[int] = None) -> Tuple[int, ...]:
        return self.subset

    def is_finite(self) -> bool:
        return True

    def mul(self, a: int, b: int) -> int:
        return self.semiring.mul[a][b]

    def eq(self, a: int, b: int) -> bool:
        return a == b

    def holds(self, lhs, rhs) -> Decision:
        R = self.semiring
        left = R.add_many(list(lhs))
        right = R.add_many(list(rhs))
        if left == right:
            return Decision.holds()
        return Decision.fails(left=R.labels[left], right=R.labels[right])

    def render(self, a: int) -> str:
        return self.semiring.labels[a]

    def element_key(self, a: int):
        return a

    def to_presented(self, budget: Budget = DEFAULT_BUDGET) -> "PresentedBlueprint":
        """Present the same blueprint by generators and relations: one
        generator per carrier element other than 0 and 1, the full
        multiplication table, and the binary addition table."""
        R = self.semiring
        backing = [i for i in self.subset if i not in (R.zero, R.one)]
        used = {"0", "1", "empty"}
        gens: List[str] = []
        for i in backing:
            name = R.labels[i] if _is_identifier(R.labels[i]) else "e%d" % i
            while name in used:
                name += "_"
            used.add(name)
            gens.append(name)
        ngens = len(gens)

        def mono(i: int) -> Monomial:
            if i == R.zero:
                return ZERO_MONOMIAL
            if i == R.one:
                return Monomial((0,) * ngens)
            j = backing.index(i)
            return Monomial(tuple(1 if k == j else 0 for k in range(ngens)))

        relations: List[Tuple[Monomial, Monomial]] = []
        for a in self.subset:
            for b in self.subset:
                if a > b:
                    continue
                ma, mb = mono(a), mono(b)
                if ma.is_zero or mb.is_zero:
                    continue  # the zero row of the table is absorption
                lhs = Monomial(tuple(x + y for x, y in zip(ma.exps, mb.exps)))
                rhs = mono(R.mul[a][b])
                if lhs != rhs:
                    relations.append((lhs, rhs))
        pres = MonoidPresentation(tuple(gens), tuple(relations), True)
        preadd: List[SumPair] = [(FormalSum.single(ZERO_MONOMIAL), FormalSum.empty())]
        for a in self.subset:
            for b in self.subset:
                if a > b:
                    continue
                s = R.add[a][b]
                if s not in set(self.subset):
                    raise NotMultiplicative(
                        "subset is not additively closed; present it by hand")
                preadd.append((FormalSum.of([mono(a), mono(b)]),
                               FormalSum.single(mono(s))))
        return PresentedBlueprint(pres, _dedup(tuple(preadd)), budget,
                                  label=self.label or "presented semiring")

    def presentation_map(self, budget: Budget = DEFAULT_BUDGET
                         ) -> Tuple["PresentedBlueprint", "BlueprintMorphism"]:
        """The presented form together with the carrier identification."""
        P = self.to_presented(budget)
        R = self.semiring
        backing = [i for i in self.subset if i not in (R.zero, R.one)]

        def mono(i: int) -> Monomial:
            if i == R.zero:
                return ZERO_MONOMIAL
            if i == R.one:
                return P.pres.one()
            return P.generator(P.pres.generators[backing.index(i)])

        data = tuple((i, mono(i)) for i in self.subset)
        return P, BlueprintMorphism(self, P, data, name="present")


@dataclass(frozen=True)
class ProductBlueprint(Blueprint):
    """Componentwise product; a sum relation holds iff it holds in every
    component."""

    factors: Tuple[Blueprint, ...]
    label: str = ""

    def one(self) -> Tuple:
        return tuple(f.one() for f in self.factors)

    def zero(self) -> Optional[Tuple]:
        zs = tuple(f.zero() for f in self.factors)
        return None if any(z is None for z in zs) else zs

    def elements(self, max_degree: Optional[int] = None) -> Tuple:
        pools = [f.elements(max_degree) for f in self.factors]
        return tuple(itertools.product(*pools))

    def is_finite(self) -> bool:
        return all(f.is_finite() for f in self.factors)

    def mul(self, a: Tuple, b: Tuple) -> Tuple:
        return tuple(f.mul(x, y) for f, x, y in zip(self.factors, a, b))

    def eq(self, a: Tuple, b: Tuple) -> bool:
        return all(f.eq(x, y) for f, x, y in zip(self.factors, a, b))

    def holds(self, lhs, rhs) -> Decision:
        ls, rs = list(lhs), list(rhs)
        checks = []
        for i, f in enumerate(self.factors):
            checks.append(f.holds([a[i] for a in ls], [b[i] for b in rs]))
        return all_hold(checks)

    def render(self, a: Tuple) -> str:
        return "(%s)" % ", ".join(f.render(x) for f, x in zip(self.factors, a))

    def element_key(self, a: Tuple):
        return tuple(f.element_key(x) for f, x in zip(self.factors, a))


@dataclass(frozen=True)
class EqualizerBlueprint(Blueprint):
    """The subblueprint of elements on which two parallel morphisms agree,
    with the restricted pre-addition."""

    inner: Blueprint
    members: Tuple
    complete: bool
    label: str = ""

    def one(self):
        return self.inner.one()

    def zero(self):
        z = self.inner.zero()
        return z if z is not None and any(self.inner.eq(z, m) for m in self.members) else None

    def elements(self, max_degree: Optional[int] = None) -> Tuple:
        return self.members

    def is_finite(self) -> bool:
        return self.complete

    def mul(self, a, b):
        return self.inner.mul(a, b)

    def eq(self, a, b) -> bool:
        return self.inner.eq(a, b)

    def holds(self, lhs, rhs) -> Decision:
        return self.inner.holds(lhs, rhs)

    def render(self, a) -> str:
        return self.inner.render(a)

    def element_key(self, a):
        return self.inner.element_key(a)


def _is_identifier(s: str) -> bool:
    return s.isidentifier() and s not in ("empty",)


# ---------------------------------------------------------------------------
# morphisms


@dataclass(frozen=True)
class BlueprintMorphism:
    """A map of blueprints: multiplicative, unit preserving, and sending
    every generating sum relation of the source to one that holds in the
    target.

    ``data`` is a tuple of pairs: (generator name, target element) when the
    source is presented, (source element, target element) otherwise.
    """

    source: Blueprint
    target: Blueprint
    data: Tuple[Tuple[object, object], ...]
    name: str = ""

    def _table(self) -> Dict:
        return dict(self.data)

    def __call__(self, el):
        if isinstance(self.source, PresentedBlueprint):
            return self._apply_monomial(el)
        table = self._table()
        for key, value in self.data:
            if self.source.eq(key, el):
                return value
        raise TypeMismatch("element outside the tabulated carrier: %r" % (el,))

    def _apply_monomial(self, m: Monomial):
        tgt = self.target
        if m.is_zero:
            z = tgt.zero()
            if z is None:
                raise TypeMismatch("target has no zero to receive 0")
            return z
        table = self._table()
        out = tgt.one()
        names = self.source.pres.generators
        for g, e in zip(names, m.exps):
            if e == 0:
                continue
            if g not in table:
                raise TypeMismatch("no image assigned to generator %s" % g)
            out = tgt.mul(out, tgt.power(table[g], e))
        return out

    def apply_sum(self, els: Iterable) -> List:
        if isinstance(els, FormalSum):
            els = els.terms
        return [self(e) for e in els]

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return "<morphism %s>" % (self.name or "?")


def identity_morphism(B: Blueprint) -> BlueprintMorphism:
    if isinstance(B, PresentedBlueprint):
        data = tuple((g, B.generator(g)) for g in B.pres.generators)
    else:
        data = tuple((a, a) for a in B.elements())
    return BlueprintMorphism(B, B, data, name="id")


def compose(first: BlueprintMorphism, then: BlueprintMorphism) -> BlueprintMorphism:
    """The morphism `then` after `first`."""
    if first.target is not then.source and first.target != then.source:
        raise TypeMismatch("composition endpoints do not match")
    if isinstance(first.source, PresentedBlueprint):
        data = tuple((g, then(first(first.source.generator(g))))
                     for g in first.source.pres.generators)
    else:
        data = tuple((a, then(b)) for a, b in first.data)
    return BlueprintMorphism(first.source, then.target, data,
                             name="%s;%s" % (first.name, then.name))


def _sum_candidates(B: Blueprint, max_terms: int) -> List[Tuple]:
    """All formal sums over the carrier with at most max_terms terms,
    including the empty sum, as sorted tuples."""
    els = B.elements()
    out: List[Tuple] = [()]
    for k in range(1, max_terms + 1):
        out.extend(itertools.combinations_with_replacement(els, k))
    return out


def validate_morphism(f: BlueprintMorphism, max_terms: int = 3) -> Decision:
    """Check multiplicativity on the presented relations (or the whole
    finite carrier) and the generating sum relations."""
    src, tgt = f.source, f.target
    checks: List[Decision] = []
    try:
        if isinstance(src, PresentedBlueprint):
            for l, r in src.pres.relations:
                checks.append(tgt.monoid_eq_decision(f(l), f(r)))
            for x, y in src.preadd:
                checks.append(tgt.holds(f.apply_sum(x), f.apply_sum(y)))
            if src.pres.has_zero:
                f(ZERO_MONOMIAL)  # raises when the target cannot take it
        else:
            els = src.elements()
            if not tgt.eq(f(src.one()), tgt.one()):
                checks.append(Decision.fails(reason="unit not preserved"))
            z = src.zero()
            if z is not None:
                tz = tgt.zero()
                if tz is None or not tgt.eq(f(z), tz):
                    checks.append(Decision.fails(reason="zero not preserved"))
            for a in els:
                for b in els:
                    if not tgt.eq(f(src.mul(a, b)), tgt.mul(f(a), f(b))):
                        checks.append(Decision.fails(
                            reason="not multiplicative",
                            at=(src.render(a), src.render(b))))
            checks.append(_sum_relations_preserved(f, max_terms))
    except TypeMismatch as exc:
        return Decision.fails(reason=str(exc))
    return all_hold(checks) if checks else Decision.holds()


def _sum_relations_preserved(f: BlueprintMorphism, max_terms: int) -> Decision:
    """Bounded scan: every sum relation of the source with few terms must
    map to one that holds in the target."""
    src, tgt = f.source, f.target
    if isinstance(src, EmbeddedBlueprint) and src.subset == tuple(range(src.semiring.size)):
        # binary sums generate the full pre-addition of a semiring
        R = src.semiring
        checks = [tgt.holds(f.apply_sum([R.zero]), [])]
        for a in src.subset:
            for b in src.subset:
                if a > b:
                    continue
                checks.append(tgt.holds(f.apply_sum([a, b]),
                                        f.apply_sum([R.add[a][b]])))
        return all_hold(checks)
    sums = _sum_candidates(src, max_terms)
    checks = []
    for i, ls in enumerate(sums):
        for rs in sums[i + 1:]:
            if src.holds(list(ls), list(rs)).is_holds:
                checks.append(tgt.holds(f.apply_sum(list(ls)),
                                        f.apply_sum(list(rs))))
    return all_hold(checks) if checks else Decision.holds()


# ---------------------------------------------------------------------------
# constructors


def from_monoid(pres: MonoidPresentation,
                budget: Budget = DEFAULT_BUDGET,
                label: str = "") -> PresentedBlueprint:
    """The blueprint with the smallest pre-addition: sums are related only
    when they are equal term by term."""
    if pres.has_zero:
        raise ZeroPresent("use from_monoid_with_zero for monoids with zero")
    return PresentedBlueprint(pres, (), budget, label=label)


def from_monoid_with_zero(pres: MonoidPresentation,
                          budget: Budget = DEFAULT_BUDGET,
                          label: str = "") -> PresentedBlueprint:
    """The blueprint of a monoid with zero: the absorbing element is
    identified with the empty sum and nothing else is imposed."""
    if not pres.has_zero:
        raise NoZero("presentation declares no zero element")
    gen = (FormalSum.single(ZERO_MONOMIAL), FormalSum.empty())
    return PresentedBlueprint(pres, (gen,), budget, label=label)


def from_semiring(R: FiniteSemiring, label: str = "") -> EmbeddedBlueprint:
    bad = check_semiring_axioms(R)
    if bad.is_fails:
        raise AxiomViolation(str(bad.info()))
    return EmbeddedBlueprint(R, tuple(range(R.size)), label=label)


def cyclotomic(n: int, budget: Budget = DEFAULT_BUDGET) -> PresentedBlueprint:
    """The blueprint on {0} and the n-th roots of unity, with one sum
    relation per nontrivial subgroup: the members of a subgroup add to 0."""
    if n < 1:
        raise BlueError("order must be positive")
    if n == 1:
        pres = MonoidPresentation((), (), True)
        return from_monoid_with_zero(pres, budget, label="cyclotomic(1)")
    pres = MonoidPresentation(("z",), ((Monomial((n,)), Monomial((0,))),), True)
    zero = FormalSum.single(ZERO_MONOMIAL)
    preadd: List[SumPair] = [(zero, FormalSum.empty())]
    for d in range(2, n + 1):
        if n % d != 0:
            continue
        members = [Monomial((k * (n // d),)) for k in range(d)]
        preadd.append((FormalSum.of(members), zero))
    return PresentedBlueprint(pres, tuple(preadd), budget,
                              label="cyclotomic(%d)" % n)


def free_extension(B: Blueprint, names: Sequence[str],
                   label: str = "") -> PresentedBlueprint:
    """Adjoin free generators; every generating relation lifts to all of its
    monomial multiples, which is exactly what the instance engine does."""
    base = B.to_presented() if isinstance(B, EmbeddedBlueprint) else B
    if not isinstance(base, PresentedBlueprint):
        raise TypeMismatch("free extension needs a presented carrier")
    for name in names:
        if name in base.pres.generators or not _is_identifier(name):
            raise NameClash(name)
    if len(set(names)) != len(names):
        raise NameClash("duplicate new generator")
    gens = base.pres.generators + tuple(names)
    pad = (0,) * len(names)

    def lift(m: Monomial) -> Monomial:
        return m if m.is_zero else Monomial(m.exps + pad)

    relations = tuple((lift(l), lift(r)) for l, r in base.pres.relations)
    pres = MonoidPresentation(gens, relations, base.pres.has_zero)
    preadd = tuple((FormalSum.of(lift(t) for t in x.terms),
                    FormalSum.of(lift(t) for t in y.terms))
                   for x, y in base.preadd)
    return PresentedBlueprint(pres, preadd, base.budget,
                              label=label or (base.label + "[%s]" % ",".join(names)))


def initial_blueprint() -> PresentedBlueprint:
    """The monoid {1} with empty pre-addition."""
    return PresentedBlueprint(MonoidPresentation((), (), False), (),
                              label="initial")


def terminal_blueprint() -> PresentedBlueprint:
    """One element, every relation holds: 1 is identified with 0 and the
    empty sum."""
    pres = MonoidPresentation((), ((Monomial(()), ZERO_MONOMIAL),), True)
    preadd = ((FormalSum.single(ZERO_MONOMIAL), FormalSum.empty()),)
    return PresentedBlueprint(pres, preadd, label="terminal")


def holds(B: Blueprint, lhs, rhs) -> Decision:
    return B.holds(lhs, rhs)


# ---------------------------------------------------------------------------
# classification


@dataclass(frozen=True)
class ClassifyRecord:
    proper: Decision
    with_zero: Decision
    with_inverses: Decision
    cancellative: Decision
    units: Tuple
    integral_elements: Tuple
    is_blue_field: Decision


def _monoid_only(B: Blueprint) -> bool:
    """True when the pre-addition is generated by at most 0 == empty; such
    blueprints behave like bare monoids and admit exact shortcuts."""
    if not isinstance(B, PresentedBlueprint):
        return False
    zero_gen = (FormalSum.single(ZERO_MONOMIAL), FormalSum.empty())
    return all(g == zero_gen for g in B.preadd) and not B.cancellative_rule


def classify(B: Blueprint, max_terms: int = 3) -> ClassifyRecord:
    els = list(B.elements())
    finite = B.is_finite()
    one = B.one()

    units = tuple(a for a in els
                  if any(B.eq(B.mul(a, b), one) for b in els))
    integral = tuple(a for a in els
                     if len({_key_of(B, B.mul(a, x)) for x in els}) == len(els))

    if _monoid_only(B):
        assert isinstance(B, PresentedBlueprint)
        has_zero_rel = bool(B.preadd)
        proper = Decision.holds()
        with_zero = Decision.holds(witness="0") if has_zero_rel else Decision.fails()
        with_inverses = Decision.fails()
        cancellative = Decision.holds()
    else:
        proper = _properness(B, els, finite)
        with_zero = _exists(B, els, finite, lambda a: B.holds([a], []))
        with_inverses = _exists(B, els, finite, lambda a: B.holds([one, a], []))
        cancellative = _cancellativity(B, els, finite, max_terms)

    blue_field = _blue_field(B, els, finite, proper, units)
    return ClassifyRecord(proper, with_zero, with_inverses, cancellative,
                          units, integral, blue_field)


def _key_of(B: Blueprint, a):
    return B.element_key(a)


def _is_zero_el(B: Blueprint, a) -> bool:
    z = B.zero()
    return z is not None and B.eq(a, z)


def _exists(B: Blueprint, els, finite: bool, pred) -> Decision:
    saw_unknown = False
    for a in els:
        d = pred(a)
        if d.is_holds:
            return Decision.holds(witness=B.render(a))
        if d.is_unknown:
            saw_unknown = True
    if finite and not saw_unknown:
        return Decision.fails()
    return Decision.unknown(scanned=len(els))


def _properness(B: Blueprint, els, finite: bool) -> Decision:
    if isinstance(B, EmbeddedBlueprint):
        return Decision.holds()
    saw_unknown = False
    groups = _singleton_groups(B, els)
    for group in groups:
        for i, a in enumerate(group):
            for b in group[i + 1:]:
                if B.eq(a, b):
                    continue
                d = B.holds([a], [b])
                if d.is_holds:
                    return Decision.fails(witness=(B.render(a), B.render(b)))
                if d.is_unknown:
                    saw_unknown = True
    if saw_unknown:
        return Decision.unknown(scanned=len(els))
    return Decision.holds() if finite else Decision.holds(up_to_degree=True)


def _singleton_groups(B: Blueprint, els) -> List[List]:
    """Group elements by separator values so only plausible pairs reach the
    engine; sound because separated elements can never be related."""
    if isinstance(B, PresentedBlueprint) and B.separators.morphisms():
        sums = [FormalSum.single(a) for a in els]
        parts = B.separators.refine_partition(sums)
        return [[els[i] for i in part] for part in parts]
    return [list(els)]


def _cancellativity(B: Blueprint, els, finite: bool, max_terms: int) -> Decision:
    if isinstance(B, EmbeddedBlueprint):
        R = B.semiring
        reach = set(B.subset)
        frontier = list(reach)
        while frontier:
            nxt = []
            for v in frontier:
                for a in B.subset:
                    s = R.add[v][a]
                    if s not in reach:
                        reach.add(s)
                        nxt.append(s)
            frontier = nxt
        for a in reach:
            for b in reach:
                for c in reach:
                    if R.add[a][c] == R.add[b][c] and a != b:
                        return Decision.fails(witness=(R.labels[a], R.labels[b],
                                                       R.labels[c]))
        return Decision.holds()
    if isinstance(B, PresentedBlueprint):
        if B.cancellative_rule:
            return Decision.holds(by_construction=True)
        saw_unknown = False
        for l, r in B.engine.derived_relations():
            c = l.common(r)
            if c.is_empty:
                continue
            d = B.holds(l.remove(c), r.remove(c))
            if d.is_fails:
                return Decision.fails(witness=(B.render_sum(l), B.render_sum(r)))
            if d.is_unknown:
                saw_unknown = True
        if finite and B.engine.exact and not saw_unknown:
            return _cancellativity_scan(B, els, max_terms)
        return Decision.unknown()
    return Decision.unknown()


def _cancellativity_scan(B: Blueprint, els, max_terms: int) -> Decision:
    sums = _sum_candidates(B, max_terms - 1)
    for ls, rs in itertools.combinations(sums, 2):
        for t in els:
            if B.holds(list(ls) + [t], list(rs) + [t]).is_holds:
                if not B.holds(list(ls), list(rs)).is_holds:
                    return Decision.fails(witness=(B.render_sum(ls),
                                                   B.render_sum(rs),
                                                   B.render(t)))
    return Decision.holds(up_to_terms=max_terms)


def _blue_field(B: Blueprint, els, finite: bool, proper: Decision,
                units) -> Decision:
    one_not_zero = B.holds([B.one()], [])
    if one_not_zero.is_holds:
        return Decision.fails(reason="1 collapses to the empty sum")
    checks = [proper]
    unit_keys = {_key_of(B, u) for u in units}
    for a in els:
        if _key_of(B, a) in unit_keys:
            continue
        z = B.holds([a], [])
        if not z.is_holds:
            checks.append(Decision.fails(witness=B.render(a))
                          if z.is_fails else Decision.unknown())
    if not finite:
        checks.append(Decision.unknown(reason="carrier not enumerated"))
    if one_not_zero.is_unknown:
        checks.append(Decision.unknown())
    return all_hold(checks)


def is_monoid_with_zero(B: Blueprint, max_terms: int = 2) -> Decision:
    """Whether the pre-addition is exactly the one of a monoid with zero:
    sums are related iff equal after erasing zero terms.  A Fails comes with
    a witnessing relation that a bare monoid with zero cannot prove."""
    if _monoid_only(B) and isinstance(B, PresentedBlueprint) and B.preadd:
        return Decision.holds()
    z = B.zero()
    if z is None:
        return Decision.fails(reason="no zero element")
    if not B.holds([z], []).is_holds:
        return Decision.fails(reason="zero is not the empty sum")
    sums = _sum_candidates(B, max_terms)

    def strip(els: Tuple) -> Tuple:
        return tuple(sorted((e for e in els if not B.eq(e, z)),
                            key=B.element_key))

    saw_unknown = False
    for i, ls in enumerate(sums):
        for rs in sums[i + 1:]:
            d = B.holds(list(ls), list(rs))
            if d.is_unknown:
                saw_unknown = True
            trivially = strip(ls) == strip(rs)
            if d.is_holds and not trivially:
                return Decision.fails(witness=(B.render_sum(ls),
                                               B.render_sum(rs)))
            if d.is_fails and trivially:
                return Decision.fails(reason="zero terms are not erasable")
    if saw_unknown or not B.is_finite():
        return Decision.unknown()
    return Decision.holds(up_to_terms=max_terms)


# ---------------------------------------------------------------------------
# closure functors


def proper_closure(B: Blueprint) -> Tuple[Blueprint, BlueprintMorphism]:
    """Quotient by the relation `a related to b as singletons`; the result
    proves no new singleton relations up to the scan bound."""
    if isinstance(B, EmbeddedBlueprint):
        return B, identity_morphism(B)
    if not isinstance(B, PresentedBlueprint):
        raise TypeMismatch("properization needs a presented carrier")
    current = B
    for _ in range(4):
        els = list(current.elements())
        merged: List[Tuple[Monomial, Monomial]] = []
        for group in _singleton_groups(current, els):
            for i, a in enumerate(group):
                for b in group[i + 1:]:
                    if current.eq(a, b):
                        continue
                    if current.holds([a], [b]).is_holds:
                        merged.append((a, b))
        if not merged:
            break
        pres = MonoidPresentation(current.pres.generators,
                                  current.pres.relations + tuple(merged),
                                  current.pres.has_zero)
        current = PresentedBlueprint(pres, current.preadd, current.budget,
                                     current.cancellative_rule,
                                     label=current.label)
    proj = BlueprintMorphism(B, current, tuple(
        (g, current.pres.normalize(current.generator(g)))
        for g in B.pres.generators), name="proper")
    return current, proj


def zero_closure(B: Blueprint) -> Tuple[Blueprint, BlueprintMorphism]:
    if classify(B).with_zero.is_holds:
        return B, identity_morphism(B)
    if not isinstance(B, PresentedBlueprint):
        raise TypeMismatch("zero adjunction needs a presented carrier")
    pres = MonoidPresentation(B.pres.generators, B.pres.relations, True)
    preadd = B.preadd + ((FormalSum.single(ZERO_MONOMIAL), FormalSum.empty()),)
    C = PresentedBlueprint(pres, preadd, B.budget, B.cancellative_rule,
                           label=B.label + "+0" if B.label else "")
    iota = BlueprintMorphism(B, C, tuple(
        (g, C.generator(g)) for g in B.pres.generators), name="adjoin zero")
    return C, iota


def inverse_closure(B: Blueprint) -> Tuple[Blueprint, BlueprintMorphism]:
    """Two cases, mirroring the construction's proof: if some element
    already satisfies 1 + a == empty, nothing to do; otherwise adjoin a
    square root of 1 with 1 + neg == empty and properize."""
    record = classify(B)
    if record.with_inverses.is_holds:
        return B, identity_morphism(B)
    conv: Optional[BlueprintMorphism] = None
    if isinstance(B, EmbeddedBlueprint):
        base, conv = B.presentation_map()
    else:
        base = B
    if not isinstance(base, PresentedBlueprint):
        raise TypeMismatch("inverse adjunction needs a presented carrier")
    name = "neg"
    while name in base.pres.generators:
        name += "_"
    gens = base.pres.generators + (name,)
    pad = (0,)

    def lift(m: Monomial) -> Monomial:
        return m if m.is_zero else Monomial(m.exps + pad)

    neg = Monomial((0,) * len(base.pres.generators) + (1,))
    relations = tuple((lift(l), lift(r)) for l, r in base.pres.relations)
    relations += ((Monomial((0,) * len(base.pres.generators) + (2,)),
                   Monomial((0,) * len(gens))),)
    pres = MonoidPresentation(gens, relations, base.pres.has_zero)
    preadd = tuple((FormalSum.of(lift(t) for t in x.terms),
                    FormalSum.of(lift(t) for t in y.terms))
                   for x, y in base.preadd)
    preadd += ((FormalSum.of([pres.one(), neg]), FormalSum.empty()),)
    C = PresentedBlueprint(pres, preadd, base.budget, base.cancellative_rule,
                           label=base.label + "+inv" if base.label else "")
    C, _ = proper_closure(C)
    iota = BlueprintMorphism(base, C, tuple(
        (g, C.pres.normalize(lift(base.generator(g))))
        for g in base.pres.generators), name="adjoin inverses")
    if conv is not None:
        iota = compose(conv, iota)
    return C, iota


def cancellative_closure(B: Blueprint) -> Tuple[Blueprint, BlueprintMorphism]:
    if isinstance(B, EmbeddedBlueprint):
        if classify(B).cancellative.is_holds:
            return B, identity_morphism(B)
        return _cancellative_semiring_quotient(B)
    if not isinstance(B, PresentedBlueprint):
        raise TypeMismatch("cancellative closure needs a presented carrier")
    if B.cancellative_rule:
        return B, identity_morphism(B)
    C = PresentedBlueprint(B.pres, B.preadd, B.budget, True, label=B.label)
    iota = BlueprintMorphism(B, C, tuple(
        (g, C.generator(g)) for g in B.pres.generators), name="cancellative")
    return C, iota


def _cancellative_semiring_quotient(B: EmbeddedBlueprint):
    R = B.semiring
    n = R.size
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x: int, y: int) -> None:
        parent[find(x)] = find(y)

    changed = True
    while changed:
        changed = False
        for a in range(n):
            for b in range(a + 1, n):
                if find(a) == find(b):
                    continue
                if any(find(R.add[a][c]) == find(R.add[b][c]) for c in range(n)):
                    union(a, b)
                    changed = True
    reps = sorted({find(i) for i in range(n)})
    index = {r: i for i, r in enumerate(reps)}
    labels = tuple(R.labels[r] for r in reps)
    add = tuple(tuple(index[find(R.add[a][b])] for b in reps) for a in reps)
    mul = tuple(tuple(index[find(R.mul[a][b])] for b in reps) for a in reps)
    Q = FiniteSemiring(labels, add, mul, index[find(R.zero)], index[find(R.one)])
    C = EmbeddedBlueprint(Q, tuple(sorted({index[find(i)] for i in B.subset})),
                          label=B.label + " cancellative" if B.label else "")
    proj = BlueprintMorphism(B, C, tuple((i, index[find(i)]) for i in B.subset),
                             name="cancellative quotient")
    return C, proj


# ---------------------------------------------------------------------------
# localization


@dataclass(frozen=True)
class Fraction:
    """a over s, with s drawn from the inverted multiplicative set."""

    num: Monomial
    den: Monomial

    def render(self, B: PresentedBlueprint) -> str:
        return "%s/%s" % (B.render(self.num), B.render(self.den))


def fractions_equal(B: PresentedBlueprint, s_closure: Sequence[Monomial],
                    x: Fraction, y: Fraction) -> Decision:
    """Saturated cross-multiplication: equal iff t*num_x*den_y equals
    t*num_y*den_x for some witness t in the inverted set."""
    for t in s_closure:
        left = B.mul(t, B.mul(x.num, y.den))
        right = B.mul(t, B.mul(y.num, x.den))
        if B.eq(left, right):
            return Decision.holds(witness=B.render(t))
    return Decision.fails() if B.is_finite() else Decision.unknown()


def multiplicative_closure(B: Blueprint, seeds: Sequence) -> List:
    """Close the seed elements under product, bounded by the budget."""
    out = [B.one()]
    keys = {_key_of(B, B.one())}
    frontier = [B.one()]
    cap = 512
    while frontier and len(out) < cap:
        nxt = []
        for v in frontier:
            for s in seeds:
                p = B.mul(v, s)
                if isinstance(B, PresentedBlueprint) and not p.is_zero:
                    if p.degree() > B.budget.max_degree * 2:
                        continue
                k = _key_of(B, p)
                if k not in keys:
                    keys.add(k)
                    out.append(p)
                    nxt.append(p)
        frontier = nxt
    return out


def localize(B: Blueprint, elements: Sequence,
             label: str = "") -> Tuple[Blueprint, BlueprintMorphism]:
    """Invert the multiplicative set generated by the given elements.  On
    presentations this adjoins one formal inverse per element; embedded
    carriers get the finite fraction semiring."""
    if isinstance(B, EmbeddedBlueprint):
        return _localize_embedded(B, elements, label)
    if not isinstance(B, PresentedBlueprint):
        raise TypeMismatch("localization needs a presented carrier")
    seeds = list(elements)
    for s in seeds:
        B._check_monomial(s)
    names: List[str] = []
    taken = set(B.pres.generators)
    for s in seeds:
        base = None
        if not s.is_zero and sum(1 for e in s.exps if e) == 1:
            i = next(i for i, e in enumerate(s.exps) if e)
            if s.exps[i] == 1:
                base = B.pres.generators[i] + "_inv"
        if base is None:
            base = "inv%d" % len(names)
        while base in taken:
            base += "_"
        taken.add(base)
        names.append(base)
    gens = B.pres.generators + tuple(names)
    pad = (0,) * len(names)

    def lift(m: Monomial) -> Monomial:
        return m if m.is_zero else Monomial(m.exps + pad)

    relations = [(lift(l), lift(r)) for l, r in B.pres.relations]
    for k, s in enumerate(seeds):
        inv = Monomial((0,) * B.pres.ngens + tuple(
            1 if j == k else 0 for j in range(len(names))))
        if s.is_zero:
            # inverting zero forces 1 = 0 and the blueprint collapses
            relations.append((Monomial((0,) * len(gens)), ZERO_MONOMIAL))
        else:
            relations.append((Monomial(s.exps + pad[:k] + (1,) + pad[k + 1:]),
                              Monomial((0,) * len(gens))))
    pres = MonoidPresentation(gens, tuple(relations), B.pres.has_zero)
    preadd = tuple((FormalSum.of(lift(t) for t in x.terms),
                    FormalSum.of(lift(t) for t in y.terms))
                   for x, y in B.preadd)
    C = PresentedBlueprint(pres, preadd, B.budget, B.cancellative_rule,
                           label=label or (B.label and B.label + " localized"))
    iota = BlueprintMorphism(B, C, tuple(
        (g, C.pres.normalize(lift(B.generator(g))))
        for g in B.pres.generators), name="localize")
    return C, iota


def _localize_embedded(B: EmbeddedBlueprint, elements: Sequence[int],
                       label: str) -> Tuple[Blueprint, BlueprintMorphism]:
    R = B.semiring
    members = set(B.subset)
    for s in elements:
        if s not in members:
            raise NotMultiplicative("can only invert carrier elements")
    sset = {R.one}
    frontier = [R.one]
    while frontier:
        nxt = []
        for v in frontier:
            for s in elements:
                p = R.mul[v][s]
                if p not in sset:
                    sset.add(p)
                    nxt.append(p)
        frontier = nxt
    s_list = sorted(sset)
    pairs = [(r, s) for r in range(R.size) for s in s_list]

    def same(p: Tuple[int, int], q: Tuple[int, int]) -> bool:
        r1, s1 = p
        r2, s2 = q
        return any(R.mul[t][R.mul[r1][s2]] == R.mul[t][R.mul[r2][s1]]
                   for t in s_list)

    classes: List[List[Tuple[int, int]]] = []
    for p in pairs:
        for cls in classes:
            if same(p, cls[0]):
                cls.append(p)
                break
        else:
            classes.append([p])
    rep = {}
    for i, cls in enumerate(classes):
        for p in cls:
            rep[p] = i

    def norm(r: int, s: int) -> int:
        return rep[(r, s if s in sset else R.one)] if (r, s) in rep else rep[(r, s)]

    labels = tuple("%s/%s" % (R.labels[cls[0][0]], R.labels[cls[0][1]])
                   if cls[0][1] != R.one else R.labels[cls[0][0]]
                   for cls in classes)
    k = len(classes)
    add = [[0] * k for _ in range(k)]
    mul = [[0] * k for _ in range(k)]
    for i, ci in enumerate(classes):
        r1, s1 = ci[0]
        for j, cj in enumerate(classes):
            r2, s2 = cj[0]
            num = R.add[R.mul[r1][s2]][R.mul[r2][s1]]
            add[i][j] = rep[(num, R.mul[s1][s2])]
            mul[i][j] = rep[(R.mul[r1][r2], R.mul[s1][s2])]
    Q = FiniteSemiring(labels, tuple(map(tuple, add)), tuple(map(tuple, mul)),
                       rep[(R.zero, R.one)], rep[(R.one, R.one)])
    bad = check_semiring_axioms(Q)
    if bad.is_fails:
        raise AxiomViolation(str(bad.info()))
    subset = tuple(sorted({rep[(a, s)] for a in B.subset for s in s_list}))
    C = EmbeddedBlueprint(Q, subset, label=label or (B.label and B.label + " localized"))
    iota = BlueprintMorphism(B, C, tuple((a, rep[(a, R.one)]) for a in B.subset),
                             name="localize")
    return C, iota


# ---------------------------------------------------------------------------
# base extension to semirings and rings


@dataclass(frozen=True)
class SemiringPresentation:
    """N[A]/relations: the universal semiring receiving the blueprint."""

    pres: MonoidPresentation
    sum_relations: Tuple[SumPair, ...]
    label: str = ""

    def render(self) -> str:
        return _render_presentation("N", self.pres, self.sum_relations)


@dataclass(frozen=True)
class RingPresentation:
    """Z[A]/ideal: relations are read as differences of the two sides."""

    pres: MonoidPresentation
    sum_relations: Tuple[SumPair, ...]
    label: str = ""

    def render(self) -> str:
        return _render_presentation("Z", self.pres, self.sum_relations)


def _render_presentation(ring: str, pres: MonoidPresentation,
                         sums: Tuple[SumPair, ...]) -> str:
    gens = ", ".join(pres.generators) if pres.generators else ""
    rels: List[str] = []
    for l, r in pres.relations:
        rels.append("%s = %s" % (pres.render(l), pres.render(r)))
    for x, y in sums:
        line = "%s = %s" % (pres.render_sum(x), pres.render_sum(y))
        if line != "0 = empty":
            rels.append(line)
    if pres.has_zero:
        rels.insert(0, "0 = empty")
    body = "(%s)" % ", ".join(rels) if rels else "(0)"
    return "%s[%s] / %s" % (ring, gens, body)


def base_extend_N(B: Blueprint) -> SemiringPresentation:
    if isinstance(B, EmbeddedBlueprint):
        base = B.to_presented()
        check = _nat_extension_agrees(B, base)
        if check.is_fails:
            raise AxiomViolation(str(check.info()))
        return SemiringPresentation(base.pres, base.preadd, label=B.label)
    if not isinstance(B, PresentedBlueprint):
        raise TypeMismatch("base extension needs a presented carrier")
    return SemiringPresentation(B.pres, B.preadd, label=B.label)


def base_extend_Z(B: Blueprint) -> RingPresentation:
    base = B.to_presented() if isinstance(B, EmbeddedBlueprint) else B
    if not isinstance(base, PresentedBlueprint):
        raise TypeMismatch("base extension needs a presented carrier")
    return RingPresentation(base.pres, base.preadd, label=base.label)


def _nat_extension_agrees(B: EmbeddedBlueprint,
                          base: PresentedBlueprint) -> Decision:
    """The presented extension must evaluate back onto the semiring: sums
    over the carrier are related iff their table values agree."""
    R = B.semiring
    mono = {}
    for i in B.subset:
        if i == R.zero:
            mono[i] = ZERO_MONOMIAL
        elif i == R.one:
            mono[i] = base.pres.one()
        else:
            mono[i] = base.generator(base.pres.generators[
                [j for j in B.subset if j not in (R.zero, R.one)].index(i)])
    checks = []
    pool = list(B.subset)
    for a in pool:
        for b in pool:
            want = R.add[a][b]
            got = base.holds([mono[a], mono[b]], [mono[want]])
            checks.append(got)
            if R.mul[a][b] != R.mul[b][a]:
                checks.append(Decision.fails())
    return all_hold(checks)


def _instance_rows(pres: MonoidPresentation, preadd: Tuple[SumPair, ...],
                   budget: Budget) -> Optional[Tuple[List[Monomial], List[List[int]]]]:
    """Spanning monomials and integer relation rows for Z[A]/ideal; None
    when the carrier does not close up at finite size."""
    fin = pres.finite_elements(budget)
    if fin is None:
        return None
    basis = sorted(fin, key=lambda m: m.key())
    index = {m: i for i, m in enumerate(basis)}
    engine = engine_for(pres, preadd, budget, False)
    rows: List[List[int]] = []
    for l, r in engine.derived_relations():
        row = [0] * len(basis)
        ok = True
        for m in l.terms:
            n = pres.normalize(m)
            if n not in index:
                ok = False
                break
            row[index[n]] += 1
        for m in r.terms:
            n = pres.normalize(m)
            if n not in index:
                ok = False
                break
            row[index[n]] -= 1
        if ok and any(row):
            rows.append(row)
    return basis, rows


def _min_entry(mat: List[List[int]], top: int) -> Optional[Tuple[int, int]]:
    best = None
    pivot = None
    for i in range(top, len(mat)):
        for j in range(top, len(mat[0])):
            v = abs(mat[i][j])
            if v and (best is None or v < best):
                best = v
                pivot = (i, j)
    return pivot


def smith_invariants(rows: List[List[int]]) -> List[int]:
    """Nonzero invariant factors of an integer matrix, in divisibility
    order.  Textbook pivoting; the matrices here are small."""
    mat = [row[:] for row in rows if any(row)]
    if not mat:
        return []
    m, n = len(mat), len(mat[0])
    out: List[int] = []
    top = 0
    while top < m and top < n:
        pivot = _min_entry(mat, top)
        if pivot is None:
            break
        while True:
            i, j = pivot
            mat[top], mat[i] = mat[i], mat[top]
            for r in range(m):
                mat[r][top], mat[r][j] = mat[r][j], mat[r][top]
            p = mat[top][top]
            exact = True
            for i in range(top + 1, m):
                q, rem = divmod(mat[i][top], p)
                if rem:
                    exact = False
                for j in range(top, n):
                    mat[i][j] -= q * mat[top][j]
            for j in range(top + 1, n):
                q, rem = divmod(mat[top][j], p)
                if rem:
                    exact = False
                for i in range(top, m):
                    mat[i][j] -= q * mat[i][top]
            if exact:
                break
            # remainders left a smaller entry somewhere; restart on it
            pivot = _min_entry(mat, top)
        out.append(abs(mat[top][top]))
        top += 1
    # a later invariant may fail to be a multiple of an earlier one; repair
    # with gcd/lcm sweeps, which preserve the presented group
    for i in range(len(out)):
        for j in range(i + 1, len(out)):
            a, b = out[i], out[j]
            g = _gcd(a, b)
            out[i], out[j] = g, a * b // g
    return [d for d in out if d]


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def z_rank(r: RingPresentation, budget: Budget = DEFAULT_BUDGET) -> int:
    """Rank of the free part of the additive group of Z[A]/ideal."""
    data = _instance_rows(r.pres, r.sum_relations, budget)
    if data is None:
        raise BlueError("no finite monomial spanning set within the budget")
    basis, rows = data
    return len(basis) - len(smith_invariants(rows))


def lattice_profile(r: RingPresentation,
                    budget: Budget = DEFAULT_BUDGET) -> Tuple[int, Tuple[int, ...]]:
    """Free rank plus nontrivial invariant factors: a complete isomorphism
    invariant of the presented additive group."""
    data = _instance_rows(r.pres, r.sum_relations, budget)
    if data is None:
        raise BlueError("no finite monomial spanning set within the budget")
    basis, rows = data
    inv = smith_invariants(rows)
    return len(basis) - len(inv), tuple(d for d in inv if d != 1)


def extension_lattices_agree(B: Blueprint,
                             budget: Budget = DEFAULT_BUDGET) -> Decision:
    """For carriers with inverses the semiring-side and ring-side relation
    lattices coincide: derived pair differences span the relation ideal."""
    base = B.to_presented() if isinstance(B, EmbeddedBlueprint) else B
    if not isinstance(base, PresentedBlueprint):
        raise TypeMismatch("base extension needs a presented carrier")
    data = _instance_rows(base.pres, base.preadd, budget)
    if data is None:
        return Decision.unknown(reason="no finite spanning set")
    basis, rows = data
    ring_side = smith_invariants(rows)
    # semiring side: differences of every derived pair, including the ones
    # found by completion rather than direct instantiation
    engine = engine_for(base.pres, base.preadd, budget, False)
    index = {m: i for i, m in enumerate(basis)}
    nat_rows: List[List[int]] = []
    seen: Set[Tuple[int, ...]] = set()
    for l, r in engine.derived_relations():
        nl, nr = engine.reduce(l), engine.reduce(r)
        for x, y in ((l, r), (nl, nr)):
            row = [0] * len(basis)
            ok = True
            for m in x.terms:
                n = base.pres.normalize(m)
                if n not in index:
                    ok = False
                    break
                row[index[n]] += 1
            if ok:
                for m in y.terms:
                    n = base.pres.normalize(m)
                    if n not in index:
                        ok = False
                        break
                    row[index[n]] -= 1
            if ok and any(row) and tuple(row) not in seen:
                seen.add(tuple(row))
                nat_rows.append(row)
    nat_side = smith_invariants(nat_rows)
    if nat_side == ring_side:
        return Decision.holds(invariants=tuple(ring_side))
    return Decision.fails(semiring=tuple(nat_side), ring=tuple(ring_side))


# ---------------------------------------------------------------------------
# categorical constructions


def tensor(f: BlueprintMorphism, g: BlueprintMorphism,
           label: str = "") -> Tuple[Blueprint, BlueprintMorphism, BlueprintMorphism]:
    """Pushout of presentations over the common source: disjoint generator
    lists, both relation sets, and one identification per base generator."""
    if f.source != g.source:
        raise SourceMismatch("tensor factors must share their source")
    conv_c = conv_d = None
    if isinstance(f.target, EmbeddedBlueprint):
        C, conv_c = f.target.presentation_map()
        f = compose(f, conv_c)
    else:
        C = f.target
    if isinstance(g.target, EmbeddedBlueprint):
        D, conv_d = g.target.presentation_map()
        g = compose(g, conv_d)
    else:
        D = g.target
    if not isinstance(C, PresentedBlueprint) or not isinstance(D, PresentedBlueprint):
        raise TypeMismatch("tensor needs presented factors")
    left = C.pres.generators
    rename: Dict[str, str] = {}
    taken = set(left)
    for g2 in D.pres.generators:
        name = g2
        while name in taken:
            name += "_r"
        rename[g2] = name
        taken.add(name)
    gens = left + tuple(rename[g2] for g2 in D.pres.generators)
    has_zero = C.pres.has_zero or D.pres.has_zero
    nl, nr = len(left), len(D.pres.generators)

    def lift_left(m: Monomial) -> Monomial:
        return m if m.is_zero else Monomial(m.exps + (0,) * nr)

    def lift_right(m: Monomial) -> Monomial:
        return m if m.is_zero else Monomial((0,) * nl + m.exps)

    relations = [(lift_left(l), lift_left(r)) for l, r in C.pres.relations]
    relations += [(lift_right(l), lift_right(r)) for l, r in D.pres.relations]
    base = f.source
    if isinstance(base, PresentedBlueprint):
        base_elements = [base.generator(g3) for g3 in base.pres.generators]
    else:
        base_elements = list(base.elements())
    for b in base_elements:
        relations.append((lift_left(f(b)), lift_right(g(b))))
    pres = MonoidPresentation(gens, tuple(relations), has_zero)
    preadd = tuple((FormalSum.of(lift_left(t) for t in x.terms),
                    FormalSum.of(lift_left(t) for t in y.terms))
                   for x, y in C.preadd)
    preadd += tuple((FormalSum.of(lift_right(t) for t in x.terms),
                     FormalSum.of(lift_right(t) for t in y.terms))
                    for x, y in D.preadd)
    if has_zero and not any(x == FormalSum.single(ZERO_MONOMIAL) and y.is_empty
                            for x, y in preadd):
        preadd += ((FormalSum.single(ZERO_MONOMIAL), FormalSum.empty()),)
    T = PresentedBlueprint(pres, _dedup(preadd), C.budget,
                           label=label or "tensor")
    i1 = BlueprintMorphism(C, T, tuple(
        (g3, T.pres.normalize(lift_left(C.generator(g3))))
        for g3 in C.pres.generators), name="left factor")
    i2 = BlueprintMorphism(D, T, tuple(
        (g3, T.pres.normalize(lift_right(D.generator(g3))))
        for g3 in D.pres.generators), name="right factor")
    if conv_c is not None:
        i1 = compose(conv_c, i1)
    if conv_d is not None:
        i2 = compose(conv_d, i2)
    return T, i1, i2


def _dedup(pairs: Tuple[SumPair, ...]) -> Tuple[SumPair, ...]:
    seen: Set[SumPair] = set()
    out: List[SumPair] = []
    for p in pairs:
        if p not in seen:
            seen.add(p)
            out.append(p)
    return tuple(out)


def product(factors: Sequence[Blueprint],
            label: str = "") -> Tuple[Blueprint, List[BlueprintMorphism]]:
    P = ProductBlueprint(tuple(factors), label=label or "product")
    projections = []
    for i, f in enumerate(factors):
        if not f.is_finite():
            raise TypeMismatch("projections need finite factors")
    for i, f in enumerate(factors):
        data = tuple((t, t[i]) for t in P.elements())
        projections.append(BlueprintMorphism(P, f, data, name="pr%d" % (i + 1)))
    return P, projections


def equalizer(f: BlueprintMorphism,
              g: BlueprintMorphism) -> Tuple[Blueprint, BlueprintMorphism]:
    if f.source != g.source or f.target != g.target:
        raise NotParallel("equalizer needs a parallel pair")
    src, tgt = f.source, f.target
    members = tuple(a for a in src.elements() if tgt.eq(f(a), g(a)))
    E = EqualizerBlueprint(src, members, src.is_finite(),
                           label="equalizer")
    incl = BlueprintMorphism(E, src, tuple((a, a) for a in members),
                             name="include")
    return E, incl


# ---------------------------------------------------------------------------
# morphism search helpers


def enumerate_morphisms(B: Blueprint, C: Blueprint, max_degree: int = 2,
                        cap: int = 20000) -> List[BlueprintMorphism]:
    """All validated morphisms with generator images among the target's
    bounded elements.  Exhaustive for presented sources over finite
    targets."""
    out: List[BlueprintMorphism] = []
    pool = list(C.elements(max_degree))
    if isinstance(B, PresentedBlueprint):
        gens = B.pres.generators
        combos = itertools.product(pool, repeat=len(gens))
        for combo in itertools.islice(combos, cap):
            f = BlueprintMorphism(B, C, tuple(zip(gens, combo)))
            try:
                if validate_morphism(f).is_holds:
                    out.append(f)
            except BlueError:
                continue
        return out
    els = list(B.elements())
    for combo in itertools.islice(itertools.product(pool, repeat=len(els)), cap):
        f = BlueprintMorphism(B, C, tuple(zip(els, combo)))
        try:
            if validate_morphism(f).is_holds:
                out.append(f)
        except BlueError:
            continue
    return out


def mutually_inverse(f: BlueprintMorphism, g: BlueprintMorphism,
                     max_degree: int = 2) -> Decision:
    checks: List[Decision] = []
    for a in f.source.elements(max_degree):
        checks.append(f.source.monoid_eq_decision(g(f(a)), a))
    for b in f.target.elements(max_degree):
        checks.append(f.target.monoid_eq_decision(f(g(b)), b))
    return all_hold(checks) if checks else Decision.holds()


def find_isomorphism(B: Blueprint, C: Blueprint, max_degree: int = 2
                     ) -> Optional[Tuple[BlueprintMorphism, BlueprintMorphism]]:
    fs = enumerate_morphisms(B, C, max_degree)
    gs = enumerate_morphisms(C, B, max_degree)
    for f in fs:
        for g in gs:
            if mutually_inverse(f, g, max_degree).is_holds:
                return f, g
    return None
