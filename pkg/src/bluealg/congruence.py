"""Quotients of blueprint carriers: congruences and ideals.

A congruence is an equivalence on the carrier that is compatible with
multiplication and with relation chains through sums; quotienting by one
yields another blueprint together with the projection.  An ideal is the
other face of the same coin: a subset closed under outside multiplication
and under pulling a lone summand across a relation whose remaining terms
already lie inside.

Membership and relatedness questions are undecidable in general, so every
predicate here returns a Decision.  Three mechanisms upgrade the bounded
tables to exact answers where possible:

* finite carriers are closed exhaustively;
* a generated ideal that agrees with the zero preimage of some morphism
  into a finite semiring without zero divisors is recorded with that
  morphism as a certificate, making membership, properness and primality
  exact;
* membership refutations travel through any morphism into a finite
  semiring: an element cannot belong to the generated ideal when its image
  misses the ideal generated by the images of the generators.
"""

from __future__ import annotations

import itertools
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from .kernel import (
    DEFAULT_BUDGET,
    BlueError,
    Budget,
    Decision,
    FiniteSemiring,
    FormalSum,
    Monomial,
    MonoidPresentation,
    ZERO_MONOMIAL,
    all_hold,
)
from .saturation import engine_for
from .blueprint import (
    Blueprint,
    BlueprintMorphism,
    EmbeddedBlueprint,
    PresentedBlueprint,
    RingPresentation,
    TypeMismatch,
    base_extend_Z,
    compose,
    lattice_profile,
    proper_closure,
    smith_invariants,
    validate_morphism,
)

SumPair = Tuple[FormalSum, FormalSum]


class InvalidMorphism(BlueError):
    """The map fails to respect the source presentation."""


class NotProper(BlueError):
    """The ideal is the whole carrier, or the congruence has one class."""


class InfiniteCarrierWithoutGenerators(BlueError):
    """Enumeration needs either a finite carrier or a presentation."""


# ---------------------------------------------------------------------------
# finite semiring helpers


def _eval_monomial(R: FiniteSemiring, assign: Tuple[int, ...], m: Monomial) -> int:
    if m.is_zero:
        return R.zero
    acc = R.one
    for i, e in enumerate(m.exps):
        for _ in range(e):
            acc = R.mul[acc][assign[i]]
    return acc


def _has_zero_divisors(R: FiniteSemiring) -> bool:
    for a in range(R.size):
        if a == R.zero:
            continue
        for b in range(R.size):
            if b != R.zero and R.mul[a][b] == R.zero:
                return True
    return False


def _add_closure(R: FiniteSemiring, values: Iterable[int]) -> FrozenSet[int]:
    """All values of finite sums over the given elements, empty sum included."""
    out: Set[int] = {R.zero}
    out.update(values)
    changed = True
    while changed:
        changed = False
        for a in list(out):
            for b in list(out):
                s = R.add[a][b]
                if s not in out:
                    out.add(s)
                    changed = True
    return frozenset(out)


def _semiring_ideal_close(R: FiniteSemiring, carrier: Sequence[int],
                          seeds: Iterable[int]) -> FrozenSet[int]:
    """Exact ideal closure inside a finite semiring: multiples, zero, and
    the subtractive rule a + s = s' with both sums drawn from the inside."""
    members: Set[int] = {R.zero}
    members.update(seeds)
    changed = True
    while changed:
        changed = False
        for m in list(members):
            for c in carrier:
                p = R.mul[m][c]
                if p not in members:
                    members.add(p)
                    changed = True
        sums = _add_closure(R, members)
        for a in carrier:
            if a in members:
                continue
            if any(R.add[a][s] in sums for s in sums):
                members.add(a)
                changed = True
    return frozenset(members)


# ---------------------------------------------------------------------------
# ideals


def _universe(B: Blueprint) -> Tuple:
    return B.elements()


class Ideal:
    """A carrier subset recorded through a bounded member table, the
    generators that produced it, and optional exactness data."""

    def __init__(self, base: Blueprint, generators: Iterable = (),
                 members: Iterable = (), complete: bool = False,
                 certificate: Optional[Tuple[FiniteSemiring, Tuple[int, ...]]] = None,
                 via: Optional[Tuple[BlueprintMorphism, "Ideal"]] = None,
                 inherited_prime: Optional[Decision] = None,
                 label: str = "") -> None:
        self.base = base
        self.generators = tuple(base._sorted(generators))
        self.members = frozenset(members)
        self.complete = bool(complete)
        self.certificate = certificate
        self.via = via
        self.inherited_prime = inherited_prime
        self.label = label
        self._contains_cache: Dict = {}
        self._refuters: Optional[List[Tuple[FiniteSemiring, Tuple[int, ...], FrozenSet[int]]]] = None

    # -- membership ---------------------------------------------------

    def contains(self, a) -> Decision:
        base = self.base
        if isinstance(base, PresentedBlueprint):
            a = base.pres.normalize(a)
        key = base.element_key(a)
        hit = self._contains_cache.get(key)
        if hit is None:
            hit = self._contains(a)
            self._contains_cache[key] = hit
        return hit

    def _contains(self, a) -> Decision:
        base = self.base
        if a in self.members:
            return Decision.holds()
        if self.certificate is not None:
            R, assign = self.certificate
            if _eval_monomial(R, assign, a) == R.zero:
                return Decision.holds(by="certificate")
            return Decision.fails(by="certificate")
        if self.via is not None:
            f, parent = self.via
            return parent.contains(f(a))
        if self.complete:
            return Decision.fails()
        if isinstance(base, PresentedBlueprint):
            if self._divisible(a):
                return Decision.holds(by="generator multiple")
            if self._refuted(a):
                return Decision.fails(by="finite image")
        return Decision.unknown(reason="outside the computed member table")

    def _divisible(self, a) -> bool:
        base = self.base
        if not isinstance(base, PresentedBlueprint) or a.is_zero:
            return False
        for g in self.generators:
            if g.is_zero or not g.divides(a):
                continue
            quot = Monomial(tuple(x - y for x, y in zip(a.exps, g.exps)))
            if base.eq(base.mul(g, quot), a):
                return True
        return False

    def _refuted(self, a) -> bool:
        base = self.base
        if not isinstance(base, PresentedBlueprint):
            return False
        if self._refuters is None:
            refuters = []
            for R, assign in base.separators.morphisms()[:48]:
                seeds = [_eval_monomial(R, assign, g) for g in self.generators]
                image = _semiring_ideal_close(R, tuple(range(R.size)), seeds)
                refuters.append((R, assign, image))
            self._refuters = refuters
        for R, assign, image in self._refuters:
            if _eval_monomial(R, assign, a) not in image:
                return True
        return False

    # -- views ----------------------------------------------------------

    def is_proper(self) -> Decision:
        d = self.contains(self.base.one())
        if d.is_holds:
            return Decision.fails(**d.info())
        if d.is_fails:
            return Decision.holds()
        return d

    def decides_everywhere(self) -> bool:
        return self.complete or self.certificate is not None

    def members_sorted(self) -> List:
        return self.base._sorted(self.members)

    def generator_support(self) -> Tuple[str, ...]:
        """Names of the base generators the ideal contains: a stable point
        identifier for spectra of presented carriers."""
        base = self.base
        if not isinstance(base, PresentedBlueprint):
            raise TypeMismatch("generator support needs a presented carrier")
        out = [name for name in base.pres.generators
               if self.contains(base.generator(name)).is_holds]
        return tuple(sorted(out))

    def serialize(self) -> Dict[str, object]:
        return {
            "generators": [self.base.render(g) for g in self.generators],
            "complete": self.complete,
            "exact": self.decides_everywhere(),
        }

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        gens = ", ".join(self.base.render(g) for g in self.generators)
        return "Ideal(%s)" % gens


def _close_embedded(B: EmbeddedBlueprint, seeds: Iterable[int]) -> FrozenSet[int]:
    R = B.semiring
    return _semiring_ideal_close(R, B.subset, seeds)


def _close_presented(B: PresentedBlueprint, seeds: Sequence[Monomial]
                     ) -> Tuple[Set[Monomial], bool]:
    """Member table of the generated ideal inside the element window.

    With a zero the subtractive rule characterizes ideals, so iterating it
    over the derived relation pool is sound and converges on the window.
    Without a zero only seed multiples are certain; relation chains that
    contract a sum back to a single seed multiple are searched separately.
    """
    pres = B.pres
    universe = list(_universe(B))
    window = set(universe)
    members: Set[Monomial] = set()
    if pres.has_zero:
        members.add(ZERO_MONOMIAL)

    def absorb(m: Monomial) -> None:
        if m in members:
            return
        members.add(m)
        for d in universe:
            p = B.mul(m, d)
            if p in window:
                members.add(p)

    for s in seeds:
        absorb(pres.normalize(s))

    if not pres.has_zero:
        if B.preadd:
            for m in _chain_members(B, members, universe):
                absorb(m)
        return members, True

    instances = B.engine.derived_relations()
    changed = True
    while changed:
        changed = False
        for lhs, rhs in instances:
            for big, small in ((lhs, rhs), (rhs, lhs)):
                if not all(t in members for t in small.terms):
                    continue
                out = [t for t in big.terms if t not in members]
                if len(out) == 1:
                    absorb(out[0])
                    changed = True
    return members, True


def _chain_members(B: PresentedBlueprint, seeded: Set[Monomial],
                   universe: Sequence[Monomial]) -> List[Monomial]:
    """Zero-free carriers: bounded search for relation chains from a single
    element down to a single seed multiple."""
    instances = B.engine.derived_relations()
    swaps = [m for m in seeded if m.degree() <= 2]
    found: List[Monomial] = []
    for target in universe:
        if target in seeded:
            continue
        start = FormalSum.single(target)
        seen = {start}
        queue = [start]
        steps = 0
        while queue and steps < 300:
            s = queue.pop()
            steps += 1
            if len(s) == 1 and s.terms[0] in seeded:
                found.append(target)
                break
            if len(s) > B.budget.max_terms + 1:
                continue
            nexts: List[FormalSum] = []
            for L, R in instances:
                for src, dst in ((L, R), (R, L)):
                    if s.contains(src):
                        nexts.append(s.remove(src).add(dst))
            for i, t in enumerate(s.terms):
                if t in seeded:
                    rest = s.remove(FormalSum.single(t))
                    for w in swaps:
                        if w != t:
                            nexts.append(rest.add(FormalSum.single(w)))
            for n in nexts:
                if n not in seen:
                    seen.add(n)
                    queue.append(n)
    return found


def _certificate_for(B: Blueprint, generators: Sequence,
                     members: Set) -> Optional[Tuple[FiniteSemiring, Tuple[int, ...]]]:
    """A morphism into a finite semiring without zero divisors whose zero
    preimage provably equals the generated ideal: it kills every listed
    generator, and every base generator it kills is already a member."""
    if not isinstance(B, PresentedBlueprint):
        return None
    for R, assign in B.separators.morphisms():
        if _has_zero_divisors(R):
            continue
        if any(_eval_monomial(R, assign, g) != R.zero for g in generators):
            continue
        ok = True
        for i, name in enumerate(B.pres.generators):
            if assign[i] == R.zero and B.generator(name) not in members:
                ok = False
                break
        if ok:
            return R, assign
    return None


def ideal_generated(B: Blueprint, generators: Iterable = (),
                    label: str = "") -> Ideal:
    """Smallest ideal containing the given elements."""
    if isinstance(B, EmbeddedBlueprint):
        members = _close_embedded(B, generators)
        return Ideal(B, generators=set(generators), members=members,
                     complete=True, label=label)
    if not isinstance(B, PresentedBlueprint):
        raise TypeMismatch("ideal generation needs a presented or finite carrier")
    seeds = tuple(B.pres.normalize(g) for g in generators)
    members, _ = _close_presented(B, seeds)
    complete = B.is_finite() and _trivial_preadd(B)
    cert = None
    if not complete:
        cert = _certificate_for(B, seeds, members)
    return Ideal(B, generators=set(seeds), members=members,
                 complete=complete, certificate=cert, label=label)


def _trivial_preadd(B: PresentedBlueprint) -> bool:
    """Only the zero rule: relations never move anything between classes."""
    for x, y in B.preadd:
        if sorted([len(x), len(y)]) == [0, 1]:
            t = (x if len(x) == 1 else y).terms[0]
            if t.is_zero:
                continue
        return False
    return True


def ideal_from_members(B: Blueprint, members: Iterable, label: str = "") -> Ideal:
    """Wrap an explicit member set; exactness is the caller's claim and can
    be audited with is_ideal."""
    if isinstance(B, PresentedBlueprint):
        members = {B.pres.normalize(m) for m in members}
    else:
        members = set(members)
    return Ideal(B, generators=members, members=members,
                 complete=B.is_finite(), label=label)


def _minimal_members(B: Blueprint, els: Iterable) -> List:
    """Strip elements that are proper multiples of other listed elements."""
    els = B._sorted(set(els))
    if not isinstance(B, PresentedBlueprint):
        return els
    out = []
    for x in els:
        redundant = False
        for y in els:
            if y is x or B.eq(x, y) or y.is_zero:
                continue
            if not x.is_zero and y.divides(x):
                quot = Monomial(tuple(a - b for a, b in zip(x.exps, y.exps)))
                if B.eq(B.mul(y, quot), x):
                    redundant = True
                    break
            if x.is_zero:
                redundant = True  # the zero is a multiple of anything
                break
        if not redundant:
            out.append(x)
    return out


def radical(I: Ideal, label: str = "") -> Ideal:
    """Elements with some power inside; exact on finite carriers, bounded
    by the exponent budget elsewhere."""
    B = I.base
    if isinstance(B, EmbeddedBlueprint):
        bound = len(B.subset) + 1
        members = {a for a in B.subset
                   if any(B.power(a, n) in I.members for n in range(1, bound))}
        return Ideal(B, generators=members, members=members, complete=True,
                     label=label or "rad")
    if not isinstance(B, PresentedBlueprint):
        raise TypeMismatch("radical needs a presented or finite carrier")
    bound = max(2, B.budget.max_exponent) + 1
    roots: Set[Monomial] = set(I.members)
    for a in _universe(B):
        if a in roots:
            continue
        for n in range(1, bound):
            if I.contains(B.power(a, n)).is_holds:
                roots.add(a)
                break
    gens = _minimal_members(B, roots)
    out = ideal_generated(B, gens, label=label or "rad")
    out.members = frozenset(out.members | roots)
    return out


def inverse_image_ideal(f: BlueprintMorphism, I: Ideal, label: str = "") -> Ideal:
    """Preimage ideal; membership delegates to the target, so exactness and
    primality carry over unconditionally."""
    if I.base is not f.target and I.base != f.target:
        raise TypeMismatch("ideal does not live on the morphism target")
    v = validate_morphism(f)
    if v.is_fails:
        raise InvalidMorphism(str(v.info()))
    src = f.source
    members = {x for x in _universe(src) if I.contains(f(x)).is_holds}
    try:
        prime = is_prime_ideal(I)
    except NotProper:
        prime = None
    hint = prime if (prime is not None and prime.is_holds) else None
    return Ideal(src, generators=_minimal_members(src, members), members=members,
                 complete=False, via=(f, I), inherited_prime=hint,
                 label=label or ("preimage " + I.label if I.label else "preimage"))


# ---------------------------------------------------------------------------
# congruences


class Congruence:
    """An equivalence on the carrier, queried through one of four backends:
    generating pairs riding an augmented presentation, the kernel of a
    morphism, a pullback along a morphism, or an explicit partition."""

    def __init__(self, base: Blueprint, kind: str, pairs: Tuple = (),
                 morphism: Optional[BlueprintMorphism] = None,
                 parent: Optional["Congruence"] = None,
                 partition: Tuple[Tuple, ...] = (),
                 label: str = "") -> None:
        if kind not in ("pairs", "kernel", "preimage", "partition"):
            raise BlueError("unknown congruence backend: %s" % kind)
        self.base = base
        self.kind = kind
        self.pairs = pairs
        self.morphism = morphism
        self.parent = parent
        self.partition = partition
        self.label = label
        self._aug: Optional[PresentedBlueprint] = None
        self._pairs_form: Optional["Congruence"] = None
        self._class_of: Optional[Dict] = None
        self._related_cache: Dict = {}
        self._proper: Optional[Decision] = None

    # -- backends -------------------------------------------------------

    @property
    def augmented(self) -> PresentedBlueprint:
        """The base presentation with the generating pairs adjoined as
        monoid relations; its relation engine answers relatedness."""
        if self._aug is None:
            base = self.base
            if not isinstance(base, PresentedBlueprint):
                raise TypeMismatch("augmentation needs a presented carrier")
            pres = MonoidPresentation(
                base.pres.generators,
                base.pres.relations + tuple(self.pairs),
                base.pres.has_zero)
            self._aug = PresentedBlueprint(pres, base.preadd, base.budget,
                                           base.cancellative_rule,
                                           label=self.label)
        return self._aug

    def related(self, a, b) -> Decision:
        base = self.base
        if isinstance(base, PresentedBlueprint):
            a = base.pres.normalize(a)
            b = base.pres.normalize(b)
        ka, kb = base.element_key(a), base.element_key(b)
        if ka == kb:
            return Decision.holds()
        key = (ka, kb) if ka < kb else (kb, ka)
        hit = self._related_cache.get(key)
        if hit is None:
            hit = self._related(a, b)
            self._related_cache[key] = hit
        return hit

    def _related(self, a, b) -> Decision:
        if self.kind == "pairs":
            return self.augmented.holds([a], [b])
        if self.kind == "kernel":
            f = self.morphism
            return f.target.holds([f(a)], [f(b)])
        if self.kind == "preimage":
            f = self.morphism
            return self.parent.related(f(a), f(b))
        table = self._partition_table()
        la, lb = table.get(self.base.element_key(a)), table.get(self.base.element_key(b))
        if la is None or lb is None:
            return Decision.unknown(reason="element outside the partition")
        return Decision.holds() if la == lb else Decision.fails()

    def zero_related(self, a) -> Decision:
        """Whether the class of the element is a zero of the quotient.

        The question lives on the source side: the quotient carries the
        image of the base pre-addition, which can relate strictly less than
        the target of a kernel's morphism does."""
        base = self.base
        if isinstance(base, PresentedBlueprint):
            if self.kind == "pairs":
                return self.augmented.holds([base.pres.normalize(a)], [])
            return self._pairs_view().zero_related(a)
        z = base.zero()
        if z is not None:
            return self.related(a, z)
        return base.holds([a], [])

    def _pairs_view(self) -> "Congruence":
        """The same congruence presented by generating pairs drawn from the
        element window; the backend for quotient-side questions."""
        if self._pairs_form is None:
            self._pairs_form = congruence_generated(
                self.base, self.pairs_for_quotient(), label=self.label)
        return self._pairs_form

    def _partition_table(self) -> Dict:
        if self._class_of is None:
            table: Dict = {}
            for i, cls in enumerate(self.partition):
                for el in cls:
                    table[self.base.element_key(el)] = i
            self._class_of = table
        return self._class_of

    # -- structure ------------------------------------------------------

    def classes(self) -> Tuple[Tuple, ...]:
        """Grouping of the element window; merges are certain, separations
        are as strong as the relation engine."""
        if self.kind == "partition":
            return self.partition
        base = self.base
        els = list(_universe(base))
        groups: Dict[object, List] = {}
        if self.kind == "pairs":
            Q, proj = proper_closure(self.augmented)
            for m in els:
                groups.setdefault(Q.element_key(proj(m)), []).append(m)
        else:
            parent_table: Dict = {}
            if self.kind == "preimage":
                for i, cls in enumerate(self.parent.classes()):
                    for x in cls:
                        parent_table[self.parent.base.element_key(x)] = i
            for m in els:
                img = self.morphism(m) if self.morphism is not None else m
                if self.kind == "kernel":
                    key = self.morphism.target.element_key(img)
                else:
                    key = parent_table.get(self.parent.base.element_key(img))
                groups.setdefault(key, []).append(m)
            groups = self._merge_groups(groups)
        out = tuple(tuple(base._sorted(g)) for g in groups.values())
        return tuple(sorted(out, key=lambda cls: base.element_key(cls[0])))

    def _merge_groups(self, groups: Dict[object, List]) -> Dict[object, List]:
        # distinct image keys can still be related through the target's sums
        keys = list(groups)
        if len(keys) > 40:
            return groups
        parent = {k: k for k in keys}

        def find(k):
            while parent[k] != k:
                parent[k] = parent[parent[k]]
                k = parent[k]
            return k

        for i, k1 in enumerate(keys):
            for k2 in keys[i + 1:]:
                if find(k1) == find(k2):
                    continue
                if self.related(groups[k1][0], groups[k2][0]).is_holds:
                    parent[find(k2)] = find(k1)
        merged: Dict[object, List] = {}
        for k in keys:
            merged.setdefault(find(k), []).extend(groups[k])
        return merged

    def is_proper(self) -> Decision:
        """More than one class."""
        if self._proper is None:
            self._proper = self._properness()
        return self._proper

    def _properness(self) -> Decision:
        els = list(_universe(self.base))
        unknown = False
        budgeted = 0
        for i, a in enumerate(els):
            for b in els[i + 1:]:
                d = self.related(a, b)
                budgeted += 1
                if d.is_fails:
                    return Decision.holds(
                        witness=(self.base.render(a), self.base.render(b)))
                if d.is_unknown:
                    unknown = True
                if budgeted > 2000:
                    return Decision.unknown(reason="pair scan budget")
        if self.base.is_finite() and not unknown:
            return Decision.fails(reason="all elements related")
        return Decision.unknown(reason="no separated pair in the window")

    def pairs_for_quotient(self) -> Tuple:
        """Generating pairs presenting the same quotient, derived from the
        element window when the backend is not pair-based."""
        if self.kind == "pairs":
            return self.pairs
        out: List[Tuple] = []
        for cls in self.classes():
            rep = cls[0]
            for other in cls[1:]:
                out.append((rep, other))
        return tuple(out)

    def serialize(self) -> Dict[str, object]:
        base = self.base
        if self.kind == "pairs":
            return {"pairs": sorted([base.render(a), base.render(b)]
                                    for a, b in self.pairs)}
        return {"classes": sorted([base.render(x) for x in cls]
                                  for cls in self.classes())}

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return "Congruence(%s, %s)" % (self.kind, self.label or "-")


def congruence_generated(B: Blueprint, pairs: Iterable[Tuple],
                         label: str = "") -> Congruence:
    """Smallest congruence relating the given element pairs."""
    if isinstance(B, EmbeddedBlueprint):
        return _embedded_congruence(B, pairs, label)
    if not isinstance(B, PresentedBlueprint):
        raise TypeMismatch("congruence generation needs a presented carrier")
    canon: Set[Tuple[Monomial, Monomial]] = set()
    for a, b in pairs:
        a, b = B.pres.normalize(a), B.pres.normalize(b)
        if a == b:
            continue
        canon.add((a, b) if a.key() <= b.key() else (b, a))
    ordered = tuple(sorted(canon, key=lambda p: (p[0].key(), p[1].key())))
    return Congruence(B, "pairs", pairs=ordered, label=label)


def _embedded_congruence(B: EmbeddedBlueprint, pairs: Iterable[Tuple],
                         label: str) -> Congruence:
    """Exact closure on a finite carrier: multiplication compatibility and
    single-term swaps inside bounded sums."""
    R = B.semiring
    els = list(B.subset)
    parent = {a: a for a in els}

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a: int, b: int) -> bool:
        ra, rb = find(a), find(b)
        if ra == rb:
            return False
        parent[rb] = ra
        return True

    for a, b in pairs:
        union(a, b)
    max_terms = min(3, DEFAULT_BUDGET.max_terms)
    changed = True
    while changed:
        changed = False
        for a in els:
            for b in els:
                if find(a) == find(b) and a < b:
                    for c in els:
                        if union(R.mul[a][c], R.mul[b][c]):
                            changed = True
        for k in range(2, max_terms + 1):
            for combo in itertools.combinations_with_replacement(els, k):
                value = R.add_many(combo)
                if value not in parent:
                    continue
                for i, t in enumerate(combo):
                    for d in els:
                        if find(d) != find(t) or d == t:
                            continue
                        swapped = list(combo)
                        swapped[i] = d
                        other = R.add_many(swapped)
                        if other in parent and union(value, other):
                            changed = True
    classes: Dict[int, List[int]] = {}
    for a in els:
        classes.setdefault(find(a), []).append(a)
    partition = tuple(tuple(sorted(cls)) for cls in classes.values())
    return Congruence(B, "partition", partition=tuple(sorted(partition)),
                      label=label)


def kernel_of(f: BlueprintMorphism, label: str = "") -> Congruence:
    """Elements are related when their images are; the standard source of
    congruences, and every congruence arises this way from its projection."""
    v = validate_morphism(f)
    if v.is_fails:
        raise InvalidMorphism(str(v.info()))
    return Congruence(f.source, "kernel", morphism=f,
                      label=label or ("ker " + (f.name or "")).strip())


def congruence_from_partition(B: Blueprint, classes: Iterable[Iterable],
                              label: str = "") -> Congruence:
    normalized = []
    seen = set()
    for cls in classes:
        cls = B._sorted(cls)
        for el in cls:
            k = B.element_key(el)
            if k in seen:
                raise BlueError("partition classes overlap")
            seen.add(k)
        normalized.append(tuple(cls))
    return Congruence(B, "partition", partition=tuple(sorted(
        normalized, key=lambda c: B.element_key(c[0]))), label=label)


def inverse_image_congruence(f: BlueprintMorphism, c: Congruence,
                             label: str = "") -> Congruence:
    if c.base is not f.target and c.base != f.target:
        raise TypeMismatch("congruence does not live on the morphism target")
    v = validate_morphism(f)
    if v.is_fails:
        raise InvalidMorphism(str(v.info()))
    return Congruence(f.source, "preimage", morphism=f, parent=c,
                      label=label or "preimage")


def congruence_of_ideal(I: Ideal, label: str = "") -> Congruence:
    """Collapse the ideal to a point and leave everything else alone."""
    B = I.base
    members = B._sorted(I.members)
    if not members:
        return congruence_generated(B, (), label=label) \
            if isinstance(B, PresentedBlueprint) \
            else congruence_from_partition(B, [[x] for x in _universe(B)], label)
    rep = members[0]
    pairs = [(rep, m) for m in members[1:]]
    return congruence_generated(B, pairs, label=label or "mod ideal")


def absorbing_ideal(c: Congruence, label: str = "") -> Ideal:
    """Elements whose class swallows every product: empty or a single class,
    and always an ideal."""
    B = c.base
    members: Set = set()
    undecided = False
    z = B.zero()
    if isinstance(B, PresentedBlueprint):
        probes = [B.generator(g) for g in B.pres.generators]
    else:
        probes = list(_universe(B))
    for e in _universe(B):
        verdicts = [c.related(B.mul(e, p), e) for p in probes]
        if z is not None:
            verdicts.append(c.related(B.mul(e, z), e))
        if all(v.is_holds for v in verdicts):
            members.add(e)
        elif any(v.is_unknown for v in verdicts) and not any(
                v.is_fails for v in verdicts):
            undecided = True
    return Ideal(B, generators=members, members=members,
                 complete=B.is_finite() and not undecided,
                 label=label or "absorbing")


# ---------------------------------------------------------------------------
# quotients


def quotient_by(B: Blueprint, c: Congruence,
                label: str = "") -> Tuple[Blueprint, BlueprintMorphism]:
    """The quotient blueprint and its projection.  The result is properized:
    derivable singleton relations are folded into element equality, which is
    what makes the kernel of the projection recover the congruence."""
    if c.base is not B and c.base != B:
        raise TypeMismatch("congruence does not live on the carrier")
    if isinstance(B, EmbeddedBlueprint):
        P, conv = B.presentation_map()
        pairs = tuple((conv(a), conv(b)) for a, b in c.pairs_for_quotient())
        inner = congruence_generated(P, pairs, label=label or c.label)
        Q, projP = quotient_by(P, inner, label=label)
        return Q, compose(conv, projP)
    if not isinstance(B, PresentedBlueprint):
        raise TypeMismatch("quotients need a presented or finite carrier")
    if c.kind == "pairs":
        aug = c.augmented
    else:
        aug = congruence_generated(B, c.pairs_for_quotient(),
                                   label=label or c.label).augmented
    Q, fold = proper_closure(aug)
    data = tuple((g, fold(aug.generator(g))) for g in B.pres.generators)
    proj = BlueprintMorphism(B, Q, data, name=label or "projection")
    return Q, proj


# ---------------------------------------------------------------------------
# audits


def is_ideal(I: Ideal, max_terms: int = 2) -> Decision:
    """Bounded audit of the ideal axioms on the member table: closure under
    outside multiplication, the zero, and the subtractive rule."""
    B = I.base
    checks: List[Decision] = []
    els = list(_universe(B))
    if isinstance(B, PresentedBlueprint):
        probes = [B.generator(g) for g in B.pres.generators]
    else:
        probes = els
    window = set(els)
    for m in I.members:
        for p in probes:
            prod = B.mul(m, p)
            if prod not in window and not getattr(prod, "is_zero", False):
                continue
            d = I.contains(prod)
            if d.is_fails:
                return Decision.fails(reason="not closed under multiplication",
                                      at=(B.render(m), B.render(p)))
            checks.append(d)
    z = B.zero()
    if z is not None:
        d = I.contains(z)
        if d.is_fails:
            return Decision.fails(reason="zero missing")
        checks.append(d)
    else:
        # an empty or zero-free ideal must not absorb an element that is
        # related to the empty sum
        for a in els:
            if B.holds([a], []).is_holds and I.contains(a).is_fails:
                return Decision.fails(reason="empty-sum element outside",
                                      at=B.render(a))
    inside = B._sorted(I.members)[:8]
    outside = [a for a in els if I.contains(a).is_fails][:12]
    for a in outside:
        for k in range(0, max_terms):
            for bs in itertools.combinations_with_replacement(inside, k):
                lhs = [a] + list(bs)
                for j in range(0, max_terms + 1):
                    for cs in itertools.combinations_with_replacement(inside, j):
                        if B.holds(lhs, list(cs)).is_holds:
                            return Decision.fails(
                                reason="subtractive rule escapes",
                                at=B.render(a))
    if any(ch.is_unknown for ch in checks):
        return Decision.unknown(reason="membership undecided on a product")
    return Decision.holds(scanned=len(els), max_terms=max_terms)


def check_congruence(c: Congruence, max_terms: int = 2) -> Decision:
    """Bounded audit: multiplicativity of relatedness and agreement with
    element equality."""
    B = c.base
    els = list(_universe(B))
    sample = els[:10]
    checks: List[Decision] = []
    for a in sample:
        for b in sample:
            if not B.eq(a, b) and B.monoid_eq_decision(a, b).is_holds:
                checks.append(c.related(a, b))
    related_pairs = []
    for i, a in enumerate(sample):
        for b in sample[i:]:
            if c.related(a, b).is_holds:
                related_pairs.append((a, b))
    for (a, b) in related_pairs[:12]:
        for (x, y) in related_pairs[:12]:
            d = c.related(B.mul(a, x), B.mul(b, y))
            if d.is_fails:
                return Decision.fails(reason="not multiplicative",
                                      at=(B.render(a), B.render(b),
                                          B.render(x), B.render(y)))
            checks.append(d)
    if any(ch.is_fails for ch in checks):
        return Decision.fails(reason="equal elements not related")
    if any(ch.is_unknown for ch in checks):
        return Decision.unknown(reason="relatedness undecided on a sample")
    return Decision.holds(sampled=len(sample))


# ---------------------------------------------------------------------------
# primality and maximality


def is_prime_ideal(I: Ideal) -> Decision:
    """Complement closed under multiplication.  Exact with a certificate or
    a finite carrier; otherwise a bounded witness scan."""
    B = I.base
    proper = I.is_proper()
    if proper.is_fails:
        raise NotProper("the ideal is the whole carrier")
    if I.certificate is not None:
        # zero preimage under a map into a semiring without zero divisors
        return Decision.holds(by="certificate")
    if I.inherited_prime is not None and I.inherited_prime.is_holds:
        return Decision.holds(by="preimage of a prime")
    if proper.is_unknown:
        return Decision.unknown(reason="properness undecided")
    els = list(_universe(B))
    if isinstance(B, PresentedBlueprint) and not B.is_finite():
        half = max(1, B.budget.max_degree // 2)
        els = [e for e in els if e.is_zero or e.degree() <= half]
    undecided = False
    for a in els:
        ca = I.contains(a)
        if ca.is_holds:
            continue
        for b in els:
            cb = I.contains(b)
            if cb.is_holds:
                continue
            prod = I.contains(B.mul(a, b))
            if prod.is_holds and ca.is_fails and cb.is_fails:
                return Decision.fails(witness=(B.render(a), B.render(b)))
            if prod.is_unknown or ca.is_unknown or cb.is_unknown:
                undecided = True
    if I.decides_everywhere() and B.is_finite() and not undecided:
        return Decision.holds(scanned=len(els))
    return Decision.unknown(reason="no witness in the window",
                            scanned=len(els))


def is_prime_congruence(c: Congruence) -> Decision:
    """The quotient is integral: products cancel unless the factor's class
    is a zero.  Exact on finite carriers when every query decides."""
    proper = c.is_proper()
    if proper.is_fails:
        raise NotProper("the congruence relates all elements")
    if c.kind == "preimage" and c.parent is not None:
        reason = _prime_pullback_applies(c)
        if reason:
            try:
                parent_prime = is_prime_congruence(c.parent)
            except NotProper:
                parent_prime = Decision.fails()
            if parent_prime.is_holds:
                return Decision.holds(by="preimage", condition=reason)
    if proper.is_unknown:
        return Decision.unknown(reason="properness undecided")
    B = c.base
    els = list(_universe(B))
    if isinstance(B, PresentedBlueprint) and not B.is_finite():
        half = max(1, B.budget.max_degree // 2)
        els = [e for e in els if e.is_zero or e.degree() <= half][:12]
    zero_like = {B.element_key(a): c.zero_related(a) for a in els}
    undecided = False
    for a in els:
        za = zero_like[B.element_key(a)]
        if za.is_holds:
            continue
        for b in els:
            for d in els:
                left = c.related(B.mul(a, b), B.mul(a, d))
                if not left.is_holds:
                    if left.is_unknown:
                        undecided = True
                    continue
                right = c.related(b, d)
                if right.is_holds:
                    continue
                if right.is_fails and za.is_fails:
                    return Decision.fails(witness=(B.render(a), B.render(b),
                                                   B.render(d)))
                undecided = True
    if B.is_finite() and not undecided:
        return Decision.holds(scanned=len(els))
    return Decision.unknown(reason="no witness in the window",
                            scanned=len(els))


def _prime_pullback_applies(c: Congruence) -> str:
    """Primality descends along a morphism when the source has a zero or the
    target has none; returns the reason or an empty string."""
    f = c.morphism
    if f is None:
        return ""
    if f.source.is_with_zero().is_holds:
        return "source with zero"
    if f.target.is_with_zero().is_fails:
        return "target without zero"
    return ""


def is_maximal_ideal(I: Ideal) -> Decision:
    """No strictly larger proper ideal.  Exact on finite carriers; on
    presented ones, certified when every generator is inside (the complement
    is then just the powers of one), otherwise a bounded augmentation scan."""
    B = I.base
    proper = I.is_proper()
    if proper.is_fails:
        raise NotProper("the ideal is the whole carrier")
    if proper.is_unknown:
        return Decision.unknown(reason="properness undecided")
    if isinstance(B, PresentedBlueprint):
        gens = [B.generator(g) for g in B.pres.generators]
        if gens and all(I.contains(g).is_holds for g in gens):
            return Decision.holds(by="complement is the unit")
    els = list(_universe(B))
    if isinstance(B, PresentedBlueprint) and not B.is_finite():
        half = max(1, B.budget.max_degree // 2)
        els = [e for e in els if e.is_zero or e.degree() <= half]
    undecided = False
    tried = 0
    for x in els:
        cx = I.contains(x)
        if cx.is_holds:
            continue
        if cx.is_unknown:
            undecided = True
            continue
        tried += 1
        if tried > 40:
            return Decision.unknown(reason="augmentation budget")
        bigger = ideal_generated(B, tuple(I.generators) + (x,))
        d = bigger.is_proper()
        if d.is_holds:
            return Decision.fails(witness=B.render(x))
        if d.is_unknown:
            undecided = True
    if B.is_finite() and not undecided:
        return Decision.holds(scanned=tried)
    return Decision.unknown(reason="no proper extension in the window")


def is_maximal_congruence(c: Congruence) -> Decision:
    """No strictly coarser proper congruence; scanned by adjoining one pair
    of class representatives at a time."""
    proper = c.is_proper()
    if proper.is_fails:
        raise NotProper("the congruence relates all elements")
    if proper.is_unknown:
        return Decision.unknown(reason="properness undecided")
    B = c.base
    if not isinstance(B, (PresentedBlueprint, EmbeddedBlueprint)):
        raise TypeMismatch("maximality scan needs a presented or finite carrier")
    reps = [cls[0] for cls in c.classes()]
    if len(reps) > 14:
        reps = reps[:14]
    base_pairs = c.pairs_for_quotient()
    undecided = False
    for i, x in enumerate(reps):
        for y in reps[i + 1:]:
            if c.related(x, y).is_holds:
                continue
            coarser = congruence_generated(B, tuple(base_pairs) + ((x, y),)) \
                if isinstance(B, PresentedBlueprint) else \
                _embedded_congruence(B, tuple(base_pairs) + ((x, y),), "")
            d = coarser.is_proper()
            if d.is_holds:
                return Decision.fails(witness=(B.render(x), B.render(y)))
            if d.is_unknown:
                undecided = True
    if B.is_finite() and not undecided:
        return Decision.holds(classes=len(reps))
    return Decision.unknown(reason="no proper coarsening in the window")


# ---------------------------------------------------------------------------
# enumeration


def enumerate_prime_ideals(B: Blueprint) -> Tuple[List[Ideal], Decision]:
    """All prime ideals the search can verify, with a completeness verdict.

    Finite carriers are enumerated by exhaustive subsets.  Presented
    carriers use the fact that a prime is generated by the generators it
    contains: a product lies in a prime only when one of its factors does,
    so candidate subsets of the generator list cover everything.  The
    completeness verdict is Holds unless some candidate subset was left
    undecided within the budget."""
    if B.is_finite() and len(_universe(B)) <= 12:
        return _enumerate_finite(B)
    if not isinstance(B, PresentedBlueprint):
        raise InfiniteCarrierWithoutGenerators(
            "prime enumeration needs a finite carrier or a presentation")
    names = B.pres.generators
    if len(names) > 8:
        raise BlueError("too many generators for subset enumeration")
    found: Dict[Tuple, Ideal] = {}
    degraded = False
    for size in range(len(names) + 1):
        for combo in itertools.combinations(names, size):
            I = ideal_generated(B, tuple(B.generator(g) for g in combo),
                                label="(%s)" % ", ".join(combo))
            proper = I.is_proper()
            if proper.is_fails:
                continue
            if proper.is_unknown:
                degraded = True
                continue
            try:
                verdict = is_prime_ideal(I)
            except NotProper:
                continue
            if verdict.is_fails:
                continue
            if verdict.is_unknown:
                degraded = True
                continue
            key = I.generator_support()
            if key not in found:
                found[key] = I
    ideals = [found[k] for k in sorted(found, key=lambda k: (len(k), k))]
    # primes are generated by the generators they contain, so the subset
    # sweep is exhaustive; only undecided candidates can hide a prime
    if degraded:
        completeness = Decision.unknown(
            reason="undecided candidate subsets may hide further primes")
    else:
        completeness = Decision.holds(method="generator subsets")
    return ideals, completeness


def _enumerate_finite(B: Blueprint) -> Tuple[List[Ideal], Decision]:
    els = list(_universe(B))
    z = B.zero()
    one = B.pres.normalize(B.one()) if isinstance(B, PresentedBlueprint) \
        else B.one()
    out: List[Ideal] = []
    exact = isinstance(B, EmbeddedBlueprint) or (
        isinstance(B, PresentedBlueprint) and _trivial_preadd(B))
    bounded = False
    for bits in range(1 << len(els)):
        S = {els[i] for i in range(len(els)) if bits >> i & 1}
        if z is not None and z not in S:
            continue
        if one in S:
            continue  # proper only
        if any(B.mul(a, b) not in S for a in S for b in els):
            continue
        ok, was_bounded = _subset_is_ideal(B, S, els)
        bounded = bounded or was_bounded
        if not ok:
            continue
        complement = [a for a in els if a not in S]
        if any(B.mul(a, b) in S for a in complement for b in complement):
            continue
        out.append(Ideal(B, generators=_minimal_members(B, S), members=S,
                         complete=True, label="prime"))
    out.sort(key=lambda I: (len(I.members),
                            tuple(B.element_key(m) for m in I.members_sorted())))
    if exact and not bounded:
        completeness = Decision.holds(method="exhaustive subsets")
    else:
        completeness = Decision.unknown(reason="subtractive rule scan is bounded")
    return out, completeness


def _subset_is_ideal(B: Blueprint, S: Set, els: List) -> Tuple[bool, bool]:
    """Exact on embedded carriers; bounded witness search elsewhere."""
    if isinstance(B, EmbeddedBlueprint):
        R = B.semiring
        sums = _add_closure(R, S)
        for a in els:
            if a in S:
                continue
            if any(R.add[a][s] in sums for s in sums):
                return False, False
        return True, False
    bounded = not (isinstance(B, PresentedBlueprint) and _trivial_preadd(B))
    inside = B._sorted(S)[:8]
    for a in els:
        if a in S:
            continue
        for k in range(0, 2):
            for bs in itertools.combinations_with_replacement(inside, k):
                for j in range(0, 3):
                    for cs in itertools.combinations_with_replacement(inside, j):
                        if B.holds([a] + list(bs), list(cs)).is_holds:
                            return False, bounded
    return True, bounded


# ---------------------------------------------------------------------------
# the ring-side ideal of a congruence


def iz_ideal(c: Congruence, label: str = "") -> RingPresentation:
    """The integral presentation whose ideal is spanned by the relation
    differences together with the congruence pair differences; quotienting
    the base extension by it is the base extension of the quotient."""
    B = c.base
    if isinstance(B, EmbeddedBlueprint):
        P, conv = B.presentation_map()
        pairs = tuple((conv(a), conv(b)) for a, b in c.pairs_for_quotient())
        inner = congruence_generated(P, pairs)
        return iz_ideal(inner, label=label)
    if not isinstance(B, PresentedBlueprint):
        raise TypeMismatch("base extension needs a presented carrier")
    r0 = base_extend_Z(B)
    extra = tuple((FormalSum.single(a), FormalSum.single(b))
                  for a, b in (c.pairs if c.kind == "pairs"
                               else c.pairs_for_quotient()))
    return RingPresentation(r0.pres, r0.sum_relations + extra,
                            label=label or (B.label + " mod pairs").strip())


def _truncated_profile(r: RingPresentation, budget: Budget
                       ) -> Tuple[int, Tuple[int, ...]]:
    """Invariant factors of the relation span over the degree window."""
    pres = r.pres
    els = set(pres.elements(budget.max_degree, budget))
    if pres.has_zero:
        els.add(ZERO_MONOMIAL)
    basis = sorted(els, key=Monomial.key)
    index = {m: i for i, m in enumerate(basis)}
    engine = engine_for(pres, r.sum_relations, budget)
    rows: List[List[int]] = []
    for lhs, rhs in engine.derived_relations():
        vec = [0] * len(basis)
        ok = True
        for t in lhs.terms:
            t = pres.normalize(t)
            if t not in index:
                ok = False
                break
            vec[index[t]] += 1
        if ok:
            for t in rhs.terms:
                t = pres.normalize(t)
                if t not in index:
                    ok = False
                    break
                vec[index[t]] -= 1
        if ok and any(vec):
            rows.append(vec)
    inv = smith_invariants(rows)
    return len(basis) - len(inv), tuple(d for d in inv if d != 1)


def iz_profiles_agree(c: Congruence,
                      budget: Budget = DEFAULT_BUDGET) -> Decision:
    """Compare the additive group of the base extension of the quotient with
    the quotient of the base extension: the two must present the same
    lattice.  Falls back to a shared degree window when either side has no
    finite spanning set."""
    B = c.base
    Q, _ = quotient_by(B, c)
    left = base_extend_Z(Q)
    right = iz_ideal(c)
    try:
        pl = lattice_profile(left, budget)
        pr = lattice_profile(right, budget)
        truncated = False
    except BlueError:
        pl = _truncated_profile(left, budget)
        pr = _truncated_profile(right, budget)
        truncated = True
    if pl == pr:
        return Decision.holds(profile=list(pl), truncated=truncated)
    if truncated:
        return Decision.unknown(left=list(pl), right=list(pr),
                                reason="profiles differ inside the window")
    return Decision.fails(left=list(pl), right=list(pr))


def ideals_equal(I: Ideal, J: Ideal) -> Decision:
    """Mutual containment of generators, decided elementwise."""
    checks = [J.contains(g) for g in I.generators]
    checks += [I.contains(g) for g in J.generators]
    return all_hold(checks) if checks else Decision.holds()


__all__ = [
    "Congruence",
    "Ideal",
    "InfiniteCarrierWithoutGenerators",
    "InvalidMorphism",
    "NotProper",
    "absorbing_ideal",
    "check_congruence",
    "congruence_from_partition",
    "congruence_generated",
    "congruence_of_ideal",
    "enumerate_prime_ideals",
    "ideal_from_members",
    "ideal_generated",
    "ideals_equal",
    "inverse_image_congruence",
    "inverse_image_ideal",
    "is_ideal",
    "is_maximal_congruence",
    "is_maximal_ideal",
    "is_prime_congruence",
    "is_prime_ideal",
    "iz_ideal",
    "iz_profiles_agree",
    "kernel_of",
    "quotient_by",
    "radical",
]
