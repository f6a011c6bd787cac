"""Bounded decision engine for generated pre-additions.

A pre-addition generated by finitely many sum relations is the smallest
equivalence on formal sums containing them and closed under adding and
multiplying relations.  Equivalently, two sums are related iff they are
connected by elementary moves: replace a submultiset t*lhs by t*rhs for a
generator relation (lhs, rhs) and a single monomial multiplier t.

The engine materializes the ground instances of the generators over a
multiplier set, orients each instance by the multiset order, and rewrites
with the decreasing direction.  Equal reducts always certify Holds.  Fails
is certified on three independent routes, each sound:

  * canonical route: the instance system passes a local-confluence check and
    the multiplier set provably covers every move that can touch the bounded
    universe (finite monoid, or free generators where degrees only add);
  * closure route: the full equivalence component of one side is enumerated
    without hitting any bound and does not contain the other side;
  * separation route: some morphism into a finite semiring, found by search,
    gives the two sides different values.

Everything else is Unknown, with the exhausted bound reported.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .kernel import (
    Budget,
    Decision,
    FiniteSemiring,
    FormalSum,
    Monomial,
    MonoidPresentation,
    ZERO_MONOMIAL,
    semiring_boolean,
    semiring_min_plus,
    semiring_nat_truncated,
    semiring_zmod,
    sum_greater,
)

SumPair = Tuple[FormalSum, FormalSum]


def canonical_sum(pres: MonoidPresentation, s: FormalSum) -> FormalSum:
    return FormalSum.of(pres.normalize(t) for t in s.terms)


@dataclass(frozen=True)
class EngineKey:
    pres: MonoidPresentation
    generators: Tuple[SumPair, ...]
    cancellative: bool
    budget: Budget


class InstanceSystem:
    """Oriented ground instances of the pre-addition generators plus the
    bookkeeping needed to state how much of the relation they determine."""

    COMPLETION_ROUNDS = 6
    MAX_INSTANCES = 6000

    def __init__(self, pres: MonoidPresentation, generators: Sequence[SumPair],
                 budget: Budget, cancellative: bool = False):
        self.pres = pres
        self.budget = budget
        self.cancellative = cancellative
        self.generators: List[SumPair] = [
            (canonical_sum(pres, a), canonical_sum(pres, b)) for a, b in generators
        ]
        self._nf_cache: Dict[FormalSum, FormalSum] = {}

        fin = pres.finite_elements(budget)
        self.monoid_finite = fin is not None
        self.monoid_free = not pres.relations
        if fin is not None:
            self.multipliers: Tuple[Monomial, ...] = fin
            self.multipliers_complete = pres.is_confluent()
        else:
            self.multipliers = pres.elements(budget.max_degree, budget)
            # degrees only add over free generators, so no instance above the
            # degree bound can touch a sum inside it
            self.multipliers_complete = self.monoid_free
        self.max_relation_degree = max(
            (m.degree() for a, b in self.generators for m in a.terms + b.terms),
            default=0,
        )
        self.instances: List[SumPair] = []
        self._rules_by_top: Dict[Monomial, List[SumPair]] = {}
        self._build_instances()
        if self.monoid_finite:
            degrees_ok = True
        else:
            # minimal overlaps between instances use multipliers no larger
            # than a relation side, so their superpositions must fit the bound
            degrees_ok = 2 * self.max_relation_degree <= budget.max_degree
        # a confluence certificate only ever matters when the multiplier set
        # is complete; skipping it otherwise keeps large systems affordable
        can_be_exact = self.multipliers_complete and not cancellative and degrees_ok
        self.certified = self._certify() if can_be_exact else False
        self.exact = self.certified and can_be_exact

    # -- instance generation ------------------------------------------------

    def _add_instance(self, a: FormalSum, b: FormalSum) -> bool:
        if a == b:
            return False
        if not sum_greater(a, b):
            a, b = b, a
        if not self.monoid_finite and a.max_degree() > self.budget.max_degree:
            return False
        pair = (a, b)
        if pair in self._instance_set:
            return False
        self._instance_set.add(pair)
        self.instances.append(pair)
        # the larger side is never empty, so it has a top term to index on
        self._rules_by_top.setdefault(a.terms[-1], []).append(pair)
        return True

    def _build_instances(self) -> None:
        self._instance_set: Set[SumPair] = set()
        for a, b in self.generators:
            for t in self.multipliers:
                if len(self.instances) >= self.MAX_INSTANCES:
                    self.multipliers_complete = False
                    return
                ta = canonical_sum(self.pres, a.scale(t))
                tb = canonical_sum(self.pres, b.scale(t))
                self._add_instance(ta, tb)
        if self.cancellative:
            self._saturate_cancellation()

    def _saturate_cancellation(self) -> None:
        # close the instance pool under stripping shared terms: from
        # x + w == y + w conclude x == y
        changed = True
        rounds = 0
        while changed and rounds < self.COMPLETION_ROUNDS:
            changed = False
            rounds += 1
            for a, b in list(self.instances):
                c = a.common(b)
                if not c.is_empty:
                    if self._add_instance(a.remove(c), b.remove(c)):
                        changed = True
            # shared terms may only become visible after joining two
            # instances whose normal forms agree
            by_nf: Dict[FormalSum, List[FormalSum]] = {}
            for a, b in list(self.instances):
                for side in (a, b):
                    by_nf.setdefault(self.reduce(side), []).append(side)
            for group in by_nf.values():
                for u, v in itertools.combinations(group, 2):
                    if u == v:
                        continue
                    c = u.common(v)
                    if not c.is_empty:
                        if self._add_instance(u.remove(c), v.remove(c)):
                            changed = True
            if changed:
                self._nf_cache = {}

    # -- rewriting -----------------------------------------------------------

    def _reduce_once(self, s: FormalSum) -> Optional[FormalSum]:
        for top in sorted(set(s.terms), key=lambda m: m.key(), reverse=True):
            for a, b in self._rules_by_top.get(top, ()):
                if len(a) <= len(s) and s.contains(a):
                    return s.remove(a).add(b)
        return None

    def reduce(self, s: FormalSum) -> FormalSum:
        if s in self._nf_cache:
            return self._nf_cache[s]
        orig = s
        steps = 0
        while steps < self.budget.max_steps:
            n = self._reduce_once(s)
            if n is None:
                break
            s = n
            steps += 1
        self._nf_cache[orig] = s
        return s

    # -- certification -------------------------------------------------------

    def _certify(self) -> bool:
        """Bounded completion on instance overlaps; True when every overlap
        joins, so normal forms are canonical on the covered universe."""
        for _ in range(self.COMPLETION_ROUNDS):
            # only overlapping patterns produce genuine peaks; disjoint
            # redexes commute unconditionally in a multiset context
            by_term: Dict[Monomial, List[int]] = {}
            for i, (a, _) in enumerate(self.instances):
                for m in set(a.terms):
                    by_term.setdefault(m, []).append(i)
            candidates: Set[Tuple[int, int]] = set()
            for idxs in by_term.values():
                candidates.update(itertools.combinations(idxs, 2))
            if len(candidates) > self.budget.max_pairs:
                return False
            new_pairs: List[SumPair] = []
            for i, j in sorted(candidates):
                a, a2 = self.instances[i]
                b, b2 = self.instances[j]
                w = a.union_max(b)
                left = self.reduce(w.remove(a).add(a2))
                right = self.reduce(w.remove(b).add(b2))
                if left != right:
                    new_pairs.append((left, right))
            if not new_pairs:
                return True
            if len(self.instances) + len(new_pairs) > self.MAX_INSTANCES:
                return False
            added = False
            for left, right in new_pairs:
                if self._add_instance(left, right):
                    added = True
            self._nf_cache = {}
            if not added:
                return True
        return False

    # -- component closure ----------------------------------------------------

    def component_search(self, x: FormalSum, y: FormalSum,
                         step_cap: Optional[int] = None) -> Decision:
        """Bidirectional closure under elementary moves.  A meet certifies
        Holds; two disjoint components that closed without clipping certify
        Fails provided the move set itself is complete."""
        budget = self.budget
        max_steps = step_cap if step_cap is not None else budget.max_steps
        moves: List[SumPair] = []
        for a, b in self.instances:
            moves.append((a, b))
            moves.append((b, a))
        complete = self.multipliers_complete and not self.cancellative
        # a move can touch s only if the largest term of its pattern occurs
        # in s; patternless moves apply everywhere
        by_top: Dict[Monomial, List[SumPair]] = {}
        anywhere: List[SumPair] = []
        for a, b in moves:
            if a.is_empty:
                anywhere.append((a, b))
            else:
                by_top.setdefault(a.terms[-1], []).append((a, b))

        def neighbors(s: FormalSum) -> Tuple[List[FormalSum], bool]:
            out = []
            clipped = False
            candidates = list(anywhere)
            for top in set(s.terms):
                candidates.extend(by_top.get(top, ()))
            for a, b in candidates:
                if len(a) <= len(s) and s.contains(a):
                    n = s.remove(a).add(b)
                    if len(n) > budget.max_terms or n.max_degree() > budget.max_degree:
                        clipped = True
                    else:
                        out.append(n)
            return out, clipped

        seen: Dict[FormalSum, int] = {x: 0, y: 1}
        frontier = [x, y]
        steps = 0
        clipped_any = False
        while frontier:
            nxt: List[FormalSum] = []
            for s in frontier:
                side = seen[s]
                ns, clipped = neighbors(s)
                clipped_any = clipped_any or clipped
                for n in ns:
                    steps += 1
                    if steps > max_steps:
                        return Decision.unknown(steps=steps)
                    if n in seen:
                        if seen[n] != side:
                            return Decision.holds()
                    else:
                        seen[n] = side
                        nxt.append(n)
            frontier = nxt
        if complete and not clipped_any:
            return Decision.fails()
        return Decision.unknown(component=len(seen), max_terms=budget.max_terms,
                                max_degree=budget.max_degree)

    # -- decision -------------------------------------------------------------

    SEARCH_STEPS = 4000

    def decide(self, lhs: FormalSum, rhs: FormalSum,
               separators: Optional["SeparatorFamily"] = None) -> Decision:
        x = canonical_sum(self.pres, lhs)
        y = canonical_sum(self.pres, rhs)
        if x == y:
            return Decision.holds()
        nx, ny = self.reduce(x), self.reduce(y)
        if nx == ny:
            return Decision.holds()
        in_universe = (
            x.max_degree() <= self.budget.max_degree
            and y.max_degree() <= self.budget.max_degree
        )
        if self.exact and in_universe:
            return Decision.fails()
        if separators is not None:
            sep = separators.separate(x, y)
            if sep.is_fails:
                return sep
        search = self.component_search(nx, ny, step_cap=self.SEARCH_STEPS)
        if not search.is_unknown:
            return search
        return Decision.unknown(**search.info())

    def derived_relations(self) -> List[SumPair]:
        """The instance pool: every member is a consequence of the generators."""
        return list(self.instances)


# ---------------------------------------------------------------------------
# separation morphisms


def _separation_targets() -> List[FiniteSemiring]:
    return [
        semiring_zmod(2),
        semiring_boolean(),
        semiring_zmod(3),
        semiring_min_plus(3),
        semiring_nat_truncated(4),
        semiring_zmod(5),
        semiring_zmod(7),
        semiring_zmod(11),
        semiring_zmod(13),
    ]


class SeparatorFamily:
    """Morphisms from a presented blueprint into small finite semirings.

    Any multiplicative map sending the monoid relations and the pre-addition
    generators to equalities extends to sums, so a value disagreement on a
    pair of sums refutes the pair soundly.
    """

    MAX_PER_TARGET = 600
    MAX_NODES = 300000

    def __init__(self, pres: MonoidPresentation, generators: Sequence[SumPair]):
        self.pres = pres
        self.generators = [
            (canonical_sum(pres, a), canonical_sum(pres, b)) for a, b in generators
        ]
        self._morphisms: Optional[List[Tuple[FiniteSemiring, Tuple[int, ...]]]] = None

    def _eval_monomial(self, R: FiniteSemiring, assign: Sequence[int], m: Monomial) -> int:
        if m.is_zero:
            return R.zero
        acc = R.one
        for img, e in zip(assign, m.exps or ()):
            for _ in range(e):
                acc = R.mul[acc][img]
        return acc

    def _eval_sum(self, R: FiniteSemiring, assign: Sequence[int], s: FormalSum) -> int:
        return R.add_many([self._eval_monomial(R, assign, t) for t in s.terms])

    def _search_target(self, R: FiniteSemiring) -> List[Tuple[int, ...]]:
        n = self.pres.ngens
        relations = list(self.pres.relations)
        found: List[Tuple[int, ...]] = []
        nodes = 0

        def supported(m: Monomial, k: int) -> bool:
            return m.is_zero or all(e == 0 for e in (m.exps or ())[k:])

        def check_prefix(assign: List[int], k: int) -> bool:
            for lhs, rhs in relations:
                if supported(lhs, k) and supported(rhs, k):
                    if self._eval_monomial(R, assign, lhs) != self._eval_monomial(R, assign, rhs):
                        return False
            if k == n:
                for a, b in self.generators:
                    if self._eval_sum(R, assign, a) != self._eval_sum(R, assign, b):
                        return False
            return True

        def descend(assign: List[int], k: int) -> None:
            nonlocal nodes
            if nodes > self.MAX_NODES or len(found) >= self.MAX_PER_TARGET:
                return
            if k == n:
                if check_prefix(assign, k):
                    found.append(tuple(assign))
                return
            for v in range(R.size):
                nodes += 1
                assign.append(v)
                if check_prefix(assign, k + 1):
                    descend(assign, k + 1)
                assign.pop()
                if nodes > self.MAX_NODES:
                    return

        descend([], 0)
        return found

    def morphisms(self) -> List[Tuple[FiniteSemiring, Tuple[int, ...]]]:
        if self._morphisms is None:
            self._morphisms = []
            for R in _separation_targets():
                for assign in self._search_target(R):
                    self._morphisms.append((R, assign))
        return self._morphisms

    def separate(self, x: FormalSum, y: FormalSum) -> Decision:
        for R, assign in self.morphisms():
            if self._eval_sum(R, assign, x) != self._eval_sum(R, assign, y):
                return Decision.fails(separated_in=f"semiring of size {R.size}")
        return Decision.unknown(separators=len(self.morphisms()))

    def refine_partition(self, sums: Sequence[FormalSum]) -> List[List[int]]:
        """Group indices by the value vector under every found morphism;
        distinct groups are provably inequivalent."""
        keys: Dict[Tuple[int, ...], List[int]] = {}
        for i, s in enumerate(sums):
            key = tuple(self._eval_sum(R, assign, s) for R, assign in self.morphisms())
            keys.setdefault(key, []).append(i)
        return list(keys.values())


_ENGINE_CACHE: Dict[EngineKey, InstanceSystem] = {}
_SEPARATOR_CACHE: Dict[Tuple[MonoidPresentation, Tuple[SumPair, ...]], SeparatorFamily] = {}


def engine_for(pres: MonoidPresentation, generators: Tuple[SumPair, ...],
               budget: Budget, cancellative: bool = False) -> InstanceSystem:
    key = EngineKey(pres, generators, cancellative, budget)
    eng = _ENGINE_CACHE.get(key)
    if eng is None:
        eng = InstanceSystem(pres, generators, budget, cancellative)
        _ENGINE_CACHE[key] = eng
    return eng


def separators_for(pres: MonoidPresentation,
                   generators: Tuple[SumPair, ...]) -> SeparatorFamily:
    key = (pres, generators)
    fam = _SEPARATOR_CACHE.get(key)
    if fam is None:
        fam = SeparatorFamily(pres, generators)
        _SEPARATOR_CACHE[key] = fam
    return fam
