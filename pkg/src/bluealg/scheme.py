"""Spectra of blueprints: prime points, basis opens, stalks and residue
fields, section blueprints over opens, and the globalization comparison.

A space is stored combinatorially: finitely many prime ideals, each named
by the generators it contains, together with the basis opens U_h and the
specialization order.  Sections are represented by chart witnesses, a
cover U_{h_1}, ..., U_{h_k} with numerators a_i satisfying a_i h_j = a_j h_i,
so every question about a section reduces to monomial identities in the
base.  Global sections of a presented carrier are returned as a new
presentation: one generator per base generator plus one per discovered
witness, with the chart identities s * h_i = a_i as relations.  The chart
search is bounded, and each record says whether its answer is exhaustive.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from .kernel import (BlueError, Decision, FormalSum, Monomial,
                     MonoidPresentation, ZERO_MONOMIAL, all_hold)
from .blueprint import (
    Blueprint,
    BlueprintMorphism,
    EmbeddedBlueprint,
    EqualizerBlueprint,
    PresentedBlueprint,
    ProductBlueprint,
    TypeMismatch,
    classify,
    compose,
    find_isomorphism,
    identity_morphism,
    localize,
    tensor,
    terminal_blueprint,
    validate_morphism,
    _monoid_only,
)
from .congruence import (
    Ideal,
    InvalidMorphism,
    congruence_generated,
    congruence_of_ideal,
    enumerate_prime_ideals,
    ideal_generated,
    inverse_image_ideal,
    quotient_by,
)


class NotAnIdeal(BlueError):
    """The vanishing-set operator was handed something else."""


class StalkNotFinite(BlueError):
    """Gluing sections over a general open needs finite presented charts."""


class IncompleteEnumeration(BlueError):
    """A comparison map landed outside the enumerated point list."""


# ---------------------------------------------------------------------------
# spaces


@dataclass(frozen=True)
class SpecPoint:
    ident: str
    ideal: Ideal


@dataclass(eq=False)
class SpecSpace:
    """The prime spectrum, listed pointwise.

    ``basis_opens`` maps each base generator name to the idents of the
    points where it does not vanish; ``specialization`` lists the pairs
    (p, q) with p contained in q, read as q lying in the closure of p.
    ``undecided`` records membership questions none of the engines could
    settle; it is empty on every carrier with decided certificates.
    """

    base: Blueprint
    points: Tuple[SpecPoint, ...]
    basis_opens: Dict[str, Tuple[str, ...]]
    specialization: Tuple[Tuple[str, str], ...]
    complete: Decision
    undecided: Tuple[Tuple[str, str], ...] = ()
    _stalks: Dict[str, Tuple[Blueprint, BlueprintMorphism]] = field(
        default_factory=dict, repr=False)

    def ids(self) -> Tuple[str, ...]:
        return tuple(p.ident for p in self.points)

    def point(self, ident: str) -> SpecPoint:
        for p in self.points:
            if p.ident == ident:
                return p
        raise KeyError(ident)

    def open_of(self, element) -> FrozenSet[str]:
        """The basis open U_element: points whose ideal misses the element."""
        members, _ = _open_members(self, element)
        return members

    def closure_ids(self, ident: str) -> Tuple[str, ...]:
        down = [q for p, q in self.specialization if p == ident]
        return tuple(sorted(set(down) | {ident}))


def _open_members(space: SpecSpace, element) -> Tuple[FrozenSet[str],
                                                      Tuple[Tuple[str, str], ...]]:
    inside: Set[str] = set()
    undecided: List[Tuple[str, str]] = []
    for p in space.points:
        verdict = p.ideal.contains(element)
        if verdict.is_fails:
            inside.add(p.ident)
        elif verdict.is_unknown:
            undecided.append((p.ident, space.base.render(element)))
    return frozenset(inside), tuple(undecided)


def _point_ident(B: Blueprint, I: Ideal) -> str:
    if isinstance(B, PresentedBlueprint):
        names: Tuple[str, ...] = I.generator_support()
    else:
        z = B.zero()
        names = tuple(sorted(
            B.render(g) for g in I.generators
            if z is None or not B.eq(g, z)))
    return "(" + ",".join(names) + ")" if names else "(0)"


_SPEC_CACHE: Dict[object, SpecSpace] = {}


def _cache_key(B: Blueprint):
    try:
        return (type(B).__name__, hash(B))
    except TypeError:
        return None


def spec(B: Blueprint) -> SpecSpace:
    """Enumerate the prime ideals and assemble the spectrum."""
    key = _cache_key(B)
    if key is not None and key in _SPEC_CACHE:
        return _SPEC_CACHE[key]
    primes, completeness = enumerate_prime_ideals(B)
    named: List[SpecPoint] = []
    taken: Set[str] = set()
    for I in primes:
        ident = _point_ident(B, I)
        while ident in taken:
            ident += "'"
        taken.add(ident)
        named.append(SpecPoint(ident, I))
    points = tuple(sorted(named, key=lambda p: (len(p.ident), p.ident)))
    space = SpecSpace(B, points, {}, (), completeness)
    undecided: List[Tuple[str, str]] = []
    if isinstance(B, PresentedBlueprint):
        pool = [(n, B.generator(n)) for n in B.pres.generators]
    else:
        pool = [(B.render(a), a) for a in B.elements()]
    for name, el in pool:
        members, fuzzy = _open_members(space, el)
        space.basis_opens[name] = tuple(sorted(members))
        undecided.extend(fuzzy)
    pairs: List[Tuple[str, str]] = []
    for p in points:
        for q in points:
            if p.ident == q.ident:
                continue
            inside = [q.ideal.contains(g) for g in p.ideal.generators]
            if all(v.is_holds for v in inside):
                pairs.append((p.ident, q.ident))
            elif any(v.is_unknown for v in inside):
                undecided.append((q.ident, "contains " + p.ident))
    space.specialization = tuple(pairs)
    space.undecided = tuple(undecided)
    if key is not None:
        _SPEC_CACHE[key] = space
    return space


# ---------------------------------------------------------------------------
# closed sets


def v_closed(space: SpecSpace, I: Ideal) -> Tuple[str, ...]:
    """V(I): the points whose prime contains the given ideal."""
    if not isinstance(I, Ideal):
        raise NotAnIdeal("vanishing sets are cut out by Ideal instances")
    if I.base is not space.base and I.base != space.base:
        raise NotAnIdeal("the ideal lives on a different carrier")
    out = []
    for p in space.points:
        if all(p.ideal.contains(g).is_holds for g in I.generators):
            out.append(p.ident)
    return tuple(sorted(out))


def closure_of(space: SpecSpace, ident: str) -> Tuple[str, ...]:
    """The closure of a point: everything it specializes to."""
    space.point(ident)
    return space.closure_ids(ident)


def reduce_cover(space: SpecSpace, elements: Sequence) -> Tuple:
    """Greedy minimal subfamily with the same union of basis opens."""
    opens = [(el, space.open_of(el)) for el in elements]
    target: Set[str] = set()
    for _, o in opens:
        target |= o
    chosen: List = []
    covered: Set[str] = set()
    while covered != target:
        best = max(opens, key=lambda eo: (len(eo[1] - covered),
                                          space.base.render(eo[0])))
        if not best[1] - covered:
            break
        chosen.append(best[0])
        covered |= best[1]
    return tuple(chosen)


# ---------------------------------------------------------------------------
# stalks and residue fields


def _inverted_at(space: SpecSpace, ident: str) -> List:
    B = space.base
    p = space.point(ident)
    if isinstance(B, PresentedBlueprint):
        candidates = [B.generator(n) for n in B.pres.generators]
    else:
        candidates = [a for a in B.elements() if not B.eq(a, B.one())]
    out = []
    for el in candidates:
        verdict = p.ideal.contains(el)
        if verdict.is_unknown:
            raise IncompleteEnumeration(
                "membership of %s at %s is undecided" % (B.render(el), ident))
        if verdict.is_fails:
            out.append(el)
    return out


def stalk(space: SpecSpace, ident: str) -> Tuple[Blueprint, BlueprintMorphism]:
    """Localize the base at the complement of the point."""
    if ident in space._stalks:
        return space._stalks[ident]
    L, iota = localize(space.base, _inverted_at(space, ident),
                       label="stalk at " + ident)
    space._stalks[ident] = (L, iota)
    return L, iota


def residue_field(space: SpecSpace,
                  ident: str) -> Tuple[Blueprint, BlueprintMorphism]:
    """The stalk modulo its maximal ideal, with the composite projection."""
    L, iota = stalk(space, ident)
    p = space.point(ident)
    images = [iota(g) for g in p.ideal.generators]
    z = L.zero()
    if z is not None:
        pairs = [(z, g) for g in images if not L.eq(g, z)]
        c = congruence_generated(L, pairs, label="mod maximal ideal")
    else:
        c = congruence_of_ideal(ideal_generated(L, images))
    K, proj = quotient_by(L, c)
    return K, compose(iota, proj)


def is_blue_field(B: Blueprint) -> Decision:
    """Proper, has a zero, and every nonzero element is invertible.  The
    classification handles finite carriers; on an infinite presentation it
    suffices that 1 and 0 stay apart and each generator has an inverse,
    since the nonzero elements are exactly the monomials."""
    verdict = classify(B).is_blue_field
    if not verdict.is_unknown or not isinstance(B, PresentedBlueprint):
        return verdict
    if B.zero() is None:
        return Decision.fails(reason="no zero element")
    if not B.holds([B.one()], [B.zero()]).is_fails:
        return verdict
    for n in B.pres.generators:
        if _inverse_of(B, B.generator(n), B.budget.max_degree) is None:
            return Decision.unknown(
                reason="no inverse of %s within the degree window" % n)
    return Decision.holds(reason="all generators invertible")


# ---------------------------------------------------------------------------
# sections


@dataclass(frozen=True)
class SectionWitness:
    """A section given chartwise: on U_h the section times h equals a."""

    name: str
    charts: Tuple[Tuple[object, object], ...]

    def render(self, B: Blueprint) -> str:
        parts = ["%s/%s" % (B.render(a), B.render(h)) for h, a in self.charts]
        return "%s = %s" % (self.name, " = ".join(parts))


@dataclass(eq=False)
class GammaRecord:
    base: Blueprint
    space: SpecSpace
    gamma: Blueprint
    sigma: BlueprintMorphism
    extras: Tuple[SectionWitness, ...]
    inverse_pairs: Tuple[Tuple[str, object], ...]
    route: str
    complete: Decision


_GAMMA_CACHE: Dict[object, GammaRecord] = {}


def _graded(B: PresentedBlueprint) -> bool:
    """Degree is additive when no relation mixes degrees or touches zero."""
    for l, r in B.pres.relations:
        if l.is_zero or r.is_zero or l.degree() != r.degree():
            return False
    return True


def _preimage_of_witness(B: Blueprint, w: SectionWitness,
                         max_degree: Optional[int] = None):
    for b in B.elements(max_degree):
        if all(B.eq(B.mul(b, h), a) for h, a in w.charts):
            return b
    return None


def _discover_sections(B: PresentedBlueprint,
                       space: SpecSpace) -> Tuple[SectionWitness, ...]:
    """Bounded chart search for sections outside the image of the base.

    Covers are drawn from the generators, numerators from the elements of
    degree at most two; compatibility and triviality are exact monomial
    checks, so every witness returned is a genuine section."""
    names = B.pres.generators
    gens = [(n, B.generator(n)) for n in names]
    opens = {n: frozenset(space.basis_opens.get(n, ())) for n in names}
    whole = frozenset(space.ids())
    reps = list(B.elements(max_degree=min(2, B.budget.max_degree)))
    found: List[Tuple[SectionWitness, Tuple[FrozenSet[str], ...]]] = []
    budget = 50000
    for k in (1, 2, 3):
        for combo in itertools.combinations(gens, k):
            cover_opens = tuple(opens[n] for n, _ in combo)
            union: Set[str] = set()
            for o in cover_opens:
                union |= o
            if union != whole:
                continue
            hs = [h for _, h in combo]
            for assign in itertools.product(reps, repeat=k):
                budget -= 1
                if budget <= 0:
                    return tuple(w for w, _ in found)
                ok = True
                for i in range(k):
                    for j in range(i + 1, k):
                        if not B.eq(B.mul(assign[i], hs[j]),
                                    B.mul(assign[j], hs[i])):
                            ok = False
                            break
                    if not ok:
                        break
                if not ok:
                    continue
                charts = tuple(zip(hs, assign))
                probe = SectionWitness("", charts)
                if _preimage_of_witness(B, probe, 3) is not None:
                    continue
                if any(_scaled_copy(B, reps, w, wo, charts, cover_opens)
                       for w, wo in found):
                    continue
                name = "s%d" % (len(found) + 1)
                taken = set(names) | {w.name for w, _ in found}
                while name in taken:
                    name += "_"
                found.append((SectionWitness(name, charts), cover_opens))
                if len(found) == 3:
                    return tuple(w for w, _ in found)
    return tuple(w for w, _ in found)


def _same_section(B: PresentedBlueprint, charts1, opens1,
                  charts2, opens2) -> bool:
    """Cross compatibility on every overlapping chart pair; the pairwise
    overlaps of two covers exhaust the space, so agreement there is
    equality of sections."""
    for (h, a), o1 in zip(charts1, opens1):
        for (h2, a2), o2 in zip(charts2, opens2):
            if not (o1 & o2):
                continue
            if not B.eq(B.mul(a, h2), B.mul(a2, h)):
                return False
    return True


def _scaled_copy(B: PresentedBlueprint, reps, w: SectionWitness, w_opens,
                 charts, cover_opens) -> bool:
    """Whether the candidate equals b times an already found section for
    some base element b; such products need no generator of their own."""
    for b in reps:
        scaled = tuple((h, B.mul(b, a)) for h, a in w.charts)
        if _same_section(B, scaled, w_opens, charts, cover_opens):
            return True
    return False


def _present_gamma(B: PresentedBlueprint,
                   extras: Tuple[SectionWitness, ...]
                   ) -> Tuple[PresentedBlueprint, BlueprintMorphism]:
    base_names = B.pres.generators
    names = list(base_names)
    for w in extras:
        names.append(w.name)
    pad = (0,) * len(extras)

    def lift(m: Monomial) -> Monomial:
        return m if m.is_zero else Monomial(m.exps + pad)

    relations = [(lift(l), lift(r)) for l, r in B.pres.relations]
    for k, w in enumerate(extras):
        unit = tuple(1 if j == k else 0 for j in range(len(extras)))
        for h, a in w.charts:
            relations.append((Monomial(h.exps + unit), lift(a)))
    # products of witnesses that already live in the base become relations
    candidates = list(B.elements())
    for i, w in enumerate(extras):
        for j in range(i, len(extras)):
            w2 = extras[j]
            grid = [(B.mul(h, h2), B.mul(a, a2))
                    for h, a in w.charts for h2, a2 in w2.charts]
            match = next((b for b in candidates
                          if all(B.eq(B.mul(b, h), a) for h, a in grid)), None)
            if match is not None:
                unit = tuple((1 if t == i else 0) + (1 if t == j else 0)
                             for t in range(len(extras)))
                relations.append((Monomial((0,) * len(base_names) + unit),
                                  lift(match)))
    pres = MonoidPresentation(tuple(names), tuple(relations), B.pres.has_zero)
    preadd = tuple((FormalSum.of(lift(t) for t in x.terms),
                    FormalSum.of(lift(t) for t in y.terms))
                   for x, y in B.preadd)
    G = PresentedBlueprint(pres, preadd, B.budget, B.cancellative_rule,
                           label=(B.label + " sections") if B.label
                           else "global sections")
    sigma = BlueprintMorphism(B, G, tuple(
        (n, G.pres.normalize(lift(B.generator(n)))) for n in base_names),
        name="sigma")
    return G, sigma


def gamma_record(B: Blueprint) -> GammaRecord:
    """Global sections with their provenance; cached per carrier."""
    key = _cache_key(B)
    if key is not None and key in _GAMMA_CACHE:
        return _GAMMA_CACHE[key]
    space = spec(B)
    if not space.points:
        G = terminal_blueprint()
        if isinstance(B, PresentedBlueprint):
            data = tuple((n, G.one()) for n in B.pres.generators)
        else:
            data = tuple((a, G.one()) for a in B.elements())
        rec = GammaRecord(B, space, G,
                          BlueprintMorphism(B, G, data, name="sigma"),
                          (), (), "empty",
                          Decision.holds(reason="no points"))
    elif _monoid_only(B):
        rec = GammaRecord(B, space, B, identity_morphism(B), (), (), "monoid",
                          Decision.holds(reason="monoidal pre-addition"))
    elif len(space.points) == 1:
        ident = space.points[0].ident
        inverted = _inverted_at(space, ident)
        L, iota = stalk(space, ident)
        inverse_pairs: Tuple[Tuple[str, object], ...] = ()
        if isinstance(L, PresentedBlueprint) and isinstance(B, PresentedBlueprint):
            extra_names = L.pres.generators[len(B.pres.generators):]
            inverse_pairs = tuple(zip(extra_names, inverted))
        rec = GammaRecord(B, space, L, iota, (), inverse_pairs, "point",
                          Decision.holds(reason="single chart"))
    elif isinstance(B, PresentedBlueprint):
        extras = _discover_sections(B, space)
        G, sigma = _present_gamma(B, extras)
        rec = GammaRecord(B, space, G, sigma, extras, (), "charts",
                          Decision.unknown(reason="chart search is bounded"))
    else:
        rec = GammaRecord(B, space, B, identity_morphism(B), (), (), "image",
                          Decision.unknown(reason="no presentation to extend"))
    if key is not None:
        _GAMMA_CACHE[key] = rec
    return rec


def globalization(B: Blueprint) -> Tuple[Blueprint, BlueprintMorphism]:
    """The blueprint of global sections and the comparison morphism into it."""
    rec = gamma_record(B)
    return rec.gamma, rec.sigma


def sections(space: SpecSpace, opens: Iterable[str]) -> Blueprint:
    """Sections over a union of basis opens.

    The empty set gets the terminal blueprint, the whole space the global
    sections, a single basis open the sections of the localized base, and
    any other union is glued from finite presented charts."""
    want = frozenset(opens)
    ids = frozenset(space.ids())
    if not want <= ids:
        raise KeyError(sorted(want - ids)[0])
    if not want:
        return terminal_blueprint()
    if want == ids:
        return globalization(space.base)[0]
    B = space.base
    pool = _basis_pool(space)
    for el, members in pool:
        if members == want:
            return globalization(localize(B, [el])[0])[0]
    cover = [eo for eo in pool if eo[1] and eo[1] <= want]
    covered: Set[str] = set()
    chosen: List[Tuple[object, FrozenSet[str]]] = []
    for el, members in cover:
        if not members <= covered:
            chosen.append((el, members))
            covered |= members
    if covered != want:
        raise ValueError("not a union of basis opens within the pool")
    return _glued_sections(space, chosen)


def _basis_pool(space: SpecSpace) -> List[Tuple[object, FrozenSet[str]]]:
    B = space.base
    if isinstance(B, PresentedBlueprint):
        gens = [B.generator(n) for n in B.pres.generators]
        els = list(gens)
        for i in range(len(gens)):
            for j in range(i, len(gens)):
                els.append(B.mul(gens[i], gens[j]))
    else:
        els = list(B.elements())
    out = []
    seen: Set[FrozenSet[str]] = set()
    for el in els:
        members = space.open_of(el)
        out.append((el, members))
        seen.add(members)
    return out


def _glued_sections(space: SpecSpace,
                    charts: Sequence[Tuple[object, FrozenSet[str]]]) -> Blueprint:
    """Compatible families over the chart localizations.  Exact, hence
    restricted to finite presented charts whose sections are the chart
    itself."""
    B = space.base
    if not isinstance(B, PresentedBlueprint):
        raise StalkNotFinite("gluing needs a presented base")
    locs = []
    for el, members in charts:
        L, iota = localize(B, [el])
        if not L.is_finite():
            raise StalkNotFinite("chart %s is not finite" % B.render(el))
        locs.append((el, members, L, iota))
    factors = tuple(L for _, _, L, _ in locs)
    P = ProductBlueprint(factors, label="chart product")
    conditions = []
    for i in range(len(locs)):
        for j in range(i + 1, len(locs)):
            el_i, mem_i, L_i, _ = locs[i]
            el_j, mem_j, L_j, _ = locs[j]
            if not (mem_i & mem_j):
                continue
            L_ij, iota_ij = localize(B, [el_i, el_j])
            m_i = _chart_restriction(B, el_i, L_i, L_ij, iota_ij)
            m_j = _chart_restriction(B, el_j, L_j, L_ij, iota_ij)
            if m_i is None or m_j is None:
                raise StalkNotFinite("no restriction map between charts")
            conditions.append((i, j, L_ij, m_i, m_j))
    members = []
    for t in P.elements():
        if all(L_ij.eq(m_i(t[i]), m_j(t[j]))
               for i, j, L_ij, m_i, m_j in conditions):
            members.append(t)
    return EqualizerBlueprint(P, tuple(members), True, label="glued sections")


def _chart_restriction(B: PresentedBlueprint, el, L: Blueprint,
                       L_ij: Blueprint, iota_ij: BlueprintMorphism
                       ) -> Optional[BlueprintMorphism]:
    if not isinstance(L, PresentedBlueprint) or not isinstance(L_ij, PresentedBlueprint):
        return None
    data = []
    base_names = B.pres.generators
    for n in base_names:
        data.append((n, iota_ij(B.generator(n))))
    for n in L.pres.generators[len(base_names):]:
        inv = _inverse_of(L_ij, iota_ij(el))
        if inv is None:
            return None
        data.append((n, inv))
    return BlueprintMorphism(L, L_ij, tuple(data), name="restrict")


def _inverse_of(L: Blueprint, x, max_degree: int = 4):
    for v in L.elements(max_degree):
        if L.eq(L.mul(x, v), L.one()):
            return v
    return None


# ---------------------------------------------------------------------------
# globality


def is_global(B: Blueprint) -> Decision:
    """Whether the comparison into the global sections is an isomorphism."""
    rec = gamma_record(B)
    if rec.route == "monoid":
        return Decision.holds(reason="sections over the trivial cover are "
                                     "fractions with unit denominators")
    if rec.route == "empty":
        els = list(B.elements())
        if len(els) <= 1:
            return Decision.holds(reason="terminal carrier")
        return Decision.fails(witness=B.render(els[1]),
                              reason="collapse onto the terminal sections")
    if rec.route == "point":
        return _units_verdict(B, rec)
    if rec.route == "charts":
        for w in rec.extras:
            if _preimage_of_witness(B, w) is not None:
                continue
            idempotent = "unknown"
            follower = gamma_record(rec.gamma)
            if not follower.extras:
                idempotent = "yes"
            if _graded(B):
                return Decision.fails(witness=w.render(B),
                                      reason="section with no preimage",
                                      idempotent=idempotent)
            return Decision.unknown(reason="no preimage of %s within the "
                                           "degree window" % w.name)
        return Decision.unknown(reason="no extra sections within bounds")
    return Decision.unknown(reason="global sections not computed")


def _units_verdict(B: Blueprint, rec: GammaRecord) -> Decision:
    """A single point is global exactly when the inverted complement was
    already invertible."""
    inverted = _inverted_at(rec.space, rec.space.points[0].ident)
    for u in inverted:
        if _inverse_of(B, u, max_degree=B.budget.max_degree
                       if isinstance(B, PresentedBlueprint) else None) is None:
            if B.is_finite():
                return Decision.fails(witness=B.render(u),
                                      reason="not a unit")
            return Decision.unknown(reason="no inverse of %s within the "
                                           "degree window" % B.render(u))
    return Decision.holds(reason="complement of the point is a unit group")


# ---------------------------------------------------------------------------
# stalkwise comparison maps


def _stalk_map(f: BlueprintMorphism, src_space: SpecSpace, p_ident: str,
               tgt_space: SpecSpace, q_ident: str
               ) -> Tuple[Optional[BlueprintMorphism], Decision]:
    """The induced map between stalks, built on generators: base generators
    go through f, adjoined inverses to the inverses of their images."""
    L1, _ = stalk(src_space, p_ident)
    L2, i2 = stalk(tgt_space, q_ident)
    if not isinstance(L1, PresentedBlueprint) or not isinstance(L2, PresentedBlueprint):
        return None, _finite_stalk_iso(L1, L2)
    B = src_space.base
    if not isinstance(B, PresentedBlueprint):
        return None, _finite_stalk_iso(L1, L2)
    inverted = _inverted_at(src_space, p_ident)
    base_names = B.pres.generators
    data: List[Tuple[str, object]] = []
    for n in base_names:
        data.append((n, i2(f(B.generator(n)))))
    for n, u in zip(L1.pres.generators[len(base_names):], inverted):
        inv = _inverse_of(L2, i2(f(u)))
        if inv is None:
            return None, Decision.unknown(
                reason="no inverse of %s in the target stalk" % B.render(u))
        data.append((n, inv))
    phi = BlueprintMorphism(L1, L2, tuple(data), name="stalk map")
    return phi, validate_morphism(phi, max_terms=2)


def _finite_stalk_iso(L1: Blueprint, L2: Blueprint) -> Decision:
    if L1.is_finite() and L2.is_finite() \
            and len(L1.elements()) <= 16 and len(L2.elements()) <= 16:
        pair = find_isomorphism(L1, L2)
        if pair is not None:
            return Decision.holds(reason="finite isomorphism found")
        return Decision.fails(reason="no isomorphism between finite stalks")
    return Decision.unknown(reason="stalk backends not comparable")


def _iso_verdict(phi: Optional[BlueprintMorphism], valid: Decision) -> Decision:
    """Bounded two-sided check: every target generator has a preimage and
    no two small elements collide."""
    if phi is None:
        return valid
    checks = [valid]
    L1, L2 = phi.source, phi.target
    if isinstance(L2, PresentedBlueprint):
        window = list(L1.elements(3))
        images = [(x, phi(x)) for x in window]
        for n in L2.pres.generators:
            target = L2.generator(n)
            if not any(L2.eq(img, target) for _, img in images):
                checks.append(Decision.unknown(
                    reason="no preimage of %s within degree 3" % n))
                break
    small = list(L1.elements(2))[:48]
    mapped = [(x, phi(x)) for x in small]
    for i in range(len(mapped)):
        for j in range(i + 1, len(mapped)):
            if L2.eq(mapped[i][1], mapped[j][1]) \
                    and not L1.eq(mapped[i][0], mapped[j][0]):
                checks.append(Decision.fails(
                    witness=(L1.render(mapped[i][0]), L1.render(mapped[j][0])),
                    reason="stalk map identifies distinct germs"))
                return all_hold(checks)
    return all_hold(checks)


# ---------------------------------------------------------------------------
# the globalization comparison


@dataclass(eq=False)
class SpecIsoReport:
    base: Blueprint
    gamma: Blueprint
    base_space: SpecSpace
    gamma_space: SpecSpace
    point_map: Tuple[Tuple[str, str], ...]
    pullback_bijective: Decision
    pushforward_roundtrip: Decision
    opens_match: Decision
    stalk_isos: Decision
    verdict: Decision

    def as_dict(self) -> Dict[str, object]:
        return {
            "points": dict(self.point_map),
            "pullback_bijective": _decision_json(self.pullback_bijective),
            "pushforward_roundtrip": _decision_json(self.pushforward_roundtrip),
            "opens_match": _decision_json(self.opens_match),
            "stalk_isos": _decision_json(self.stalk_isos),
            "verdict": _decision_json(self.verdict),
        }


def _identity_report(B: Blueprint, rec: GammaRecord,
                     verdict: Decision) -> SpecIsoReport:
    pm = tuple((i, i) for i in rec.space.ids())
    same = Decision.holds(reason="sections equal the base")
    return SpecIsoReport(B, rec.gamma, rec.space, rec.space, pm,
                         same, same, same, same, verdict)


def verify_spec_iso(B: Blueprint) -> SpecIsoReport:
    """Check that the comparison morphism identifies the two spectra: the
    pullback of points is a bijection, its inverse is the stalkwise
    pushforward, basis opens correspond, and stalk maps are isomorphisms."""
    rec = gamma_record(B)
    if rec.route in ("monoid", "empty"):
        return _identity_report(B, rec, Decision.holds(
            reason="sections equal the base"))
    if rec.route == "image":
        return _identity_report(B, rec, Decision.unknown(
            reason="global sections not computed"))
    X = rec.space
    Y = spec(rec.gamma)
    x_ids = set(X.ids())
    point_map: List[Tuple[str, str]] = []
    for q in Y.points:
        J = inverse_image_ideal(rec.sigma, q.ideal)
        ident = _point_ident(B, J)
        if ident not in x_ids:
            raise IncompleteEnumeration(
                "pullback of %s lands outside the enumerated base points"
                % q.ident)
        point_map.append((q.ident, ident))
    images = [p for _, p in point_map]
    if len(set(images)) == len(images) and set(images) == x_ids:
        bijective = Decision.holds()
    else:
        missing = sorted(x_ids - set(images))
        bijective = Decision.fails(witness=missing[0] if missing
                                   else images[0],
                                   reason="pullback is not a bijection")
    pushforward = _pushforward_roundtrip(rec, Y, point_map)
    opens = _opens_match(rec, X, Y, point_map)
    iso_checks = []
    for q_ident, p_ident in point_map[:8]:
        phi, valid = _stalk_map(rec.sigma, X, p_ident, Y, q_ident)
        iso_checks.append(_iso_verdict(phi, valid))
    stalks = all_hold(iso_checks)
    verdict = all_hold([bijective, pushforward, opens, stalks])
    return SpecIsoReport(B, rec.gamma, X, Y, tuple(point_map),
                         bijective, pushforward, opens, stalks, verdict)


def _gamma_generator_values(rec: GammaRecord) -> List[Tuple[str, object]]:
    """Each gamma generator with the data needed to evaluate it at a point:
    either a base element or a chart witness."""
    out: List[Tuple[str, object]] = []
    G = rec.gamma
    if not isinstance(G, PresentedBlueprint):
        return out
    B = rec.base
    base_names = B.pres.generators if isinstance(B, PresentedBlueprint) else ()
    witness = {w.name: w for w in rec.extras}
    inverse = dict(rec.inverse_pairs)
    for n in G.pres.generators:
        if n in witness:
            out.append((n, witness[n]))
        elif n in inverse:
            out.append((n, ("inverse", inverse[n])))
        elif n in base_names:
            out.append((n, ("base", B.generator(n))))
    return out


def _value_vanishes(p: SpecPoint, payload) -> Decision:
    """Whether the generator's germ at the point lies in the maximal ideal."""
    if isinstance(payload, SectionWitness):
        for h, a in payload.charts:
            if p.ideal.contains(h).is_fails:
                return p.ideal.contains(a)
        return Decision.unknown(reason="no chart covers the point")
    kind, el = payload
    if kind == "inverse":
        return Decision.fails(reason="inverted germ is a unit")
    return p.ideal.contains(el)


def _pushforward_roundtrip(rec: GammaRecord, Y: SpecSpace,
                           point_map: Sequence[Tuple[str, str]]) -> Decision:
    """sigma_* sends p to the sections vanishing at p; composed with the
    pullback this must be the identity, which on supports means: a gamma
    generator lies in the partner point iff its germ vanishes."""
    partners = {p: q for q, p in point_map}
    values = _gamma_generator_values(rec)
    G = rec.gamma
    if not isinstance(G, PresentedBlueprint):
        if rec.route == "point" and len(rec.space.points) == 1:
            p = rec.space.points[0]
            q = Y.point(partners[p.ident])
            m = ideal_generated(G, [rec.sigma(g) for g in p.ideal.generators])
            checks = []
            for s in G.elements():
                vanishes = m.contains(s)
                inside = q.ideal.contains(s)
                if vanishes.is_unknown or inside.is_unknown:
                    checks.append(Decision.unknown(
                        reason="membership of %s undecided" % G.render(s)))
                elif vanishes.kind != inside.kind:
                    return Decision.fails(
                        witness=G.render(s),
                        reason="pushforward disagrees with the partner point")
                else:
                    checks.append(Decision.holds())
            return all_hold(checks)
        return Decision.unknown(reason="gamma is not presented")
    checks = []
    for p in rec.space.points:
        q_ident = partners.get(p.ident)
        if q_ident is None:
            return Decision.fails(witness=p.ident,
                                  reason="point without partner")
        q = Y.point(q_ident)
        for name, payload in values:
            vanishes = _value_vanishes(p, payload)
            inside = q.ideal.contains(G.generator(name))
            if vanishes.is_unknown or inside.is_unknown:
                checks.append(Decision.unknown(
                    reason="membership of %s at %s undecided" % (name, p.ident)))
                continue
            if vanishes.kind != inside.kind:
                return Decision.fails(
                    witness=(p.ident, name),
                    reason="pushforward disagrees with the partner point")
            checks.append(Decision.holds())
    return all_hold(checks)


def _opens_match(rec: GammaRecord, X: SpecSpace, Y: SpecSpace,
                 point_map: Sequence[Tuple[str, str]]) -> Decision:
    B = rec.base
    if not isinstance(B, PresentedBlueprint):
        return Decision.holds(reason="no named basis")
    mapped = dict(point_map)
    checks = []
    for n in B.pres.generators:
        target = frozenset(X.basis_opens.get(n, ()))
        image_open = Y.open_of(rec.sigma(B.generator(n)))
        pulled = frozenset(mapped[q] for q in image_open)
        if pulled == target and len(image_open) == len(pulled):
            checks.append(Decision.holds())
        else:
            checks.append(Decision.fails(
                witness=n, reason="basis open does not correspond"))
    return all_hold(checks)


# ---------------------------------------------------------------------------
# induced morphisms


@dataclass(eq=False)
class InducedMorphism:
    """The map on spectra induced by a blueprint morphism, with locality
    and continuity evidence."""

    morphism: BlueprintMorphism
    source_space: SpecSpace
    target_space: SpecSpace
    point_map: Tuple[Tuple[str, str], ...]
    continuous: Decision
    local: Decision
    stalk_maps: Tuple[Tuple[str, Optional[BlueprintMorphism], Decision], ...]


def induced_morphism(f: BlueprintMorphism) -> InducedMorphism:
    ok = validate_morphism(f)
    if ok.is_fails:
        raise InvalidMorphism("not a blueprint morphism: %r" % (ok.detail,))
    Xs = spec(f.source)
    Xt = spec(f.target)
    pairs: List[Tuple[str, str]] = []
    for q in Xt.points:
        J = inverse_image_ideal(f, q.ideal)
        ident = _point_ident(f.source, J)
        if ident not in set(Xs.ids()):
            raise IncompleteEnumeration(
                "preimage of %s missing from the source spectrum" % q.ident)
        pairs.append((q.ident, ident))
    mapped = dict(pairs)
    cont_checks = []
    if isinstance(f.source, PresentedBlueprint):
        for n in f.source.pres.generators:
            open_src = frozenset(Xs.basis_opens.get(n, ()))
            expect = frozenset(q for q, p in pairs if p in open_src)
            got = Xt.open_of(f(f.source.generator(n)))
            cont_checks.append(Decision.holds() if got == expect
                               else Decision.fails(witness=n))
    continuous = all_hold(cont_checks) if cont_checks else Decision.holds()
    local_checks = []
    maps = []
    for q_ident, p_ident in pairs:
        p = Xs.point(p_ident)
        q = Xt.point(q_ident)
        for g in p.ideal.generators:
            local_checks.append(q.ideal.contains(f(g)))
        phi, valid = _stalk_map(f, Xs, p_ident, Xt, q_ident)
        maps.append((q_ident, phi, valid))
    return InducedMorphism(f, Xs, Xt, tuple(pairs), continuous,
                           all_hold(local_checks), tuple(maps))


# ---------------------------------------------------------------------------
# localization as an open immersion


@dataclass(eq=False)
class LocalizationReport:
    base: Blueprint
    element: object
    localized: Blueprint
    open_ids: Tuple[str, ...]
    point_map: Tuple[Tuple[str, str], ...]
    into_open: Decision
    bijective: Decision
    opens_match: Decision
    stalk_isos: Decision
    verdict: Decision

    def as_dict(self) -> Dict[str, object]:
        return {
            "element": self.base.render(self.element),
            "open": list(self.open_ids),
            "points": dict(self.point_map),
            "into_open": _decision_json(self.into_open),
            "bijective": _decision_json(self.bijective),
            "opens_match": _decision_json(self.opens_match),
            "stalk_isos": _decision_json(self.stalk_isos),
            "verdict": _decision_json(self.verdict),
        }


def localization_iso_check(B: Blueprint, element) -> LocalizationReport:
    """Spec of the localization against the basis open it should carve out:
    point bijection, correspondence of opens, and stalkwise isomorphisms."""
    X = spec(B)
    L, iota = localize(B, [element])
    Y = spec(L)
    open_ids = tuple(sorted(X.open_of(element)))
    pairs: List[Tuple[str, str]] = []
    for q in Y.points:
        J = inverse_image_ideal(iota, q.ideal)
        pairs.append((q.ident, _point_ident(B, J)))
    into = all(p in open_ids for _, p in pairs)
    into_open = Decision.holds() if into else Decision.fails(
        witness=next(p for _, p in pairs if p not in open_ids),
        reason="image point contains the inverted element")
    images = [p for _, p in pairs]
    if into and len(set(images)) == len(images) and set(images) == set(open_ids):
        bijective = Decision.holds()
    else:
        bijective = Decision.fails(reason="not a bijection onto the open")
    opens_checks = []
    if isinstance(B, PresentedBlueprint) and into and bijective.is_holds:
        mapped = dict(pairs)
        for n in B.pres.generators:
            expect = frozenset(X.basis_opens.get(n, ())) & frozenset(open_ids)
            got = frozenset(mapped[q] for q in Y.open_of(iota(B.generator(n))))
            opens_checks.append(Decision.holds() if got == expect
                                else Decision.fails(witness=n))
    opens_ok = all_hold(opens_checks) if opens_checks else Decision.holds(
        reason="no named basis to compare")
    iso_checks = []
    for q_ident, p_ident in pairs[:8]:
        if p_ident not in open_ids:
            continue
        phi, valid = _stalk_map(iota, X, p_ident, Y, q_ident)
        iso_checks.append(_iso_verdict(phi, valid))
    stalks = all_hold(iso_checks) if iso_checks else Decision.holds(
        reason="empty open")
    verdict = all_hold([into_open, bijective, opens_ok, stalks])
    return LocalizationReport(B, element, L, open_ids, tuple(pairs),
                              into_open, bijective, opens_ok, stalks, verdict)


# ---------------------------------------------------------------------------
# disjoint unions and fibre products


@dataclass(eq=False)
class UnionSpace:
    """A finite disjoint union of spectra; points carry their component
    index as a prefix."""

    components: Tuple[SpecSpace, ...]

    def ids(self) -> Tuple[str, ...]:
        out = []
        for k, comp in enumerate(self.components):
            out.extend("%d:%s" % (k, ident) for ident in comp.ids())
        return tuple(out)

    @property
    def complete(self) -> Decision:
        return all_hold(comp.complete for comp in self.components)


def disjoint_union(spaces: Sequence[SpecSpace]) -> UnionSpace:
    return UnionSpace(tuple(spaces))


def union_sections(union: UnionSpace) -> Blueprint:
    """Sections over a disjoint union: the product of the component
    sections, one value per component."""
    gammas = tuple(globalization(comp.base)[0] for comp in union.components)
    return ProductBlueprint(gammas, label="sections of a disjoint union")


@dataclass(eq=False)
class FibreProductRecord:
    blueprint: Blueprint
    space: SpecSpace
    left: BlueprintMorphism
    right: BlueprintMorphism
    left_points: Tuple[Tuple[str, str], ...]
    right_points: Tuple[Tuple[str, str], ...]


def affine_fibre_product(f: BlueprintMorphism,
                         g: BlueprintMorphism,
                         label: str = "") -> FibreProductRecord:
    """Spec of the tensor product over the common source, with the two
    projection point maps."""
    T, i1, i2 = tensor(f, g, label=label)
    space = spec(T)
    left_space = spec(f.target)
    right_space = spec(g.target)
    lp = []
    rp = []
    for q in space.points:
        lp.append((q.ident, _point_ident(f.target,
                                         inverse_image_ideal(i1, q.ideal))))
        rp.append((q.ident, _point_ident(g.target,
                                         inverse_image_ideal(i2, q.ideal))))
    for _, ident in lp:
        if ident not in set(left_space.ids()):
            raise IncompleteEnumeration("left projection misses " + ident)
    for _, ident in rp:
        if ident not in set(right_space.ids()):
            raise IncompleteEnumeration("right projection misses " + ident)
    return FibreProductRecord(T, space, i1, i2, tuple(lp), tuple(rp))


# ---------------------------------------------------------------------------
# serialization


def _decision_json(d: Decision) -> Dict[str, object]:
    out: Dict[str, object] = {"kind": d.kind}
    for k, v in d.detail:
        out[k] = v if isinstance(v, (str, int, bool)) else repr(v)
    return out


def space_to_json(space) -> str:
    if isinstance(space, UnionSpace):
        points = []
        opens: Dict[str, List[str]] = {}
        special: List[List[str]] = []
        complete = space.complete.is_holds
        for k, comp in enumerate(space.components):
            tag = lambda ident: "%d:%s" % (k, ident)
            for p in comp.points:
                points.append({"id": tag(p.ident),
                               "generators": sorted(
                                   comp.base.render(g)
                                   for g in p.ideal.generators)})
            for name, ids in sorted(comp.basis_opens.items()):
                opens["%d:%s" % (k, name)] = [tag(i) for i in ids]
            special.extend([tag(a), tag(b)] for a, b in comp.specialization)
        payload = {"points": points, "basis_opens": opens,
                   "specialization": sorted(special), "complete": complete}
    else:
        payload = {
            "points": [{"id": p.ident,
                        "generators": sorted(space.base.render(g)
                                             for g in p.ideal.generators)}
                       for p in space.points],
            "basis_opens": {k: list(v)
                            for k, v in sorted(space.basis_opens.items())},
            "specialization": sorted([a, b]
                                     for a, b in space.specialization),
            "complete": space.complete.is_holds,
        }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def space_to_dot(space) -> str:
    """The specialization order as a DOT digraph, transitively reduced."""
    if isinstance(space, UnionSpace):
        nodes = list(space.ids())
        edges = set()
        for k, comp in enumerate(space.components):
            edges |= {("%d:%s" % (k, a), "%d:%s" % (k, b))
                      for a, b in comp.specialization}
    else:
        nodes = list(space.ids())
        edges = set(space.specialization)
    reduced = {(a, b) for a, b in edges
               if not any((a, c) in edges and (c, b) in edges
                          for c in nodes if c not in (a, b))}
    lines = ["digraph spec {", "  rankdir=BT;"]
    for n in sorted(nodes):
        lines.append('  "%s";' % n)
    for a, b in sorted(reduced):
        lines.append('  "%s" -> "%s";' % (a, b))
    lines.append("}")
    return "\n".join(lines) + "\n"


__all__ = [
    "FibreProductRecord",
    "GammaRecord",
    "IncompleteEnumeration",
    "InducedMorphism",
    "LocalizationReport",
    "NotAnIdeal",
    "SectionWitness",
    "SpecIsoReport",
    "SpecPoint",
    "SpecSpace",
    "StalkNotFinite",
    "UnionSpace",
    "affine_fibre_product",
    "closure_of",
    "disjoint_union",
    "gamma_record",
    "globalization",
    "induced_morphism",
    "is_blue_field",
    "is_global",
    "localization_iso_check",
    "reduce_cover",
    "residue_field",
    "sections",
    "space_to_dot",
    "space_to_json",
    "spec",
    "stalk",
    "union_sections",
    "v_closed",
    "verify_spec_iso",
]
