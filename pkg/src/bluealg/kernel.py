"""Exact base layer: commutative monoid presentations, formal sums, finite semirings.

Monomials over a presentation are exponent vectors plus a distinguished
absorbing element (the zero monomial, available when the presentation is
declared with a zero).  Relations are oriented into rewrite rules by a
degree-reverse-lexicographic order, larger side to smaller, so rewriting
always terminates.  Local confluence is checked on critical pairs and a
bounded completion pass tries to join the misses; the resulting flag tells
callers whether normal forms are canonical or merely deterministic.

Every question that cannot be settled inside the declared budget is answered
with an explicit Unknown instead of a guess.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple


class BlueError(Exception):
    """Base class for all package errors."""


class InvalidPresentation(BlueError):
    pass


class InvalidSemiring(BlueError):
    pass


class ZeroPresent(BlueError):
    """Raised when a constructor requires a presentation without a zero."""


class UndecidedError(BlueError):
    """Raised when a construction needs a fact the engine could not decide."""


# ---------------------------------------------------------------------------
# decisions and budgets


HOLDS = "holds"
FAILS = "fails"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class Decision:
    """Three-valued answer.  Fails is only produced from a complete closure;
    Unknown carries a short witness of which bound was exhausted."""

    kind: str
    detail: Tuple[Tuple[str, object], ...] = ()

    @staticmethod
    def holds(**info: object) -> "Decision":
        return Decision(HOLDS, tuple(sorted(info.items())))

    @staticmethod
    def fails(**info: object) -> "Decision":
        return Decision(FAILS, tuple(sorted(info.items())))

    @staticmethod
    def unknown(**info: object) -> "Decision":
        return Decision(UNKNOWN, tuple(sorted(info.items())))

    @property
    def is_holds(self) -> bool:
        return self.kind == HOLDS

    @property
    def is_fails(self) -> bool:
        return self.kind == FAILS

    @property
    def is_unknown(self) -> bool:
        return self.kind == UNKNOWN

    def info(self) -> Dict[str, object]:
        return dict(self.detail)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        if not self.detail:
            return f"Decision({self.kind})"
        return f"Decision({self.kind}, {dict(self.detail)})"


def all_hold(decisions: Iterable[Decision]) -> Decision:
    """Conjunction: Fails dominates, then Unknown, else Holds."""
    unknown = None
    for d in decisions:
        if d.is_fails:
            return d
        if d.is_unknown and unknown is None:
            unknown = d
    return unknown if unknown is not None else Decision.holds()


@dataclass(frozen=True)
class Budget:
    """Bounds for saturation and enumeration.  All searches are exact within
    these bounds and report Unknown beyond them."""

    max_degree: int = 6
    max_terms: int = 4
    max_pairs: int = 100000
    max_exponent: int = 3
    max_steps: int = 20000
    max_elements: int = 4096

    def shrink_degree(self, d: int) -> "Budget":
        return replace(self, max_degree=min(self.max_degree, d))


DEFAULT_BUDGET = Budget()


# ---------------------------------------------------------------------------
# monomials


@dataclass(frozen=True)
class Monomial:
    """Element of a finitely generated commutative monoid, as an exponent
    vector over the presentation's generators.  exps is None for the zero
    (absorbing) monomial, which is not a product of generators."""

    exps: Optional[Tuple[int, ...]]

    @property
    def is_zero(self) -> bool:
        return self.exps is None

    def degree(self) -> int:
        return 0 if self.exps is None else sum(self.exps)

    def key(self) -> Tuple:
        # zero sorts below every true monomial; ties inside a degree are
        # broken reverse-lexicographically (later generators weigh less)
        if self.exps is None:
            return (0,)
        return (1, sum(self.exps), tuple(-e for e in reversed(self.exps)))

    def __lt__(self, other: "Monomial") -> bool:
        return self.key() < other.key()

    def divides(self, other: "Monomial") -> bool:
        if self.exps is None or other.exps is None:
            return False
        return all(a <= b for a, b in zip(self.exps, other.exps))


ZERO_MONOMIAL = Monomial(None)


def monomial_one(ngens: int) -> Monomial:
    return Monomial((0,) * ngens)


def monomial_gen(ngens: int, i: int) -> Monomial:
    return Monomial(tuple(1 if j == i else 0 for j in range(ngens)))


def monomial_mul(a: Monomial, b: Monomial) -> Monomial:
    if a.exps is None or b.exps is None:
        return ZERO_MONOMIAL
    return Monomial(tuple(x + y for x, y in zip(a.exps, b.exps)))


def monomial_div(a: Monomial, b: Monomial) -> Monomial:
    # caller guarantees b divides a
    assert a.exps is not None and b.exps is not None
    return Monomial(tuple(x - y for x, y in zip(a.exps, b.exps)))


def monomial_lcm(a: Monomial, b: Monomial) -> Monomial:
    assert a.exps is not None and b.exps is not None
    return Monomial(tuple(max(x, y) for x, y in zip(a.exps, b.exps)))


# ---------------------------------------------------------------------------
# formal sums


@dataclass(frozen=True)
class FormalSum:
    """Finite multiset of monomials, kept sorted.  The empty sum is a value
    in its own right and is not the same thing as the sum with one zero
    term; identifying the two is a property of a particular pre-addition."""

    terms: Tuple[Monomial, ...]

    @staticmethod
    def of(monomials: Iterable[Monomial]) -> "FormalSum":
        return FormalSum(tuple(sorted(monomials, key=Monomial.key)))

    @staticmethod
    def empty() -> "FormalSum":
        return FormalSum(())

    @staticmethod
    def single(m: Monomial) -> "FormalSum":
        return FormalSum((m,))

    @property
    def is_empty(self) -> bool:
        return not self.terms

    def __len__(self) -> int:
        return len(self.terms)

    def add(self, other: "FormalSum") -> "FormalSum":
        return FormalSum.of(self.terms + other.terms)

    def scale(self, m: Monomial) -> "FormalSum":
        return FormalSum.of(monomial_mul(m, t) for t in self.terms)

    def mul(self, other: "FormalSum") -> "FormalSum":
        out: List[Monomial] = []
        for a in self.terms:
            for b in other.terms:
                out.append(monomial_mul(a, b))
        return FormalSum.of(out)

    def max_degree(self) -> int:
        return max((t.degree() for t in self.terms), default=0)

    def contains(self, other: "FormalSum") -> bool:
        """Multiset containment."""
        rest = list(self.terms)
        for t in other.terms:
            if t in rest:
                rest.remove(t)
            else:
                return False
        return True

    def remove(self, other: "FormalSum") -> "FormalSum":
        rest = list(self.terms)
        for t in other.terms:
            rest.remove(t)
        return FormalSum.of(rest)

    def common(self, other: "FormalSum") -> "FormalSum":
        """Largest multiset contained in both."""
        rest = list(other.terms)
        out = []
        for t in self.terms:
            if t in rest:
                rest.remove(t)
                out.append(t)
        return FormalSum.of(out)

    def union_max(self, other: "FormalSum") -> "FormalSum":
        """Smallest multiset containing both."""
        return self.add(other.remove(self.common(other)))


def sum_greater(a: FormalSum, b: FormalSum) -> bool:
    """Multiset extension of the monomial order; total on distinct sums."""
    c = a.common(b)
    ra, rb = a.remove(c), b.remove(c)
    if ra.is_empty:
        return False
    if rb.is_empty:
        return True
    return ra.terms[-1].key() > rb.terms[-1].key()


# ---------------------------------------------------------------------------
# monoid presentations


Rule = Tuple[Monomial, Monomial]


@dataclass(frozen=True)
class MonoidPresentation:
    """Finitely presented commutative monoid, optionally with an absorbing
    zero.  The symbol "0" is reserved for the zero and is not a generator."""

    generators: Tuple[str, ...]
    relations: Tuple[Rule, ...] = ()
    has_zero: bool = False

    def __post_init__(self) -> None:
        seen: Set[str] = set()
        for g in self.generators:
            if g in ("0", "1", "empty"):
                raise InvalidPresentation(f"reserved symbol used as generator: {g}")
            if g in seen:
                raise InvalidPresentation(f"duplicate generator: {g}")
            seen.add(g)
        n = len(self.generators)
        for lhs, rhs in self.relations:
            for m in (lhs, rhs):
                if m.exps is not None and len(m.exps) != n:
                    raise InvalidPresentation("relation arity does not match generators")
                if m.is_zero and not self.has_zero:
                    raise InvalidPresentation("zero used in a relation of a zero-free presentation")

    @property
    def ngens(self) -> int:
        return len(self.generators)

    def one(self) -> Monomial:
        return monomial_one(self.ngens)

    def zero(self) -> Monomial:
        if not self.has_zero:
            raise InvalidPresentation("presentation has no zero")
        return ZERO_MONOMIAL

    def gen(self, name: str) -> Monomial:
        if name == "0" and self.has_zero:
            return ZERO_MONOMIAL
        try:
            return monomial_gen(self.ngens, self.generators.index(name))
        except ValueError:
            raise InvalidPresentation(f"unknown generator: {name}") from None

    def monomial(self, powers: Dict[str, int]) -> Monomial:
        exps = [0] * self.ngens
        for name, e in powers.items():
            exps[self.generators.index(name)] += e
        return Monomial(tuple(exps))

    # -- rewriting ---------------------------------------------------------

    def _oriented(self) -> List[Rule]:
        rules: List[Rule] = []
        for lhs, rhs in self.relations:
            if lhs == rhs:
                continue
            if lhs.key() < rhs.key():
                lhs, rhs = rhs, lhs
            rules.append((lhs, rhs))
        return rules

    def rewrite_system(self) -> "RewriteSystem":
        return _rewrite_system_cache(self)

    def normalize(self, m: Monomial) -> Monomial:
        """Deterministic normal form; canonical iff the system is confluent."""
        return self.rewrite_system().normalize(m)

    def is_confluent(self) -> bool:
        return self.rewrite_system().confluent

    def mul(self, a: Monomial, b: Monomial) -> Monomial:
        return self.normalize(monomial_mul(a, b))

    def monoid_equal(self, a: Monomial, b: Monomial,
                     budget: Budget = DEFAULT_BUDGET) -> Decision:
        """Word problem.  Normal forms settle it on a confluent system;
        otherwise a bounded bidirectional search over relation moves."""
        rs = self.rewrite_system()
        na, nb = rs.normalize(a), rs.normalize(b)
        if na == nb:
            return Decision.holds()
        if rs.confluent:
            return Decision.fails()
        return self._equal_search(na, nb, budget)

    def _equal_search(self, a: Monomial, b: Monomial, budget: Budget) -> Decision:
        moves: List[Rule] = []
        for lhs, rhs in self.relations:
            moves.append((lhs, rhs))
            moves.append((rhs, lhs))
        rs = self.rewrite_system()
        complete = True

        def neighbors(m: Monomial) -> List[Monomial]:
            nonlocal complete
            out = []
            for lhs, rhs in moves:
                if lhs.is_zero:
                    if m.is_zero:
                        # every multiple of rhs is also reachable; only the
                        # unit multiple is explored, so closure is partial
                        complete = False
                        out.append(rs.normalize(rhs))
                    continue
                if m.is_zero:
                    continue
                if lhs.divides(m):
                    n = rs.normalize(monomial_mul(monomial_div(m, lhs), rhs))
                    if n.degree() <= budget.max_degree:
                        out.append(n)
                    else:
                        complete = False
            return out

        seen: Dict[Monomial, int] = {a: 0, b: 1}
        frontier = [a, b]
        steps = 0
        while frontier and steps < budget.max_steps:
            nxt: List[Monomial] = []
            for m in frontier:
                side = seen[m]
                for n in neighbors(m):
                    steps += 1
                    if n in seen:
                        if seen[n] != side:
                            return Decision.holds()
                    else:
                        seen[n] = side
                        nxt.append(n)
            frontier = nxt
        if frontier or steps >= budget.max_steps:
            return Decision.unknown(steps=steps, max_degree=budget.max_degree)
        if complete:
            return Decision.fails()
        return Decision.unknown(max_degree=budget.max_degree)

    # -- enumeration -------------------------------------------------------

    def finite_elements(self, budget: Budget = DEFAULT_BUDGET) -> Optional[Tuple[Monomial, ...]]:
        """All elements when the monoid is finite, None when the closure from
        1 under the generators escapes the enumeration bounds."""
        return self.rewrite_system().finite_elements(budget)

    def elements(self, max_degree: int, budget: Budget = DEFAULT_BUDGET) -> Tuple[Monomial, ...]:
        """Normal forms of all generator products of total degree <= max_degree
        (plus the zero when present).  Canonical on a confluent system."""
        fin = self.finite_elements(budget)
        if fin is not None:
            return tuple(m for m in fin if m.degree() <= max_degree)
        rs = self.rewrite_system()
        out: Set[Monomial] = set()
        if self.has_zero:
            out.add(ZERO_MONOMIAL)
        for exps in _vectors_up_to(self.ngens, max_degree):
            m = rs.normalize(Monomial(exps))
            if m.degree() <= max_degree:
                out.add(m)
        return tuple(sorted(out, key=Monomial.key))

    def render(self, m: Monomial) -> str:
        if m.is_zero:
            return "0"
        if m.degree() == 0:
            return "1"
        parts = []
        for name, e in zip(self.generators, m.exps or ()):
            if e == 1:
                parts.append(name)
            elif e > 1:
                parts.append(f"{name}^{e}")
        return "*".join(parts)

    def render_sum(self, s: FormalSum) -> str:
        if s.is_empty:
            return "empty"
        return " + ".join(self.render(t) for t in s.terms)


def _vectors_up_to(n: int, d: int) -> Iterable[Tuple[int, ...]]:
    if n == 0:
        yield ()
        return
    for total in range(d + 1):
        for cuts in itertools.combinations(range(total + n - 1), n - 1):
            vec = []
            prev = -1
            for c in cuts:
                vec.append(c - prev - 1)
                prev = c
            vec.append(total + n - 2 - prev)
            yield tuple(vec)


class RewriteSystem:
    """Oriented rules plus a bounded completion pass.  Completion only ever
    adds consequences of the input relations, so normalization is always
    sound; `confluent` certifies that normal forms are canonical."""

    MAX_RULES = 160
    MAX_PAIR_ROUNDS = 12

    def __init__(self, pres: MonoidPresentation):
        self.pres = pres
        self.rules: List[Rule] = []
        for rule in pres._oriented():
            if rule not in self.rules:
                self.rules.append(rule)
        self._nf_cache: Dict[Monomial, Monomial] = {}
        self._finite: Optional[Tuple[Monomial, ...]] = None
        self._finite_known = False
        self.confluent = self._complete()

    def _reduce_once(self, m: Monomial) -> Optional[Monomial]:
        if m.is_zero:
            return None
        for lhs, rhs in self.rules:
            if lhs.divides(m):
                return monomial_mul(monomial_div(m, lhs), rhs)
        return None

    def normalize(self, m: Monomial) -> Monomial:
        if m in self._nf_cache:
            return self._nf_cache[m]
        orig = m
        while True:
            n = self._reduce_once(m)
            if n is None:
                break
            m = n
        self._nf_cache[orig] = m
        return m

    def _critical_pairs(self) -> List[Tuple[Monomial, Monomial]]:
        pairs = []
        for i, (l1, r1) in enumerate(self.rules):
            for l2, r2 in self.rules[i:]:
                big = monomial_lcm(l1, l2)
                a = monomial_mul(monomial_div(big, l1), r1)
                b = monomial_mul(monomial_div(big, l2), r2)
                if a != b:
                    pairs.append((a, b))
        return pairs

    def _complete(self) -> bool:
        for _ in range(self.MAX_PAIR_ROUNDS):
            new_rules: List[Rule] = []
            for a, b in self._critical_pairs():
                na, nb = self.normalize(a), self.normalize(b)
                if na == nb:
                    continue
                if na.key() < nb.key():
                    na, nb = nb, na
                if (na, nb) not in self.rules and (na, nb) not in new_rules:
                    new_rules.append((na, nb))
            if not new_rules:
                return True
            if len(self.rules) + len(new_rules) > self.MAX_RULES:
                return False
            self.rules.extend(new_rules)
            self._nf_cache = {}
        return False

    def finite_elements(self, budget: Budget) -> Optional[Tuple[Monomial, ...]]:
        if self._finite_known:
            return self._finite
        n = self.pres.ngens
        seen: Set[Monomial] = {self.normalize(monomial_one(n))}
        if self.pres.has_zero:
            seen.add(ZERO_MONOMIAL)
        frontier = list(seen)
        ok = True
        while frontier:
            nxt = []
            for m in frontier:
                for i in range(n):
                    p = self.normalize(monomial_mul(m, monomial_gen(n, i)))
                    if p not in seen:
                        if p.degree() > 2 * budget.max_degree or len(seen) >= budget.max_elements:
                            ok = False
                            break
                        seen.add(p)
                        nxt.append(p)
                if not ok:
                    break
            if not ok:
                break
            frontier = nxt
        self._finite_known = True
        self._finite = tuple(sorted(seen, key=Monomial.key)) if ok else None
        return self._finite


_REWRITE_CACHE: Dict[MonoidPresentation, RewriteSystem] = {}


def _rewrite_system_cache(pres: MonoidPresentation) -> RewriteSystem:
    rs = _REWRITE_CACHE.get(pres)
    if rs is None:
        rs = RewriteSystem(pres)
        _REWRITE_CACHE[pres] = rs
    return rs


def normalize(pres: MonoidPresentation, m: Monomial) -> Monomial:
    return pres.normalize(m)


def monoid_equal(pres: MonoidPresentation, a: Monomial, b: Monomial,
                 budget: Budget = DEFAULT_BUDGET) -> Decision:
    return pres.monoid_equal(a, b, budget)


# ---------------------------------------------------------------------------
# finite semirings


@dataclass(frozen=True)
class FiniteSemiring:
    """Commutative semiring on a finite carrier given by full tables.
    Tables are index-valued: add[i][j] and mul[i][j] name carrier elements."""

    labels: Tuple[str, ...]
    add: Tuple[Tuple[int, ...], ...]
    mul: Tuple[Tuple[int, ...], ...]
    zero: int
    one: int

    def __post_init__(self) -> None:
        n = len(self.labels)
        if len(set(self.labels)) != n:
            raise InvalidSemiring("duplicate labels")
        for table in (self.add, self.mul):
            if len(table) != n or any(len(row) != n for row in table):
                raise InvalidSemiring("table shape does not match carrier")
            for row in table:
                if any(not (0 <= v < n) for v in row):
                    raise InvalidSemiring("table entry out of range")
        if not (0 <= self.zero < n and 0 <= self.one < n):
            raise InvalidSemiring("zero/one out of range")

    @property
    def size(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise InvalidSemiring(f"unknown element: {label}") from None

    def add_many(self, xs: Sequence[int]) -> int:
        acc = self.zero
        for x in xs:
            acc = self.add[acc][x]
        return acc

    def mul_many(self, xs: Sequence[int]) -> int:
        acc = self.one
        for x in xs:
            acc = self.mul[acc][x]
        return acc


def check_semiring_axioms(R: FiniteSemiring) -> Decision:
    """Commutative semiring axioms with 0 absorbing; counterexample reported."""
    rng = range(R.size)
    for x in rng:
        if R.add[R.zero][x] != x:
            return Decision.fails(axiom="additive unit", at=R.labels[x])
        if R.mul[R.one][x] != x:
            return Decision.fails(axiom="multiplicative unit", at=R.labels[x])
        if R.mul[R.zero][x] != R.zero:
            return Decision.fails(axiom="zero absorbs", at=R.labels[x])
        for y in rng:
            if R.add[x][y] != R.add[y][x]:
                return Decision.fails(axiom="additive commutativity", at=(R.labels[x], R.labels[y]))
            if R.mul[x][y] != R.mul[y][x]:
                return Decision.fails(axiom="multiplicative commutativity", at=(R.labels[x], R.labels[y]))
            for z in rng:
                if R.add[R.add[x][y]][z] != R.add[x][R.add[y][z]]:
                    return Decision.fails(axiom="additive associativity",
                                          at=(R.labels[x], R.labels[y], R.labels[z]))
                if R.mul[R.mul[x][y]][z] != R.mul[x][R.mul[y][z]]:
                    return Decision.fails(axiom="multiplicative associativity",
                                          at=(R.labels[x], R.labels[y], R.labels[z]))
                if R.mul[x][R.add[y][z]] != R.add[R.mul[x][y]][R.mul[x][z]]:
                    return Decision.fails(axiom="distributivity",
                                          at=(R.labels[x], R.labels[y], R.labels[z]))
    return Decision.holds()


def subset_generates(R: FiniteSemiring, subset: Sequence[int]) -> Decision:
    """Does the subset generate R under + and *?  Exact closure."""
    closure: Set[int] = {R.zero, R.one}
    closure.update(subset)
    changed = True
    while changed:
        changed = False
        for x in list(closure):
            for y in list(closure):
                for v in (R.add[x][y], R.mul[x][y]):
                    if v not in closure:
                        closure.add(v)
                        changed = True
    if len(closure) == R.size:
        return Decision.holds()
    missing = [R.labels[i] for i in range(R.size) if i not in closure]
    return Decision.fails(missing=tuple(missing))


def semiring_nat_truncated(k: int) -> FiniteSemiring:
    """Naturals with saturation at k: separates counting relations that
    boolean targets collapse."""
    labels = tuple(str(i) for i in range(k + 1))
    add = tuple(tuple(min(i + j, k) for j in range(k + 1)) for i in range(k + 1))
    mul = tuple(tuple(min(i * j, k) for j in range(k + 1)) for i in range(k + 1))
    return FiniteSemiring(labels, add, mul, zero=0, one=1)


def semiring_zmod(n: int) -> FiniteSemiring:
    labels = tuple(str(i) for i in range(n))
    add = tuple(tuple((i + j) % n for j in range(n)) for i in range(n))
    mul = tuple(tuple((i * j) % n for j in range(n)) for i in range(n))
    return FiniteSemiring(labels, add, mul, zero=0, one=1 % n)


def semiring_boolean() -> FiniteSemiring:
    """Two-element semiring with 1 + 1 = 1."""
    return FiniteSemiring(("0", "1"), ((0, 1), (1, 1)), ((0, 0), (0, 1)), zero=0, one=1)


def semiring_min_plus(k: int) -> FiniteSemiring:
    """Degrees 0..k with min as addition and truncated + as multiplication
    (the additive identity is the formal infinity): grades monomials by
    degree, which separates an element from the ideal its powers generate."""
    labels = tuple(str(i) for i in range(k + 1)) + ("inf",)
    inf = k + 1

    def add(i: int, j: int) -> int:
        return min(i, j)  # inf is the largest index, so min is correct

    def mul(i: int, j: int) -> int:
        if i == inf or j == inf:
            return inf
        return min(i + j, k)

    size = k + 2
    return FiniteSemiring(labels,
                          tuple(tuple(add(i, j) for j in range(size)) for i in range(size)),
                          tuple(tuple(mul(i, j) for j in range(size)) for i in range(size)),
                          zero=inf, one=0)
