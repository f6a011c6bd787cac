"""Independent reference implementations used to cross-check the library.

Everything here recomputes results from first principles with different
algorithms than the package: the word problem by union-find over a bounded
monomial universe instead of rewriting, the pre-addition by saturating an
explicit pair set instead of the instance engine, and integer ranks by
fraction-free Gaussian elimination instead of Smith normal form.

Raw data model: a monomial is a tuple of exponents, the absorbing zero is
the string "zero", and a sum is a sorted tuple of monomials (the empty
tuple is the empty sum).
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

ZERO = "zero"


def _mono_key(m):
    return (0, ()) if m == ZERO else (1, sum(m), m)


def _mul(a, b):
    if a == ZERO or b == ZERO:
        return ZERO
    return tuple(x + y for x, y in zip(a, b))


def _deg(m) -> int:
    return 0 if m == ZERO else sum(m)


class _Classes:
    """Union-find with deterministic minimal representatives."""

    def __init__(self) -> None:
        self.parent: Dict[object, object] = {}

    def add(self, x) -> None:
        self.parent.setdefault(x, x)

    def find(self, x):
        r = x
        while self.parent[r] != r:
            r = self.parent[r]
        while self.parent[x] != r:
            self.parent[x], x = r, self.parent[x]
        return r

    def union(self, x, y) -> bool:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        # keep the smaller key as the root so representatives are canonical
        if _key_any(ry) < _key_any(rx):
            rx, ry = ry, rx
        self.parent[ry] = rx
        return True


def _key_any(x):
    if isinstance(x, tuple) and x and isinstance(x[0], (tuple, str)):
        return (1, len(x), tuple(_mono_key(m) for m in x))  # a sum
    return (0, _mono_key(x))  # a monomial


class BruteClosure:
    """Bounded, exhaustive closure of a presented blueprint.

    The monomial universe is every exponent vector of total degree at most
    max_degree (plus the zero when declared); the sum universe is every
    multiset of at most max_terms universe monomials.  Both closures are
    saturated to a fixpoint, so within these bounds membership is exact.
    """

    def __init__(self, ngens: int, relations: Sequence[Tuple[object, object]],
                 has_zero: bool, preadd: Sequence[Tuple[tuple, tuple]],
                 max_degree: int = 4, max_terms: int = 4) -> None:
        self.ngens = ngens
        self.has_zero = has_zero
        self.max_degree = max_degree
        self.max_terms = max_terms
        self.monomials = self._monomial_universe()
        self.mono_classes = self._close_monoid(relations)
        self.reps = sorted({self.mono_classes.find(m)
                            for m in self.monomials}, key=_mono_key)
        self.sums = self._sum_universe()
        self.sum_classes = self._close_preadd(preadd)

    # -- monoid level

    def _monomial_universe(self) -> List[object]:
        out: List[object] = []
        if self.has_zero:
            out.append(ZERO)
        for total in range(self.max_degree + 1):
            for exps in _compositions(self.ngens, total):
                out.append(exps)
        return out

    def _close_monoid(self, relations) -> _Classes:
        uf = _Classes()
        for m in self.monomials:
            uf.add(m)
        changed = True
        while changed:
            changed = False
            for l, r in relations:
                for m in self.monomials:
                    a, b = _mul(l, m), _mul(r, m)
                    if a in uf.parent and b in uf.parent:
                        changed |= uf.union(a, b)
        return uf

    def nf(self, m):
        if m == ZERO and not self.has_zero:
            raise ValueError("no zero in this presentation")
        if m not in self.mono_classes.parent:
            raise ValueError("monomial outside the oracle universe: %r" % (m,))
        return self.mono_classes.find(m)

    def _canon_sum(self, terms: Iterable) -> tuple:
        return tuple(sorted((self.nf(t) for t in terms), key=_mono_key))

    # -- pre-addition level

    def _sum_universe(self) -> List[tuple]:
        out = [()]
        for k in range(1, self.max_terms + 1):
            for combo in itertools.combinations_with_replacement(self.reps, k):
                out.append(tuple(sorted(combo, key=_mono_key)))
        return out

    def _close_preadd(self, preadd) -> _Classes:
        uf = _Classes()
        universe = set(self.sums)
        for s in self.sums:
            uf.add(s)
        work: List[Tuple[tuple, tuple]] = []

        def unite(x: tuple, y: tuple) -> None:
            if uf.union(x, y):
                work.append((x, y))

        for l, r in preadd:
            unite(self._canon_sum(l), self._canon_sum(r))
        while work:
            x, y = work.pop()
            # stability under adding any sum from the universe
            for a in self.sums:
                if len(x) + len(a) > self.max_terms \
                        or len(y) + len(a) > self.max_terms:
                    continue
                xa = tuple(sorted(x + a, key=_mono_key))
                ya = tuple(sorted(y + a, key=_mono_key))
                if xa in universe and ya in universe:
                    unite(xa, ya)
            # stability under multiplication by a monomial
            for m in self.reps:
                mx = self._scale(m, x)
                my = self._scale(m, y)
                if mx is not None and my is not None:
                    unite(mx, my)
        return uf

    def _scale(self, m, s: tuple) -> Optional[tuple]:
        terms = []
        for t in s:
            p = _mul(m, t)
            if _deg(p) > self.max_degree:
                return None
            terms.append(self.nf(p))
        return tuple(sorted(terms, key=_mono_key))

    def equal_sums(self, lhs: Iterable, rhs: Iterable) -> bool:
        a = self._canon_sum(lhs)
        b = self._canon_sum(rhs)
        if a not in self.sum_classes.parent or b not in self.sum_classes.parent:
            raise ValueError("sum outside the oracle universe")
        return self.sum_classes.find(a) == self.sum_classes.find(b)


def _compositions(n: int, total: int) -> Iterable[tuple]:
    if n == 0:
        if total == 0:
            yield ()
        return
    for first in range(total + 1):
        for rest in _compositions(n - 1, total - first):
            yield (first,) + rest


# ---------------------------------------------------------------------------
# boundary converters from package objects to the raw model


def raw_monomial(m) -> object:
    return ZERO if m.is_zero else m.exps


def raw_sum(s) -> tuple:
    return tuple(raw_monomial(t) for t in s.terms)


def brute_of(B, max_degree: int = 4, max_terms: int = 4) -> BruteClosure:
    """Build the oracle from a presented blueprint's raw data."""
    relations = tuple((raw_monomial(l), raw_monomial(r))
                      for l, r in B.pres.relations)
    preadd = tuple((raw_sum(x), raw_sum(y)) for x, y in B.preadd)
    return BruteClosure(len(B.pres.generators), relations,
                        B.pres.has_zero, preadd, max_degree, max_terms)


# ---------------------------------------------------------------------------
# exact linear algebra over the rationals


def gauss_rank(rows: Sequence[Sequence[int]]) -> int:
    """Row rank by Gaussian elimination over the rationals."""
    mat = [[Fraction(v) for v in row] for row in rows if any(row)]
    rank = 0
    cols = len(mat[0]) if mat else 0
    for col in range(cols):
        pivot = next((i for i in range(rank, len(mat)) if mat[i][col]), None)
        if pivot is None:
            continue
        mat[rank], mat[pivot] = mat[pivot], mat[rank]
        inv = 1 / mat[rank][col]
        mat[rank] = [v * inv for v in mat[rank]]
        for i in range(len(mat)):
            if i != rank and mat[i][col]:
                f = mat[i][col]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[rank])]
        rank += 1
        if rank == len(mat):
            break
    return rank


def brute_free_rank(B) -> int:
    """Free rank of the integral extension: instantiate every sum relation
    by every carrier element and eliminate over the nonzero normal forms."""
    els = [e for e in B.elements() if not B.eq(e, B.zero())] \
        if B.pres.has_zero else list(B.elements())
    basis = []
    seen = set()
    for e in els:
        n = B.pres.normalize(e)
        if n not in seen:
            seen.add(n)
            basis.append(n)
    index = {m: i for i, m in enumerate(basis)}
    rows: List[List[int]] = []
    for x, y in B.preadd:
        for m in list(basis) + [B.one()]:
            row = [0] * len(basis)
            ok = True
            for sign, side in ((1, x), (-1, y)):
                for t in side.terms:
                    n = B.pres.normalize(B.mul(t, m))
                    if n.is_zero:
                        continue
                    if n not in index:
                        ok = False
                        break
                    row[index[n]] += sign
                if not ok:
                    break
            if ok and any(row):
                rows.append(row)
    return len(basis) - gauss_rank(rows)
