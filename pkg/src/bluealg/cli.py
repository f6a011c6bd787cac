"""Command line front end.

A small declaration language for presented blueprints (files with the
``.blu`` extension), a canonical printer whose output reparses to the
same syntax tree, and batch commands that drive the library: validation
and classification, spectra, global sections, equational queries,
localizations, quotients, base extensions, closures, tensor products,
and the globalization check.

Exit codes: 0 success, 1 a checked property fails, 2 the verdict is
unknown or a budget ran out, 3 parse or validation errors.  Reports are
deterministic: identical inputs and flags produce byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .kernel import (
    BlueError,
    Budget,
    Decision,
    FormalSum,
    InvalidPresentation,
    Monomial,
    MonoidPresentation,
    ZERO_MONOMIAL,
)
from .blueprint import (
    Blueprint,
    BlueprintMorphism,
    PresentedBlueprint,
    base_extend_N,
    base_extend_Z,
    cancellative_closure,
    classify,
    extension_lattices_agree,
    initial_blueprint,
    inverse_closure,
    is_monoid_with_zero,
    localize,
    proper_closure,
    tensor,
    validate_morphism,
    z_rank,
    zero_closure,
)
from .congruence import (
    congruence_generated,
    congruence_of_ideal,
    ideal_generated,
    quotient_by,
)
from .scheme import (
    IncompleteEnumeration,
    StalkNotFinite,
    _decision_json,
    disjoint_union,
    gamma_record,
    is_global,
    spec,
    space_to_dot,
    space_to_json,
    union_sections,
    verify_spec_iso,
)

EXIT_OK = 0
EXIT_FAILS = 1
EXIT_UNKNOWN = 2
EXIT_INVALID = 3

# words with fixed meaning in the file syntax; "0", "1" and "empty" are
# also rejected as generator names by the kernel
KEYWORDS = ("blueprint", "morphism", "generators", "zero", "monoid",
            "addition", "empty")


class UsageError(BlueError):
    """Bad invocation or semantically invalid input; maps to exit 3."""


# ---------------------------------------------------------------------------
# tokens


@dataclass(frozen=True)
class Token:
    kind: str  # "id", "nat", "eof", or the punctuation text itself
    text: str
    line: int
    col: int

    def describe(self) -> str:
        if self.kind == "eof":
            return "end of input"
        return "'%s'" % self.text


class ParseFailure(BlueError):
    def __init__(self, message: str, line: int, col: int,
                 expected: Tuple[str, ...] = (), found: str = "") -> None:
        super().__init__(message)
        self.message = message
        self.line = line
        self.col = col
        self.expected = tuple(sorted(set(expected)))
        self.found = found

    def pretty(self) -> str:
        out = "parse error at line %d, column %d: %s" % (
            self.line, self.col, self.message)
        if self.expected:
            out += "; expected %s" % ", ".join(self.expected)
        if self.found:
            out += "; found %s" % self.found
        return out


_PUNCT = ("->", "{", "}", ":", ";", ",", "=", "+", "*", "^", "~")


def tokenize(text: str) -> List[Token]:
    toks: List[Token] = []
    line, col, i, n = 1, 1, 0, len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        two = text[i:i + 2]
        if two == "->":
            toks.append(Token("->", "->", line, col))
            i += 2
            col += 2
            continue
        if c in _PUNCT:
            toks.append(Token(c, c, line, col))
            i += 1
            col += 1
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(Token("nat", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(Token("id", text[i:j], line, col))
            col += j - i
            i = j
            continue
        raise ParseFailure("unexpected character '%s'" % c, line, col)
    toks.append(Token("eof", "", line, col))
    return toks


# ---------------------------------------------------------------------------
# syntax tree

# A term is a product of generator powers in canonical form: factors are
# merged, sorted by name, and zero exponents dropped; the literals "0"
# and "1" are the zero flag and the empty factor list.


@dataclass(frozen=True)
class Term:
    factors: Tuple[Tuple[str, int], ...] = ()
    is_zero: bool = False

    def render(self) -> str:
        if self.is_zero:
            return "0"
        if not self.factors:
            return "1"
        parts = []
        for name, e in self.factors:
            parts.append(name if e == 1 else "%s^%d" % (name, e))
        return "*".join(parts)


Sum = Tuple[Term, ...]  # sorted; the empty tuple is the empty sum


def _make_term(pairs: Iterable[Tuple[str, int]]) -> Term:
    merged: Dict[str, int] = {}
    for name, e in pairs:
        merged[name] = merged.get(name, 0) + e
    factors = tuple(sorted((k, v) for k, v in merged.items() if v != 0))
    return Term(factors)


def _make_sum(terms: Iterable[Term]) -> Sum:
    return tuple(sorted(terms, key=Term.render))


def render_sum(s: Sum) -> str:
    if not s:
        return "empty"
    return " + ".join(t.render() for t in s)


@dataclass(frozen=True)
class BlueprintDecl:
    name: str
    generators: Tuple[str, ...]
    with_zero: bool
    monoid_relations: Tuple[Tuple[Term, Term], ...]
    addition_relations: Tuple[Tuple[Sum, Sum], ...]
    pos: Tuple[int, int] = field(compare=False, default=(0, 0))


@dataclass(frozen=True)
class MorphismDecl:
    name: str
    source: str
    target: str
    assignments: Tuple[Tuple[str, Term], ...]
    pos: Tuple[int, int] = field(compare=False, default=(0, 0))


@dataclass(frozen=True)
class BlueFile:
    decls: Tuple[object, ...]

    def blueprints(self) -> Tuple[BlueprintDecl, ...]:
        return tuple(d for d in self.decls if isinstance(d, BlueprintDecl))

    def morphisms(self) -> Tuple[MorphismDecl, ...]:
        return tuple(d for d in self.decls if isinstance(d, MorphismDecl))


# ---------------------------------------------------------------------------
# parser


class _TokenStream:
    def __init__(self, toks: List[Token]) -> None:
        self.toks = toks
        self.i = 0

    def peek(self) -> Token:
        return self.toks[self.i]

    def next(self) -> Token:
        t = self.toks[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def fail(self, message: str, expected: Tuple[str, ...]) -> ParseFailure:
        t = self.peek()
        return ParseFailure(message, t.line, t.col, expected, t.describe())

    def expect(self, kind: str, label: str) -> Token:
        t = self.peek()
        if t.kind != kind:
            raise self.fail("unexpected token", (label,))
        return self.next()

    def expect_word(self, word: str) -> Token:
        t = self.peek()
        if t.kind != "id" or t.text != word:
            raise self.fail("unexpected token", ("'%s'" % word,))
        return self.next()

    def at_word(self, word: str) -> bool:
        t = self.peek()
        return t.kind == "id" and t.text == word


_TERM_START = ("'0'", "'1'", "identifier")
_SUM_START = _TERM_START + ("'empty'",)


def _parse_name(ts: _TokenStream) -> str:
    t = ts.peek()
    if t.kind != "id" or t.text in KEYWORDS:
        raise ts.fail("malformed name", ("identifier",))
    return ts.next().text


def _parse_factor(ts: _TokenStream) -> Tuple[str, int]:
    name = _parse_name(ts)
    if ts.peek().kind == "^":
        ts.next()
        return name, int(ts.expect("nat", "number").text)
    return name, 1


def _parse_term(ts: _TokenStream) -> Term:
    t = ts.peek()
    if t.kind == "nat" and t.text == "0":
        ts.next()
        return Term((), is_zero=True)
    if t.kind == "nat" and t.text == "1":
        ts.next()
        return Term(())
    if t.kind != "id" or t.text in KEYWORDS:
        raise ts.fail("malformed term", _TERM_START)
    pairs = [_parse_factor(ts)]
    while ts.peek().kind == "*":
        ts.next()
        pairs.append(_parse_factor(ts))
    return _make_term(pairs)


def _parse_sum(ts: _TokenStream) -> Sum:
    if ts.at_word("empty"):
        ts.next()
        return ()
    t = ts.peek()
    if t.kind not in ("nat", "id") or (t.kind == "id" and t.text in KEYWORDS):
        raise ts.fail("malformed sum", _SUM_START)
    terms = [_parse_term(ts)]
    while ts.peek().kind == "+":
        ts.next()
        terms.append(_parse_term(ts))
    return _make_sum(terms)


def _parse_idlist(ts: _TokenStream) -> Tuple[str, ...]:
    # possibly empty, as in "generators: ;"
    if ts.peek().kind == ";":
        return ()
    names = [_parse_name(ts)]
    while ts.peek().kind == ",":
        ts.next()
        names.append(_parse_name(ts))
    return tuple(names)


def _parse_eqlist(ts: _TokenStream) -> Tuple[Tuple[Term, Term], ...]:
    out = []
    while True:
        lhs = _parse_term(ts)
        ts.expect("=", "'='")
        out.append((lhs, _parse_term(ts)))
        if ts.peek().kind != ",":
            return tuple(out)
        ts.next()


def _parse_sumeqlist(ts: _TokenStream) -> Tuple[Tuple[Sum, Sum], ...]:
    out = []
    while True:
        lhs = _parse_sum(ts)
        ts.expect("=", "'='")
        out.append((lhs, _parse_sum(ts)))
        if ts.peek().kind != ",":
            return tuple(out)
        ts.next()


_ZERO_SUM: Sum = (Term((), is_zero=True),)


def _parse_blueprint(ts: _TokenStream) -> BlueprintDecl:
    head = ts.expect_word("blueprint")
    name = _parse_name(ts)
    ts.expect("{", "'{'")
    ts.expect_word("generators")
    ts.expect(":", "':'")
    gens = _parse_idlist(ts)
    ts.expect(";", "';'")
    with_zero = False
    if ts.at_word("zero"):
        ts.next()
        ts.expect(";", "';'")
        with_zero = True
    monoid: Tuple[Tuple[Term, Term], ...] = ()
    if ts.at_word("monoid"):
        ts.next()
        ts.expect(":", "':'")
        monoid = _parse_eqlist(ts)
        ts.expect(";", "';'")
    addition: Tuple[Tuple[Sum, Sum], ...] = ()
    if ts.at_word("addition"):
        ts.next()
        ts.expect(":", "':'")
        addition = _parse_sumeqlist(ts)
        ts.expect(";", "';'")
    if ts.peek().kind != "}":
        raise ts.fail("unexpected token in blueprint body",
                      ("'}'", "'zero'", "'monoid'", "'addition'"))
    ts.next()
    if with_zero:
        # "0 = empty" is implied by the zero declaration; keep one copy
        addition = tuple(p for p in addition
                         if p not in ((_ZERO_SUM, ()), ((), _ZERO_SUM)))
    return BlueprintDecl(name, gens, with_zero, monoid, addition,
                         pos=(head.line, head.col))


def _parse_morphism(ts: _TokenStream) -> MorphismDecl:
    head = ts.expect_word("morphism")
    name = _parse_name(ts)
    ts.expect(":", "':'")
    source = _parse_name(ts)
    ts.expect("->", "'->'")
    target = _parse_name(ts)
    ts.expect("{", "'{'")
    assignments = []
    while ts.peek().kind != "}":
        gen = _parse_name(ts)
        ts.expect("->", "'->'")
        assignments.append((gen, _parse_term(ts)))
        ts.expect(";", "';'")
    ts.next()
    return MorphismDecl(name, source, target, tuple(assignments),
                        pos=(head.line, head.col))


def parse_file(text: str) -> BlueFile:
    ts = _TokenStream(tokenize(text))
    decls: List[object] = []
    while ts.peek().kind != "eof":
        if ts.at_word("blueprint"):
            decls.append(_parse_blueprint(ts))
        elif ts.at_word("morphism"):
            decls.append(_parse_morphism(ts))
        else:
            raise ts.fail("malformed declaration",
                          ("'blueprint'", "'morphism'"))
    if not decls:
        raise ts.fail("empty file", ("'blueprint'", "'morphism'"))
    return BlueFile(tuple(decls))


# ---------------------------------------------------------------------------
# canonical printer


def print_decl(d: object) -> str:
    if isinstance(d, BlueprintDecl):
        lines = ["blueprint %s {" % d.name]
        lines.append("  generators: %s;" % ", ".join(d.generators))
        if d.with_zero:
            lines.append("  zero;")
        if d.monoid_relations:
            rels = ", ".join("%s = %s" % (l.render(), r.render())
                             for l, r in d.monoid_relations)
            lines.append("  monoid: %s;" % rels)
        if d.addition_relations:
            rels = ", ".join("%s = %s" % (render_sum(l), render_sum(r))
                             for l, r in d.addition_relations)
            lines.append("  addition: %s;" % rels)
        lines.append("}")
        return "\n".join(lines)
    if isinstance(d, MorphismDecl):
        lines = ["morphism %s : %s -> %s {" % (d.name, d.source, d.target)]
        for gen, term in d.assignments:
            lines.append("  %s -> %s;" % (gen, term.render()))
        lines.append("}")
        return "\n".join(lines)
    raise TypeError("not a declaration: %r" % (d,))


def print_file(bf: BlueFile) -> str:
    return "\n\n".join(print_decl(d) for d in bf.decls) + "\n"


# ---------------------------------------------------------------------------
# elaboration: declarations to library objects


@dataclass
class Workspace:
    blueprints: Dict[str, PresentedBlueprint]
    morphisms: Dict[str, BlueprintMorphism]
    decl_order: Tuple[object, ...]


def _term_monomial(decl: BlueprintDecl, t: Term) -> Monomial:
    if t.is_zero:
        if not decl.with_zero:
            raise UsageError("blueprint %s: the term 0 needs a zero "
                             "declaration" % decl.name)
        return ZERO_MONOMIAL
    exps = [0] * len(decl.generators)
    for name, e in t.factors:
        try:
            exps[decl.generators.index(name)] += e
        except ValueError:
            raise UsageError("blueprint %s: unknown generator %s"
                             % (decl.name, name)) from None
    return Monomial(tuple(exps))


def _sum_formal(decl: BlueprintDecl, s: Sum) -> FormalSum:
    return FormalSum.of([_term_monomial(decl, t) for t in s])


def elaborate_blueprint(decl: BlueprintDecl,
                        budget: Budget) -> PresentedBlueprint:
    try:
        pres = MonoidPresentation(
            decl.generators,
            tuple((_term_monomial(decl, l), _term_monomial(decl, r))
                  for l, r in decl.monoid_relations),
            decl.with_zero)
    except InvalidPresentation as e:
        raise UsageError("blueprint %s: %s" % (decl.name, e)) from None
    preadd: List[Tuple[FormalSum, FormalSum]] = []
    if decl.with_zero:
        preadd.append((FormalSum.single(ZERO_MONOMIAL), FormalSum.empty()))
    for l, r in decl.addition_relations:
        preadd.append((_sum_formal(decl, l), _sum_formal(decl, r)))
    return PresentedBlueprint(pres, tuple(preadd), budget=budget,
                              label=decl.name)


def elaborate(files: Sequence[BlueFile], budget: Budget) -> Workspace:
    blueprints: Dict[str, PresentedBlueprint] = {}
    by_name: Dict[str, BlueprintDecl] = {}
    morphisms: Dict[str, BlueprintMorphism] = {}
    order: List[object] = []
    for bf in files:
        for d in bf.decls:
            order.append(d)
    for d in order:
        if isinstance(d, BlueprintDecl):
            if d.name in by_name:
                raise UsageError("duplicate blueprint name: %s" % d.name)
            by_name[d.name] = d
            blueprints[d.name] = elaborate_blueprint(d, budget)
    for d in order:
        if not isinstance(d, MorphismDecl):
            continue
        if d.name in morphisms or d.name in blueprints:
            raise UsageError("duplicate declaration name: %s" % d.name)
        for end in (d.source, d.target):
            if end not in blueprints:
                raise UsageError("morphism %s: unknown blueprint %s"
                                 % (d.name, end))
        src_decl, tgt_decl = by_name[d.source], by_name[d.target]
        table = dict(d.assignments)
        if len(table) != len(d.assignments):
            raise UsageError("morphism %s: a generator is assigned twice"
                             % d.name)
        extra = [g for g, _ in d.assignments if g not in src_decl.generators]
        if extra:
            raise UsageError("morphism %s: %s is not a generator of %s"
                             % (d.name, extra[0], d.source))
        missing = [g for g in src_decl.generators if g not in table]
        if missing:
            raise UsageError("morphism %s: no image for generator %s"
                             % (d.name, missing[0]))
        data = tuple((g, _term_monomial(tgt_decl, table[g]))
                     for g in src_decl.generators)
        morphisms[d.name] = BlueprintMorphism(
            blueprints[d.source], blueprints[d.target], data, name=d.name)
    return Workspace(blueprints, morphisms, tuple(order))


# command line snippets reuse the file grammar for terms and sums


def _snippet_stream(text: str, what: str) -> _TokenStream:
    try:
        return _TokenStream(tokenize(text))
    except ParseFailure as e:
        raise UsageError("%s: %s" % (what, e.pretty())) from None


def _snippet_done(ts: _TokenStream, what: str) -> None:
    if ts.peek().kind != "eof":
        raise UsageError("%s: trailing input at %s"
                         % (what, ts.peek().describe()))


def parse_term_list(text: str, decl: BlueprintDecl) -> List[Monomial]:
    ts = _snippet_stream(text, "term list")
    try:
        terms = [_parse_term(ts)]
        while ts.peek().kind == ",":
            ts.next()
            terms.append(_parse_term(ts))
    except ParseFailure as e:
        raise UsageError("term list: %s" % e.pretty()) from None
    _snippet_done(ts, "term list")
    return [_term_monomial(decl, t) for t in terms]


def parse_pair_list(text: str,
                    decl: BlueprintDecl) -> List[Tuple[Monomial, Monomial]]:
    ts = _snippet_stream(text, "pair list")
    pairs = []
    try:
        while True:
            a = _parse_term(ts)
            ts.expect("~", "'~'")
            pairs.append((a, _parse_term(ts)))
            if ts.peek().kind != ",":
                break
            ts.next()
    except ParseFailure as e:
        raise UsageError("pair list: %s" % e.pretty()) from None
    _snippet_done(ts, "pair list")
    return [(_term_monomial(decl, a), _term_monomial(decl, b))
            for a, b in pairs]


def parse_equation(text: str, decl: BlueprintDecl
                   ) -> Tuple[Sum, Sum, List[Monomial], List[Monomial]]:
    ts = _snippet_stream(text, "equation")
    try:
        lhs = _parse_sum(ts)
        ts.expect("=", "'='")
        rhs = _parse_sum(ts)
    except ParseFailure as e:
        raise UsageError("equation: %s" % e.pretty()) from None
    _snippet_done(ts, "equation")
    return (lhs, rhs,
            [_term_monomial(decl, t) for t in lhs],
            [_term_monomial(decl, t) for t in rhs])


# ---------------------------------------------------------------------------
# rendering results back into file syntax


def _monomial_term(P: PresentedBlueprint, m: Monomial) -> Term:
    if m.is_zero:
        return Term((), is_zero=True)
    pairs = [(P.pres.generators[i], e)
             for i, e in enumerate(m.exps) if e != 0]
    return _make_term(pairs)


def _formal_sum_ast(P: PresentedBlueprint, s: FormalSum) -> Sum:
    return _make_sum(_monomial_term(P, m) for m in s.terms)


def decl_of_blueprint(name: str, P: PresentedBlueprint) -> BlueprintDecl:
    """Presented carriers print back into the file syntax; the implied
    0 = empty generator is dropped the same way the parser drops it."""
    zero_gen = (FormalSum.single(ZERO_MONOMIAL), FormalSum.empty())
    addition = tuple((_formal_sum_ast(P, l), _formal_sum_ast(P, r))
                     for l, r in P.preadd
                     if not (P.pres.has_zero and (l, r) == zero_gen))
    return BlueprintDecl(
        name,
        P.pres.generators,
        P.pres.has_zero,
        tuple((_monomial_term(P, l), _monomial_term(P, r))
              for l, r in P.pres.relations),
        addition)


def _morphism_lines(f: BlueprintMorphism, indent: str = "  ") -> List[str]:
    src = f.source
    if not isinstance(src, PresentedBlueprint):
        return [indent + "(map on an unpresented carrier)"]
    out = []
    for g, img in f.data:
        out.append("%s%s -> %s" % (indent, g, f.target.render(img)))
    return out


# ---------------------------------------------------------------------------
# reports


def _dec_text(d: Decision) -> str:
    if not d.detail:
        return d.kind
    body = ", ".join(
        "%s=%s" % (k, v if isinstance(v, (str, int, bool)) else repr(v))
        for k, v in d.detail)
    return "%s (%s)" % (d.kind, body)


def _exit_of(d: Decision) -> int:
    if d.is_holds:
        return EXIT_OK
    if d.is_fails:
        return EXIT_FAILS
    return EXIT_UNKNOWN


def _json_report(payload: Dict[str, object]) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _no_dot(cfg: "Config", command: str) -> None:
    # dot renders specialization graphs; only space reports have one
    if cfg.fmt == "dot":
        raise UsageError("dot output is not available for %s" % command)


@dataclass(frozen=True)
class Config:
    budget: Budget
    fmt: str
    out: Optional[str]


def _sigma_text(B: Blueprint, verdict: Decision) -> str:
    rec = gamma_record(B)
    if verdict.is_holds:
        return "bijective"
    if verdict.is_fails:
        if rec.extras:
            names = ", ".join(w.name for w in rec.extras)
            return "not surjective (new sections: %s)" % names
        return "not surjective"
    return "unknown"


# ---------------------------------------------------------------------------
# commands


def _the_blueprint(ws: Workspace, names: Sequence[str]) -> Tuple[str, PresentedBlueprint]:
    if len(names) > 1:
        raise UsageError("expected at most one blueprint name, got: %s"
                         % ", ".join(names))
    if names:
        name = names[0]
        if name not in ws.blueprints:
            raise UsageError("no blueprint named %s" % name)
        return name, ws.blueprints[name]
    if len(ws.blueprints) == 1:
        return next(iter(ws.blueprints.items()))
    raise UsageError("the files declare %d blueprints; name one"
                     % len(ws.blueprints))


def _decl_of(ws: Workspace, name: str) -> BlueprintDecl:
    for d in ws.decl_order:
        if isinstance(d, BlueprintDecl) and d.name == name:
            return d
    raise UsageError("no blueprint named %s" % name)


def _cmd_check(ws: Workspace, names: Sequence[str],
               cfg: Config) -> Tuple[int, str]:
    _no_dot(cfg, "check")
    if names:
        targets = [(n, ws.blueprints[n]) if n in ws.blueprints else (n, None)
                   for n in names]
        for n, b in targets:
            if b is None and n not in ws.morphisms:
                raise UsageError("no declaration named %s" % n)
    else:
        targets = [(d.name, ws.blueprints.get(d.name, None))
                   for d in ws.decl_order
                   if isinstance(d, (BlueprintDecl, MorphismDecl))]
    lines: List[str] = []
    payload: Dict[str, object] = {"blueprints": {}, "morphisms": {}}
    code = EXIT_OK
    for name, B in targets:
        if B is None:
            f = ws.morphisms[name]
            d = validate_morphism(f)
            lines.append("morphism %s: %s -> %s: %s"
                         % (name, f.source.label or "?",
                            f.target.label or "?", _dec_text(d)))
            payload["morphisms"][name] = _decision_json(d)
            if d.is_fails:
                code = max(code, EXIT_INVALID)
            elif d.is_unknown:
                code = max(code, EXIT_UNKNOWN)
            continue
        rec = classify(B)
        mwz = is_monoid_with_zero(B)
        lines.append("blueprint %s: valid" % name)
        rows = [("proper", rec.proper),
                ("with zero", rec.with_zero),
                ("with inverses", rec.with_inverses),
                ("cancellative", rec.cancellative),
                ("monoid with zero", mwz),
                ("blue field", rec.is_blue_field)]
        for tag, d in rows:
            lines.append("  %s: %s" % (tag, _dec_text(d)))
        lines.append("  units: %s"
                     % (", ".join(B.render(u) for u in rec.units) or "none"))
        lines.append("  integral: %s"
                     % (", ".join(B.render(u)
                                  for u in rec.integral_elements) or "none"))
        payload["blueprints"][name] = {
            tag.replace(" ", "_"): _decision_json(d) for tag, d in rows}
        payload["blueprints"][name]["units"] = [
            B.render(u) for u in rec.units]
        payload["blueprints"][name]["integral"] = [
            B.render(u) for u in rec.integral_elements]
    if cfg.fmt == "json":
        return code, _json_report(payload)
    return code, "\n".join(lines) + "\n"


def _space_text(title: str, space) -> str:
    lines = ["%s: %d point%s" % (title, len(space.points),
                                 "" if len(space.points) == 1 else "s")]
    lines.append("complete: %s" % _dec_text(space.complete))
    for p in space.points:
        gens = ", ".join(sorted(space.base.render(g)
                                for g in p.ideal.generators))
        lines.append("point %s%s" % (p.ident, ": " + gens if gens else ""))
    for el in sorted(space.basis_opens):
        ids = space.basis_opens[el]
        lines.append("open U(%s) = {%s}" % (el, ", ".join(ids)))
    for a, b in space.specialization:
        lines.append("specializes: %s -> %s" % (a, b))
    if space.undecided:
        lines.append("undecided pairs: %d" % len(space.undecided))
    return "\n".join(lines) + "\n"


def _cmd_spec(ws: Workspace, names: Sequence[str],
              cfg: Config) -> Tuple[int, str]:
    name, B = _the_blueprint(ws, names)
    space = spec(B)
    code = EXIT_OK if space.complete.is_holds and not space.undecided \
        else EXIT_UNKNOWN
    if cfg.fmt == "json":
        return code, space_to_json(space)
    if cfg.fmt == "dot":
        return code, space_to_dot(space)
    return code, _space_text("spec %s" % name, space)


def _cmd_gamma(ws: Workspace, names: Sequence[str],
               cfg: Config) -> Tuple[int, str]:
    name, B = _the_blueprint(ws, names)
    rec = gamma_record(B)
    verdict = is_global(B)
    code = _exit_of(verdict)
    if cfg.fmt == "dot":
        return code, space_to_dot(spec(rec.gamma))
    sections = [w.render(B) for w in rec.extras]
    if cfg.fmt == "json":
        payload: Dict[str, object] = {
            "blueprint": name,
            "route": rec.route,
            "new_sections": sections,
            "complete": _decision_json(rec.complete),
            "is_global": _decision_json(verdict),
            "sigma": _sigma_text(B, verdict),
        }
        if isinstance(rec.gamma, PresentedBlueprint):
            payload["gamma"] = print_decl(
                decl_of_blueprint(name + "_gamma", rec.gamma))
        return code, _json_report(payload)
    lines = ["gamma %s" % name,
             "route: %s" % rec.route,
             "new sections: %s" % (", ".join(sections) or "none"),
             "sigma: %s" % _sigma_text(B, verdict),
             "complete: %s" % _dec_text(rec.complete)]
    if isinstance(rec.gamma, PresentedBlueprint):
        lines.append(print_decl(decl_of_blueprint(name + "_gamma",
                                                  rec.gamma)))
    lines.append("is_global: %s" % _dec_text(verdict))
    return code, "\n".join(lines) + "\n"


def _cmd_holds(ws: Workspace, names: Sequence[str], exprs: Sequence[str],
               cfg: Config) -> Tuple[int, str]:
    _no_dot(cfg, "holds")
    if len(exprs) != 1:
        raise UsageError('holds needs one equation argument "LHS = RHS"')
    name, B = _the_blueprint(ws, names)
    decl = _decl_of(ws, name)
    lhs_ast, rhs_ast, lhs, rhs = parse_equation(exprs[0], decl)
    verdict = B.holds(lhs, rhs)
    query = "%s = %s" % (render_sum(lhs_ast), render_sum(rhs_ast))
    if cfg.fmt == "json":
        return _exit_of(verdict), _json_report({
            "blueprint": name,
            "query": query,
            "verdict": _decision_json(verdict)})
    text = "holds in %s: %s\nverdict: %s\n" % (name, query,
                                               _dec_text(verdict))
    return _exit_of(verdict), text


def _result_report(title: str, result_name: str, R: Blueprint,
                   map_title: str, f: BlueprintMorphism,
                   cfg: Config, extra: Sequence[str] = ()) -> Tuple[int, str]:
    """Shared layout for commands that build a new blueprint plus the
    canonical map into it."""
    decl_text: Optional[str] = None
    if isinstance(R, PresentedBlueprint):
        decl_text = print_decl(decl_of_blueprint(result_name, R))
    if cfg.fmt == "json":
        payload: Dict[str, object] = {"result": result_name}
        if decl_text is not None:
            payload["blueprint"] = decl_text
        elif R.is_finite():
            payload["carrier"] = [R.render(a) for a in R.elements()]
        payload["map"] = [s.strip() for s in _morphism_lines(f, indent="")]
        for line in extra:
            payload.setdefault("notes", []).append(line)
        return EXIT_OK, _json_report(payload)
    lines = [title]
    if decl_text is not None:
        lines.append(decl_text)
    elif R.is_finite():
        lines.append("carrier: %s"
                     % ", ".join(R.render(a) for a in R.elements()))
    else:
        lines.append("result is not presented")
    lines.append("%s:" % map_title)
    lines.extend(_morphism_lines(f))
    lines.extend(extra)
    return EXIT_OK, "\n".join(lines) + "\n"


def _cmd_localize(ws: Workspace, names: Sequence[str], invert: Optional[str],
                  cfg: Config) -> Tuple[int, str]:
    _no_dot(cfg, "localize")
    if not invert:
        raise UsageError("localize needs --invert g1,g2,...")
    name, B = _the_blueprint(ws, names)
    decl = _decl_of(ws, name)
    els = parse_term_list(invert, decl)
    L, iota = localize(B, els, label=name + "_loc")
    title = "localize %s at %s" % (name,
                                   ", ".join(B.render(a) for a in els))
    return _result_report(title, name + "_loc", L, "map", iota, cfg)


def _cmd_quotient(ws: Workspace, names: Sequence[str],
                  ideal_text: Optional[str], pairs_text: Optional[str],
                  cfg: Config) -> Tuple[int, str]:
    _no_dot(cfg, "quotient")
    if (ideal_text is None) == (pairs_text is None):
        raise UsageError("quotient needs exactly one of --ideal or --pairs")
    name, B = _the_blueprint(ws, names)
    decl = _decl_of(ws, name)
    if ideal_text is not None:
        gens = parse_term_list(ideal_text, decl)
        c = congruence_of_ideal(ideal_generated(B, gens))
        what = "ideal (%s)" % ", ".join(B.render(g) for g in gens)
    else:
        pairs = parse_pair_list(pairs_text, decl)
        c = congruence_generated(B, pairs)
        what = "pairs %s" % ", ".join("%s ~ %s" % (B.render(a), B.render(b))
                                      for a, b in pairs)
    Q, proj = quotient_by(B, c)
    title = "quotient %s by %s" % (name, what)
    return _result_report(title, name + "_quot", Q, "projection", proj, cfg)


def _cmd_zext(ws: Workspace, names: Sequence[str], want_rank: bool,
              cfg: Config) -> Tuple[int, str]:
    _no_dot(cfg, "zext")
    name, B = _the_blueprint(ws, names)
    r = base_extend_Z(B)
    rank: Optional[int] = None
    note = ""
    if want_rank:
        try:
            rank = z_rank(r, cfg.budget)
        except BlueError as e:
            note = str(e)
    if cfg.fmt == "json":
        payload: Dict[str, object] = {"blueprint": name, "ring": r.render()}
        if want_rank:
            payload["rank"] = rank if rank is not None else "unknown"
            if note:
                payload["note"] = note
        code = EXIT_UNKNOWN if want_rank and rank is None else EXIT_OK
        return code, _json_report(payload)
    lines = ["zext %s: %s" % (name, r.render())]
    if want_rank:
        if rank is None:
            lines.append("rank unknown: %s" % note)
            return EXIT_UNKNOWN, "\n".join(lines) + "\n"
        lines.append("rank %d" % rank)
    return EXIT_OK, "\n".join(lines) + "\n"


def _cmd_next(ws: Workspace, names: Sequence[str], semiring: bool,
              cfg: Config) -> Tuple[int, str]:
    _no_dot(cfg, "next")
    name, B = _the_blueprint(ws, names)
    s = base_extend_N(B)
    code = EXIT_OK
    agree: Optional[Decision] = None
    if semiring:
        agree = extension_lattices_agree(B, cfg.budget)
        code = _exit_of(agree)
    if cfg.fmt == "json":
        payload: Dict[str, object] = {"blueprint": name,
                                      "semiring": s.render()}
        if agree is not None:
            payload["lattices_agree"] = _decision_json(agree)
        return code, _json_report(payload)
    lines = ["next %s: %s" % (name, s.render())]
    if agree is not None:
        lines.append("semiring and ring relation lattices agree: %s"
                     % _dec_text(agree))
    return code, "\n".join(lines) + "\n"


def _cmd_tensor(ws: Workspace, names: Sequence[str], over: Optional[str],
                maps: Optional[str], cfg: Config) -> Tuple[int, str]:
    _no_dot(cfg, "tensor")
    if len(names) != 2:
        raise UsageError("tensor needs two blueprint names")
    if (over is None) != (maps is None):
        raise UsageError("tensor needs --over and --maps together")
    for n in names:
        if n not in ws.blueprints:
            raise UsageError("no blueprint named %s" % n)
    A, Bb = ws.blueprints[names[0]], ws.blueprints[names[1]]
    if over is None:
        base = initial_blueprint()
        f = BlueprintMorphism(base, A, (), name="to_" + names[0])
        g = BlueprintMorphism(base, Bb, (), name="to_" + names[1])
        base_name = "initial"
    else:
        base_name = over
        if over not in ws.blueprints:
            raise UsageError("no blueprint named %s" % over)
        map_names = [m.strip() for m in maps.split(",")]
        if len(map_names) != 2:
            raise UsageError("--maps needs two morphism names: f,g")
        picked = []
        for m in map_names:
            if m not in ws.morphisms:
                raise UsageError("no morphism named %s" % m)
            picked.append(ws.morphisms[m])
        f, g = picked
        for h, tgt in ((f, A), (g, Bb)):
            if h.source is not ws.blueprints[over]:
                raise UsageError("morphism %s does not start at %s"
                                 % (h.name, over))
            if h.target is not tgt:
                raise UsageError("morphism %s does not land in the named "
                                 "factor" % h.name)
        for h in (f, g):
            d = validate_morphism(h)
            if d.is_fails:
                raise UsageError("morphism %s is not a blueprint morphism: %s"
                                 % (h.name, _dec_text(d)))
            if d.is_unknown:
                return EXIT_UNKNOWN, ("morphism %s could not be validated: "
                                      "%s\n" % (h.name, _dec_text(d)))
    T, i1, i2 = tensor(f, g, label="%s_x_%s" % (names[0], names[1]))
    result = "%s_x_%s" % (names[0], names[1])
    title = "tensor %s x %s over %s" % (names[0], names[1], base_name)
    code, text = _result_report(title, result, T, "left inclusion", i1, cfg)
    if cfg.fmt == "json":
        return code, text
    lines = [text.rstrip("\n"), "right inclusion:"]
    lines.extend(_morphism_lines(i2))
    return code, "\n".join(lines) + "\n"


_CLOSURES = {
    "proper": proper_closure,
    "inv": inverse_closure,
    "zero": zero_closure,
    "canc": cancellative_closure,
}


def _cmd_closure(ws: Workspace, names: Sequence[str], which: List[str],
                 cfg: Config) -> Tuple[int, str]:
    _no_dot(cfg, "closure")
    if len(which) != 1:
        raise UsageError("closure needs exactly one of "
                         "--proper, --inv, --zero, --canc")
    kind = which[0]
    name, B = _the_blueprint(ws, names)
    C, eta = _CLOSURES[kind](B)
    extra: List[str] = []
    if isinstance(C, PresentedBlueprint) and C.cancellative_rule:
        extra.append("note: the cancellation rule is part of the engine, "
                     "not of the printed presentation")
    title = "closure %s of %s" % (kind, name)
    return _result_report(title, "%s_%s" % (name, kind), C, "unit map",
                          eta, cfg, extra)


def _cmd_verify_global(ws: Workspace, names: Sequence[str],
                       cfg: Config) -> Tuple[int, str]:
    _no_dot(cfg, "verify-global")
    name, B = _the_blueprint(ws, names)
    rep = verify_spec_iso(B)
    iso = {"holds": "verified", "fails": "failed",
           "unknown": "unknown"}[rep.verdict.kind]
    sigma = _sigma_text(B, is_global(B))
    code = _exit_of(rep.verdict)
    if cfg.fmt == "json":
        payload = dict(rep.as_dict())
        payload["blueprint"] = name
        payload["sigma"] = sigma
        return code, _json_report(payload)
    lines = ["sigma: %s; Spec iso: %s" % (sigma, iso),
             "points: %d base, %d gamma" % (len(rep.base_space.points),
                                            len(rep.gamma_space.points))]
    for a, b in rep.point_map:
        lines.append("  %s <- %s" % (b, a))
    lines.append("pullback bijective: %s" % _dec_text(rep.pullback_bijective))
    lines.append("pushforward roundtrip: %s"
                 % _dec_text(rep.pushforward_roundtrip))
    lines.append("opens match: %s" % _dec_text(rep.opens_match))
    lines.append("stalk isomorphisms: %s" % _dec_text(rep.stalk_isos))
    lines.append("verdict: %s" % _dec_text(rep.verdict))
    return code, "\n".join(lines) + "\n"


def _cmd_union(ws: Workspace, names: Sequence[str],
               cfg: Config) -> Tuple[int, str]:
    if len(names) != 2:
        raise UsageError("union needs two blueprint names")
    for n in names:
        if n not in ws.blueprints:
            raise UsageError("no blueprint named %s" % n)
    spaces = [spec(ws.blueprints[n]) for n in names]
    U = disjoint_union(spaces)
    G = union_sections(U)
    code = EXIT_OK if U.complete.is_holds else EXIT_UNKNOWN
    if cfg.fmt == "json":
        payload: Dict[str, object] = {
            "components": list(names),
            "space": json.loads(space_to_json(U)),
        }
        if G.is_finite():
            payload["sections"] = [G.render(a) for a in G.elements()]
        return code, _json_report(payload)
    if cfg.fmt == "dot":
        return code, space_to_dot(U)
    lines = ["union %s + %s: %d points"
             % (names[0], names[1], len(U.ids()))]
    for k, (n, comp) in enumerate(zip(names, spaces)):
        lines.append("component %d: %s (%d point%s)"
                     % (k, n, len(comp.points),
                        "" if len(comp.points) == 1 else "s"))
    for ident in U.ids():
        lines.append("point %s" % ident)
    if G.is_finite():
        lines.append("sections: %s"
                     % ", ".join(G.render(a) for a in G.elements()))
    else:
        lines.append("sections: product of the component section blueprints")
    return code, "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# entry point


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # noqa: A003 - argparse API
        raise UsageError(message)


def _build_parser() -> _Parser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget", type=int, default=None,
                        help="pair budget for the saturation engine")
    common.add_argument("--max-terms", type=int, default=None)
    common.add_argument("--max-degree", type=int, default=None)
    common.add_argument("--max-exponent", type=int, default=None)
    common.add_argument("--format", choices=("text", "json", "dot"),
                        default="text")
    common.add_argument("--out", default=None,
                        help="write the report to this path")
    common.add_argument("args", nargs="*",
                        help=".blu files, declaration names, and queries")
    p = _Parser(prog="blue", description="blueprint algebra tool")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("check", parents=[common])
    sub.add_parser("spec", parents=[common])
    sub.add_parser("gamma", parents=[common])
    sub.add_parser("holds", parents=[common])
    loc = sub.add_parser("localize", parents=[common])
    loc.add_argument("--invert", default=None)
    quo = sub.add_parser("quotient", parents=[common])
    quo.add_argument("--ideal", default=None)
    quo.add_argument("--pairs", default=None)
    zx = sub.add_parser("zext", parents=[common])
    zx.add_argument("--rank", action="store_true")
    nx = sub.add_parser("next", parents=[common])
    nx.add_argument("--semiring", action="store_true")
    tn = sub.add_parser("tensor", parents=[common])
    tn.add_argument("--over", default=None)
    tn.add_argument("--maps", default=None)
    cl = sub.add_parser("closure", parents=[common])
    cl.add_argument("--proper", action="store_true")
    cl.add_argument("--inv", action="store_true")
    cl.add_argument("--zero", action="store_true")
    cl.add_argument("--canc", action="store_true")
    sub.add_parser("verify-global", parents=[common])
    sub.add_parser("union", parents=[common])
    return p


def _config_from(ns: argparse.Namespace) -> Config:
    kw = {}
    if ns.budget is not None:
        if ns.budget <= 0:
            raise UsageError("--budget must be positive")
        kw["max_pairs"] = ns.budget
    for flag, key in (("max_terms", "max_terms"),
                      ("max_degree", "max_degree"),
                      ("max_exponent", "max_exponent")):
        v = getattr(ns, flag)
        if v is not None:
            if v <= 0:
                raise UsageError("--%s must be positive"
                                 % flag.replace("_", "-"))
            kw[key] = v
    return Config(Budget(**kw), ns.format, ns.out)


def _load_workspace(files: Sequence[str], budget: Budget) -> Workspace:
    parsed: List[BlueFile] = []
    for path in files:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as e:
            raise UsageError("cannot read %s: %s" % (path, e)) from None
        try:
            parsed.append(parse_file(text))
        except ParseFailure as e:
            raise UsageError("%s: %s" % (path, e.pretty())) from None
    return elaborate(parsed, budget)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
        cfg = _config_from(ns)
        files = [a for a in ns.args if a.endswith(".blu")]
        exprs = [a for a in ns.args
                 if not a.endswith(".blu") and ("=" in a or "~" in a)]
        names = [a for a in ns.args
                 if not a.endswith(".blu") and a not in exprs]
        if not files:
            raise UsageError("no .blu files given")
        ws = _load_workspace(files, cfg.budget)
        cmd = ns.command
        if cmd == "check":
            code, report = _cmd_check(ws, names, cfg)
        elif cmd == "spec":
            code, report = _cmd_spec(ws, names, cfg)
        elif cmd == "gamma":
            code, report = _cmd_gamma(ws, names, cfg)
        elif cmd == "holds":
            code, report = _cmd_holds(ws, names, exprs, cfg)
        elif cmd == "localize":
            code, report = _cmd_localize(ws, names, ns.invert, cfg)
        elif cmd == "quotient":
            code, report = _cmd_quotient(ws, names, ns.ideal, ns.pairs, cfg)
        elif cmd == "zext":
            code, report = _cmd_zext(ws, names, ns.rank, cfg)
        elif cmd == "next":
            code, report = _cmd_next(ws, names, ns.semiring, cfg)
        elif cmd == "tensor":
            code, report = _cmd_tensor(ws, names, ns.over, ns.maps, cfg)
        elif cmd == "closure":
            which = [k for k in ("proper", "inv", "zero", "canc")
                     if getattr(ns, k)]
            code, report = _cmd_closure(ws, names, which, cfg)
        elif cmd == "verify-global":
            code, report = _cmd_verify_global(ws, names, cfg)
        elif cmd == "union":
            code, report = _cmd_union(ws, names, cfg)
        else:  # pragma: no cover - argparse rejects unknown commands
            raise UsageError("unknown command: %s" % cmd)
    except UsageError as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_INVALID
    except ParseFailure as e:
        print("error: %s" % e.pretty(), file=sys.stderr)
        return EXIT_INVALID
    except (IncompleteEnumeration, StalkNotFinite) as e:
        print("unknown: %s" % e, file=sys.stderr)
        return EXIT_UNKNOWN
    except InvalidPresentation as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_INVALID
    except BlueError as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_INVALID
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(report)
    else:
        sys.stdout.write(report)
    return code


__all__ = [
    "BlueFile",
    "BlueprintDecl",
    "Config",
    "MorphismDecl",
    "ParseFailure",
    "Term",
    "UsageError",
    "Workspace",
    "decl_of_blueprint",
    "elaborate",
    "main",
    "parse_file",
    "print_decl",
    "print_file",
    "tokenize",
]


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
