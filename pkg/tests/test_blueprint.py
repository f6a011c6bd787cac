"""Blueprint values: constructors, decision engine, closures, localization,
base extension, products, tensor, equalizers, morphism search."""

from __future__ import annotations

import pytest

from bluealg import (
    FormalSum,
    Monomial,
    MonoidPresentation,
    PresentedBlueprint,
    ZERO_MONOMIAL,
    base_extend_N,
    base_extend_Z,
    cancellative_closure,
    classify,
    compose,
    cyclotomic,
    enumerate_morphisms,
    equalizer,
    extension_lattices_agree,
    find_isomorphism,
    free_extension,
    from_monoid,
    from_monoid_with_zero,
    from_semiring,
    holds,
    identity_morphism,
    initial_blueprint,
    inverse_closure,
    is_monoid_with_zero,
    localize,
    product,
    proper_closure,
    semiring_zmod,
    smith_invariants,
    tensor,
    terminal_blueprint,
    validate_morphism,
    z_rank,
    zero_closure,
)
from bluealg.blueprint import (
    BlueprintMorphism,
    Fraction,
    NameClash,
    ZeroPresent,
    fractions_equal,
    multiplicative_closure,
)

from catalog import (
    boolean_blueprint,
    cover,
    f1,
    f1x,
    f1xy,
    field_two,
    idempotent_pair,
    zero_free_pair,
)


def _sum(B, *renders):
    """Formal sum from generator-power strings like "x", "x^2", "1", "0"."""
    terms = []
    for r in renders:
        if r == "1":
            terms.append(B.one())
        elif r == "0":
            terms.append(ZERO_MONOMIAL)
        else:
            name, _, e = r.partition("^")
            terms.append(B.pres.normalize(
                B.pres.monomial({name: int(e) if e else 1})))
    return FormalSum.of(terms)


class TestConstructors:
    def test_from_monoid_rejects_zero(self):
        with pytest.raises(ZeroPresent):
            from_monoid(MonoidPresentation((), (), True))

    def test_initial_and_terminal(self):
        I = initial_blueprint()
        assert I.zero() is None
        assert list(I.elements()) == [I.one()]
        T = terminal_blueprint()
        assert T.holds([T.one()], [ZERO_MONOMIAL]).is_holds
        assert T.holds([T.one()], []).is_holds

    def test_from_semiring_boolean(self):
        B = boolean_blueprint()
        one = B.one()
        assert B.holds([one, one], [one]).is_holds
        assert B.holds([one, one], [B.zero()]).is_fails

    def test_from_semiring_field_two(self):
        B = field_two()
        one = B.one()
        assert B.holds([one, one], [B.zero()]).is_holds
        assert B.holds([one, one], [one]).is_fails

    def test_trivial_semiring_is_terminal(self):
        B = from_semiring(semiring_zmod(1))
        assert B.holds([B.one()], [B.zero()]).is_holds
        assert B.holds([B.one()], []).is_holds

    def test_cyclotomic_small(self):
        B1 = cyclotomic(1)
        assert B1.pres.generators == ()
        assert sorted(B1.render(m) for m in B1.elements()) == ["0", "1"]
        B2 = cyclotomic(2)
        assert B2.holds(_sum(B2, "1", "z"), _sum(B2, "0")).is_holds
        B4 = cyclotomic(4)
        assert B4.holds(_sum(B4, "1", "z^2"), _sum(B4, "0")).is_holds
        assert B4.holds(_sum(B4, "1", "z", "z^2", "z^3"), _sum(B4, "0")).is_holds
        assert B4.holds(_sum(B4, "1", "z"), _sum(B4, "0")).is_fails

    def test_free_extension(self):
        F = free_extension(f1(), ["x"])
        assert find_isomorphism(F, f1x()) is not None
        with pytest.raises(NameClash):
            free_extension(F, ["x"])
        with pytest.raises(NameClash):
            free_extension(F, ["y", "y"])

    def test_free_extension_lifts_sum_relations(self):
        # over the square roots of unity, (1 + z) * x stays related to 0
        F = free_extension(cyclotomic(2), ["x"])
        x = F.pres.monomial({"x": 1})
        zx = F.pres.monomial({"z": 1, "x": 1})
        assert F.holds(FormalSum.of([x, zx]), _sum(F, "0")).is_holds


class TestHolds:
    def test_minimal_preadd_only_relates_equal_sums(self):
        B = f1x()
        x = B.pres.gen("x")
        xx = B.pres.monomial({"x": 2})
        assert B.holds([x], [xx]).is_fails
        assert B.holds([x, xx], [xx, x]).is_holds

    def test_zero_equals_empty_sum(self):
        B = f1()
        assert B.holds([ZERO_MONOMIAL], []).is_holds
        assert B.holds([B.one()], []).is_fails

    def test_additivity_and_multiplicativity_of_derived_pairs(self):
        B = cyclotomic(4)
        zero = _sum(B, "0")
        lhs1, lhs2 = _sum(B, "1", "z^2"), _sum(B, "1", "z", "z^2", "z^3")
        # (A4): sum of two derived pairs
        joint = FormalSum.of(lhs1.terms + lhs2.terms)
        assert B.holds(joint, FormalSum.of([ZERO_MONOMIAL] * 2)).is_holds
        # (A5): multiply a derived pair by z
        z = B.pres.gen("z")
        scaled = FormalSum.of([B.mul(z, t) for t in lhs1.terms])
        assert B.holds(scaled, zero).is_holds

    def test_embedded_exactness(self):
        # embedded decisions match table evaluation and are never Unknown
        for B in (boolean_blueprint(), field_two()):
            R = B.semiring
            els = B.elements()
            sums = [()] + [(a,) for a in els] + [
                (a, b) for a in els for b in els]
            for ls in sums:
                for rs in sums:
                    d = B.holds(list(ls), list(rs))
                    assert not d.is_unknown
                    assert d.is_holds == (R.add_many(ls) == R.add_many(rs))


class TestClosures:
    def test_proper_closure_merges_planted_pair(self):
        a, b = Monomial((1, 0)), Monomial((0, 1))
        pres = MonoidPresentation(("a", "b"), (), True)
        B = PresentedBlueprint(
            pres,
            ((FormalSum.single(ZERO_MONOMIAL), FormalSum.empty()),
             (FormalSum.single(a), FormalSum.single(b))),
            label="planted")
        C, proj = proper_closure(B)
        assert C.eq(proj(a), proj(b))
        assert C.pres.has_zero
        assert C.holds([ZERO_MONOMIAL], []).is_holds

    def test_proper_closure_is_identity_on_proper(self):
        B = f1x()
        C, proj = proper_closure(B)
        assert C.pres == B.pres
        assert validate_morphism(proj).is_holds

    def test_zero_closure(self):
        C, iota = zero_closure(initial_blueprint())
        assert C.holds([ZERO_MONOMIAL], []).is_holds
        assert find_isomorphism(C, f1()) is not None
        B = f1()
        same, _ = zero_closure(B)
        assert same is B

    def test_zero_closure_links_empty_sum_relations_to_zero(self):
        # 1 + z == empty in the zero-free square roots of unity; adjoining
        # a zero makes 1 + z == 0 as well
        pres = MonoidPresentation(("z",), ((Monomial((2,)), Monomial((0,))),),
                                  False)
        one, z = Monomial((0,)), Monomial((1,))
        B = PresentedBlueprint(pres, ((FormalSum.of([one, z]),
                                       FormalSum.empty()),), label="mu2pre")
        C, _ = zero_closure(B)
        assert C.holds([one, z], [ZERO_MONOMIAL]).is_holds

    def test_inverse_closure_of_f1_adjoins_minus_one(self):
        C, iota = inverse_closure(f1())
        neg = C.pres.gen("neg")
        assert C.holds([C.one(), neg], []).is_holds
        assert C.eq(C.mul(neg, neg), C.one())
        assert find_isomorphism(C, cyclotomic(2)) is not None

    def test_inverse_closure_is_identity_when_inverses_exist(self):
        B = cyclotomic(2)
        same, _ = inverse_closure(B)
        assert same is B

    def test_cancellative_closure_collapses_boolean(self):
        # 1 + 1 == 1 = 0 + 1 cancels to 1 == 0
        B = boolean_blueprint()
        C, _ = cancellative_closure(B)
        assert C.holds([C.one()], [C.zero()]).is_holds

    def test_cancellative_closure_idempotent(self):
        B = f1x()
        C, _ = cancellative_closure(B)
        again, iota = cancellative_closure(C)
        assert again is C
        # and a bare monoid gains no relations
        x = C.pres.gen("x")
        assert C.holds([x], [C.pres.monomial({"x": 2})]).is_fails


class TestClassify:
    def test_with_inverses_iff_even_order(self):
        for n in range(1, 7):
            rec = classify(cyclotomic(n))
            assert rec.with_inverses.is_holds == (n % 2 == 0), n

    def test_blue_fields(self):
        assert classify(f1()).is_blue_field.is_holds
        assert classify(field_two()).is_blue_field.is_holds
        assert classify(idempotent_pair()).is_blue_field.is_fails

    def test_integral_elements_of_idempotent_pair(self):
        B = idempotent_pair()
        rec = classify(B)
        assert [B.render(a) for a in rec.integral_elements] == ["1"]
        assert [B.render(a) for a in rec.units] == ["1"]

    def test_monoid_with_zero_detection(self):
        assert is_monoid_with_zero(f1()).is_holds
        assert is_monoid_with_zero(idempotent_pair()).is_holds
        d = is_monoid_with_zero(boolean_blueprint())
        assert d.is_fails and "witness" in d.info()
        assert is_monoid_with_zero(initial_blueprint()).is_fails


class TestLocalize:
    def test_invert_generator(self):
        B = f1x()
        L, iota = localize(B, [B.pres.gen("x")])
        xi = iota(B.pres.gen("x"))
        inv = L.pres.gen("x_inv")
        assert L.eq(L.mul(xi, inv), L.one())
        assert validate_morphism(iota).is_holds

    def test_empty_set_is_identity(self):
        B = f1x()
        L, iota = localize(B, [])
        assert L.pres == B.pres
        assert L.eq(iota(B.pres.gen("x")), L.pres.gen("x"))

    def test_inverting_zero_collapses(self):
        B = f1()
        L, _ = localize(B, [ZERO_MONOMIAL])
        assert L.eq(L.one(), ZERO_MONOMIAL)

    def test_localized_cover_inverts_chosen_section(self):
        B = cover()
        h2 = B.pres.gen("h2")
        L, iota = localize(B, [h2])
        assert L.eq(L.mul(iota(h2), L.pres.gen("h2_inv")), L.one())

    def test_fraction_equality_transitive_with_distinct_witnesses(self):
        B = idempotent_pair()
        e, one = B.pres.gen("e"), B.one()
        closure = multiplicative_closure(B, [e])
        x, y, w = Fraction(one, one), Fraction(one, e), Fraction(e, e)
        d1 = fractions_equal(B, closure, x, y)
        assert d1.is_holds and d1.info()["witness"] == "e"
        assert fractions_equal(B, closure, y, w).is_holds
        assert fractions_equal(B, closure, x, w).is_holds
        # e becomes a unit, so e/1 = 1/1 with the idempotent as witness
        assert fractions_equal(B, closure, Fraction(e, one), x).is_holds
        zero = Fraction(ZERO_MONOMIAL, one)
        assert fractions_equal(B, closure, zero, x).is_fails


class TestBaseExtension:
    def test_z_rank_examples(self):
        assert z_rank(base_extend_Z(f1())) == 1
        assert z_rank(base_extend_Z(cyclotomic(2))) == 1
        assert z_rank(base_extend_Z(cyclotomic(3))) == 2

    def test_lattices_agree_with_inverses(self):
        d = extension_lattices_agree(cyclotomic(2))
        assert d.is_holds
        d6 = extension_lattices_agree(cyclotomic(6))
        assert d6.is_holds

    def test_boolean_round_trip(self):
        r = base_extend_N(boolean_blueprint())
        assert "1 + 1 = 1" in r.render()

    def test_render_shapes(self):
        assert base_extend_Z(f1()).render().startswith("Z[")
        assert base_extend_N(f1x()).render().startswith("N[")


class TestSmith:
    def test_known_invariants(self):
        assert smith_invariants([[2, 4], [6, 8]]) == [2, 4]
        assert smith_invariants([[1, 0], [0, 1]]) == [1, 1]
        assert smith_invariants([[0, 0]]) == []
        assert smith_invariants([[6]]) == [6]

    def test_divisibility_chain(self):
        inv = smith_invariants([[2, 0, 0], [0, 6, 0], [0, 0, 10]])
        for a, b in zip(inv, inv[1:]):
            assert b % a == 0


class TestCategorical:
    def test_tensor_of_free_lines_is_plane(self):
        F1 = f1()
        fx = BlueprintMorphism(F1, f1x(), ())
        fy = BlueprintMorphism(F1, from_monoid_with_zero(
            MonoidPresentation(("y",), (), True), label="F1[y]"), ())
        T, i1, i2 = tensor(fx, fy)
        assert find_isomorphism(T, f1xy()) is not None
        assert validate_morphism(i1).is_holds
        assert validate_morphism(i2).is_holds

    def test_tensor_unit_law(self):
        F1 = f1()
        f = BlueprintMorphism(F1, f1x(), ())
        T, _, _ = tensor(f, identity_morphism(F1))
        assert find_isomorphism(T, f1x()) is not None

    def test_tensor_universal_property_counts(self):
        # cocones into the field of two elements match morphisms out of T
        F1 = f1()
        fx = BlueprintMorphism(F1, f1x(), ())
        fy = BlueprintMorphism(F1, from_monoid_with_zero(
            MonoidPresentation(("y",), (), True)), ())
        T, i1, i2 = tensor(fx, fy)
        target = field_two()
        out_of_T = enumerate_morphisms(T, target)
        assert len(out_of_T) == 4
        pairs = {(compose(i1, h)(fx.target.pres.gen("x")),
                  compose(i2, h)(fy.target.pres.gen("y")))
                 for h in out_of_T}
        assert len(pairs) == 4

    def test_product_of_f1_with_itself(self):
        F = f1()
        P, projections = product([F, F])
        z, o = ZERO_MONOMIAL, F.one()
        lhs = [(z, o), (o, z)]
        rhs = [(z, z), (o, o)]
        assert P.holds(lhs, rhs).is_holds
        # (0,1)+(1,0) == (1,1) also holds (zero terms erase componentwise);
        # a mismatch in one component refutes
        assert P.holds(lhs, [(o, o)]).is_holds
        assert P.holds(lhs, [(o, z)]).is_fails
        assert len(P.elements()) == 4
        pr1 = projections[0]
        assert F.eq(pr1((z, o)), z)

    def test_product_of_monoids_is_not_a_monoid_blueprint(self):
        M = zero_free_pair()
        P, _ = product([M, M])
        one, e = M.one(), M.pres.gen("o")
        lhs = [(one, e), (e, one)]
        rhs = [(one, one), (e, e)]
        assert P.holds(lhs, rhs).is_holds
        assert sorted(map(P.render, lhs)) != sorted(map(P.render, rhs))

    def test_equalizer_of_identity_and_square(self):
        B = f1x()
        x = B.pres.gen("x")
        ident = identity_morphism(B)
        square = BlueprintMorphism(B, B, (("x", B.pres.monomial({"x": 2})),))
        E, incl = equalizer(ident, square)
        assert sorted(B.render(a) for a in E.elements()) == ["0", "1"]
        assert validate_morphism(incl).is_holds


class TestMorphisms:
    def test_identity_validates(self):
        for B in (f1(), boolean_blueprint(), cyclotomic(3)):
            assert validate_morphism(identity_morphism(B)).is_holds

    def test_root_of_unity_to_field_two(self):
        B, F2 = cyclotomic(2), field_two()
        f = BlueprintMorphism(B, F2, (("z", F2.one()),))
        assert validate_morphism(f).is_holds
        g = BlueprintMorphism(B, F2, (("z", F2.zero()),))
        assert validate_morphism(g).is_fails

    def test_collapse_to_f1_fails_on_sum_relation(self):
        B, F1 = cyclotomic(2), f1()
        f = BlueprintMorphism(B, F1, (("z", F1.one()),))
        assert validate_morphism(f).is_fails

    def test_enumerate_and_compose(self):
        fs = enumerate_morphisms(f1x(), field_two())
        assert len(fs) == 2
        only = enumerate_morphisms(cyclotomic(2), field_two())
        assert len(only) == 1
        B2, F2 = cyclotomic(2), field_two()
        f = BlueprintMorphism(f1x(), B2, (("x", B2.pres.gen("z")),))
        g = only[0]
        h = compose(f, g)
        x = f1x().pres.gen("x")
        assert F2.eq(h(x), F2.one())
