"""Congruences and ideals: generation, quotients, primality, maximality,
preimages, and the integral ideal comparison."""

from __future__ import annotations

import pytest

from bluealg import (
    FormalSum,
    Monomial,
    ZERO_MONOMIAL,
    absorbing_ideal,
    check_congruence,
    congruence_from_partition,
    congruence_generated,
    congruence_of_ideal,
    enumerate_prime_ideals,
    find_isomorphism,
    from_monoid,
    holds,
    ideal_from_members,
    ideal_generated,
    ideals_equal,
    identity_morphism,
    inverse_image_congruence,
    inverse_image_ideal,
    is_ideal,
    is_maximal_congruence,
    is_maximal_ideal,
    is_prime_congruence,
    is_prime_ideal,
    iz_ideal,
    iz_profiles_agree,
    kernel_of,
    lattice_profile,
    quotient_by,
    radical,
    terminal_blueprint,
)
from bluealg.blueprint import BlueprintMorphism, MonoidPresentation
from bluealg.congruence import Ideal, NotProper

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


class TestKernel:
    def test_kernel_of_identity_is_minimal(self):
        B = idempotent_pair()
        c = kernel_of(identity_morphism(B))
        for a in B.elements():
            for b in B.elements():
                assert c.related(a, b).is_holds == B.eq(a, b)

    def test_kernel_of_collapse_is_maximal(self):
        B = f1()
        T = terminal_blueprint()
        f = BlueprintMorphism(B, T, ())
        c = kernel_of(f)
        assert c.related(B.one(), ZERO_MONOMIAL).is_holds
        assert c.is_proper().is_fails

    def test_kernel_of_evaluation_at_zero(self):
        B, F1 = f1x(), f1()
        f = BlueprintMorphism(B, F1, (("x", ZERO_MONOMIAL),))
        c = kernel_of(f)
        x = B.pres.gen("x")
        assert c.related(x, ZERO_MONOMIAL).is_holds
        assert c.related(B.mul(x, x), x).is_holds
        assert c.related(B.one(), x).is_fails


class TestGeneration:
    def test_ideal_containing_a_partition_of_one_is_improper(self):
        B = cover()
        h1, h2 = B.pres.gen("h1"), B.pres.gen("h2")
        I = ideal_generated(B, [h1, h2])
        assert I.is_proper().is_fails

    def test_principal_ideal_in_free_line(self):
        B = f1x()
        x = B.pres.gen("x")
        I = ideal_generated(B, [x])
        assert I.contains(ZERO_MONOMIAL).is_holds
        assert I.contains(B.pres.monomial({"x": 3})).is_holds
        assert I.contains(B.one()).is_fails
        assert is_ideal(I).is_holds

    def test_empty_congruence_is_minimal(self):
        B = idempotent_pair()
        c = congruence_generated(B, [])
        e, one = B.pres.gen("e"), B.one()
        assert c.related(e, e).is_holds
        assert c.related(e, one).is_fails
        assert check_congruence(c).is_holds

    def test_congruence_reproduced_from_its_quotient_pairs(self):
        B = idempotent_pair()
        c = congruence_generated(B, [(B.pres.gen("e"), B.one())])
        again = congruence_generated(B, c.pairs_for_quotient())
        for a in B.elements():
            for b in B.elements():
                assert c.related(a, b).kind == again.related(a, b).kind


class TestAbsorbing:
    def test_maximal_congruence_absorbs_everything(self):
        B = f1()
        c = congruence_generated(B, [(B.one(), ZERO_MONOMIAL)])
        I = absorbing_ideal(c)
        assert I.contains(B.one()).is_holds
        assert I.contains(ZERO_MONOMIAL).is_holds

    def test_minimal_congruence_absorbs_only_zero(self):
        B = f1()
        I = absorbing_ideal(congruence_generated(B, []))
        assert I.members_sorted() == [ZERO_MONOMIAL]
        assert is_ideal(I).is_holds

    def test_zero_free_monoid_has_empty_absorbing_ideal(self):
        B = from_monoid(MonoidPresentation(("x",), (), False))
        I = absorbing_ideal(congruence_generated(B, []))
        assert not I.members
        assert is_ideal(I).is_holds

    def test_absorbing_ideal_is_single_class(self):
        B = idempotent_pair()
        c = congruence_generated(B, [(B.pres.gen("e"), ZERO_MONOMIAL)])
        I = absorbing_ideal(c)
        members = I.members_sorted()
        assert ZERO_MONOMIAL in members
        for a in members:
            for b in members:
                assert c.related(a, b).is_holds


class TestQuotient:
    def test_quotient_by_minimal_is_proper_closure(self):
        B = idempotent_pair()
        Q, proj = quotient_by(B, congruence_generated(B, []))
        assert len(Q.elements()) == len(B.elements())

    def test_quotient_by_maximal_is_terminal(self):
        B = f1()
        c = congruence_generated(B, [(B.one(), ZERO_MONOMIAL)])
        Q, proj = quotient_by(B, c)
        assert Q.holds([Q.one()], [ZERO_MONOMIAL]).is_holds
        assert Q.holds([Q.one()], []).is_holds

    def test_free_line_mod_generator_is_f1(self):
        B = f1x()
        I = ideal_generated(B, [B.pres.gen("x")])
        Q, proj = quotient_by(B, congruence_of_ideal(I))
        assert find_isomorphism(Q, f1()) is not None
        assert Q.eq(proj(B.pres.gen("x")), ZERO_MONOMIAL)

    def test_kernel_of_projection_recovers_congruence(self):
        B = idempotent_pair()
        c = congruence_generated(B, [(B.pres.gen("e"), B.one())])
        Q, proj = quotient_by(B, c)
        k = kernel_of(proj)
        for a in B.elements():
            for b in B.elements():
                assert k.related(a, b).kind == c.related(a, b).kind


class TestPrimality:
    def test_principal_prime_in_free_line(self):
        B = f1x()
        I = ideal_generated(B, [B.pres.gen("x")])
        assert is_prime_ideal(I).is_holds

    def test_product_generator_is_not_prime(self):
        B = f1xy()
        xy = B.pres.monomial({"x": 1, "y": 1})
        I = ideal_generated(B, [xy])
        d = is_prime_ideal(I)
        assert d.is_fails
        assert set(d.info()["witness"]) == {"x", "y"}

    def test_zero_ideal_prime_but_congruence_not(self):
        # on {0, e, 1}: the ideal {0} is prime, its congruence is not
        B = idempotent_pair()
        I = ideal_generated(B, [ZERO_MONOMIAL])
        assert is_prime_ideal(I).is_holds
        c = congruence_of_ideal(I)
        d = is_prime_congruence(c)
        assert d.is_fails

    def test_minimal_congruence_on_f1_is_prime(self):
        assert is_prime_congruence(congruence_generated(f1(), [])).is_holds

    def test_improper_inputs_are_rejected(self):
        B = f1()
        with pytest.raises(NotProper):
            is_prime_ideal(ideal_generated(B, [B.one()]))
        with pytest.raises(NotProper):
            is_prime_congruence(
                congruence_generated(B, [(B.one(), ZERO_MONOMIAL)]))


class TestMaximality:
    def test_generator_ideal_maximal_in_free_line(self):
        B = f1x()
        I = ideal_generated(B, [B.pres.gen("x")])
        assert is_maximal_ideal(I).is_holds

    def test_zero_ideal_not_maximal_in_free_line(self):
        B = f1x()
        I = ideal_generated(B, [ZERO_MONOMIAL])
        d = is_maximal_ideal(I)
        assert d.is_fails and d.info()["witness"] == "x"

    def test_minimal_congruence_on_f1_is_maximal(self):
        assert is_maximal_congruence(congruence_generated(f1(), [])).is_holds

    def test_maximal_implies_prime_on_ideal_zoo(self):
        B = idempotent_pair()
        zoo = [
            ideal_generated(f1x(), [f1x().pres.gen("x")]),
            ideal_generated(B, [B.pres.gen("e")]),
            ideal_generated(B, [ZERO_MONOMIAL]),
            ideal_generated(f1xy(), [f1xy().pres.gen("x"),
                                     f1xy().pres.gen("y")]),
        ]
        for I in zoo:
            if is_maximal_ideal(I).is_holds:
                assert is_prime_ideal(I).is_holds


class TestEnumeration:
    def test_free_line_spectrum(self):
        ideals, complete = enumerate_prime_ideals(f1x())
        assert complete.is_holds
        assert [I.generator_support() for I in ideals] == [(), ("x",)]

    def test_free_plane_spectrum(self):
        ideals, complete = enumerate_prime_ideals(f1xy())
        assert complete.is_holds
        assert [I.generator_support() for I in ideals] == [
            (), ("x",), ("y",), ("x", "y")]

    def test_terminal_has_no_primes(self):
        ideals, _ = enumerate_prime_ideals(terminal_blueprint())
        assert ideals == []

    def test_embedded_enumeration_is_exact(self):
        ideals, complete = enumerate_prime_ideals(field_two())
        assert complete.is_holds
        assert len(ideals) == 1  # only the zero ideal

    def test_every_enumerated_ideal_passes_audits(self):
        for B in (f1x(), idempotent_pair(), boolean_blueprint()):
            ideals, _ = enumerate_prime_ideals(B)
            for I in ideals:
                assert is_ideal(I).is_holds
                assert not is_prime_ideal(I).is_fails


class TestRadical:
    def test_radical_of_square(self):
        B = f1x()
        I = ideal_generated(B, [B.pres.monomial({"x": 2})])
        assert I.contains(B.pres.gen("x")).is_fails
        R = radical(I)
        assert R.contains(B.pres.gen("x")).is_holds
        assert ideals_equal(R, ideal_generated(B, [B.pres.gen("x")])).is_holds

    def test_radical_of_prime_is_itself(self):
        B = f1x()
        I = ideal_generated(B, [B.pres.gen("x")])
        assert ideals_equal(radical(I), I).is_holds

    def test_radical_of_whole_is_whole(self):
        B = f1()
        R = radical(ideal_generated(B, [B.one()]))
        assert R.contains(B.one()).is_holds


class TestPreimages:
    def test_preimage_of_prime_ideal_is_prime(self):
        B, F1 = f1x(), f1()
        f = BlueprintMorphism(B, F1, (("x", ZERO_MONOMIAL),))
        I = ideal_generated(F1, [ZERO_MONOMIAL])
        J = inverse_image_ideal(f, I)
        assert J.contains(B.pres.gen("x")).is_holds
        assert J.contains(B.one()).is_fails
        assert is_prime_ideal(J).is_holds
        assert is_ideal(J).is_holds

    def test_preimage_of_whole_is_whole(self):
        B, F1 = f1x(), f1()
        f = BlueprintMorphism(B, F1, (("x", F1.one()),))
        J = inverse_image_ideal(f, ideal_from_members(F1, F1.elements()))
        assert J.is_proper().is_fails

    def test_prime_congruence_pullback_counterexample(self):
        # identity on {1, o} from the zero-free blueprint to the one where
        # o is the zero: the minimal congruence downstairs is prime, its
        # preimage upstairs is not
        B = zero_free_pair()
        C = f1()
        f = BlueprintMorphism(B, C, (("o", ZERO_MONOMIAL),))
        minimal = congruence_generated(C, [])
        assert is_prime_congruence(minimal).is_holds
        back = inverse_image_congruence(f, minimal)
        d = is_prime_congruence(back)
        assert d.is_fails

    def test_prime_congruence_pullback_with_zero_source(self):
        # with a zero on the source side the pullback shortcut applies
        B, F1 = f1x(), f1()
        f = BlueprintMorphism(B, F1, (("x", ZERO_MONOMIAL),))
        back = inverse_image_congruence(f, congruence_generated(F1, []))
        d = is_prime_congruence(back)
        assert d.is_holds
        assert d.info().get("by") == "preimage"


class TestIntegralIdeal:
    def test_minimal_congruence_keeps_profile(self):
        B = f1()
        d = iz_profiles_agree(congruence_generated(B, []))
        assert d.is_holds

    def test_merging_generator_with_one(self):
        B = f1x()
        c = congruence_generated(B, [(B.pres.gen("x"), B.one())])
        assert iz_profiles_agree(c).is_holds

    def test_maximal_congruence_gives_unit_ideal(self):
        B = f1()
        c = congruence_generated(B, [(B.one(), ZERO_MONOMIAL)])
        r = iz_ideal(c)
        assert lattice_profile(r) == (0, ())
        assert iz_profiles_agree(c).is_holds

    def test_quotient_rank_drops(self):
        B = idempotent_pair()
        c = congruence_generated(B, [(B.pres.gen("e"), B.one())])
        Q, _ = quotient_by(B, c)
        from bluealg import base_extend_Z, z_rank
        assert z_rank(base_extend_Z(B)) == 2
        assert z_rank(base_extend_Z(Q)) == 1
        assert iz_profiles_agree(c).is_holds


class TestAudits:
    def test_planted_non_ideal_is_caught(self):
        B = f1x()
        x = B.pres.gen("x")
        # {x} alone misses the zero and x^2
        I = Ideal(B, generators=(x,), members={x}, complete=True)
        assert is_ideal(I).is_fails

    def test_partition_backend(self):
        B = idempotent_pair()
        e, one = B.pres.gen("e"), B.one()
        c = congruence_from_partition(B, [[ZERO_MONOMIAL], [e, one]])
        assert c.related(e, one).is_holds
        assert c.related(e, ZERO_MONOMIAL).is_fails
        assert check_congruence(c).is_holds
