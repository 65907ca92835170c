import pytest

from hallcrys.classtable import IsoClass
from hallcrys.crystal import (Crystal, certify_exceptional,
                              etilde, exceptional_norm, fdoubleprime_tree,
                              fprime, fprime_tree, ftilde, kashiwara_apply,
                              membership_L, string_decompose)
from hallcrys.generic import (ExprTree, generic_basis, generic_chevalley,
                              generic_divided_power_simple, generic_identity,
                              generic_multiply, generic_ringel_pair,
                              kashiwara_pair_elements)
from hallcrys.scalars import RatFunc, a_membership, parse_laurent

P = IsoClass.of("r1.1")


class TestFPrime:
    def test_examples(self, reg, a2):
        ctx = reg.ctx(a2)
        S1 = ctx.table(2).simple_class(0)
        val = fprime(ctx, 0, generic_basis(ctx, P))
        assert val == generic_basis(ctx, ctx.table(2).simple_class(1)).scale(
            RatFunc(parse_laurent("1 - v^-2")))
        assert fprime(ctx, 0, generic_identity(ctx)).is_zero()
        assert fprime(ctx, 0, generic_chevalley(ctx, 0)) == generic_identity(ctx)
        assert fprime(ctx, 0, generic_chevalley(ctx, 1)).is_zero()

    def test_two_routes_agree(self, reg, a2, a3):
        for quiver in (a2, a3):
            ctx = reg.ctx(quiver)
            trees = [ExprTree.letter(quiver, 0) * ExprTree.letter(quiver, 1),
                     ExprTree.letter(quiver, 1) * ExprTree.letter(quiver, 0),
                     ExprTree.letter(quiver, 0, 2) * ExprTree.letter(quiver, 1)]
            from hallcrys.generic import expr_evaluate_generic
            for tree in trees:
                for i in range(quiver.n):
                    direct = fprime(ctx, i, expr_evaluate_generic(tree, ctx))
                    recursive = fprime_tree(ctx, i, tree)
                    assert direct == recursive, (i, str(tree))

    def test_fdoubleprime_defining_identities(self, reg, a2):
        ctx = reg.ctx(a2)
        assert fdoubleprime_tree(ctx, 0, ExprTree.letter(a2, 0)) == generic_identity(ctx)
        assert fdoubleprime_tree(ctx, 0, ExprTree.letter(a2, 1)).is_zero()
        # f''_i(E_j P) = v_i^{-a_ij} E_j f''_i(P) + delta_ij P on E1E2 vs E1 tail
        tree = ExprTree.letter(a2, 0) * ExprTree.letter(a2, 1)
        val = fdoubleprime_tree(ctx, 0, tree)
        # head is E1: v^{-a_11} E1 f''(E2) + E2-evaluated tail = 1 * 0 + E2
        assert val == generic_chevalley(ctx, 1)


class TestStrings:
    def test_kernel_element_single_component(self, reg, a2):
        ctx = reg.ctx(a2)
        E2 = generic_chevalley(ctx, 1)
        dec = string_decompose(ctx, 0, E2)
        assert len(dec.components) == 1
        n, el = dec.components[0]
        assert n == 0 and el == E2

    def test_ei_component(self, reg, a2):
        ctx = reg.ctx(a2)
        dec = string_decompose(ctx, 0, generic_chevalley(ctx, 0))
        assert [(n, str(el)) for n, el in dec.components] == [(1, "(1)*u[0]")]

    def test_e2e1_decomposition_frozen(self, reg, a2):
        # frozen regression value computed by the exact linear-algebra oracle
        ctx = reg.ctx(a2)
        x = generic_multiply(generic_chevalley(ctx, 1), generic_chevalley(ctx, 0))
        dec = string_decompose(ctx, 0, x)
        comps = {n: el for n, el in dec.components}
        assert set(comps) == {0, 1}
        s12 = IsoClass.of("S1", "S2")
        assert comps[0].coeffs[s12] == RatFunc(parse_laurent("v - v^-1"))
        assert comps[0].coeffs[P] == RatFunc(parse_laurent("-v^-1"))
        assert comps[1] == generic_chevalley(ctx, 1).scale(
            RatFunc(parse_laurent("v^-1")))
        assert dec.reassemble(ctx) == x

    def test_reassembly_property(self, reg, a3):
        ctx = reg.ctx(a3)
        E = [generic_chevalley(ctx, v) for v in range(3)]
        samples = [generic_multiply(E[0], E[1]),
                   generic_multiply(E[1], generic_multiply(E[0], E[2]))]
        for x in samples:
            for i in range(3):
                assert string_decompose(ctx, i, x).reassemble(ctx) == x


class TestKashiwaraOperators:
    def test_etilde_of_one(self, reg, a2):
        ctx = reg.ctx(a2)
        assert etilde(ctx, 0, generic_identity(ctx)) == generic_chevalley(ctx, 0)

    def test_ftilde_divided_powers(self, reg, a2):
        ctx = reg.ctx(a2)
        assert ftilde(ctx, 0, generic_divided_power_simple(ctx, 0, 2)) \
            == generic_chevalley(ctx, 0)
        assert ftilde(ctx, 0, generic_identity(ctx)).is_zero()

    def test_e2e1_via_word(self, reg, a2):
        ctx = reg.ctx(a2)
        z = etilde(ctx, 1, etilde(ctx, 0, generic_identity(ctx)))
        assert z == generic_multiply(generic_chevalley(ctx, 1),
                                     generic_chevalley(ctx, 0))

    def test_etilde_ftilde_inverse_on_image(self, reg, a2):
        ctx = reg.ctx(a2)
        xs = [generic_identity(ctx), generic_chevalley(ctx, 1),
              generic_multiply(generic_chevalley(ctx, 1), generic_chevalley(ctx, 0))]
        for x in xs:
            for i in range(2):
                up = etilde(ctx, i, x)
                assert ftilde(ctx, i, up) == x
                assert etilde(ctx, i, ftilde(ctx, i, up)) == up

    def test_unknown_kind(self, reg, a2):
        ctx = reg.ctx(a2)
        with pytest.raises(ValueError):
            kashiwara_apply("Gtilde", ctx, 0, generic_identity(ctx))


class TestMembership:
    def test_examples(self, reg, a2):
        ctx = reg.ctx(a2)
        assert membership_L(generic_basis(ctx, P))
        assert membership_L(generic_identity(ctx))
        assert not membership_L(generic_chevalley(ctx, 0).scale(RatFunc.v_power(1)))


class TestCrystalGeneration:
    def test_a2_weights(self, reg, a2):
        ctx = reg.ctx(a2)
        cry = Crystal(ctx, 4)
        assert cry.falsifications == []
        assert len(cry.vertices_of_weight((1, 0))) == 1
        assert len(cry.vertices_of_weight((1, 1))) == 2
        assert len(cry.vertices_of_weight((2, 2))) == 3
        assert len(cry.vertices_of_weight((0, 0))) == 1

    def test_weight_bound_zero(self, reg, a2):
        ctx = reg.ctx(a2)
        cry = Crystal(ctx, 0)
        assert cry.all_vertices()[0].word == ()
        assert len(cry.all_vertices()) == 1

    def test_l_stability_and_axioms(self, reg, a2):
        ctx = reg.ctx(a2)
        cry = Crystal(ctx, 3)
        for v in cry.all_vertices():
            assert membership_L(v.rep)
            for i in range(2):
                up = etilde(ctx, i, v.rep)
                assert membership_L(up)
                assert ftilde(ctx, i, up) == v.rep

    def test_gram_orthonormality(self, reg, a2):
        ctx = reg.ctx(a2)
        cry = Crystal(ctx, 4)
        for w, bucket in cry.by_weight.items():
            for i, b1 in enumerate(bucket):
                for j, b2 in enumerate(bucket):
                    m = a_membership(generic_ringel_pair(b1.rep, b2.rep))
                    assert m.in_A
                    assert m.unit_part == (1 if i == j else 0)


class TestCertificates:
    def test_norm_closed_forms(self, reg, a2):
        ctx = reg.ctx(a2)
        one_minus = RatFunc.one() - RatFunc.v_power(-2)
        assert exceptional_norm(ctx, P) == RatFunc.one() / one_minus
        two = IsoClass.of("S1", "S1")
        expect = (RatFunc.one() / (RatFunc.one() - RatFunc.v_power(-4))) \
            * (RatFunc.one() / one_minus)
        assert exceptional_norm(ctx, two) == expect

    def test_norm_rejects_non_exceptional(self, reg, a2):
        ctx = reg.ctx(a2)
        with pytest.raises(ValueError):
            exceptional_norm(ctx, IsoClass.of("S1", "S2"))

    def test_certify_P(self, reg, a2):
        ctx = reg.ctx(a2)
        cry = Crystal(ctx, 2)
        cert = certify_exceptional(ctx, P, cry)
        assert cert.passed and cert.sign == 1
        assert cert.matched_word in ("1.2", "2.1")
        others = [u for w, u in cert.pairing_units.items() if w != cert.matched_word]
        assert all(u == 0 for u in others)

    def test_certify_simple(self, reg, a2):
        ctx = reg.ctx(a2)
        cry = Crystal(ctx, 1)
        cert = certify_exceptional(ctx, IsoClass.of("S1"), cry)
        assert cert.passed and cert.matched_word == "1"

    def test_certify_norm_only_on_kronecker(self, reg, kron):
        ctx = reg.ctx(kron, (3, 3))
        cert = certify_exceptional(ctx, IsoClass.of("r2.1"), None)
        assert cert.norm_in_one_plus_vinv_A
        assert cert.matched_word is None
        assert cert.passed

    def test_kr_pairing_agreement_on_vertices(self, reg, a2):
        # (b1, b2)_{K,0} = (b1, b2)_{R,0} on same-weight vertex pairs
        ctx = reg.ctx(a2)
        cry = Crystal(ctx, 3)
        for w, bucket in cry.by_weight.items():
            for b1 in bucket:
                for b2 in bucket:
                    mk = a_membership(kashiwara_pair_elements(b1.rep, b2.rep))
                    mr = a_membership(generic_ringel_pair(b1.rep, b2.rep))
                    assert mk.in_A and mr.in_A
                    assert mk.unit_part == mr.unit_part


class TestFalsificationReporting:
    def test_sign_minus_one_is_reported_not_normalized(self, reg, a2):
        # doctor a crystal vertex by -1: the certificate must flag the sign
        # rather than silently matching up to sign
        from dataclasses import replace
        ctx = reg.ctx(a2)
        cry = Crystal(ctx, 2)
        t0 = ctx.table(2)
        weight = t0.class_dim(P)
        bucket = cry.by_weight[weight]
        doctored = [replace(v, rep=v.rep.scale(RatFunc(-1))) for v in bucket]
        cry.by_weight[weight] = doctored
        try:
            cert = certify_exceptional(ctx, P, cry)
        finally:
            cry.by_weight[weight] = bucket
        assert not cert.passed
        assert cert.sign is None
        assert any("sign -1" in f for f in cert.falsifications)


def test_certify_rejects_non_exceptional(reg, a2):
    ctx = reg.ctx(a2)
    with pytest.raises(ValueError):
        certify_exceptional(ctx, IsoClass.of("S1", "S2"), None)
