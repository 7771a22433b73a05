import numpy as np
import pytest
from hypothesis import given

from skewcat.algebra import (
    TWO,
    Congruence,
    FiniteSkewLattice,
    SkewHom,
    brute_force_homs_to_2,
    check_useful_lemma,
    compose,
    d_relation,
    enumerate_proper_homs_to_2,
    find_isomorphism,
    identity_hom,
    is_homomorphism,
    is_left_handed,
    is_normal,
    is_proper,
    is_right_handed,
    is_strongly_distributive,
    is_symmetric,
    iter_homomorphisms,
    l_relation,
    lattice_reflection,
    natural_order,
    quotient,
    r_relation,
    validate,
)
from skewcat.constructions import partial_function_algebra, primitive_left, primitive_right
from skewcat.duality import ev, star_of_bundle
from skewcat.errors import (
    AbsorptionFails,
    LawViolation,
    NotAssociative,
    NotIdempotent,
    PreconditionUnmet,
    SizeOverflow,
    TableError,
    ZeroLawFails,
)
from skewcat.bundles import Bundle
from skewcat.order import FinitePoset, downset_lattice

from conftest import lhsd_algebras


def corrupted(S, table, i, j, v):
    meet, join = S.meet.copy(), S.join.copy()
    (meet if table == "meet" else join)[i, j] = v
    return meet, join


class TestValidate:
    def test_one_element_algebra(self):
        S = validate([[0]], [[0]])
        assert S.n == 1 and S.zero == 0

    def test_primitive_is_valid(self, P2):
        assert validate(P2) is P2

    def test_corrupted_join_of_primitive(self, P2):
        # t1 ∨ t2 forced to t1 instead of t2
        meet, join = corrupted(P2, "join", 1, 2, 1)
        with pytest.raises((AbsorptionFails, NotIdempotent, NotAssociative)) as info:
            validate(meet, join)
        assert info.value.witness

    def test_every_single_corruption_is_caught(self, P2):
        for table in ("meet", "join"):
            for i in range(3):
                for j in range(3):
                    for v in range(3):
                        if v == getattr(P2, table)[i, j]:
                            continue
                        with pytest.raises(LawViolation):
                            validate(*corrupted(P2, table, i, j, v))

    def test_zero_law(self):
        # a two-element lattice whose declared zero is actually the top
        with pytest.raises(ZeroLawFails):
            validate([[0, 0], [0, 1]], [[0, 1], [1, 1]], zero=1)

    def test_bad_shapes(self):
        with pytest.raises(TableError):
            FiniteSkewLattice([[0, 0]], [[0, 0]])
        with pytest.raises(TableError):
            FiniteSkewLattice([[0, 2], [0, 1]], [[0, 1], [1, 1]])
        with pytest.raises(TableError):
            FiniteSkewLattice([[0]], [[0]], zero=3)

    def test_size_cap(self, P2):
        with pytest.raises(SizeOverflow):
            validate(P2, max_size_override=2)

    def test_join_with_zero_is_identity(self):
        for S in (primitive_left(3), partial_function_algebra(2, 2)):
            z = S.zero
            assert all(S.j(x, z) == x == S.j(z, x) for x in range(S.n))


class TestNaturalOrder:
    def test_zero_is_minimum(self):
        S = partial_function_algebra(2, 2)
        assert all(natural_order(S, S.zero, x) for x in range(S.n))

    def test_distinct_atoms_of_primitive_incomparable(self, P2):
        assert not natural_order(P2, 1, 2) and not natural_order(P2, 2, 1)

    def test_reflexive(self, P2):
        assert all(natural_order(P2, x, x) for x in range(3))


class TestGreenRelations:
    def test_d_on_primitive(self):
        assert d_relation(primitive_left(3)).blocks == ((0,), (1, 2, 3))

    def test_d_is_equality_on_lattices(self):
        D, _ = downset_lattice(FinitePoset.from_covers(3, [(0, 2)]))
        assert d_relation(D).is_equality()

    def test_d_on_sections_is_equal_domain(self):
        SA = star_of_bundle(Bundle(FinitePoset.antichain(2), (2, 2)))
        D = d_relation(SA.algebra)
        for a in range(SA.algebra.n):
            for b in range(SA.algebra.n):
                assert D.related(a, b) == (SA.dom(a) == SA.dom(b))

    def test_left_handed_means_r_is_equality(self):
        assert r_relation(primitive_left(3)).is_equality()
        assert not l_relation(primitive_left(3)).is_equality()
        assert l_relation(primitive_right(3)).is_equality()

    @given(lhsd_algebras())
    def test_d_is_join_of_l_and_r(self, S):
        D, L, R = d_relation(S), l_relation(S), r_relation(S)
        assert all(L.related(a, b) <= D.related(a, b) and R.related(a, b) <= D.related(a, b)
                   for a in range(S.n) for b in range(S.n))


class TestQuotients:
    def test_by_equality_is_a_copy(self, P2):
        Q, q = quotient(P2, Congruence.equality(3))
        assert Q == P2 and q == identity_hom(P2)

    def test_primitive_mod_d_is_two(self):
        Q, _ = quotient(primitive_left(3), d_relation(primitive_left(3)))
        assert Q == TWO

    def test_reflection_of_lattice_is_itself(self):
        D, _ = downset_lattice(FinitePoset.chain(2))
        L, alpha = lattice_reflection(D)
        assert L.n == D.n and alpha.is_injective()

    def test_reflection_of_sections_is_downset_lattice(self):
        X = FinitePoset.from_covers(3, [(0, 1)])
        L, _ = lattice_reflection(star_of_bundle(Bundle(X, (2, 1, 2))).algebra)
        D, _ = downset_lattice(X)
        assert find_isomorphism(L, D) is not None

    def test_kernel_of_evaluation_is_compatible(self):
        SA = star_of_bundle(Bundle(FinitePoset.chain(2), (2, 2)))
        for x in range(2):
            assert Congruence.kernel(ev(SA, x).map).is_compatible(SA.algebra)

    def test_incompatible_partition(self, P2):
        # 1 ~ 0 but 2∧1 = 2 while 2∧0 = 0
        C = Congruence.from_blocks([(0, 1), (2,)], 3)
        assert C.compatibility_witness(P2) is not None


class TestPredicates:
    def test_primitive_left_satisfies_all(self):
        for k in range(1, 5):
            S = primitive_left(k)
            for pred in (is_left_handed, is_strongly_distributive, is_normal, is_symmetric):
                assert pred(S)

    def test_primitive_right_is_not_left_handed(self):
        for k in (2, 3):
            v = is_left_handed(primitive_right(k))
            assert not v and v.witness
            assert is_right_handed(primitive_right(k))

    def test_lattices_satisfy_all(self):
        D, _ = downset_lattice(FinitePoset.from_covers(3, [(0, 2), (1, 2)]))
        for pred in (is_left_handed, is_right_handed, is_strongly_distributive, is_normal, is_symmetric):
            assert pred(D)

    def test_useful_lemma_examples(self):
        assert check_useful_lemma(primitive_left(2))
        assert check_useful_lemma(TWO)
        assert check_useful_lemma(star_of_bundle(Bundle(FinitePoset.chain(2), (2, 1))).algebra)

    def test_useful_lemma_needs_lhsd(self):
        with pytest.raises(PreconditionUnmet):
            check_useful_lemma(primitive_right(2))

    @given(lhsd_algebras())
    def test_random_subalgebras_are_lhsd(self, S):
        for pred in (is_left_handed, is_strongly_distributive, is_normal, is_symmetric, check_useful_lemma):
            assert pred(S)


class TestHomomorphisms:
    def test_identity_is_proper(self, P2):
        assert is_homomorphism(identity_hom(P2), P2, P2) and is_proper(identity_hom(P2))

    def test_constant_zero_is_not_proper(self, P2):
        h = SkewHom(P2, TWO, (0, 0, 0))
        assert is_homomorphism(h, P2, TWO) and not is_proper(h)

    def test_evaluation_is_proper(self):
        SA = star_of_bundle(Bundle(FinitePoset.antichain(2), (2, 1)))
        for x in range(2):
            h = ev(SA, x)
            assert is_homomorphism(h, h.source, h.target) and is_proper(h)

    def test_non_homomorphism(self, P2):
        # collapsing the atoms is fine; sending only t2 to itself is not (t2∨t1 = t1)
        assert is_homomorphism((0, 1, 1), P2, P2)
        assert not is_homomorphism((0, 0, 2), P2, P2)

    def test_composition(self, P2):
        swap = SkewHom(P2, P2, (0, 2, 1))
        assert compose(swap, swap) == identity_hom(P2)

    def test_proper_homs_to_two_examples(self):
        assert [h.map for h in enumerate_proper_homs_to_2(TWO)] == [(0, 1)]
        assert len(enumerate_proper_homs_to_2(primitive_left(3))) == 1
        SA = star_of_bundle(Bundle(FinitePoset.antichain(2), (1, 1)))
        assert len(enumerate_proper_homs_to_2(SA.algebra)) == 2

    @given(lhsd_algebras())
    def test_proper_homs_match_brute_force(self, S):
        fast = sorted(h.map for h in enumerate_proper_homs_to_2(S, cross_check=False))
        if S.n <= 12:
            assert fast == sorted(brute_force_homs_to_2(S))

    def test_hom_search_counts(self):
        P = primitive_left(2)
        maps = list(iter_homomorphisms(P, P))
        assert (0, 1, 2) in maps and (0, 2, 1) in maps
        assert all(is_homomorphism(m, P, P) for m in maps)


class TestIsomorphism:
    def test_relabelled_copy(self):
        S = partial_function_algebra(2, 1)
        perm = np.array([0, 3, 1, 2])
        inv = np.argsort(perm)
        T = FiniteSkewLattice(perm[S.meet[np.ix_(inv, inv)]], perm[S.join[np.ix_(inv, inv)]], 0)
        h = find_isomorphism(S, T)
        assert h is not None and is_homomorphism(h, S, T)

    def test_left_and_right_primitives_differ(self):
        assert find_isomorphism(primitive_left(2), primitive_right(2)) is None
