import pytest
from hypothesis import given

from skewcat.bundles import (
    Bundle,
    Section,
    compose_morphisms,
    direct_image,
    enumerate_sheaf_morphisms,
    from_natural_transformation,
    identity_morphism,
    is_natural,
    override,
    patch,
    restrict,
    restriction,
    sections_over,
    to_natural_transformation,
)
from skewcat.errors import IncompatibleFamily, NotSubdownset, TableError
from skewcat.order import FinitePoset, MonotoneMap, identity_map, iter_monotone_maps

from conftest import bundles

CHAIN2 = FinitePoset.chain(2)
ONE = FinitePoset.antichain(1)


def S(*vals):
    return Section(tuple(vals))


class TestSections:
    def test_empty_domain_has_one_section(self):
        B = Bundle(CHAIN2, (2, 2))
        assert sections_over(B, 0) == [Section.empty(2)]

    def test_counts(self):
        assert len(sections_over(Bundle(ONE, (2,)), 1)) == 2
        assert len(sections_over(Bundle(FinitePoset.antichain(2), (2, 3)), 3)) == 6

    def test_domain_must_be_downset(self):
        with pytest.raises(NotSubdownset):
            sections_over(Bundle(CHAIN2, (1, 1)), 0b10)

    def test_empty_stalk_rejected(self):
        with pytest.raises(TableError):
            Bundle(ONE, (0,))

    def test_json_shape(self):
        assert S(1, -1, 0).to_json() == {"domain": [0, 2], "values": {"0": 1, "2": 0}}


class TestRestrictPatch:
    def test_restrict(self):
        s = S(1, 0)
        assert restrict(s, 0b11) == s
        assert restrict(s, 0) == Section.empty(2)
        assert restrict(s, 0b01) == S(1, -1)

    def test_restrict_outside_domain(self):
        with pytest.raises(NotSubdownset):
            restrict(S(1, -1), 0b10)

    def test_patch(self):
        assert patch([], 2) == Section.empty(2)
        assert patch([S(1, -1)]) == S(1, -1)
        assert patch([S(1, -1, -1), S(1, -1, 0)]) == S(1, -1, 0)

    def test_incompatible(self):
        with pytest.raises(IncompatibleFamily) as info:
            patch([S(0, 1), S(0, 0)])
        assert (info.value.i, info.value.j, info.value.x) == (0, 1, 1)

    def test_override_and_restriction(self):
        a, b = S(0, 1, -1), S(1, -1, 0)
        assert override(a, b) == S(1, 1, 0)
        assert restriction(a, b) == S(0, -1, -1)

    @given(bundles())
    def test_patch_of_restrictions(self, B):
        downs = B.base.downsets()
        for s in sections_over(B, B.base.full):
            pieces = [restrict(s, U) for U in downs]
            assert patch(pieces, B.m) == s


class TestDirectImage:
    def test_identity(self):
        B = Bundle(CHAIN2, (2, 1))
        D = direct_image(B, identity_map(CHAIN2))
        for V in CHAIN2.downsets():
            assert D(V) == sections_over(B, V)

    def test_constant_to_point(self):
        B = Bundle(FinitePoset.antichain(2), (2, 2))
        D = direct_image(B, MonotoneMap(B.base, ONE, (0, 0)))
        assert D(1) == sections_over(B, 0b11)
        assert D(0) == [Section.empty(2)]

    @given(bundles(), bundles(2, 1))
    def test_sheaf_condition(self, B, C):
        for f in list(iter_monotone_maps(B.base, C.base))[:4]:
            assert direct_image(B, f).check_sheaf_condition()


class TestMorphisms:
    def test_identity_components(self):
        B = Bundle(CHAIN2, (2, 1))
        comps = to_natural_transformation(identity_morphism(B))
        assert all(t == s for comp in comps.values() for s, t in comp.items())

    def test_empty_component_is_singleton(self):
        B = Bundle(CHAIN2, (2, 2))
        m = enumerate_sheaf_morphisms(B, B)[3]
        assert to_natural_transformation(m)[0] == {Section.empty(2): Section.empty(2)}

    def test_counts(self):
        assert len(enumerate_sheaf_morphisms(Bundle(ONE, (1,)), Bundle(ONE, (1,)))) == 1
        assert len(enumerate_sheaf_morphisms(Bundle(ONE, (2,)), Bundle(ONE, (2,)))) == 4
        assert len(enumerate_sheaf_morphisms(Bundle(ONE, (1,)), Bundle(CHAIN2, (1, 1)))) == 2

    def test_single_point_target(self):
        E, F = Bundle(FinitePoset.antichain(2), (2, 1)), Bundle(ONE, (2,))
        for m in enumerate_sheaf_morphisms(E, F):
            for s, t in to_natural_transformation(m)[1].items():
                assert t.values == tuple(m.fiber_maps[x][s.values[0]] for x in range(2))

    def test_fiber_map_validation(self):
        E, F = Bundle(ONE, (1,)), Bundle(ONE, (2,))
        with pytest.raises(TableError):
            identity_morphism(E).__class__(E, F, (0,), ((0,),))

    @given(bundles(2, 2), bundles(2, 2))
    def test_natural_round_trip(self, E, F):
        for m in enumerate_sheaf_morphisms(E, F)[:20]:
            comps = to_natural_transformation(m)
            assert is_natural(E, F, m.f, comps)
            assert from_natural_transformation(E, F, m.f, comps) == m

    @given(bundles(2, 2), bundles(2, 2), bundles(2, 2))
    def test_composition_matches_components(self, E, F, G):
        for m in enumerate_sheaf_morphisms(E, F)[:6]:
            for n in enumerate_sheaf_morphisms(F, G)[:6]:
                c = compose_morphisms(m, n)
                for V, comp in to_natural_transformation(c).items():
                    for s, t in comp.items():
                        assert t == m.apply(n.apply(s))

    def test_identity_is_neutral(self):
        E, F = Bundle(CHAIN2, (2, 1)), Bundle(ONE, (2,))
        for m in enumerate_sheaf_morphisms(E, F):
            assert compose_morphisms(identity_morphism(E), m) == m
            assert compose_morphisms(m, identity_morphism(F)) == m
