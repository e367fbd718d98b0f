from hypothesis import given, settings

import pytest

from excouple.abgroup import PresentedGroup
from excouple.couple import (
    Bidegree,
    BidegreeMismatch,
    CoupleError,
    ExactCouple,
    cycles_boundaries,
    derive,
    e_infinity,
    global_stabilization_page,
    is_valid,
    page,
    stabilization_bound,
    stabilization_page,
    validate,
    zb_subquotient,
)
from excouple.fixtures import dga_torsion, sphere2, three_layer_d2
from excouple.abgroup import GroupHom
from excouple.tower import from_filtered_complex

from strategies import filtered_complexes


def test_bidegree_addition():
    assert Bidegree(1, 2) + (3, -1) == Bidegree(4, 1)


def test_empty_couple_is_valid():
    cp = ExactCouple({}, {}, {}, {}, {})
    assert validate(cp) == [] and is_valid(cp)
    assert global_stabilization_page(cp) == 1


def test_map_with_wrong_groups_is_rejected():
    Z = PresentedGroup.free(1)
    with pytest.raises(BidegreeMismatch):
        ExactCouple({(0, 0): Z}, {(0, 0): Z}, {}, {}, {(0, 0): GroupHom.identity(Z)})


def test_page_index_checks():
    cp = from_filtered_complex(sphere2())
    with pytest.raises(CoupleError):
        page(cp, 0)
    with pytest.raises(CoupleError):
        page(cp.derived(2), 1)


def test_torsion_page():
    cp = from_filtered_complex(dga_torsion().W)
    P2 = page(cp, 2)
    assert P2.group(2, 1).invariants() == (0, (2,))
    assert P2.group(3, 0).invariants() == (0, ())
    assert stabilization_page(cp, 2, 1) == 2
    assert e_infinity(cp, 2, 1).group.invariants() == (0, (2,))


def test_three_layer_stabilizes_at_three():
    cp = from_filtered_complex(three_layer_d2())
    assert global_stabilization_page(cp) == 3
    assert page(cp, 3).group(2, 0).invariants() == (0, ())
    assert page(cp, 3).group(1, 1).invariants() == (1, ())


def test_derive_twice_matches_derived():
    cp = from_filtered_complex(three_layer_d2())
    assert derive(derive(cp)).level == 3
    assert cp.derived(3) is cp.derived(3)


@settings(max_examples=40, deadline=None)
@given(filtered_complexes())
def test_derived_couples_stay_exact(C):
    cp = from_filtered_complex(C)
    for r in range(1, 4):
        assert validate(cp.derived(r)) == []


@settings(max_examples=40, deadline=None)
@given(filtered_complexes())
def test_pages_are_z_mod_b(C):
    cp = from_filtered_complex(C)
    for r in range(1, 5):
        P = page(cp, r)
        for b in cp.E:
            assert P.group(*b).invariants() == zb_subquotient(cp, r, *b).group.invariants()


@settings(max_examples=40, deadline=None)
@given(filtered_complexes())
def test_differential_squares_to_zero(C):
    cp = from_filtered_complex(C)
    for r in range(1, 4):
        c = cp.derived(r)
        for b in c.E:
            d = c.differential(*b)
            dd = c.differential(b.p - 1, b.q + r)
            assert dd.compose(d).is_zero()


@settings(max_examples=40, deadline=None)
@given(filtered_complexes())
def test_zb_lattices_are_nested_and_stabilize(C):
    from excouple.abgroup import is_subgroup
    cp = from_filtered_complex(C)
    bound = stabilization_bound(cp)
    for b in cp.E:
        G = cp.e_group(*b)
        prevZ, prevB = None, None
        for r in range(1, bound + 1):
            Z, B = cycles_boundaries(cp, r, *b)
            assert is_subgroup(G, B, Z)
            if prevZ is not None:
                assert is_subgroup(G, Z, prevZ) and is_subgroup(G, prevB, B)
            prevZ, prevB = Z, B
        assert stabilization_page(cp, *b) <= bound


@settings(max_examples=30, deadline=None)
@given(filtered_complexes())
def test_lift_and_project_are_inverse(C):
    cp = from_filtered_complex(C)
    for r in (2, 3):
        P = page(cp, r)
        for b in P.support():
            for x in P.group(*b).basis():
                z = P.lift_to_e1(*b, x)
                assert tuple(P.proj_from_e1(*b, z)) == tuple(P.group(*b).reduce(x))
