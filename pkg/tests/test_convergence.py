from hypothesis import given, settings

import pytest

from excouple.abgroup import GroupHom, PresentedGroup
from excouple.convergence import (
    ConvergenceError,
    abutment_level,
    filtration,
    gamma,
    gamma_reports,
    gamma_well_defined,
    mittag_leffler,
    re_infinity_check,
    verdict,
)
from excouple.fixtures import dga_torsion, sphere2, three_layer_d2, torus
from excouple.tower import from_filtered_complex, lim_couple, quotient_tower_couple, reindex

from oracles import graded_total_homology
from strategies import filtered_complexes


def test_colim_filtration_of_sphere():
    cp = from_filtered_complex(sphere2())
    assert abutment_level(cp) == -2
    f = filtration(cp, 2)
    assert f.group.invariants() == (1, ())
    assert f.is_decreasing()
    assert f.graded(-2).group.invariants() == (1, ())
    assert f.graded(-1).group.invariants() == (0, ())


def test_verdict_routes():
    v = verdict(from_filtered_complex(sphere2()))
    assert v.strong and v.route == ("(a)", "(b)", "(d)") and v.gamma_iso
    w = verdict(lim_couple(sphere2()))
    assert w.strong and w.route == ("(i)",)


def test_relabelled_colim_tower_is_not_a_lim_tower():
    v = verdict(reindex(from_filtered_complex(sphere2()), "colim", "lim"))
    assert not v.strong
    assert any("not a lim-tower" in n for n in v.notes)


def test_torsion_gamma():
    cp = from_filtered_complex(dga_torsion().W)
    f = filtration(cp, 2)
    G, gr, einf = gamma(cp, f, 1)
    assert gr.group.invariants() == einf.group.invariants() == (0, (2,))
    assert gamma_well_defined(cp, f, 1) == []


def test_verdict_needs_level_one():
    with pytest.raises(ConvergenceError):
        verdict(from_filtered_complex(three_layer_d2()).derived(2))


def test_stabilization_report():
    rep = re_infinity_check(from_filtered_complex(three_layer_d2()))
    assert rep.max_page() == 3


def test_mittag_leffler_certificate():
    Z = PresentedGroup.free(1)
    two = GroupHom(Z, Z, ((2,),))
    cert = mittag_leffler([Z, Z, Z], [two, two], above="zero")
    assert cert.lim1_zero
    assert cert.stable_after[0] == 3
    cert = mittag_leffler([Z, Z, Z], [two, GroupHom.identity(Z)], above="identity")
    assert cert.stable_after[0] == 1
    with pytest.raises(ConvergenceError):
        mittag_leffler([Z, Z], [])


@settings(max_examples=40, deadline=None)
@given(filtered_complexes())
def test_gamma_is_an_isomorphism_on_bounded_input(C):
    for cp in (from_filtered_complex(C), lim_couple(C)):
        for g in gamma_reports(cp):
            assert g.injective and g.surjective and g.well_defined


@settings(max_examples=40, deadline=None)
@given(filtered_complexes())
def test_colim_graded_pieces_match_chain_level(C):
    cp = from_filtered_complex(C)
    for n in C.degrees():
        f = filtration(cp, n)
        chain = graded_total_homology(C, n)
        for q in f.levels():
            assert f.graded(q).group.invariants() == chain.get(q, (0, ()))


@settings(max_examples=30, deadline=None)
@given(filtered_complexes())
def test_lim_verdict_on_quotient_tower(C):
    v = verdict(reindex(quotient_tower_couple(C), "colim", "lim"))
    assert v.strong and v.gamma_iso


def test_torus_filtration():
    cp = from_filtered_complex(torus().Y)
    f = filtration(cp, 1)
    assert f.group.invariants() == (2, ())
    nonzero = {q: f.graded(q).group.invariants() for q in f.levels() if f.graded(q).group.ngens}
    assert nonzero == {-1: (2, ())}  # the 1-skeleton sits at level -1
