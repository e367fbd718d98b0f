import pytest
from hypothesis import given, strategies as st

from excouple.fixtures import dga_cube, sphere2, three_layer_d2
from excouple.couple import page
from excouple.signcalc import (
    SignError,
    UnknownConvention,
    boundary_of_boundary,
    boundary_sign,
    canonical_boundary_sign,
    cone,
    convention_sign,
    degree_identity_holds,
    degree_vector,
    disk,
    frame_sign,
    hurewicz_coherent,
    interval,
    leibniz_sign,
    point,
    product,
    shift_couple,
    sphere,
    suspension_iso_sign,
    suspension_shift_check,
)
from excouple.tower import from_filtered_complex


def test_frame_sign_is_permutation_parity():
    ref = ((1, "a"), (1, "b"), (1, "c"))
    assert frame_sign(((1, "b"), (1, "a"), (1, "c")), ref) == -1
    assert frame_sign(((1, "b"), (1, "c"), (1, "a")), ref) == 1
    assert frame_sign(((-1, "a"), (1, "b"), (1, "c")), ref) == -1
    with pytest.raises(SignError):
        frame_sign(((1, "a"),), ((1, "b"),))


@given(st.integers(1, 9))
def test_cone_boundary(p):
    (s, face), = boundary_sign(cone(p))
    assert s == (-1) ** (p - 1) == convention_sign("kappa-cone", p)
    assert face.dim == p - 1


def test_interval_and_disk_boundaries():
    assert [s for s, _ in boundary_sign(interval())] == [1, -1]
    assert [s for s, _ in boundary_sign(disk(3))] == [1]
    with pytest.raises(SignError):
        boundary_sign(point("x"))


@pytest.mark.parametrize("p,q", [(p, q) for p in range(2, 6) for q in range(2, 7 - p)])
def test_product_of_disks(p, q):
    signs = {str(c): s for s, c in boundary_sign(product(disk(p, "x"), disk(q, "y")))}
    assert signs == {f"S^{p - 1}xD^{q}": 1, f"D^{p}xS^{q - 1}": (-1) ** p}
    assert not any(boundary_of_boundary(product(disk(p, "x"), disk(q, "y"))).values())


def test_spheres_have_no_boundary_faces():
    assert sphere(3).faces == ()


@given(st.integers(1, 8), st.integers(1, 8))
def test_degree_identity(p, q):
    assert degree_identity_holds(p, q)
    assert leibniz_sign(p) == (-1) ** p


def test_degree_vector_checks():
    with pytest.raises(SignError):
        degree_vector("jk-product", 0, 1)
    with pytest.raises(SignError):
        degree_vector("nonsense", 1, 1)


def test_convention_table():
    assert hurewicz_coherent()
    assert all(canonical_boundary_sign(p) == 1 for p in range(1, 9))
    assert convention_sign("left-suspension") == -1
    assert convention_sign("right-suspension") == 1
    with pytest.raises(UnknownConvention):
        convention_sign("upside-down")


def test_suspension_iso_signs():
    assert [suspension_iso_sign("left", p) for p in range(4)] == [1, -1, 1, -1]
    assert [suspension_iso_sign("right", p) for p in range(4)] == [1, 1, 1, 1]
    with pytest.raises(SignError):
        suspension_iso_sign("middle", 0)


def test_left_shift_negates_d1():
    cp = from_filtered_complex(dga_cube().W)
    sh = shift_couple(cp, "left")
    d, ds = page(cp, 1).differential(5, 0), page(sh, 1).differential(6, 0)
    assert ds.reduced_matrix() == [[-a for a in row] for row in d.reduced_matrix()]


@pytest.mark.parametrize("C", [sphere2(), three_layer_d2(), dga_cube().W], ids=["S2", "three-layer", "dga"])
def test_suspension_shift_check(C):
    rep = suspension_shift_check(from_filtered_complex(C))
    assert rep.passed and rep.pages_checked >= 2
