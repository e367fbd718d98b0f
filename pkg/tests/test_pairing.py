import pytest
from hypothesis import given, settings, strategies as st

from excouple.fixtures import (
    counterexample,
    dga_cube,
    dga_torsion,
    point,
    sphere2,
    sphere_unit,
    torus,
)
from excouple.pairing import (
    DerivationViolation,
    DescentRefused,
    FiltrationViolation,
    PagePairing,
    PairingError,
    TowerPairing,
    check_leibniz,
    descend,
    einfinity_pairing,
    gr_compatibility,
    induce_E1,
    render_element,
    run_descent,
    shift_pairing,
    zero_pairing,
)
from excouple.tower import FilteredComplex, from_filtered_complex


def test_render_element():
    assert render_element((2,)) == "2·e"
    assert render_element((-1,)) == "-e"
    assert render_element((0, 0)) == "0"
    assert render_element((1, -3)) == "e0 - 3·e1"


def test_filtration_violation():
    low = FilteredComplex({0: 1}, {}, {0: [-1]})
    # level 0 times level 0 must land in F^0, but the only target sits at level -1
    with pytest.raises(FiltrationViolation):
        TowerPairing(point(), point(), low, {((0, 0), (0, 0)): [1]})
    TowerPairing(point(), point(), point(), {((0, 0), (0, 0)): [1]})


def test_derivation_violation():
    cube = dga_cube().W
    with pytest.raises(DerivationViolation):
        # y = generator in degree 5 has d y = x^2, but the unit is sent to 0
        TowerPairing(point(), cube, cube, {((0, 0), (5, 0)): [1]})


def test_tensor_shape_checked():
    W = from_filtered_complex(sphere2())
    with pytest.raises(PairingError):
        PagePairing(1, W, W, W, {((0, 0), (0, 0)): (((1,), (1,)),)})


@pytest.mark.parametrize("k,l", [(k, l) for k in range(2, 6) for l in range(2, 6)])
def test_counterexample(k, l):
    ce = counterexample(k, l)
    rep = check_leibniz(ce.pairing)
    if l % 2 == 0:
        assert not rep.passed
        w = next(w for w in rep.witnesses if w.at == ce.residual_spot)
        assert tuple(w.residual) == (2,)
        with pytest.raises(DescentRefused):
            descend(ce.pairing)
    else:
        assert rep.passed
        assert run_descent(ce.pairing).complete


def test_counterexample_needs_disks():
    with pytest.raises(ValueError):
        counterexample(1, 2)


def test_dga_descends():
    pp = induce_E1(dga_cube())
    log = run_descent(pp)
    assert log.complete and [r.r for r in log.reports] == [1, 2, 3]
    assert all(r.passed for r in log.reports)


def test_flipped_sign_is_caught():
    pp2 = descend(induce_E1(dga_cube()))
    rep = check_leibniz(pp2, sign=lambda p: -((-1) ** p))
    assert not rep.passed
    assert {tuple(w.residual) for w in rep.witnesses} <= {(2,), (-2,)}


def test_torus_einf_product():
    ei = einfinity_pairing(induce_E1(torus()))
    prods = ei.generator_products()
    top = [v for (b1, b2), rows in prods.items() if b1.p == 1 and b2.p == 1 for row in rows for v in row]
    assert sorted(abs(v[0]) for v in top) == [1]


@pytest.mark.parametrize("tp", [dga_cube(), dga_torsion(), torus(), sphere_unit()],
                         ids=["cube", "torsion", "torus", "sphere"])
def test_gamma_compatibility(tp):
    rep = gr_compatibility(tp)
    assert rep.commutes and rep.checked > 0


@pytest.mark.parametrize("side", ["left", "right"])
def test_shifted_pairing_still_leibniz(side):
    pp = shift_pairing(induce_E1(dga_cube()), side)
    assert run_descent(pp).complete
    ce = shift_pairing(counterexample(3, 3).pairing, side)
    assert run_descent(ce).complete


def test_zero_pairing_descends():
    W = from_filtered_complex(sphere2())
    pp = zero_pairing(W, W, W)
    assert pp.is_zero()
    assert run_descent(pp).complete


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 5), st.integers(2, 5))
def test_counterexample_parity(k, l):
    rep = check_leibniz(counterexample(k, l).pairing)
    assert rep.passed == (l % 2 == 1)
