import numpy as np
import pytest

from oracles import continuum_pair_oracle
from seqweak.errors import ConfigurationError, InvalidSequenceError
from seqweak.polarization import (
    PI_D,
    PI_H,
    DensityMatrix,
    Observable,
    prepare_mixed,
    prepare_theta,
)
from seqweak.weaklimit import (
    ORDER_DH,
    ORDER_DH_STRONG_H,
    ORDER_HD,
    ORDER_HD_STRONG_H,
    WeakCorrelatorSpec,
    curve_three,
    curve_three_difference,
    curve_three_mixed,
    curve_two,
    exact_pair_correlator,
    pointer_overlap,
    weak_correlator,
)

H_RHO = prepare_theta(0.0).density()
D_RHO = prepare_theta(22.5).density()
# nested brackets written out by hand
HDH = np.array([[2, 0.5], [0.5, 0]])
DHH = np.array([[2, 1], [1, 0]])
HD = np.array([[1, 0.5], [0.5, 0]])


def test_weak_correlator_examples():
    assert weak_correlator(WeakCorrelatorSpec(H_RHO, [PI_H, PI_D])) == pytest.approx(
        0.5 * np.trace(H_RHO.entries @ HD).real, abs=1e-15
    )
    assert weak_correlator(WeakCorrelatorSpec(H_RHO, [PI_H, PI_D])) == pytest.approx(0.5, abs=1e-15)
    v = weak_correlator(WeakCorrelatorSpec(D_RHO, [PI_H, PI_D, PI_H], strong_last=True))
    assert v == pytest.approx(0.25 * np.trace(D_RHO.entries @ HDH).real, abs=1e-15)
    assert v == pytest.approx(0.375, abs=1e-15)
    v = weak_correlator(WeakCorrelatorSpec(D_RHO, [PI_D, PI_H, PI_H], strong_last=True))
    assert v == pytest.approx(0.25 * np.trace(D_RHO.entries @ DHH).real, abs=1e-15)
    assert v == pytest.approx(0.5, abs=1e-15)


def test_weak_correlator_validation():
    with pytest.raises(InvalidSequenceError):
        WeakCorrelatorSpec(H_RHO, [PI_H])
    with pytest.raises(InvalidSequenceError):
        WeakCorrelatorSpec(H_RHO, [PI_H, Observable(np.diag([1.0, -1.0]))], strong_last=True)
    with pytest.raises(ConfigurationError):
        Observable(np.array([[0, 1], [0, 0]]))


def test_exact_pair_weak_limit():
    for theta in (0.0, 11.0, 22.5, 70.0):
        rho = prepare_theta(theta).density()
        for a1, a2 in ((PI_H, PI_D), (PI_D, PI_H)):
            weak = weak_correlator(WeakCorrelatorSpec(rho, [a1, a2]))
            assert exact_pair_correlator(rho, a1, a2, 1e-6, 600.0) == pytest.approx(weak, abs=1e-10)


def test_exact_pair_examples():
    for ratio in (0.01, 4 / 15, 1.0, 3.0):
        assert exact_pair_correlator(H_RHO, PI_H, PI_D, ratio * 600, 600) == pytest.approx(0.5, abs=1e-15)
    g = pointer_overlap(160.0, 600.0)
    v = exact_pair_correlator(H_RHO, PI_D, PI_H, 160.0, 600.0)
    assert v == pytest.approx((1 + g) / 4, abs=1e-15)
    assert v == pytest.approx(0.497788, abs=1e-6)
    with pytest.raises(ConfigurationError):
        exact_pair_correlator(H_RHO, PI_D, PI_H, 160.0, 0.0)
    with pytest.raises(ConfigurationError):
        exact_pair_correlator(H_RHO, Observable(np.diag([2.0, 0.0])), PI_H, 160.0, 600.0)


@pytest.mark.parametrize("theta", [0.0, 13.0, 22.5, 50.0])
@pytest.mark.parametrize("ratio", [4 / 15, 0.8])
def test_exact_pair_against_quadrature(theta, ratio):
    rho = prepare_theta(theta).density()
    delta = ratio * 600.0
    for a1, a2 in ((PI_H, PI_D), (PI_D, PI_H)):
        oracle = continuum_pair_oracle(rho.entries, a1.entries, a2.entries, delta, 600.0)
        assert exact_pair_correlator(rho, a1, a2, delta, 600.0) == pytest.approx(oracle, abs=1e-9)


@pytest.mark.parametrize("theta", np.linspace(0, 180, 19))
def test_exact_pair_asymmetry_closed_form(theta):
    rho = prepare_theta(theta).density()
    g = pointer_overlap(160.0, 600.0)
    diff = exact_pair_correlator(rho, PI_H, PI_D, 160.0, 600.0) - exact_pair_correlator(
        rho, PI_D, PI_H, 160.0, 600.0
    )
    t4 = np.deg2rad(4 * theta)
    assert diff == pytest.approx((1 - g) * (np.cos(t4) - np.sin(t4)) / 4, abs=1e-14)
    assert abs(diff) <= (1 - g) * np.sqrt(2) / 4 + 1e-15


@pytest.mark.parametrize(
    "theta, expected", [(0.0, 0.5), (45.0, 0.0), (22.5, 0.5)]
)
def test_curve_two(theta, expected):
    vals = curve_two(theta)
    assert vals[ORDER_HD] == vals[ORDER_DH] == pytest.approx(expected, abs=1e-15)


def test_curves_match_weak_correlator():
    for theta in np.linspace(0, 180, 31):
        rho = prepare_theta(theta).density()
        assert curve_two(theta)[ORDER_HD] == pytest.approx(
            weak_correlator(WeakCorrelatorSpec(rho, [PI_H, PI_D])), abs=1e-12
        )
        assert curve_two(theta)[ORDER_DH] == pytest.approx(
            weak_correlator(WeakCorrelatorSpec(rho, [PI_D, PI_H])), abs=1e-12
        )
        hd = curve_three(ORDER_HD_STRONG_H, theta)
        dh = curve_three(ORDER_DH_STRONG_H, theta)
        assert hd == pytest.approx(weak_correlator(WeakCorrelatorSpec(rho, [PI_H, PI_D, PI_H], True)), abs=1e-12)
        assert dh == pytest.approx(weak_correlator(WeakCorrelatorSpec(rho, [PI_D, PI_H, PI_H], True)), abs=1e-12)
        assert hd - dh == pytest.approx(curve_three_difference(theta), abs=1e-12)


def test_curve_three_examples():
    assert curve_three(ORDER_HD_STRONG_H, 22.5) == pytest.approx(0.375, abs=1e-15)
    assert curve_three(ORDER_DH_STRONG_H, 22.5) == pytest.approx(0.5, abs=1e-15)
    assert curve_three_difference(22.5) == pytest.approx(-0.125, abs=1e-15)
    assert curve_three(ORDER_HD_STRONG_H, 0.0) == curve_three(ORDER_DH_STRONG_H, 0.0) == pytest.approx(0.5)
    assert curve_three_difference(45.0, "polarization") == pytest.approx(-0.125, abs=1e-15)
    with pytest.raises(ConfigurationError):
        curve_three("HD", 0.0)


def test_mixed_inputs_restore_symmetry():
    for theta in np.linspace(0, 180, 31):
        rho = prepare_mixed(theta)
        hd = weak_correlator(WeakCorrelatorSpec(rho, [PI_H, PI_D, PI_H], True))
        dh = weak_correlator(WeakCorrelatorSpec(rho, [PI_D, PI_H, PI_H], True))
        assert hd == pytest.approx(curve_three_mixed(theta), abs=1e-12)
        assert dh == pytest.approx(curve_three_mixed(theta), abs=1e-12)
    assert curve_three_mixed(90.0) == pytest.approx(0.5)


def test_outputs_real_for_complex_inputs(rng):
    for _ in range(50):
        m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        rho = DensityMatrix((m @ m.conj().T) / np.trace(m @ m.conj().T).real)
        obs = []
        for _ in range(3):
            a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            obs.append(Observable(a + a.conj().T))
        v = weak_correlator(WeakCorrelatorSpec(rho, obs))
        assert np.isfinite(v)
