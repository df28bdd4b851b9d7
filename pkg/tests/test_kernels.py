"""The compiled kernels must agree with the numpy fallback."""

import numpy as np
import pytest

from seqweak import _kernels_py, kernels
from seqweak.polarization import projector_at

compiled = pytest.importorskip("seqweak._kernels")


def random_amp(rng, nx=40, ny=33):
    a = rng.normal(size=(2, nx, ny)) + 1j * rng.normal(size=(2, nx, ny))
    return np.ascontiguousarray(a / np.linalg.norm(a))


def elliptical_projector(rng):
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    v /= np.linalg.norm(v)
    return np.outer(v, v.conj())


def test_backend_selected():
    assert kernels.BACKEND in ("python", "cython")


@pytest.mark.parametrize("axis", [0, 1])
@pytest.mark.parametrize("steps", [0, 1, 7, -5, 32])
def test_couple_axis_agrees(rng, axis, steps):
    amp = random_amp(rng)
    proj = elliptical_projector(rng)
    a, la = _kernels_py.couple_axis(amp, proj, steps, axis)
    b, lb = compiled.couple_axis(amp, proj, steps, axis)
    assert np.allclose(a, b, atol=1e-15, rtol=0)
    assert la == pytest.approx(lb, abs=1e-15)
    # norm bookkeeping: the coupling is unitary up to what falls off the grid
    assert np.vdot(a, a).real + la == pytest.approx(1.0, abs=1e-13)


def test_couple_identity_is_pure_shift(rng):
    amp = random_amp(rng)
    out, _ = compiled.couple_axis(amp, np.eye(2), 3, 0)
    assert np.array_equal(out[:, 3:, :], amp[:, :-3, :])
    assert np.all(out[:, :3, :] == 0)


def test_couple_zero_projector_is_identity(rng):
    amp = random_amp(rng)
    out, leak = compiled.couple_axis(amp, projector_at(0.0).entries * 0, 9, 1)
    assert np.array_equal(out, amp) and leak == 0.0


@pytest.mark.parametrize("jx, jy", [(0, 0), (1, 0), (0, 1), (1, 1)])
def test_joint_moment_agrees(rng, jx, jy):
    amp = random_amp(rng)
    xs = np.linspace(-3, 4, amp.shape[1])
    ys = np.linspace(-2, 5, amp.shape[2])
    brute = sum(
        xs[i] ** jx * ys[j] ** jy * abs(amp[s, i, j]) ** 2
        for s in range(2)
        for i in range(amp.shape[1])
        for j in range(amp.shape[2])
    )
    assert _kernels_py.joint_moment(amp, xs, ys, jx, jy) == pytest.approx(brute, abs=1e-13)
    assert compiled.joint_moment(amp, xs, ys, jx, jy) == pytest.approx(brute, abs=1e-13)
