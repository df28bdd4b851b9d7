"""Polarization qubit: states, projectors, waveplates and anti-commutators.

The computational basis is ``(|H>, |V>)``. Angles are taken in degrees at
every public entry point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Sequence, Union

import numpy as np

from .errors import ConfigurationError, InvalidSequenceError

ThetaConvention = Literal["hwp", "polarization"]
THETA_CONVENTIONS = ("hwp", "polarization")

_HERMITIAN_TOL = 1e-12
_PROJECTOR_TOL = 1e-10


@dataclass(frozen=True)
class PolarizationState:
    """Pure polarization ket ``amp_H |H> + amp_V |V>``."""

    amp_H: complex
    amp_V: complex

    def __post_init__(self):
        norm = abs(self.amp_H) ** 2 + abs(self.amp_V) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise ConfigurationError(f"polarization state not normalized (norm^2={norm!r})")

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.amp_H, self.amp_V], dtype=complex)

    def density(self) -> "DensityMatrix":
        v = self.vector
        return DensityMatrix(np.outer(v, v.conj()))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    entries: np.ndarray

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        if m.shape != (2, 2):
            raise ConfigurationError(f"density matrix must be 2x2, got {m.shape}")
        if not np.allclose(m, m.conj().T, atol=_HERMITIAN_TOL, rtol=0):
            raise ConfigurationError("density matrix is not Hermitian")
        if abs(np.trace(m).real - 1.0) > 1e-12:
            raise ConfigurationError(f"density matrix trace {np.trace(m).real!r} != 1")
        if np.linalg.eigvalsh(m).min() < -1e-12:
            raise ConfigurationError("density matrix has a negative eigenvalue")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)


@dataclass(frozen=True, eq=False)
class Observable:
    entries: np.ndarray
    is_projector: bool = False
    label: str = field(default="", compare=False)

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        if m.shape != (2, 2):
            raise ConfigurationError(f"observable must be 2x2, got {m.shape}")
        if not np.allclose(m, m.conj().T, atol=_HERMITIAN_TOL, rtol=0):
            raise ConfigurationError("observable is not Hermitian")
        if self.is_projector and not np.allclose(m @ m, m, atol=_PROJECTOR_TOL, rtol=0):
            raise ConfigurationError("observable flagged as projector is not idempotent")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)


@dataclass(frozen=True)
class WaveplateElement:
    kind: Literal["half-wave", "quarter-wave"]
    fast_axis_angle: float  # degrees

    def __post_init__(self):
        if self.kind not in ("half-wave", "quarter-wave"):
            raise ConfigurationError(f"unknown waveplate kind {self.kind!r}")


MatrixLike = Union[Observable, DensityMatrix, np.ndarray]


def _mat(a: MatrixLike) -> np.ndarray:
    if isinstance(a, (Observable, DensityMatrix)):
        return a.entries
    return np.asarray(a, dtype=complex)


def _rotation(phi_rad: float) -> np.ndarray:
    c, s = np.cos(phi_rad), np.sin(phi_rad)
    return np.array([[c, -s], [s, c]], dtype=complex)


def prepare_theta(theta: float, convention: ThetaConvention = "hwp") -> PolarizationState:
    """Linear polarization state set by the preparation angle ``theta`` (degrees).

    With ``convention="hwp"`` theta is the half-wave plate angle after a
    horizontal polarizer, so the ket is ``cos(2θ)|H> + sin(2θ)|V>``. With
    ``"polarization"`` theta is the polarization angle itself.
    """
    if convention == "hwp":
        angle = 2.0 * np.deg2rad(theta)
    elif convention == "polarization":
        angle = np.deg2rad(theta)
    else:
        raise ConfigurationError(f"unknown theta convention {convention!r}")
    c, s = float(np.cos(angle)), float(np.sin(angle))
    # renormalize away the last-ulp drift of cos^2 + sin^2
    n = np.hypot(c, s)
    return PolarizationState(complex(c / n), complex(s / n))


def prepare_mixed(theta: float) -> DensityMatrix:
    """Incoherent mixture ``sin²θ |H><H| + cos²θ |V><V|``."""
    t = np.deg2rad(theta)
    return DensityMatrix(np.diag([np.sin(t) ** 2, np.cos(t) ** 2]).astype(complex))


def projector_at(phi: float) -> Observable:
    """Projector onto linear polarization at angle ``phi`` degrees from H."""
    t = np.deg2rad(phi)
    v = np.array([np.cos(t), np.sin(t)], dtype=complex)
    return Observable(np.outer(v, v.conj()), is_projector=True, label=f"pi({phi:g})")


PI_H = projector_at(0.0)
PI_V = projector_at(90.0)
PI_D = projector_at(45.0)
PI_A = projector_at(135.0)
IDENTITY = Observable(np.eye(2, dtype=complex), is_projector=True, label="I")


def waveplate_jones(element: WaveplateElement) -> np.ndarray:
    """Jones matrix ``R(φ)·diag(1, e^{iΓ})·R(-φ)`` with Γ = π or π/2."""
    phi = np.deg2rad(element.fast_axis_angle)
    retarder = np.diag([1.0, -1.0 if element.kind == "half-wave" else 1j]).astype(complex)
    return _rotation(phi) @ retarder @ _rotation(-phi)


def depolarizer_average(
    state: PolarizationState, samples: int, output_qwp: float = 45.0
) -> DensityMatrix:
    """Time-average of ``QWP(45°) -> HWP(φ) -> QWP(output_qwp)`` over a spinning HWP.

    ``samples`` HWP angles are spaced uniformly over ``[0°, 180°)``. With
    both quarter-wave plates at 45° the sandwich is a variable retarder with
    H/V eigen-axes, so the average removes all H-V coherence. With the
    output plate at 0° or 90° the retarder axes are D/A instead and the H/V
    populations are flattened to 1/2.
    """
    if samples < 2:
        raise ConfigurationError("depolarizer_average needs at least 2 samples")
    q_in = waveplate_jones(WaveplateElement("quarter-wave", 45.0))
    q_out = waveplate_jones(WaveplateElement("quarter-wave", output_qwp))
    v = state.vector
    acc = np.zeros((2, 2), dtype=complex)
    for phi in 180.0 * np.arange(samples) / samples:
        out = q_out @ waveplate_jones(WaveplateElement("half-wave", phi)) @ q_in @ v
        acc += np.outer(out, out.conj())
    acc /= samples
    # exact Hermitian, unit-trace representative of the average
    acc = 0.5 * (acc + acc.conj().T)
    acc /= np.trace(acc).real
    return DensityMatrix(acc)


def mixed_state_deviation(
    theta: float, convention: ThetaConvention = "hwp", samples: int = 10_000
) -> float:
    """Largest diagonal mismatch between the depolarized ``|θ>`` and ``prepare_mixed(θ)``."""
    avg = depolarizer_average(prepare_theta(theta, convention), samples)
    target = prepare_mixed(theta)
    return float(np.max(np.abs(np.diag(avg.entries) - np.diag(target.entries))))


def anticommutator(a: MatrixLike, b: MatrixLike) -> np.ndarray:
    a, b = _mat(a), _mat(b)
    return a @ b + b @ a


def nested_anticommutator(observables: Sequence[MatrixLike]) -> np.ndarray:
    """``{{…{{A_N, A_{N-1}}, A_{N-2}}, …}, A_1}`` for ``[A_1, …, A_N]``.

    ``A_1`` is the first measured observable and sits in the outermost
    bracket; the last two measured form the innermost one.
    """
    if len(observables) < 2:
        raise InvalidSequenceError("nested anti-commutator needs at least two observables")
    mats = [_mat(a) for a in observables]
    acc = anticommutator(mats[-1], mats[-2])
    for m in reversed(mats[:-2]):
        acc = anticommutator(acc, m)
    return acc
