"""Closed-form correlators used as oracles for the grid engine.

Notes
-----
The weak-limit value of an N-pointer correlator is
``Tr[ρ · {{…{A_N, A_{N-1}}, …}, A_1}] / 2^(N-1)``. When the last
measurement is a strong projector ``Π`` the same expression holds with
``A_N = Π``: the projection enters the pointer moment linearly, so the
derivation for a weak last step carries over unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, InvalidSequenceError
from .polarization import (
    PI_D,
    PI_H,
    DensityMatrix,
    Observable,
    ThetaConvention,
    nested_anticommutator,
    prepare_theta,
)

ORDER_HD = "HD"
ORDER_DH = "DH"
ORDER_HD_STRONG_H = "HD_PiH"
ORDER_DH_STRONG_H = "DH_PiH"


@dataclass(frozen=True)
class WeakCorrelatorSpec:
    rho: DensityMatrix
    observables: Sequence[Observable]  # first measured first
    strong_last: bool = False

    def __post_init__(self):
        object.__setattr__(self, "observables", tuple(self.observables))
        if len(self.observables) < 2:
            raise InvalidSequenceError("a correlator needs at least two observables")
        if self.strong_last and not self.observables[-1].is_projector:
            raise InvalidSequenceError("strong last measurement must be a projector")


def _real(z: complex, what: str) -> float:
    if abs(z.imag) > 1e-12:
        raise ArithmeticError(f"{what} has non-negligible imaginary part {z.imag!r}")
    return float(z.real)


def _as_matrix(rho) -> np.ndarray:
    return rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)


def weak_correlator(spec: WeakCorrelatorSpec) -> float:
    mats = [o.entries for o in spec.observables]
    nested = nested_anticommutator(mats)
    n = len(mats)
    return _real(np.trace(_as_matrix(spec.rho) @ nested) / 2 ** (n - 1), "weak correlator")


def pointer_overlap(delta: float, sigma: float) -> float:
    """``G = exp(-δ²/8σ²)``: overlap of two Gaussian pointers displaced by δ."""
    if not sigma > 0:
        raise ConfigurationError(f"sigma must be positive, got {sigma}")
    return float(np.exp(-(delta**2) / (8.0 * sigma**2)))


def exact_pair_correlator(
    rho: DensityMatrix, A1: Observable, A2: Observable, delta: float, sigma: float
) -> float:
    """Exact ``<x y>/δ²`` for a projector A1 on x followed by A2 on y, Gaussian pointers.

    In the eigenbasis ``{a}`` of A1 the value is
    ``Σ ((a+a')/2) (A2)_{aa'} ρ_{a'a} exp(-δ²(a-a')²/8σ²)``; only the first
    coupling's pointer overlap enters, because A2 is read out linearly.
    """
    if not A1.is_projector:
        raise ConfigurationError("exact pair correlator needs a projector as first observable")
    if not sigma > 0:
        raise ConfigurationError(f"sigma must be positive, got {sigma}")
    evals, basis = np.linalg.eigh(A1.entries)
    a = np.round(evals.real)
    r = basis.conj().T @ _as_matrix(rho) @ basis
    b = basis.conj().T @ A2.entries @ basis
    diff = a[:, None] - a[None, :]
    weights = 0.5 * (a[:, None] + a[None, :]) * np.exp(-(delta**2) * diff**2 / (8.0 * sigma**2))
    # Σ_{a,a'} w_{aa'} B_{aa'} ρ_{a'a}
    return _real(np.sum(weights * b * r.T), "exact pair correlator")


def _cs(theta: float, convention: ThetaConvention):
    st = prepare_theta(theta, convention)
    return st.amp_H.real, st.amp_V.real


def curve_two(theta: float, convention: ThetaConvention = "hwp") -> dict:
    """Weak-limit ``<xy>/δ²`` for both two-measurement orderings (they coincide)."""
    c, s = _cs(theta, convention)
    v = 0.5 * c * (c + s)
    return {ORDER_DH: v, ORDER_HD: v}


def curve_three(order: str, theta: float, convention: ThetaConvention = "hwp") -> float:
    """Weak-limit three-measurement value for a pure input at ``theta``."""
    c, s = _cs(theta, convention)
    if order == ORDER_HD_STRONG_H:
        return 0.25 * (2.0 * c * c + c * s)
    if order == ORDER_DH_STRONG_H:
        return 0.5 * c * (c + s)
    raise ConfigurationError(f"unknown three-measurement ordering {order!r}")


def curve_three_difference(theta: float, convention: ThetaConvention = "hwp") -> float:
    """``value(H,D,Π_H) - value(D,H,Π_H)`` in the weak limit: ``-⅛ sin(2·angle)``."""
    angle = 2.0 * theta if convention == "hwp" else theta
    return -0.125 * float(np.sin(np.deg2rad(2.0 * angle)))


def curve_three_mixed(theta: float) -> float:
    """Both orderings on ``ρ(θ) = diag(sin²θ, cos²θ)``: ``sin²θ / 2``."""
    return 0.5 * float(np.sin(np.deg2rad(theta)) ** 2)


def ordering_observables(order: str):
    """Measured observables (first to last) for a named ordering."""
    table = {
        ORDER_HD: (PI_H, PI_D),
        ORDER_DH: (PI_D, PI_H),
        ORDER_HD_STRONG_H: (PI_H, PI_D, PI_H),
        ORDER_DH_STRONG_H: (PI_D, PI_H, PI_H),
    }
    try:
        return table[order]
    except KeyError:
        raise ConfigurationError(f"unknown ordering {order!r}") from None
