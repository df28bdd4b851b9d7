"""Sequence engine: polarization ⊗ x-pointer ⊗ y-pointer under Von Neumann couplings.

Each pure branch is an amplitude tensor ``amp[s, i, j]`` over polarization
``s ∈ {H, V}`` and the two pointer grids. Mixed inputs are carried as a
convex combination of pure branches; every reported quantity is linear in
the input density matrix, so no density-tensor evolution is needed.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Literal, Optional, Sequence, Tuple, Union

import numpy as np

from . import kernels
from .errors import (
    ConfigurationError,
    GridSupportError,
    InvalidSequenceError,
    LeakageBudgetError,
    VanishingPostselectionError,
)
from .pointer import PointerGrid, gaussian_samples
from .polarization import DensityMatrix, Observable, PolarizationState

Axis = Literal["x", "y"]
Normalization = Literal["unnormalized", "conditional"]
NORMALIZATIONS = ("unnormalized", "conditional")

DEFAULT_LEAKAGE_BUDGET = 1e-9
_AXIS_INDEX = {"x": 0, "y": 1}


@dataclass(frozen=True)
class MeasurementStep:
    observable: Observable
    axis: Axis
    delta: float  # µm

    def __post_init__(self):
        if not self.observable.is_projector:
            raise InvalidSequenceError("weak measurement steps must couple a projector")
        if self.axis not in _AXIS_INDEX:
            raise InvalidSequenceError(f"axis must be 'x' or 'y', got {self.axis!r}")
        if not self.delta > 0:
            raise InvalidSequenceError(f"coupling shift must be positive, got {self.delta}")


@dataclass(frozen=True)
class SequencePlan:
    """Ordered weak couplings, an optional final strong projector and a readout.

    ``readout_powers`` defaults to power 1 on every coupled axis.
    """

    steps: Tuple[MeasurementStep, ...]
    final_strong: Optional[Observable] = None
    readout_powers: Optional[Tuple[int, int]] = None
    normalization: Normalization = "unnormalized"

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        axes = [s.axis for s in self.steps]
        if len(set(axes)) != len(axes):
            raise InvalidSequenceError("each pointer axis can be coupled at most once")
        if self.final_strong is not None and not self.final_strong.is_projector:
            raise InvalidSequenceError("final strong measurement must be a projector")
        if self.normalization not in NORMALIZATIONS:
            raise InvalidSequenceError(f"unknown normalization {self.normalization!r}")
        if self.readout_powers is not None and any(p not in (0, 1) for p in self.readout_powers):
            raise InvalidSequenceError("readout powers must be 0 or 1")

    @property
    def powers(self) -> Tuple[int, int]:
        if self.readout_powers is not None:
            return tuple(self.readout_powers)
        axes = {s.axis for s in self.steps}
        return (int("x" in axes), int("y" in axes))

    def delta_on(self, axis: Axis) -> float:
        for s in self.steps:
            if s.axis == axis:
                return s.delta
        return 0.0


@dataclass(frozen=True)
class CorrelatorResult:
    value: float
    raw_moment: float
    prob_K: Optional[float]
    leakage: float


@dataclass(frozen=True, eq=False)
class LabState:
    branches: Tuple[Tuple[float, np.ndarray], ...]
    grid_x: PointerGrid
    grid_y: PointerGrid
    leakage: float = 0.0
    consumed: frozenset = field(default_factory=frozenset)
    projected: bool = False
    leakage_budget: float = DEFAULT_LEAKAGE_BUDGET

    @property
    def total_probability(self) -> float:
        return float(sum(w * np.vdot(a, a).real for w, a in self.branches))


def _pure_branches(system) -> list:
    if isinstance(system, PolarizationState):
        return [(1.0, system.vector)]
    if isinstance(system, DensityMatrix):
        evals, evecs = np.linalg.eigh(system.entries)
        return [
            (float(w), evecs[:, k])
            for k, w in enumerate(np.clip(evals, 0.0, None))
            if w > 1e-15
        ]
    raise ConfigurationError(f"unsupported system input {type(system).__name__}")


def init_lab_state(
    system: Union[PolarizationState, DensityMatrix],
    grid_x: PointerGrid,
    grid_y: PointerGrid,
    sigma: float,
    max_shift: Tuple[float, float] = (0.0, 0.0),
    leakage_budget: float = DEFAULT_LEAKAGE_BUDGET,
) -> LabState:
    """Product state ``ρ ⊗ ψ(x)ψ(y)``; mixed inputs are eigen-decomposed into branches.

    ``max_shift`` is the total shift (µm) later applied on each axis and is
    only used to check that the grids have enough support.
    """
    for grid, shift, name in ((grid_x, max_shift[0], "x"), (grid_y, max_shift[1], "y")):
        need = 8.0 * sigma + shift
        if grid.extent < need:
            raise GridSupportError(
                f"{name} grid extent {grid.extent} µm < 8σ + shift = {need} µm"
            )
    pointer = np.multiply.outer(gaussian_samples(grid_x, sigma), gaussian_samples(grid_y, sigma))
    branches = tuple(
        (w, np.ascontiguousarray(np.multiply.outer(vec, pointer), dtype=np.complex128))
        for w, vec in _pure_branches(system)
    )
    return LabState(branches, grid_x, grid_y, leakage_budget=leakage_budget)


def couple(state: LabState, step: MeasurementStep, allow_axis_reuse: bool = False) -> LabState:
    """Apply ``U = (1 - P) ⊗ 1 + P ⊗ T(δ)`` on the step's pointer axis."""
    if step.axis in state.consumed and not allow_axis_reuse:
        raise InvalidSequenceError(f"pointer axis {step.axis!r} already coupled")
    axis = _AXIS_INDEX[step.axis]
    grid = state.grid_x if axis == 0 else state.grid_y
    steps = grid.steps_for(step.delta)
    if abs(steps) >= grid.count:
        raise GridSupportError(f"shift of {steps} steps leaves the {grid.count}-point grid")
    proj = np.ascontiguousarray(step.observable.entries)
    new_branches = []
    leak = 0.0
    for w, amp in state.branches:
        out, lost = kernels.couple_axis(amp, proj, steps, axis)
        new_branches.append((w, out))
        leak += w * lost
    total = state.leakage + leak
    if total > state.leakage_budget:
        raise LeakageBudgetError(
            f"pointer leakage {total:.3e} exceeds budget {state.leakage_budget:.1e}"
        )
    return replace(
        state,
        branches=tuple(new_branches),
        leakage=total,
        consumed=state.consumed | {step.axis},
    )


def strong_project(state: LabState, K: Observable) -> LabState:
    """Project the polarization onto ``K`` without renormalizing."""
    if not K.is_projector:
        raise InvalidSequenceError("strong measurement needs a projector")
    k = K.entries
    branches = tuple(
        (w, np.ascontiguousarray(np.einsum("st,tij->sij", k, amp))) for w, amp in state.branches
    )
    return replace(state, branches=branches, projected=True)


def readout(
    state: LabState,
    jx: int,
    jy: int,
    delta: Union[float, Tuple[float, float]],
    normalization: Normalization = "unnormalized",
) -> CorrelatorResult:
    """Joint pointer moment ``Σ x^jx y^jy Prob(x, y[, K]) / δ^(jx+jy)``.

    ``delta`` may be a pair ``(δx, δy)`` when the two couplings differ.
    In conditional mode the result is further divided by the total
    surviving probability.
    """
    if jx not in (0, 1) or jy not in (0, 1):
        raise ConfigurationError("readout powers must be 0 or 1")
    if normalization not in NORMALIZATIONS:
        raise ConfigurationError(f"unknown normalization {normalization!r}")
    dx, dy = (delta, delta) if np.isscalar(delta) else delta
    if (jx and not dx > 0) or (jy and not dy > 0):
        raise ConfigurationError("readout delta must be positive")
    xs, ys = state.grid_x.points, state.grid_y.points
    raw = sum(w * kernels.joint_moment(amp, xs, ys, jx, jy) for w, amp in state.branches)
    value = raw / (dx**jx * dy**jy)
    prob = state.total_probability
    if normalization == "conditional":
        if prob < 1e-15:
            raise VanishingPostselectionError(
                f"postselection probability {prob:.3e} too small to condition on"
            )
        value /= prob
    return CorrelatorResult(
        value=float(value),
        raw_moment=float(raw),
        prob_K=prob if state.projected else None,
        leakage=state.leakage,
    )


def default_grids() -> Tuple[PointerGrid, PointerGrid]:
    g = PointerGrid()
    return g, g


def run_sequence(
    plan: SequencePlan,
    system: Union[PolarizationState, DensityMatrix],
    sigma: float,
    grids: Optional[Sequence[PointerGrid]] = None,
    leakage_budget: float = DEFAULT_LEAKAGE_BUDGET,
) -> CorrelatorResult:
    """Initialize, couple in plan order, optionally project strongly, read out."""
    grid_x, grid_y = grids if grids is not None else default_grids()
    shifts = (plan.delta_on("x"), plan.delta_on("y"))
    state = init_lab_state(system, grid_x, grid_y, sigma, shifts, leakage_budget)
    for step in plan.steps:
        state = couple(state, step)
    if plan.final_strong is not None:
        state = strong_project(state, plan.final_strong)
    jx, jy = plan.powers
    return readout(
        state,
        jx,
        jy,
        (shifts[0] or 1.0, shifts[1] or 1.0),
        plan.normalization,
    )
