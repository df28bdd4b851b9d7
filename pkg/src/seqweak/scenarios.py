"""Scenario runner: θ sweeps, convergence studies, summaries and CSV output."""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import ConfigurationError, GridSupportError, VanishingPostselectionError
from .pointer import PointerGrid
from .polarization import (
    THETA_CONVENTIONS,
    DensityMatrix,
    Observable,
    PolarizationState,
    prepare_mixed,
    prepare_theta,
    projector_at,
)
from .vonneumann import (
    NORMALIZATIONS,
    DEFAULT_LEAKAGE_BUDGET,
    MeasurementStep,
    SequencePlan,
    run_sequence,
)
from .weaklimit import (
    ORDER_DH,
    ORDER_DH_STRONG_H,
    ORDER_HD,
    ORDER_HD_STRONG_H,
    WeakCorrelatorSpec,
    exact_pair_correlator,
    weak_correlator,
)

SCENARIOS = ("fig2", "fig3a", "fig3b", "convergence", "custom")
CSV_HEADER = (
    "theta_deg",
    "ordering",
    "value_grid",
    "value_weaklimit",
    "value_exact",
    "prob_K",
    "delta_over_sigma",
)

DEFAULT_ORDERINGS = {
    "fig2": (ORDER_HD, ORDER_DH),
    "fig3a": (ORDER_HD_STRONG_H, ORDER_DH_STRONG_H),
    "fig3b": (ORDER_HD_STRONG_H, ORDER_DH_STRONG_H),
    "convergence": (ORDER_HD_STRONG_H, ORDER_DH_STRONG_H),
    "custom": (ORDER_HD, ORDER_DH),
}
DEFAULT_STRENGTHS = (0.4, 0.2, 0.1, 0.05)

# |value_grid - companion| allowed per scenario, used by the self-check column
SELF_CHECK_TOLERANCE = {"fig2": 0.01, "fig3a": 0.02, "fig3b": 0.005, "custom": 0.02}
EXACT_TOLERANCE = 1e-6

_LETTER_ANGLES = {"H": 0.0, "V": 90.0, "D": 45.0, "A": 135.0}
_NAMED_PLANS = {
    ORDER_HD: "H>D",
    ORDER_DH: "D>H",
    ORDER_HD_STRONG_H: "H>D>!H",
    ORDER_DH_STRONG_H: "D>H>!H",
}


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str = "fig2"
    theta_start: float = 0.0
    theta_end: float = 180.0
    theta_step: float = 6.0
    theta_convention: str = "hwp"
    delta: float = 160.0
    sigma: float = 600.0
    grid_spacing: Optional[float] = None
    grid_count: Optional[int] = None
    normalization: str = "unnormalized"
    orderings: Optional[Tuple[str, ...]] = None
    input: str = "pure"
    strengths: Tuple[float, ...] = DEFAULT_STRENGTHS
    output_path: Optional[str] = None
    self_check: bool = False
    jobs: int = 1
    leakage_budget: float = DEFAULT_LEAKAGE_BUDGET

    def resolved(self) -> "ScenarioConfig":
        """Fill scenario-dependent defaults and validate."""
        cfg = self
        if cfg.scenario not in SCENARIOS:
            raise ConfigurationError(f"unknown scenario {cfg.scenario!r}")
        conv = cfg.scenario == "convergence"
        if cfg.grid_spacing is None:
            cfg = replace(cfg, grid_spacing=10.0 if conv else 20.0)
        if cfg.grid_count is None:
            cfg = replace(cfg, grid_count=1024 if conv else 512)
        if cfg.orderings is None:
            cfg = replace(cfg, orderings=DEFAULT_ORDERINGS[cfg.scenario])
        cfg._validate()
        return cfg

    def _validate(self):
        if not self.theta_step > 0:
            raise ConfigurationError("theta_step must be positive")
        if self.theta_end < self.theta_start:
            raise ConfigurationError("theta_end must not precede theta_start")
        if self.theta_convention not in THETA_CONVENTIONS:
            raise ConfigurationError(f"unknown theta convention {self.theta_convention!r}")
        if self.normalization not in NORMALIZATIONS:
            raise ConfigurationError(f"unknown normalization {self.normalization!r}")
        if self.input not in ("pure", "mixed"):
            raise ConfigurationError(f"input must be 'pure' or 'mixed', got {self.input!r}")
        if not (self.delta > 0 and self.sigma > 0):
            raise ConfigurationError("delta and sigma must be positive")
        if self.jobs < 1:
            raise ConfigurationError("jobs must be >= 1")
        if not self.orderings:
            raise ConfigurationError("at least one ordering is required")
        for label in self.orderings:
            parse_plan_label(label)
        grid = self.grid()
        deltas = (
            [r * self.sigma for r in self.strengths]
            if self.scenario == "convergence"
            else [self.delta]
        )
        if self.scenario == "convergence" and len(self.strengths) < 3:
            raise ConfigurationError("convergence study needs at least 3 strengths")
        for d in deltas:
            if not d > 0:
                raise GridSupportError("zero coupling strength cannot be represented on the grid")
            grid.steps_for(d)
            if grid.extent < 8.0 * self.sigma + 2.0 * d:
                raise GridSupportError(
                    f"grid extent {grid.extent} µm < 8σ + 2δ = {8.0 * self.sigma + 2.0 * d} µm"
                )

    def grid(self) -> PointerGrid:
        return PointerGrid(float(self.grid_spacing), int(self.grid_count))

    def thetas(self) -> List[float]:
        n = int(math.floor((self.theta_end - self.theta_start) / self.theta_step + 1e-9)) + 1
        return [self.theta_start + k * self.theta_step for k in range(n)]


@dataclass(frozen=True)
class SweepRow:
    theta: float
    ordering: str
    value_grid: float
    value_weaklimit: float
    value_exact: Optional[float] = None
    prob_K: Optional[float] = None
    delta_over_sigma: float = 0.0
    self_check: Optional[bool] = field(default=None, compare=False)


@dataclass(frozen=True)
class ParsedPlan:
    weak: Tuple[Observable, ...]
    strong: Optional[Observable]

    @property
    def observables(self) -> Tuple[Observable, ...]:
        return self.weak + ((self.strong,) if self.strong is not None else ())

    def sequence_plan(self, delta: float, normalization: str) -> SequencePlan:
        steps = [MeasurementStep(o, ax, delta) for o, ax in zip(self.weak, "xy")]
        return SequencePlan(steps, final_strong=self.strong, normalization=normalization)


def _projector_token(tok: str) -> Observable:
    tok = tok.strip()
    if tok.upper() in _LETTER_ANGLES:
        return projector_at(_LETTER_ANGLES[tok.upper()])
    try:
        return projector_at(float(tok))
    except ValueError:
        raise ConfigurationError(f"unrecognized projector {tok!r} in plan label") from None


def parse_plan_label(label: str) -> ParsedPlan:
    """Parse a plan label into weak projectors and an optional strong one.

    Named labels (``HD``, ``DH``, ``HD_PiH``, ``DH_PiH``) are accepted, as
    is the step grammar ``A>B[>!K]``: projector letters H/V/D/A or an angle
    in degrees, ``!`` marking the final strong measurement.
    """
    text = _NAMED_PLANS.get(label, label)
    tokens = [t for t in text.split(">") if t.strip()]
    weak: List[Observable] = []
    strong = None
    for i, tok in enumerate(tokens):
        if tok.strip().startswith("!"):
            if i != len(tokens) - 1:
                raise ConfigurationError("strong measurement must be last in a plan label")
            strong = _projector_token(tok.strip()[1:])
        else:
            weak.append(_projector_token(tok))
    if not 1 <= len(weak) <= 2:
        raise ConfigurationError(f"plan {label!r} needs one or two weak steps (two pointers)")
    if len(weak) + (strong is not None) < 2:
        raise ConfigurationError(f"plan {label!r} must contain at least two measurements")
    return ParsedPlan(tuple(weak), strong)


def _system(cfg: ScenarioConfig, theta: float):
    mixed = cfg.scenario == "fig3b" or (cfg.scenario == "custom" and cfg.input == "mixed")
    if mixed:
        return prepare_mixed(theta)
    return prepare_theta(theta, cfg.theta_convention)


def _rho(system) -> DensityMatrix:
    return system.density() if isinstance(system, PolarizationState) else system


def _row(cfg: ScenarioConfig, theta: float, label: str, delta: float) -> SweepRow:
    parsed = parse_plan_label(label)
    system = _system(cfg, theta)
    grid = cfg.grid()
    res = run_sequence(
        parsed.sequence_plan(delta, cfg.normalization),
        system,
        cfg.sigma,
        (grid, grid),
        cfg.leakage_budget,
    )
    rho = _rho(system)
    weak_value = weak_correlator(WeakCorrelatorSpec(rho, parsed.observables, parsed.strong is not None))
    if cfg.normalization == "conditional" and res.prob_K is not None:
        # weak-limit companion conditioned the same way
        p_weak = float(np.trace(rho.entries @ parsed.strong.entries).real)
        if p_weak < 1e-15:
            raise VanishingPostselectionError(
                f"weak-limit postselection probability {p_weak:.3e} at theta={theta}"
            )
        weak_value /= p_weak
    exact = None
    if len(parsed.weak) == 2 and parsed.strong is None:
        exact = exact_pair_correlator(rho, parsed.weak[0], parsed.weak[1], delta, cfg.sigma)
    check = None
    if cfg.self_check and cfg.scenario in SELF_CHECK_TOLERANCE:
        check = abs(res.value - weak_value) <= SELF_CHECK_TOLERANCE[cfg.scenario]
        if exact is not None:
            check = check and abs(res.value - exact) <= EXACT_TOLERANCE
    return SweepRow(
        theta=theta,
        ordering=label,
        value_grid=res.value,
        value_weaklimit=weak_value,
        value_exact=exact,
        prob_K=res.prob_K,
        delta_over_sigma=delta / cfg.sigma,
        self_check=check,
    )


def run_scenario(config: ScenarioConfig) -> List[SweepRow]:
    """Evaluate every (θ, ordering[, strength]) point of a scenario.

    Rows come back sorted by θ, then ordering label, then strength, whatever
    the degree of parallelism.
    """
    cfg = config.resolved()
    if cfg.scenario == "convergence":
        thetas = [cfg.theta_start]
        deltas = [r * cfg.sigma for r in cfg.strengths]
    else:
        thetas = cfg.thetas()
        deltas = [cfg.delta]
    jobs = [(t, o, d) for t in thetas for o in sorted(cfg.orderings) for d in deltas]
    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            rows = list(pool.map(lambda j: _row(cfg, *j), jobs))
    else:
        rows = [_row(cfg, *j) for j in jobs]
    return sorted(rows, key=lambda r: (r.theta, r.ordering, r.delta_over_sigma))


@dataclass
class Summary:
    orderings: Tuple[str, str]
    thetas: List[float]
    differences: List[float]
    weak_differences: List[float]
    max_abs_difference: float
    argmax_theta: float
    max_deviation_from_weak: float

    def lines(self) -> List[str]:
        a, b = self.orderings
        return [
            f"ordering difference = {a} - {b}",
            f"max |difference| = {self.max_abs_difference:.6f} at theta = {self.argmax_theta:g} deg",
            f"max |difference - weak-limit difference| = {self.max_deviation_from_weak:.6f}",
        ]


def summarize(rows: Sequence[SweepRow]) -> Summary:
    """Per-θ ordering difference of a two-ordering sweep and its weak-limit companion."""
    if not rows:
        raise ConfigurationError("cannot summarize an empty table")
    labels = sorted({r.ordering for r in rows})
    if len(labels) != 2:
        raise ConfigurationError(f"summary needs exactly two orderings, got {labels}")
    # an H-first ordering is the minuend (else alphabetical), matching -⅛ sin 4θ
    first, second = sorted(labels, key=lambda s: (not s.startswith("H"), s))
    by_key: Dict[Tuple[float, float], Dict[str, SweepRow]] = {}
    for r in rows:
        by_key.setdefault((r.theta, r.delta_over_sigma), {})[r.ordering] = r
    thetas, diffs, weak = [], [], []
    for (theta, _), pair in sorted(by_key.items()):
        if first not in pair or second not in pair:
            raise ConfigurationError(f"theta {theta} is missing an ordering")
        thetas.append(theta)
        diffs.append(pair[first].value_grid - pair[second].value_grid)
        weak.append(pair[first].value_weaklimit - pair[second].value_weaklimit)
    absd = np.abs(diffs)
    k = int(np.argmax(absd))
    return Summary(
        orderings=(first, second),
        thetas=thetas,
        differences=diffs,
        weak_differences=weak,
        max_abs_difference=float(absd[k]),
        argmax_theta=thetas[k],
        max_deviation_from_weak=float(np.max(np.abs(np.subtract(diffs, weak)))),
    )


@dataclass
class ConvergenceFit:
    strengths: List[float]
    gaps: Dict[str, List[float]]
    slopes: Dict[str, float]
    residuals: Dict[str, List[float]]


def fit_convergence(rows: Sequence[SweepRow]) -> ConvergenceFit:
    """Log-log least-squares slope of ``|grid - weak limit|`` against δ/σ per ordering."""
    strengths = sorted({r.delta_over_sigma for r in rows})
    if len(strengths) < 3:
        raise ConfigurationError("convergence fit needs at least 3 strengths")
    gaps, slopes, residuals = {}, {}, {}
    for label in sorted({r.ordering for r in rows}):
        sel = sorted((r for r in rows if r.ordering == label), key=lambda r: r.delta_over_sigma)
        x = np.log([r.delta_over_sigma for r in sel])
        g = [abs(r.value_grid - r.value_weaklimit) for r in sel]
        y = np.log(g)
        coef = np.polyfit(x, y, 1)
        gaps[label] = g
        slopes[label] = float(coef[0])
        residuals[label] = list(map(float, y - np.polyval(coef, x)))
    return ConvergenceFit(strengths, gaps, slopes, residuals)


def convergence_study(
    delta_over_sigma: Sequence[float],
    theta: float,
    orderings: Sequence[str] = (ORDER_HD_STRONG_H, ORDER_DH_STRONG_H),
    sigma: float = 600.0,
    grid_spacing: float = 10.0,
    grid_count: int = 1024,
    theta_convention: str = "hwp",
) -> ConvergenceFit:
    if len(delta_over_sigma) < 3:
        raise ConfigurationError("convergence study needs at least 3 strengths")
    cfg = ScenarioConfig(
        scenario="convergence",
        theta_start=theta,
        theta_end=theta,
        strengths=tuple(delta_over_sigma),
        orderings=tuple(orderings),
        sigma=sigma,
        grid_spacing=grid_spacing,
        grid_count=grid_count,
        theta_convention=theta_convention,
    )
    return fit_convergence(run_scenario(cfg))


def _fmt(v: Optional[float]) -> str:
    return "" if v is None else format(float(v), ".16e")


def emit_csv(
    rows: Iterable[SweepRow],
    path,
    comments: Sequence[str] = (),
    self_check: bool = False,
) -> None:
    """Write rows as CSV; every float carries 17 significant digits (exact round trip)."""
    header = list(CSV_HEADER) + (["self_check"] if self_check else [])
    with open(path, "w", newline="", encoding="utf-8") as fh:
        for c in comments:
            fh.write(f"# {c}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for r in rows:
            line = [
                _fmt(r.theta),
                r.ordering,
                _fmt(r.value_grid),
                _fmt(r.value_weaklimit),
                _fmt(r.value_exact),
                _fmt(r.prob_K),
                _fmt(r.delta_over_sigma),
            ]
            if self_check:
                line.append("" if r.self_check is None else ("pass" if r.self_check else "fail"))
            writer.writerow(line)


def read_csv(path) -> List[SweepRow]:
    """Inverse of :func:`emit_csv` (comment lines skipped)."""

    def opt(s):
        return float(s) if s != "" else None

    with open(path, newline="", encoding="utf-8") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    rows = []
    for rec in csv.DictReader(lines):
        check = rec.get("self_check")
        rows.append(
            SweepRow(
                theta=float(rec["theta_deg"]),
                ordering=rec["ordering"],
                value_grid=float(rec["value_grid"]),
                value_weaklimit=float(rec["value_weaklimit"]),
                value_exact=opt(rec["value_exact"]),
                prob_K=opt(rec["prob_K"]),
                delta_over_sigma=float(rec["delta_over_sigma"]),
                self_check=None if not check else check == "pass",
            )
        )
    return rows


def config_comments(cfg: ScenarioConfig) -> List[str]:
    cfg = cfg.resolved()
    keys = (
        "scenario",
        "theta_convention",
        "normalization",
        "delta",
        "sigma",
        "grid_spacing",
        "grid_count",
        "input",
    )
    return [
        "seqweak " + " ".join(f"{k}={getattr(cfg, k)}" for k in keys),
        "orderings " + " ".join(cfg.orderings),
    ]


# config file / CLI key handling --------------------------------------------

_FIELD_TYPES = {f.name: f.type for f in fields(ScenarioConfig)}
_ALIASES = {"out": "output_path", "output": "output_path"}


def _coerce(key: str, raw: str):
    raw = raw.strip()
    if key in ("theta_start", "theta_end", "theta_step", "delta", "sigma", "grid_spacing", "leakage_budget"):
        return float(raw)
    if key in ("grid_count", "jobs"):
        return int(raw)
    if key == "self_check":
        return raw.lower() in ("1", "true", "yes", "on")
    if key == "orderings":
        return tuple(s for s in raw.replace(",", " ").split() if s)
    if key == "strengths":
        return tuple(float(s) for s in raw.replace(",", " ").split() if s)
    return raw


def normalize_key(key: str) -> str:
    k = key.strip().lstrip("-").replace("-", "_")
    k = _ALIASES.get(k, k)
    if k not in _FIELD_TYPES:
        raise ConfigurationError(f"unknown configuration key {key!r}")
    return k


def parse_config_text(text: str) -> Dict[str, object]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out: Dict[str, object] = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"config line {n}: expected 'key = value'")
        key, value = line.split("=", 1)
        k = normalize_key(key)
        try:
            out[k] = _coerce(k, value)
        except ValueError as exc:
            raise ConfigurationError(f"config line {n}: bad value for {k}: {exc}") from None
    return out


def build_config(file_values: Dict[str, object], overrides: Dict[str, object]) -> ScenarioConfig:
    merged = dict(file_values)
    merged.update({k: v for k, v in overrides.items() if v is not None})
    return ScenarioConfig(**merged)
