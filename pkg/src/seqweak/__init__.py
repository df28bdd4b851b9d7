"""Sequential weak and strong polarization measurements on a grid."""

from .errors import (
    ConfigurationError,
    GridSupportError,
    InvalidSequenceError,
    LeakageBudgetError,
    NumericalBudgetError,
    SeqweakError,
    VanishingPostselectionError,
)
from .kernels import BACKEND
from .pointer import PointerGrid, PointerWavefunction, gaussian_wavefunction, position_moment, translate
from .polarization import (
    PI_A,
    PI_D,
    PI_H,
    PI_V,
    DensityMatrix,
    Observable,
    PolarizationState,
    WaveplateElement,
    anticommutator,
    depolarizer_average,
    nested_anticommutator,
    prepare_mixed,
    prepare_theta,
    projector_at,
    waveplate_jones,
)
from .vonneumann import (
    CorrelatorResult,
    LabState,
    MeasurementStep,
    SequencePlan,
    couple,
    init_lab_state,
    readout,
    run_sequence,
    strong_project,
)
from .weaklimit import WeakCorrelatorSpec, exact_pair_correlator, weak_correlator

__version__ = "0.1.0"
