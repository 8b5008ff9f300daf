"""Recovery of steady periodic water waves with vorticity from crest-line velocity data."""

from .errors import (
    AdmissibilityError,
    ConfigurationError,
    CrestlineError,
    DivergenceWarning,
    ExperimentalWarning,
    InconsistentDataError,
    InvalidInputError,
    LeftAdmissibleSetError,
    NonconvergenceError,
    OutOfDiskError,
)
from .forward import FlowField, HeightField, PhysParams, laminar_flow, linear_wave, solve_height_equation
from .funcrep import FuncP
from .recover import AxisData, CoeffTable, Recovery, recover_wave
from .validate import compare_profiles, euler_residual, height_eq_residual, stream_residual

__version__ = "0.1.0"
