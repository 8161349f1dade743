"""
pointerlab
==========

Measurement pointers for projector measurements on pre-selected and
pre/post-selected quantum systems: exact closed forms at any coupling
strength, first-order weak-regime means for arbitrary operators,
error-propagation sensitivities, and a brute-force evolution oracle.
"""

__version__ = "0.1.0"

from .errors import (ConfigError, DegenerateInput, DimensionMismatch, GridContainment,
                     InvalidRegime, NotHermitian, NotIdempotent, OrthogonalPostSelection,
                     PointerLabError, PostSelectionFailure, UndefinedSensitivity,
                     WeakRegimeWarning)
from .hilbert import (PPSContext, Projector, SystemOperator, SystemState, WeakValue,
                      expectation, make_projector, pps_context, weak_value)
from .pointer import (MOMENTUM, POSITION, MomentReport, PointerGrid, PointerObservable,
                      PointerState, gaussian_pointer, moments, observable_mean, translate)
from .exact import (JointState, MeasurementConfig, PPSPointerState, interaction_apply,
                    pps_mean, pps_pointer_state, pps_profile, ps_mean, ps_profile)
from .oracle import (SpectralDecomposition, evolve_joint, oracle_post_select,
                     oracle_ps_moments)
from .weak import (SensitivityReport, convergence_probe, sensitivity_gamma, sensitivity_ps,
                   sensitivity_re_weak_value, weak_pps_mean, weak_ps_mean)

__all__ = [
    "ConfigError", "DegenerateInput", "DimensionMismatch", "GridContainment", "InvalidRegime",
    "NotHermitian", "NotIdempotent", "OrthogonalPostSelection", "PointerLabError",
    "PostSelectionFailure", "UndefinedSensitivity", "WeakRegimeWarning",
    "PPSContext", "Projector", "SystemOperator", "SystemState", "WeakValue",
    "expectation", "make_projector", "pps_context", "weak_value",
    "MOMENTUM", "POSITION", "MomentReport", "PointerGrid", "PointerObservable", "PointerState",
    "gaussian_pointer", "moments", "observable_mean", "translate",
    "JointState", "MeasurementConfig", "PPSPointerState", "interaction_apply", "pps_mean",
    "pps_pointer_state", "pps_profile", "ps_mean", "ps_profile",
    "SpectralDecomposition", "evolve_joint", "oracle_post_select", "oracle_ps_moments",
    "SensitivityReport", "convergence_probe", "sensitivity_gamma", "sensitivity_ps",
    "sensitivity_re_weak_value", "weak_pps_mean", "weak_ps_mean",
]
