"""Monotonicity analysis of cumulative dose responses for incoherent feedforward motifs."""

__version__ = "0.1.0"

from .classify import (Monotone, Sign, SignProfile, Verdict, sign_profile, theorem1_certificate,
                       theorem2_witness, verdict)
from .errors import (ConfigError, DomainViolation, IFFMError, MissingVerdict, NonPositiveInput,
                     NotHurwitz, NotMetzler, SingularMatrix, StepFailure, UnsupportedKind,
                     ValidationError)
from .integrator import KernelProfile, SimConfig, Trajectory, closed_form_scalar, kernel, simulate
from .linsys import LinearSubsystem, propagate, steady_state, transition, validate
from .motifs import InitialPolicy, MotifSpec, make_motif
from .oracle import OracleReport, fd_sensitivity, lambda_by_quadrature, richardson_dcdr
from .response import SweepResult, dose_response, log_grid, sweep

__all__ = [
    "ConfigError", "DomainViolation", "IFFMError", "InitialPolicy", "KernelProfile",
    "LinearSubsystem", "MissingVerdict", "Monotone", "MotifSpec", "NonPositiveInput",
    "NotHurwitz", "NotMetzler", "OracleReport", "Sign", "SignProfile", "SimConfig",
    "SingularMatrix", "StepFailure", "SweepResult", "Trajectory", "UnsupportedKind",
    "ValidationError", "Verdict", "closed_form_scalar", "dose_response", "fd_sensitivity",
    "kernel", "lambda_by_quadrature", "log_grid", "make_motif", "propagate", "richardson_dcdr",
    "sign_profile", "simulate", "steady_state", "sweep", "theorem1_certificate",
    "theorem2_witness", "transition", "validate", "verdict",
]
