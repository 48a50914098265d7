"""Scattering of a spin-1/2 particle by a cosmic string seen from a rotating frame.

Modules
-------
specfun
    Bessel functions of real order, gamma, the integral representation of I.
model
    Physical parameters, derived symbols, phase shifts.
waves
    Partial-wave field, incident and scattered waves, amplitudes.
verify
    Independent oracles and the consistency suite.
cli
    Command-line entry point.
"""
from . import errors, model, specfun, verify, waves
from .errors import *  # noqa: F401,F403
from .model import DerivedParams, ScatteringParams, derive
from .specfun import SeriesConfig, backend_name
from .waves import AmplitudeRecord, AngularSweep, FieldSample, PartialWaveConfig

__version__ = "0.1.0"
