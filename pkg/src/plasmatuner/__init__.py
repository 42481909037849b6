"""Frequency-domain simulator and synthesis toolkit for plasma-switched
stub impedance tuners."""

from . import config, elements, network, plasma, synth, touchstone, transient, tuner
from .elements import (
    LumpedCapSpec,
    LumpedIndSpec,
    MicrostripSpec,
    SubstrateSpec,
)
from .network import AbcdMatrix, FrequencyGrid, NetworkSweep, SMatrix2
from .plasma import DrudeParams, PlasmaCellModel
from .transient import TransientSpec
from .tuner import CoverageReport, StubBranch, SwitchState, TunerConfig

__version__ = "0.1.0"
