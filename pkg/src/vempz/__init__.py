"""Pole-zero speech analysis with block-sparse + Gaussian excitation."""

from .analysis import METHODS, analyze
from .baselines import IrlsConfig, lp1, lp2, ts_ls_pz
from .errors import (
    DimensionError,
    FormatError,
    InvalidInput,
    NumericalError,
    RankError,
    UsageError,
    VempzError,
)
from .metrics import minimum_phase, periodogram, power_cepstrum, sparsity_ratio, spectral_distortion
from .model import Frame, PoleZeroModel
from .synthesis import NASAL_N, LfParams, ResonatorSpec, SynthSpec, build_resonator, lf_pulse, synth_frame
from .vem import AnalysisResult, VemConfig, run_vem

__version__ = "0.1.0"

__all__ = [
    "METHODS",
    "analyze",
    "IrlsConfig",
    "lp1",
    "lp2",
    "ts_ls_pz",
    "DimensionError",
    "FormatError",
    "InvalidInput",
    "NumericalError",
    "RankError",
    "UsageError",
    "VempzError",
    "minimum_phase",
    "periodogram",
    "power_cepstrum",
    "sparsity_ratio",
    "spectral_distortion",
    "Frame",
    "PoleZeroModel",
    "NASAL_N",
    "LfParams",
    "ResonatorSpec",
    "SynthSpec",
    "build_resonator",
    "lf_pulse",
    "synth_frame",
    "AnalysisResult",
    "VemConfig",
    "run_vem",
]
