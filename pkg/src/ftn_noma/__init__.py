"""Capacity-level simulator for faster-than-Nyquist NOMA downlinks."""

__version__ = "0.1.0"

from .waveform import WaveformConfig, composite_spectrum, folded_spectrum, nyquist_period
from .channel import Geometry, ScUserSet, MimoChannelSet, draw_sc_users, draw_mimo_channels
from .sc import (PairingScheme, ScPair, power_split, rate_strong, rate_weak, rate_oma,
                 pair_reflection, pair_random, pair_adjacent, scheme_asr,
                 brute_force_best_pairing)
from .mimo import LinearStage, build_stage, evaluate_stage
from .sim import ExperimentConfig, SweepResult, run_asr_sweep, run_outage, run_user_count_sweep

__all__ = [
    "__version__",
    "WaveformConfig", "composite_spectrum", "folded_spectrum", "nyquist_period",
    "Geometry", "ScUserSet", "MimoChannelSet", "draw_sc_users", "draw_mimo_channels",
    "PairingScheme", "ScPair", "power_split", "rate_strong", "rate_weak", "rate_oma",
    "pair_reflection", "pair_random", "pair_adjacent", "scheme_asr",
    "brute_force_best_pairing",
    "LinearStage", "build_stage", "evaluate_stage",
    "ExperimentConfig", "SweepResult", "run_asr_sweep", "run_outage", "run_user_count_sweep",
]
