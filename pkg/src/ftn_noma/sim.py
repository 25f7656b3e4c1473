"""Monte Carlo sweeps: sum rate versus SNR or user count, and outage.

Each trial draws its channels from substream ``trial`` of the configured
seed and evaluates every requested (scheme, signaling) combination on that
same draw.  Per-trial results are collected by trial index and reduced in
index order, so output does not depend on the worker count.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import mimo
from .channel import Geometry, draw_mimo_channels, draw_sc_users, make_rng
from .errors import ConfigError
from .sc import (nyquist_rate, pair_random, pair_reflection, power_split,
                 spectral_rate)
from .waveform import WaveformConfig

log = logging.getLogger(__name__)

__all__ = [
    "SCENARIOS",
    "SCHEMES",
    "SIGNALINGS",
    "ExperimentConfig",
    "AsrRow",
    "OutageRow",
    "SweepResult",
    "snr_to_gamma",
    "worker_count",
    "sc_trial",
    "mimo_trial",
    "run_asr_sweep",
    "run_user_count_sweep",
    "run_outage",
]

SCENARIOS = ("sc", "mimo")
SCHEMES = ("noma-proposed", "noma-random", "oma")
SIGNALINGS = ("ftn", "nyquist")

# stream key for pairing randomness, separate from the channel stream
_PAIRING_STREAM = 1


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str = "sc"
    schemes: tuple[str, ...] = SCHEMES
    signalings: tuple[str, ...] = SIGNALINGS
    snr_grid: tuple[float, ...] = (0.0, 10.0, 20.0, 30.0, 40.0)
    users: int = 32
    n_rx: int = 8
    n_tx: int = 8
    beta: float = 0.5
    alpha: float = 1.0 / 1.5
    trials: int = 100
    seed: int = 0
    outage_thresholds: tuple[float, float] = (1.0, 0.5)
    policy_strong: str = "literal"
    policy_weak: str = "literal"
    cell_radius: float = 500.0
    reference_distance: float = 100.0

    def __post_init__(self):
        for name in ("schemes", "signalings", "snr_grid", "outage_thresholds"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"scenario must be one of {SCENARIOS}", "scenario")
        for s in self.schemes:
            if s not in SCHEMES:
                raise ConfigError(f"unknown scheme {s!r}", "scheme")
        for s in self.signalings:
            if s not in SIGNALINGS:
                raise ConfigError(f"unknown signaling {s!r}", "signaling")
        if not self.schemes:
            raise ConfigError("at least one scheme is required", "scheme")
        if not self.signalings:
            raise ConfigError("at least one signaling is required", "signaling")
        if not self.snr_grid or not all(math.isfinite(x) for x in self.snr_grid):
            raise ConfigError("snr grid must be a non-empty list of finite values", "snr")
        if not 0.0 <= self.beta <= 1.0:
            raise ConfigError(f"beta must lie in [0, 1], got {self.beta}", "beta")
        if not 0.0 < self.alpha <= 1.0:
            raise ConfigError(f"alpha must lie in (0, 1], got {self.alpha}", "alpha")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1", "trials")
        if self.users < 2 or self.users % 2:
            raise ConfigError("users must be even and >= 2", "users")
        if len(self.outage_thresholds) != 2 or min(self.outage_thresholds) < 0:
            raise ConfigError("outage thresholds must be two non-negative rates", "thresholds")
        if self.policy_strong not in mimo.STRONG_POLICIES:
            raise ConfigError(f"policy_strong must be one of {mimo.STRONG_POLICIES}", "policy_strong")
        if self.policy_weak not in mimo.WEAK_POLICIES:
            raise ConfigError(f"policy_weak must be one of {mimo.WEAK_POLICIES}", "policy_weak")
        if self.scenario == "mimo":
            if self.n_rx < 1 or self.n_tx < 1:
                raise ConfigError("antenna counts must be positive", "antennas")
            if self.users != 2 * self.n_tx:
                raise ConfigError("mimo needs users == 2 * n_tx", "users")
        try:
            self.geometry
        except ValueError as exc:
            raise ConfigError(str(exc), "cell_radius") from exc

    @property
    def waveform(self) -> WaveformConfig:
        return WaveformConfig(self.beta, self.alpha)

    @property
    def geometry(self) -> Geometry:
        return Geometry(self.cell_radius, self.reference_distance)

    @property
    def combos(self) -> list[tuple[str, str]]:
        return [(s, g) for s in self.schemes for g in self.signalings]

    def with_(self, **changes) -> "ExperimentConfig":
        return replace(self, **changes)


@dataclass(frozen=True)
class AsrRow:
    axis: float
    scheme: str
    signaling: str
    mean_asr: float
    trials: int
    seed: int
    std_err: float = 0.0


@dataclass(frozen=True)
class OutageRow:
    snr_db: float
    scheme: str
    signaling: str
    op_strong: float
    op_weak: float
    trials: int
    seed: int


@dataclass
class SweepResult:
    kind: str                      # "asr" or "outage"
    axis_name: str = "snr_db"
    rows: list = field(default_factory=list)

    def __len__(self):
        return len(self.rows)

    def lookup(self, scheme, signaling):
        """Rows of one series, in axis order."""
        return [r for r in self.rows if r.scheme == scheme and r.signaling == signaling]

    def series(self, scheme, signaling, attr="mean_asr") -> np.ndarray:
        return np.array([getattr(r, attr) for r in self.lookup(scheme, signaling)])


def snr_to_gamma(snr_db):
    """``gamma`` for an SNR in dB, anchored at the unit reference gain."""
    return 10.0 ** (np.asarray(snr_db, dtype=float) / 10.0)


def worker_count() -> int:
    """Worker threads from ``FTN_NOMA_THREADS`` (0 or unset = one per CPU)."""
    raw = os.environ.get("FTN_NOMA_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"FTN_NOMA_THREADS must be an integer, got {raw!r}", "FTN_NOMA_THREADS")
    return n if n > 0 else (os.cpu_count() or 1)


def _map_trials(fn, trials, workers=None):
    workers = worker_count() if workers is None else workers
    if workers <= 1 or trials < 2:
        return [fn(t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(trials)))


def _pair_rates(eps, gamma, weak_sq, strong_sq, cfg, signaling):
    """Weak and strong rates, shape ``(snr, pairs)``, for a gamma column vector."""
    rate = spectral_rate if signaling == "ftn" else nyquist_rate
    xw = gamma * weak_sq
    weak = rate(xw, cfg) - rate(eps * xw, cfg)
    strong = rate(eps * gamma * strong_sq, cfg)
    return weak, strong


def _oma_rates(gamma, weak_sq, strong_sq, cfg, signaling):
    rate = spectral_rate if signaling == "ftn" else nyquist_rate
    return 0.5 * rate(gamma * weak_sq, cfg), 0.5 * rate(gamma * strong_sq, cfg)


def sc_trial(cfg: ExperimentConfig, trial: int, snr_db=None):
    """Per-user rates of every (scheme, signaling) on one SC draw.

    Returns ``{(scheme, signaling): (weak, strong)}`` with arrays of shape
    ``(len(snr), K)``.  OMA roles follow the reflection pairing.
    """
    snr = cfg.snr_grid if snr_db is None else snr_db
    gamma = snr_to_gamma(snr)[:, None]
    wf = cfg.waveform
    users = draw_sc_users(cfg.users, cfg.geometry, cfg.seed, trial)
    g2 = users.gain_sq
    out = {}
    schemes = {"noma-proposed": pair_reflection(users)}
    if "noma-random" in cfg.schemes:
        schemes["noma-random"] = pair_random(users, make_rng(cfg.seed, trial, _PAIRING_STREAM))
    for name, scheme in schemes.items():
        weak = np.array([p.weak_index for p in scheme])
        strong = np.array([p.strong_index for p in scheme])
        eps = power_split(gamma, g2[weak][None, :], wf.t_nyquist)
        for sig in cfg.signalings:
            if name in cfg.schemes:
                out[name, sig] = _pair_rates(eps, gamma, g2[weak], g2[strong], wf, sig)
            if name == "noma-proposed" and "oma" in cfg.schemes:
                out["oma", sig] = _oma_rates(gamma, g2[weak], g2[strong], wf, sig)
    return out


def mimo_trial(cfg: ExperimentConfig, trial: int, snr_db=None):
    """As ``sc_trial`` for the MIMO scenario; OMA reuses the proposed stage."""
    snr = cfg.snr_grid if snr_db is None else snr_db
    gamma = snr_to_gamma(snr)[:, None]
    wf = cfg.waveform
    ch = draw_mimo_channels(cfg.users, cfg.n_rx, cfg.n_tx, cfg.geometry, cfg.seed, trial)
    stages = {"noma-proposed": mimo.build_stage(ch, cfg.policy_strong, cfg.policy_weak)}
    if "noma-random" in cfg.schemes:
        stages["noma-random"] = mimo.build_random_stage(ch, make_rng(cfg.seed, trial, _PAIRING_STREAM))
    out = {}
    for name, stage in stages.items():
        hw, hs = mimo.effective_gains(stage, ch)
        hw2, hs2 = np.abs(hw) ** 2, np.abs(hs) ** 2
        eps = power_split(gamma, hw2[None, :], wf.t_nyquist)
        for sig in cfg.signalings:
            if name in cfg.schemes:
                out[name, sig] = _pair_rates(eps, gamma, hw2, hs2, wf, sig)
            if name == "noma-proposed" and "oma" in cfg.schemes:
                out["oma", sig] = _oma_rates(gamma, hw2, hs2, wf, sig)
    return out


def _trial_fn(cfg):
    return sc_trial if cfg.scenario == "sc" else mimo_trial


def _asr_stats(cfg, workers):
    """Mean and standard error of the ASR per combo, shape ``(len(snr),)``."""
    fn = _trial_fn(cfg)

    def one(t):
        res = fn(cfg, t)
        return {k: w.sum(axis=1) + s.sum(axis=1) for k, (w, s) in res.items()}

    per_trial = _map_trials(one, cfg.trials, workers)
    stats = {}
    for combo in cfg.combos:
        a = np.stack([r[combo] for r in per_trial])  # (trials, snr), trial order
        se = a.std(axis=0, ddof=1) / math.sqrt(len(a)) if len(a) > 1 else np.zeros(a.shape[1])
        stats[combo] = (a.mean(axis=0), se)
    return stats


def run_asr_sweep(cfg: ExperimentConfig, workers=None) -> SweepResult:
    """Mean sum rate at every SNR point for each requested scheme and signaling."""
    log.info("asr sweep: %s, %d trials", cfg.scenario, cfg.trials)
    stats = _asr_stats(cfg, workers)
    rows = []
    for i, snr in enumerate(cfg.snr_grid):
        for combo in cfg.combos:
            mean, se = stats[combo]
            rows.append(AsrRow(float(snr), combo[0], combo[1], float(mean[i]),
                               cfg.trials, cfg.seed, float(se[i])))
    return SweepResult("asr", "snr_db", rows)


def run_user_count_sweep(cfg: ExperimentConfig, counts, workers=None) -> SweepResult:
    """Mean sum rate versus user count at the single SNR in ``cfg.snr_grid``."""
    if len(cfg.snr_grid) != 1:
        raise ConfigError("a user-count sweep needs exactly one SNR value", "snr")
    if cfg.scenario != "sc":
        raise ConfigError("user-count sweeps are defined for the sc scenario", "scenario")
    rows = []
    for count in counts:
        sub = cfg.with_(users=int(count))
        stats = _asr_stats(sub, workers)
        for combo in sub.combos:
            mean, se = stats[combo]
            rows.append(AsrRow(float(count), combo[0], combo[1], float(mean[0]),
                               cfg.trials, cfg.seed, float(se[0])))
    return SweepResult("asr", "users", rows)


def run_outage(cfg: ExperimentConfig, workers=None) -> SweepResult:
    """Fraction of strong and weak user instances whose rate falls below threshold."""
    fn = _trial_fn(cfg)
    t_strong, t_weak = cfg.outage_thresholds

    def one(t):
        res = fn(cfg, t)
        return {k: ((s < t_strong).sum(axis=1), (w < t_weak).sum(axis=1), w.shape[1])
                for k, (w, s) in res.items()}

    per_trial = _map_trials(one, cfg.trials, workers)
    rows = []
    for i, snr in enumerate(cfg.snr_grid):
        for combo in cfg.combos:
            n = sum(r[combo][2] for r in per_trial)
            strong = sum(int(r[combo][0][i]) for r in per_trial)
            weak = sum(int(r[combo][1][i]) for r in per_trial)
            rows.append(OutageRow(float(snr), combo[0], combo[1], strong / n, weak / n,
                                  cfg.trials, cfg.seed))
    return SweepResult("outage", "snr_db", rows)
