"""Invariant suites run by ``ftn-noma verify``.

Each check draws random instances from a fixed seed and returns a
``CheckResult``; nothing here raises on a violation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import mimo
from .channel import Geometry, draw_mimo_channels, draw_sc_users, make_rng
from .sc import (brute_force_best_pairing, pair_adjacent, pair_from_indices,
                 pair_reflection, power_split, rate_oma, rate_oma_nyquist,
                 rate_strong, rate_weak, scheme_asr)
from .waveform import WaveformConfig, composite_spectrum, folded_spectrum

LEVELS = {"quick": 1_000, "full": 100_000}


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}  {self.detail}".rstrip()


def random_link(rng, n):
    """Random ``(gamma, weak |h|^2, strong |h|^2, beta, alpha)`` with ``alpha >= 1/(1+beta)``."""
    gamma = 10.0 ** rng.uniform(-1.0, 5.0, n)
    g = np.sort(10.0 ** rng.uniform(-3.0, 2.0, (n, 2)), axis=1)
    beta = rng.uniform(0.0, 1.0, n)
    alpha = rng.uniform(1.0 / (1.0 + beta), 1.0)
    return gamma, g[:, 0], g[:, 1], beta, alpha


def check_folded_spectrum(draws, seed=0):
    rng = make_rng(seed, 0, 100)
    grid = np.linspace(0.0, math.pi, 2001)
    worst_range = worst_oracle = worst_nyq = 0.0
    for _ in range(max(10, draws // 100)):
        cfg = WaveformConfig(rng.uniform(0, 1), rng.uniform(0.05, 1))
        g = folded_spectrum(grid, cfg)
        worst_range = max(worst_range, -g.min(), g.max() - cfg.t_nyquist)
        f0 = grid / (2 * math.pi * cfg.alpha)
        wide = sum(composite_spectrum(f0 + k / cfg.alpha, cfg) for k in range(-16, 17))
        worst_oracle = max(worst_oracle, np.max(np.abs(g - np.minimum(wide, 1.0))))
        worst_nyq = max(worst_nyq, np.max(np.abs(folded_spectrum(grid, cfg.nyquist()) - 1.0)))
    ok = worst_range <= 1e-12 and worst_oracle <= 1e-14 and worst_nyq <= 1e-12
    return CheckResult("folded spectrum range / alias truncation / Nyquist identity", ok,
                       f"range={worst_range:.1e} oracle={worst_oracle:.1e} nyq={worst_nyq:.1e}")


def check_sc_fairness(draws, seed=0):
    rng = make_rng(seed, 0, 101)
    gamma, gm, gn, beta, alpha = random_link(rng, draws)
    bad_w = bad_s = bad_eps = 0
    for i in range(draws):
        cfg = WaveformConfig(beta[i], alpha[i])
        eps = power_split(gamma[i], gm[i])
        if rate_weak(eps, gamma[i], gm[i], cfg) < rate_oma(gamma[i], gm[i], cfg) - 1e-9:
            bad_w += 1
        if rate_strong(eps, gamma[i], gn[i], cfg) < rate_oma_nyquist(gamma[i], gn[i], cfg) - 1e-9:
            bad_s += 1
        lower = power_split(gamma[i], gn[i])
        if not lower - 1e-15 <= eps <= 0.5:
            bad_eps += 1
    return CheckResult("sc fairness and power-split range", bad_w + bad_s + bad_eps == 0,
                       f"weak={bad_w} strong={bad_s} eps={bad_eps} of {draws}")


def check_sc_monotonicity(draws, seed=0):
    rng = make_rng(seed, 0, 102)
    n = max(10, draws // 10)
    gamma, gm, gn, beta, alpha = random_link(rng, n)
    keep = gm < gn
    bad = 0
    step = 1e-5
    for i in np.flatnonzero(keep):
        cfg = WaveformConfig(beta[i], alpha[i])
        e_max = power_split(gamma[i], gm[i])
        e = rng.uniform(step, e_max - step) if e_max > 2 * step else e_max / 2
        def total(x):
            return rate_weak(x, gamma[i], gm[i], cfg) + rate_strong(x, gamma[i], gn[i], cfg)
        if (total(e + step) - total(e - step)) / (2 * step) < -1e-10:
            bad += 1
    return CheckResult("sc sum rate increasing in the strong share", bad == 0, f"violations={bad}")


def check_pairing(draws, seed=0):
    cfg = WaveformConfig(0.5, 2.0 / 3.0)
    geom = Geometry()
    n = max(10, draws // 10)
    bad_order = bad_oracle = 0
    for t in range(n):
        gamma = 10.0 ** (float(make_rng(seed, t, 103).uniform(0, 4)))
        users = draw_sc_users(4, geom, seed, t)
        s1 = scheme_asr(pair_adjacent(users, gamma), users, gamma, cfg)
        s2 = scheme_asr(pair_from_indices(users, [(0, 2), (1, 3)], gamma), users, gamma, cfg)
        s3 = scheme_asr(pair_reflection(users, gamma), users, gamma, cfg)
        if not (s3 >= s2 - 1e-9 and s2 >= s1 - 1e-9):
            bad_order += 1
    for count in (4, 6, 8):
        for t in range(max(3, n // 10)):
            users = draw_sc_users(count, geom, seed + count, t)
            gamma = 10.0 ** 2
            _, best = brute_force_best_pairing(users, gamma, cfg)
            if scheme_asr(pair_reflection(users, gamma), users, gamma, cfg) < best - 1e-9:
                bad_oracle += 1
    return CheckResult("reflection pairing ordering and optimality", bad_order + bad_oracle == 0,
                       f"ordering={bad_order} oracle={bad_oracle}")


def check_mimo(draws, seed=0):
    cfg = WaveformConfig(0.5, 2.0 / 3.0)
    n = max(5, draws // 100)
    worst = 0.0
    bad_fair = 0
    for t in range(n):
        ch = draw_mimo_channels(16, 8, 8, Geometry(), seed, t)
        stage = mimo.build_stage(ch)
        rs, rw = mimo.residual_interference(stage, ch)
        worst = max(worst, rs.max(), rw.max())
        gamma = 10.0 ** 3
        rep = mimo.evaluate_stage(stage, ch, gamma, cfg)
        if np.any(rep.rate_weak < rep.rate_oma_weak - 1e-9):
            bad_fair += 1
    ok = worst <= 1e-9 and bad_fair == 0
    return CheckResult("mimo zero-forcing residuals and weak-user fairness", ok,
                       f"max residual={worst:.1e} fairness violations={bad_fair}")


def run_all(level="quick", seed=0):
    draws = LEVELS[level]
    return [
        check_folded_spectrum(draws, seed),
        check_sc_fairness(draws, seed),
        check_sc_monotonicity(draws, seed),
        check_pairing(draws, seed),
        check_mimo(draws, seed),
    ]
