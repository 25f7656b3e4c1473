"""Acceptance criteria 1-11.

Each ``criterion_N`` returns ``(passed, detail)``; the pytest wrappers assert
on it and record a PASS/FAIL line that is printed in the terminal summary.
Running this file directly prints the same lines without pytest.
"""

import math
import sys

import numpy as np
import pytest

from ftn_noma import mimo
from ftn_noma.channel import Geometry, draw_mimo_channels, draw_sc_users, make_rng
from ftn_noma.sc import (brute_force_best_pairing, pair_adjacent, pair_from_indices,
                         pair_reflection, power_split, rate_oma, rate_oma_nyquist, rate_strong,
                         rate_weak, scheme_asr, spectral_rate)
from ftn_noma.sim import ExperimentConfig, run_asr_sweep, run_outage, run_user_count_sweep
from ftn_noma.waveform import WaveformConfig, folded_spectrum

from conftest import full_sinr_rates

pytestmark = [pytest.mark.acceptance, pytest.mark.slow]

SEED = 2024
BETA = 0.5
ALPHA = 1.0 / (1.0 + BETA)
CFG = WaveformConfig(BETA, ALPHA)

# (number, name, passed, detail), filled as criteria run
RESULTS = []


def record(number, name, passed, detail):
    RESULTS.append((number, name, passed, detail))
    line = f"{'PASS' if passed else 'FAIL'} criterion {number}: {name} | {detail}"
    print(line)
    return line


def ftn_link(rng, n):
    """Random link draws in the FTN regime ``alpha >= 1/(1+beta)``."""
    gamma = 10.0 ** rng.uniform(-1.0, 5.0, n)
    g = np.sort(10.0 ** rng.uniform(-3.0, 2.0, (n, 2)), axis=1)
    beta = rng.uniform(0.0, 1.0, n)
    alpha = rng.uniform(1.0 / (1.0 + beta), 1.0)
    return gamma, g[:, 0], g[:, 1], beta, alpha


def pct(a, b):
    return 100.0 * (a / b - 1.0)


def crossing_db(snr, op, level=1e-3):
    """First SNR where ``op`` falls to ``level``, log-linear between grid points."""
    for i in range(1, len(snr)):
        if op[i] <= level < op[i - 1]:
            lo, hi = math.log10(op[i - 1]), math.log10(max(op[i], 1e-300))
            if op[i] == 0:
                return float(snr[i])
            return float(snr[i - 1] + (snr[i] - snr[i - 1]) * (lo - math.log10(level)) / (lo - hi))
    return math.nan


# 1. reflection pairing against exhaustive matching

def criterion_1(draws=1000):
    geom = Geometry()
    worst = -math.inf
    fails = 0
    for count in (4, 6, 8):
        for t in range(draws):
            users = draw_sc_users(count, geom, SEED + count, t)
            for snr in (10.0, 20.0, 30.0):
                gamma = 10.0 ** (snr / 10.0)
                _, best = brute_force_best_pairing(users, gamma, CFG)
                refl = scheme_asr(pair_reflection(users, gamma), users, gamma, CFG)
                worst = max(worst, best - refl)
                fails += refl < best - 1e-9
    return fails == 0, f"violations={fails} of {3 * 3 * draws}, max(best - reflection)={worst:.2e}"


# 2. four-user scheme ordering

def criterion_2(draws=10_000):
    rng = make_rng(SEED, 0, 2)
    geom = Geometry()
    fails = 0
    margin = math.inf
    for t in range(draws):
        users = draw_sc_users(4, geom, SEED, t)
        gamma = 10.0 ** rng.uniform(0.0, 4.0)
        beta = rng.uniform(0.0, 1.0)
        cfg = WaveformConfig(beta, rng.uniform(1.0 / (1.0 + beta), 1.0))
        s1 = scheme_asr(pair_adjacent(users, gamma), users, gamma, cfg)
        s2 = scheme_asr(pair_from_indices(users, [(0, 2), (1, 3)], gamma), users, gamma, cfg)
        s3 = scheme_asr(pair_reflection(users, gamma), users, gamma, cfg)
        fails += not (s3 >= s2 - 1e-9 and s2 >= s1 - 1e-9)
        margin = min(margin, s3 - s2, s2 - s1)
    return fails == 0, f"violations={fails} of {draws}, min step={margin:.2e}"


# 3. fairness and power-split range

def criterion_3(draws=100_000):
    rng = make_rng(SEED, 0, 3)
    gamma, gm, gn, beta, alpha = ftn_link(rng, draws)
    bad_w = bad_s = bad_eps = 0
    for i in range(draws):
        cfg = WaveformConfig(beta[i], alpha[i])
        eps = power_split(gamma[i], gm[i])
        bad_w += rate_weak(eps, gamma[i], gm[i], cfg) < rate_oma(gamma[i], gm[i], cfg) - 1e-9
        bad_s += rate_strong(eps, gamma[i], gn[i], cfg) < rate_oma_nyquist(gamma[i], gn[i], cfg) - 1e-9
        # lower end of the range uses the strong user's gain
        x = gamma[i] * gn[i]
        lower = (math.sqrt(1 + x) - 1) / x
        bad_eps += not (lower * (1 - 1e-14) <= eps <= 0.5)
    total = bad_w + bad_s + bad_eps
    return total == 0, f"weak={bad_w} strong={bad_s} eps-range={bad_eps} of {draws}"


# 4. pair sum rate increasing in the strong share

def criterion_4(draws=10_000):
    rng = make_rng(SEED, 0, 4)
    gamma, gm, gn, beta, alpha = ftn_link(rng, draws)
    step = 1e-5
    fails = 0
    worst = math.inf
    for i in range(draws):
        cfg = WaveformConfig(beta[i], alpha[i])
        e_max = power_split(gamma[i], gm[i])
        e = rng.uniform(step, e_max - step)

        def pair_sum(x):
            return rate_weak(x, gamma[i], gm[i], cfg) + rate_strong(x, gamma[i], gn[i], cfg)

        d = (pair_sum(e + step) - pair_sum(e - step)) / (2 * step)
        worst = min(worst, d)
        fails += d < -1e-10
    return fails == 0, f"violations={fails} of {draws}, min derivative={worst:.3e}"


# 5. folded-spectrum identities

def criterion_5(configs=100, grid=10_000):
    rng = make_rng(SEED, 0, 5)
    omega = np.linspace(0.0, math.pi, grid)
    worst_range = worst_flat = worst_rate = 0.0
    for _ in range(configs):
        beta, alpha, t = rng.uniform(0, 1), rng.uniform(0.01, 1), rng.uniform(0.5, 2.0)
        g = folded_spectrum(omega, WaveformConfig(beta, alpha, t))
        worst_range = max(worst_range, -g.min(), g.max() - t)
        nyq = WaveformConfig(beta, 1.0, t)
        worst_flat = max(worst_flat, np.max(np.abs(folded_spectrum(omega, nyq) - t)))
        x = 10.0 ** rng.uniform(-2, 5)
        closed = math.log2(1 + x * t) / (1 + beta)
        worst_rate = max(worst_rate, abs(spectral_rate(x, nyq) - closed))
    ok = worst_range <= 0.0 and worst_flat <= 1e-12 and worst_rate <= 1e-10
    return ok, (f"range excess={worst_range:.1e} alpha=1 flatness={worst_flat:.1e} "
                f"closed-form error={worst_rate:.1e}")


# 6. zero-forcing certification

def criterion_6(draws=1000):
    rng = make_rng(SEED, 0, 6)
    worst_res = worst_rel = 0.0
    for t in range(draws):
        ch = draw_mimo_channels(16, 8, 8, Geometry(), SEED, t)
        stage = mimo.build_stage(ch, policy_weak=mimo.WEAK_POLICIES[t % 2])
        rs, rw = mimo.residual_interference(stage, ch)
        worst_res = max(worst_res, rs.max(), rw.max())
        gamma = 10.0 ** rng.uniform(0.0, 4.0)
        rep = mimo.evaluate_stage(stage, ch, gamma, CFG)
        weak, strong = full_sinr_rates(stage, ch, gamma, BETA, ALPHA)
        rel = np.abs(np.concatenate([rep.rate_weak - weak, rep.rate_strong - strong]))
        rel /= np.maximum(np.abs(np.concatenate([weak, strong])), 1e-300)
        worst_rel = max(worst_rel, rel.max())
    ok = worst_res <= 1e-9 and worst_rel <= 1e-8
    return ok, f"max residual={worst_res:.2e} max rate mismatch={worst_rel:.2e} over {draws} draws"


# 7. SC gains at 40 dB

def criterion_7(trials=2000):
    cfg = ExperimentConfig(users=32, beta=BETA, alpha=ALPHA, snr_grid=(40.0,), trials=trials,
                           seed=SEED, schemes=("noma-proposed", "oma"))
    res = run_asr_sweep(cfg)
    ftn = res.series("noma-proposed", "ftn")[0]
    g_noma = pct(ftn, res.series("noma-proposed", "nyquist")[0])
    g_oma = pct(ftn, res.series("oma", "nyquist")[0])
    ok = abs(g_noma - 30.0) <= 5.0 and abs(g_oma - 58.0) <= 8.0
    return ok, f"gain over Nyquist-NOMA={g_noma:.2f}% (30+-5), over Nyquist-OMA={g_oma:.2f}% (58+-8)"


# 8. user-count sweep at 20 dB

def criterion_8(trials=2000, counts=(4, 8, 16, 24, 32)):
    cfg = ExperimentConfig(beta=BETA, alpha=ALPHA, snr_grid=(20.0,), trials=trials, seed=SEED,
                           schemes=("noma-proposed", "oma"))
    res = run_user_count_sweep(cfg, counts)
    ftn = res.series("noma-proposed", "ftn")
    se = res.series("noma-proposed", "ftn", "std_err")
    g_noma = pct(ftn[-1], res.series("noma-proposed", "nyquist")[-1])
    g_oma = pct(ftn[-1], res.series("oma", "nyquist")[-1])
    steps = np.diff(ftn) + 2 * np.hypot(se[1:], se[:-1])
    ok = g_noma >= 10.0 and g_oma >= 50.0 and bool(np.all(steps >= 0))
    return ok, (f"at 2K={counts[-1]}: over Nyquist-NOMA={g_noma:.2f}% (>=10), "
                f"over Nyquist-OMA={g_oma:.2f}% (>=50); ASR by 2K="
                + ",".join(f"{v:.2f}" for v in ftn))


# 9. outage ordering

def criterion_9(trials=10_000):
    grid = tuple(float(s) for s in range(0, 62, 2))
    cfg = ExperimentConfig(users=32, beta=BETA, alpha=ALPHA, snr_grid=grid, trials=trials,
                           seed=SEED, outage_thresholds=(1.0, 0.5))
    res = run_outage(cfg)
    snr = np.array(grid)
    prop_s = res.series("noma-proposed", "ftn", "op_strong")
    rand_s = res.series("noma-random", "ftn", "op_strong")
    prop_w = res.series("noma-proposed", "ftn", "op_weak")
    oma_w = res.series("oma", "nyquist", "op_weak")
    hi = snr >= 20.0
    strong_ok = bool(np.all(prop_s[hi] <= rand_s[hi]))
    weak_ok = bool(np.all(prop_w <= oma_w))
    gap = crossing_db(snr, rand_s) - crossing_db(snr, prop_s)
    ok = strong_ok and weak_ok and gap >= 6.0
    return ok, (f"strong proposed<=random at >=20 dB: {strong_ok}; weak proposed<=Nyquist-OMA: "
                f"{weak_ok}; strong-user gap at OP=1e-3: {gap:.1f} dB (>=6)")


# 10. MIMO gains at 40 dB under both weak-user policies

def criterion_10(trials=1000):
    parts = []
    any_oma = True
    beats_random = True
    best_oma = -math.inf
    for policy in mimo.WEAK_POLICIES:
        cfg = ExperimentConfig(scenario="mimo", users=16, n_rx=8, n_tx=8, beta=BETA, alpha=ALPHA,
                               snr_grid=(40.0,), trials=trials, seed=SEED, policy_weak=policy)
        res = run_asr_sweep(cfg)
        ftn = res.series("noma-proposed", "ftn")[0]
        rnd = res.series("noma-random", "ftn")[0]
        g_noma = pct(ftn, res.series("noma-proposed", "nyquist")[0])
        g_oma = pct(ftn, res.series("oma", "nyquist")[0])
        best_oma = max(best_oma, g_oma)
        beats_random &= ftn >= rnd
        parts.append(f"{policy}: over Nyquist-NOMA={g_noma:.2f}%, over Nyquist-OMA={g_oma:.2f}%, "
                     f"proposed={ftn:.2f} random={rnd:.2f}")
    any_oma = best_oma >= 50.0
    return any_oma and beats_random, "; ".join(parts)


# 11. curve overlap at the packing limit

def criterion_11(trials=500):
    grid = (0.0, 10.0, 20.0, 30.0, 40.0)
    base = ExperimentConfig(users=32, beta=BETA, snr_grid=grid, trials=trials, seed=SEED,
                            schemes=("noma-proposed",), signalings=("ftn",))
    at_limit = run_asr_sweep(base.with_(alpha=ALPHA)).series("noma-proposed", "ftn")
    gaps = []
    for alpha in (0.5, 0.4):
        below = run_asr_sweep(base.with_(alpha=alpha)).series("noma-proposed", "ftn")
        gaps.append(np.abs(below / at_limit - 1.0))
    gap40 = max(g[-1] for g in gaps)
    # other roll-off at its own limit, reported only
    other = run_asr_sweep(base.with_(beta=0.3, alpha=1 / 1.3)).series("noma-proposed", "ftn")
    info = 100 * abs(other[-1] / at_limit[-1] - 1)
    return gap40 <= 0.03, (f"alpha<=1/(1+beta) gap at 40 dB={100 * gap40:.3g}% (<=3%); "
                           f"beta=0.3 vs 0.5 at their limits: {info:.2f}% (informational)")


CRITERIA = [
    (1, "reflection pairing matches exhaustive optimum", criterion_1),
    (2, "four-user scheme ordering", criterion_2),
    (3, "fairness and power-split range", criterion_3),
    (4, "pair sum rate monotone in strong share", criterion_4),
    (5, "folded-spectrum identities", criterion_5),
    (6, "zero-forcing certification", criterion_6),
    (7, "SC gains at 40 dB", criterion_7),
    (8, "user-count sweep at 20 dB", criterion_8),
    (9, "outage ordering", criterion_9),
    (10, "MIMO gains at 40 dB", criterion_10),
    (11, "curve overlap at the packing limit", criterion_11),
]


@pytest.mark.parametrize("number, name, fn", CRITERIA, ids=[f"criterion_{n}" for n, _, _ in CRITERIA])
def test_criterion(number, name, fn):
    passed, detail = fn()
    line = record(number, name, passed, detail)
    assert passed, line


if __name__ == "__main__":
    only = {int(a) for a in sys.argv[1:]}
    for n, name, fn in CRITERIA:
        if not only or n in only:
            record(n, name, *fn())
    sys.exit(0 if all(r[2] for r in RESULTS) else 1)
