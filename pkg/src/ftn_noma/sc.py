"""Single-carrier FTN-NOMA: rates, fairness power split and user pairing.

User indices are 0-based positions in an ascending-gain ``ScUserSet``, so
user ``0`` is the weakest and ``2K - 1`` the strongest.  All rate functions
broadcast over array arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DomainError, SizeError
from .numint import DEFAULT_QUADRATURE, Quadrature, graded_points
from .waveform import WaveformConfig, band_edge_breakpoints, folded_spectrum, stopband_edge

__all__ = [
    "ScPair",
    "PairingScheme",
    "spectral_rate",
    "rate_breakpoints",
    "nyquist_rate",
    "power_split",
    "rate_strong",
    "rate_weak",
    "rate_oma",
    "rate_strong_nyquist",
    "rate_weak_nyquist",
    "rate_oma_nyquist",
    "pair_rates",
    "pair_reflection",
    "pair_adjacent",
    "pair_random",
    "pair_from_indices",
    "scheme_asr",
    "perfect_matchings",
    "brute_force_best_pairing",
    "MAX_BRUTE_FORCE_USERS",
]

MAX_BRUTE_FORCE_USERS = 10
_LN2 = math.log(2.0)
_TIE_RTOL = 1e-12


def rate_breakpoints(cfg: WaveformConfig) -> tuple[float, ...]:
    """Panel breakpoints for rate integrals: band edges plus, where the folded
    spectrum decays to zero inside ``(0, pi)``, points graded toward that edge."""
    pts = band_edge_breakpoints(cfg)
    edge = stopband_edge(cfg)
    if edge < math.pi and cfg.beta > 0:
        pts = pts + graded_points(math.pi * cfg.alpha * (1.0 - cfg.beta), edge)
    return pts


@lru_cache(maxsize=4096)
def _spectral_nodes(cfg: WaveformConfig, quad: Quadrature):
    quad = quad.with_breakpoints(quad.breakpoints + rate_breakpoints(cfg))
    nodes, weights = quad.rule()
    g = folded_spectrum(nodes, cfg)
    g.setflags(write=False)
    return g, weights


def spectral_rate(x, cfg: WaveformConfig, quad: Quadrature | None = None):
    """``(1 / (pi alpha (1 + beta))) * int_0^pi log2(1 + x G(omega)) d omega``.

    ``x`` is the received SNR factor (power share times gamma times
    ``|h|^2``) and may be an array of any shape.
    """
    g, weights = _spectral_nodes(cfg, DEFAULT_QUADRATURE if quad is None else quad)
    x = np.asarray(x, dtype=float)
    vals = np.log1p(x[..., None] * g) @ weights
    out = vals * (cfg.rate_scale / _LN2)
    return float(out) if out.ndim == 0 else out


def nyquist_rate(x, cfg: WaveformConfig):
    """Closed form ``log2(1 + x T_N) / (1 + beta)`` of ``spectral_rate`` at ``alpha = 1``."""
    x = np.asarray(x, dtype=float)
    out = np.log1p(x * cfg.t_nyquist) / (_LN2 * (1.0 + cfg.beta))
    return float(out) if out.ndim == 0 else out


def _check_nonneg(**kw):
    for name, v in kw.items():
        if np.any(np.asarray(v) < 0):
            raise DomainError(f"{name} must be non-negative")


def power_split(gamma, weak_gain_sq, t_nyquist=1.0):
    """Strong-user power share ``eps_n`` maximizing the pair sum rate under fairness.

    ``eps_n = (sqrt(1 + x) - 1) / x`` with ``x = gamma |h_m|^2 T_N`` the
    weak user's Nyquist SNR.  Always in ``(0, 0.5]``; for ``x`` below 1e-12
    the series ``0.5 - x / 8`` replaces the cancelling quotient.
    """
    _check_nonneg(gamma=gamma, weak_gain_sq=weak_gain_sq)
    if not t_nyquist > 0:
        raise DomainError("t_nyquist must be positive")
    x = np.asarray(gamma, dtype=float) * np.asarray(weak_gain_sq, dtype=float) * t_nyquist
    small = x < 1e-12
    xs = np.where(small, 1.0, x)
    # (sqrt(1+x)-1)/x == 1/(sqrt(1+x)+1), which has no cancellation
    eps = np.where(small, 0.5 - x / 8.0, 1.0 / (np.sqrt(1.0 + xs) + 1.0))
    return float(eps) if eps.ndim == 0 else eps


def _check_eps(eps):
    e = np.asarray(eps)
    if np.any(e < 0) or np.any(e > 1):
        raise DomainError("power share must lie in [0, 1]")


def rate_strong(eps_n, gamma, strong_gain_sq, cfg: WaveformConfig, quad=None):
    """FTN rate of the strong user after cancelling the weak user's signal."""
    _check_eps(eps_n)
    x = np.asarray(eps_n, dtype=float) * gamma * np.asarray(strong_gain_sq, dtype=float)
    return spectral_rate(x, cfg, quad)


def rate_weak(eps_n, gamma, weak_gain_sq, cfg: WaveformConfig, quad=None):
    """FTN rate of the weak user, treating the strong user's share as noise.

    Uses ``log2(1 + a(1-e)G / (e a G + 1/gamma)) = log2(1 + gamma a G) -
    log2(1 + e gamma a G)``, which also covers ``gamma = 0``.
    """
    _check_eps(eps_n)
    x = gamma * np.asarray(weak_gain_sq, dtype=float)
    return spectral_rate(x, cfg, quad) - spectral_rate(np.asarray(eps_n) * x, cfg, quad)


def rate_oma(gamma, gain_sq, cfg: WaveformConfig, quad=None):
    """FTN rate of a user under orthogonal access (half the resource)."""
    return 0.5 * spectral_rate(gamma * np.asarray(gain_sq, dtype=float), cfg, quad)


def rate_strong_nyquist(eps_n, gamma, gain_sq, cfg: WaveformConfig):
    _check_eps(eps_n)
    return nyquist_rate(np.asarray(eps_n) * gamma * np.asarray(gain_sq, dtype=float), cfg)


def rate_weak_nyquist(eps_n, gamma, gain_sq, cfg: WaveformConfig):
    _check_eps(eps_n)
    x = gamma * np.asarray(gain_sq, dtype=float)
    return nyquist_rate(x, cfg) - nyquist_rate(np.asarray(eps_n) * x, cfg)


def rate_oma_nyquist(gamma, gain_sq, cfg: WaveformConfig):
    return 0.5 * nyquist_rate(gamma * np.asarray(gain_sq, dtype=float), cfg)


def pair_rates(eps_n, gamma, weak_gain_sq, strong_gain_sq, cfg, signaling="ftn", quad=None):
    """``(weak_rate, strong_rate)`` of one or many pairs under the given signalling."""
    if signaling == "ftn":
        return (rate_weak(eps_n, gamma, weak_gain_sq, cfg, quad),
                rate_strong(eps_n, gamma, strong_gain_sq, cfg, quad))
    if signaling == "nyquist":
        return (rate_weak_nyquist(eps_n, gamma, weak_gain_sq, cfg),
                rate_strong_nyquist(eps_n, gamma, strong_gain_sq, cfg))
    raise DomainError(f"unknown signaling {signaling!r}")


@dataclass(frozen=True)
class ScPair:
    weak_index: int
    strong_index: int
    eps_strong: float = 0.5

    @property
    def eps_weak(self) -> float:
        return 1.0 - self.eps_strong


@dataclass(frozen=True)
class PairingScheme:
    """A perfect matching of users into (weak, strong) pairs."""

    pairs: tuple[ScPair, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(self.pairs))
        seen = [i for p in self.pairs for i in (p.weak_index, p.strong_index)]
        if len(seen) != len(set(seen)):
            raise DomainError("a user appears in more than one pair")

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def index_pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple((p.weak_index, p.strong_index) for p in self.pairs)

    def is_perfect_matching(self, n_users: int) -> bool:
        seen = sorted(i for p in self.pairs for i in (p.weak_index, p.strong_index))
        return seen == list(range(n_users))

    def matching_key(self) -> tuple[tuple[int, int], ...]:
        """Canonical form used for lexicographic tie-breaking."""
        return tuple(sorted(tuple(sorted(p)) for p in self.index_pairs()))


def _gain_sq(users):
    return np.abs(np.asarray(users.gains)) ** 2


def pair_from_indices(users, index_pairs, gamma=None) -> PairingScheme:
    """Build a scheme from unordered index pairs.

    Inside each pair the user with the smaller gain becomes the weak user
    (an exact tie keeps the lower index weak).  When ``gamma`` is given each
    pair's ``eps_strong`` is set by ``power_split`` on the weak gain.
    """
    g2 = _gain_sq(users)
    t = getattr(users, "t_nyquist", 1.0)
    pairs = []
    for i, j in index_pairs:
        i, j = int(i), int(j)
        if (g2[j], j) < (g2[i], i):
            i, j = j, i
        eps = 0.5 if gamma is None else power_split(gamma, g2[i], t)
        pairs.append(ScPair(i, j, float(eps)))
    return PairingScheme(tuple(pairs))


def pair_reflection(users, gamma=None) -> PairingScheme:
    """Pair user ``k`` with user ``2K - 1 - k`` (weakest with strongest)."""
    n = len(users.gains)
    return pair_from_indices(users, [(k, n - 1 - k) for k in range(n // 2)], gamma)


def pair_adjacent(users, gamma=None) -> PairingScheme:
    """Pair neighbours in gain order: ``(0, 1), (2, 3), ...``."""
    n = len(users.gains)
    return pair_from_indices(users, [(k, k + 1) for k in range(0, n, 2)], gamma)


def pair_random(users, seed, gamma=None) -> PairingScheme:
    """Uniformly random perfect matching; roles follow gain order within each pair.

    ``seed`` may be an int or a ``numpy.random.Generator``.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    perm = rng.permutation(len(users.gains))
    return pair_from_indices(users, perm.reshape(-1, 2), gamma)


def scheme_asr(scheme: PairingScheme, users, gamma, cfg: WaveformConfig,
               signaling="ftn", quad=None) -> float:
    """Sum over pairs of weak plus strong rate, with each pair's stored ``eps_strong``."""
    if len(scheme) == 0:
        return 0.0
    g2 = _gain_sq(users)
    weak = np.array([p.weak_index for p in scheme])
    strong = np.array([p.strong_index for p in scheme])
    eps = np.array([p.eps_strong for p in scheme])
    rw, rs = pair_rates(eps, gamma, g2[weak], g2[strong], cfg, signaling, quad)
    return float(np.sum(rw) + np.sum(rs))


def perfect_matchings(items):
    """Yield every perfect matching of ``items`` as a tuple of 2-tuples.

    The first element is always paired first, so matchings come out in
    lexicographic order when ``items`` is sorted.
    """
    items = tuple(items)
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for i, partner in enumerate(rest):
        for tail in perfect_matchings(rest[:i] + rest[i + 1:]):
            yield ((first, partner),) + tail


def brute_force_best_pairing(users, gamma, cfg: WaveformConfig, quad=None):
    """Exhaustive search over all perfect matchings for the maximum sum rate.

    Returns ``(scheme, asr)``.  Each pair uses the fairness power split of
    its weak user.  Ties go to the lexicographically smallest matching.

    Raises
    ------
    SizeError
        For more than ``MAX_BRUTE_FORCE_USERS`` users.
    """
    n = len(users.gains)
    if n > MAX_BRUTE_FORCE_USERS:
        raise SizeError(f"exhaustive pairing is capped at {MAX_BRUTE_FORCE_USERS} users, got {n}")
    if n % 2:
        raise DomainError("user count must be even")
    g2 = _gain_sq(users)
    t = getattr(users, "t_nyquist", 1.0)
    # value of every unordered pair, evaluated in one batch
    ii, jj = np.triu_indices(n, 1)
    swap = (g2[jj] < g2[ii])
    weak = np.where(swap, jj, ii)
    strong = np.where(swap, ii, jj)
    eps = power_split(gamma, g2[weak], t)
    rw, rs = pair_rates(eps, gamma, g2[weak], g2[strong], cfg, "ftn", quad)
    value = {(int(i), int(j)): float(v) for i, j, v in zip(ii, jj, np.atleast_1d(rw + rs))}

    best, best_val = None, -math.inf
    for matching in perfect_matchings(range(n)):
        total = math.fsum(value[p] for p in matching)
        # totals equal up to rounding count as ties; the earlier matching stays
        if best is None or total > best_val + _TIE_RTOL * max(1.0, abs(best_val)):
            best, best_val = matching, total
    return pair_from_indices(users, best, gamma), best_val
