"""Raised-cosine pulse spectrum and its folded (alias-summed) form.

The composite response of a root-raised-cosine shaping filter followed by
its matched filter is the raised-cosine spectrum.  Sampling the matched
filter output every ``alpha * t_nyquist`` folds that spectrum onto
``omega in [0, pi]``; the folded spectrum is the kernel of every rate
integral in this package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "WaveformConfig",
    "nyquist_period",
    "composite_spectrum",
    "folded_spectrum",
    "alias_range",
    "band_edge_breakpoints",
    "stopband_edge",
]


@dataclass(frozen=True)
class WaveformConfig:
    """Roll-off, packing ratio and Nyquist period of the signalling scheme.

    Parameters
    ----------
    beta : float
        Roll-off factor, ``0 <= beta <= 1``.
    alpha : float
        Symbol packing ratio, ``0 < alpha <= 1``; ``alpha == 1`` is Nyquist
        signalling.
    t_nyquist : float
        Nyquist symbol period.  Defaults to 1 (normalized time units).
    """

    beta: float = 0.5
    alpha: float = 1.0
    t_nyquist: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.beta <= 1.0:
            raise DomainError(f"beta must lie in [0, 1], got {self.beta!r}")
        if not 0.0 < self.alpha <= 1.0:
            raise DomainError(f"alpha must lie in (0, 1], got {self.alpha!r}")
        if not self.t_nyquist > 0.0:
            raise DomainError(f"t_nyquist must be positive, got {self.t_nyquist!r}")

    @property
    def rate_scale(self) -> float:
        """Prefactor ``1 / (pi * alpha * (1 + beta))`` of the rate integrals."""
        return 1.0 / (math.pi * self.alpha * (1.0 + self.beta))

    def nyquist(self) -> "WaveformConfig":
        """Same pulse, signalled at the Nyquist rate."""
        return WaveformConfig(self.beta, 1.0, self.t_nyquist)

    @classmethod
    def from_bandwidth(cls, total_bandwidth, beta, alpha=1.0):
        return cls(beta, alpha, nyquist_period(total_bandwidth, beta))


def nyquist_period(total_bandwidth: float, beta: float) -> float:
    """Nyquist period ``(1 + beta) / (2 W_T)`` for total bandwidth ``W_T``."""
    if not total_bandwidth > 0.0:
        raise DomainError(f"total bandwidth must be positive, got {total_bandwidth!r}")
    if not 0.0 <= beta <= 1.0:
        raise DomainError(f"beta must lie in [0, 1], got {beta!r}")
    return (1.0 + beta) / (2.0 * total_bandwidth)


def composite_spectrum(f, cfg: WaveformConfig):
    """Raised-cosine spectrum ``|G~(f)|^2`` at frequency ``f`` (cycles per unit time).

    Accepts scalars or arrays.  Flat at ``t_nyquist`` up to
    ``(1 - beta) / (2 T)``, cosine roll-off to zero at ``(1 + beta) / (2 T)``.
    """
    t = cfg.t_nyquist
    beta = cfg.beta
    af = np.abs(np.asarray(f, dtype=float))
    f_pass = (1.0 - beta) / (2.0 * t)
    f_stop = (1.0 + beta) / (2.0 * t)
    out = np.where(af <= f_pass, t, 0.0)
    if beta > 0.0:
        rolloff = (af > f_pass) & (af <= f_stop)
        # clip keeps cos() argument bounded where the mask is False
        phase = np.pi * t * np.clip(af - f_pass, 0.0, beta / t) / beta
        out = np.where(rolloff, 0.5 * t * (1.0 + np.cos(phase)), out)
    if out.ndim == 0:
        return float(out)
    return out


def alias_range(cfg: WaveformConfig) -> range:
    """Alias indices ``k`` that can contribute to the folded spectrum.

    Every index outside this range shifts the argument beyond the spectral
    support for all ``omega in [0, pi]``.
    """
    span = (1.0 + cfg.alpha * (1.0 + cfg.beta)) / 2.0
    return range(math.ceil(-span) - 1, math.ceil(span) + 2)


def folded_spectrum(omega, cfg: WaveformConfig, aliases=None):
    """Sampled filter function ``G(omega)`` on ``[0, pi]``.

    Sums the composite spectrum over the aliases
    ``omega / (2 pi alpha T) + k / (alpha T)``.  ``aliases`` overrides the
    minimal index set (used to check the truncation against a wide sum).

    Raises
    ------
    DomainError
        If any ``omega`` lies outside ``[0, pi]``.
    """
    w = np.asarray(omega, dtype=float)
    if np.any(w < 0.0) or np.any(w > math.pi) or np.any(np.isnan(w)):
        raise DomainError("omega must lie in [0, pi]")
    at = cfg.alpha * cfg.t_nyquist
    f0 = w / (2.0 * math.pi * at)
    ks = alias_range(cfg) if aliases is None else aliases
    total = np.zeros_like(f0)
    for k in ks:
        total = total + composite_spectrum(f0 + k / at, cfg)
    # aliases of a Nyquist pulse sum to T up to rounding; keep the declared range
    total = np.clip(total, 0.0, cfg.t_nyquist)
    if total.ndim == 0:
        return float(total)
    return total


def stopband_edge(cfg: WaveformConfig) -> float:
    """``omega`` beyond which the folded spectrum vanishes (``pi`` if it never does)."""
    return min(math.pi, math.pi * cfg.alpha * (1.0 + cfg.beta))


def band_edge_breakpoints(cfg: WaveformConfig) -> tuple[float, ...]:
    """Interior points of ``(0, pi)`` where the folded spectrum has a kink.

    A band edge ``+-(1 +- beta) / (2T)`` of alias ``k`` maps to
    ``omega = pi * alpha * (+-(1 +- beta)) - 2 pi k``; the result is
    independent of ``t_nyquist``.
    """
    edges = set()
    for k in alias_range(cfg):
        for sign in (1.0, -1.0):
            for edge in (1.0 - cfg.beta, 1.0 + cfg.beta):
                w = math.pi * cfg.alpha * sign * edge - 2.0 * math.pi * k
                if 0.0 < w < math.pi:
                    edges.add(w)
    return tuple(sorted(edges))
