"""User placement and Rayleigh-faded channels with reproducible seeding.

Every draw is keyed by ``(seed, substream)``.  The substream is the Monte
Carlo trial index, so trials can be generated in any order or in parallel
and still give bit-identical channels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "Geometry",
    "ScUserSet",
    "MimoChannelSet",
    "make_rng",
    "draw_distances",
    "pathloss_amplitude",
    "draw_sc_users",
    "draw_mimo_channels",
    "MIN_DISTANCE",
]

MIN_DISTANCE = 1.0


@dataclass(frozen=True)
class Geometry:
    """Cell geometry.  Gains are unit-power Rayleigh at ``reference_distance``."""

    cell_radius: float = 500.0
    reference_distance: float = 100.0
    pathloss_exponent: float = 3.0

    def __post_init__(self):
        if not 0.0 < self.reference_distance <= self.cell_radius:
            raise DomainError("need 0 < reference_distance <= cell_radius")
        if self.pathloss_exponent != 3.0:
            raise DomainError("only the cubic pathloss law is supported")
        if self.cell_radius < MIN_DISTANCE:
            raise DomainError(f"cell_radius must be at least {MIN_DISTANCE} m")


@dataclass(frozen=True)
class ScUserSet:
    """Scalar channel gains sorted by ascending magnitude."""

    gains: np.ndarray
    distances: np.ndarray
    t_nyquist: float = 1.0

    def __len__(self):
        return len(self.gains)

    @property
    def gain_sq(self) -> np.ndarray:
        return np.abs(self.gains) ** 2

    @classmethod
    def from_gains(cls, gains, distances=None, t_nyquist=1.0):
        """Wrap arbitrary gains, sorting them ascending by magnitude."""
        gains = np.asarray(gains, dtype=complex)
        distances = (np.full(gains.shape, np.nan) if distances is None
                     else np.asarray(distances, dtype=float))
        order = np.argsort(np.abs(gains), kind="stable")
        return cls(gains[order], distances[order], t_nyquist)


@dataclass(frozen=True)
class MimoChannelSet:
    """Per-user ``N x K`` channel matrices sorted by descending Frobenius norm."""

    channels: np.ndarray  # shape (2K, N, K)
    distances: np.ndarray

    def __len__(self):
        return len(self.channels)

    @property
    def n_rx(self) -> int:
        return self.channels.shape[1]

    @property
    def n_tx(self) -> int:
        return self.channels.shape[2]

    @property
    def frobenius_sq(self) -> np.ndarray:
        return np.sum(np.abs(self.channels) ** 2, axis=(1, 2))

    @classmethod
    def from_channels(cls, channels, distances=None):
        channels = np.asarray(channels, dtype=complex)
        distances = (np.full(len(channels), np.nan) if distances is None
                     else np.asarray(distances, dtype=float))
        norms = np.sum(np.abs(channels) ** 2, axis=(1, 2))
        order = np.argsort(-norms, kind="stable")
        return cls(channels[order], distances[order])


def make_rng(seed: int, substream: int = 0, *keys: int) -> np.random.Generator:
    """Counter-based (Philox) generator for one substream of ``seed``.

    Extra ``keys`` select further independent streams within a substream.
    """
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(substream),) + tuple(int(k) for k in keys))
    return np.random.Generator(np.random.Philox(ss))


def _check_count(count):
    if count < 2 or count % 2:
        raise DomainError(f"user count must be even and >= 2, got {count}")


def draw_distances(rng, count, geom: Geometry) -> np.ndarray:
    """Area-uniform distances in the disc, clamped below at ``MIN_DISTANCE``."""
    u = 1.0 - rng.random(count)  # uniform on (0, 1]
    return np.maximum(geom.cell_radius * np.sqrt(u), MIN_DISTANCE)


def pathloss_amplitude(distance, geom: Geometry):
    """Amplitude factor ``(reference / d)^(exponent / 2)``; exactly 1 at the reference."""
    return (geom.reference_distance / np.asarray(distance, dtype=float)) ** (geom.pathloss_exponent / 2.0)


def _complex_normal(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def draw_sc_users(count: int, geom: Geometry = Geometry(), seed: int = 0,
                  substream: int = 0, t_nyquist: float = 1.0) -> ScUserSet:
    """Draw ``count`` single-antenna users, sorted ascending by ``|h|``."""
    _check_count(count)
    rng = make_rng(seed, substream)
    d = draw_distances(rng, count, geom)
    h = _complex_normal(rng, count) * pathloss_amplitude(d, geom)
    return ScUserSet.from_gains(h, d, t_nyquist)


def draw_mimo_channels(count: int, n_rx: int, n_tx: int, geom: Geometry = Geometry(),
                       seed: int = 0, substream: int = 0) -> MimoChannelSet:
    """Draw ``count`` users with i.i.d. Rayleigh ``n_rx x n_tx`` channels.

    Sorted by descending Frobenius norm.  The draw order matches
    ``draw_sc_users``, so ``n_rx = n_tx = 1`` yields the same gains.
    """
    _check_count(count)
    if n_rx < 1 or n_tx < 1:
        raise DomainError("antenna counts must be positive")
    rng = make_rng(seed, substream)
    d = draw_distances(rng, count, geom)
    h = _complex_normal(rng, (count, n_rx, n_tx)) * pathloss_amplitude(d, geom)[:, None, None]
    return MimoChannelSet.from_channels(h, d)
