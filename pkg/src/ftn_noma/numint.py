"""Fixed-node composite Gauss-Legendre quadrature on ``[0, pi]``."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, NumericalError

__all__ = ["Quadrature", "DEFAULT_QUADRATURE", "integrate", "graded_points"]

# panel edges closer than this are merged
_MERGE_TOL = 1e-12


@lru_cache(maxsize=None)
def _legendre(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@dataclass(frozen=True)
class Quadrature:
    """Composite Gauss-Legendre rule over ``[0, pi]``.

    The interval is cut into ``panels`` equal panels and additionally split
    at every breakpoint; each resulting piece gets ``nodes_per_panel``
    Gauss-Legendre nodes.
    """

    nodes_per_panel: int = 32
    panels: int = 8
    breakpoints: tuple[float, ...] = ()

    def __post_init__(self):
        if self.nodes_per_panel < 2:
            raise DomainError("nodes_per_panel must be >= 2")
        if self.panels < 1:
            raise DomainError("panels must be >= 1")
        bp = tuple(float(b) for b in self.breakpoints)
        if any(not 0.0 < b < math.pi for b in bp):
            raise DomainError("breakpoints must lie strictly inside (0, pi)")
        if any(b2 <= b1 for b1, b2 in zip(bp, bp[1:])):
            raise DomainError("breakpoints must be strictly increasing")
        object.__setattr__(self, "breakpoints", bp)

    def with_breakpoints(self, breakpoints) -> "Quadrature":
        return Quadrature(self.nodes_per_panel, self.panels, tuple(sorted(set(breakpoints))))

    def refined(self, factor: int = 2) -> "Quadrature":
        return Quadrature(self.nodes_per_panel, self.panels * factor, self.breakpoints)

    def edges(self) -> np.ndarray:
        edges = np.union1d(np.linspace(0.0, math.pi, self.panels + 1), self.breakpoints)
        keep = np.concatenate(([True], np.diff(edges) > _MERGE_TOL))
        edges = edges[keep]
        edges[-1] = math.pi
        return edges

    def rule(self) -> tuple[np.ndarray, np.ndarray]:
        """Nodes and weights of the composite rule, both flat arrays."""
        return _rule(self)


@lru_cache(maxsize=4096)
def _rule(quad: Quadrature):
    x, w = _legendre(quad.nodes_per_panel)
    edges = quad.edges()
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


DEFAULT_QUADRATURE = Quadrature()


def graded_points(start: float, edge: float, levels: int = 10, ratio: float = 0.25) -> tuple[float, ...]:
    """Points ``edge - (edge - start) * ratio**j`` for ``j = 1..levels``.

    Used as breakpoints to resolve an integrand that changes sharply just
    below ``edge``; points outside ``(0, pi)`` are dropped.
    """
    if not start < edge:
        return ()
    pts = (edge - (edge - start) * ratio ** j for j in range(1, levels + 1))
    return tuple(p for p in pts if 0.0 < p < math.pi)


def integrate(f, breakpoints=(), quad: Quadrature | None = None) -> float:
    """Approximate the integral of ``f`` over ``[0, pi]``.

    ``f`` is called once with the array of all nodes and must return an
    array of the same shape.  Panels are split at ``breakpoints`` in
    addition to those already carried by ``quad``.

    Raises
    ------
    NumericalError
        If ``f`` returns a non-finite value; the message names the node.
    """
    quad = DEFAULT_QUADRATURE if quad is None else quad
    if breakpoints:
        quad = quad.with_breakpoints(tuple(quad.breakpoints) + tuple(breakpoints))
    nodes, weights = quad.rule()
    values = np.asarray(f(nodes), dtype=float)
    bad = ~np.isfinite(values)
    if np.any(bad):
        node = nodes[np.argmax(bad)]
        raise NumericalError(f"integrand is not finite at omega={node!r}")
    return float(values @ weights)
