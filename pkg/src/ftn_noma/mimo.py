"""MIMO-NOMA linear stage: strong-user selection, ZF precoding, weak-user
combining and pairing, and the resulting per-pair rates.

Channel matrices are ``N x K`` (receive x transmit).  Precoders are stored
as the columns of a ``K x K`` matrix ``W``; combiners as rows of ``K x N``
arrays indexed by the precoder slot.  The strong user of every pair uses
equal-gain combining and the weak user a combiner ``H u`` whose ``u``
cancels the other slots' precoders.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import MimoChannelSet
from .errors import ConstructionError, DomainError
from .linalg import chordal_metric, gram_schmidt_columns, null_space_vector
from .sc import (power_split, rate_oma, rate_oma_nyquist, rate_strong,
                 rate_strong_nyquist, rate_weak, rate_weak_nyquist)
from .waveform import WaveformConfig

__all__ = [
    "STRONG_POLICIES",
    "WEAK_POLICIES",
    "LinearStage",
    "MimoPairReport",
    "egc_combiner",
    "equivalent_channels",
    "dominant_direction",
    "select_strong_users",
    "zf_precoders",
    "weak_combiner",
    "weak_selection_scores",
    "pair_weak_users",
    "build_stage",
    "build_random_stage",
    "effective_gains",
    "power_split_mimo",
    "rate_strong_mimo",
    "rate_weak_mimo",
    "rate_oma_strong_mimo",
    "rate_oma_weak_mimo",
    "evaluate_stage",
    "residual_interference",
]

STRONG_POLICIES = ("literal", "rank1-chordal", "norm")
WEAK_POLICIES = ("literal", "max-gain")

_TIE_TOL = 1e-12
_ZF_TOL = 1e-9


@dataclass(frozen=True)
class LinearStage:
    """Precoders, combiners and the user pairing for one channel draw.

    ``pairing[n] = (strong_user, weak_user)`` are indices into the channel
    set served by precoder column ``n``.
    """

    precoders: np.ndarray          # (K, K), column n is w_n
    strong_combiners: np.ndarray   # (K, N)
    weak_combiners: np.ndarray     # (K, N)
    pairing: tuple[tuple[int, int], ...]

    @property
    def n_pairs(self) -> int:
        return len(self.pairing)

    @property
    def strong_users(self) -> tuple[int, ...]:
        return tuple(s for s, _ in self.pairing)

    @property
    def weak_users(self) -> tuple[int, ...]:
        return tuple(w for _, w in self.pairing)


@dataclass(frozen=True)
class MimoPairReport:
    """Per-pair power split, effective gains and rates (arrays of length K)."""

    eps_strong: np.ndarray
    h_weak: np.ndarray
    h_strong: np.ndarray
    rate_weak: np.ndarray
    rate_strong: np.ndarray
    rate_oma_weak: np.ndarray
    rate_oma_strong: np.ndarray

    @property
    def eps_weak(self) -> np.ndarray:
        return 1.0 - self.eps_strong

    @property
    def noma_sum(self) -> float:
        return float(np.sum(self.rate_weak) + np.sum(self.rate_strong))

    @property
    def oma_sum(self) -> float:
        return float(np.sum(self.rate_oma_weak) + np.sum(self.rate_oma_strong))


def egc_combiner(n_rx: int) -> np.ndarray:
    """Equal-gain combiner ``[1, ..., 1] / sqrt(N)``."""
    return np.full(n_rx, 1.0 / np.sqrt(n_rx), dtype=complex)


def equivalent_channels(strong_channels, strong_combiners) -> np.ndarray:
    """Rows ``g_n = v_n^H H_n`` (shape ``K x K``)."""
    h = np.asarray(strong_channels, dtype=complex)
    v = np.asarray(strong_combiners, dtype=complex)
    return np.einsum("kn,knm->km", v.conj(), h)


def dominant_direction(h) -> np.ndarray:
    """Dominant left singular vector of ``h`` as an ``N x 1`` column."""
    u, _, _ = np.linalg.svd(np.asarray(h, dtype=complex), full_matrices=False)
    return u[:, :1]


def _argbest(scores, norms, candidates, maximize=True):
    """Index into ``candidates`` of the best score; near-ties go to larger norm, then lower index."""
    scores = np.asarray(scores, dtype=float)
    best = scores.max() if maximize else scores.min()
    tol = _TIE_TOL * max(1.0, abs(best))
    close = np.abs(scores - best) <= tol
    tied = [c for c, ok in zip(candidates, close) if ok]
    return min(tied, key=lambda c: (-norms[c], c))


def select_strong_users(channels: MimoChannelSet, policy: str = "literal",
                        candidates=None, count=None):
    """Order the strong users for the precoder slots.

    The candidate pool defaults to the ``K = n_tx`` users of largest
    Frobenius norm and ``count`` to the pool size.  The first pick is the
    largest norm; each later pick maximizes the chordal metric against the
    concatenation of the users picked so far.

    Policies: ``"literal"`` uses the full channel matrices,
    ``"rank1-chordal"`` their dominant left singular vectors, and
    ``"norm"`` keeps pure Frobenius order.

    Returns
    -------
    order : list of int
        Selected users in slot order.
    basis : ndarray
        Orthonormal basis of the accumulated matrix.
    """
    if policy not in STRONG_POLICIES:
        raise DomainError(f"unknown strong-selection policy {policy!r}")
    k = channels.n_tx
    pool = list(range(min(k, len(channels)))) if candidates is None else [int(c) for c in candidates]
    if not pool:
        raise DomainError("no strong-user candidates")
    count = len(pool) if count is None else count
    if not 1 <= count <= len(pool):
        raise DomainError(f"cannot select {count} users from {len(pool)} candidates")
    norms = channels.frobenius_sq
    if policy == "rank1-chordal":
        reps = {j: dominant_direction(channels.channels[j]) for j in pool}
    else:
        reps = {j: channels.channels[j] for j in pool}

    first = _argbest([norms[j] for j in pool], norms, pool)
    order = [first]
    pool.remove(first)
    acc = reps[first]
    while len(order) < count:
        if policy == "norm":
            pick = _argbest([norms[j] for j in pool], norms, pool)
        else:
            # the norm weight always comes from the full channel matrix
            scores = [chordal_metric(acc, reps[j])
                      * (np.sqrt(norms[j]) / np.linalg.norm(reps[j])) ** 0.1
                      for j in pool]
            pick = _argbest(scores, norms, pool)
        order.append(pick)
        pool.remove(pick)
        acc = np.hstack([acc, reps[pick]])
    return order, gram_schmidt_columns(acc)


def zf_precoders(strong_channels, strong_combiners) -> np.ndarray:
    """Unit-norm zero-forcing precoders, one column per slot.

    ``w_n`` spans the null space of the other slots' equivalent channels.
    With a single slot, ``w_1`` is the matched direction ``g_1^H / ||g_1||``.

    Raises
    ------
    ConstructionError
        If the equivalent channels are rank deficient; names the slot.
    """
    g = equivalent_channels(strong_channels, strong_combiners)
    k = g.shape[0]
    if g.shape[1] != k:
        raise DomainError("need one slot per transmit antenna")
    if k == 1:
        ng = np.linalg.norm(g[0])
        if ng == 0:
            raise ConstructionError("slot 0: zero equivalent channel")
        return (g[0].conj() / ng)[:, None]
    w = np.empty((k, k), dtype=complex)
    for n in range(k):
        others = np.delete(g, n, axis=0)
        try:
            wn = null_space_vector(others)
        except ConstructionError as exc:
            raise ConstructionError(f"slot {n}: {exc}") from exc
        gn = np.linalg.norm(g[n])
        if gn == 0 or abs(g[n] @ wn) <= 1e-12 * gn:
            raise ConstructionError(f"slot {n}: equivalent channel lies in the span of the others")
        w[:, n] = wn
    scale = np.linalg.norm(g, axis=1)
    resid = np.abs(g @ w)
    np.fill_diagonal(resid, 0.0)
    if np.any(resid > _ZF_TOL * scale[:, None]):
        raise ConstructionError("zero-forcing residual above tolerance")
    return w


def weak_combiner(weak_channel, precoders, own_index: int) -> np.ndarray:
    """Combiner ``v = H u`` cancelling every precoder except ``own_index``.

    ``u`` is a unit vector orthogonal to ``H^H H w_k`` for all ``k != n``,
    which makes ``v^H H w_k = 0``.  ``v`` is not normalized.
    """
    h = np.asarray(weak_channel, dtype=complex)
    w = np.asarray(precoders, dtype=complex)
    k = w.shape[1]
    others = [j for j in range(k) if j != own_index]
    ghat = (h.conj().T @ h @ w[:, others]).T  # rows ghat_k^T
    u = null_space_vector(ghat.conj(), dim=k)
    v = h @ u
    nv = np.linalg.norm(v)
    if nv == 0.0:
        raise ConstructionError(f"slot {own_index}: weak combiner vanishes")
    hn = np.linalg.norm(h)
    if others and np.max(np.abs(v.conj() @ h @ w[:, others])) > _ZF_TOL * nv * hn:
        raise ConstructionError(f"slot {own_index}: weak combiner residual above tolerance")
    return v


def weak_selection_scores(candidates, channels, precoders, slot, strong_user, policy="literal"):
    """Score every candidate weak user for precoder ``slot``.

    Returns ``(scores, combiners)``.  ``"literal"`` scores
    ``|v_j^H H_s w_i|^2`` with ``H_s`` the slot's strong-user channel (to
    be minimized); ``"max-gain"`` scores the candidate's own effective
    gain ``|v_j^H H_j w_i|^2 / ||v_j||^2`` (to be maximized).
    """
    h = channels.channels
    wi = precoders[:, slot]
    scores, combs = [], []
    for j in candidates:
        v = weak_combiner(h[j], precoders, slot)
        if policy == "literal":
            s = abs(v.conj() @ h[strong_user] @ wi) ** 2
        elif policy == "max-gain":
            s = abs(v.conj() @ h[j] @ wi) ** 2 / np.real(v.conj() @ v)
        else:
            raise DomainError(f"unknown weak-selection policy {policy!r}")
        scores.append(s)
        combs.append(v)
    return np.array(scores), combs


def pair_weak_users(strong_order, weak_pool, channels: MimoChannelSet, precoders,
                    policy: str = "literal"):
    """Assign one weak user to each precoder slot, greedily in slot order.

    Returns ``(pairing, weak_combiners)``.  Exact ties go to the lowest
    user index.
    """
    if policy not in WEAK_POLICIES:
        raise DomainError(f"unknown weak-selection policy {policy!r}")
    pool = sorted(weak_pool)
    if len(pool) != len(strong_order):
        raise DomainError("strong and weak sets must have equal size")
    pairing, combs = [], []
    for slot, strong in enumerate(strong_order):
        scores, cands = weak_selection_scores(pool, channels, precoders, slot, strong, policy)
        best = scores.min() if policy == "literal" else scores.max()
        pos = int(np.flatnonzero(scores == best)[0])
        pick = pool.pop(pos)
        pairing.append((strong, pick))
        combs.append(cands[pos])
    if pool:
        raise RuntimeError("weak pool not exhausted")
    return tuple(pairing), np.array(combs)


def build_stage(channels: MimoChannelSet, policy_strong="literal", policy_weak="literal") -> LinearStage:
    """Dynamic user pairing: strong selection, ZF precoders, weak pairing."""
    k, n = channels.n_tx, channels.n_rx
    if len(channels) != 2 * k:
        raise DomainError(f"expected {2 * k} users for {k} transmit antennas, got {len(channels)}")
    order, _ = select_strong_users(channels, policy_strong)
    v2 = np.tile(egc_combiner(n), (k, 1))
    w = zf_precoders(channels.channels[order], v2)
    weak_pool = range(k, 2 * k)
    pairing, v1 = pair_weak_users(order, weak_pool, channels, w, policy_weak)
    return LinearStage(w, v2, v1, pairing)


def build_random_stage(channels: MimoChannelSet, rng) -> LinearStage:
    """Random user pairing with the same precoding and combining rules.

    A random half of the users become strong users in random slot order;
    the other half are assigned to slots at random.
    """
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    k, n = channels.n_tx, channels.n_rx
    perm = rng.permutation(len(channels))
    strong, weak = [int(i) for i in perm[:k]], [int(i) for i in perm[k:]]
    v2 = np.tile(egc_combiner(n), (k, 1))
    w = zf_precoders(channels.channels[strong], v2)
    v1 = np.array([weak_combiner(channels.channels[j], w, i) for i, j in enumerate(weak)])
    return LinearStage(w, v2, v1, tuple(zip(strong, weak)))


def effective_gains(stage: LinearStage, channels: MimoChannelSet):
    """Scalar gains ``(h_weak, h_strong)`` per slot that replace the SC gains.

    ``h_weak = v1^H H1 w / ||v1||`` and ``h_strong = v2^H H2 w``.
    """
    h = channels.channels
    hw = np.empty(stage.n_pairs, dtype=complex)
    hs = np.empty(stage.n_pairs, dtype=complex)
    for n, (s, m) in enumerate(stage.pairing):
        w = stage.precoders[:, n]
        v1 = stage.weak_combiners[n]
        nv = np.linalg.norm(v1)
        if nv == 0:
            raise ConstructionError(f"slot {n}: zero weak combiner")
        hw[n] = (v1.conj() @ h[m] @ w) / nv
        hs[n] = stage.strong_combiners[n].conj() @ h[s] @ w
    return hw, hs


def power_split_mimo(gamma, stage, channels, t_nyquist=1.0):
    """Strong-user share per slot: the SC rule applied to the effective weak gain."""
    hw, _ = effective_gains(stage, channels)
    return power_split(gamma, np.abs(hw) ** 2, t_nyquist)


def _prepared(stage, channels, gamma, cfg, eps):
    hw, hs = effective_gains(stage, channels)
    if eps is None:
        eps = power_split(gamma, np.abs(hw) ** 2, cfg.t_nyquist)
    return np.asarray(eps, dtype=float), np.abs(hw) ** 2, np.abs(hs) ** 2


def rate_strong_mimo(stage, channels, gamma, cfg: WaveformConfig, signaling="ftn", eps=None, quad=None):
    eps, _, hs2 = _prepared(stage, channels, gamma, cfg, eps)
    if signaling == "nyquist":
        return rate_strong_nyquist(eps, gamma, hs2, cfg)
    return rate_strong(eps, gamma, hs2, cfg, quad)


def rate_weak_mimo(stage, channels, gamma, cfg: WaveformConfig, signaling="ftn", eps=None, quad=None):
    eps, hw2, _ = _prepared(stage, channels, gamma, cfg, eps)
    if signaling == "nyquist":
        return rate_weak_nyquist(eps, gamma, hw2, cfg)
    return rate_weak(eps, gamma, hw2, cfg, quad)


def rate_oma_strong_mimo(stage, channels, gamma, cfg: WaveformConfig, signaling="ftn", quad=None):
    _, _, hs2 = _prepared(stage, channels, gamma, cfg, 0.5)
    if signaling == "nyquist":
        return rate_oma_nyquist(gamma, hs2, cfg)
    return rate_oma(gamma, hs2, cfg, quad)


def rate_oma_weak_mimo(stage, channels, gamma, cfg: WaveformConfig, signaling="ftn", quad=None):
    _, hw2, _ = _prepared(stage, channels, gamma, cfg, 0.5)
    if signaling == "nyquist":
        return rate_oma_nyquist(gamma, hw2, cfg)
    return rate_oma(gamma, hw2, cfg, quad)


def evaluate_stage(stage, channels, gamma, cfg: WaveformConfig, signaling="ftn", quad=None) -> MimoPairReport:
    """All per-pair quantities of a stage in one pass."""
    hw, hs = effective_gains(stage, channels)
    hw2, hs2 = np.abs(hw) ** 2, np.abs(hs) ** 2
    eps = np.atleast_1d(power_split(gamma, hw2, cfg.t_nyquist))
    if signaling == "ftn":
        rw = rate_weak(eps, gamma, hw2, cfg, quad)
        rs = rate_strong(eps, gamma, hs2, cfg, quad)
        ow = rate_oma(gamma, hw2, cfg, quad)
        os_ = rate_oma(gamma, hs2, cfg, quad)
    elif signaling == "nyquist":
        rw = rate_weak_nyquist(eps, gamma, hw2, cfg)
        rs = rate_strong_nyquist(eps, gamma, hs2, cfg)
        ow = rate_oma_nyquist(gamma, hw2, cfg)
        os_ = rate_oma_nyquist(gamma, hs2, cfg)
    else:
        raise DomainError(f"unknown signaling {signaling!r}")
    return MimoPairReport(eps, hw, hs, *(np.atleast_1d(r) for r in (rw, rs, ow, os_)))


def residual_interference(stage: LinearStage, channels: MimoChannelSet):
    """Largest relative inter-pair leakage seen by each slot's strong and weak user.

    For slot ``n`` this is ``max_{k != n} |v^H H w_k| / (||v|| ||H||_F)``.
    Returns ``(strong, weak)`` arrays of length ``K``; both are zero for
    an exact zero-forcing stage.
    """
    h = channels.channels
    w = stage.precoders
    k = stage.n_pairs
    strong = np.zeros(k)
    weak = np.zeros(k)
    for n, (s, m) in enumerate(stage.pairing):
        if k == 1:
            break
        mask = np.arange(k) != n
        for out, user, v in ((strong, s, stage.strong_combiners[n]),
                             (weak, m, stage.weak_combiners[n])):
            leak = np.abs(v.conj() @ h[user] @ w[:, mask])
            out[n] = leak.max() / (np.linalg.norm(v) * np.linalg.norm(h[user]))
    return strong, weak
