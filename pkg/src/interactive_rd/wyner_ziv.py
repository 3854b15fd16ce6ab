"""Brute-force solver for the one-message (Wyner-Ziv) rate-distortion function.

    R(D) = min I(X;U|Y)  over p(u|x), g  with  E d(X, g(U,Y)) <= D,

with |U| = |X| + 1. Each row of p(u|x) ranges over a simplex grid; for a
fixed channel the decoder is optimal in closed form, so only the channel is
searched. The result is an achievable point, so the returned rate is an
upper bound that tightens as the grid is refined. Intended as a desk-scale
validation oracle (|X|*|Y| <= 16).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DomainError, InfeasibleDistortionError
from .info_core import (
    Channel,
    DistortionMatrix,
    JointPmf,
    conditional_entropy,
    conditional_mutual_information,
    expected_distortion,
)

MAX_SOURCE_CELLS = 16
DIST_TOL = 1e-12
# product neighbourhoods larger than this are refined one row at a time
MAX_JOINT_NEIGHBOURHOOD = 200_000


@dataclass(frozen=True)
class GridSpec:
    resolution: int = 64
    refine_rounds: int = 0

    def __post_init__(self):
        if int(self.resolution) != self.resolution or self.resolution < 2:
            raise DomainError(f"GridSpec.resolution must be an integer >= 2, got {self.resolution!r}")
        if int(self.refine_rounds) != self.refine_rounds or self.refine_rounds < 0:
            raise DomainError(f"GridSpec.refine_rounds must be a nonnegative integer, got {self.refine_rounds!r}")


@dataclass(frozen=True)
class WzSolution:
    rate: float
    distortion: float
    aux_channel: Channel
    decoder: np.ndarray  # decoder[u, y] -> reproduction index

    @property
    def aux_size(self) -> int:
        return self.aux_channel.n_outputs


def _joint_xyu(pxy: np.ndarray, rows: np.ndarray) -> np.ndarray:
    return pxy[:, :, None] * rows[:, None, :]


def optimal_decoder(joint_xyu, d: DistortionMatrix) -> np.ndarray:
    """Best deterministic decoder g(u, y) for a joint pmf over (X, Y, U).

    Minimizes E[d(X, xhat) | U=u, Y=y] cell by cell; ties go to the lowest
    reproduction index. Zero-probability cells map to index 0.
    """
    arr = np.asarray(joint_xyu, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[0] != d.n_source:
        raise DomainError(f"joint over (X, Y, U) with |X|={d.n_source} expected, got shape {arr.shape}")
    dv = d.values
    inf_mask = np.isinf(dv)
    cost = np.einsum("xyu,xk->uyk", arr, np.where(inf_mask, 0.0, dv))
    blocked = np.einsum("xyu,xk->uyk", (arr > 0).astype(float), inf_mask.astype(float)) > 0
    cost = np.where(blocked, np.inf, cost)
    carried = arr.sum(axis=0).T > 0  # (u, y)
    dead = carried & np.all(np.isinf(cost), axis=-1)
    if np.any(dead):
        u, y = np.argwhere(dead)[0]
        raise InfeasibleDistortionError(
            f"no reproduction has finite distortion for aux symbol {u} with side information {y}"
        )
    return np.argmin(cost, axis=-1)


def decoded_distortion(joint_xyu, decoder: np.ndarray, d: DistortionMatrix) -> float:
    """E d(X, g(U,Y)) for a joint over (X, Y, U) and decoder table g[u, y]."""
    arr = np.asarray(joint_xyu, dtype=np.float64)
    nx, ny, nu = arr.shape
    x_xhat = np.zeros((nx, d.n_reproduction))
    for u in range(nu):
        for y in range(ny):
            x_xhat[:, decoder[u, y]] += arr[:, y, u]
    return expected_distortion(x_xhat, d)


def _check_instance(p_xy: JointPmf, d: DistortionMatrix, D: float) -> None:
    if p_xy.row_alphabet_size != d.n_source:
        raise DomainError(
            f"distortion matrix has {d.n_source} source rows, joint has |X|={p_xy.row_alphabet_size}"
        )
    if p_xy.probs.size > MAX_SOURCE_CELLS:
        raise DomainError(f"|X|*|Y| = {p_xy.probs.size} exceeds the oracle limit of {MAX_SOURCE_CELLS}")
    if not (D >= 0) or math.isnan(D):
        raise DomainError(f"distortion level must be >= 0, got {D!r}")


def _full_information_distortion(p_xy: JointPmf, d: DistortionMatrix) -> float:
    nx = p_xy.row_alphabet_size
    rows = np.hstack([np.eye(nx), np.zeros((nx, 1))])
    joint = _joint_xyu(p_xy.probs, rows)
    return decoded_distortion(joint, optimal_decoder(joint, d), d)


def _neighbourhood(row: np.ndarray, step: float) -> np.ndarray:
    """Simplex points within L-inf distance 2*step of ``row`` on a ``step`` lattice."""
    k = row.shape[0]
    deltas = np.array(list(itertools.product(range(-2, 3), repeat=k - 1)), dtype=np.float64)
    cand = np.empty((deltas.shape[0], k))
    cand[:, :-1] = row[:-1] + step * deltas
    cand[:, -1] = row[-1] - step * deltas.sum(axis=1)
    ok = np.all(cand >= -1e-15, axis=1) & np.all(cand <= 1 + 1e-15, axis=1)
    cand = np.clip(cand[ok], 0.0, 1.0)
    return cand / cand.sum(axis=1, keepdims=True)


def _refine(pxy, dv, rows, value, budget, step, rounds):
    nx = rows.shape[0]
    for _ in range(rounds):
        step /= 2.0
        hoods = [_neighbourhood(r, step) for r in rows]
        sizes = [h.shape[0] for h in hoods]
        if np.prod(sizes, dtype=float) <= MAX_JOINT_NEIGHBOURHOOD:
            groups = [list(range(nx))]
        else:
            groups = [[x] for x in range(nx)]
        for group in groups:
            combos = itertools.product(*[range(sizes[x]) for x in group])
            idx = np.array(list(combos), dtype=np.int64)
            batch = np.broadcast_to(rows, (idx.shape[0],) + rows.shape).copy()
            for col, x in enumerate(group):
                batch[:, x, :] = hoods[x][idx[:, col]]
            s, dd = kernels.evaluate_channels(pxy, dv, batch)
            s = np.where(dd <= budget, s, -np.inf)
            j = int(np.argmax(s))
            if s[j] > value:
                value = float(s[j])
                rows = batch[j]
    return rows, value


def wz_rate_oracle(p_xy: JointPmf, d: DistortionMatrix, D: float, grid: GridSpec = GridSpec()) -> WzSolution:
    """Grid upper bound on the Wyner-Ziv rate R(D) with an explicit witness."""
    _check_instance(p_xy, d, D)
    corner = _full_information_distortion(p_xy, d)
    budget = D + DIST_TOL
    if corner > budget:
        raise InfeasibleDistortionError(
            f"distortion {D!r} is below the full-information minimum {corner!r}"
        )
    pxy = p_xy.probs
    dv = d.values
    n_aux = p_xy.row_alphabet_size + 1
    value, rows = kernels.scan_grid(pxy, dv, grid.resolution, n_aux, budget)
    if rows is None:  # pragma: no cover - the identity corner is always on the grid
        raise InfeasibleDistortionError(f"no grid channel meets distortion {D!r}")
    if grid.refine_rounds:
        rows, value = _refine(pxy, dv, rows, value, budget, 1.0 / grid.resolution, grid.refine_rounds)

    channel = Channel(rows)
    joint = _joint_xyu(pxy, channel.rows)
    decoder = optimal_decoder(joint, d)
    distortion = decoded_distortion(joint, decoder, d)
    rate = conditional_mutual_information(joint, (0,), (2,), (1,))
    return WzSolution(rate=rate, distortion=distortion, aux_channel=channel, decoder=decoder)


def rho1_oracle(p_xy: JointPmf, d: DistortionMatrix, D: float, grid: GridSpec = GridSpec()) -> float:
    """Rate reduction H(X|Y) + H(Y|X) - R(D) from the grid solution (a lower bound)."""
    sol = wz_rate_oracle(p_xy, d, D, grid)
    return conditional_entropy(p_xy) + conditional_entropy(p_xy.transpose()) - sol.rate
