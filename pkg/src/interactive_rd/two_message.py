"""Achievable two-message (Y -> X -> decoder) rate-distortion points.

A scheme is a first message V1 ~ p(v1|y) sent from the Y terminal, a reply
V2 ~ p(v2|x, v1) from the X terminal, and a decoder g(v1, v2, y). Any such
scheme achieves

    R1 = I(Y; V1 | X),   R2 = I(X; V2 | Y, V1),   D = E d(X, g(V1, V2, Y)).

``table1_scheme`` builds the explicit DSBS construction (V1 a BSC(q) copy of
Y, V2 a conditional erasure of X) for which the ratio of the one-message
rate to R1 + R2 grows without bound as q -> 0 and p -> 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .binary_erasure import BinaryJoint, _check_prob, c2_value, c_value, eta_value, rsum1_dsbs
from .errors import DomainError, SearchExhaustedError
from .info_core import (
    Channel,
    DistortionMatrix,
    JointPmf,
    binary_entropy,
    conditional_mutual_information,
    expected_distortion,
)

CONSISTENCY_TOL = 1e-9
RATIO_DECADES = range(1, 301)


@dataclass(frozen=True)
class TwoMessageScheme:
    pV1_given_Y: Channel
    pV2_given_XV1: Channel  # rows indexed by x * |V1| + v1
    decoder: np.ndarray  # decoder[v1, v2, y] -> reproduction index

    def __post_init__(self):
        n_v1 = self.pV1_given_Y.n_outputs
        if self.pV2_given_XV1.n_inputs % n_v1:
            raise DomainError("pV2_given_XV1 must have |X| * |V1| rows")
        dec = np.asarray(self.decoder, dtype=np.int64)
        if dec.ndim != 3 or dec.shape[:2] != (n_v1, self.pV2_given_XV1.n_outputs):
            raise DomainError(f"decoder must be shaped (|V1|, |V2|, |Y|), got {dec.shape}")
        if dec.shape[2] != self.pV1_given_Y.n_inputs:
            raise DomainError("decoder side-information axis does not match |Y|")
        object.__setattr__(self, "decoder", dec)


@dataclass(frozen=True)
class Table1Params:
    p: float
    q: float
    alpha: float

    def __post_init__(self):
        _check_prob("p", self.p, open_lo=True, open_hi=True)
        _check_prob("q", self.q, open_lo=True, open_hi=True)
        _check_prob("alpha", self.alpha)


@dataclass(frozen=True)
class TwoMessagePoint:
    R1: float
    R2: float
    D: float
    sum_ratio: float = math.nan
    split_ratio: float = math.nan

    @property
    def sum_rate(self) -> float:
        return self.R1 + self.R2

    def as_dict(self) -> dict:
        return {
            "R1": self.R1,
            "R2": self.R2,
            "D": self.D,
            "sum_rate": self.sum_rate,
            "sum_ratio": self.sum_ratio,
            "split_ratio": self.split_ratio,
        }


def _ratios(rsum1: float, R1: float, R2: float):
    total = R1 + R2
    sum_ratio = rsum1 / total if total > 0 else math.inf
    split_ratio = R1 / R2 if R2 > 0 else math.inf
    return sum_ratio, split_ratio


def scheme_joint(p_xy: JointPmf, scheme: TwoMessageScheme) -> np.ndarray:
    """Joint pmf over (X, Y, V1, V2) = p(x,y) p(v1|y) p(v2|x,v1)."""
    nx, ny = p_xy.probs.shape
    if scheme.pV1_given_Y.n_inputs != ny:
        raise DomainError(f"pV1_given_Y has {scheme.pV1_given_Y.n_inputs} rows, |Y| = {ny}")
    n_v1 = scheme.pV1_given_Y.n_outputs
    if scheme.pV2_given_XV1.n_inputs != nx * n_v1:
        raise DomainError(f"pV2_given_XV1 needs |X|*|V1| = {nx * n_v1} rows")
    v2 = scheme.pV2_given_XV1.rows.reshape(nx, n_v1, -1)
    return np.einsum("xy,ya,xab->xyab", p_xy.probs, scheme.pV1_given_Y.rows, v2)


def evaluate_scheme(
    p_xy: JointPmf, scheme: TwoMessageScheme, d: DistortionMatrix, rsum1: float | None = None
) -> TwoMessagePoint:
    """Rates and distortion of a scheme by direct computation on the joint pmf.

    Ratios are filled in only when the one-message reference ``rsum1`` is given.
    """
    joint = scheme_joint(p_xy, scheme)
    R1 = conditional_mutual_information(joint, (1,), (2,), (0,))
    R2 = conditional_mutual_information(joint, (0,), (3,), (1, 2))
    nx, ny, n1, n2 = joint.shape
    x_xhat = np.zeros((nx, d.n_reproduction))
    for y in range(ny):
        for a in range(n1):
            for b in range(n2):
                x_xhat[:, scheme.decoder[a, b, y]] += joint[:, y, a, b]
    D = expected_distortion(x_xhat, d)
    point = TwoMessagePoint(R1=R1, R2=R2, D=D)
    if rsum1 is not None:
        point = replace(point, **dict(zip(("sum_ratio", "split_ratio"), _ratios(rsum1, R1, R2))))
    return point


def table1_scheme(params: Table1Params) -> TwoMessageScheme:
    """BSC(q) first message and the conditional-erasure reply; g(v1, v2, y) = v2.

    V2 and the reproduction share the alphabet (0, e, 1).
    """
    a = params.alpha
    rows = [
        [1.0 - a, a, 0.0],  # x=0, v1=0
        [0.0, 1.0, 0.0],  # x=0, v1=1
        [0.0, 1.0, 0.0],  # x=1, v1=0
        [0.0, a, 1.0 - a],  # x=1, v1=1
    ]
    decoder = np.empty((2, 3, 2), dtype=np.int64)
    decoder[:, :, :] = np.arange(3)[None, :, None]
    return TwoMessageScheme(Channel.bsc(params.q), Channel(rows), decoder)


def table1_point(params: Table1Params) -> TwoMessagePoint:
    """Closed-form (R1, R2, D) of the Table-I scheme on a DSBS(p).

    R1 = h(p) - C2(p, q),  R2 = 2h(p) - C(p, q, alpha, 1) - R1,
    D = eta(p, q, alpha, 1). Stable down to p = 1e-300.
    """
    p, q, a = params.p, params.q, params.alpha
    hp = binary_entropy(p)
    R1 = hp - c2_value(p, q)
    R2 = 2.0 * hp - c_value(p, q, a, 1.0) - R1
    D = min(1.0, eta_value(p, q, a, 1.0))
    R1, R2 = max(R1, 0.0), max(R2, 0.0)
    sum_ratio, split_ratio = _ratios(rsum1_dsbs(p, D), R1, R2)
    return TwoMessagePoint(R1=R1, R2=R2, D=D, sum_ratio=sum_ratio, split_ratio=split_ratio)


def table1_cross_check(params: Table1Params):
    """Largest absolute difference between closed forms and direct evaluation.

    Returns ``(max_abs_diff, closed, direct)``.
    """
    closed = table1_point(params)
    direct = evaluate_scheme(
        BinaryJoint.dsbs(params.p).to_joint(),
        table1_scheme(params),
        DistortionMatrix.binary_erasure(),
        rsum1=rsum1_dsbs(params.p, closed.D),
    )
    diff = max(abs(closed.R1 - direct.R1), abs(closed.R2 - direct.R2), abs(closed.D - direct.D))
    return diff, closed, direct


def entropy_ratio_check(slope: float, p: float) -> float:
    """h(slope * p) / h(p); tends to ``slope`` as p -> 0."""
    slope = float(slope)
    if not slope > 0 or math.isinf(slope):
        raise DomainError(f"slope must be positive and finite, got {slope!r}")
    p = _check_prob("p", p, hi=0.5, open_lo=True, open_hi=True)
    if not slope * p < 1:
        raise DomainError(f"slope * p must be < 1, got {slope * p!r}")
    return binary_entropy(slope * p) / binary_entropy(p)


def default_ratio_q(L: float) -> float:
    """q with (1 - q)/q = L + 2 > L + 1."""
    return 1.0 / (L + 3.0)


def find_ratio_witness(L: float, alpha: float = 0.5, q: float | None = None):
    """Largest p in {1e-1, ..., 1e-300} with sum_ratio > L and split_ratio < 1/L.

    Returns ``(params, point)``.
    """
    L = float(L)
    if not L > 0 or math.isinf(L):
        raise DomainError(f"L must be positive and finite, got {L!r}")
    if q is None:
        q = default_ratio_q(L)
    q = _check_prob("q", q, open_lo=True, open_hi=True)
    if not (1.0 - q) / q > L:
        raise DomainError(f"q={q!r} gives limiting ratio (1-q)/q = {(1 - q) / q:.6g}, which cannot exceed L={L!r}")
    best = None
    for k in RATIO_DECADES:
        params = Table1Params(p=10.0**-k, q=q, alpha=alpha)
        point = table1_point(params)
        if best is None or point.sum_ratio > best[1].sum_ratio:
            best = (params, point)
        if point.sum_ratio > L and point.split_ratio < 1.0 / L:
            return params, point
    params, point = best
    raise SearchExhaustedError(
        f"no p >= 1e-300 reaches sum_ratio > {L:g} and split_ratio < {1 / L:g} "
        f"(best sum_ratio {point.sum_ratio:.6g}, split_ratio {point.split_ratio:.3g} at p={params.p:g})",
        best=best,
    )
