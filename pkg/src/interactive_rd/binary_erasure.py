"""Exact rate reduction for binary sources under the binary erasure distortion.

With X, Y binary, full-support p(x,y) and d(i,i)=0, d(i,e)=1, d(i,1-i)=inf,
the optimal test channel erases X=0 with probability alpha0e and X=1 with
probability alpha1e and otherwise reveals X. The rate reduction is then

    rho1(p, D) = max psi(p, a0, a1)  subject to  phi(p, a0, a1) <= D,

a two-parameter concave program. Every entropy below is evaluated from
unnormalized masses, so the formulas stay accurate for crossover
probabilities as small as 1e-300.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .info_core import SUM_TOL, JointPmf, binary_entropy, weighted_binary_entropy, weighted_entropy
from .search import golden_section_max

GSS_TOL = 1e-12
# slack for the runtime check that the unconstrained corner dominates
CORNER_SLACK = 1e-12


def _check_prob(name, value, lo=0.0, hi=1.0, open_lo=False, open_hi=False):
    value = float(value)
    bad = math.isnan(value) or value < lo or value > hi
    bad = bad or (open_lo and value == lo) or (open_hi and value == hi)
    if bad:
        lb = "(" if open_lo else "["
        rb = ")" if open_hi else "]"
        raise DomainError(f"{name}={value!r} outside {lb}{lo}, {hi}{rb}")
    return value


@dataclass(frozen=True)
class BinaryJoint:
    """Entries p_xy of a full-support joint pmf on {0,1}^2 (x rows, y columns)."""

    p00: float
    p01: float
    p10: float
    p11: float

    def __post_init__(self):
        entries = (self.p00, self.p01, self.p10, self.p11)
        if not all(e > 0 for e in entries):
            raise DomainError(f"BinaryJoint needs full support, got {entries}")
        total = math.fsum(entries)
        if abs(total - 1.0) > SUM_TOL:
            raise DomainError(f"BinaryJoint entries sum to {total!r}, not 1")

    @classmethod
    def from_bsc(cls, p: float, q: float) -> "BinaryJoint":
        """Y ~ Bernoulli(q) passed through a BSC(p) to give X.

        Entries are formed from (p, q) directly rather than by subtraction.
        """
        p = _check_prob("p", p, open_lo=True, open_hi=True)
        q = _check_prob("q", q, open_lo=True, open_hi=True)
        pb, qb = 1.0 - p, 1.0 - q
        return cls(p00=pb * qb, p01=p * q, p10=p * qb, p11=pb * q)

    @classmethod
    def dsbs(cls, p: float) -> "BinaryJoint":
        p = _check_prob("p", p, open_lo=True, open_hi=True)
        return cls(p00=(1.0 - p) / 2, p01=p / 2, p10=p / 2, p11=(1.0 - p) / 2)

    @classmethod
    def from_joint(cls, joint: JointPmf) -> "BinaryJoint":
        if joint.probs.shape != (2, 2):
            raise DomainError(f"binary joint must be 2x2, got {joint.probs.shape}")
        (a, b), (c, e) = joint.probs
        return cls(float(a), float(b), float(c), float(e))

    def to_joint(self) -> JointPmf:
        return JointPmf([[self.p00, self.p01], [self.p10, self.p11]])

    @property
    def px0(self) -> float:
        return self.p00 + self.p01

    @property
    def px1(self) -> float:
        return self.p10 + self.p11


@dataclass(frozen=True)
class ErasureAlphaPair:
    alpha0e: float
    alpha1e: float

    def __post_init__(self):
        _check_prob("alpha0e", self.alpha0e)
        _check_prob("alpha1e", self.alpha1e)


@dataclass(frozen=True)
class DsbsParams:
    """Crossover p, Y-marginal tilt q and erasure level alpha0e."""

    p: float
    q: float
    alpha0e: float

    def __post_init__(self):
        _check_prob("p", self.p, open_lo=True, open_hi=True)
        _check_prob("q", self.q, open_lo=True, open_hi=True)
        _check_prob("alpha0e", self.alpha0e)


# --------------------------------------------------------------------------
# psi / phi


def _psi(pxy: BinaryJoint, a0: float, a1: float) -> float:
    wh = weighted_binary_entropy
    return (
        wh(pxy.p00 * a0, pxy.p10 * a1)
        + wh(pxy.p01 * a0, pxy.p11 * a1)
        + wh(pxy.p00, pxy.p01)
        + wh(pxy.p11, pxy.p10)
    )


def psi(pxy: BinaryJoint, alphas: ErasureAlphaPair) -> float:
    """H(X|Y,U) + H(Y|X) for the erasure test channel with the given alphas."""
    return _psi(pxy, alphas.alpha0e, alphas.alpha1e)


def phi(pxy: BinaryJoint, alphas: ErasureAlphaPair) -> float:
    """Expected erasure distortion p_X(0)*alpha0e + p_X(1)*alpha1e."""
    return pxy.px0 * alphas.alpha0e + pxy.px1 * alphas.alpha1e


def _psi_grid(pxy: BinaryJoint, a0: np.ndarray, a1: np.ndarray) -> np.ndarray:
    first = np.stack([pxy.p00 * a0, pxy.p10 * a1], axis=-1)
    second = np.stack([pxy.p01 * a0, pxy.p11 * a1], axis=-1)
    const = weighted_binary_entropy(pxy.p00, pxy.p01) + weighted_binary_entropy(pxy.p11, pxy.p10)
    return weighted_entropy(first) + weighted_entropy(second) + const


# --------------------------------------------------------------------------
# rho1


def _segment(pxy: BinaryJoint, D: float):
    """Bracket for alpha0e and the map alpha0e -> alpha1e along phi = D."""
    px0, px1 = pxy.px0, pxy.px1
    lo = max(0.0, (D - px1) / px0)
    hi = min(1.0, D / px0)

    def a1_of(a0):
        return min(1.0, max(0.0, (D - px0 * a0) / px1))

    return lo, hi, a1_of


def rho1_grid_search(pxy: BinaryJoint, D: float, points: int = 201, rounds: int = 30) -> float:
    """Constrained maximum of psi by 2-D grid search with shrinking windows.

    Makes no monotonicity assumption; used when the boundary search cannot
    be trusted.
    """
    c0, c1, width = 0.5, 0.5, 0.5
    best = -math.inf
    for _ in range(rounds):
        g0 = np.clip(np.linspace(c0 - width, c0 + width, points), 0.0, 1.0)
        g1 = np.clip(np.linspace(c1 - width, c1 + width, points), 0.0, 1.0)
        a0, a1 = np.meshgrid(g0, g1, indexing="ij")
        vals = _psi_grid(pxy, a0, a1)
        vals = np.where(pxy.px0 * a0 + pxy.px1 * a1 <= D, vals, -np.inf)
        i, j = np.unravel_index(int(np.argmax(vals)), vals.shape)
        if vals[i, j] > best:
            best = float(vals[i, j])
            c0, c1 = float(a0[i, j]), float(a1[i, j])
        width *= 0.5
    return best


def rho1_exact(pxy: BinaryJoint, D: float) -> float:
    """Exact rate reduction rho1(p_XY, D) under erasure distortion.

    psi is concave with its unconstrained maximum at (1, 1), so the
    constraint binds and the search runs along the segment phi = D. The
    corner dominance is re-checked at runtime; if it fails the 2-D grid
    search is used instead.
    """
    D = float(D)
    if math.isnan(D) or D < 0:
        raise DomainError(f"distortion level must be >= 0, got {D!r}")
    top = _psi(pxy, 1.0, 1.0)
    if D >= 1.0:
        return top
    lo, hi, a1_of = _segment(pxy, D)
    _, best = golden_section_max(lambda a0: _psi(pxy, a0, a1_of(a0)), lo, hi, tol=GSS_TOL)
    ends = (_psi(pxy, lo, a1_of(lo)), _psi(pxy, hi, a1_of(hi)))
    if max(best, *ends) > top + CORNER_SLACK:
        return rho1_grid_search(pxy, D)
    return best


def rsum1_exact(pxy: BinaryJoint, D: float) -> float:
    """One-message rate H(X|Y) + H(Y|X) - rho1."""
    return _psi(pxy, 1.0, 1.0) - rho1_exact(pxy, D)


# --------------------------------------------------------------------------
# closed forms for Y ~ Bernoulli(q) through BSC(p)


def c_value(p: float, q: float, alpha0e: float, alpha1e: float) -> float:
    """psi of the Bernoulli(q)/BSC(p) joint, from (p, q) without forming the joint."""
    wh = weighted_binary_entropy
    pb, qb = 1.0 - p, 1.0 - q
    return (
        qb * wh(pb * alpha0e, p * alpha1e)
        + q * wh(p * alpha0e, pb * alpha1e)
        + wh(pb * qb, p * q)
        + wh(pb * q, p * qb)
    )


def c2_value(p: float, q: float) -> float:
    """Alpha-free part of ``c_value``: H(Y|X) of the Bernoulli(q)/BSC(p) joint."""
    wh = weighted_binary_entropy
    pb, qb = 1.0 - p, 1.0 - q
    return wh(pb * qb, p * q) + wh(pb * q, p * qb)


def eta_value(p: float, q: float, alpha0e: float, alpha1e: float) -> float:
    pb, qb = 1.0 - p, 1.0 - q
    return (pb * qb + p * q) * alpha0e + (pb * q + p * qb) * alpha1e


def c_functional(params: DsbsParams, alpha1e: float) -> float:
    _check_prob("alpha1e", alpha1e)
    return c_value(params.p, params.q, params.alpha0e, alpha1e)


def eta_functional(params: DsbsParams, alpha1e: float) -> float:
    _check_prob("alpha1e", alpha1e)
    return eta_value(params.p, params.q, params.alpha0e, alpha1e)


def rho1_dsbs(p: float, D: float) -> float:
    """(1 + D) h(p) for a DSBS with D in [0, 1]."""
    p = _check_prob("p", p, open_lo=True, open_hi=True)
    D = _check_prob("D", D)
    return (1.0 + D) * binary_entropy(p)


def rsum1_dsbs(p: float, D: float) -> float:
    """One-message rate (1 - D) h(p) for a DSBS with D in [0, 1]."""
    p = _check_prob("p", p, open_lo=True, open_hi=True)
    D = _check_prob("D", D)
    return (1.0 - D) * binary_entropy(p)
