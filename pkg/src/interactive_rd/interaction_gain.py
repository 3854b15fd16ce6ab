"""Certificates that two messages strictly beat one.

If the one-message rate reduction rho1(p_{X|Y} p_Y, D) fails to be concave
in the Y-marginal, two messages achieve a strictly lower sum-rate than one.
For a BSC(p) between Y and X and the erasure distortion we compare, at
D = eta(p, q, alpha0e, 1),

    lhs        = rho1 at the uniform Y-marginal            = (1 + D) h(p)
    rhs_lower  = C(p, q, alpha0e, 1)  <=  average of rho1 at Bernoulli(q)
                 and Bernoulli(1 - q) Y-marginals

A positive ``gap_lower = rhs_lower - lhs`` is a midpoint concavity
violation. ``rhs_exact`` uses the exact solver for the tilted marginals and
is reported alongside, but validity is judged on the lower bound only.
"""
from __future__ import annotations

from dataclasses import dataclass

from .binary_erasure import BinaryJoint, _check_prob, c_value, eta_value, rho1_exact
from .errors import DomainError, SearchExhaustedError
from .info_core import binary_entropy

DEFAULT_MARGIN = 1e-9
DEFAULT_MARGIN_REL = 0.01
WITNESS_DECADES = range(1, 301)


@dataclass(frozen=True)
class GainCertificate:
    p: float
    q: float
    alpha0e: float
    D: float
    lhs: float
    rhs_lower: float
    rhs_exact: float
    gap_lower: float
    gap_exact: float
    margin: float = DEFAULT_MARGIN

    @property
    def valid(self) -> bool:
        return self.gap_lower > self.margin

    @property
    def relative_gap(self) -> float:
        return self.gap_lower / binary_entropy(self.p)

    def as_dict(self) -> dict:
        return {
            "p": self.p,
            "q": self.q,
            "alpha0e": self.alpha0e,
            "D": self.D,
            "lhs": self.lhs,
            "rhs_lower": self.rhs_lower,
            "rhs_exact": self.rhs_exact,
            "gap_lower": self.gap_lower,
            "gap_exact": self.gap_exact,
            "relative_gap": self.relative_gap,
        }


def midpoint_violation(p: float, q: float, alpha0e: float, margin: float = DEFAULT_MARGIN) -> GainCertificate:
    p = _check_prob("p", p, open_lo=True, open_hi=True)
    q = _check_prob("q", q, hi=0.5, open_lo=True, open_hi=True)
    alpha0e = _check_prob("alpha0e", alpha0e, open_lo=True, open_hi=True)
    D = eta_value(p, q, alpha0e, 1.0)
    lhs = (1.0 + D) * binary_entropy(p)
    rhs_lower = c_value(p, q, alpha0e, 1.0)
    # the Bernoulli(1-q) side equals this one by mirror symmetry
    rhs_exact = rho1_exact(BinaryJoint.from_bsc(p, q), D)
    return GainCertificate(
        p=p,
        q=q,
        alpha0e=alpha0e,
        D=D,
        lhs=lhs,
        rhs_lower=rhs_lower,
        rhs_exact=rhs_exact,
        gap_lower=rhs_lower - lhs,
        gap_exact=rhs_exact - lhs,
        margin=margin,
    )


def limit_gap(q: float, alpha0e: float) -> float:
    """Small-p limit of C/h(p) - (1 + D): (1 - 2q)(1 - alpha0e)."""
    q = _check_prob("q", q)
    alpha0e = _check_prob("alpha0e", alpha0e)
    return (1.0 - 2.0 * q) * (1.0 - alpha0e)


def find_gain_witness(
    q: float, alpha0e: float, margin: float = DEFAULT_MARGIN, margin_rel: float = DEFAULT_MARGIN_REL
) -> GainCertificate:
    """Largest p in {1e-1, 1e-2, ..., 1e-300} whose certificate clears both margins."""
    if not margin >= 0:
        raise DomainError(f"margin must be >= 0, got {margin!r}")
    best = None
    for k in WITNESS_DECADES:
        cert = midpoint_violation(10.0**-k, q, alpha0e, margin=margin)
        if best is None or cert.relative_gap > best.relative_gap:
            best = cert
        if cert.gap_lower > margin and cert.relative_gap > margin_rel:
            return cert
    raise SearchExhaustedError(
        f"no p >= 1e-300 gives gap_lower > {margin:g} with relative gap > {margin_rel:g} "
        f"(best relative gap {best.relative_gap:.6g} at p={best.p:g})",
        best=best,
    )
