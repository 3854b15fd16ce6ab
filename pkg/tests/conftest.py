import numpy as np
import pytest
from mpmath import mp, mpf, log

from interactive_rd.binary_erasure import BinaryJoint
from interactive_rd.info_core import DistortionMatrix


@pytest.fixture
def erasure():
    return DistortionMatrix.binary_erasure()


@pytest.fixture
def dsbs25():
    return BinaryJoint.dsbs(0.25)


def random_joint(rng, shape):
    arr = rng.random(shape) ** 2
    return arr / arr.sum()


def mp_h(t):
    """Binary entropy in high precision; ``t`` must already be an mpf."""
    if t == 0 or t == 1:
        return mpf(0)
    return -t * log(t, 2) - (1 - t) * log(1 - t, 2)


def mp_wh(a, b):
    s = a + b
    return mpf(0) if s == 0 else s * mp_h(a / s)


def mp_c(p, q, a0, a1):
    with mp.workdps(700):
        p, q, a0, a1 = map(mpf, (p, q, a0, a1))
        pb, qb = 1 - p, 1 - q
        return (qb * mp_wh(pb * a0, p * a1) + q * mp_wh(p * a0, pb * a1)
                + mp_wh(pb * qb, p * q) + mp_wh(pb * q, p * qb))


def mp_eta(p, q, a0, a1):
    with mp.workdps(700):
        p, q, a0, a1 = map(mpf, (p, q, a0, a1))
        return (1 - p) * (1 - q) * a0 + p * q * a0 + ((1 - p) * q + p * (1 - q)) * a1


def erasure_channel_joint(pxy, a0, a1):
    """Joint over (X, Y, U) for the erasure test channel, U in (0, e, 1)."""
    rows = np.array([[1 - a0, a0, 0.0], [0.0, a1, 1 - a1]])
    return np.asarray(pxy)[:, :, None] * rows[:, None, :]
