"""Hot loops for the exhaustive Wyner-Ziv grid search.

For a test channel p(u|x) the objective H(X|U,Y) and the optimal-decoder
distortion both split into a sum over auxiliary symbols u of a term that
depends only on the column (p(u|x))_x. On a grid with step 1/r every column
is an integer vector in {0..r}^|X|, so both terms are tabulated once and the
search over all channels reduces to table lookups.

Two interchangeable scanners are provided: a numba-compiled loop and a
vectorized numpy version. They visit candidates in the same order and
accumulate in the same order, so they return identical results.
``INTERACTIVE_RD_BACKEND`` selects the default (see ``_accel``).
"""
from __future__ import annotations

import itertools

import numpy as np

from . import _accel
from .info_core import weighted_entropy

MAX_TABLE_SIZE = 5_000_000


def compositions(total: int, parts: int) -> np.ndarray:
    """All nonnegative integer vectors of length ``parts`` summing to ``total``.

    Rows are in ascending lexicographic order.
    """
    if parts == 1:
        return np.array([[total]], dtype=np.int64)
    blocks = []
    for first in range(total + 1):
        tail = compositions(total - first, parts - 1)
        head = np.full((tail.shape[0], 1), first, dtype=np.int64)
        blocks.append(np.hstack([head, tail]))
    return np.vstack(blocks)


def column_terms(pxy: np.ndarray, d: np.ndarray, cols: np.ndarray):
    """Per-aux-symbol contributions for columns ``cols[..., x] = p(u|x)``.

    Returns ``(hterm, dterm)`` where ``hterm`` is the contribution of the
    symbol to H(X|U,Y) and ``dterm`` its contribution to the distortion under
    the best decoder, sum_y min_xhat sum_x p(x,y) p(u|x) d(x,xhat)
    (``inf`` if every reproduction is infinitely bad for a mass-carrying y).
    """
    cols = np.asarray(cols, dtype=np.float64)
    mass = cols[..., :, None] * pxy  # (..., x, y)
    hterm = weighted_entropy(mass, axis=-2).sum(axis=-1)
    inf_mask = np.isinf(d)
    dfin = np.where(inf_mask, 0.0, d)
    cost = np.einsum("...xy,xk->...yk", mass, dfin)
    blocked = np.einsum("...xy,xk->...yk", (mass > 0).astype(np.float64), inf_mask.astype(np.float64)) > 0
    cost = np.where(blocked, np.inf, cost)
    dterm = cost.min(axis=-1).sum(axis=-1)
    return hterm, dterm


def build_tables(pxy: np.ndarray, d: np.ndarray, resolution: int):
    """Tabulate ``column_terms`` for every integer column in {0..r}^|X|.

    The flat index of column ``c`` is ``sum_x c[x] * (r+1)**x``.
    """
    nx = pxy.shape[0]
    base = resolution + 1
    size = base**nx
    if size > MAX_TABLE_SIZE:
        raise ValueError(f"grid table of {size} entries exceeds limit {MAX_TABLE_SIZE}")
    flat = np.arange(size, dtype=np.int64)
    digits = np.empty((size, nx), dtype=np.int64)
    for x in range(nx):
        digits[:, x] = (flat // base**x) % base
    return column_terms(pxy, d, digits / resolution)


def _offsets(comps: np.ndarray, nx: int, resolution: int) -> np.ndarray:
    base = resolution + 1
    return np.stack([comps * base**x for x in range(nx)]).astype(np.int64)


@_accel.njit(cache=True)
def _scan_numba_impl(offs, htab, dtab, budget):
    nx, m, k = offs.shape
    digits = np.zeros(nx, dtype=np.int64)
    best_digits = np.full(nx, -1, dtype=np.int64)
    prefix = np.zeros((nx, k), dtype=np.int64)
    best = -np.inf
    last = nx - 1
    for xx in range(last):
        for u in range(k):
            prefix[xx + 1, u] = prefix[xx, u] + offs[xx, 0, u]
    while True:
        for j in range(m):
            s = 0.0
            dd = 0.0
            for u in range(k):
                idx = prefix[last, u] + offs[last, j, u]
                s += htab[idx]
                dd += dtab[idx]
            if dd <= budget and s > best:
                best = s
                for x in range(last):
                    best_digits[x] = digits[x]
                best_digits[last] = j
        x = nx - 2
        while x >= 0:
            digits[x] += 1
            if digits[x] < m:
                break
            digits[x] = 0
            x -= 1
        if x < 0:
            break
        for xx in range(x, last):
            for u in range(k):
                prefix[xx + 1, u] = prefix[xx, u] + offs[xx, digits[xx], u]
    return best, best_digits


def scan_numba(offs, htab, dtab, budget):
    return _scan_numba_impl(offs, htab, dtab, float(budget))


def scan_numpy(offs, htab, dtab, budget):
    nx, m, k = offs.shape
    last = nx - 1
    best = -np.inf
    best_digits = np.full(nx, -1, dtype=np.int64)
    for head in itertools.product(range(m), repeat=last):
        prefix = np.zeros(k, dtype=np.int64)
        for x, t in enumerate(head):
            prefix = prefix + offs[x, t]
        s = np.zeros(m)
        dd = np.zeros(m)
        for u in range(k):
            idx = prefix[u] + offs[last, :, u]
            s += htab[idx]
            dd += dtab[idx]
        masked = np.where(dd <= budget, s, -np.inf)
        j = int(np.argmax(masked))
        if masked[j] > best:
            best = float(masked[j])
            best_digits[:last] = head
            best_digits[last] = j
    return best, best_digits


SCANNERS = {"numba": scan_numba, "numpy": scan_numpy}


def scan_grid(pxy, d, resolution, n_aux, budget, backend=None):
    """Maximize H(X|U,Y) over grid channels with distortion <= ``budget``.

    Returns ``(best_value, rows)`` where ``rows`` is the |X| x n_aux channel
    matrix of the incumbent, or ``(-inf, None)`` if no grid point is feasible.
    Ties go to the lexicographically smallest channel parameter vector.
    """
    backend = backend or _accel.requested_backend()
    pxy = np.ascontiguousarray(pxy, dtype=np.float64)
    d = np.ascontiguousarray(d, dtype=np.float64)
    nx = pxy.shape[0]
    htab, dtab = build_tables(pxy, d, resolution)
    comps = compositions(resolution, n_aux)
    offs = _offsets(comps, nx, resolution)
    best, digits = SCANNERS[backend](offs, np.ascontiguousarray(htab), np.ascontiguousarray(dtab), budget)
    if digits[0] < 0:
        return -np.inf, None
    return best, comps[digits] / resolution


def evaluate_channels(pxy, d, channels):
    """Objective and distortion for a batch of channels shaped (B, |X|, |U|)."""
    cols = np.swapaxes(np.asarray(channels, dtype=np.float64), -1, -2)
    hterm, dterm = column_terms(pxy, d, cols)
    s = np.zeros(hterm.shape[:-1])
    dd = np.zeros(hterm.shape[:-1])
    for u in range(hterm.shape[-1]):
        s += hterm[..., u]
        dd += dterm[..., u]
    return s, dd
