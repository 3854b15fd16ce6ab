"""Finite-alphabet pmf containers and numerically stable information measures.

All logarithms are base 2. Entropies are evaluated from unnormalized
(numerator, denominator) masses so that probabilities never have to be
formed explicitly; this keeps results accurate when one mass is many orders
of magnitude below another (down to ratios of 1e-300).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DomainError, FileFormatError

SUM_TOL = 1e-12
LN2 = math.log(2.0)


def _validated_probs(values, name, shape_ndim=None) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    if shape_ndim is not None and arr.ndim != shape_ndim:
        raise DomainError(f"{name}: expected {shape_ndim}-d array, got shape {arr.shape}")
    if arr.size == 0:
        raise DomainError(f"{name}: empty")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name}: non-finite entry")
    if np.any(arr < 0):
        raise DomainError(f"{name}: negative entry")
    return arr


def _normalized(arr: np.ndarray, name: str) -> np.ndarray:
    total = math.fsum(arr.ravel())
    if abs(total - 1.0) > SUM_TOL:
        raise DomainError(f"{name}: entries sum to {total!r}, not 1")
    if total != 1.0:
        arr = arr / total
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class FinitePmf:
    probs: np.ndarray

    def __post_init__(self):
        arr = _validated_probs(self.probs, "FinitePmf", 1)
        object.__setattr__(self, "probs", _normalized(arr, "FinitePmf"))

    @classmethod
    def bernoulli(cls, theta: float) -> "FinitePmf":
        return cls([1.0 - theta, theta])

    @property
    def size(self) -> int:
        return self.probs.shape[0]

    def entropy(self) -> float:
        return float(weighted_entropy(self.probs))


@dataclass(frozen=True)
class JointPmf:
    """Joint pmf over (row symbol, column symbol)."""

    probs: np.ndarray

    def __post_init__(self):
        arr = _validated_probs(self.probs, "JointPmf", 2)
        object.__setattr__(self, "probs", _normalized(arr, "JointPmf"))

    @property
    def row_alphabet_size(self) -> int:
        return self.probs.shape[0]

    @property
    def col_alphabet_size(self) -> int:
        return self.probs.shape[1]

    def row_marginal(self) -> FinitePmf:
        return FinitePmf(self.probs.sum(axis=1))

    def col_marginal(self) -> FinitePmf:
        return FinitePmf(self.probs.sum(axis=0))

    def transpose(self) -> "JointPmf":
        return JointPmf(self.probs.T)

    @classmethod
    def from_channel(cls, marginal: FinitePmf, channel: "Channel") -> "JointPmf":
        """Joint of (input, output) for ``marginal`` pushed through ``channel``."""
        if channel.n_inputs != marginal.size:
            raise DomainError("channel input alphabet does not match marginal")
        return cls(marginal.probs[:, None] * channel.rows)


@dataclass(frozen=True)
class Channel:
    """Row-stochastic conditional pmf; one row per conditioning symbol.

    Conditioning on a tuple of variables is expressed by flattening the tuple
    in row-major order of the conditioning alphabets.
    """

    rows: np.ndarray

    def __post_init__(self):
        arr = _validated_probs(self.rows, "Channel", 2)
        for i, row in enumerate(arr):
            total = math.fsum(row)
            if abs(total - 1.0) > SUM_TOL:
                raise DomainError(f"Channel: row {i} sums to {total!r}, not 1")
            if total != 1.0:
                arr[i] = row / total
        arr.setflags(write=False)
        object.__setattr__(self, "rows", arr)

    @property
    def n_inputs(self) -> int:
        return self.rows.shape[0]

    @property
    def n_outputs(self) -> int:
        return self.rows.shape[1]

    @classmethod
    def bsc(cls, crossover: float) -> "Channel":
        return cls([[1.0 - crossover, crossover], [crossover, 1.0 - crossover]])


@dataclass(frozen=True)
class DistortionMatrix:
    """Per-letter distortion d(x, xhat); ``inf`` entries are allowed."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.float64)
        if arr.ndim != 2 or arr.size == 0:
            raise DomainError(f"DistortionMatrix: expected non-empty 2-d array, got shape {arr.shape}")
        if np.any(np.isnan(arr)) or np.any(arr < 0) or np.any(arr == -np.inf):
            raise DomainError("DistortionMatrix: entries must be nonnegative or +inf")
        if not np.all(np.isfinite(arr).any(axis=1)):
            raise DomainError("DistortionMatrix: some source symbol has no finite reproduction")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @classmethod
    def binary_erasure(cls) -> "DistortionMatrix":
        """d(i,i)=0, d(i,e)=1, d(i,1-i)=inf over reproduction symbols (0, e, 1)."""
        return cls([[0.0, 1.0, np.inf], [np.inf, 1.0, 0.0]])

    @classmethod
    def hamming(cls, n: int) -> "DistortionMatrix":
        return cls(1.0 - np.eye(n))

    @property
    def n_source(self) -> int:
        return self.values.shape[0]

    @property
    def n_reproduction(self) -> int:
        return self.values.shape[1]


# --------------------------------------------------------------------------
# entropy primitives


def _wh2(a: float, b: float) -> float:
    # (a+b)*h(a/(a+b)) in nats; symmetric in (a, b) by construction
    if a > b:
        a, b = b, a
    if a == 0.0:
        return 0.0
    s = a + b
    return a * (math.log(s) - math.log(a)) + b * math.log1p(a / b)


def binary_entropy(theta: float) -> float:
    """h(theta) in bits, with 0*log(0) = 0."""
    theta = float(theta)
    if not (-SUM_TOL <= theta <= 1.0 + SUM_TOL):
        raise DomainError(f"binary_entropy: theta={theta!r} outside [0, 1]")
    theta = min(max(theta, 0.0), 1.0)
    return _wh2(theta, 1.0 - theta) / LN2


def entropy_of_ratio(a: float, b: float) -> float:
    """h(a/(a+b)) without forming the ratio.

    Exact zero when either argument is zero; exactly symmetric in (a, b).
    """
    a = float(a)
    b = float(b)
    if a < 0 or b < 0 or not (a + b > 0):
        raise DomainError(f"entropy_of_ratio: need a, b >= 0 and a + b > 0, got ({a!r}, {b!r})")
    return _wh2(a, b) / (a + b) / LN2


def weighted_binary_entropy(a: float, b: float) -> float:
    """(a+b) * h(a/(a+b)) in bits; zero when a + b == 0."""
    if a < 0 or b < 0:
        raise DomainError(f"weighted_binary_entropy: negative argument ({a!r}, {b!r})")
    return _wh2(float(a), float(b)) / LN2


def weighted_entropy(masses, axis: int = -1) -> np.ndarray:
    """s * H(masses / s) in bits along ``axis``, where s is the total mass.

    Terms are summed smallest first after sorting, so the result does not
    depend on the order of the symbols. Slices with zero total give 0.
    """
    m = np.sort(np.asarray(masses, dtype=np.float64), axis=axis)
    m = np.moveaxis(m, axis, -1)
    top = m[..., -1]
    rest = m[..., :-1]
    rest_total = rest.sum(axis=-1)
    total = rest_total + top
    with np.errstate(divide="ignore", invalid="ignore"):
        small = np.where(rest > 0, rest * (np.log(total)[..., None] - np.log(rest)), 0.0)
        big = np.where(top > 0, top * np.log1p(rest_total / top), 0.0)
    out = (small.sum(axis=-1) + big) / LN2
    if out.ndim == 0:
        return float(out)
    return out


# --------------------------------------------------------------------------
# conditional measures


def _as_array(joint) -> np.ndarray:
    if isinstance(joint, JointPmf):
        return joint.probs
    arr = np.asarray(joint, dtype=np.float64)
    if arr.size == 0 or np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise DomainError("joint pmf must be finite and nonnegative")
    if abs(math.fsum(arr.ravel()) - 1.0) > SUM_TOL:
        raise DomainError("joint pmf must sum to 1")
    return arr


def _check_axes(ndim: int, *groups: Sequence[int]) -> None:
    seen = set()
    for group in groups:
        for ax in group:
            if not (0 <= ax < ndim):
                raise DomainError(f"axis {ax} out of range for a {ndim}-variable joint")
            if ax in seen:
                raise DomainError(f"axis {ax} used in more than one group")
            seen.add(ax)


def entropy_given(joint, target: Sequence[int], given: Sequence[int] = ()) -> float:
    """H(target | given) for a joint pmf stored as an n-d array (one axis per variable)."""
    arr = _as_array(joint)
    target = tuple(target)
    given = tuple(given)
    _check_axes(arr.ndim, target, given)
    if not target:
        return 0.0
    keep = given + target
    drop = tuple(ax for ax in range(arr.ndim) if ax not in keep)
    marg = arr.sum(axis=drop) if drop else arr
    # axes of marg are in increasing original order; put given first
    order = sorted(keep)
    perm = [order.index(ax) for ax in keep]
    marg = np.transpose(marg, perm)
    n_given = int(np.prod([arr.shape[ax] for ax in given])) if given else 1
    flat = marg.reshape(n_given, -1)
    return float(np.sum(weighted_entropy(flat, axis=1)))


def conditional_entropy(joint: JointPmf) -> float:
    """H(row variable | column variable)."""
    return entropy_given(joint, (0,), (1,))


def conditional_mutual_information(
    joint, a: Sequence[int], b: Sequence[int], c: Sequence[int] = ()
) -> float:
    """I(A; B | C) = H(A|C) - H(A|B,C) for axis groups of an n-d joint pmf."""
    arr = _as_array(joint)
    a, b, c = tuple(a), tuple(b), tuple(c)
    _check_axes(arr.ndim, a, b, c)
    if not a or not b:
        raise DomainError("conditional_mutual_information: A and B must be non-empty")
    value = entropy_given(arr, a, c) - entropy_given(arr, a, b + c)
    return max(value, 0.0)


def mutual_information(joint: JointPmf) -> float:
    return conditional_mutual_information(joint.probs, (0,), (1,))


def expected_distortion(joint, d: DistortionMatrix) -> float:
    """E[d(X, Xhat)] for a joint over (X, Xhat); +inf if mass sits on an inf cell."""
    arr = joint.probs if isinstance(joint, JointPmf) else np.asarray(joint, dtype=np.float64)
    if arr.shape != d.values.shape:
        raise DomainError(f"joint shape {arr.shape} does not match distortion shape {d.values.shape}")
    pos = arr > 0
    if np.any(np.isinf(d.values) & pos):
        return math.inf
    return math.fsum((arr[pos] * d.values[pos]).ravel())


# --------------------------------------------------------------------------
# JSON documents: {"alphabet_sizes": [...], "values": [...row-major...]}


def _parse_value(token, allow_inf: bool, where: str) -> float:
    if isinstance(token, bool):
        raise FileFormatError(f"{where}: boolean is not a number")
    if isinstance(token, (int, float)):
        return float(token)
    if isinstance(token, str):
        if token.strip().lower() in ("inf", "+inf", "infinity"):
            if not allow_inf:
                raise FileFormatError(f"{where}: 'inf' only allowed in distortion matrices")
            return math.inf
        try:
            return float(token)
        except ValueError:
            raise FileFormatError(f"{where}: cannot parse {token!r} as a number") from None
    raise FileFormatError(f"{where}: unexpected value {token!r}")


def parse_array_document(doc, allow_inf: bool = False) -> np.ndarray:
    if not isinstance(doc, dict):
        raise FileFormatError("document must be a JSON object")
    if "alphabet_sizes" not in doc:
        raise FileFormatError("missing field 'alphabet_sizes'")
    if "values" not in doc:
        raise FileFormatError("missing field 'values'")
    sizes = doc["alphabet_sizes"]
    if (
        not isinstance(sizes, list)
        or not sizes
        or not all(isinstance(s, int) and not isinstance(s, bool) and s > 0 for s in sizes)
    ):
        raise FileFormatError("field 'alphabet_sizes' must be a non-empty array of positive integers")
    values = doc["values"]
    if not isinstance(values, list):
        raise FileFormatError("field 'values' must be an array")
    expected = int(np.prod(sizes))
    if len(values) != expected:
        raise FileFormatError(f"field 'values' has {len(values)} entries, alphabet_sizes imply {expected}")
    flat = [_parse_value(v, allow_inf, f"values[{i}]") for i, v in enumerate(values)]
    return np.array(flat, dtype=np.float64).reshape(sizes)


def _read_document(path) -> dict:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def load_joint(path) -> JointPmf:
    arr = parse_array_document(_read_document(path))
    if arr.ndim != 2:
        raise FileFormatError("field 'alphabet_sizes' must have two entries for a joint pmf")
    return JointPmf(arr)


def load_distortion(path) -> DistortionMatrix:
    arr = parse_array_document(_read_document(path), allow_inf=True)
    if arr.ndim != 2:
        raise FileFormatError("field 'alphabet_sizes' must have two entries for a distortion matrix")
    return DistortionMatrix(arr)


def load_channel(path) -> Channel:
    arr = parse_array_document(_read_document(path))
    if arr.ndim < 2:
        raise FileFormatError("field 'alphabet_sizes' needs conditioning and output sizes for a channel")
    return Channel(arr.reshape(-1, arr.shape[-1]))


def to_document(values) -> dict:
    arr = np.asarray(values, dtype=np.float64)
    return {
        "alphabet_sizes": list(arr.shape),
        "values": ["inf" if math.isinf(v) else float(v) for v in arr.ravel()],
    }
