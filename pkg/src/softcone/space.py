"""The soft Banach space R^n(A): soft vectors, soft norms, balls."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .core import ParameterSet, SoftReal, _frozen, check_same_params
from .errors import EmptySequence, MismatchedDimension, MismatchedParameters, NonFiniteResult


class SoftVector:
    """An n-tuple of reals per parameter, stored as a read-only (len(A), n) array."""

    __slots__ = ("params", "values")

    def __init__(self, params: ParameterSet, values):
        if isinstance(values, Mapping):
            missing = [lab for lab in params if lab not in values]
            if missing:
                raise MismatchedParameters(f"soft vector missing labels {missing}")
            rows = [np.atleast_1d(np.asarray(values[lab], dtype=float)) for lab in params]
            if len({r.shape for r in rows}) != 1:
                raise MismatchedDimension("tuple length differs across labels")
            arr = np.stack(rows)
        else:
            arr = np.array(values, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != len(params) or arr.shape[1] < 1:
            raise MismatchedDimension(
                f"expected shape ({len(params)}, n), got {arr.shape}")
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "values", _frozen(arr))

    def __setattr__(self, name, value):
        raise AttributeError("SoftVector is immutable")

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @classmethod
    def theta(cls, params: ParameterSet, dim: int) -> "SoftVector":
        return cls(params, np.zeros((len(params), dim)))

    @classmethod
    def constant(cls, params: ParameterSet, vec: Sequence[float]) -> "SoftVector":
        vec = np.asarray(vec, dtype=float).reshape(1, -1)
        return cls(params, np.repeat(vec, len(params), axis=0))

    @classmethod
    def from_soft_reals(cls, *coords: SoftReal) -> "SoftVector":
        params = coords[0].params
        for c in coords[1:]:
            check_same_params(params, c.params)
        return cls(params, np.stack([c.values for c in coords], axis=1))

    def coordinate(self, i: int) -> SoftReal:
        return SoftReal(self.params, self.values[:, i])

    def __getitem__(self, label: str) -> np.ndarray:
        return self.values[self.params.index(label)]

    def as_dict(self) -> dict[str, list[float]]:
        return {lab: [float(v) for v in row] for lab, row in zip(self.params.labels, self.values)}

    def is_theta(self) -> bool:
        return not np.any(self.values)

    def __repr__(self):
        return f"SoftVector({self.as_dict()})"

    def __eq__(self, other):
        if not isinstance(other, SoftVector):
            return NotImplemented
        return self.params == other.params and bool(np.array_equal(self.values, other.values))

    def __hash__(self):
        return hash((self.params, self.values.shape, self.values.tobytes()))

    def _check(self, other: "SoftVector") -> None:
        check_same_params(self.params, other.params)
        if self.dim != other.dim:
            raise MismatchedDimension(f"dimensions differ: {self.dim} vs {other.dim}")

    def _wrap(self, op, *args) -> "SoftVector":
        with np.errstate(all="ignore"):
            arr = op(*args)
        if not np.all(np.isfinite(arr)):
            raise NonFiniteResult("non-finite soft vector")
        return SoftVector(self.params, arr)

    def __add__(self, other):
        if not isinstance(other, SoftVector):
            return NotImplemented
        self._check(other)
        return self._wrap(np.add, self.values, other.values)

    def __sub__(self, other):
        if not isinstance(other, SoftVector):
            return NotImplemented
        self._check(other)
        return self._wrap(np.subtract, self.values, other.values)

    def __neg__(self):
        return SoftVector(self.params, -self.values)

    def __mul__(self, scalar):
        # soft scalar multiplies label-wise
        if isinstance(scalar, SoftReal):
            check_same_params(self.params, scalar.params)
            return self._wrap(np.multiply, self.values, scalar.values[:, None])
        if isinstance(scalar, (int, float, np.floating, np.integer)):
            return self._wrap(np.multiply, self.values, float(scalar))
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        if isinstance(scalar, SoftReal):
            return self * (1.0 / scalar)
        return self * (1.0 / float(scalar))


def vec_arith(kind: str, x: SoftVector, y_or_scalar=None) -> SoftVector:
    """Label-wise vector arithmetic: add, sub, scalar_mul_soft, neg."""
    if kind == "neg":
        return -x
    if kind == "add":
        return x + y_or_scalar
    if kind == "sub":
        return x - y_or_scalar
    if kind == "scalar_mul_soft":
        if not isinstance(y_or_scalar, SoftReal):
            raise TypeError("scalar_mul_soft expects a SoftReal scalar")
        return x * y_or_scalar
    raise ValueError(f"unknown vector operation {kind!r}")


# --- points: soft reals and soft vectors share array-level helpers ------------


def point_array(p) -> np.ndarray:
    """View a soft real or soft vector as a (len(A), k) array."""
    if isinstance(p, SoftVector):
        return p.values
    if isinstance(p, SoftReal):
        return p.values[:, None]
    raise TypeError(f"not a soft point: {type(p).__name__}")


def point_like(template, arr: np.ndarray):
    """Rebuild a point of the same kind as ``template`` from an array."""
    if isinstance(template, SoftReal):
        return SoftReal(template.params, np.asarray(arr).reshape(-1))
    return SoftVector(template.params, np.asarray(arr).reshape(len(template.params), -1))


def point_dim(p) -> int:
    return 1 if isinstance(p, SoftReal) else p.dim


# --- norms --------------------------------------------------------------------


class InnerNorm(str, enum.Enum):
    EUCLIDEAN = "euclidean"
    MAX = "max"
    ONE = "one"


_ORD = {InnerNorm.EUCLIDEAN: 2, InnerNorm.MAX: np.inf, InnerNorm.ONE: 1}


@dataclass(frozen=True)
class SoftNorm:
    """A per-label norm on R^n lifted to a soft norm with values in R(A)."""

    inner_norm: InnerNorm = InnerNorm.EUCLIDEAN

    def __post_init__(self):
        object.__setattr__(self, "inner_norm", InnerNorm(self.inner_norm))

    def array(self, arr: np.ndarray) -> np.ndarray:
        """Row-wise norm of an array of shape (..., n)."""
        return np.linalg.norm(arr, ord=_ORD[self.inner_norm], axis=-1)

    def __call__(self, x) -> SoftReal:
        return SoftReal(x.params, self.array(point_array(x)))

    def maxnorm(self, x) -> float:
        """Largest per-label norm, a scalar summary used by stopping rules."""
        return float(np.max(self.array(point_array(x))))


EUCLIDEAN = SoftNorm(InnerNorm.EUCLIDEAN)


def norm(x, nrm: SoftNorm = EUCLIDEAN) -> SoftReal:
    return nrm(x)


def _check_points(x, y) -> None:
    check_same_params(x.params, y.params)
    if point_dim(x) != point_dim(y):
        raise MismatchedDimension(f"dimensions differ: {point_dim(x)} vs {point_dim(y)}")


def norm_metric(x, y, nrm: SoftNorm = EUCLIDEAN) -> SoftReal:
    """Soft metric induced by a soft norm: d(x, y) = ||x - y||."""
    _check_points(x, y)
    return SoftReal(x.params, nrm.array(point_array(x) - point_array(y)))


class BallKind(str, enum.Enum):
    OPEN = "open"
    CLOSED = "closed"
    SPHERE = "sphere"


@dataclass(frozen=True)
class Ball:
    center: object
    radius: SoftReal
    kind: BallKind = BallKind.OPEN

    def __post_init__(self):
        object.__setattr__(self, "kind", BallKind(self.kind))
        check_same_params(self.center.params, self.radius.params)
        if self.kind is not BallKind.SPHERE and not np.all(self.radius.values > 0):
            raise ValueError("ball radius must be strictly positive at every label")

    def contains(self, y, nrm: SoftNorm = EUCLIDEAN) -> bool:
        return ball_contains(self, y, nrm)


def ball_contains(b: Ball, y, nrm: SoftNorm = EUCLIDEAN) -> bool:
    dist = norm_metric(b.center, y, nrm).values
    r = b.radius.values
    if b.kind is BallKind.OPEN:
        return bool(np.all(dist < r))
    if b.kind is BallKind.CLOSED:
        return bool(np.all(dist <= r))
    return bool(np.array_equal(dist, r))


def cauchy_window(length: int) -> int:
    """Default trailing-window size for finite-sample Cauchy checks."""
    return max(2, math.ceil(length / 4))


def norm_cauchy_check(seq: Sequence, nrm: SoftNorm = EUCLIDEAN, tol: float = 1e-6,
                      window: int | None = None) -> bool:
    """Finite-sample Cauchy test: all pairs in the trailing window are within ``tol``.

    The distance of a pair is the largest per-label norm of their difference.
    """
    if len(seq) < 2:
        raise EmptySequence("need at least two terms")
    if tol <= 0:
        raise ValueError("tol must be positive")
    window = cauchy_window(len(seq)) if window is None else max(2, min(window, len(seq)))
    tail = np.stack([point_array(p) for p in seq[-window:]])
    diffs = tail[:, None] - tail[None, :]
    return bool(np.max(nrm.array(diffs)) < tol)


def check_norm_axioms(nrm: SoftNorm, params: ParameterSet, dim: int, trials: int = 1000,
                      seed: int = 0, slack: float = 1e-12,
                      box: float = 10.0) -> dict[str, int]:
    """Count violations of N1-N4 for ``nrm`` and M1-M4 for its induced metric.

    N3 and N4/M4 use a relative slack; N2/M2 are exact (zero iff Theta).
    """
    rng = np.random.default_rng(seed)
    m = len(params)
    fails = dict.fromkeys(["N1", "N2", "N3", "N4", "M1", "M2", "M3", "M4"], 0)
    theta = SoftVector.theta(params, dim)
    if np.any(nrm(theta).values != 0):
        fails["N2"] += 1
    for _ in range(trials):
        x, y, z = (SoftVector(params, rng.uniform(-box, box, (m, dim))) for _ in range(3))
        alpha = SoftReal(params, rng.uniform(-box, box, m))
        nx, ny = nrm(x).values, nrm(y).values
        if np.any(nx < 0):
            fails["N1"] += 1
        if np.any(nx == 0) != np.any(np.all(x.values == 0, axis=1)):
            fails["N2"] += 1
        lhs, rhs = nrm(x * alpha).values, np.abs(alpha.values) * nx
        if np.any(np.abs(lhs - rhs) > slack * (1 + rhs)):
            fails["N3"] += 1
        s = nrm(x + y).values
        if np.any(s > (nx + ny) * (1 + slack) + slack):
            fails["N4"] += 1
        dxy, dyx = norm_metric(x, y, nrm).values, norm_metric(y, x, nrm).values
        dxz, dzy = norm_metric(x, z, nrm).values, norm_metric(z, y, nrm).values
        if np.any(dxy < 0):
            fails["M1"] += 1
        if np.any(norm_metric(x, x, nrm).values != 0) or (x != y and np.all(dxy == 0)):
            fails["M2"] += 1
        if not np.array_equal(dxy, dyx):
            fails["M3"] += 1
        if np.any(dxy > (dxz + dzy) * (1 + slack) + slack):
            fails["M4"] += 1
    return fails
