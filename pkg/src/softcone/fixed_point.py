"""Picard iteration for contractive self-maps with certified error bounds.

Families and their step ratio q (the rate at which d(x_{n+1}, x_n) shrinks):

* ``banach`` / ``banach_ball`` / ``banach_power``: q = t, 0 <= t < 1
* ``kannan`` / ``chatterjea``: q = s = t / (1 - t), 0 <= t < 1/2
* ``hybrid``: q = t, 0 <= t, r < 1 (the r term vanishes along the orbit)

Stopping uses the a-posteriori tail bound q/(1-q) * d(x_n, x_{n-1}); the
certificate also carries the a-priori bound q**m/(1-q) * d(x_1, x_0).
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping, Optional

import numpy as np

from .cone import preceq, way_below
from .core import ParameterSet, SoftReal, check_same_params
from .errors import (
    BallPreconditionFailed,
    ContractionRefuted,
    FixedPointNotSharedByT,
    MapDomainError,
    MaxIterExceeded,
    SpecError,
)
from .metric import SoftConeMetric, default_sampler
from .space import EUCLIDEAN, SoftNorm, SoftVector, point_array, point_dim, point_like

DEFAULT_MAX_ITER = 10**5
REFUTE_STEPS = 10
RATIO_SLACK = 1e-9
RANGE_GUARD = 1e-12


def default_max_iter() -> int:
    env = os.environ.get("SOFTCONE_MAX_ITER")
    return int(env) if env else DEFAULT_MAX_ITER


# --- self maps ----------------------------------------------------------------


@dataclass(frozen=True)
class SelfMap:
    name: str
    apply: Callable = field(repr=False)
    metadata: Mapping = field(default_factory=dict, repr=False)

    def __call__(self, x):
        try:
            y = self.apply(x)
        except Exception as exc:
            raise MapDomainError(f"{self.name} failed: {exc}") from exc
        if type(y) is not type(x) or y.params != x.params or point_dim(y) != point_dim(x):
            raise MapDomainError(f"{self.name} does not map the point space to itself")
        return y

    def power(self, n: int) -> "SelfMap":
        if n < 1:
            raise ValueError("power must be >= 1")
        if n == 1:
            return self

        def apply(x):
            for _ in range(n):
                x = self(x)
            return x

        return SelfMap(f"{self.name}^{n}", apply, {**self.metadata, "power": n})


def _per_label(value, params: ParameterSet) -> np.ndarray:
    if isinstance(value, SoftReal):
        check_same_params(params, value.params)
        return value.values
    return np.full(len(params), float(value))


def scalar_affine(a, b, name: str | None = None) -> SelfMap:
    """T(x)(lam) = a(lam) * x(lam) + b(lam); a, b are floats or soft reals."""

    def apply(x):
        arr = point_array(x)
        av = _per_label(a, x.params)[:, None]
        bv = _per_label(b, x.params)[:, None]
        return point_like(x, av * arr + bv)

    return SelfMap(name or "scalar_affine", apply, {"a": a, "b": b})


def matrix_affine(M, b, name: str | None = None) -> SelfMap:
    """T(x)(lam) = M_lam x(lam) + b_lam.

    ``M`` and ``b`` are either shared across labels or dicts keyed by label.
    """

    def rows(value, params, ndim):
        if isinstance(value, Mapping):
            return np.stack([np.asarray(value[lab], dtype=float) for lab in params])
        arr = np.asarray(value, dtype=float)
        return np.broadcast_to(arr, (len(params),) + arr.shape[-ndim:])

    def apply(x):
        Ms = rows(M, x.params, 2)
        bs = rows(b, x.params, 1)
        arr = point_array(x)
        return point_like(x, np.einsum("lij,lj->li", Ms, arr) + bs)

    return SelfMap(name or "matrix_affine", apply, {"M": M, "b": b})


MAP_REGISTRY: dict[str, Callable[[], SelfMap]] = {
    "half_plus_one": lambda: scalar_affine(0.5, 1.0, "half_plus_one"),
    "fifth": lambda: scalar_affine(0.2, 0.0, "fifth"),
    "double": lambda: scalar_affine(2.0, 0.0, "double"),
    "power_demo": lambda: matrix_affine([[0.0, 2.0], [0.1, 0.0]], [1.0, 1.0], "power_demo"),
}


def iterate(T: SelfMap, x0, k: int):
    """[x0, T x0, ..., T^k x0] as a SoftSequence of length k + 1."""
    from .convergence import SoftSequence

    if k < 1:
        raise ValueError("k must be >= 1")
    out = [x0]
    for _ in range(k):
        out.append(T(out[-1]))
    return SoftSequence(out)


# --- contraction specs --------------------------------------------------------


class Family(str, enum.Enum):
    BANACH = "banach"
    BANACH_BALL = "banach_ball"
    BANACH_POWER = "banach_power"
    KANNAN = "kannan"
    CHATTERJEA = "chatterjea"
    HYBRID = "hybrid"


class Uniqueness(str, enum.Enum):
    UNIQUE = "unique"
    UNIQUE_IF_T_PLUS_R_LT_1 = "unique_if_t_plus_r_lt_1"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class ContractionSpec:
    family: Family
    t: SoftReal
    r: Optional[SoftReal] = None
    power: int = 1
    ball_center: object = None
    ball_radius: Optional[SoftVector] = None

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        t = self.t.values
        if np.any(t < 0):
            raise SpecError("t out of range: must be >= 0")
        upper = 0.5 if self.family in (Family.KANNAN, Family.CHATTERJEA) else 1.0
        if np.any(t >= upper - RANGE_GUARD):
            raise SpecError(f"t out of range: must be < {upper:g} for {self.family.value}")
        if self.family is Family.HYBRID:
            if self.r is None:
                raise SpecError("hybrid family needs r")
            check_same_params(self.t.params, self.r.params)
            if np.any(self.r.values < 0) or np.any(self.r.values >= 1 - RANGE_GUARD):
                raise SpecError("r out of range: must satisfy 0 <= r < 1")
        if self.family is Family.BANACH_POWER and self.power < 1:
            raise SpecError("power must be >= 1")
        if self.family is Family.BANACH_BALL and (self.ball_center is None
                                                  or self.ball_radius is None):
            raise SpecError("banach_ball needs a ball center and radius")
        q = self.q.values
        if np.any(q >= 1 - RANGE_GUARD):
            raise SpecError("step ratio q must be < 1")

    @property
    def params(self) -> ParameterSet:
        return self.t.params

    @property
    def q(self) -> SoftReal:
        """Step ratio used by the bounds: t, or t/(1-t) for Kannan/Chatterjea."""
        if self.family in (Family.KANNAN, Family.CHATTERJEA):
            return self.t / (1.0 - self.t)
        return self.t

    def uniqueness(self) -> Uniqueness:
        if self.family is Family.HYBRID:
            if np.all(self.t.values + self.r.values < 1):
                return Uniqueness.UNIQUE_IF_T_PLUS_R_LT_1
            return Uniqueness.UNKNOWN
        return Uniqueness.UNIQUE


# --- contraction verification -------------------------------------------------


class ContractionStatus(str, enum.Enum):
    WITNESSED = "witnessed"
    REFUTED = "refuted"
    ASSUMED = "assumed"


@dataclass
class ContractionCheck:
    status: ContractionStatus
    checked: int = 0
    counterexample: object = None

    @property
    def witnessed(self) -> bool:
        return self.status is ContractionStatus.WITNESSED


def contraction_sides(T: SelfMap, metric: SoftConeMetric, spec: ContractionSpec, x, y):
    """(lhs, rhs) arrays of the family's contractive inequality at (x, y)."""
    d = metric.fn
    tx, ty = T(x), T(y)
    xa, ya, txa, tya = map(point_array, (x, y, tx, ty))
    t = spec.t.values[:, None]
    lhs = d(txa, tya)
    fam = spec.family
    if fam is Family.KANNAN:
        rhs = t * (d(txa, xa) + d(tya, ya))
    elif fam is Family.CHATTERJEA:
        rhs = t * (d(txa, ya) + d(tya, xa))
    elif fam is Family.HYBRID:
        rhs = t * d(xa, ya) + spec.r.values[:, None] * d(ya, txa)
    else:
        rhs = t * d(xa, ya)
    return lhs, rhs


def _ball_sampler(metric: SoftConeMetric, spec: ContractionSpec):
    center = spec.ball_center
    radius = spec.ball_radius
    width = float(np.max(radius.values))
    base = default_sampler(metric, -width, width)

    def sample(rng):
        ca = point_array(center)
        for _ in range(100):
            p = point_like(center, ca + point_array(base(rng)))
            if preceq(metric.cone, metric(center, p), radius):
                return p
        return center

    return sample


def verify_contraction(T: SelfMap, metric: SoftConeMetric, spec: ContractionSpec,
                       sampler=None, trials: int = 1000, seed: int = 0, pairs=None,
                       slack: float = 1e-12) -> ContractionCheck:
    """Sample pairs and test the family's inequality coordinate-wise at every label.

    ``pairs`` replaces random sampling with an explicit list of (x, y). With
    ``trials=0`` and no pairs the contraction is recorded as assumed.
    ``banach_power`` specs are checked on T**power.
    """
    if spec.family is Family.BANACH_POWER:
        T = T.power(spec.power)
    if pairs is None:
        if trials == 0:
            return ContractionCheck(ContractionStatus.ASSUMED)
        if sampler is None:
            sampler = (_ball_sampler(metric, spec) if spec.family is Family.BANACH_BALL
                       else default_sampler(metric))
        rng = np.random.default_rng(seed)
        pairs = ((sampler(rng), sampler(rng)) for _ in range(trials))
    checked = 0
    for x, y in pairs:
        lhs, rhs = contraction_sides(T, metric, spec, x, y)
        checked += 1
        if np.any(lhs > rhs + slack * (1.0 + np.abs(rhs))):
            return ContractionCheck(ContractionStatus.REFUTED, checked, (x, y))
    return ContractionCheck(ContractionStatus.WITNESSED, checked)


# --- solver -------------------------------------------------------------------


@dataclass(frozen=True)
class Stop:
    """Stop when the a-posteriori bound is << c, or its max-label norm < norm_tol."""

    c: Optional[SoftVector] = None
    norm_tol: Optional[float] = None

    def __post_init__(self):
        if (self.c is None) == (self.norm_tol is None):
            raise SpecError("stop needs exactly one of c or norm_tol")
        if self.norm_tol is not None and not self.norm_tol > 0:
            raise SpecError("norm_tol must be positive")

    def validate(self, metric: SoftConeMetric) -> None:
        if self.c is not None and not metric.cone.in_interior(self.c):
            raise SpecError("stop radius c must be interior to the cone")

    def satisfied(self, bound: SoftVector, metric: SoftConeMetric, nrm: SoftNorm) -> bool:
        if self.c is not None:
            return way_below(metric.cone, bound, self.c)
        return nrm.maxnorm(bound) < self.norm_tol

    def scaled(self, factor: float) -> "Stop":
        if self.c is not None:
            return Stop(c=self.c * factor)
        return Stop(norm_tol=self.norm_tol * factor)


@dataclass
class FixedPointCertificate:
    fixed_element: object
    iterations: int
    family: Family
    t: SoftReal
    q: SoftReal
    r: Optional[SoftReal]
    uniqueness: Uniqueness
    contraction_witnessed: bool
    first_step: SoftVector
    steps: list = field(default_factory=list, repr=False)
    residual_trail: list = field(default_factory=list, repr=False)
    iterates: list = field(default_factory=list, repr=False)
    aposteriori_bound: Optional[SoftVector] = None
    final_residual: Optional[SoftVector] = None
    ball_checks: list = field(default_factory=list, repr=False)
    power: int = 1

    def apriori_bound_at_m(self, m: int) -> SoftVector:
        """q**m / (1 - q) * d(x_1, x_0): bound on d(x_m, x*)."""
        q = self.q
        return self.first_step * ((q ** m) / (1.0 - q))

    @property
    def in_ball(self) -> bool:
        return all(self.ball_checks)

    def to_dict(self) -> dict:
        from .serialize import point_to_json, soft_real_to_json, soft_vector_to_json

        out = {
            "fixed_element": point_to_json(self.fixed_element),
            "iterations": self.iterations,
            "family": self.family.value,
            "t": soft_real_to_json(self.t),
            "q": soft_real_to_json(self.q),
            "uniqueness": self.uniqueness.value,
            "contraction_witnessed": self.contraction_witnessed,
            "final_aposteriori": soft_vector_to_json(self.aposteriori_bound),
            "final_residual": soft_vector_to_json(self.final_residual),
            "first_step": soft_vector_to_json(self.first_step),
        }
        if self.r is not None:
            out["r"] = soft_real_to_json(self.r)
        if self.family is Family.BANACH_POWER:
            out["power"] = self.power
        if self.family is Family.BANACH_BALL:
            out["in_ball"] = self.in_ball
        return out


def _noise_floor(metric: SoftConeMetric, xa: np.ndarray) -> float:
    scale = float(np.max(metric.fn(xa, np.zeros_like(xa)), initial=0.0))
    return 64 * np.finfo(float).eps * (1.0 + scale)


def solve(T: SelfMap, metric: SoftConeMetric, spec: ContractionSpec, x0=None,
          stop: Stop | None = None, max_iter: int | None = None,
          witnessed: bool = False, nrm: SoftNorm = EUCLIDEAN) -> FixedPointCertificate:
    """Run Picard iteration from ``x0`` until the a-posteriori bound meets ``stop``.

    Raises MaxIterExceeded or ContractionRefuted with the partial certificate
    attached; BallPreconditionFailed before iterating for ``banach_ball``.
    """
    if spec.family is Family.BANACH_POWER:
        return solve_power(T, metric, spec, x0, stop, max_iter, witnessed, nrm)
    stop = stop or Stop(norm_tol=1e-10)
    stop.validate(metric)
    max_iter = default_max_iter() if max_iter is None else max_iter
    check_same_params(metric.params, spec.params)
    ball = spec.family is Family.BANACH_BALL
    if x0 is None:
        if not ball:
            raise SpecError("x0 is required")
        x0 = spec.ball_center
    if ball:
        center, radius = spec.ball_center, spec.ball_radius
        moved = metric(T(center), center)
        allowed = radius * (1.0 - spec.t)
        if not preceq(metric.cone, moved, allowed):
            raise BallPreconditionFailed(
                f"d(T x0, x0) = {moved.as_dict()} exceeds (1 - t) c = {allowed.as_dict()}")

    q = spec.q.values[:, None]
    tail = q / (1.0 - q)
    params = metric.params

    def dist(a, b):
        return metric.fn(point_array(a), point_array(b))

    def in_ball(x):
        return preceq(metric.cone, metric(center, x), radius)

    x = T(x0)
    step = dist(x, x0)
    cert = FixedPointCertificate(
        fixed_element=x, iterations=1, family=spec.family, t=spec.t, q=spec.q, r=spec.r,
        uniqueness=spec.uniqueness(), contraction_witnessed=witnessed,
        first_step=SoftVector(params, step), iterates=[x0, x])
    cert.steps.append(cert.first_step)
    cert.residual_trail.append(SoftReal(params, nrm.array(step)))
    if ball:
        cert.ball_checks.extend([in_ball(x0), in_ball(x)])

    violations = 0
    while True:
        bound = SoftVector(params, tail * step)
        cert.fixed_element, cert.aposteriori_bound = x, bound
        if stop.satisfied(bound, metric, nrm):
            break
        if cert.iterations >= max_iter:
            cert.final_residual = SoftVector(params, dist(T(x), x))
            raise MaxIterExceeded(f"no convergence after {max_iter} iterations", cert)
        x_next = T(x)
        new_step = dist(x_next, x)
        floor = _noise_floor(metric, point_array(x_next))
        if np.any(new_step > (q + RATIO_SLACK) * step + floor):
            violations += 1
        else:
            violations = 0
        x, step = x_next, new_step
        cert.iterations += 1
        cert.iterates.append(x)
        cert.steps.append(SoftVector(params, step))
        cert.residual_trail.append(SoftReal(params, nrm.array(step)))
        if ball:
            cert.ball_checks.append(in_ball(x))
        if violations >= REFUTE_STEPS:
            cert.fixed_element = x
            cert.aposteriori_bound = SoftVector(params, tail * step)
            cert.final_residual = SoftVector(params, dist(T(x), x))
            raise ContractionRefuted(
                f"step ratio exceeded q for {REFUTE_STEPS} consecutive steps", cert)
    cert.final_residual = SoftVector(params, dist(T(x), x))
    return cert


def solve_power(T: SelfMap, metric: SoftConeMetric, spec: ContractionSpec, x0,
                stop: Stop | None = None, max_iter: int | None = None,
                witnessed: bool = False, nrm: SoftNorm = EUCLIDEAN,
                shared_factor: float = 10.0) -> FixedPointCertificate:
    """Solve with T**n, then confirm the result is a fixed point of T itself.

    T x* is accepted as equal to x* when d(T x*, x*) meets the stop rule
    scaled by ``shared_factor``.
    """
    stop = stop or Stop(norm_tol=1e-10)
    n = spec.power
    inner = replace(spec, family=Family.BANACH)
    cert = solve(T.power(n), metric, inner, x0, stop, max_iter, witnessed, nrm)
    x = cert.fixed_element
    shared = SoftVector(metric.params, metric.fn(point_array(T(x)), point_array(x)))
    cert.family = Family.BANACH_POWER
    cert.power = n
    cert.uniqueness = Uniqueness.UNIQUE
    cert.final_residual = shared
    if not stop.scaled(shared_factor).satisfied(shared, metric, nrm):
        raise FixedPointNotSharedByT(
            f"d(T x*, x*) = {shared.as_dict()} is not within tolerance", cert)
    return cert


def cross_check_uniqueness(cert_a: FixedPointCertificate, cert_b: FixedPointCertificate,
                           metric: SoftConeMetric, tol: float = 1e-8,
                           nrm: SoftNorm = EUCLIDEAN) -> bool:
    d = metric.fn(point_array(cert_a.fixed_element), point_array(cert_b.fixed_element))
    return float(np.max(nrm.array(d))) < tol
