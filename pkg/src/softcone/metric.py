"""Soft cone metrics: constructors, slicing into crisp families, axiom engine."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

import numpy as np

from .cone import Cone, orthant_cone
from .core import ParameterSet, SoftReal, check_same_params
from .errors import D4Violated, MismatchedDimension, MissingLabel, NegativeAlpha
from .space import SoftVector, point_array, point_dim

ArrayMetric = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class CrispConeMetric:
    """A cone metric on R^k with values in R^v, ordered by the orthant.

    ``fn`` maps arrays of shape (..., k) to (..., v); rows are independent.
    """

    name: str
    fn: ArrayMetric = field(repr=False, compare=False)
    value_dim: Callable[[int], int] = field(repr=False, compare=False)

    def __call__(self, r, s) -> np.ndarray:
        r = np.atleast_1d(np.asarray(r, dtype=float))
        s = np.atleast_1d(np.asarray(s, dtype=float))
        return self.fn(r, s)


def _abs(r, s):
    return np.abs(r - s)


def _discrete(r, s):
    return np.any(r != s, axis=-1, keepdims=True).astype(float)


def _euclidean(r, s):
    return np.linalg.norm(r - s, axis=-1, keepdims=True)


def _positive_part(r, s):
    return np.maximum(r - s, 0.0)


ABS = CrispConeMetric("abs", _abs, lambda k: k)
DISCRETE = CrispConeMetric("discrete", _discrete, lambda k: 1)
EUCLIDEAN_DIST = CrispConeMetric("euclidean", _euclidean, lambda k: 1)
# not symmetric: kept so the axiom engine has something to catch
POSITIVE_PART = CrispConeMetric("positive_part", _positive_part, lambda k: k)

CRISP_REGISTRY: dict[str, CrispConeMetric] = {
    m.name: m for m in (ABS, DISCRETE, EUCLIDEAN_DIST, POSITIVE_PART)
}


def scaled(rho: CrispConeMetric, factor: float) -> CrispConeMetric:
    """``factor * rho``; a cone metric again for factor > 0."""
    return CrispConeMetric(f"{factor:g}*{rho.name}", lambda r, s: factor * rho.fn(r, s),
                           rho.value_dim)


@dataclass(frozen=True)
class SoftConeMetric:
    """A map from pairs of soft points to soft vectors in ``cone``.

    ``fn`` works on (len(A), k) arrays and returns a (len(A), v) array.
    """

    params: ParameterSet
    point_dim: int
    point_kind: str
    cone: Cone
    fn: ArrayMetric = field(repr=False)
    name: str = ""
    family: Optional[Mapping[str, CrispConeMetric]] = field(default=None, repr=False)

    @property
    def value_dim(self) -> int:
        return self.cone.dim

    def __call__(self, x, y) -> SoftVector:
        check_same_params(self.params, x.params)
        check_same_params(self.params, y.params)
        if point_dim(x) != self.point_dim or point_dim(y) != self.point_dim:
            raise MismatchedDimension(f"metric expects points of dim {self.point_dim}")
        return SoftVector(self.params, self.fn(point_array(x), point_array(y)))

    def theta(self) -> SoftVector:
        return self.cone.theta()


def _point_kind(k: int, kind: str | None) -> str:
    if kind is not None:
        return kind
    return "real" if k == 1 else "vector"


def example_metric(alpha: SoftReal) -> SoftConeMetric:
    """d(x, y) = (|x - y|, alpha |x - y|) on soft reals, valued in R^2(A)."""
    if np.any(alpha.values < 0):
        raise NegativeAlpha("alpha must be >= 0 at every label")
    params = alpha.params
    a = alpha.values[:, None]

    def fn(xa, ya):
        diff = np.abs(xa - ya)
        return np.concatenate([diff, a * diff], axis=1)

    return SoftConeMetric(params, 1, "real", orthant_cone(params, 2), fn, name="example")


def from_family(family: Mapping[str, CrispConeMetric], params: ParameterSet,
                point_dim: int = 1, point_kind: str | None = None) -> SoftConeMetric:
    """Soft cone metric whose value at each label is that label's crisp metric."""
    missing = [lab for lab in params if lab not in family]
    if missing:
        raise MissingLabel(f"family has no member for {missing}")
    members = [family[lab] for lab in params]
    dims = {m.value_dim(point_dim) for m in members}
    if len(dims) != 1:
        raise MismatchedDimension(f"family members disagree on value dimension: {dims}")
    v = dims.pop()

    def fn(xa, ya):
        return np.stack([m.fn(xa[i], ya[i]) for i, m in enumerate(members)])

    return SoftConeMetric(params, point_dim, _point_kind(point_dim, point_kind),
                          orthant_cone(params, v), fn, name="family",
                          family={lab: family[lab] for lab in params})


def from_crisp(rho: CrispConeMetric, params: ParameterSet, point_dim: int = 1,
               point_kind: str | None = None) -> SoftConeMetric:
    """Soft cone metric generated by a single crisp metric at every label."""
    v = rho.value_dim(point_dim)
    return SoftConeMetric(params, point_dim, _point_kind(point_dim, point_kind),
                          orthant_cone(params, v), rho.fn, name=f"crisp:{rho.name}",
                          family={lab: rho for lab in params})


def cross_label_max_metric(params: ParameterSet, point_dim: int = 1) -> SoftConeMetric:
    """d(x, y)(lam) = max over all labels mu of |x(mu) - y(mu)|.

    A valid soft cone metric that is not a parametrized family: its value at
    one label reads coordinates at every other label.
    """
    m = len(params)

    def fn(xa, ya):
        top = np.max(np.abs(xa - ya))
        return np.full((m, 1), top)

    return SoftConeMetric(params, point_dim, _point_kind(point_dim, None),
                          orthant_cone(params, 1), fn, name="cross_label_max")


METRIC_REGISTRY: dict[str, Callable[[ParameterSet, int], SoftConeMetric]] = {
    "cross_label_max": cross_label_max_metric,
}


def metric_from_descriptor(desc: dict, params: ParameterSet, point_dim: int = 1,
                           point_kind: str | None = None) -> SoftConeMetric:
    kind = desc.get("type")
    if kind == "example":
        from .serialize import soft_real_from_json
        if point_dim != 1:
            raise MismatchedDimension("the example metric acts on soft reals")
        return example_metric(soft_real_from_json(desc.get("alpha", 1.0), params))
    if kind == "crisp":
        return from_crisp(_crisp(desc["name"]), params, point_dim, point_kind)
    if kind == "family":
        members = desc["members"]
        return from_family({lab: _crisp(name) for lab, name in members.items()},
                           params, point_dim, point_kind)
    if kind == "registry":
        name = desc["name"]
        if name not in METRIC_REGISTRY:
            raise KeyError(f"unknown metric {name!r}")
        return METRIC_REGISTRY[name](params, point_dim)
    raise ValueError(f"unknown metric type {kind!r}")


def _crisp(name: str) -> CrispConeMetric:
    if isinstance(name, str) and name.startswith("scaled:"):
        _, factor, base = name.split(":", 2)
        return scaled(_crisp(base), float(factor))
    if name not in CRISP_REGISTRY:
        raise KeyError(f"unknown crisp metric {name!r}")
    return CRISP_REGISTRY[name]


# --- samplers -----------------------------------------------------------------


@dataclass(frozen=True)
class UniformSampler:
    """Uniform points in a box; soft reals for k == 1 unless ``kind='vector'``."""

    params: ParameterSet
    point_dim: int = 1
    low: float = -10.0
    high: float = 10.0
    kind: str = "real"

    def __call__(self, rng: np.random.Generator):
        arr = rng.uniform(self.low, self.high, size=(len(self.params), self.point_dim))
        if self.kind == "real" and self.point_dim == 1:
            return SoftReal(self.params, arr[:, 0])
        return SoftVector(self.params, arr)


def default_sampler(metric: SoftConeMetric, low: float = -10.0, high: float = 10.0):
    return UniformSampler(metric.params, metric.point_dim, low, high, metric.point_kind)


# --- slicing ------------------------------------------------------------------


def _embed(background: np.ndarray, i: int, row: np.ndarray) -> np.ndarray:
    out = background.copy()
    out[i] = row
    return out


def _sliced(metric: SoftConeMetric, i: int, label: str) -> CrispConeMetric:
    m, k = len(metric.params), metric.point_dim
    base = np.zeros((m, k))

    def fn(r, s):
        r = np.asarray(r, dtype=float)
        s = np.asarray(s, dtype=float)
        lead = np.broadcast_shapes(r.shape[:-1], s.shape[:-1])
        rr = np.broadcast_to(r, lead + (k,)).reshape(-1, k)
        ss = np.broadcast_to(s, lead + (k,)).reshape(-1, k)
        out = [metric.fn(_embed(base, i, a), _embed(base, i, b))[i] for a, b in zip(rr, ss)]
        return np.asarray(out).reshape(lead + (metric.value_dim,))

    return CrispConeMetric(f"{metric.name}@{label}", fn, lambda _k: metric.value_dim)


def slice_metric(metric: SoftConeMetric, witnesses: int = 100, seed: int = 0,
                 low: float = -10.0, high: float = 10.0) -> dict[str, CrispConeMetric]:
    """Split a metric into one crisp cone metric per label.

    Each label is first tested for (d4): ``witnesses`` random argument pairs are
    each evaluated against two independent backgrounds that agree only at that
    label. Any disagreement raises :class:`D4Violated`.
    """
    rng = np.random.default_rng(seed)
    m, k = len(metric.params), metric.point_dim
    out = {}
    for i, label in enumerate(metric.params):
        for _ in range(witnesses):
            r, s = rng.uniform(low, high, size=(2, k))
            x1, y1, x2, y2 = (_embed(rng.uniform(low, high, size=(m, k)), i, row)
                              for row in (r, s, r, s))
            d1 = metric.fn(x1, y1)[i]
            d2 = metric.fn(x2, y2)[i]
            if not np.array_equal(d1, d2):
                witness = (label, (x1, y1), (x2, y2))
                raise D4Violated(
                    f"value at {label!r} depends on other labels: {d1} vs {d2}", witness)
        out[label] = _sliced(metric, i, label)
    return out


# --- axiom engine -------------------------------------------------------------


@dataclass
class AxiomReport:
    axiom: str
    trials: int
    failures: int = 0
    worst_violation: float = 0.0
    counterexample: object = None

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def record(self, magnitude: float, example) -> None:
        self.failures += 1
        if self.counterexample is None or magnitude > self.worst_violation:
            self.worst_violation = magnitude
            self.counterexample = example

    def __str__(self):
        status = "PASS" if self.passed else "FAIL"
        line = (f"{self.axiom}: {status} trials={self.trials} failures={self.failures} "
                f"worst={self.worst_violation:.3e}")
        if self.counterexample is not None:
            line += f" counterexample={self.counterexample}"
        return line


def _show(arr: np.ndarray) -> list:
    return arr.tolist()


def check_axioms(metric: SoftConeMetric, sampler=None, trials: int = 1000, seed: int = 0,
                 slack: float = 1e-12) -> list[AxiomReport]:
    """Randomized check of d1, d2, d3 and cone membership.

    Trial ``i`` draws its points from a generator seeded by the ``i``-th child
    of ``SeedSequence(seed)``, so results do not depend on evaluation order.
    d3 violation is the most negative coordinate of d(x,z)+d(z,y)-d(x,y).
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    sampler = sampler or default_sampler(metric)
    fn, cone = metric.fn, metric.cone
    reports = {name: AxiomReport(name, trials) for name in ("d1", "d2", "d3", "cone")}
    for child in np.random.SeedSequence(seed).spawn(trials):
        rng = np.random.default_rng(child)
        x, y, z = (point_array(sampler(rng)) for _ in range(3))
        dxy, dyx = fn(x, y), fn(y, x)
        dxz, dzy, dxx = fn(x, z), fn(z, y), fn(x, x)
        case = {"x": _show(x), "y": _show(y), "z": _show(z)}

        if np.any(dxx):
            reports["d1"].record(float(np.max(np.abs(dxx))), {**case, "d(x,x)": _show(dxx)})
        if not np.array_equal(x, y):
            if not cone.member_array(dxy):
                reports["d1"].record(float(-np.min(dxy)), {**case, "d(x,y)": _show(dxy)})
            elif not np.any(dxy):
                reports["d1"].record(1.0, {**case, "d(x,y)": _show(dxy)})

        if not np.array_equal(dxy, dyx):
            reports["d2"].record(float(np.max(np.abs(dxy - dyx))),
                                 {**case, "d(x,y)": _show(dxy), "d(y,x)": _show(dyx)})

        gap = float(np.min(dxz + dzy - dxy))
        if gap < -slack:
            reports["d3"].record(-gap, case)

        for d in (dxy, dxz, dzy):
            if not cone.member_array(d):
                reports["cone"].record(float(-np.min(d)), {**case, "d": _show(d)})
                break
    return list(reports.values())


def check_crisp_axioms(rho: CrispConeMetric, point_dim: int = 1, trials: int = 1000,
                       seed: int = 0, slack: float = 1e-12) -> list[AxiomReport]:
    """Cone-metric axioms of a crisp metric, run through a one-label soft lift."""
    single = ParameterSet(["_"])
    return check_axioms(from_crisp(rho, single, point_dim), trials=trials, seed=seed,
                        slack=slack)
