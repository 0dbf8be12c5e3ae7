"""Soft cones in R^n(A), the orders they induce, and sampled property checks."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import ParameterSet, SoftReal, check_same_params
from .errors import MismatchedDimension, UnsupportedCone, UnsupportedProperty
from .space import EUCLIDEAN, SoftNorm, SoftVector

ArrayPredicate = Callable[[np.ndarray], bool]


@dataclass(frozen=True)
class Cone:
    """A soft cone given by membership and interior predicates.

    Predicates receive the (len(A), n) value array of a soft vector.
    """

    params: ParameterSet
    dim: int
    kind: str
    member_array: ArrayPredicate = field(repr=False)
    interior_array: ArrayPredicate = field(repr=False)
    normal_constant: Optional[SoftReal] = None
    name: str = ""

    def _check(self, x: SoftVector) -> None:
        check_same_params(self.params, x.params)
        if x.dim != self.dim:
            raise MismatchedDimension(f"cone has dim {self.dim}, vector has dim {x.dim}")

    def contains(self, x: SoftVector) -> bool:
        self._check(x)
        return bool(self.member_array(x.values))

    def in_interior(self, x: SoftVector) -> bool:
        self._check(x)
        return bool(self.interior_array(x.values))

    def theta(self) -> SoftVector:
        return SoftVector.theta(self.params, self.dim)


def orthant_cone(params: ParameterSet, dim: int, margin: float = 0.0) -> Cone:
    """Non-negative orthant: every coordinate >= 0 at every label.

    ``margin`` tightens the interior test to coordinates > margin.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    return Cone(
        params=params,
        dim=dim,
        kind="orthant",
        member_array=lambda a: bool(np.all(a >= 0)),
        interior_array=lambda a: bool(np.all(a > margin)),
        normal_constant=SoftReal.constant(params, 1.0),
        name="orthant",
    )


def custom_cone(params: ParameterSet, dim: int, member: ArrayPredicate,
                interior: ArrayPredicate, normal_constant: SoftReal | None = None,
                name: str = "custom") -> Cone:
    return Cone(params, dim, "custom", member, interior, normal_constant, name)


def ray_cone(params: ParameterSet, dim: int = 2) -> Cone:
    """{x : x1 >= 0, x2 = ... = xn = 0}: closed, pointed, with empty interior in R^n, n >= 2."""
    if dim < 2:
        raise ValueError("ray cone needs dim >= 2")
    return custom_cone(
        params, dim,
        member=lambda a: bool(np.all(a[:, 0] >= 0) and not np.any(a[:, 1:])),
        interior=lambda a: False,
        normal_constant=SoftReal.constant(params, 1.0),
        name="ray",
    )


CONE_REGISTRY: dict[str, Callable[[ParameterSet, int], Cone]] = {
    "orthant": orthant_cone,
    "ray": ray_cone,
}


def register_cone(name: str, factory: Callable[[ParameterSet, int], Cone]) -> None:
    CONE_REGISTRY[name] = factory


def cone_from_descriptor(desc: dict, params: ParameterSet, dim: int | None = None) -> Cone:
    """Resolve ``{"kind": "orthant", "dim": 2}`` or ``{"kind": "custom", "id": name}``."""
    kind = desc.get("kind")
    dim = desc.get("dim", dim)
    if dim is None:
        raise ValueError("cone descriptor needs a dim")
    if kind == "orthant":
        return orthant_cone(params, int(dim), float(desc.get("margin", 0.0)))
    if kind == "custom":
        ident = desc.get("id")
        if ident not in CONE_REGISTRY:
            raise KeyError(f"unknown cone id {ident!r}")
        return CONE_REGISTRY[ident](params, int(dim))
    raise ValueError(f"unknown cone kind {kind!r}")


# --- orders -------------------------------------------------------------------


class Relation(str, enum.Enum):
    WAY_BELOW = "way_below"
    PREC = "prec"
    PRECEQ = "preceq"
    NONE = "none"

    def implies_preceq(self) -> bool:
        return self is not Relation.NONE


def compare(cone: Cone, x: SoftVector, y: SoftVector) -> Relation:
    """Strongest order relation of x to y with respect to ``cone``."""
    cone._check(x)
    cone._check(y)
    diff = y.values - x.values
    if cone.interior_array(diff):
        return Relation.WAY_BELOW
    if cone.member_array(diff):
        return Relation.PREC if np.any(diff) else Relation.PRECEQ
    return Relation.NONE


def preceq(cone: Cone, x: SoftVector, y: SoftVector) -> bool:
    return compare(cone, x, y).implies_preceq()


def way_below(cone: Cone, x: SoftVector, y: SoftVector) -> bool:
    return compare(cone, x, y) is Relation.WAY_BELOW


def sup_pair(cone: Cone, x: SoftVector, y: SoftVector) -> SoftVector:
    """Least upper bound of two soft vectors in the orthant order."""
    if cone.kind != "orthant":
        raise UnsupportedCone("sup_pair is only defined for the orthant cone")
    cone._check(x)
    cone._check(y)
    return SoftVector(x.params, np.maximum(x.values, y.values))


def sup_many(cone: Cone, xs) -> SoftVector:
    """Supremum of a finite collection, folded from ``sup_pair``."""
    xs = list(xs)
    if not xs:
        raise ValueError("need at least one element")
    out = xs[0]
    for x in xs[1:]:
        out = sup_pair(cone, out, x)
    return out


# --- sampled property checks --------------------------------------------------


class ConeProperty(str, enum.Enum):
    NORMAL = "normal"
    MINIHEDRAL = "minihedral"
    STRONGLY_MINIHEDRAL = "strongly_minihedral"
    SOLID = "solid"
    POINTED = "pointed"
    CLOSED_UNDER_COMBINATION = "closed_under_combination"
    REGULAR = "regular"


@dataclass
class PropertyReport:
    property: ConeProperty
    trials: int
    passed: bool
    counterexample: object = None
    empirical_alpha: Optional[SoftReal] = None
    witness: Optional[SoftVector] = None

    def __str__(self):
        status = "PASS" if self.passed else "FAIL"
        extra = ""
        if self.empirical_alpha is not None:
            extra = f" alpha={self.empirical_alpha.as_dict()}"
        return f"{self.property.value}: {status} ({self.trials} trials){extra}"


def _sample_members(cone: Cone, rng: np.random.Generator, count: int, box: float,
                    max_draws: int = 50) -> list[np.ndarray]:
    """Draw cone members. Orthant samples directly; custom cones use rejection."""
    m, n = len(cone.params), cone.dim
    if cone.kind == "orthant":
        return list(rng.uniform(0.0, box, size=(count, m, n)))
    out: list[np.ndarray] = []
    for _ in range(max_draws):
        draws = rng.uniform(-box, box, size=(count, m, n))
        # snap a random subset of coordinates to zero so thin cones get hit
        mask = rng.random(size=draws.shape) < 0.5
        draws[mask] = 0.0
        out.extend(a for a in draws if cone.member_array(a))
        if len(out) >= count:
            break
    return out[:count]


def cone_property_check(cone: Cone, prop: str | ConeProperty, trials: int = 1000,
                        seed: int = 0, nrm: SoftNorm = EUCLIDEAN,
                        box: float = 10.0) -> PropertyReport:
    """Randomized falsification of a cone property.

    A pass means no counterexample was found in ``trials`` samples.
    """
    prop = ConeProperty(prop)
    if trials < 1:
        raise ValueError("trials must be positive")
    if cone.kind != "orthant" and prop in (ConeProperty.REGULAR,
                                            ConeProperty.STRONGLY_MINIHEDRAL,
                                            ConeProperty.MINIHEDRAL):
        raise UnsupportedProperty(f"{prop.value} cannot be checked on custom cones")
    rng = np.random.default_rng(seed)
    params = cone.params
    m, n = len(params), cone.dim

    if prop is ConeProperty.NORMAL:
        xs = _sample_members(cone, rng, trials, box)
        ws = _sample_members(cone, rng, trials, box)
        # zero some increments so pairs with x == y at a label (ratio exactly 1) occur
        snapped = [np.where(rng.random(w.shape) < 0.5, 0.0, w) for w in ws]
        ws = [s if cone.member_array(s) else w for s, w in zip(snapped, ws)]
        ratios = np.zeros(m)
        bad = None
        alpha = cone.normal_constant.values if cone.normal_constant is not None else None
        for x, w in zip(xs, ws):
            y = x + w
            nx, ny = nrm.array(x), nrm.array(y)
            with np.errstate(divide="ignore", invalid="ignore"):
                r = np.where(ny > 0, nx / ny, 0.0)
            ratios = np.maximum(ratios, r)
            if alpha is not None and bad is None and np.any(nx > alpha * ny + 1e-12):
                bad = (SoftVector(params, x), SoftVector(params, y))
        return PropertyReport(prop, len(xs), bad is None and len(xs) > 0, bad,
                              empirical_alpha=SoftReal(params, ratios))

    if prop is ConeProperty.SOLID:
        if cone.kind == "orthant":
            witness = SoftVector(params, np.ones((m, n)))
            return PropertyReport(prop, 1, cone.in_interior(witness), witness=witness)
        for a in _sample_members(cone, rng, trials, box):
            if cone.interior_array(a):
                return PropertyReport(prop, trials, True, witness=SoftVector(params, a))
        return PropertyReport(prop, trials, False)

    if prop is ConeProperty.POINTED:
        for a in _sample_members(cone, rng, trials, box):
            if cone.member_array(-a) and np.any(a):
                return PropertyReport(prop, trials, False, SoftVector(params, a))
        return PropertyReport(prop, trials, True)

    if prop is ConeProperty.CLOSED_UNDER_COMBINATION:
        xs = _sample_members(cone, rng, trials, box)
        ys = _sample_members(cone, rng, trials, box)
        for x, y in zip(xs, ys):
            a = rng.uniform(0, box, size=(m, 1))
            b = rng.uniform(0, box, size=(m, 1))
            if not cone.member_array(a * x + b * y):
                return PropertyReport(prop, trials, False,
                                      (SoftVector(params, x), SoftVector(params, y)))
        return PropertyReport(prop, trials, True)

    if prop is ConeProperty.MINIHEDRAL:
        for _ in range(trials):
            x, y, z = (SoftVector(params, rng.uniform(-box, box, (m, n))) for _ in range(3))
            s = sup_pair(cone, x, y)
            if not (preceq(cone, x, s) and preceq(cone, y, s)):
                return PropertyReport(prop, trials, False, (x, y))
            # z pushed up to an upper bound; the sup must sit below it
            z = SoftVector(params, np.maximum(z.values, s.values))
            if not preceq(cone, s, z):
                return PropertyReport(prop, trials, False, (x, y, z))
        return PropertyReport(prop, trials, True)

    if prop is ConeProperty.STRONGLY_MINIHEDRAL:
        for _ in range(trials):
            k = int(rng.integers(1, 6))
            xs = [SoftVector(params, rng.uniform(-box, box, (m, n))) for _ in range(k)]
            s = sup_many(cone, xs)
            if not all(preceq(cone, x, s) for x in xs):
                return PropertyReport(prop, trials, False, xs)
            upper = SoftVector(params, s.values + rng.uniform(0, box, (m, n)))
            if not preceq(cone, s, upper):
                return PropertyReport(prop, trials, False, xs)
        return PropertyReport(prop, trials, True)

    # regular: increasing sequences bounded above must be norm-Cauchy
    for _ in range(trials):
        start = rng.uniform(-box, box, (m, n))
        incr = rng.uniform(0, box, (m, n))
        rate = rng.uniform(0.1, 0.9)
        seq = start + incr * (1 - rate ** np.arange(1, 201))[:, None, None]
        tail = seq[-50:]
        spread = np.max(nrm.array(tail[:, None] - tail[None, :]))
        if spread > np.sqrt(n) * box * rate ** 150 + 1e-9:
            return PropertyReport(prop, trials, False, SoftVector(params, start))
    return PropertyReport(prop, trials, True)
