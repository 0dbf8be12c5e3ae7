"""Parameter sets, soft sets over finite universes, soft elements and soft reals.

Every soft object is dense over a finite, ordered :class:`ParameterSet`.
Soft reals store one float per label in a read-only numpy array whose order
follows ``params.labels``.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from typing import Any, Callable, Hashable, Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    EmptyCollection,
    EmptySlice,
    EnumerationTooLarge,
    MismatchedParameters,
    MismatchedUniverse,
    MissingOperand,
    NonFiniteResult,
)

ENUMERATION_CAP = 10**6


@dataclass(frozen=True)
class ParameterSet:
    """Ordered finite set of parameter labels."""

    labels: tuple[str, ...]

    def __init__(self, labels: Iterable[str]):
        labels = tuple(labels)
        if not labels:
            raise ValueError("parameter set must be non-empty")
        for lab in labels:
            if not isinstance(lab, str) or not lab:
                raise ValueError(f"labels must be non-empty strings, got {lab!r}")
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate labels in {labels}")
        object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def __contains__(self, label) -> bool:
        return label in self.labels

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(label) from None

    def to_list(self) -> list[str]:
        return list(self.labels)


def check_same_params(a: ParameterSet, b: ParameterSet) -> None:
    if a != b:
        raise MismatchedParameters(f"parameter sets differ: {a.labels} vs {b.labels}")


# --- soft sets ----------------------------------------------------------------


class SetOp(str, enum.Enum):
    UNION = "union"
    INTERSECTION = "intersection"
    DIFFERENCE = "difference"
    COMPLEMENT = "complement"
    PRODUCT = "product"


@dataclass(frozen=True)
class SoftSet:
    """A map from each parameter to a subset of a finite universe."""

    params: ParameterSet
    universe: frozenset
    slices: Mapping[str, frozenset]

    def __init__(self, params: ParameterSet, universe: Iterable[Hashable],
                 slices: Mapping[str, Iterable[Hashable]]):
        universe = frozenset(universe)
        missing = [lab for lab in params if lab not in slices]
        if missing:
            raise MismatchedParameters(f"no slice for labels {missing}")
        extra = [lab for lab in slices if lab not in params]
        if extra:
            raise MismatchedParameters(f"slices for unknown labels {extra}")
        frozen = {}
        for lab in params:
            s = frozenset(slices[lab])
            if not s <= universe:
                raise ValueError(f"slice at {lab!r} is not contained in the universe")
            frozen[lab] = s
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "universe", universe)
        object.__setattr__(self, "slices", frozen)

    def __getitem__(self, label: str) -> frozenset:
        return self.slices[label]

    def __eq__(self, other):
        if not isinstance(other, SoftSet):
            return NotImplemented
        return (self.params == other.params and self.universe == other.universe
                and all(self.slices[lab] == other.slices[lab] for lab in self.params))

    def __hash__(self):
        return hash((self.params, self.universe,
                     tuple(self.slices[lab] for lab in self.params)))

    def is_proper(self) -> bool:
        """True when every slice is non-empty, i.e. the set belongs to S(E)."""
        return all(self.slices[lab] for lab in self.params)


def soft_set_op(kind: str | SetOp, f: SoftSet, g: SoftSet | None = None) -> SoftSet:
    """Apply a set operation slice by slice."""
    kind = SetOp(kind)
    if kind is SetOp.COMPLEMENT:
        return SoftSet(f.params, f.universe,
                       {lab: f.universe - f[lab] for lab in f.params})
    if g is None:
        raise MissingOperand(f"{kind.value} needs a second soft set")
    check_same_params(f.params, g.params)
    if f.universe != g.universe:
        raise MismatchedUniverse("soft sets live over different universes")
    if kind is SetOp.PRODUCT:
        universe = frozenset(itertools.product(f.universe, g.universe))
        return SoftSet(f.params, universe,
                       {lab: frozenset(itertools.product(f[lab], g[lab])) for lab in f.params})
    op = {
        SetOp.UNION: frozenset.union,
        SetOp.INTERSECTION: frozenset.intersection,
        SetOp.DIFFERENCE: frozenset.difference,
    }[kind]
    return SoftSet(f.params, f.universe, {lab: op(f[lab], g[lab]) for lab in f.params})


@dataclass(frozen=True)
class SoftElement:
    """A choice function: one point of the carrier per label."""

    params: ParameterSet
    values: tuple

    def __init__(self, params: ParameterSet, values: Mapping[str, Any] | Sequence[Any]):
        if isinstance(values, Mapping):
            missing = [lab for lab in params if lab not in values]
            if missing:
                raise MismatchedParameters(f"soft element missing labels {missing}")
            values = tuple(values[lab] for lab in params)
        else:
            values = tuple(values)
            if len(values) != len(params):
                raise MismatchedParameters("soft element must have one value per label")
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "values", values)

    def __getitem__(self, label: str):
        return self.values[self.params.index(label)]

    def as_dict(self) -> dict:
        return dict(zip(self.params.labels, self.values))


def _stable_sorted(items: Iterable[Hashable]) -> list:
    return sorted(items, key=lambda e: (type(e).__name__, repr(e)))


def soft_elements_of(f: SoftSet, cap: int = ENUMERATION_CAP) -> list[SoftElement]:
    """Enumerate every soft element belonging to ``f``."""
    empty = [lab for lab in f.params if not f[lab]]
    if empty:
        raise EmptySlice(f"empty slice at {empty}")
    count = math.prod(len(f[lab]) for lab in f.params)
    if count > cap:
        raise EnumerationTooLarge(f"{count} soft elements exceeds cap {cap}")
    choices = [_stable_sorted(f[lab]) for lab in f.params]
    return [SoftElement(f.params, combo) for combo in itertools.product(*choices)]


def soft_set_from_elements(elems: Iterable[SoftElement],
                           universe: Iterable[Hashable] | None = None) -> SoftSet:
    """Build the soft set whose slice at each label is the image of ``elems``.

    The universe defaults to the union of all slices.
    """
    elems = list(elems)
    if not elems:
        raise EmptyCollection("need at least one soft element")
    params = elems[0].params
    for e in elems[1:]:
        check_same_params(params, e.params)
    slices = {lab: frozenset(e.values[i] for e in elems) for i, lab in enumerate(params)}
    if universe is None:
        universe = frozenset().union(*slices.values())
    return SoftSet(params, universe, slices)


# --- soft reals ---------------------------------------------------------------


def _frozen(arr: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(arr)):
        raise NonFiniteResult("soft values must be finite")
    arr.setflags(write=False)
    return arr


class SoftReal:
    """A real number per parameter.

    Equality is exact on stored values; use :func:`soft_real_close` for a
    tolerance-based check.
    """

    __slots__ = ("params", "values")

    def __init__(self, params: ParameterSet, values):
        if isinstance(values, Mapping):
            missing = [lab for lab in params if lab not in values]
            if missing:
                raise MismatchedParameters(f"soft real missing labels {missing}")
            values = [values[lab] for lab in params]
        arr = np.array(values, dtype=float)
        if arr.shape != (len(params),):
            raise MismatchedParameters(
                f"expected {len(params)} values, got shape {arr.shape}")
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "values", _frozen(arr))

    def __setattr__(self, name, value):
        raise AttributeError("SoftReal is immutable")

    @classmethod
    def constant(cls, params: ParameterSet, value: float) -> "SoftReal":
        return cls(params, np.full(len(params), float(value)))

    @property
    def is_constant(self) -> bool:
        return bool(np.all(self.values == self.values[0]))

    def __getitem__(self, label: str) -> float:
        return float(self.values[self.params.index(label)])

    def as_dict(self) -> dict[str, float]:
        return {lab: float(v) for lab, v in zip(self.params.labels, self.values)}

    def __repr__(self):
        return f"SoftReal({self.as_dict()})"

    def __eq__(self, other):
        if not isinstance(other, SoftReal):
            return NotImplemented
        return self.params == other.params and bool(np.array_equal(self.values, other.values))

    def __hash__(self):
        return hash((self.params, self.values.tobytes()))

    def _binary(self, other, op):
        if isinstance(other, SoftReal):
            check_same_params(self.params, other.params)
            other = other.values
        elif not isinstance(other, (int, float, np.floating, np.integer)):
            return NotImplemented
        with np.errstate(all="ignore"):
            out = op(self.values, other)
        if not np.all(np.isfinite(out)):
            raise NonFiniteResult(f"non-finite result in {op.__name__}")
        return SoftReal(self.params, out)

    def __add__(self, other):
        return self._binary(other, np.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __rsub__(self, other):
        return self._binary(other, lambda a, b: np.subtract(b, a))

    def __mul__(self, other):
        return self._binary(other, np.multiply)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._binary(other, np.divide)

    def __rtruediv__(self, other):
        return self._binary(other, lambda a, b: np.divide(b, a))

    def __pow__(self, k):
        return self._binary(k, np.power)

    def __neg__(self):
        return SoftReal(self.params, -self.values)

    def __abs__(self):
        return SoftReal(self.params, np.abs(self.values))


_ARITH: dict[str, Callable] = {
    "add": lambda r, s: r + s,
    "sub": lambda r, s: r - s,
    "mul": lambda r, s: r * s,
    "scalar_mul": lambda r, s: r * s,
}


def soft_real_arith(kind: str, r: SoftReal, s: SoftReal | float | None = None) -> SoftReal:
    """Label-wise arithmetic: add, sub, mul, neg, abs, scalar_mul."""
    if kind == "neg":
        return -r
    if kind == "abs":
        return abs(r)
    if kind not in _ARITH:
        raise ValueError(f"unknown arithmetic kind {kind!r}")
    if s is None:
        raise MissingOperand(f"{kind} needs a second operand")
    return _ARITH[kind](r, s)


class Order(str, enum.Enum):
    EQ = "eq"
    LT = "lt"
    GT = "gt"
    LEQ = "leq"
    GEQ = "geq"
    INCOMPARABLE = "incomparable"


def soft_real_compare(r: SoftReal, s: SoftReal) -> Order:
    """Strongest pointwise relation that holds at every label."""
    check_same_params(r.params, s.params)
    a, b = r.values, s.values
    if np.array_equal(a, b):
        return Order.EQ
    if np.all(a < b):
        return Order.LT
    if np.all(a > b):
        return Order.GT
    if np.all(a <= b):
        return Order.LEQ
    if np.all(a >= b):
        return Order.GEQ
    return Order.INCOMPARABLE


def leq(r: SoftReal, s: SoftReal) -> bool:
    return soft_real_compare(r, s) in (Order.EQ, Order.LT, Order.LEQ)


def lt(r: SoftReal, s: SoftReal) -> bool:
    return soft_real_compare(r, s) is Order.LT


def soft_real_close(r: SoftReal, s: SoftReal, eps: float) -> bool:
    check_same_params(r.params, s.params)
    return bool(np.all(np.abs(r.values - s.values) <= eps))
