import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from softcone.core import ParameterSet, SoftReal
from softcone.errors import MismatchedDimension, MismatchedParameters, NonFiniteResult
from softcone.space import (
    Ball,
    BallKind,
    InnerNorm,
    SoftNorm,
    SoftVector,
    ball_contains,
    check_norm_axioms,
    norm,
    norm_cauchy_check,
    norm_metric,
    vec_arith,
)

A = ParameterSet(["a", "b"])


def vec(a, b):
    return SoftVector(A, {"a": a, "b": b})


@pytest.mark.parametrize("inner, expected", [
    ("euclidean", {"a": 5.0, "b": 1.0}),
    ("max", {"a": 4.0, "b": 1.0}),
    ("one", {"a": 7.0, "b": 1.0}),
])
def test_norm_examples(inner, expected):
    x = vec([3, 4], [0, -1])
    assert norm(x, SoftNorm(inner)).as_dict() == expected


def test_norm_metric_example():
    x, y = vec([1, 1], [0, 0]), vec([4, 5], [0, 2])
    assert norm_metric(x, y).as_dict() == {"a": 5.0, "b": 2.0}


def test_construction_errors():
    with pytest.raises(MismatchedParameters):
        SoftVector(A, {"a": [1, 2]})
    with pytest.raises(MismatchedDimension):
        SoftVector(A, {"a": [1, 2], "b": [1]})
    with pytest.raises(MismatchedDimension):
        vec([1, 2], [3, 4]) + SoftVector(A, [[1], [2]])
    with pytest.raises(NonFiniteResult):
        vec([1e308, 0], [0, 0]) * 10.0


def test_arith_and_theta():
    x, y = vec([1, 2], [3, 4]), vec([1, 1], [1, 1])
    assert vec_arith("add", x, y) == vec([2, 3], [4, 5])
    assert vec_arith("sub", x, y) == vec([0, 1], [2, 3])
    assert vec_arith("neg", x) == vec([-1, -2], [-3, -4])
    alpha = SoftReal(A, {"a": 2, "b": -1})
    assert vec_arith("scalar_mul_soft", x, alpha) == vec([2, 4], [-3, -4])
    assert SoftVector.theta(A, 2).is_theta()
    assert SoftVector.constant(A, [1, 2]) == vec([1, 2], [1, 2])
    with pytest.raises(TypeError):
        vec_arith("scalar_mul_soft", x, 2.0)


def test_coordinates_round_trip():
    x = vec([1, 2], [3, 4])
    assert SoftVector.from_soft_reals(x.coordinate(0), x.coordinate(1)) == x


class TestBalls:
    center = SoftVector.theta(A, 2)
    radius = SoftReal.constant(A, 1.0)

    def test_open_closed_sphere(self):
        boundary = vec([1, 0], [0, 1])
        inside = vec([0.5, 0], [0, 0])
        opened = Ball(self.center, self.radius, "open")
        closed = Ball(self.center, self.radius, "closed")
        sphere = Ball(self.center, self.radius, "sphere")
        assert not ball_contains(opened, boundary)
        assert ball_contains(closed, boundary)
        assert ball_contains(sphere, boundary)
        assert ball_contains(opened, inside)
        assert not ball_contains(sphere, inside)

    def test_one_label_outside_excludes(self):
        b = Ball(self.center, self.radius, BallKind.OPEN)
        assert not b.contains(vec([0, 0], [2, 0]))

    def test_radius_must_be_positive(self):
        with pytest.raises(ValueError):
            Ball(self.center, SoftReal(A, {"a": 1, "b": 0}), "open")
        Ball(self.center, SoftReal.constant(A, 0.0), "sphere")


def test_norm_cauchy_check():
    geometric = [vec([2.0 ** -k, 0], [0, 3.0 ** -k]) for k in range(60)]
    assert norm_cauchy_check(geometric, tol=1e-9)
    alternating = [vec([(-1.0) ** k, 0], [0, 0]) for k in range(60)]
    assert not norm_cauchy_check(alternating, tol=1e-3)


@pytest.mark.parametrize("inner", list(InnerNorm))
def test_norm_and_metric_axioms(inner):
    fails = check_norm_axioms(SoftNorm(inner), ParameterSet(["a", "b", "c"]), 3,
                              trials=300, seed=7)
    assert fails == dict.fromkeys(fails, 0)


coords = st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=4, max_size=4)


@settings(max_examples=200)
@given(coords, coords, st.sampled_from(list(InnerNorm)))
def test_triangle_and_symmetry(xs, ys, inner):
    nrm = SoftNorm(inner)
    x = SoftVector(A, np.reshape(xs, (2, 2)))
    y = SoftVector(A, np.reshape(ys, (2, 2)))
    sx, sy, s = nrm(x).values, nrm(y).values, nrm(x + y).values
    assert np.all(s <= (sx + sy) * (1 + 1e-12) + 1e-12)
    assert norm_metric(x, y, nrm) == norm_metric(y, x, nrm)
    assert np.all(nrm(x * -1.0).values == sx)


def test_norm_matches_independent_formula(rng):
    arr = rng.normal(size=(2, 3))
    x = SoftVector(A, arr)
    got = norm(x, SoftNorm("euclidean")).values
    expected = [math.sqrt(sum(v * v for v in row)) for row in arr]
    np.testing.assert_allclose(got, expected, rtol=1e-15)
