import itertools

import numpy as np
import pytest

from softcone.core import ParameterSet, SoftReal
from softcone.errors import (
    BallPreconditionFailed,
    ContractionRefuted,
    FixedPointNotSharedByT,
    MapDomainError,
    MaxIterExceeded,
    SpecError,
)
from softcone.fixed_point import (
    MAP_REGISTRY,
    ContractionSpec,
    ContractionStatus,
    Family,
    SelfMap,
    Stop,
    Uniqueness,
    cross_check_uniqueness,
    iterate,
    matrix_affine,
    scalar_affine,
    solve,
    solve_power,
    verify_contraction,
)
from softcone.metric import ABS, EUCLIDEAN_DIST, from_crisp
from softcone.space import SoftVector, point_array

A = ParameterSet(["a", "b"])
D = from_crisp(ABS, A)
HALF_PLUS_ONE = scalar_affine(0.5, 1.0)
FIFTH = scalar_affine(0.2, 0.0)
M = [[0.0, 2.0], [0.1, 0.0]]


def real(a, b):
    return SoftReal(A, {"a": a, "b": b})


def const(v):
    return SoftReal.constant(A, v)


def spec(family, t, **kw):
    return ContractionSpec(family, const(t), **kw)


def test_iterate_example():
    single = ParameterSet(["a"])
    seq = iterate(HALF_PLUS_ONE, SoftReal(single, [0.0]), 3)
    assert [float(x.values[0]) for x in seq] == [0.0, 1.0, 1.5, 1.75]
    assert len(iterate(HALF_PLUS_ONE, SoftReal(single, [0.0]), 1)) == 2
    identity = SelfMap("id", lambda x: x)
    assert len(set(iterate(identity, real(1, 2), 4))) == 1
    with pytest.raises(ValueError):
        iterate(HALF_PLUS_ONE, real(0, 0), 0)


def test_map_domain_errors():
    bad = SelfMap("bad", lambda x: SoftVector(x.params, [[1.0], [2.0]]))
    with pytest.raises(MapDomainError):
        bad(real(0, 0))
    broken = SelfMap("broken", lambda x: 1 / 0)
    with pytest.raises(MapDomainError):
        broken(real(0, 0))


def test_per_label_affine_maps():
    T = scalar_affine(real(0.5, 0.25), real(1, 0))
    assert T(real(2, 4)) == real(2, 1)
    V = matrix_affine({"a": [[1, 0], [0, 1]], "b": [[0, 1], [1, 0]]}, [0, 0])
    x = SoftVector(A, {"a": [1, 2], "b": [1, 2]})
    assert V(x) == SoftVector(A, {"a": [1, 2], "b": [2, 1]})


class TestSpecValidation:
    @pytest.mark.parametrize("family, t", [
        ("banach", 1.0), ("banach", -0.1), ("kannan", 0.5), ("chatterjea", 0.6),
        ("banach_power", 1.0), ("banach", 1 - 1e-13),
    ])
    def test_out_of_range(self, family, t):
        with pytest.raises(SpecError, match="out of range"):
            ContractionSpec(family, const(t), power=2)

    def test_hybrid_needs_r(self):
        with pytest.raises(SpecError):
            spec("hybrid", 0.5)
        with pytest.raises(SpecError):
            spec("hybrid", 0.5, r=const(1.0))

    def test_q_and_uniqueness(self):
        k = spec("kannan", 0.25)
        assert np.allclose(k.q.values, 1 / 3)
        assert k.uniqueness() is Uniqueness.UNIQUE
        assert spec("hybrid", 0.3, r=const(0.5)).uniqueness() is Uniqueness.UNIQUE_IF_T_PLUS_R_LT_1
        assert spec("hybrid", 0.6, r=const(0.5)).uniqueness() is Uniqueness.UNKNOWN

    def test_ball_needs_center_and_radius(self):
        with pytest.raises(SpecError):
            spec("banach_ball", 0.5)

    def test_stop_validation(self):
        with pytest.raises(SpecError):
            Stop()
        with pytest.raises(SpecError):
            Stop(norm_tol=0.0)


class TestVerifyContraction:
    def test_half_is_witnessed(self):
        check = verify_contraction(scalar_affine(0.5, 0.0), D, spec("banach", 0.5), trials=10_000)
        assert check.status is ContractionStatus.WITNESSED and check.checked == 10_000

    def test_double_is_refuted(self):
        check = verify_contraction(scalar_affine(2.0, 0.0), D, spec("banach", 0.5), trials=10)
        assert check.status is ContractionStatus.REFUTED
        x, y = check.counterexample
        assert x != y

    def test_assumed(self):
        check = verify_contraction(scalar_affine(2.0, 0.0), D, spec("banach", 0.5), trials=0)
        assert check.status is ContractionStatus.ASSUMED

    @pytest.mark.parametrize("family", ["kannan", "chatterjea"])
    def test_fifth_on_sign_flip_grid(self, family):
        grid = np.linspace(-10, 10, 21)
        pairs = [(real(x, -x), real(y, y / 3)) for x, y in itertools.product(grid, grid)]
        check = verify_contraction(FIFTH, D, spec(family, 0.25), pairs=pairs)
        assert check.witnessed

    def test_kannan_oracle_inequality(self):
        """Independent check: |x-y|/5 <= (4/5)(|x|+|y|)/4 for all reals."""
        g = np.linspace(-5, 5, 101)
        x, y = np.meshgrid(g, g)
        assert np.all(np.abs(x - y) / 5 <= 0.25 * 0.8 * (np.abs(x) + np.abs(y)) + 1e-15)

    def test_power_demo(self):
        T = MAP_REGISTRY["power_demo"]()
        metric = from_crisp(EUCLIDEAN_DIST, A, 2)
        assert not verify_contraction(T, metric, spec("banach", 0.2), trials=1000).witnessed
        check = verify_contraction(T, metric, spec("banach_power", 0.2, power=2), trials=1000)
        assert check.witnessed


class TestBanach:
    def test_fixed_point_and_bound_equality(self):
        cert = solve(HALF_PLUS_ONE, D, spec("banach", 0.5), const(0.0), Stop(norm_tol=1e-10))
        np.testing.assert_allclose(cert.fixed_element.values, 2.0, atol=1e-10)
        for m in range(1, 21):
            xm = cert.iterates[m]
            np.testing.assert_allclose(np.abs(xm.values - 2.0),
                                       cert.apriori_bound_at_m(m).values[:, 0], atol=1e-12)
        assert np.allclose(cert.apriori_bound_at_m(3).values, 0.25)
        assert cert.iterations <= 40

    def test_certificate_invariants(self):
        cert = solve(HALF_PLUS_ONE, D, spec("banach", 0.5), real(-3, 50), Stop(norm_tol=1e-10))
        x_star = point_array(cert.fixed_element)
        q = cert.q.values[:, None]
        for m, xm in enumerate(cert.iterates):
            if m >= 1:
                err = D.fn(point_array(xm), x_star)
                assert np.all(err <= cert.apriori_bound_at_m(m).values + 1e-12)
        for prev, nxt in zip(cert.steps, cert.steps[1:]):
            assert np.all(nxt.values <= q * prev.values + 1e-15)
        assert np.all(cert.final_residual.values <= cert.aposteriori_bound.values)
        maxes = [float(np.max(r.values)) for r in cert.residual_trail]
        assert maxes == sorted(maxes, reverse=True)

    def test_basin_independence(self):
        s, stop = spec("banach", 0.5), Stop(norm_tol=1e-10)
        certs = [solve(HALF_PLUS_ONE, D, s, x0, stop)
                 for x0 in (const(0.0), const(100.0), real(-7, 3))]
        for a, b in itertools.combinations(certs, 2):
            assert cross_check_uniqueness(a, b, D, tol=10 * 1e-10)

    def test_stop_in_cone_order(self):
        c = SoftVector(A, np.full((2, 1), 1e-8))
        cert = solve(HALF_PLUS_ONE, D, spec("banach", 0.5), const(0.0), Stop(c=c))
        assert np.all(cert.aposteriori_bound.values < 1e-8)

    def test_max_iter(self):
        with pytest.raises(MaxIterExceeded) as info:
            solve(HALF_PLUS_ONE, D, spec("banach", 0.5), const(0.0), max_iter=5)
        assert info.value.certificate.iterations == 5

    def test_env_max_iter(self, monkeypatch):
        monkeypatch.setenv("SOFTCONE_MAX_ITER", "3")
        with pytest.raises(MaxIterExceeded):
            solve(HALF_PLUS_ONE, D, spec("banach", 0.5), const(0.0))

    def test_refuted_live(self):
        with pytest.raises(ContractionRefuted) as info:
            solve(scalar_affine(1.5, 0.0), D, spec("banach", 0.5), const(1.0))
        assert info.value.certificate.iterations >= 10


class TestOtherFamilies:
    @pytest.mark.parametrize("family", ["kannan", "chatterjea"])
    @pytest.mark.parametrize("x0", [(1, 1), (-1, -1), (3, -7)])
    def test_fifth_converges_to_zero(self, family, x0):
        cert = solve(FIFTH, D, spec(family, 0.25), real(*x0), Stop(norm_tol=1e-10))
        assert np.all(np.abs(cert.fixed_element.values) < 1e-10)
        assert np.allclose(cert.q.values, 1 / 3)

    def test_hybrid_with_zero_r_matches_banach(self):
        stop = Stop(norm_tol=1e-10)
        b = solve(HALF_PLUS_ONE, D, spec("banach", 0.5), const(0.0), stop)
        h = solve(HALF_PLUS_ONE, D, spec("hybrid", 0.5, r=const(0.0)), const(0.0), stop)
        assert b.iterates == h.iterates
        assert b.aposteriori_bound == h.aposteriori_bound
        assert all(b.apriori_bound_at_m(m) == h.apriori_bound_at_m(m) for m in range(1, 10))
        assert h.uniqueness is Uniqueness.UNIQUE_IF_T_PLUS_R_LT_1

    def test_banach_ball(self):
        center = const(0.0)
        radius = SoftVector(A, np.full((2, 1), 4.0))
        s = spec("banach_ball", 0.5, ball_center=center, ball_radius=radius)
        cert = solve(HALF_PLUS_ONE, D, s)
        assert cert.ball_checks and cert.in_ball
        assert len(cert.ball_checks) == len(cert.iterates)
        tight = spec("banach_ball", 0.5, ball_center=center,
                     ball_radius=SoftVector(A, np.full((2, 1), 1.9)))
        with pytest.raises(BallPreconditionFailed):
            solve(HALF_PLUS_ONE, D, tight)


class TestPower:
    metric = from_crisp(EUCLIDEAN_DIST, A, 2)

    def test_matches_linear_solve(self):
        T = matrix_affine(M, [1.0, 1.0])
        oracle = np.linalg.solve(np.eye(2) - np.array(M), np.ones(2))
        x0 = SoftVector.theta(A, 2)
        cert = solve_power(T, self.metric, spec("banach_power", 0.2, power=2), x0,
                           Stop(norm_tol=1e-10))
        for row in cert.fixed_element.values:
            np.testing.assert_allclose(row, oracle, atol=1e-8)
        np.testing.assert_allclose(oracle, [3.75, 1.375], rtol=1e-15)
        tx = T(cert.fixed_element)
        assert np.max(self.metric(tx, cert.fixed_element).values) < 1e-9
        assert cert.family is Family.BANACH_POWER and cert.power == 2

    def test_t_alone_fails_sampling_but_iterates_converge(self):
        """Step ratios of T alternate above and below 1, so only sampling refutes T."""
        T = matrix_affine(M, [1.0, 1.0])
        assert not verify_contraction(T, self.metric, spec("banach", 0.2)).witnessed
        cert = solve(T, self.metric, spec("banach", 0.2), SoftVector.theta(A, 2))
        np.testing.assert_allclose(cert.fixed_element.values, [[3.75, 1.375]] * 2, atol=1e-8)

    def test_power_one_reduces_to_solve(self):
        stop = Stop(norm_tol=1e-10)
        a = solve(HALF_PLUS_ONE, D, spec("banach", 0.5), const(0.0), stop)
        b = solve(HALF_PLUS_ONE, D, spec("banach_power", 0.5, power=1), const(0.0), stop)
        assert a.iterates == b.iterates

    def test_not_shared_by_t(self):
        """T sends everything to p except p itself, which goes to q; T^2 settles at q."""
        p = SoftVector.constant(A, [1.0, 0.0])
        q = SoftVector.constant(A, [0.0, 1.0])
        T = SelfMap("hop", lambda x: q if x == p else p)
        with pytest.raises(FixedPointNotSharedByT) as info:
            solve_power(T, self.metric, spec("banach_power", 0.2, power=2),
                        SoftVector.theta(A, 2))
        assert info.value.certificate.fixed_element == q
