"""Convergence and Cauchy tests for sequences in a soft cone metric space.

"For every c >> Theta" is approximated by a ladder c, c/2, ..., c/2**rungs.
Finite sequences are reported ``inconclusive`` rather than ``diverged`` unless
their residuals grow strictly for at least ``DIVERGENCE_STEPS`` steps.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import SoftReal, check_same_params
from .errors import CNotInterior, ConeNotNormal, EmptySequence
from .metric import SoftConeMetric
from .space import EUCLIDEAN, SoftNorm, SoftVector, cauchy_window, point_array, point_dim

DEFAULT_RUNGS = 6
DIVERGENCE_STEPS = 10


class Verdict(str, enum.Enum):
    CONVERGED = "converged"
    CAUCHY_ONLY = "cauchy_only"
    INCONCLUSIVE = "inconclusive"
    DIVERGED = "diverged"


@dataclass(frozen=True)
class SoftSequence:
    """Homogeneous, non-empty list of soft points. Term ``terms[i]`` is x_{i+1}."""

    terms: tuple

    def __init__(self, terms):
        terms = tuple(terms)
        if not terms:
            raise EmptySequence("a sequence needs at least one term")
        first = terms[0]
        for t in terms[1:]:
            if type(t) is not type(first):
                raise TypeError("sequence terms must all be the same kind of soft point")
            check_same_params(first.params, t.params)
            if point_dim(t) != point_dim(first):
                raise ValueError("sequence terms must share a dimension")
        object.__setattr__(self, "terms", terms)

    def __len__(self):
        return len(self.terms)

    def __getitem__(self, i):
        return self.terms[i]

    def __iter__(self):
        return iter(self.terms)

    def array(self) -> np.ndarray:
        return np.stack([point_array(t) for t in self.terms])


@dataclass
class ConvergenceReport:
    verdict: Verdict
    c: SoftVector
    index: int | None
    residuals: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.verdict in (Verdict.CONVERGED, Verdict.CAUCHY_ONLY)


def _as_seq(seq) -> SoftSequence:
    return seq if isinstance(seq, SoftSequence) else SoftSequence(seq)


def _check_c(metric: SoftConeMetric, c: SoftVector) -> None:
    if not metric.cone.in_interior(c):
        raise CNotInterior("c must lie in the interior of the cone")


def _grows(values: Sequence[float], steps: int = DIVERGENCE_STEPS) -> bool:
    if len(values) < steps + 1:
        return False
    tail = np.asarray(values[-(steps + 1):])
    return bool(np.all(tail[1:] > tail[:-1]))


def _way_below_all(diffs: np.ndarray, metric: SoftConeMetric, c: SoftVector) -> np.ndarray:
    """For each distance array d in ``diffs`` (shape (N, m, v)): is d << c?"""
    inner = metric.cone.interior_array
    return np.array([bool(inner(c.values - d)) for d in diffs], dtype=bool)


def converges_to(seq, limit, metric: SoftConeMetric, c: SoftVector,
                 nrm: SoftNorm = EUCLIDEAN) -> ConvergenceReport:
    """Smallest N with d(x_n, limit) << c for every n > N in the finite sequence.

    Terms are numbered from 1. The verdict is ``converged`` when such an N
    exists below the sequence length.
    """
    seq = _as_seq(seq)
    _check_c(metric, c)
    lim = point_array(limit)
    dists = np.stack([metric.fn(point_array(x), lim) for x in seq])
    residuals = [SoftReal(c.params, nrm.array(d)) for d in dists]
    good = _way_below_all(dists, metric, c)
    bad = np.flatnonzero(~good)
    n_idx = 0 if bad.size == 0 else int(bad[-1]) + 1
    if n_idx < len(seq):
        return ConvergenceReport(Verdict.CONVERGED, c, n_idx, residuals)
    # a Cauchy sequence heading elsewhere can have growing residuals; it is not divergent
    if is_cauchy(seq, metric, c).ok:
        return ConvergenceReport(Verdict.CAUCHY_ONLY, c, None, residuals)
    if _grows([float(np.max(r.values)) for r in residuals]):
        return ConvergenceReport(Verdict.DIVERGED, c, None, residuals)
    return ConvergenceReport(Verdict.INCONCLUSIVE, c, None, residuals)


def is_cauchy(seq, metric: SoftConeMetric, c: SoftVector,
              nrm: SoftNorm = EUCLIDEAN) -> ConvergenceReport:
    """Smallest N with d(x_n, x_m) << c for all n, m > N, checked over every pair.

    A Cauchy verdict needs at least two terms beyond N.
    """
    seq = _as_seq(seq)
    _check_c(metric, c)
    arr = seq.array()
    length = len(seq)
    # pair (n, m) failing forces N >= min(n, m) (1-based)
    n_idx = 0
    for i in range(length - 1, 0, -1):
        ds = np.stack([metric.fn(arr[i], arr[j]) for j in range(i)])
        bad = np.flatnonzero(~_way_below_all(ds, metric, c))
        if bad.size:
            n_idx = max(n_idx, int(bad[-1]) + 1)
    steps = [SoftReal(c.params, nrm.array(metric.fn(arr[i + 1], arr[i])))
             for i in range(length - 1)]
    if n_idx <= length - 2:
        return ConvergenceReport(Verdict.CAUCHY_ONLY, c, n_idx, steps)
    if _grows([float(np.max(s.values)) for s in steps]):
        return ConvergenceReport(Verdict.DIVERGED, c, None, steps)
    return ConvergenceReport(Verdict.INCONCLUSIVE, c, None, steps)


def ladder(c: SoftVector, rungs: int = DEFAULT_RUNGS) -> list[SoftVector]:
    return [c * (0.5 ** k) for k in range(rungs + 1)]


def converges_on_ladder(seq, limit, metric: SoftConeMetric, c: SoftVector,
                        rungs: int = DEFAULT_RUNGS) -> bool:
    return all(converges_to(seq, limit, metric, ck).verdict is Verdict.CONVERGED
               for ck in ladder(c, rungs))


def _transfer_rung(metric: SoftConeMetric, c: SoftVector, nrm: SoftNorm,
                   tol: float) -> SoftVector:
    """Scale c so that alpha * ||c|| < tol at every label."""
    alpha = metric.cone.normal_constant
    if alpha is None:
        raise ConeNotNormal("cone has no normal constant")
    size = alpha.values * nrm.array(c.values)
    factor = 0.5 * tol / float(np.max(size))
    return c * min(1.0, factor)


@dataclass
class EquivalenceResult:
    cone_verdict: bool
    norm_verdict: bool

    @property
    def agree(self) -> bool:
        return self.cone_verdict == self.norm_verdict

    def __bool__(self):
        return self.agree


def norm_equivalence_check(seq, limit, metric: SoftConeMetric, nrm: SoftNorm = EUCLIDEAN,
                           tol: float = 1e-6, c: SoftVector | None = None,
                           rungs: int = DEFAULT_RUNGS) -> EquivalenceResult:
    """Compare cone-order convergence with norm convergence of d(x_n, limit).

    The cone side runs the ladder from ``c`` plus one rung scaled so that
    alpha * ||c|| < tol, mirroring the norm-to-cone tolerance transfer for a
    normal cone. The norm side asks that the largest per-label norm of
    d(x_n, limit) be below ``tol`` over the trailing window. Truthiness of the
    result is agreement of the two verdicts.
    """
    seq = _as_seq(seq)
    if metric.cone.normal_constant is None:
        raise ConeNotNormal("norm equivalence needs a normal cone with known constant")
    if c is None:
        c = SoftVector(metric.params, np.ones((len(metric.params), metric.value_dim)))
    rungs_list = ladder(c, rungs) + [_transfer_rung(metric, c, nrm, tol)]
    cone_ok = all(converges_to(seq, limit, metric, ck).verdict is Verdict.CONVERGED
                  for ck in rungs_list)
    lim = point_array(limit)
    window = cauchy_window(len(seq))
    tail = [float(np.max(nrm.array(metric.fn(point_array(x), lim))))
            for x in seq.terms[-window:]]
    norm_ok = max(tail) < tol
    return EquivalenceResult(cone_ok, norm_ok)


def cauchy_equivalence_check(seq, metric: SoftConeMetric, nrm: SoftNorm = EUCLIDEAN,
                             tol: float = 1e-6, c: SoftVector | None = None,
                             rungs: int = DEFAULT_RUNGS) -> EquivalenceResult:
    """Cauchy analogue of :func:`norm_equivalence_check`."""
    seq = _as_seq(seq)
    if metric.cone.normal_constant is None:
        raise ConeNotNormal("norm equivalence needs a normal cone with known constant")
    if c is None:
        c = SoftVector(metric.params, np.ones((len(metric.params), metric.value_dim)))
    rungs_list = ladder(c, rungs) + [_transfer_rung(metric, c, nrm, tol)]
    cone_ok = all(is_cauchy(seq, metric, ck).ok for ck in rungs_list)
    window = cauchy_window(len(seq))
    tail = seq.array()[-window:]
    worst = max(float(np.max(nrm.array(metric.fn(a, b)))) for a in tail for b in tail)
    return EquivalenceResult(cone_ok, worst < tol)


def unique_limit_check(seq, x, y, metric: SoftConeMetric, tol: float = 1e-9,
                       nrm: SoftNorm = EUCLIDEAN) -> bool:
    """Two claimed limits of one sequence must coincide: ||d(x, y)|| < tol.

    A False result means either a bug or a tolerance that is too tight.
    """
    return float(np.max(nrm.array(metric.fn(point_array(x), point_array(y))))) < tol


def write_trace(path, steps: Sequence[SoftVector], nrm: SoftNorm = EUCLIDEAN,
                start: int = 1) -> None:
    """Write a long-format trace CSV.

    Columns: n, label, coordinate, residual_value, residual_maxnorm; the last
    column repeats the step's largest per-label norm on each of its rows.
    """
    from .serialize import format_float

    if hasattr(path, "write"):
        _write_rows(path, steps, nrm, start, format_float)
        return
    with open(path, "w", newline="") as fh:
        _write_rows(fh, steps, nrm, start, format_float)


def _write_rows(fh, steps, nrm, start, fmt) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["n", "label", "coordinate", "residual_value", "residual_maxnorm"])
    for n, step in enumerate(steps, start=start):
        maxnorm = fmt(nrm.maxnorm(step))
        for lab, row in zip(step.params.labels, step.values):
            for j, val in enumerate(row):
                w.writerow([n, lab, j, fmt(val), maxnorm])
