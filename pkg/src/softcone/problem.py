"""Problem files: JSON descriptions of a metric space, a self-map and a solver run."""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Optional

from .cone import cone_from_descriptor
from .core import ParameterSet
from .fixed_point import (
    MAP_REGISTRY,
    ContractionSpec,
    SelfMap,
    Stop,
    matrix_affine,
    scalar_affine,
)
from .metric import SoftConeMetric, UniformSampler, metric_from_descriptor
from .serialize import point_from_json, soft_real_from_json, soft_vector_from_json


class ProblemError(ValueError):
    """Schema or cross-reference error in a problem file."""


@dataclass
class Problem:
    params: ParameterSet
    point_kind: str
    point_dim: int
    metric: SoftConeMetric
    map: Optional[SelfMap]
    spec: Optional[ContractionSpec]
    x0: Any
    stop: Stop
    max_iter: Optional[int]
    seed: int
    verify_trials: int
    sampler: UniformSampler


def _scalar_or_soft(value, params):
    if isinstance(value, dict):
        return soft_real_from_json(value, params)
    return float(value)


def _map_from(desc: dict, params: ParameterSet) -> SelfMap:
    kind = desc.get("kind")
    if kind == "scalar_affine":
        return scalar_affine(_scalar_or_soft(desc["a"], params),
                             _scalar_or_soft(desc["b"], params))
    if kind == "matrix_affine":
        return matrix_affine(desc["M"], desc["b"])
    if kind == "registry":
        ident = desc.get("id")
        if ident not in MAP_REGISTRY:
            raise ProblemError(f"unknown map id {ident!r}")
        return MAP_REGISTRY[ident]()
    raise ProblemError(f"unknown map kind {kind!r}")


def parse_problem(raw: dict) -> Problem:
    try:
        params = ParameterSet(raw["params"])
        point = raw.get("point", {"kind": "real"})
        kind = point.get("kind", "real")
        if kind not in ("real", "vector"):
            raise ProblemError(f"unknown point kind {kind!r}")
        dim = int(point.get("dim", 1))
        if kind == "real" and dim != 1:
            raise ProblemError("soft real points have dim 1")

        metric = metric_from_descriptor(raw.get("metric", {"type": "crisp", "name": "abs"}),
                                        params, dim, kind)
        if "cone" in raw:
            cone = cone_from_descriptor(raw["cone"], params, metric.value_dim)
            if cone.dim != metric.value_dim:
                raise ProblemError(
                    f"cone dim {cone.dim} does not match metric value dim {metric.value_dim}")
            metric = replace(metric, cone=cone)

        T = _map_from(raw["map"], params) if "map" in raw else None

        spec = None
        if "spec" in raw:
            s = raw["spec"]
            t = soft_real_from_json(s["t"], params)
            r = soft_real_from_json(s["r"], params) if "r" in s else None
            center = radius = None
            if "ball" in s:
                center = point_from_json(s["ball"]["x0"], params, kind, dim)
                radius = soft_vector_from_json(s["ball"]["c"], params, metric.value_dim)
            spec = ContractionSpec(s["family"], t, r, int(s.get("n", 1)), center, radius)

        x0 = point_from_json(raw["x0"], params, kind, dim) if "x0" in raw else None

        stop_raw = raw.get("stop", {"norm_tol": 1e-10})
        if "c" in stop_raw:
            stop = Stop(c=soft_vector_from_json(stop_raw["c"], params, metric.value_dim))
        else:
            stop = Stop(norm_tol=float(stop_raw["norm_tol"]))

        verify = raw.get("verify", {})
        sampler = UniformSampler(params, dim, float(verify.get("low", -10.0)),
                                 float(verify.get("high", 10.0)), kind)
        max_iter = raw.get("max_iter")
        return Problem(params, kind, dim, metric, T, spec, x0, stop,
                       None if max_iter is None else int(max_iter),
                       int(raw.get("seed", 0)), int(verify.get("trials", 1000)), sampler)
    except KeyError as exc:
        raise ProblemError(f"missing or unknown key: {exc}") from exc


def load_problem(path) -> Problem:
    with open(Path(path)) as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise ProblemError("problem file must hold a JSON object")
    return parse_problem(raw)
