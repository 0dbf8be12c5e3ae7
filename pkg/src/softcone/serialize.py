"""JSON forms of soft objects and canonical (byte-stable) output."""

from __future__ import annotations

import json
import math
from typing import Any

import numpy as np

from .core import ParameterSet, SoftReal
from .space import SoftVector


def format_float(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x}")
    text = f"{x:.17g}"
    if not any(ch in text for ch in ".en"):
        text += ".0"
    return text


def _encode(obj: Any) -> str:
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        items = sorted(obj.items())
        return "{" + ",".join(f"{json.dumps(str(k))}:{_encode(v)}" for k, v in items) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ",".join(_encode(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_canonical(obj: Any) -> str:
    """Sorted keys, no whitespace, floats with 17 significant digits."""
    return _encode(obj) + "\n"


def soft_real_to_json(r: SoftReal) -> dict:
    return {"params": r.params.to_list(), "values": r.as_dict()}


def soft_vector_to_json(v: SoftVector) -> dict:
    return {"params": v.params.to_list(), "dim": v.dim, "values": v.as_dict()}


def point_to_json(p) -> dict:
    return soft_real_to_json(p) if isinstance(p, SoftReal) else soft_vector_to_json(p)


def params_from_json(obj) -> ParameterSet:
    return ParameterSet(obj)


def soft_real_from_json(obj, params: ParameterSet | None = None) -> SoftReal:
    """Accept a full object, a bare ``{label: value}`` map, or a constant number."""
    if isinstance(obj, dict) and "values" in obj:
        own = ParameterSet(obj["params"])
        if params is not None and own != params:
            raise ValueError(f"soft real params {own.labels} differ from {params.labels}")
        return SoftReal(own, obj["values"])
    if params is None:
        raise ValueError("shorthand soft real needs known params")
    if isinstance(obj, dict):
        return SoftReal(params, obj)
    if isinstance(obj, (int, float)) and not isinstance(obj, bool):
        return SoftReal.constant(params, obj)
    raise ValueError(f"cannot read a soft real from {obj!r}")


def soft_vector_from_json(obj, params: ParameterSet | None = None,
                          dim: int | None = None) -> SoftVector:
    """Accept a full object, a ``{label: [..]}`` map, or one constant tuple."""
    if isinstance(obj, dict) and "values" in obj:
        own = ParameterSet(obj["params"])
        if params is not None and own != params:
            raise ValueError(f"soft vector params {own.labels} differ from {params.labels}")
        v = SoftVector(own, obj["values"])
        want = obj.get("dim", dim)
        if want is not None and v.dim != int(want):
            raise ValueError(f"declared dim {want} but values have dim {v.dim}")
        return v
    if params is None:
        raise ValueError("shorthand soft vector needs known params")
    if isinstance(obj, dict):
        v = SoftVector(params, obj)
    elif isinstance(obj, (list, tuple)):
        v = SoftVector.constant(params, obj)
    elif isinstance(obj, (int, float)) and not isinstance(obj, bool):
        if dim is None:
            raise ValueError("scalar shorthand for a soft vector needs a dim")
        v = SoftVector.constant(params, [float(obj)] * dim)
    else:
        raise ValueError(f"cannot read a soft vector from {obj!r}")
    if dim is not None and v.dim != dim:
        raise ValueError(f"expected dim {dim}, got {v.dim}")
    return v


def point_from_json(obj, params: ParameterSet, kind: str, dim: int = 1):
    if kind == "real":
        return soft_real_from_json(obj, params)
    return soft_vector_from_json(obj, params, dim)
