"""Reading and writing problem files.

A problem file is UTF-8 JSON::

    {
      "schema_version": 1,
      "name": "example_5_1",
      "n": 2, "m": 4, "l": 4,
      "F": {"tensors": [{"order": 4, "entries": [[[1, 1, 1, 1], 1.0], ...]}],
            "constant": [-1.0, 0.0]},
      "G": {...},
      "cone": "orthant"            # or {"generated": [[1, 0], [1, 1]]}
    }

Indices are 1-based and unlisted entries are zero.  Tensors inside ``F`` are
listed with strictly descending orders between ``m`` and 2; orders that are
left out become zero tensors.
"""

from __future__ import annotations

import json
import math
from importlib import resources
from pathlib import Path

import numpy as np

from .cones import FinitelyGenerated, NonnegativeOrthant
from .errors import ParseError, ValidationError
from .model import GpcpProblem
from .polymap import PolyMap, TensorTuple
from .tensor_core import DenseTensor

SCHEMA_VERSION = 1


def _int(value, where: str, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise ValidationError(f"{where}: expected an integer >= {minimum}, got {value!r}")
    return value


def _vector(value, n: int, where: str) -> np.ndarray:
    if not isinstance(value, list) or len(value) != n:
        raise ValidationError(f"{where}: expected a list of {n} numbers")
    for i, v in enumerate(value):
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise ValidationError(f"{where}[{i}]: expected a finite number, got {v!r}")
    return np.asarray(value, dtype=float)


def _tensor(raw, n: int, where: str) -> DenseTensor:
    if not isinstance(raw, dict):
        raise ValidationError(f"{where}: expected an object with 'order' and 'entries'")
    order = _int(raw.get("order"), f"{where}.order", 2)
    entries = raw.get("entries", [])
    if not isinstance(entries, list):
        raise ValidationError(f"{where}.entries: expected a list")
    arr = np.zeros((n,) * order)
    seen = set()
    for e, item in enumerate(entries):
        loc = f"{where}.entries[{e}]"
        if not isinstance(item, list) or len(item) != 2 or not isinstance(item[0], list):
            raise ValidationError(f"{loc}: expected [index-list, value]")
        idx, value = item
        if len(idx) != order:
            raise ValidationError(f"{loc}: index {idx} has length {len(idx)}, tensor order is {order}")
        for i in idx:
            if isinstance(i, bool) or not isinstance(i, int) or not 1 <= i <= n:
                raise ValidationError(f"{loc}: index {idx} out of range [1, {n}]")
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            raise ValidationError(f"{loc}: value {value!r} is not a finite number")
        key = tuple(i - 1 for i in idx)
        if key in seen:
            raise ValidationError(f"{loc}: index {idx} listed twice")
        seen.add(key)
        arr[key] = value
    return DenseTensor(arr)


def _polymap(raw, n: int, degree_plus_one: int, where: str) -> PolyMap:
    if not isinstance(raw, dict):
        raise ValidationError(f"{where}: expected an object with 'tensors' and 'constant'")
    tensors = raw.get("tensors", [])
    if not isinstance(tensors, list):
        raise ValidationError(f"{where}.tensors: expected a list")
    by_order: dict[int, DenseTensor] = {}
    previous = degree_plus_one + 1
    for k, traw in enumerate(tensors):
        loc = f"{where}.tensors[{k}]"
        order = traw.get("order") if isinstance(traw, dict) else None
        if isinstance(order, int) and order > degree_plus_one:
            raise ValidationError(f"{loc}: order {order} exceeds {degree_plus_one}")
        t = _tensor(traw, n, loc)
        if t.order >= previous:
            raise ValidationError(f"{loc}: orders must strictly descend")
        previous = t.order
        by_order[t.order] = t
    constant = _vector(raw.get("constant", [0.0] * n), n, f"{where}.constant")
    return PolyMap(TensorTuple.from_orders(n, degree_plus_one, by_order), constant)


def problem_from_dict(data) -> GpcpProblem:
    if not isinstance(data, dict):
        raise ValidationError("top level: expected a JSON object")
    version = data.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ValidationError(f"schema_version: unsupported version {version!r}")
    n = _int(data.get("n"), "n", 1)
    m = _int(data.get("m"), "m", 2)
    l = _int(data.get("l"), "l", 2)  # noqa: E741
    f = _polymap(data.get("F"), n, m, "F")
    g = _polymap(data.get("G"), n, l, "G")
    cone_raw = data.get("cone", "orthant")
    if cone_raw == "orthant":
        cone = NonnegativeOrthant(n)
    elif isinstance(cone_raw, dict) and "generated" in cone_raw:
        gens = cone_raw["generated"]
        if not isinstance(gens, list) or not gens:
            raise ValidationError("cone.generated: expected a non-empty list of vectors")
        rows = [_vector(gvec, n, f"cone.generated[{i}]") for i, gvec in enumerate(gens)]
        for i, row in enumerate(rows):
            if not np.any(row):
                raise ValidationError(f"cone.generated[{i}]: generator must be nonzero")
        cone = FinitelyGenerated(np.vstack(rows))
    else:
        raise ValidationError(f"cone: expected 'orthant' or {{'generated': [...]}}, got {cone_raw!r}")
    name = data.get("name")
    if name is not None and not isinstance(name, str):
        raise ValidationError("name: expected a string")
    return GpcpProblem(f, g, cone, name=name)


def loads_problem(text: str) -> GpcpProblem:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return problem_from_dict(data)


def _bundled(name: str) -> Path | None:
    stem = Path(name).name
    if not stem.endswith(".json"):
        stem += ".json"
    ref = resources.files("gpcp") / "fixtures" / stem
    return Path(str(ref)) if ref.is_file() else None


def resolve_path(path) -> Path:
    """Return ``path`` if it exists, else a bundled fixture of the same file name."""
    p = Path(path)
    if p.is_file():
        return p
    bundled = _bundled(str(path))
    if bundled is not None:
        return bundled
    raise FileNotFoundError(f"no such problem file: {path}")


def load_problem(path) -> GpcpProblem:
    p = resolve_path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"{p}: not UTF-8 text") from exc
    try:
        return loads_problem(text)
    except (ParseError, ValidationError) as exc:
        raise type(exc)(f"{p}: {exc}") from exc


def _tensor_to_dict(t: DenseTensor) -> dict:
    entries = [
        [[int(i) + 1 for i in idx], float(t.data[idx])]
        for idx in zip(*np.nonzero(t.data))
    ]
    return {"order": t.order, "entries": entries}


def _polymap_to_dict(p: PolyMap) -> dict:
    return {
        "tensors": [_tensor_to_dict(t) for t in p.tensors if np.any(t.data)],
        "constant": [float(c) for c in p.constant],
    }


def problem_to_dict(p: GpcpProblem) -> dict:
    if isinstance(p.cone, NonnegativeOrthant):
        cone = "orthant"
    elif isinstance(p.cone, FinitelyGenerated):
        cone = {"generated": p.cone.generators.tolist()}
    else:
        raise ValidationError(f"cannot serialize cone {type(p.cone).__name__}")
    out = {
        "schema_version": SCHEMA_VERSION,
        "n": p.dim,
        "m": p.m,
        "l": p.l,
        "F": _polymap_to_dict(p.f),
        "G": _polymap_to_dict(p.g),
        "cone": cone,
    }
    if p.name is not None:
        out["name"] = p.name
    return out


def _dumps_map(d: dict, indent: str) -> str:
    blocks = []
    for t in d["tensors"]:
        rows = ",\n".join(f"{indent}      {json.dumps(e)}" for e in t["entries"])
        blocks.append(f'{indent}    {{"order": {t["order"]}, "entries": [\n{rows}\n{indent}    ]}}')
    tensors = "[\n" + ",\n".join(blocks) + f"\n{indent}  ]" if blocks else "[]"
    return f'{{\n{indent}  "tensors": {tensors},\n{indent}  "constant": {json.dumps(d["constant"])}\n{indent}}}'


def dumps_problem(p: GpcpProblem) -> str:
    """Serialize with one tensor entry per line."""
    d = problem_to_dict(p)
    lines = [f'  "schema_version": {d["schema_version"]}']
    if "name" in d:
        lines.append(f'  "name": {json.dumps(d["name"])}')
    lines.append(f'  "n": {d["n"]}, "m": {d["m"]}, "l": {d["l"]}')
    lines.append(f'  "F": {_dumps_map(d["F"], "  ")}')
    lines.append(f'  "G": {_dumps_map(d["G"], "  ")}')
    lines.append(f'  "cone": {json.dumps(d["cone"])}')
    return "{\n" + ",\n".join(lines) + "\n}\n"


def save_problem(p: GpcpProblem, path) -> None:
    Path(path).write_text(dumps_problem(p), encoding="utf-8")
