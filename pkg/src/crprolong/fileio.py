"""JSON loaders for structure, map and binding files."""
from __future__ import annotations

import json
import re
from importlib import resources
from pathlib import Path
from typing import Dict, Tuple, Union

from .acstruct import (ModelSpec, StarSpec, StructureMatrix, build_condition_star, build_model,
                       build_raw, build_standard, model_spec_of)
from .crcheck import SymbolicMap
from .errors import InputError, ParseError
from .symexpr import Const, Expr, parse
from .scalar import ZERO

STRUCTURE_KEYS = {"n", "kind", "entries", "name"}
MAP_KEYS = {"n", "components", "name"}
_RC = re.compile(r"^(\d+),(\d+)$")
_LT = re.compile(r"^Lt(\d+),(\d+)$")

Source = Union[str, Path, dict]


def fixture_path(name: str) -> Path:
    """Path of a bundled fixture (``std2.json``, ``star-example.json``, ...)."""
    return Path(str(resources.files("crprolong") / "fixtures" / name))


def _load(src: Source) -> dict:
    if isinstance(src, dict):
        return src
    path = Path(src)
    if not path.exists() and not path.is_absolute() and fixture_path(str(src)).exists():
        path = fixture_path(str(src))
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{src}: {exc.strerror or exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}") from exc
    if not isinstance(data, dict):
        raise InputError(f"{path}: top level must be an object")
    return data


def _check_keys(data: dict, allowed: set, what: str):
    extra = sorted(set(data) - allowed)
    if extra:
        raise InputError(f"{what}: unknown keys {extra}")


def _n(data: dict, what: str) -> int:
    n = data.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 2:
        raise InputError(f"{what}: 'n' must be an integer >= 2")
    return n


def _expr(text, n: int, where: str) -> Expr:
    if not isinstance(text, str):
        raise InputError(f"{where}: expression must be a string")
    try:
        return parse(text, n)
    except ParseError as exc:
        raise InputError(f"{where}: {exc}") from exc


def load_structure(src: Source) -> StructureMatrix:
    data = _load(src)
    what = str(src) if not isinstance(src, dict) else "structure"
    _check_keys(data, STRUCTURE_KEYS, what)
    n = _n(data, what)
    kind = data.get("kind")
    entries = data.get("entries", {})
    if not isinstance(entries, dict):
        raise InputError(f"{what}: 'entries' must be an object")
    if kind == "standard":
        if entries:
            raise InputError(f"{what}: a standard structure takes no entries")
        return build_standard(n)
    if kind == "model":
        forms = [Const(ZERO)] * (n - 1)
        for key, text in sorted(entries.items()):
            m = _LT.match(key)
            if not m or int(m.group(1)) != 2 * n or int(m.group(2)) % 2 == 0 \
                    or not 1 <= int(m.group(2)) <= 2 * n - 3:
                raise InputError(f"{what}: model entries are keyed 'Lt{2 * n},<odd col < {2 * n - 1}>', got {key!r}")
            forms[(int(m.group(2)) + 1) // 2 - 1] = _expr(text, n, f"{what}[{key}]")
        try:
            return build_model(ModelSpec.from_forms(n, forms))
        except ValueError as exc:
            raise InputError(f"{what}: {exc}") from exc
    if kind == "star":
        vals = [Const(ZERO)] * (2 * n)
        for key, text in sorted(entries.items()):
            m = _LT.match(key)
            if not m or int(m.group(1)) != 2 * n - 1 or not 1 <= int(m.group(2)) <= 2 * n:
                raise InputError(f"{what}: star entries are keyed 'Lt{2 * n - 1},<col>', got {key!r}")
            vals[int(m.group(2)) - 1] = _expr(text, n, f"{what}[{key}]")
        return build_condition_star(StarSpec(n, tuple(vals)))
    if kind == "raw":
        over = {}
        for key, text in sorted(entries.items()):
            m = _RC.match(key)
            if not m:
                raise InputError(f"{what}: raw entries are keyed '<row>,<col>', got {key!r}")
            r, c = int(m.group(1)), int(m.group(2))
            if not (1 <= r <= 2 * n and 1 <= c <= 2 * n):
                raise InputError(f"{what}: entry {key} out of range for n={n}")
            over[(r, c)] = _expr(text, n, f"{what}[{key}]")
        return build_raw(n, over)
    raise InputError(f"{what}: 'kind' must be one of standard, model, star, raw")


def load_map(src: Source) -> SymbolicMap:
    data = _load(src)
    what = str(src) if not isinstance(src, dict) else "map"
    _check_keys(data, MAP_KEYS, what)
    n = _n(data, what)
    comps = data.get("components")
    if not isinstance(comps, list) or len(comps) != n:
        raise InputError(f"{what}: 'components' must be a list of {n} expressions")
    exprs = tuple(_expr(t, n, f"{what}[components][{i}]") for i, t in enumerate(comps))
    name = data.get("name", "")
    if not isinstance(name, str):
        raise InputError(f"{what}: 'name' must be a string")
    return SymbolicMap(n, n, exprs, name)


def load_binding(src: Source) -> Tuple[int, Dict[tuple, object]]:
    """Dimension and atom values read from a standard or model structure file."""
    from .jetcalc import model_binding

    J = load_structure(src)
    spec = model_spec_of(J)
    if spec is None:
        raise InputError("binding needs a standard or model structure")
    return J.n, model_binding(spec)
