"""Job configuration: YAML parsing, numeric literals, validation and env overrides.

Numbers may be written as decimals or as arithmetic literals such as
``"exp(2*pi + pi/2)"``, ``"16^15"`` or ``"sqrt(2)"``; ``^`` is power.  Integer
arithmetic stays exact.  Any key can be overridden from the environment with
``APSPLIT_<KEY>``, nesting with ``__`` (``APSPLIT_SCHEDULE__R0=32``).
"""

from __future__ import annotations

import ast
import copy
import hashlib
import json
import math
import operator
import os
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np
import yaml

COMMANDS = ("split", "mean", "wap", "repro", "orbit")
VARIANTS = ("matrix", "translation", "diagonal_sequence")
ENV_PREFIX = "APSPLIT_"
MAX_POW_BITS = 4096


class ConfigError(ValueError):
    """Invalid job configuration; ``field`` is a dotted path, ``line`` 1-based when known."""

    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field:
            where.append(f"field '{field}'")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)


# -- literals -------------------------------------------------------------

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
    ast.Mod: operator.mod,
}
_UNARY = {ast.UAdd: operator.pos, ast.USub: operator.neg}
_FUNCS = {"exp": math.exp, "sqrt": math.sqrt, "log": math.log, "sin": math.sin, "cos": math.cos}
_NAMES = {"pi": math.pi, "e": math.e}


def _eval(node):
    if isinstance(node, ast.Expression):
        return _eval(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
        return node.value
    if isinstance(node, ast.Name) and node.id in _NAMES:
        return _NAMES[node.id]
    if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
        return _UNARY[type(node.op)](_eval(node.operand))
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        a, b = _eval(node.left), _eval(node.right)
        if isinstance(node.op, ast.Pow) and isinstance(a, int) and isinstance(b, int):
            if b < 0 or abs(a) > 1 and b * max(1, abs(a).bit_length()) > MAX_POW_BITS:
                raise ValueError("integer power out of range")
        return _BINOPS[type(node.op)](a, b)
    if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS
            and len(node.args) == 1 and not node.keywords):
        return _FUNCS[node.func.id](_eval(node.args[0]))
    raise ValueError(f"unsupported expression element {ast.dump(node)[:40]}")


def parse_number(value: Any):
    """A number from a decimal or literal; ints stay ints."""
    if isinstance(value, bool):
        raise ValueError(f"expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return value
    if not isinstance(value, str):
        raise ValueError(f"expected a number, got {value!r}")
    text = value.strip().replace("^", "**")
    try:
        out = _eval(ast.parse(text, mode="eval"))
    except (SyntaxError, ValueError, OverflowError, ZeroDivisionError) as exc:
        raise ValueError(f"cannot parse number {value!r}: {exc}") from None
    if isinstance(out, float) and not math.isfinite(out):
        raise ValueError(f"literal {value!r} is not finite")
    return out


def parse_complex(value: Any) -> complex:
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ValueError(f"complex entries are (re, im) pairs, got {value!r}")
        return complex(float(parse_number(value[0])), float(parse_number(value[1])))
    return complex(float(parse_number(value)))


def parse_vector(value: Any) -> np.ndarray:
    if not isinstance(value, (list, tuple)) or not value:
        raise ValueError("expected a nonempty list of numbers or (re, im) pairs")
    return np.array([parse_complex(v) for v in value], dtype=complex)


_VERBATIM = {"claims", "output", "command", "kernel"}


def _resolve(value, top: bool = False):
    """Recursively evaluate string literals that look numeric."""
    if isinstance(value, dict):
        return {k: v if top and k in _VERBATIM else _resolve(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_resolve(v) for v in value]
    if isinstance(value, str):
        try:
            return parse_number(value)
        except ValueError:
            return value
    return value


# -- line tracking --------------------------------------------------------


def _line_index(node, path: tuple = (), out: dict | None = None) -> dict[tuple, int]:
    out = {} if out is None else out
    out[path] = node.start_mark.line + 1
    if isinstance(node, yaml.MappingNode):
        for k, v in node.value:
            key = (*path, k.value)
            out[key] = k.start_mark.line + 1
            _line_index(v, key, out)
            out[key] = k.start_mark.line + 1
    elif isinstance(node, yaml.SequenceNode):
        for i, v in enumerate(node.value):
            _line_index(v, (*path, i), out)
    return out


def _scalar_texts(node, key: str):
    for k, v in node.value:
        if k.value == key:
            if isinstance(v, yaml.SequenceNode):
                return [item.value for item in v.value]
            return v.value
    return None


# -- config ---------------------------------------------------------------


@dataclass
class JobConfig:
    command: str
    model: dict[str, Any] | None = None
    x: Any = None
    x_sun: Any = None
    signal: dict[str, Any] | None = None
    families: list[dict[str, Any]] | None = None
    claims: list[str] | None = None
    omega: float = 0.0
    tol: float = 1e-6
    separation: float = 1e-2
    h: float = 1.0 / 64
    kernel: str | None = None
    schedule: dict[str, Any] = field(default_factory=lambda: {"r0": 16.0, "k_max": 20})
    times: dict[str, Any] | None = None
    bohr: list[float] | None = None
    ap: dict[str, Any] | None = None
    eps: float | None = None
    seed: int | None = None
    output: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        out = {}
        for k in self.__dataclass_fields__:
            v = getattr(self, k)
            if v is not None and v != {}:
                out[k] = copy.deepcopy(v)
        return out

    def job_id(self) -> str:
        text = json.dumps(self.to_dict(), sort_keys=True, default=str)
        return hashlib.sha256(text.encode()).hexdigest()[:16]


_FIELDS = set(JobConfig.__dataclass_fields__)


def apply_env(raw: dict[str, Any], environ: Mapping[str, str] | None = None) -> dict[str, Any]:
    """Overlay ``APSPLIT_*`` variables; values are parsed as YAML scalars."""
    environ = os.environ if environ is None else environ
    raw = copy.deepcopy(raw)
    for name, text in sorted(environ.items()):
        if not name.startswith(ENV_PREFIX):
            continue
        path = name[len(ENV_PREFIX):].lower().split("__")
        if not path[0] or path[0] not in _FIELDS:
            continue
        node = raw
        for key in path[:-1]:
            if not isinstance(node.get(key), dict):
                node[key] = {}
            node = node[key]
        node[path[-1]] = text if path == ["claims"] else yaml.safe_load(text)
    return raw


def _check_model(model, lines, where="model") -> None:
    if not isinstance(model, dict):
        raise ConfigError("model must be a mapping", where, lines.get(("model",)))
    variant = model.get("variant", "matrix")
    if variant not in VARIANTS:
        raise ConfigError(f"unknown variant {variant!r}; choose from {VARIANTS}", f"{where}.variant",
                          lines.get(("model", "variant")))
    if variant == "matrix":
        line = lines.get(("model", "entries"), lines.get(("model",)))
        dim = model.get("dim")
        if not isinstance(dim, int) or not 1 <= dim <= 64:
            raise ConfigError(f"dim must be an integer in 1..64, got {dim!r}", f"{where}.dim",
                              lines.get(("model", "dim")))
        entries = model.get("entries")
        if not isinstance(entries, list):
            raise ConfigError("entries must be a row-major list of dim*dim numbers or (re, im) pairs",
                              f"{where}.entries", line)
        if len(entries) != dim * dim:
            raise ConfigError(f"matrix has {len(entries)} entries, expected dim^2 = {dim * dim}",
                              f"{where}.entries", line)
        for i, e in enumerate(entries):
            try:
                z = parse_complex(e)
            except ValueError as exc:
                raise ConfigError(str(exc), f"{where}.entries[{i}]",
                                  lines.get(("model", "entries", i), line)) from None
            if not (math.isfinite(z.real) and math.isfinite(z.imag)):
                raise ConfigError("entries must be finite", f"{where}.entries[{i}]", line)
    if variant == "diagonal_sequence":
        N = model.get("N", 12)
        if not isinstance(N, int) or N < 2:
            raise ConfigError(f"truncation N must be an integer >= 2, got {N!r}", f"{where}.N",
                              lines.get(("model", "N")))
    if variant == "translation" and model.get("domain", "R") not in ("R", "R+"):
        raise ConfigError("translation domain must be 'R' or 'R+'", f"{where}.domain", lines.get(("model", "domain")))


def validate(raw: dict[str, Any], lines: dict[tuple, int] | None = None) -> JobConfig:
    lines = lines or {}
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping at top level", line=1)
    unknown = sorted(set(raw) - _FIELDS)
    if unknown:
        raise ConfigError(f"unknown keys {unknown}", unknown[0], lines.get((unknown[0],)))
    command = raw.get("command")
    if command not in COMMANDS:
        raise ConfigError(f"command must be exactly one of {COMMANDS}, got {command!r}", "command",
                          lines.get(("command",)))
    data = _resolve(raw, top=True)
    for key in ("tol", "separation", "h", "omega", "eps"):
        if key in data and data[key] is not None:
            v = data[key]
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
                raise ConfigError(f"{key} must be a finite number, got {raw[key]!r}", key, lines.get((key,)))
            if key in ("tol", "separation", "h", "eps") and v <= 0:
                raise ConfigError(f"{key} must be positive", key, lines.get((key,)))
            data[key] = float(v)
    if "model" in data:
        _check_model(data["model"], lines)
    for key in ("x", "x_sun"):
        v = data.get(key)
        if isinstance(v, list):
            try:
                parse_vector(v)
            except ValueError as exc:
                raise ConfigError(str(exc), key, lines.get((key,))) from None
    if command in ("split", "mean") and (data.get("model", {}).get("variant", "matrix") != "matrix" or "model" not in data):
        raise ConfigError(f"'{command}' needs a matrix model", "model", lines.get(("model",)))
    if command == "orbit" and "model" not in data:
        raise ConfigError("'orbit' needs a model", "model", None)
    if command in ("split", "mean", "orbit"):
        variant = data["model"].get("variant", "matrix")
        if "x" not in data and variant != "diagonal_sequence":
            raise ConfigError(f"'{command}' needs an initial element x", "x", None)
        if variant == "translation" and not isinstance(data["x"], dict):
            raise ConfigError("translation models take a signal mapping as x", "x", lines.get(("x",)))
        dim = data["model"].get("dim")
        if variant == "matrix":
            for key in ("x", "x_sun"):
                if key in data and (not isinstance(data[key], list) or len(data[key]) != dim):
                    raise ConfigError(f"{key} must have {dim} components", key, lines.get((key,)))
    if command == "wap" and "signal" not in data:
        raise ConfigError("'wap' needs a signal", "signal", None)
    if "schedule" in data:
        sch = data["schedule"]
        if not isinstance(sch, dict) or set(sch) - {"r0", "k_max", "growth"}:
            raise ConfigError("schedule takes r0, k_max, growth", "schedule", lines.get(("schedule",)))
        from .averaging import HorizonSchedule

        try:
            HorizonSchedule(**sch)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc), "schedule", lines.get(("schedule",))) from None
    if data.get("families") is not None:
        from .wap import SequenceFamily

        fams = data["families"]
        if not isinstance(fams, list) or not fams:
            raise ConfigError("families must be a nonempty list of {a, b} pairs", "families", lines.get(("families",)))
        for i, pair in enumerate(fams):
            if not isinstance(pair, dict) or set(pair) != {"a", "b"}:
                raise ConfigError("each family entry needs keys a and b", f"families[{i}]",
                                  lines.get(("families", i)))
            for side in ("a", "b"):
                try:
                    SequenceFamily.from_dict(pair[side])
                except OverflowError:
                    raise
                except (TypeError, ValueError, KeyError) as exc:
                    raise ConfigError(f"invalid sequence family: {exc}", f"families[{i}].{side}",
                                      lines.get(("families", i, side))) from None
    if data.get("claims") is not None:
        cl = data["claims"]
        data["claims"] = [str(c) for c in (cl if isinstance(cl, list) else [cl])]
    if data.get("kernel") is not None and data["kernel"] not in ("cesaro", "smooth"):
        raise ConfigError("kernel must be 'cesaro' or 'smooth'", "kernel", lines.get(("kernel",)))
    if data.get("seed") is not None and not isinstance(data["seed"], int):
        raise ConfigError("seed must be an integer", "seed", lines.get(("seed",)))
    return JobConfig(**data)


def load(text: str, environ: Mapping[str, str] | None = None, overrides: dict[str, Any] | None = None,
         defaults: dict[str, Any] | None = None) -> JobConfig:
    """Parse YAML text into a validated :class:`JobConfig`."""
    try:
        node = yaml.compose(text)
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ConfigError(f"unreadable config: {getattr(exc, 'problem', exc)}",
                          line=mark.line + 1 if mark else None) from None
    if raw is None:
        raise ConfigError("config is empty", line=1)
    lines = _line_index(node) if node is not None else {}
    if isinstance(raw, dict) and "claims" in raw:
        # claim ids like 11.10 must keep their spelling, not become floats
        raw["claims"] = _scalar_texts(node, "claims")
    raw = apply_env(raw, environ) if isinstance(raw, dict) else raw
    if isinstance(raw, dict):
        for k, v in (defaults or {}).items():
            raw.setdefault(k, v)
        raw.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return validate(raw, lines)


def load_file(path: str, environ: Mapping[str, str] | None = None,
              overrides: dict[str, Any] | None = None, defaults: dict[str, Any] | None = None) -> JobConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return load(text, environ, overrides, defaults)


def from_dict(data: dict[str, Any]) -> JobConfig:
    """Re-parse an echoed config (as found in a report record)."""
    return validate(copy.deepcopy(data))
