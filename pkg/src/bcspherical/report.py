"""Run configuration, verification reports and their JSON/CSV serialization."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, fields

import numpy as np
from gmpy2 import mpq

from .errors import ConfigError
from .polyalg import MultiPoly, SymmetricPoly

PASS, FAIL, WARN = "pass", "fail", "warn"


@dataclass
class RunConfig:
    command: str = ""
    r: int = 1
    a: str = "1"
    b: str = "1"
    iota: str = "1"
    nu: str | None = None
    delta: str | None = None
    max_weight: int = 2
    order: int | None = None
    cutoff: float | None = None
    out: str | None = None
    format: str = "json"
    tol: float | None = None
    nus: str | None = None

    _INT = ("r", "max_weight", "order")
    _FLOAT = ("cutoff", "tol")

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        cfg = cls()
        for k, v in data.items():
            cfg.set(k, v)
        return cfg

    def set(self, key: str, value, line: int | None = None):
        name = key.strip().replace("-", "_")
        known = {f.name for f in fields(self)}
        if name not in known:
            raise ConfigError(f"unknown key {key!r}", line=line, key=key)
        if value is None:
            setattr(self, name, None)
            return
        try:
            if name in self._INT:
                value = int(value)
            elif name in self._FLOAT:
                value = float(value)
            else:
                value = str(value).strip()
        except ValueError:
            raise ConfigError(f"bad value {value!r} for {key}", line=line, key=key) from None
        if name == "format" and value not in ("json", "csv"):
            raise ConfigError(f"format must be json or csv, got {value!r}", line=line, key=key)
        setattr(self, name, value)


def parse_config_text(text: str) -> dict:
    """key = value lines; '#' starts a comment; blank lines ignored."""
    out = {}
    cfg = RunConfig()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected key=value, got {raw.strip()!r}", line=lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError("empty key", line=lineno)
        cfg.set(key, value, line=lineno)  # validates
        out[key.replace("-", "_")] = getattr(cfg, key.replace("-", "_"))
    return out


def load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config_text(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None


@dataclass
class VerificationReport:
    item: str
    status: str
    residual: object = None
    metadata: dict = field(default_factory=dict)
    table: tuple | None = None  # (header, rows) for CSV output
    timing: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"item": self.item, "status": self.status, "residual": self.residual, "metadata": self.metadata}


def exact_residual(poly: MultiPoly) -> dict:
    """Exact-zero flag, with the residual polynomial verbatim when nonzero."""
    if poly.is_zero():
        return {"exact_zero": True}
    return {"exact_zero": False, "terms": poly.to_json()}


# ----------------------------------------------------------------------------
# serialization


def _plain(obj):
    """Convert to JSON-ready structures with rationals as strings."""
    if isinstance(obj, type(mpq())):
        return str(obj)
    if isinstance(obj, (MultiPoly,)):
        return obj.to_json()
    if isinstance(obj, SymmetricPoly) or hasattr(obj, "to_json"):
        return obj.to_json()
    if isinstance(obj, dict):
        return {str(k) if not isinstance(k, tuple) else "(" + ",".join(map(str, k)) + ")": _plain(v)
                for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def _encode(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if math.isnan(obj):
            return '"nan"'
        if math.isinf(obj):
            return '"inf"' if obj > 0 else '"-inf"'
        return "%.17g" % obj
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{_encode(str(k), indent, level + 1)}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, str)) or v is None for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def to_json_text(obj, indent: int = 2) -> str:
    """Deterministic JSON: insertion-ordered keys, floats with 17 significant digits."""
    return _encode(_plain(obj), indent, 0) + "\n"


def run_document(config: RunConfig, reports: list) -> dict:
    status = FAIL if any(r.status == FAIL for r in reports) else PASS
    return {
        "config": config.as_dict(),
        "status": status,
        "reports": [r.as_dict() for r in reports],
        "timing": {r.item: r.timing for r in reports},
    }


def to_csv_text(reports: list) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    tables = [r for r in reports if r.table is not None]
    if tables:
        for k, rep in enumerate(tables):
            if k:
                writer.writerow([])
            header, rows = rep.table
            writer.writerow(header)
            for row in rows:
                writer.writerow([_csv_cell(v) for v in row])
    else:
        writer.writerow(["item", "status", "residual"])
        for rep in reports:
            writer.writerow([rep.item, rep.status, _csv_cell(_plain(rep.residual))])
    return buf.getvalue()


def _csv_cell(v) -> str:
    if isinstance(v, float):
        return "%.17g" % v
    if isinstance(v, type(mpq())):
        return str(v)
    if isinstance(v, (dict, list)):
        return to_json_text(v, indent=0).replace("\n", "")
    return str(v)
