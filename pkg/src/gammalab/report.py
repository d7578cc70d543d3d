"""Self-describing JSON/CSV report documents with bit-stable payloads.

Floats are printed with 17 significant digits and object keys are sorted, so
identical computations give byte-identical payload text.  The timestamp and
timings live outside the payload.
"""
from __future__ import annotations

import dataclasses
import datetime as _dt
import enum
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__


def to_plain(obj: Any) -> Any:
    """Reduce results to dict/list/str/int/float/bool/None."""
    if hasattr(obj, "to_dict"):
        return to_plain(obj.to_dict())
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, (bool, type(None), str)):
        return obj
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [to_plain(v) for v in obj]
    if dataclasses.is_dataclass(obj):
        return to_plain(dataclasses.asdict(obj))
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    s = format(x, ".17g")
    if not any(ch in s for ch in ".en"):
        s += ".0"
    return s


def dumps(obj: Any, indent: int | None = 2, _level: int = 0) -> str:
    """Canonical JSON: sorted keys, %.17g floats, non-finite floats as strings."""
    obj = to_plain(obj) if _level == 0 else obj
    pad = "" if indent is None else "\n" + " " * (indent * (_level + 1))
    end = "" if indent is None else "\n" + " " * (indent * _level)
    sep = "," if indent is None else ","
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {dumps(obj[k], indent, _level + 1)}" for k in sorted(obj)]
        return "{" + sep.join(items) + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        return "[" + sep.join(f"{pad}{dumps(v, indent, _level + 1)}" for v in obj) + end + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _float(obj)
    return json.dumps(obj, ensure_ascii=False)


def loads(text: str) -> Any:
    return json.loads(text)


@dataclass
class ReportDocument:
    command: list[str]
    seed: int | None
    precision: dict
    payload: Any
    warnings: list[str] = field(default_factory=list)
    tool_version: str = __version__
    timestamp: str = field(default_factory=lambda: _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"))
    timings: dict = field(default_factory=dict)

    def payload_text(self) -> str:
        return dumps(self.payload)

    def to_text(self) -> str:
        doc = {
            "tool": "gammalab",
            "tool_version": self.tool_version,
            "command": list(self.command),
            "seed": self.seed,
            "precision": self.precision,
            "payload": to_plain(self.payload),
            "warnings": list(self.warnings),
            "timestamp": self.timestamp,
            "timings": self.timings,
        }
        return dumps(doc) + "\n"


def write_report(doc: ReportDocument, fmt: str = "json", output: str | None = None, csv_text: str | None = None) -> str:
    """Serialize ``doc`` (or ``csv_text`` for csv format) to ``output`` or stdout."""
    if fmt == "json":
        text = doc.to_text()
    elif fmt == "csv":
        if csv_text is None:
            raise ValueError("this command has no CSV form")
        text = csv_text
    elif fmt == "text":
        text = _as_text(to_plain(doc.payload)) + "\n"
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if output is None or output == "-":
        sys.stdout.write(text)
    else:
        Path(output).write_text(text)
    return text


def _as_text(obj: Any, prefix: str = "") -> str:
    buf = io.StringIO()
    if isinstance(obj, dict):
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)) and v and not all(isinstance(x, (int, float, str)) for x in v):
                buf.write(f"{prefix}{k}:\n{_as_text(v, prefix + '  ')}")
            else:
                buf.write(f"{prefix}{k}: {dumps(v, indent=None, _level=1)}\n")
    elif isinstance(obj, list):
        for v in obj:
            buf.write(f"{prefix}- {dumps(v, indent=None, _level=1)}\n")
    else:
        buf.write(f"{prefix}{obj}\n")
    return buf.getvalue().rstrip("\n") if not prefix else buf.getvalue()
