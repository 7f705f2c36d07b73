"""Deterministic JSON and CSV writers.

Floats are printed with 17 significant digits so that reading the text
back gives the same IEEE double. Key order follows insertion order, which
keeps repeated runs byte-identical.
"""

from __future__ import annotations

import io
import json
import math
from fractions import Fraction

import numpy as np

SCHEMA_VERSION = 1


def format_float(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    text = format(x, ".17g")
    if text == "-0":
        text = "0"
    return text


def to_plain(obj):
    """Convert numpy and Fraction values into JSON-friendly Python objects.

    Fractions become ``"p/q"`` strings so rational results stay exact.
    """
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}" if obj.denominator != 1 else str(obj.numerator)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if hasattr(obj, "to_dict"):
        return to_plain(obj.to_dict())
    return obj


def _encode(obj, out: io.StringIO, indent: int, level: int) -> None:
    pad = " " * (indent * (level + 1))
    end_pad = " " * (indent * level)
    if obj is None:
        out.write("null")
    elif obj is True:
        out.write("true")
    elif obj is False:
        out.write("false")
    elif isinstance(obj, int):
        out.write(str(obj))
    elif isinstance(obj, float):
        out.write(format_float(obj))
    elif isinstance(obj, str):
        out.write(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, dict):
        if not obj:
            out.write("{}")
            return
        out.write("{\n")
        items = list(obj.items())
        for i, (k, v) in enumerate(items):
            out.write(pad + json.dumps(str(k), ensure_ascii=False) + ": ")
            _encode(v, out, indent, level + 1)
            out.write(",\n" if i + 1 < len(items) else "\n")
        out.write(end_pad + "}")
    elif isinstance(obj, list):
        if not obj:
            out.write("[]")
            return
        # short numeric rows stay on one line
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
            out.write("[" + ", ".join(format_float(v) if isinstance(v, float) else str(v) for v in obj) + "]")
            return
        out.write("[\n")
        for i, v in enumerate(obj):
            out.write(pad)
            _encode(v, out, indent, level + 1)
            out.write(",\n" if i + 1 < len(obj) else "\n")
        out.write(end_pad + "]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    buf = io.StringIO()
    _encode(to_plain(obj), buf, indent, 0)
    buf.write("\n")
    return buf.getvalue()


def loads(text: str):
    return json.loads(text)


def write_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(obj))


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def csv_text(columns, rows) -> str:
    """Render rows as CSV with '.' decimals and LF line endings."""
    lines = [",".join(columns)]
    for row in rows:
        cells = []
        for v in row:
            v = to_plain(v)
            if isinstance(v, float):
                cells.append(format_float(v))
            elif isinstance(v, bool):
                cells.append("true" if v else "false")
            else:
                text = str(v)
                if any(ch in text for ch in ',"\n'):
                    text = '"' + text.replace('"', '""') + '"'
                cells.append(text)
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def write_csv(path, columns, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(csv_text(columns, rows))


def parse_fraction(text) -> Fraction:
    """Parse ``"3"``, ``"0.25"`` or ``"1/3"`` into an exact Fraction."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, (int, np.integer)):
        return Fraction(int(text))
    if isinstance(text, float):
        return Fraction(text)
    return Fraction(str(text).strip())
