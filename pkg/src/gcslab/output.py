"""Deterministic CSV/JSON serialization.

Floats are written with a fixed number of significant digits (17 in JSON,
configurable in CSV) so that identical runs produce identical bytes.
"""

import csv
import io
import json
import math

import numpy as np

JSON_DIGITS = 17


def format_number(value, digits):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    text = format(value, f".{digits}g")
    return "0" if text == "-0" else text


def _json_value(value, indent, level):
    pad = " " * (indent * (level + 1))
    close = " " * (indent * level)
    if value is None:
        return "null"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, str):
        return _json_string(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        if not math.isfinite(value):
            return "null"
        return format_number(value, JSON_DIGITS)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{pad}{_json_string(str(k))}: {_json_value(v, indent, level + 1)}" for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + close + "}"
    if isinstance(value, (list, tuple, np.ndarray)):
        if len(value) == 0:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in value):
            return "[" + ", ".join(_json_value(v, indent, level + 1) for v in value) + "]"
        items = [f"{pad}{_json_value(v, indent, level + 1)}" for v in value]
        return "[\n" + ",\n".join(items) + "\n" + close + "]"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _json_string(text):
    return json.dumps(text, ensure_ascii=False)


def to_json(value, indent=2):
    """Serialize with 17 significant digits; non-finite floats become null."""
    return _json_value(value, indent, 0) + "\n"


def to_csv(columns, rows, digits, comment=None):
    """RFC 4180 CSV with an optional leading ``# comment`` line."""
    buffer = io.StringIO()
    if comment:
        buffer.write(f"# {comment}\r\n")
    writer = csv.writer(buffer, lineterminator="\r\n")
    if columns is not None:
        writer.writerow(columns)
    for row in rows:
        writer.writerow([v if isinstance(v, str) else format_number(v, digits) for v in row])
    return buffer.getvalue()


def write_text(text, path, stream):
    if path is None:
        stream.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
