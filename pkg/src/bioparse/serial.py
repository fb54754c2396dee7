"""Deterministic JSON output.

Python's json module delegates float formatting to repr, whose output is
the shortest string that round-trips. Downstream consumers compare output
byte for byte, so reals are instead written with a fixed 17 significant
digits, which is enough to reproduce any IEEE double exactly and always
produces the same bytes for the same value.
"""

import math

import numpy as np


def format_real(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite real {x}")
    if x == 0.0:
        x = 0.0  # normalize -0.0
    return format(x, ".17g")


def _emit(obj, parts, sort_keys):
    if obj is None:
        parts.append("null")
    elif obj is True:
        parts.append("true")
    elif obj is False:
        parts.append("false")
    elif isinstance(obj, str):
        parts.append(_escape(obj))
    elif isinstance(obj, (int, np.integer)) and not isinstance(obj, bool):
        parts.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        parts.append(format_real(float(obj)))
    elif isinstance(obj, dict):
        keys = sorted(obj) if sort_keys else list(obj)
        parts.append("{")
        for i, k in enumerate(keys):
            if i:
                parts.append(",")
            if not isinstance(k, str):
                raise ValueError(f"JSON object keys must be strings, got {type(k).__name__}")
            parts.append(_escape(k))
            parts.append(":")
            _emit(obj[k], parts, sort_keys)
        parts.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        parts.append("[")
        seq = obj.tolist() if isinstance(obj, np.ndarray) else obj
        for i, v in enumerate(seq):
            if i:
                parts.append(",")
            _emit(v, parts, sort_keys)
        parts.append("]")
    else:
        raise ValueError(f"cannot serialize {type(obj).__name__}")


_ESCAPES = {
    '"': '\\"', "\\": "\\\\", "\b": "\\b", "\f": "\\f",
    "\n": "\\n", "\r": "\\r", "\t": "\\t",
}


def _escape(s: str) -> str:
    out = ['"']
    for ch in s:
        if ch in _ESCAPES:
            out.append(_ESCAPES[ch])
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


def canonical_json(obj, sort_keys: bool = True) -> str:
    """Compact JSON with object keys sorted (optionally) and 17-digit reals."""
    parts = []
    _emit(obj, parts, sort_keys)
    return "".join(parts)
