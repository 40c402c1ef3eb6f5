"""JSON writing with fixed 17-significant-digit floats."""

import json
import math


def format_float(x):
    if not math.isfinite(x):
        return "null"
    s = format(x, ".17g")
    if not any(ch in s for ch in ".en"):
        s += ".0"
    return s


def _encode(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if hasattr(obj, "item") and not isinstance(obj, (list, tuple, dict)):
        return _encode(obj.item(), indent, level)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        if level > 0 and len(obj) <= 6 and all(
                not isinstance(v, (dict, list, tuple)) for v in obj.values()):
            return "{" + ", ".join(f"{json.dumps(str(k))}: {_encode(v, indent, level + 1)}"
                                   for k, v in obj.items()) + "}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent=2):
    """Serialize ``obj``; dict order is preserved, floats use ``%.17g``."""
    return _encode(obj, indent, 0) + "\n"
