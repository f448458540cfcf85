"""Flat ``key = value`` text records for configuration dataclasses."""

from __future__ import annotations

import dataclasses
import typing


def dump_kv(record) -> str:
    lines = []
    for f in dataclasses.fields(record):
        value = getattr(record, f.name)
        if isinstance(value, (list, tuple)):
            value = ",".join(str(v) for v in value)
        elif isinstance(value, float):
            value = repr(value)
        lines.append(f"{f.name} = {value}")
    return "\n".join(lines) + "\n"


def _convert(tp, text):
    origin = typing.get_origin(tp)
    if origin in (list, tuple):
        (inner, *_) = typing.get_args(tp)
        items = [_convert(inner, t.strip()) for t in text.split(",") if t.strip()]
        return origin(items)
    if tp is bool:
        if text.lower() not in ("true", "false", "1", "0"):
            raise ValueError(f"not a boolean: {text!r}")
        return text.lower() in ("true", "1")
    return tp(text)


def load_kv(cls, text: str, strict: bool = True):
    """Parse ``text`` into ``cls``; unknown keys raise unless ``strict=False``.

    Blank lines and ``#`` comments are skipped; missing keys keep defaults.
    """
    hints = typing.get_type_hints(cls)
    names = {f.name for f in dataclasses.fields(cls)}
    kwargs = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (t.strip() for t in line.split("=", 1))
        if key not in names:
            if strict:
                raise ValueError(f"line {lineno}: unknown key {key!r}")
            continue
        kwargs[key] = _convert(hints[key], value)
    return cls(**kwargs)
