"""Runtime values and their canonical ordering.

Values are plain Python objects:

========  ====================  =========
tag       Python type           literal
========  ====================  =========
``sym``   :class:`str`          ``"HR"``
``int``   :class:`int`          ``42``
``rat``   :class:`Fraction`     ``1/2``
``real``  :class:`float`        ``0.5``
========  ====================  =========

Columns of a relation are typed, so values of different kinds never meet in
the same position and Python's numeric cross-kind equality is harmless.
"""
from __future__ import annotations

import math
import struct
from fractions import Fraction
from typing import Union

Value = Union[str, int, Fraction, float]

DOMAIN_TAGS = ("sym", "int", "rat", "real")
NUMERIC_TAGS = frozenset({"int", "rat", "real"})

_KIND_RANK = {"sym": 0, "int": 1, "rat": 2, "real": 3}


def value_tag(v: object) -> str:
    """Return the domain tag of a runtime value, or raise TypeError."""
    t = type(v)
    if t is str:
        return "sym"
    if t is int:
        return "int"
    if t is Fraction:
        return "rat"
    if t is float:
        if math.isnan(v):
            raise TypeError("NaN is not a value")
        return "real"
    raise TypeError(f"not a gdlog value: {v!r} ({t.__name__})")


def is_rational(v: object) -> bool:
    return type(v) is int or type(v) is Fraction


def coerce(v: Value, tag: str) -> Value:
    """Widen ``v`` to domain ``tag`` where lossless (int -> rat, int -> real).

    Raises TypeError when the value cannot live in that domain.
    """
    have = value_tag(v)
    if have == tag:
        return v
    if have == "int" and tag == "rat":
        return Fraction(v)
    if have == "int" and tag == "real":
        f = float(v)
        if int(f) != v:
            raise TypeError(f"integer {v} is not exactly representable as real")
        return f
    raise TypeError(f"{format_value(v)} ({have}) does not fit domain {tag}")


def value_key(v: Value) -> tuple:
    """Sort key realizing the canonical total order on values.

    Symbols first (by string), then all numbers by numeric value; ties between
    numerically equal values of different kinds break by kind, then by the
    binary64 bit pattern (separating -0.0 from 0.0).
    """
    t = type(v)
    if t is str:
        return (0, v)
    if t is float:
        return (1, v, 3, struct.unpack("<q", struct.pack("<d", v))[0])
    return (1, v, _KIND_RANK["int" if t is int else "rat"], 0)


def tuple_key(values: tuple) -> tuple:
    return tuple(value_key(v) for v in values)


def format_value(v: Value) -> str:
    """Render a value as a literal that parses back to an equal value."""
    t = type(v)
    if t is str:
        return _quote(v)
    if t is Fraction:
        return f"{v.numerator}/{v.denominator}"
    if t is float:
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    return str(v)


def _quote(s: str) -> str:
    out = ['"']
    for ch in s:
        if ch == '"':
            out.append('\\"')
        elif ch == "\\":
            out.append("\\\\")
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\t":
            out.append("\\t")
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)
