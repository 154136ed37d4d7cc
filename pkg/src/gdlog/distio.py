"""Reading and writing output distributions (text and JSON).

Text layout::

    gdlog-distribution 1
    mode: exact
    chase: parallel
    ...
    world 1/4
      R(0).
      S(0).
    bottom 0/1

Empirical worlds are written as ``world <frequency> count <n>``.  Lines
starting with ``#`` are comments (per-cell means are emitted that way).
The same format, in exact mode, doubles as the input-PDB format.
"""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Optional

from .engine import (
    EMPIRICAL, EXACT, EmpiricalDistribution, InputPdb, WorldDistribution, cell_means,
)
from .model import Instance, SchemaError, make_fact
from .parser import ParseError, parse_fact_list
from .values import format_value

MAGIC = "gdlog-distribution"
VERSION = 1
TEXT = "text"
JSON = "json"
_META_KEYS = ("mode", "chase", "policy", "seed", "runs", "budget", "max_depth", "keep_aux",
              "conditioned")


def _meta(dist, extra: Optional[dict]) -> dict:
    meta = {k: None for k in _META_KEYS}
    meta.update(mode=dist.mode, keep_aux=False, conditioned=False)
    meta.update({k: v for k, v in dist.info.items() if k in _META_KEYS})
    if isinstance(dist, EmpiricalDistribution):
        meta.update(seed=dist.seed, runs=dist.runs, budget=dist.budget)
    if extra:
        meta.update({k: v for k, v in extra.items() if k in _META_KEYS})
    return meta


def _fmt_meta(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def _freq(count: int, runs: int) -> str:
    return repr(count / runs) if runs else "0.0"


def format_text(dist, extra: Optional[dict] = None, means: bool = True) -> str:
    meta = _meta(dist, extra)
    lines = [f"{MAGIC} {VERSION}"]
    lines += [f"{k.replace('_', '-')}: {_fmt_meta(meta[k])}" for k in _META_KEYS]
    if isinstance(dist, EmpiricalDistribution) and means:
        for cm in cell_means(dist):
            lines.append(f"# mean {cm.pattern()}[{cm.position + 1}] = {cm.mean!r} "
                         f"over {cm.runs} run(s)")
    for world, m in dist.items():
        if isinstance(dist, WorldDistribution):
            lines.append(f"world {format_value(Fraction(m))}")
        else:
            lines.append(f"world {_freq(m, dist.runs)} count {m}")
        lines += [f"  {f}." for f in world.canonical()]
    if isinstance(dist, WorldDistribution):
        lines.append(f"bottom {format_value(Fraction(dist.bottom))}")
    else:
        lines.append(f"bottom {_freq(dist.bottom, dist.runs)} count {dist.bottom}")
    return "\n".join(lines) + "\n"


def format_json(dist, extra: Optional[dict] = None, means: bool = True) -> str:
    meta = _meta(dist, extra)
    exact = isinstance(dist, WorldDistribution)
    worlds = []
    for world, m in dist.items():
        entry = {"facts": [str(f) for f in world.canonical()]}
        if exact:
            entry["probability"] = format_value(Fraction(m))
        else:
            entry["probability"] = dist.frequency(world)
            entry["count"] = m
        worlds.append(entry)
    doc = {"format": MAGIC, "version": VERSION, **meta, "worlds": worlds}
    if exact:
        doc["bottom"] = {"probability": format_value(Fraction(dist.bottom))}
    else:
        doc["bottom"] = {"probability": dist.bottom_frequency, "count": dist.bottom}
        if means:
            doc["cell_means"] = [
                {"cell": cm.pattern(), "position": cm.position + 1, "mean": cm.mean,
                 "runs": cm.runs} for cm in cell_means(dist)]
    return json.dumps(doc, indent=2) + "\n"


def dumps(dist, fmt: str = TEXT, extra: Optional[dict] = None) -> str:
    if fmt == TEXT:
        return format_text(dist, extra)
    if fmt == JSON:
        return format_json(dist, extra)
    raise ValueError(f"unknown format {fmt!r}")


# --- reading ---------------------------------------------------------------

class DistributionFormatError(ValueError):
    pass


def _parse_prob(s: str) -> Fraction:
    try:
        p = Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise DistributionFormatError(f"bad probability {s!r}") from None
    if p < 0:
        raise DistributionFormatError(f"negative probability {s}")
    return p


def _parse_meta(v: str):
    if v == "-":
        return None
    if v in ("true", "false"):
        return v == "true"
    try:
        return int(v)
    except ValueError:
        return v


def _facts(texts: list, file: str) -> Instance:
    try:
        return Instance(parse_fact_list("\n".join(texts), file))
    except ParseError as exc:
        raise DistributionFormatError(str(exc)) from None


def _build(meta: dict, worlds: list, bottom, file: str):
    if meta.get("mode") == EMPIRICAL:
        merged: dict = {}
        for inst, count in worlds:
            if count is None:
                raise DistributionFormatError(f"{file}: empirical world without a count")
            merged[inst] = merged.get(inst, 0) + count
        runs = meta.get("runs")
        if bottom is None:
            bottom = 0
        if runs is None:
            runs = sum(merged.values()) + bottom
        info = {k: meta[k] for k in ("chase", "policy", "conditioned") if k in meta}
        try:
            return EmpiricalDistribution(merged, bottom, runs, meta.get("seed"),
                                         meta.get("budget"), info)
        except ValueError as exc:
            raise DistributionFormatError(f"{file}: {exc}") from None
    merged = {}
    for inst, p in worlds:
        merged[inst] = merged.get(inst, Fraction(0)) + p
    info = {k: meta[k] for k in ("chase", "policy", "max_depth", "conditioned") if k in meta}
    return WorldDistribution(merged, bottom if bottom is not None else Fraction(0), info)


def _loads_text(text: str, file: str):
    lines = text.splitlines()
    if not lines or lines[0].split()[:1] != [MAGIC]:
        raise DistributionFormatError(f"{file}: missing '{MAGIC}' header")
    meta: dict = {}
    worlds, bottom = [], None
    cur = None  # [prob, count, fact lines]
    exact = True

    def flush():
        if cur is not None:
            inst = _facts(cur[2], file)
            worlds.append((inst, cur[1] if not exact else cur[0]))

    for no, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if raw[:1].isspace():
            if cur is None:
                raise DistributionFormatError(f"{file}:{no}: fact outside a world")
            cur[2].append(line)
            continue
        head, _, rest = line.partition(" ")
        if head.endswith(":"):
            key = head[:-1].replace("-", "_")
            meta[key] = _parse_meta(rest.strip())
            exact = meta.get("mode", EXACT) != EMPIRICAL
            continue
        parts = rest.split()
        count = None
        if len(parts) == 3 and parts[1] == "count":
            count = int(parts[2])
        elif len(parts) != 1:
            raise DistributionFormatError(f"{file}:{no}: cannot parse {line!r}")
        if head == "world":
            flush()
            cur = [_parse_prob(parts[0]), count, []]
        elif head == "bottom":
            flush()
            cur = None
            bottom = count if not exact else _parse_prob(parts[0])
        else:
            raise DistributionFormatError(f"{file}:{no}: cannot parse {line!r}")
    flush()
    return _build(meta, worlds, bottom, file)


def _loads_json(text: str, file: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DistributionFormatError(f"{file}: {exc}") from None
    if not isinstance(doc, dict) or doc.get("format") != MAGIC:
        raise DistributionFormatError(f"{file}: not a {MAGIC} document")
    meta = {k: doc.get(k) for k in _META_KEYS}
    exact = meta.get("mode") != EMPIRICAL
    worlds = []
    for w in doc.get("worlds", []):
        inst = _facts([f + "." for f in w["facts"]], file)
        worlds.append((inst, _parse_prob(str(w["probability"])) if exact else w.get("count")))
    b = doc.get("bottom") or {}
    bottom = _parse_prob(str(b.get("probability", "0"))) if exact else b.get("count", 0)
    return _build(meta, worlds, bottom, file)


def loads(text: str, file: str = "<string>"):
    """Read a distribution written by :func:`dumps` (format auto-detected)."""
    if text.lstrip().startswith("{"):
        return _loads_json(text, file)
    return _loads_text(text, file)


def load_input_pdb(text: str, schema, file: str = "<string>") -> InputPdb:
    """Read an exact distribution file as an input PDB, checking facts against ``schema``."""
    dist = loads(text, file)
    if not isinstance(dist, WorldDistribution):
        raise DistributionFormatError(f"{file}: an input PDB needs exact probabilities")
    if hasattr(schema, "schema"):
        schema = schema.schema
    pairs = []
    for world, p in dist.items():
        try:
            inst = Instance(make_fact(schema, f.relation, f.args) for f in world)
        except SchemaError as exc:
            raise DistributionFormatError(f"{file}: {exc}") from None
        pairs.append((inst, p))
    try:
        pdb = InputPdb.of(pairs)
    except ValueError as exc:
        raise DistributionFormatError(f"{file}: {exc}") from None
    if pdb.shortfall != dist.bottom:
        raise DistributionFormatError(
            f"{file}: world masses and bottom must sum to 1 (shortfall {pdb.shortfall})")
    return pdb


__all__ = ["dumps", "loads", "format_text", "format_json", "load_input_pdb",
           "DistributionFormatError", "TEXT", "JSON"]
