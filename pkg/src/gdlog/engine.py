"""Inference backends: exact chase-tree enumeration and seeded Monte Carlo."""
from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional, Union

from .chase import (
    PARALLEL, SEQUENTIAL, BudgetExceeded, compile_program, exact_successors,
    get_policy, run_chase,
)
from .dist import FINITE, Rng
from .model import AUX_PREFIX, EXTENSIONAL, Instance
from .translate import as_existential
from .values import format_value, tuple_key

EXACT = "exact"
EMPIRICAL = "empirical"
DEFAULT_MAX_DEPTH = 10_000
_TWO53 = 1 << 53


class EngineError(Exception):
    pass


class NotFinitelyEnumerable(EngineError):
    pass


class RunFailed(EngineError):
    """A Monte-Carlo run raised; ``run`` is its index (and Rng stream id)."""

    def __init__(self, run: int, cause: Exception):
        self.run = run
        self.cause = cause
        super().__init__(f"run {run}: {type(cause).__name__}: {cause}")


@dataclass(frozen=True)
class InputPdb:
    """A finite input distribution; missing mass is the error event."""

    worlds: tuple  # ((Instance, Fraction), ...)

    def __post_init__(self):
        total = Fraction(0)
        for inst, p in self.worlds:
            if not isinstance(inst, Instance) or Fraction(p) < 0:
                raise ValueError("input worlds must be (Instance, non-negative probability)")
            total += Fraction(p)
        if total > 1:
            raise ValueError(f"input probabilities sum to {total} > 1")

    @classmethod
    def of(cls, pairs: Iterable) -> "InputPdb":
        merged: dict = {}
        for inst, p in pairs:
            merged[inst] = merged.get(inst, Fraction(0)) + Fraction(p)
        return cls(tuple((i, p) for i, p in merged.items() if p))

    @property
    def shortfall(self) -> Fraction:
        return 1 - sum((p for _, p in self.worlds), Fraction(0))


def _as_inputs(inp) -> tuple:
    if isinstance(inp, InputPdb):
        return tuple((i, Fraction(p)) for i, p in inp.worlds), inp.shortfall
    return ((inp, Fraction(1)),), Fraction(0)


@dataclass(frozen=True)
class WorldDistribution:
    """Exact sub-probability distribution over instances plus the mass of the error event."""

    worlds: dict
    bottom: Fraction = Fraction(0)
    info: dict = field(default_factory=dict, compare=False)

    mode = EXACT

    def probability(self, world: Instance) -> Fraction:
        return self.worlds.get(world, Fraction(0))

    def masses(self) -> dict:
        return dict(self.worlds)

    @property
    def total(self) -> Fraction:
        return sum(self.worlds.values(), Fraction(0)) + self.bottom

    def items(self) -> list:
        """``(world, probability)`` in canonical world order."""
        return sorted(self.worlds.items(), key=lambda kv: kv[0].sort_key())

    def __len__(self):
        return len(self.worlds)


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Counts of chase outcomes over ``runs`` independent seeded runs."""

    worlds: dict
    bottom: int
    runs: int
    seed: Optional[int] = None
    budget: Optional[int] = None
    info: dict = field(default_factory=dict, compare=False)

    mode = EMPIRICAL

    def __post_init__(self):
        if sum(self.worlds.values()) + self.bottom != self.runs:
            raise ValueError("world counts and bottom count must add up to runs")

    def count(self, world: Instance) -> int:
        return self.worlds.get(world, 0)

    def frequency(self, world: Instance) -> float:
        return self.count(world) / self.runs if self.runs else 0.0

    def probability(self, world: Instance) -> Fraction:
        return Fraction(self.count(world), self.runs) if self.runs else Fraction(0)

    def masses(self) -> dict:
        return {w: Fraction(c, self.runs) for w, c in self.worlds.items()}

    @property
    def bottom_frequency(self) -> float:
        return self.bottom / self.runs if self.runs else 0.0

    def items(self) -> list:
        return sorted(self.worlds.items(), key=lambda kv: kv[0].sort_key())

    def __len__(self):
        return len(self.worlds)


Distribution = Union[WorldDistribution, EmpiricalDistribution]


def _check_finite(eprog) -> None:
    for r in eprog.rules:
        if r.is_sampler:
            fam = eprog.family(r.dist)
            if fam.support_kind != FINITE:
                raise NotFinitelyEnumerable(
                    f"rule {r.index} samples from {fam.name} ({fam.support_kind})")


def exact_enumerate(prog, inp, mode: str = PARALLEL, policy="rule-index",
                    max_depth: int = DEFAULT_MAX_DEPTH) -> WorldDistribution:
    """Expand the whole chase tree with exact branch weights.

    The tree is walked level by level and equal instances on a level are
    merged; the future of a node only depends on its instance.  Leaves add
    their mass to their world; mass still undecided after ``max_depth`` steps
    goes to ``bottom``.  Worlds keep the auxiliary relations (see
    :func:`project_distribution`).
    """
    eprog = as_existential(prog)
    _check_finite(eprog)
    if mode not in (SEQUENTIAL, PARALLEL):
        raise ValueError(f"unknown mode {mode!r}")
    pol = get_policy(policy)
    cp = compile_program(eprog)
    inputs, bottom = _as_inputs(inp)
    frontier: dict = {}
    for inst, p in inputs:
        frontier[inst] = frontier.get(inst, Fraction(0)) + p
    worlds: dict = {}
    depth = 0
    while frontier:
        nxt: dict = {}
        for inst, w in frontier.items():
            children = exact_successors(cp, inst, mode, pol)
            if children is None:
                worlds[inst] = worlds.get(inst, Fraction(0)) + w
            elif depth >= max_depth:
                bottom += w
            else:
                for child, p in children:
                    nxt[child] = nxt.get(child, Fraction(0)) + w * p
        frontier = nxt
        depth += 1
    info = {"chase": mode, "policy": pol.name if mode == SEQUENTIAL else None,
            "max_depth": max_depth}
    return WorldDistribution(worlds, bottom, info)


def _draw_input(inputs, rng) -> Optional[Instance]:
    if len(inputs) == 1 and inputs[0][1] == 1:
        return inputs[0][0]
    u = Fraction(rng.bits53(), _TWO53)
    cum = Fraction(0)
    for inst, p in inputs:
        cum += p
        if u < cum:
            return inst
    return None


def _run_range(prog, inp, start, stop, seed, mode, policy, budget, trace=None):
    inputs, _ = _as_inputs(inp)
    worlds: Counter = Counter()
    bottom = 0
    for r in range(start, stop):
        rng = Rng(seed, r)
        d0 = _draw_input(inputs, rng)
        if d0 is None:
            bottom += 1
            continue
        tr = None
        if trace is not None:
            tr = lambda rec, r=r: trace(r, rec)  # noqa: E731
        try:
            out = run_chase(prog, d0, mode, policy, budget, rng, trace=tr)
        except Exception as exc:  # noqa: BLE001 - re-raised with the run index
            raise RunFailed(r, exc) from exc
        if isinstance(out, BudgetExceeded):
            bottom += 1
        else:
            worlds[out.instance] += 1
    return worlds, bottom


def monte_carlo(prog, inp, mode: str = PARALLEL, policy="rule-index", n: int = 10_000,
                budget: int = 10_000, seed: int = 0, jobs: int = 1,
                trace: Optional[Callable] = None) -> EmpiricalDistribution:
    """Run the chase ``n`` times; run ``r`` draws from Rng stream ``(seed, r)``.

    The result depends only on the arguments, not on ``jobs``.  ``trace``,
    if given, is called as ``trace(run, record)`` and forces ``jobs=1``.
    """
    if n < 1:
        raise ValueError("need at least one run")
    eprog = as_existential(prog)
    get_policy(policy)
    if trace is not None or jobs <= 1 or n < 2 * jobs:
        worlds, bottom = _run_range(eprog, inp, 0, n, seed, mode, policy, budget, trace)
    else:
        bounds = [n * k // jobs for k in range(jobs + 1)]
        worlds, bottom = Counter(), 0
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futs = [pool.submit(_run_range, eprog, inp, lo, hi, seed, mode, policy, budget)
                    for lo, hi in zip(bounds, bounds[1:]) if hi > lo]
            for f in futs:
                w, b = f.result()
                worlds.update(w)
                bottom += b
    info = {"chase": mode, "policy": get_policy(policy).name if mode == SEQUENTIAL else None,
            "derived": frozenset(r for r, rel in eprog.schema.items()
                                 if rel.kind != EXTENSIONAL)}
    return EmpiricalDistribution(dict(worlds), bottom, n, seed, budget, info)


def project_distribution(dist: Distribution, keep=None):
    """Project every world to ``keep`` (default: drop auxiliary relations) and merge."""
    if keep is not None:
        keep = frozenset(keep)

    def proj(w: Instance) -> Instance:
        if keep is None:
            return Instance(f for f in w if not f.relation.startswith(AUX_PREFIX))
        return w.project(keep)

    merged: dict = {}
    zero = Fraction(0) if isinstance(dist, WorldDistribution) else 0
    for w, m in dist.worlds.items():
        pw = proj(w)
        merged[pw] = merged.get(pw, zero) + m
    if isinstance(dist, WorldDistribution):
        return WorldDistribution(merged, dist.bottom, dict(dist.info))
    return EmpiricalDistribution(merged, dist.bottom, dist.runs, dist.seed, dist.budget,
                                 dict(dist.info))


_BOTTOM = object()


def _normalized(d: Distribution) -> dict:
    out = d.masses()
    out[_BOTTOM] = Fraction(d.bottom, d.runs) if isinstance(d, EmpiricalDistribution) \
        else d.bottom
    return out


def total_variation(a: Distribution, b: Distribution):
    """Half the L1 distance, with the error event as its own outcome.

    Exact (a :class:`Fraction`) when both inputs are exact, else a float.
    """
    pa, pb = _normalized(a), _normalized(b)
    tv = sum((abs(pa.get(k, 0) - pb.get(k, 0)) for k in set(pa) | set(pb)), Fraction(0)) / 2
    if isinstance(a, WorldDistribution) and isinstance(b, WorldDistribution):
        return tv
    return float(tv)


@dataclass(frozen=True)
class CellMean:
    """Mean of one real-valued position over the runs where its cell occurs."""

    relation: str
    key: tuple  # non-real arguments, None at real positions
    position: int
    mean: float
    runs: int

    def pattern(self) -> str:
        args = ["_" if v is None else format_value(v) for v in self.key]
        return f"{self.relation}({', '.join(args)})"


def cell_means(dist: EmpiricalDistribution, relations=None) -> list:
    """Per-cell means of sampled reals: facts are grouped by their non-real arguments.

    Only ``relations`` are summarized; by default the derived relations
    recorded by :func:`monte_carlo`, or every relation if none were recorded.
    """
    if relations is None:
        relations = dist.info.get("derived")
    acc: dict = {}
    for world, count in dist.worlds.items():
        for f in world:
            if relations is not None and f.relation not in relations:
                continue
            reals = [i for i, v in enumerate(f.args) if type(v) is float]
            if not reals:
                continue
            key = tuple(None if type(v) is float else v for v in f.args)
            for i in reals:
                acc.setdefault((f.relation, key, i), []).append((f.args[i], count))
    out = []
    for (rel, key, i), samples in acc.items():
        n = sum(c for _, c in samples)
        mean = math.fsum(v * c for v, c in samples) / n
        out.append(CellMean(rel, key, i, mean, n))
    out.sort(key=lambda c: (c.relation, tuple_key(tuple("" if v is None else v for v in c.key)),
                            c.position))
    return out


__all__ = [
    "WorldDistribution", "EmpiricalDistribution", "InputPdb", "exact_enumerate",
    "monte_carlo", "project_distribution", "total_variation", "cell_means", "CellMean",
    "NotFinitelyEnumerable", "RunFailed", "EngineError", "EXACT", "EMPIRICAL",
    "DEFAULT_MAX_DEPTH",
]
