"""Termination check by weak acyclicity of the existential translation.

Nodes are positions ``(relation, i)``.  For every rule and every variable
``x`` that occurs in both body and head, each body position of ``x`` gets a
normal edge to each head position of ``x``; if the rule is a sampler it also
gets a special edge to the existential position.  Constants induce no edges.
The program is weakly acyclic iff no cycle passes through a special edge.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .model import Var
from .translate import as_existential

NORMAL = "normal"
SPECIAL = "special"


class Position(NamedTuple):
    relation: str
    index: int  # 0-based

    def __str__(self):
        return f"{self.relation}[{self.index + 1}]"


class Edge(NamedTuple):
    source: Position
    target: Position
    kind: str


@dataclass(frozen=True)
class DependencyGraph:
    nodes: frozenset
    edges: frozenset

    def successors(self) -> dict:
        out: dict = {n: [] for n in self.nodes}
        for e in sorted(self.edges):
            out[e.source].append(e)
        return out


def dependency_graph(prog) -> DependencyGraph:
    eprog = as_existential(prog)
    nodes = {Position(r.name, i) for r in eprog.schema.values() for i in range(r.arity)}
    edges = set()
    for rule in eprog.rules:
        body_pos: dict = {}
        for atom in rule.body:
            for i, t in enumerate(atom.terms):
                if isinstance(t, Var):
                    body_pos.setdefault(t.name, []).append(Position(atom.relation, i))
        head_pos: dict = {}
        for i, t in enumerate(rule.head.terms):
            if isinstance(t, Var):
                head_pos.setdefault(t.name, []).append(Position(rule.head.relation, i))
        exist = Position(rule.head.relation, len(rule.head.terms)) if rule.is_sampler else None
        for x, targets in head_pos.items():
            for src in body_pos.get(x, ()):
                for tgt in targets:
                    edges.add(Edge(src, tgt, NORMAL))
                if exist is not None:
                    edges.add(Edge(src, exist, SPECIAL))
    return DependencyGraph(frozenset(nodes), frozenset(edges))


@dataclass(frozen=True)
class AcyclicityResult:
    acyclic: bool
    cycle: Optional[tuple] = None  # edges of a cycle through a special edge

    def __bool__(self):
        return self.acyclic

    def describe(self) -> str:
        if self.acyclic:
            return "weakly-acyclic"
        parts = [str(self.cycle[0].source)]
        for e in self.cycle:
            arrow = "=>" if e.kind == SPECIAL else "->"
            parts.append(f"{arrow} {e.target}")
        return "not weakly acyclic: " + " ".join(parts)


def _path(succ: dict, start: Position, goal: Position) -> Optional[list]:
    """Shortest edge path from ``start`` to ``goal`` (empty if equal)."""
    if start == goal:
        return []
    prev: dict = {start: None}
    queue = deque([start])
    while queue:
        n = queue.popleft()
        for e in succ.get(n, ()):
            if e.target in prev:
                continue
            prev[e.target] = e
            if e.target == goal:
                out = []
                cur = goal
                while prev[cur] is not None:
                    out.append(prev[cur])
                    cur = prev[cur].source
                return out[::-1]
            queue.append(e.target)
    return None


def is_weakly_acyclic(prog) -> AcyclicityResult:
    """Check for a cycle through a special edge; returns one as witness."""
    g = dependency_graph(prog)
    succ = g.successors()
    for e in sorted(g.edges):
        if e.kind != SPECIAL:
            continue
        back = _path(succ, e.target, e.source)
        if back is not None:
            return AcyclicityResult(False, (e, *back))
    return AcyclicityResult(True)


__all__ = ["Position", "Edge", "DependencyGraph", "dependency_graph", "is_weakly_acyclic",
           "AcyclicityResult", "NORMAL", "SPECIAL"]
