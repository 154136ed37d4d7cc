"""Constraints and conditioning.

A constraint is a small non-recursive Datalog program with negation and
comparisons whose distinguished nullary relation ``Goal`` holds exactly on
the worlds satisfying it.  Conditioning keeps those worlds and renormalizes;
the error event never satisfies a constraint.
"""
from __future__ import annotations

import operator
from dataclasses import dataclass
from fractions import Fraction

from .engine import EmpiricalDistribution, EngineError, WorldDistribution
from .kernels import OP_BIND, OP_CHECK, OP_CONST, match_rule
from .model import GOAL, Atom, Comparison, Const, Instance, Rule
from .parser import ParseError, parse_rules


class ConstraintError(ValueError):
    pass


class ZeroMassCondition(EngineError):
    """The constraint has probability zero; the conditional is undefined."""


_CMP = {"=": operator.eq, "!=": operator.ne, "<": operator.lt,
        "<=": operator.le, ">": operator.gt, ">=": operator.ge}


@dataclass(frozen=True)
class Constraint:
    rules: tuple
    goal: str = GOAL

    def __post_init__(self):
        _check_constraint(self)

    @property
    def derived(self) -> frozenset:
        return frozenset(r.head.relation for r in self.rules)

    def strata(self) -> list:
        """Derived relations in dependency order."""
        deps = {r: set() for r in self.derived}
        for rule in self.rules:
            for lit in rule.body:
                if isinstance(lit, Atom) and lit.relation in deps:
                    deps[rule.head.relation].add(lit.relation)
        order, state = [], {}

        def visit(rel, path):
            if state.get(rel) == 2:
                return
            if state.get(rel) == 1:
                raise ConstraintError(f"recursive constraint through {' -> '.join(path + [rel])}")
            state[rel] = 1
            for d in sorted(deps[rel]):
                visit(d, path + [rel])
            state[rel] = 2
            order.append(rel)

        for rel in sorted(deps):
            visit(rel, [])
        return order

    def __str__(self):
        return "\n".join(map(str, self.rules)) + "\n"


def _check_constraint(c: Constraint) -> None:
    if c.goal not in c.derived:
        raise ConstraintError(f"constraint never derives {c.goal}")
    for rule in c.rules:
        if rule.head.dist_terms():
            raise ConstraintError(f"distribution term in constraint rule {rule}")
        if rule.head.negated:
            raise ConstraintError(f"negated head in {rule}")
        positive = set()
        for lit in rule.body:
            if isinstance(lit, Atom) and not lit.negated:
                positive.update(lit.variables())
        needed = set(rule.head.variables())
        for lit in rule.body:
            if isinstance(lit, Comparison) or lit.negated:
                needed.update(lit.variables())
        unsafe = sorted(needed - positive)
        if unsafe:
            raise ConstraintError(
                f"unsafe variable(s) {', '.join(unsafe)} in constraint rule {rule}")
    for rule in c.rules:
        if rule.head.relation == c.goal and rule.head.terms:
            raise ConstraintError(f"{c.goal} must be nullary")
    c.strata()


def parse_constraint(text: str, file: str = "<string>") -> Constraint:
    try:
        return Constraint(tuple(parse_rules(text, file)))
    except ConstraintError as exc:
        raise ParseError(str(exc), code="ConstraintError") from None


def _compile_positive(rule: Rule):
    slots: dict = {}
    plan = []
    for lit in rule.body:
        if not isinstance(lit, Atom) or lit.negated:
            continue
        codes, args = [], []
        for t in lit.terms:
            if isinstance(t, Const):
                codes.append(OP_CONST)
                args.append(t.value)
            elif t.name in slots:
                codes.append(OP_CHECK)
                args.append(slots[t.name])
            else:
                slots[t.name] = len(slots)
                codes.append(OP_BIND)
                args.append(slots[t.name])
        plan.append((lit.relation, tuple(codes), tuple(args)))
    names = list(slots)
    return tuple(plan), len(slots), (1,) * len(names), tuple(range(len(names))), names


def _term_value(t, env):
    return t.value if isinstance(t, Const) else env[t.name]


def _evaluate(world: Instance, c: Constraint) -> dict:
    rels = {r: set(ts) for r, ts in world.by_relation().items()}
    for rel in c.strata():
        derived = set(rels.get(rel, ()))
        for rule in c.rules:
            if rule.head.relation != rel:
                continue
            plan, nslots, tcodes, targs, names = _compile_positive(rule)
            for binding in match_rule(plan, nslots, tcodes, targs, rels, ()):
                env = dict(zip(names, binding))
                if all(_holds(lit, env, rels) for lit in rule.body
                       if isinstance(lit, Comparison) or lit.negated):
                    derived.add(tuple(_term_value(t, env) for t in rule.head.terms))
        rels[rel] = derived
    return rels


def _holds(lit, env, rels) -> bool:
    if isinstance(lit, Comparison):
        a, b = _term_value(lit.left, env), _term_value(lit.right, env)
        try:
            return _CMP[lit.op](a, b)
        except TypeError:
            return lit.op == "!="
    args = tuple(_term_value(t, env) for t in lit.terms)
    return args not in rels.get(lit.relation, ())


def world_satisfies(world: Instance, c: Constraint) -> bool:
    """True iff ``Goal`` is derivable from ``world``."""
    return bool(_evaluate(world, c).get(c.goal))


def condition(dist, c: Constraint):
    """Restrict ``dist`` to the worlds satisfying ``c`` and renormalize.

    Raises :class:`ZeroMassCondition` when no mass (exact) or no run
    (empirical) survives.
    """
    if isinstance(dist, WorldDistribution):
        kept = {w: p for w, p in dist.worlds.items() if world_satisfies(w, c)}
        mass = sum(kept.values(), Fraction(0))
        if mass == 0:
            raise ZeroMassCondition("the constraint has probability 0")
        info = dict(dist.info, conditioned=True)
        return WorldDistribution({w: p / mass for w, p in kept.items()}, Fraction(0), info)
    if isinstance(dist, EmpiricalDistribution):
        kept = {w: n for w, n in dist.worlds.items() if world_satisfies(w, c)}
        survivors = sum(kept.values())
        if survivors == 0:
            raise ZeroMassCondition(f"no run out of {dist.runs} satisfies the constraint")
        info = dict(dist.info, conditioned=True)
        return EmpiricalDistribution(kept, 0, survivors, dist.seed, dist.budget, info)
    raise TypeError(f"cannot condition {type(dist).__name__}")


__all__ = ["Constraint", "ConstraintError", "ZeroMassCondition", "parse_constraint",
           "world_satisfies", "condition"]
