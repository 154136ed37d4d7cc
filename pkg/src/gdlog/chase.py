"""The probabilistic chase over the existential translation.

Rule bodies are matched by a naive nested-loop join (see :mod:`gdlog.kernels`)
over the whole current instance at every step.  Applicable pairs are
``(rule occurrence, head grounding)``; a sampler is blocked for a grounding as
soon as its auxiliary relation holds *some* fact with that prefix, which is
what makes every rule fire at most once per grounding.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, NamedTuple, Optional, Union

from .dist import IrrationalParameter
from .kernels import OP_BIND, OP_CHECK, OP_CONST, Rng, match_rule
from .model import Const, Fact, Instance, Var
from .translate import SAMPLER, ExistentialProgram, ExistentialRule, as_existential
from .values import format_value, is_rational, tuple_key

SEQUENTIAL = "sequential"
PARALLEL = "parallel"
STAR = "*"  # the dummy outcome of deterministic rules
_EMPTY = frozenset()


class ChaseError(Exception):
    pass


class NoApplicableRule(ChaseError):
    pass


class ApplicablePair(NamedTuple):
    rule: int  # occurrence index in the existential program
    grounding: tuple


class FiringConfiguration(tuple):
    """Per-occurrence counts of applicable groundings."""

    @property
    def total(self) -> int:
        return sum(self)


class TraceRecord(NamedTuple):
    step: int
    rule: int
    grounding: tuple
    sample: object

    def format(self) -> str:
        g = ", ".join(format_value(v) for v in self.grounding)
        s = STAR if self.sample is STAR else format_value(self.sample)
        return f"{self.step}\t{self.rule}\t({g})\t{s}"


# --- policies --------------------------------------------------------------

@dataclass(frozen=True)
class ChasePolicy:
    """A deterministic total order on applicable pairs; the least pair fires."""

    name: str
    key: Callable

    def select(self, pairs):
        if not pairs:
            raise NoApplicableRule("no applicable pair")
        return min(pairs, key=self.key)


def canonical_key(pair: ApplicablePair):
    return (pair.rule, tuple_key(pair.grounding))


POLICIES = {
    "rule-index": ChasePolicy("rule-index", canonical_key),
    "reverse": ChasePolicy("reverse", lambda p: (-p.rule, tuple_key(p.grounding))),
    "grounding-first": ChasePolicy("grounding-first", lambda p: (tuple_key(p.grounding), p.rule)),
}


def get_policy(policy) -> ChasePolicy:
    if isinstance(policy, ChasePolicy):
        return policy
    try:
        return POLICIES[policy]
    except KeyError:
        raise ValueError(f"unknown policy {policy!r}; choose from {sorted(POLICIES)}") from None


# --- compilation -----------------------------------------------------------

class CompiledRule:
    __slots__ = ("rule", "index", "sampler", "plan", "nslots", "tcodes", "targs",
                 "head_rel", "family", "u_len")

    def __init__(self, rule: ExistentialRule, prog: ExistentialProgram):
        self.rule = rule
        self.index = rule.index
        self.sampler = rule.kind == SAMPLER
        self.head_rel = rule.head.relation
        slots: dict = {}
        plan = []
        for atom in rule.body:
            codes, args = [], []
            for t in atom.terms:
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
            plan.append((atom.relation, tuple(codes), tuple(args)))
        self.plan = tuple(plan)
        self.nslots = len(slots)
        tcodes, targs = [], []
        for t in rule.head.terms:
            if isinstance(t, Var):
                tcodes.append(1)
                targs.append(slots[t.name])
            else:
                tcodes.append(0)
                targs.append(t.value)
        self.tcodes = tuple(tcodes)
        self.targs = tuple(targs)
        if self.sampler:
            self.family = prog.family(rule.dist)
            self.u_len = len(rule.head.terms) - rule.n_params
        else:
            self.family = None
            self.u_len = len(rule.head.terms)

    def groundings(self, state: "ChaseState") -> set:
        if self.sampler:
            blocked = state.prefixes.get(self.head_rel, _EMPTY)
        else:
            blocked = state.rels.get(self.head_rel, _EMPTY)
        return match_rule(self.plan, self.nslots, self.tcodes, self.targs, state.rels, blocked)

    def fact(self, grounding: tuple, sample) -> Fact:
        if self.sampler:
            return Fact(self.head_rel, grounding + (sample,))
        return Fact(self.head_rel, grounding)

    def draw(self, grounding: tuple, rng) -> object:
        if not self.sampler:
            return STAR
        params = grounding[self.u_len:]
        self.family.validate(params)
        return self.family.sample(params, rng)

    def outcomes(self, grounding: tuple) -> list:
        """Exact ``(outcome, probability)`` branches for this pair."""
        if not self.sampler:
            return [(STAR, Fraction(1))]
        params = grounding[self.u_len:]
        self.family.validate(params)
        for i, p in enumerate(params):
            if not is_rational(p):
                raise IrrationalParameter(
                    f"{self.family.name}: parameter {i} = {format_value(p)} is not rational")
        return self.family.support(params)


class CompiledProgram:
    def __init__(self, prog: ExistentialProgram):
        self.prog = prog
        self.rules = tuple(CompiledRule(r, prog) for r in prog.rules)
        self.aux = frozenset(r.name for r in prog.auxiliary)

    def pairs(self, state) -> list:
        out = []
        for cr in self.rules:
            idx = cr.index
            out.extend(ApplicablePair(idx, g) for g in cr.groundings(state))
        return out

    def any_applicable(self, state) -> bool:
        return any(cr.groundings(state) for cr in self.rules)

    def select(self, state, policy: ChasePolicy) -> Optional[ApplicablePair]:
        if policy.name in ("rule-index", "reverse"):
            rules = self.rules if policy.name == "rule-index" else reversed(self.rules)
            for cr in rules:
                gs = cr.groundings(state)
                if gs:
                    return ApplicablePair(cr.index, min(gs, key=tuple_key))
            return None
        pairs = self.pairs(state)
        return policy.select(pairs) if pairs else None


def compile_program(prog) -> CompiledProgram:
    prog = as_existential(prog)
    cp = prog.__dict__.get("_compiled")
    if cp is None:
        cp = prog.__dict__["_compiled"] = CompiledProgram(prog)
    return cp


class ChaseState:
    """Mutable working copy of an instance with per-relation tuple sets.

    ``prefixes`` holds, for each auxiliary relation, the argument tuples with
    the sampled position dropped; it is the blocking set of the sampler.
    """

    __slots__ = ("rels", "prefixes", "aux")

    def __init__(self, aux=frozenset()):
        self.rels: dict = {}
        self.prefixes: dict = {}
        self.aux = aux

    @classmethod
    def from_instance(cls, instance: Instance, aux=frozenset()) -> "ChaseState":
        st = cls(aux)
        for f in instance:
            st.add(f)
        return st

    def add(self, fact: Fact) -> bool:
        s = self.rels.get(fact.relation)
        if s is None:
            s = self.rels[fact.relation] = set()
        if fact.args in s:
            return False
        s.add(fact.args)
        if fact.relation in self.aux:
            self.prefixes.setdefault(fact.relation, set()).add(fact.args[:-1])
        return True

    def to_instance(self) -> Instance:
        return Instance(Fact(r, a) for r, tuples in self.rels.items() for a in tuples)


# --- public operations ------------------------------------------------------

def applicable_pairs(prog, d: Instance) -> list:
    """``App(d)`` as a list in canonical (rule index, grounding) order."""
    cp = compile_program(prog)
    return sorted(cp.pairs(ChaseState.from_instance(d, cp.aux)), key=canonical_key)


def firing_configuration(prog, d: Instance) -> FiringConfiguration:
    cp = compile_program(prog)
    st = ChaseState.from_instance(d, cp.aux)
    return FiringConfiguration(len(cr.groundings(st)) for cr in cp.rules)


def head_fact(rule: ExistentialRule, grounding: tuple, sample=STAR) -> Fact:
    """``f_phi(a, b)``: the fact produced by firing ``rule`` on ``grounding``."""
    if rule.kind == SAMPLER:
        return Fact(rule.head.relation, tuple(grounding) + (sample,))
    return Fact(rule.head.relation, tuple(grounding))


def extend_seq(d: Instance, rule: ExistentialRule, grounding: tuple, sample=STAR) -> Instance:
    return d.add(head_fact(rule, grounding, sample))


def extend_par(d: Instance, triples) -> Instance:
    return d.union(head_fact(r, g, b) for r, g, b in triples)


def _rule(prog: ExistentialProgram, index: int) -> ExistentialRule:
    return prog.rules[index]


def sequential_step(prog, d: Instance, policy="rule-index", rng: Optional[Rng] = None,
                    step: int = 0):
    """Fire the policy-selected pair once; returns ``(instance, [TraceRecord])``."""
    cp = compile_program(prog)
    if rng is None:
        rng = Rng(0, 0)
    st = ChaseState.from_instance(d, cp.aux)
    pair = cp.select(st, get_policy(policy))
    if pair is None:
        raise NoApplicableRule("no applicable pair")
    cr = cp.rules[pair.rule]
    b = cr.draw(pair.grounding, rng)
    return d.add(cr.fact(pair.grounding, b)), [TraceRecord(step, pair.rule, pair.grounding, b)]


def parallel_step(prog, d: Instance, rng: Optional[Rng] = None, step: int = 0):
    """Fire every applicable pair at once, sampling in canonical pair order."""
    cp = compile_program(prog)
    if rng is None:
        rng = Rng(0, 0)
    st = ChaseState.from_instance(d, cp.aux)
    pairs = sorted(cp.pairs(st), key=canonical_key)
    if not pairs:
        raise NoApplicableRule("no applicable pair")
    facts, records = [], []
    for pair in pairs:
        cr = cp.rules[pair.rule]
        b = cr.draw(pair.grounding, rng)
        facts.append(cr.fact(pair.grounding, b))
        records.append(TraceRecord(step, pair.rule, pair.grounding, b))
    return d.union(facts), records


@dataclass(frozen=True)
class Terminated:
    instance: Instance
    steps: int


@dataclass(frozen=True)
class BudgetExceeded:
    instance: Instance
    budget: int


ChaseOutcome = Union[Terminated, BudgetExceeded]


def run_chase(prog, d0: Instance, mode: str = PARALLEL, policy="rule-index",
              budget: int = 10000, rng: Optional[Rng] = None, seed: int = 0,
              trace: Optional[Callable] = None,
              observer: Optional[Callable] = None) -> ChaseOutcome:
    """Chase ``d0`` until no pair is applicable or ``budget`` steps have run.

    ``trace`` receives every :class:`TraceRecord`; ``observer`` receives
    ``(step, instance)`` after each step (building that instance is not free).
    Without ``rng`` a stream ``(seed, 0)`` is used.
    """
    cp = compile_program(prog)
    if rng is None:
        rng = Rng(seed, 0)
    st = ChaseState.from_instance(d0, cp.aux)
    if mode == SEQUENTIAL:
        pol = get_policy(policy)
        step_fn = lambda: _seq(cp, st, pol, rng)  # noqa: E731
    elif mode == PARALLEL:
        step_fn = lambda: _par(cp, st, rng)  # noqa: E731
    else:
        raise ValueError(f"unknown mode {mode!r}")
    steps = 0
    while True:
        if steps >= budget:
            if cp.any_applicable(st):
                return BudgetExceeded(st.to_instance(), budget)
            return Terminated(st.to_instance(), steps)
        fired = step_fn()
        if fired is None:
            return Terminated(st.to_instance(), steps)
        steps += 1
        if trace is not None:
            for pair, b in fired:
                trace(TraceRecord(steps, pair.rule, pair.grounding, b))
        if observer is not None:
            observer(steps, st.to_instance())


def _seq(cp: CompiledProgram, st: ChaseState, policy, rng):
    pair = cp.select(st, policy)
    if pair is None:
        return None
    cr = cp.rules[pair.rule]
    b = cr.draw(pair.grounding, rng)
    st.add(cr.fact(pair.grounding, b))
    return ((pair, b),)


def _par(cp: CompiledProgram, st: ChaseState, rng):
    pairs = cp.pairs(st)
    if not pairs:
        return None
    pairs.sort(key=canonical_key)
    fired = []
    for pair in pairs:
        cr = cp.rules[pair.rule]
        fired.append((pair, cr.draw(pair.grounding, rng), cr))
    for pair, b, cr in fired:
        st.add(cr.fact(pair.grounding, b))
    return [(p, b) for p, b, _ in fired]


def exact_successors(cp: CompiledProgram, instance: Instance, mode: str, policy) -> Optional[list]:
    """Children of ``instance`` in the chase tree with their branch weights.

    Returns ``None`` at a leaf.  In parallel mode the branches are the product
    of the supports of all applicable pairs.
    """
    st = ChaseState.from_instance(instance, cp.aux)
    if mode == SEQUENTIAL:
        pair = cp.select(st, get_policy(policy))
        if pair is None:
            return None
        cr = cp.rules[pair.rule]
        return [(instance.add(cr.fact(pair.grounding, b)), p)
                for b, p in cr.outcomes(pair.grounding)]
    pairs = sorted(cp.pairs(st), key=canonical_key)
    if not pairs:
        return None
    options = []
    for pair in pairs:
        cr = cp.rules[pair.rule]
        options.append([(cr.fact(pair.grounding, b), p) for b, p in cr.outcomes(pair.grounding)])
    out = []
    for combo in itertools.product(*options):
        weight = Fraction(1)
        for _, p in combo:
            weight *= p
        out.append((instance.union(f for f, _ in combo), weight))
    return out


# --- induced functional dependencies ---------------------------------------

class FDViolation(NamedTuple):
    relation: str
    key: tuple
    values: tuple

    def __str__(self):
        key = ", ".join(format_value(v) for v in self.key)
        vals = ", ".join(format_value(v) for v in self.values)
        return f"{self.relation}: ({key}) -> {{{vals}}}"


def check_induced_fds(prog, d: Instance) -> list:
    """Violations of "all but the last attribute determine the last" on auxiliary relations.

    An empty list means every induced dependency holds.
    """
    prog = as_existential(prog)
    out = []
    rels = d.by_relation()
    for aux in prog.auxiliary:
        seen: dict = {}
        for args in rels.get(aux.name, ()):
            seen.setdefault(args[:-1], set()).add(args[-1])
        for key, vals in seen.items():
            if len(vals) > 1:
                out.append(FDViolation(aux.name, key, tuple(sorted(vals, key=lambda v: tuple_key((v,))))))
    return sorted(out, key=lambda v: (v.relation, tuple_key(v.key)))


__all__ = [
    "ApplicablePair", "FiringConfiguration", "ChasePolicy", "POLICIES", "get_policy",
    "TraceRecord", "Terminated", "BudgetExceeded", "ChaseOutcome", "NoApplicableRule",
    "applicable_pairs", "firing_configuration", "extend_seq", "extend_par", "head_fact",
    "sequential_step", "parallel_step", "run_chase", "check_induced_fds", "FDViolation",
    "compile_program", "ChaseState", "exact_successors", "SEQUENTIAL", "PARALLEL", "STAR",
    "canonical_key",
]
