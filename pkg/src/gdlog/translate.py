"""Translation of GDatalog programs into existential Datalog.

Every probabilistic rule ``R(u, Psi[p]) :- body`` with occurrence index ``i``
becomes a sampler rule ``exists z: __aux_R_i(u, p, z) :- body`` and a copy
rule ``R(u, z) :- __aux_R_i(u, p, z)``.  The auxiliary relation is fresh per
occurrence, so duplicated rules fire independently.  Deterministic rules pass
through unchanged.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Optional

from .model import (
    AUX_PREFIX, AUXILIARY, Atom, Instance, Program, Relation, Rule, Var,
    check_program,
)
from .values import value_tag

DETERMINISTIC = "deterministic"
SAMPLER = "existential-sampler"
COPY = "copy-down"


@dataclass(frozen=True)
class ExistentialRule:
    """A rule of the translated program.

    For samplers, ``head`` is the auxiliary atom *without* the existential
    position; its terms are exactly the head grounding ``(u, p)``.
    """

    index: int
    kind: str
    head: Atom
    body: tuple
    source_index: int
    aux: Optional[str] = None
    dist: Optional[str] = None
    n_params: int = 0
    exist_var: str = "z"

    @property
    def is_sampler(self) -> bool:
        return self.kind == SAMPLER

    def __str__(self):
        if self.kind == SAMPLER:
            terms = ", ".join([*map(str, self.head.terms), self.exist_var])
            head = f"exists {self.exist_var}: {self.head.relation}({terms})"
        else:
            head = str(self.head)
        if not self.body:
            return f"{head}."
        return f"{head} :- {', '.join(map(str, self.body))}."


@dataclass(frozen=True)
class ExistentialProgram:
    rules: tuple
    source: Program
    auxiliary: tuple  # Relation objects, kind auxiliary

    @cached_property
    def schema(self) -> dict:
        out = dict(self.source.schema)
        out.update((r.name, r) for r in self.auxiliary)
        return out

    @property
    def output_relations(self) -> frozenset:
        """The original extensional and intensional relations."""
        return frozenset(self.source.schema)

    def family(self, name: str):
        return self.source.family(name)

    def __str__(self):
        from .parser import format_relation
        lines = [format_relation(r) for r in
                 (*self.source.extensional, *self.source.intensional, *self.auxiliary)]
        lines += [f"alias {a} = {f}." for a, f in self.source.aliases]
        lines.append("")
        lines += [str(r) for r in self.rules]
        return "\n".join(lines) + "\n"


def aux_name(relation: str, occurrence: int) -> str:
    return f"{AUX_PREFIX}{relation}_{occurrence}"


def _fresh_var(rule: Rule, base: str = "z") -> str:
    used = set(rule.head.variables())
    for a in rule.body:
        used.update(a.variables())
    name, k = base, 0
    while name in used:
        k += 1
        name = f"{base}{k}"
    return name


def to_existential(program: Program, validate: bool = True) -> ExistentialProgram:
    """Build the existential version of ``program``."""
    if validate:
        check_program(program)
    schema = program.schema
    rules, aux_rels = [], []
    for rule in program.rules:
        dterms = rule.head.dist_terms()
        if not dterms:
            rules.append(ExistentialRule(len(rules), DETERMINISTIC, rule.head,
                                         rule.body, rule.index))
            continue
        (dt,) = dterms
        head_rel = schema[rule.head.relation]
        u = rule.head.terms[:-1]
        sorts = _body_sorts(program, rule)
        domains = list(head_rel.domains[:-1])
        for p in dt.params:
            domains.append(sorts[p.name] if isinstance(p, Var) else value_tag(p.value))
        family = program.family(dt.dist)
        domains.append(family.outcome_tag)
        name = aux_name(rule.head.relation, rule.index)
        aux_rels.append(Relation(name, tuple(domains), AUXILIARY))
        z = _fresh_var(rule)
        grounding = (*u, *dt.params)
        rules.append(ExistentialRule(
            len(rules), SAMPLER, Atom(name, tuple(grounding)), rule.body,
            rule.index, aux=name, dist=dt.dist, n_params=len(dt.params), exist_var=z))
        rules.append(ExistentialRule(
            len(rules), COPY, Atom(rule.head.relation, (*u, Var(z))),
            (Atom(name, (*grounding, Var(z))),), rule.index, aux=name))
    return ExistentialProgram(tuple(rules), program, tuple(aux_rels))


def _body_sorts(program: Program, rule: Rule) -> dict:
    sorts = {}
    for atom in rule.body:
        rel = program.schema[atom.relation]
        for t, tag in zip(atom.terms, rel.domains):
            if isinstance(t, Var):
                sorts.setdefault(t.name, tag)
    return sorts


def as_existential(prog) -> ExistentialProgram:
    """Translate ``prog`` unless it already is existential; memoized per program."""
    if isinstance(prog, ExistentialProgram):
        return prog
    cached = prog.__dict__.get("_existential")
    if cached is None:
        cached = prog.__dict__["_existential"] = to_existential(prog)
    return cached


def project_instance(instance: Instance, keep=None, program=None) -> Instance:
    """Drop facts over relations outside ``keep``.

    With ``keep=None`` the auxiliary relations are removed: either the
    program's output schema is kept, or, without a program, every relation
    not carrying the reserved auxiliary prefix.
    """
    if keep is None:
        if program is not None:
            keep = as_existential(program).output_relations
        else:
            return Instance(f for f in instance if not f.relation.startswith(AUX_PREFIX))
    return instance.project(keep)


__all__ = [
    "ExistentialRule", "ExistentialProgram", "to_existential", "as_existential",
    "project_instance", "aux_name", "DETERMINISTIC", "SAMPLER", "COPY",
]
