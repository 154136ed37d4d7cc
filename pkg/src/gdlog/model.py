"""Core data model: schemas, terms, atoms, rules, programs, facts, instances."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, NamedTuple, Optional, Union

from . import dist as dists
from .values import DOMAIN_TAGS, Value, coerce, format_value, tuple_key, value_tag

EXTENSIONAL = "extensional"
INTENSIONAL = "intensional"
AUXILIARY = "auxiliary"

AUX_PREFIX = "__aux_"
GOAL = "Goal"


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    column: int
    length: int = 1

    def __str__(self):
        return f"{self.file}:{self.line}:{self.column}"


@dataclass(frozen=True)
class Relation:
    name: str
    domains: tuple
    kind: str = EXTENSIONAL
    attributes: tuple = ()

    def __post_init__(self):
        for tag in self.domains:
            if tag not in DOMAIN_TAGS:
                raise ValueError(f"unknown domain tag {tag!r}")

    @property
    def arity(self) -> int:
        return len(self.domains)


# --- terms -----------------------------------------------------------------

@dataclass(frozen=True)
class Const:
    value: Value

    def __str__(self):
        return format_value(self.value)


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class DistTerm:
    dist: str
    params: tuple

    def __str__(self):
        return f"{self.dist}[{', '.join(map(str, self.params))}]"


Term = Union[Const, Var, DistTerm]


@dataclass(frozen=True)
class Atom:
    relation: str
    terms: tuple = ()
    negated: bool = False

    def variables(self) -> list:
        out = []
        for t in self.terms:
            if isinstance(t, Var):
                out.append(t.name)
            elif isinstance(t, DistTerm):
                out.extend(p.name for p in t.params if isinstance(p, Var))
        return out

    def dist_terms(self) -> list:
        return [t for t in self.terms if isinstance(t, DistTerm)]

    def __str__(self):
        s = self.relation
        if self.terms:
            s += "(" + ", ".join(map(str, self.terms)) + ")"
        return ("not " + s) if self.negated else s


@dataclass(frozen=True)
class Comparison:
    """Built-in comparison literal; only allowed in constraint bodies."""

    op: str
    left: Term
    right: Term

    def variables(self) -> list:
        return [t.name for t in (self.left, self.right) if isinstance(t, Var)]

    def __str__(self):
        return f"{self.left} {self.op} {self.right}"


@dataclass(frozen=True)
class Rule:
    head: Atom
    body: tuple = ()
    index: int = 0
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)

    @property
    def is_probabilistic(self) -> bool:
        return bool(self.head.dist_terms())

    def __str__(self):
        if not self.body:
            return f"{self.head}."
        return f"{self.head} :- {', '.join(map(str, self.body))}."


@dataclass(frozen=True)
class Program:
    """A GDatalog program: typed schemas plus an ordered bag of rules."""

    extensional: tuple = ()
    intensional: tuple = ()
    rules: tuple = ()
    aliases: tuple = ()  # (alias, family) pairs

    @cached_property
    def schema(self) -> dict:
        return {r.name: r for r in (*self.extensional, *self.intensional)}

    def relation(self, name: str) -> Relation:
        return self.schema[name]

    def family(self, name: str) -> dists.Distribution:
        return dists.lookup(name, self.aliases)

    @property
    def output_relations(self) -> frozenset:
        return frozenset(self.schema)


# --- facts and instances ---------------------------------------------------

class Fact(NamedTuple):
    relation: str
    args: tuple

    def __str__(self):
        if not self.args:
            return self.relation
        return f"{self.relation}({', '.join(format_value(v) for v in self.args)})"

    def sort_key(self):
        return (self.relation, tuple_key(self.args))


class SchemaError(ValueError):
    """A fact does not conform to the declared schema."""

    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(message)


def make_fact(schema: dict, relation: str, args: Iterable) -> Fact:
    """Build a fact, checking the relation, arity and domains (widening ints)."""
    args = tuple(args)
    rel = schema.get(relation)
    if rel is None:
        raise SchemaError("UnknownRelation", f"unknown relation {relation}")
    if len(args) != rel.arity:
        raise SchemaError(
            "ArityMismatch",
            f"{relation} has arity {rel.arity}, got {len(args)} argument(s)")
    try:
        args = tuple(coerce(v, tag) for v, tag in zip(args, rel.domains))
    except TypeError as exc:
        raise SchemaError("DomainMismatch", f"{relation}: {exc}") from None
    return Fact(relation, args)


class Instance:
    """An immutable finite set of facts (set semantics)."""

    __slots__ = ("facts", "_hash", "_by_rel")

    def __init__(self, facts: Iterable[Fact] = ()):
        self.facts = frozenset(facts)
        self._hash = None
        self._by_rel = None

    @classmethod
    def of(cls, *facts) -> "Instance":
        return cls(Fact(r, tuple(a)) for r, *a in facts)

    def __contains__(self, fact) -> bool:
        return fact in self.facts

    def __iter__(self) -> Iterator[Fact]:
        return iter(self.facts)

    def __len__(self) -> int:
        return len(self.facts)

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return self.facts == other.facts

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.facts)
        return self._hash

    def __le__(self, other: "Instance") -> bool:
        return self.facts <= other.facts

    def __getstate__(self):
        return self.facts

    def __setstate__(self, facts):
        self.facts = facts
        self._hash = None
        self._by_rel = None

    def add(self, fact: Fact) -> "Instance":
        if fact in self.facts:
            return self
        return Instance(self.facts | {fact})

    def union(self, facts: Iterable[Fact]) -> "Instance":
        new = self.facts.union(facts)
        return self if len(new) == len(self.facts) else Instance(new)

    def by_relation(self) -> dict:
        """Relation name -> set of argument tuples."""
        if self._by_rel is None:
            out: dict = {}
            for f in self.facts:
                out.setdefault(f.relation, set()).add(f.args)
            self._by_rel = out
        return self._by_rel

    def relation(self, name: str) -> frozenset:
        return frozenset(self.by_relation().get(name, ()))

    def project(self, keep) -> "Instance":
        keep = frozenset(keep)
        kept = [f for f in self.facts if f.relation in keep]
        return self if len(kept) == len(self.facts) else Instance(kept)

    def canonical(self) -> list:
        return sorted(self.facts, key=Fact.sort_key)

    def sort_key(self):
        return tuple(f.sort_key() for f in self.canonical())

    def __repr__(self):
        return "{" + ", ".join(map(str, self.canonical())) + "}"


# --- validation ------------------------------------------------------------

@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    rule_index: Optional[int] = None
    span: Optional[SourceSpan] = None

    def __str__(self):
        where = f"{self.span}: " if self.span else ""
        rule = f"rule {self.rule_index}: " if self.rule_index is not None else ""
        return f"{where}{rule}{self.code}: {self.message}"


class ProgramError(ValueError):
    """Raised when a program fails validation; carries all diagnostics."""

    def __init__(self, diagnostics: list):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(map(str, self.diagnostics)))


def validate_program(program: Program) -> list:
    """Return the list of diagnostics; an empty list means the program is valid."""
    diags: list = []

    def report(code, msg, rule=None):
        diags.append(Diagnostic(code, msg, rule.index if rule else None,
                                rule.span if rule else None))

    seen: dict = {}
    for rel in (*program.extensional, *program.intensional):
        if rel.name in seen:
            report("DuplicateRelation", f"relation {rel.name} declared twice")
        seen[rel.name] = rel
        if rel.name.startswith(AUX_PREFIX):
            report("ReservedName", f"{rel.name}: prefix {AUX_PREFIX} is reserved")
    for alias, family in program.aliases:
        if alias in dists.FAMILIES:
            report("AliasShadowsFamily", f"alias {alias} shadows a built-in family")
        if family not in dists.FAMILIES:
            report("UnknownDistribution", f"alias {alias} targets unknown family {family}")

    for rule in program.rules:
        _validate_rule(program, rule, report)
    return diags


def check_program(program: Program) -> Program:
    diags = validate_program(program)
    if diags:
        raise ProgramError(diags)
    return program


def _validate_rule(program: Program, rule: Rule, report) -> None:
    schema = program.schema
    ok = True
    for atom in (rule.head, *rule.body):
        if not isinstance(atom, Atom):
            report("UnsupportedLiteral", f"{atom} is not allowed in a program", rule)
            ok = False
            continue
        if atom.negated:
            report("UnsupportedLiteral", f"negation is not allowed in a program: {atom}", rule)
        rel = schema.get(atom.relation)
        if rel is None:
            report("UndeclaredRelation", f"relation {atom.relation} is not declared", rule)
            ok = False
        elif len(atom.terms) != rel.arity:
            report("ArityMismatch",
                   f"{atom.relation} has arity {rel.arity}, used with {len(atom.terms)}", rule)
            ok = False
    for atom in rule.body:
        if isinstance(atom, Atom) and atom.dist_terms():
            report("DistTermInBody", f"distribution term in body atom {atom}", rule)
            ok = False
    head = rule.head
    dterms = head.dist_terms()
    head_rel = schema.get(head.relation)
    if head_rel is not None and head_rel.kind != INTENSIONAL:
        if dterms:
            report("DistTermInExtensionalHead",
                   f"distribution term in extensional head {head}", rule)
        else:
            report("ExtensionalHead", f"rule head {head} is extensional", rule)
        ok = False
    if len(dterms) > 1:
        report("MultipleDistTerms", "at most one distribution term per head", rule)
        ok = False
    elif dterms and not isinstance(head.terms[-1], DistTerm):
        report("DistTermNotLast", "the distribution term must be the last head argument", rule)
        ok = False

    body_vars = {v for a in rule.body if isinstance(a, Atom) for v in a.variables()}
    for v in head.variables():
        if v not in body_vars:
            report("UnsafeHeadVariable", f"head variable {v} does not occur in the body", rule)
            ok = False
    if not ok:
        return

    # sorts: every occurrence of a variable carries the same domain tag
    sorts: dict = {}
    for atom in rule.body:
        rel = schema[atom.relation]
        for t, tag in zip(atom.terms, rel.domains):
            if isinstance(t, Var):
                prev = sorts.setdefault(t.name, tag)
                if prev != tag:
                    report("MixedSortVariable",
                           f"variable {t.name} used as {prev} and {tag}", rule)
            elif isinstance(t, Const):
                _check_const(t, tag, atom, rule, report)
    for t, tag in zip(head.terms, head_rel.domains):
        if isinstance(t, Var):
            if sorts.get(t.name, tag) != tag:
                report("MixedSortVariable",
                       f"variable {t.name} is {sorts[t.name]} but head position is {tag}", rule)
        elif isinstance(t, Const):
            _check_const(t, tag, head, rule, report)
        elif isinstance(t, DistTerm):
            _check_dist_term(program, t, tag, sorts, rule, report)


def _check_const(t: Const, tag: str, atom: Atom, rule: Rule, report) -> None:
    try:
        have = value_tag(t.value)
    except TypeError as exc:
        report("ConstantDomainMismatch", str(exc), rule)
        return
    if have != tag:
        report("ConstantDomainMismatch",
               f"constant {t} ({have}) in {atom.relation} position of domain {tag}", rule)


def _check_dist_term(program, t: DistTerm, tag: str, sorts: dict, rule, report) -> None:
    try:
        family = program.family(t.dist)
    except dists.UnknownDistribution as exc:
        report("UnknownDistribution", str(exc), rule)
        return
    if len(t.params) != family.pardim:
        report("ParameterCountMismatch",
               f"{t.dist} takes {family.pardim} parameter(s), got {len(t.params)}", rule)
        return
    if family.outcome_tag != tag:
        report("OutcomeDomainMismatch",
               f"{t.dist} yields {family.outcome_tag} but the head position is {tag}", rule)
    all_const = True
    for i, (p, accepted) in enumerate(zip(t.params, family.param_tags)):
        if isinstance(p, Var):
            all_const = False
            ptag = sorts.get(p.name)
        else:
            ptag = value_tag(p.value)
        if ptag not in accepted:
            report("ParameterDomainMismatch",
                   f"{t.dist} parameter {i} ({p}) has domain {ptag}, "
                   f"expected one of {sorted(accepted)}", rule)
            all_const = False
    if all_const:
        try:
            family.validate(tuple(p.value for p in t.params))
        except dists.ParameterOutOfRange as exc:
            report("ParameterOutOfRange", str(exc), rule)
