"""Concrete syntax for programs (``.gdl``), facts (``.facts``) and constraints (``.cstr``).

See ``docs/language.md`` for the grammar.  Bare identifiers inside rules are
variables; symbols are written as double-quoted strings.  In facts files,
bare identifiers are accepted as symbols.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Optional

from . import dist as dists
from .model import (
    AUXILIARY, EXTENSIONAL, INTENSIONAL, Atom, Comparison, Const, DistTerm, Fact,
    Instance, Program, Relation, Rule, SchemaError, SourceSpan, Var, make_fact,
)
from .values import DOMAIN_TAGS, coerce, format_value

COMPARISON_OPS = ("=", "!=", "<", "<=", ">", ">=")
_KEYWORDS = {"extensional", "intensional", "auxiliary", "alias", "not"}


class ParseError(ValueError):
    def __init__(self, message: str, span: Optional[SourceSpan] = None,
                 code: str = "SyntaxError"):
        self.span = span
        self.code = code
        self.message = message
        super().__init__(f"{span}: {message}" if span else message)


_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r]+|%[^\n]*)
  | (?P<nl>\n)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<real>-?(?:\d+\.\d+(?:[eE][+-]?\d+)?|\d+[eE][+-]?\d+|inf\b))
  | (?P<rat>-?\d+/\d+)
  | (?P<int>-?\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<punct>:-|!=|<=|>=|[()\[\],.:=<>])
""", re.VERBOSE)

_ESCAPES = {"n": "\n", "t": "\t", '"': '"', "\\": "\\"}


class Token:
    __slots__ = ("kind", "text", "value", "line", "col")

    def __init__(self, kind, text, value, line, col):
        self.kind, self.text, self.value, self.line, self.col = kind, text, value, line, col

    def __repr__(self):
        return f"Token({self.kind}, {self.text!r}, {self.line}:{self.col})"


def tokenize(text: str, file: str = "<string>") -> list:
    tokens = []
    pos, line, line_start = 0, 1, 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}",
                             SourceSpan(file, line, col))
        kind = m.lastgroup
        s = m.group()
        pos = m.end()
        if kind == "ws":
            continue
        if kind == "nl":
            line += 1
            line_start = pos
            continue
        if kind == "string":
            value = _unescape(s[1:-1], SourceSpan(file, line, col, len(s)))
        elif kind == "real":
            value = float(s)
        elif kind == "rat":
            num, den = s.split("/")
            if int(den) == 0:
                raise ParseError("zero denominator", SourceSpan(file, line, col, len(s)))
            value = Fraction(int(num), int(den))
        elif kind == "int":
            value = int(s)
        else:
            value = s
        tokens.append(Token(kind, s, value, line, col))
    tokens.append(Token("eof", "", None, line, pos - line_start + 1))
    return tokens


def _unescape(body: str, span) -> str:
    out = []
    it = iter(body)
    for ch in it:
        if ch == "\\":
            nxt = next(it)
            if nxt not in _ESCAPES:
                raise ParseError(f"unknown escape \\{nxt}", span)
            out.append(_ESCAPES[nxt])
        else:
            out.append(ch)
    return "".join(out)


class _Parser:
    def __init__(self, text: str, file: str):
        self.file = file
        self.toks = tokenize(text, file)
        self.i = 0
        self._anon = 0

    # token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k=1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def span(self, tok=None) -> SourceSpan:
        tok = tok or self.tok
        return SourceSpan(self.file, tok.line, tok.col, max(1, len(tok.text)))

    def error(self, msg, tok=None):
        tok = tok or self.tok
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise ParseError(f"{msg}, found {found}", self.span(tok))

    def at(self, text) -> bool:
        return self.tok.kind in ("punct", "ident") and self.tok.text == text

    def expect(self, text) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}")
        tok = self.tok
        self.i += 1
        return tok

    def ident(self, what="identifier") -> Token:
        if self.tok.kind != "ident" or self.tok.text in _KEYWORDS:
            self.error(f"expected {what}")
        tok = self.tok
        self.i += 1
        return tok

    # grammar
    def program(self) -> Program:
        ext, intl, rules, aliases = [], [], [], []
        while self.tok.kind != "eof":
            if self.tok.kind == "ident" and self.tok.text in ("extensional", "intensional") \
                    and self.peek().kind == "ident":
                rel = self.declaration()
                (ext if rel.kind == EXTENSIONAL else intl).append(rel)
            elif self.at("alias") and self.peek().kind == "ident":
                self.i += 1
                name = self.ident("alias name").text
                self.expect("=")
                aliases.append((name, self.ident("distribution name").text))
                self.expect(".")
            else:
                rules.append(self.rule(len(rules)))
        return Program(tuple(ext), tuple(intl), tuple(rules), tuple(aliases))

    def declaration(self) -> Relation:
        kind = self.tok.text
        self.i += 1
        name = self.ident("relation name").text
        domains, attrs = [], []
        if self.at("("):
            self.i += 1
            while not self.at(")"):
                if domains:
                    self.expect(",")
                first = self.ident("domain tag")
                if self.at(":"):
                    self.i += 1
                    attrs.append(first.text)
                    first = self.ident("domain tag")
                if first.text not in DOMAIN_TAGS:
                    raise ParseError(f"unknown domain tag {first.text!r}", self.span(first))
                domains.append(first.text)
            self.expect(")")
        self.expect(".")
        if attrs and len(attrs) != len(domains):
            raise ParseError(f"{name}: name all attributes or none", self.span())
        return Relation(name, tuple(domains), kind, tuple(attrs))

    def rule(self, index: int) -> Rule:
        self._anon = 0
        start = self.tok
        head = self.atom(allow_dist=True)
        body = []
        if self.at(":-"):
            self.i += 1
            while not self.at("."):
                if body:
                    self.expect(",")
                body.append(self.literal())
        self.expect(".")
        return Rule(head, tuple(body), index, self.span(start))

    def literal(self):
        tok = self.tok
        if self.at("not") and self.peek().kind == "ident":
            self.i += 1
            a = self.atom(allow_dist=False)
            return Atom(a.relation, a.terms, negated=True)
        nxt = self.peek()
        if tok.kind in ("string", "int", "rat", "real") or (
                tok.kind == "ident" and nxt.kind == "punct" and nxt.text in COMPARISON_OPS):
            left = self.term(allow_dist=False)
            if not (self.tok.kind == "punct" and self.tok.text in COMPARISON_OPS):
                self.error("expected comparison operator")
            op = self.tok.text
            self.i += 1
            return Comparison(op, left, self.term(allow_dist=False))
        return self.atom(allow_dist=False)

    def atom(self, allow_dist: bool) -> Atom:
        name = self.ident("relation name").text
        terms = []
        if self.at("("):
            self.i += 1
            while not self.at(")"):
                if terms:
                    self.expect(",")
                terms.append(self.term(allow_dist))
            self.expect(")")
        return Atom(name, tuple(terms))

    def term(self, allow_dist: bool):
        tok = self.tok
        if tok.kind in ("string", "int", "rat", "real"):
            self.i += 1
            return Const(tok.value)
        if tok.kind == "ident" and tok.text not in _KEYWORDS:
            self.i += 1
            if self.at("["):
                if not allow_dist:
                    raise ParseError("distribution terms are only allowed in rule heads",
                                     self.span(tok))
                self.i += 1
                params = []
                while not self.at("]"):
                    if params:
                        self.expect(",")
                    params.append(self.term(allow_dist=False))
                self.expect("]")
                return DistTerm(tok.text, tuple(params))
            if tok.text == "_":
                self._anon += 1
                return Var(f"_{self._anon}")
            return Var(tok.text)
        self.error("expected a term")

    def facts(self) -> list:
        out = []
        while self.tok.kind != "eof":
            start = self.tok
            name = self.ident("relation name").text
            args = []
            if self.at("("):
                self.i += 1
                while not self.at(")"):
                    if args:
                        self.expect(",")
                    tok = self.tok
                    if tok.kind in ("string", "int", "rat", "real"):
                        args.append(tok.value)
                    elif tok.kind == "ident" and tok.text not in _KEYWORDS:
                        args.append(tok.text)
                    else:
                        self.error("expected a constant")
                    self.i += 1
                self.expect(")")
            self.expect(".")
            out.append((name, tuple(args), self.span(start)))
        return out


def parse_program(text: str, file: str = "<string>") -> Program:
    """Parse program text.  Validation is separate (:func:`gdlog.model.validate_program`).

    Raises :class:`ParseError` on syntax errors and unknown distribution names.
    Integer constants in rational or real columns are widened to that domain.
    """
    p = _Parser(text, file)
    program = p.program()
    for rule in program.rules:
        for t in rule.head.dist_terms():
            try:
                program.family(t.dist)
            except dists.UnknownDistribution:
                raise ParseError(f"unknown distribution {t.dist!r}", rule.span,
                                 "UnknownDistribution") from None
    return _widen_constants(program)


def _widen_constants(program: Program) -> Program:
    schema = program.schema

    def widen(atom):
        if not isinstance(atom, Atom):
            return atom
        rel = schema.get(atom.relation)
        if rel is None or rel.arity != len(atom.terms):
            return atom
        terms = []
        for t, tag in zip(atom.terms, rel.domains):
            if isinstance(t, Const):
                try:
                    t = Const(coerce(t.value, tag))
                except TypeError:
                    pass  # reported by validation
            terms.append(t)
        return Atom(atom.relation, tuple(terms), atom.negated)

    rules = tuple(Rule(widen(r.head), tuple(widen(a) for a in r.body), r.index, r.span)
                  for r in program.rules)
    return Program(program.extensional, program.intensional, rules, program.aliases)


def parse_rules(text: str, file: str = "<string>") -> list:
    """Parse a rule list without declarations (used for constraints)."""
    p = _Parser(text, file)
    rules = []
    while p.tok.kind != "eof":
        rules.append(p.rule(len(rules)))
    return rules


def parse_fact_list(text: str, file: str = "<string>") -> list:
    """Parse facts without a schema; returns ``[Fact, ...]`` in file order."""
    return [Fact(name, args) for name, args, _ in _Parser(text, file).facts()]


def parse_facts(text: str, schema, file: str = "<string>") -> Instance:
    """Parse a facts file against ``schema`` (a Program or name -> Relation map)."""
    if isinstance(schema, Program):
        schema = schema.schema
    facts = []
    for name, args, span in _Parser(text, file).facts():
        try:
            facts.append(make_fact(schema, name, args))
        except SchemaError as exc:
            raise ParseError(str(exc), span, exc.code) from None
    return Instance(facts)


# --- pretty printing -------------------------------------------------------

def format_relation(rel: Relation) -> str:
    if rel.attributes:
        cols = [f"{a}: {t}" for a, t in zip(rel.attributes, rel.domains)]
    else:
        cols = list(rel.domains)
    return f"{rel.kind} {rel.name}({', '.join(cols)})."


def pretty_program(program: Program) -> str:
    lines = [format_relation(r) for r in (*program.extensional, *program.intensional)]
    lines += [f"alias {a} = {f}." for a, f in program.aliases]
    if lines:
        lines.append("")
    lines += [str(r) for r in program.rules]
    return "\n".join(lines) + "\n"


def format_facts(instance) -> str:
    return "".join(f"{f}.\n" for f in sorted(instance, key=Fact.sort_key))


__all__ = [
    "ParseError", "tokenize", "parse_program", "parse_rules", "parse_facts",
    "parse_fact_list", "pretty_program", "format_relation", "format_facts",
    "format_value", "AUXILIARY", "INTENSIONAL", "EXTENSIONAL",
]
