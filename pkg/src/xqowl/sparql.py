"""SPARQL SELECT subset: prefix declarations, one basic graph pattern,
optional ORDER BY.

Matching is set-semantics over the asserted triples of a graph (simple
entailment): duplicate solutions are removed, and without ORDER BY the
rows come back sorted by their bound terms so results are reproducible.
FILTER, OPTIONAL, UNION and LIMIT are recognized and rejected loudly.

`_:name` subject tokens and relative IRI references (such as <#b1>)
denote fragment IRIs of the queried graph's base and are resolved when
the query runs against a concrete graph.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import SparqlSyntaxError, UnsupportedFeatureError
from .rdf import Iri, Literal, RdfGraph, SolutionTable, Term, resolve_iri, term_key

_UNSUPPORTED = {
    "FILTER", "OPTIONAL", "UNION", "LIMIT", "OFFSET", "DISTINCT", "REDUCED",
    "GRAPH", "CONSTRUCT", "ASK", "DESCRIBE", "FROM", "BIND", "VALUES", "MINUS",
    "SERVICE", "GROUP", "HAVING",
}

_SCHEME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:")


@dataclass(frozen=True)
class Variable:
    name: str


@dataclass(frozen=True)
class FragmentRef:
    """A `_:name` token: the entity base + "#" + name of the queried graph."""

    name: str


PatternTerm = Variable | FragmentRef | Iri | Literal


@dataclass(frozen=True)
class TriplePattern:
    subject: PatternTerm
    predicate: PatternTerm
    object: PatternTerm


@dataclass(frozen=True)
class SparqlQuery:
    select: tuple[str, ...] | None  # None means SELECT *
    patterns: tuple[TriplePattern, ...]
    order_by: tuple[tuple[str, str], ...] = ()  # (variable, "asc" | "desc")

    def variables(self) -> list[str]:
        """Pattern variables in order of first occurrence."""
        seen: list[str] = []
        for p in self.patterns:
            for term in (p.subject, p.predicate, p.object):
                if isinstance(term, Variable) and term.name not in seen:
                    seen.append(term.name)
        return seen


# -- parsing ---------------------------------------------------------------------

@dataclass
class _Token:
    kind: str
    value: str
    pos: int


_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+)
      | (?P<iriref><[^<>\s]*>)
      | (?P<var>\?[A-Za-z_][\w\-]*)
      | (?P<frag>_:[A-Za-z_][\w.\-]*)
      | (?P<string>'[^']*'|"[^"]*")
      | (?P<pname>[A-Za-z_][\w.\-]*:[A-Za-z_][\w.\-]*)
      | (?P<prefix_ns>[A-Za-z_][\w.\-]*:)
      | (?P<name>[A-Za-z_][\w.\-]*)
      | (?P<punct>[{}().*])
      | (?P<other>\S)
    """, re.VERBOSE)


def _tokenize(text: str) -> list[_Token]:
    # stray characters become "other" tokens so the parser can surface a
    # recognizable unsupported keyword before tripping over, say, FILTER's ">"
    tokens: list[_Token] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        assert m is not None
        pos = m.end()
        kind = m.lastgroup or ""
        if kind == "ws":
            continue
        tokens.append(_Token(kind, m.group(), m.start()))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0
        self.prefixes: dict[str, str] = {}

    def peek(self) -> _Token | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self) -> _Token:
        tok = self.peek()
        if tok is None:
            raise SparqlSyntaxError("unexpected end of query")
        self.i += 1
        return tok

    def keyword(self) -> str | None:
        tok = self.peek()
        if tok is not None and tok.kind == "name":
            return tok.value.upper()
        return None

    def expect_keyword(self, word: str) -> None:
        got = self.keyword()
        self._guard_unsupported()
        if got != word:
            raise SparqlSyntaxError(f"expected {word}, found "
                                    f"{self.peek().value if self.peek() else 'end of query'!r}")
        self.next()

    def expect_punct(self, char: str) -> None:
        tok = self.next()
        if tok.kind != "punct" or tok.value != char:
            raise SparqlSyntaxError(f"expected {char!r}, found {tok.value!r}")

    def _guard_unsupported(self) -> None:
        word = self.keyword()
        if word in _UNSUPPORTED:
            raise UnsupportedFeatureError(
                f"{word} is not supported: this engine evaluates a single basic "
                f"graph pattern with optional ORDER BY")

    def parse(self) -> SparqlQuery:
        while self.keyword() == "PREFIX":
            self.next()
            ns_tok = self.next()
            if ns_tok.kind != "prefix_ns":
                raise SparqlSyntaxError(f"expected a prefix name, found {ns_tok.value!r}")
            iri_tok = self.next()
            if iri_tok.kind != "iriref":
                raise SparqlSyntaxError(f"expected an IRI, found {iri_tok.value!r}")
            self.prefixes[ns_tok.value[:-1]] = iri_tok.value[1:-1]
        self.expect_keyword("SELECT")
        self._guard_unsupported()
        select: tuple[str, ...] | None
        if self.peek() is not None and self.peek().kind == "punct" \
                and self.peek().value == "*":
            self.next()
            select = None
        else:
            names = []
            while self.peek() is not None and self.peek().kind == "var":
                names.append(self.next().value[1:])
            if not names:
                raise SparqlSyntaxError("SELECT needs * or at least one ?variable")
            select = tuple(names)
        self.expect_keyword("WHERE")
        self.expect_punct("{")
        patterns = [self.pattern()]
        while True:
            tok = self.peek()
            if tok is None:
                raise SparqlSyntaxError("unterminated group pattern: missing }")
            if tok.kind == "punct" and tok.value == ".":
                self.next()
                tok = self.peek()
                if tok is not None and tok.kind == "punct" and tok.value == "}":
                    break
                patterns.append(self.pattern())
                continue
            if tok.kind == "punct" and tok.value == "}":
                break
            raise SparqlSyntaxError(f"expected '.' or '}}', found {tok.value!r}")
        self.expect_punct("}")
        order_by: list[tuple[str, str]] = []
        if self.keyword() == "ORDER":
            self.next()
            self.expect_keyword("BY")
            while True:
                tok = self.peek()
                if tok is None:
                    break
                if tok.kind == "var":
                    order_by.append((self.next().value[1:], "asc"))
                elif tok.kind == "name" and tok.value.upper() in ("ASC", "DESC"):
                    direction = self.next().value.lower()
                    self.expect_punct("(")
                    var_tok = self.next()
                    if var_tok.kind != "var":
                        raise SparqlSyntaxError("ASC/DESC takes a ?variable")
                    self.expect_punct(")")
                    order_by.append((var_tok.value[1:], direction))
                else:
                    break
            if not order_by:
                raise SparqlSyntaxError("ORDER BY needs at least one ?variable")
        if self.peek() is not None:
            self._guard_unsupported()
            raise SparqlSyntaxError(f"trailing input after query: "
                                    f"{self.peek().value!r}")
        return SparqlQuery(select, tuple(patterns), tuple(order_by))

    def pattern(self) -> TriplePattern:
        subject = self.term(position="subject")
        predicate = self.term(position="predicate")
        obj = self.term(position="object")
        return TriplePattern(subject, predicate, obj)

    def term(self, position: str) -> PatternTerm:
        self._guard_unsupported()
        tok = self.next()
        if tok.kind == "var":
            return Variable(tok.value[1:])
        if tok.kind == "iriref":
            return Iri(tok.value[1:-1])
        if tok.kind == "frag":
            if position == "predicate":
                raise SparqlSyntaxError("_: names cannot be used as predicates")
            return FragmentRef(tok.value[2:])
        if tok.kind == "pname":
            prefix, local = tok.value.split(":", 1)
            if prefix not in self.prefixes:
                raise SparqlSyntaxError(f"undeclared prefix {prefix!r} in query")
            return Iri(self.prefixes[prefix] + local)
        if tok.kind == "string":
            if position != "object":
                raise SparqlSyntaxError(f"a literal cannot be a {position}")
            return Literal(tok.value[1:-1])
        raise SparqlSyntaxError(f"expected a term in {position} position, "
                                f"found {tok.value!r}")


def parse_sparql(text: str) -> SparqlQuery:
    """Parse query text; prefixed names expand at parse time."""
    return _Parser(text).parse()


# -- evaluation ------------------------------------------------------------------

def _ground(term: PatternTerm, row: dict[str, Term], base: str) -> Term | None:
    """Concrete term for a pattern position, or None for a wildcard."""
    if isinstance(term, Variable):
        return row.get(term.name)
    if isinstance(term, FragmentRef):
        return Iri(base.split("#", 1)[0] + "#" + term.name)
    if isinstance(term, Iri) and not _SCHEME_RE.match(term.value):
        return Iri(resolve_iri(base, term.value))
    return term


def eval_bgp(graph: RdfGraph, patterns: tuple[TriplePattern, ...] | list[TriplePattern],
             variables: list[str] | None = None) -> SolutionTable:
    """Join the pattern list against the graph.

    Returns distinct rows over the patterns' variables, sorted by their
    bound terms so the outcome is deterministic.
    """
    if variables is None:
        variables = SparqlQuery(None, tuple(patterns)).variables()
    rows: list[dict[str, Term]] = [{}]
    for pattern in patterns:
        next_rows: list[dict[str, Term]] = []
        for row in rows:
            s = _ground(pattern.subject, row, graph.base_iri)
            p = _ground(pattern.predicate, row, graph.base_iri)
            o = _ground(pattern.object, row, graph.base_iri)
            for triple in graph.match(
                    s if isinstance(s, Iri) else None,
                    p if isinstance(p, Iri) else None,
                    o):
                extended = _bind(row, pattern, triple)
                if extended is not None:
                    next_rows.append(extended)
        rows = next_rows
    unique = {tuple(sorted(row.items())): row for row in rows}
    ordered = sorted(unique.values(),
                     key=lambda r: tuple(term_key(r[v]) for v in variables if v in r))
    return SolutionTable(variables=list(variables), rows=ordered)


def _bind(row: dict[str, Term], pattern: TriplePattern, triple) -> dict[str, Term] | None:
    extended = dict(row)
    for term, value in ((pattern.subject, triple.subject),
                        (pattern.predicate, triple.predicate),
                        (pattern.object, triple.object)):
        if isinstance(term, Variable):
            if term.name in extended and extended[term.name] != value:
                return None
            extended[term.name] = value
    return extended


def eval_select(graph: RdfGraph, query: SparqlQuery) -> SolutionTable:
    """Full SELECT evaluation: join, project, deduplicate, order."""
    table = eval_bgp(graph, query.patterns)
    projected = list(query.select) if query.select is not None else table.variables
    rows = [{v: row[v] for v in projected if v in row} for row in table.rows]
    unique = {tuple(sorted(r.items())): r for r in rows}
    ordered = sorted(unique.values(),
                     key=lambda r: tuple(term_key(r[v]) for v in projected if v in r))
    for var, direction in reversed(query.order_by):
        unbound = [r for r in ordered if var not in r]
        bound = sorted((r for r in ordered if var in r),
                       key=lambda r: term_key(r[var]),
                       reverse=direction == "desc")
        ordered = unbound + bound
    return SolutionTable(variables=projected, rows=ordered)
