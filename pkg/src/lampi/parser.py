"""Tokenizer, parser and name resolution for ``.dk`` signature files.

Grammar (one declaration per terminating dot)::

    decl   ::= ident param* ":" term "."                 static symbol
             | ident param* ":" term ":=" term "."       opaque definition
             | "def" ident param* ":" term "."           definable symbol
             | "def" ident param* [":" term] ":=" term "."
             | rule+ "."                                  one rule block
             | "#CONV" term "," term "." | "#WHNF" term "." | "#SNF" term "."
             | "#REQUIRE" ident "."
    param  ::= "(" ident ":" term ")"
    rule   ::= "[" [ident ("," ident)*] "]" term "-->" term
    term   ::= ident ":" app "->" term | ident ":" app "=>" term
             | ident "=>" term | app ["->" term]
    app    ::= sterm+
    sterm  ::= ident | "Type" | "_" | "(" term ")" | "{" term "}"

Parsing produces raw syntax; :func:`resolve` turns it into :mod:`lampi.term`
terms once the names in scope are known.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Optional, Sequence, Union

from lampi.errors import LexError, ParseError, ScopeError, SourceLocation
from lampi.term import (
    TYPE, App, Bound, Const, Guard, Lam, Local, Pi, Term, app,
    free_locals,
)

# ---------------------------------------------------------------------------
# tokens

KEYWORDS = {"def": "DEF", "Type": "TYPE", "_": "WILD"}

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<comment>\(;)
  | (?P<directive>\#[A-Za-z]+)
  | (?P<punct>-->|->|=>|:=|[:.()\[\]{},])
  | (?P<ident>[A-Za-z0-9_'](?:[A-Za-z0-9_']*)(?:\.[A-Za-z0-9_'][A-Za-z0-9_']*)?)
""", re.VERBOSE)

IDENT_RE = re.compile(r"[A-Za-z0-9_']+(?:\.[A-Za-z0-9_']+)?")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    loc: SourceLocation

    def __repr__(self) -> str:
        return f"{self.kind}({self.text!r})" if self.kind in ("IDENT", "DIRECTIVE") else self.kind


def tokenize(text: str, filename: str = "<string>") -> list[Token]:
    tokens: list[Token] = []
    pos, line, line_start = 0, 1, 0
    n = len(text)
    while pos < n:
        loc = SourceLocation(filename, line, pos - line_start + 1)
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise LexError(f"unexpected character {text[pos]!r}", loc)
        kind = m.lastgroup
        end = m.end()
        if kind == "comment":
            close = text.find(";)", end)
            if close < 0:
                raise LexError("unterminated comment", loc)
            end = close + 2
        elif kind == "directive":
            tokens.append(Token("DIRECTIVE", m.group().upper(), loc))
        elif kind == "punct":
            tokens.append(Token(m.group(), m.group(), loc))
        elif kind == "ident":
            word = m.group()
            tokens.append(Token(KEYWORDS.get(word, "IDENT"), word, loc))
        chunk = text[pos:end]
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            line_start = pos + chunk.rfind("\n") + 1
        pos = end
    tokens.append(Token("EOF", "", SourceLocation(filename, line, pos - line_start + 1)))
    return tokens


# ---------------------------------------------------------------------------
# raw syntax

@dataclass(frozen=True)
class RVar:
    name: str
    loc: SourceLocation


@dataclass(frozen=True)
class RType:
    loc: SourceLocation


@dataclass(frozen=True)
class RWild:
    loc: SourceLocation


@dataclass(frozen=True)
class RApp:
    fn: "Raw"
    arg: "Raw"
    loc: SourceLocation


@dataclass(frozen=True)
class RLam:
    name: str
    ann: Optional["Raw"]
    body: "Raw"
    loc: SourceLocation


@dataclass(frozen=True)
class RPi:
    name: Optional[str]
    dom: "Raw"
    cod: "Raw"
    loc: SourceLocation


@dataclass(frozen=True)
class RGuard:
    inner: "Raw"
    loc: SourceLocation


Raw = Union[RVar, RType, RWild, RApp, RLam, RPi, RGuard]
Syntax = Union[Raw, Term]


def raw_spine(r: Raw) -> tuple[Raw, list[Raw]]:
    args = []
    while isinstance(r, RApp):
        args.append(r.arg)
        r = r.fn
    return r, args[::-1]


def raw_paths(r: Raw, node_type: type, path: tuple[int, ...] = ()) -> set[tuple[int, ...]]:
    """Positions of ``node_type`` nodes; a path lists child indices from the root
    (App: 0 function, 1 argument; binders: 0 annotation/domain, 1 body)."""
    found = {path} if isinstance(r, node_type) else set()
    children: list[Optional[Raw]] = []
    match r:
        case RApp(f, a, _):
            children = [f, a]
        case RLam(_, ann, body, _):
            children = [ann, body]
        case RPi(_, dom, cod, _):
            children = [dom, cod]
        case RGuard(inner, _):
            children = [inner]
    for i, c in enumerate(children):
        if c is not None:
            found |= raw_paths(c, node_type, path + (i,))
    return found


# ---------------------------------------------------------------------------
# declarations

@dataclass(frozen=True)
class StaticDecl:
    name: str
    type: Syntax
    loc: SourceLocation


@dataclass(frozen=True)
class DefinableDecl:
    name: str
    type: Syntax
    loc: SourceLocation


@dataclass(frozen=True)
class Definition:
    name: str
    type: Optional[Syntax]
    body: Syntax
    loc: SourceLocation
    opaque: bool = False


@dataclass(frozen=True)
class RawRule:
    context: tuple[str, ...]
    lhs: Syntax
    rhs: Syntax
    loc: SourceLocation

    @property
    def head(self) -> str:
        return raw_spine(self.lhs)[0].name

    @property
    def guard_positions(self) -> set[tuple[int, ...]]:
        return raw_paths(self.lhs, RGuard)

    @property
    def wildcard_positions(self) -> set[tuple[int, ...]]:
        return raw_paths(self.lhs, RWild)


@dataclass(frozen=True)
class RuleBlock:
    rules: tuple[RawRule, ...]
    loc: SourceLocation


@dataclass(frozen=True)
class Directive:
    kind: str  # CONV | WHNF | SNF | REQUIRE
    terms: tuple[Syntax, ...]
    loc: SourceLocation
    module: Optional[str] = None


Declaration = Union[StaticDecl, DefinableDecl, Definition, RuleBlock, Directive]


# ---------------------------------------------------------------------------
# parser

class _Parser:
    def __init__(self, tokens: Sequence[Token]):
        self.toks = tokens
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def advance(self) -> Token:
        t = self.toks[self.i]
        if t.kind != "EOF":
            self.i += 1
        return t

    def expect(self, kind: str, what: Optional[str] = None) -> Token:
        t = self.tok
        if t.kind != kind:
            shown = t.text or "end of file"
            raise ParseError(f"expected {what or kind!r}, found {shown!r}", t.loc)
        return self.advance()

    # declarations -----------------------------------------------------
    def file(self) -> list[Declaration]:
        decls = []
        while self.tok.kind != "EOF":
            decls.append(self.declaration())
        return decls

    def declaration(self) -> Declaration:
        t = self.tok
        if t.kind == "DEF":
            return self.definable()
        if t.kind == "[":
            return self.rule_block()
        if t.kind == "DIRECTIVE":
            return self.directive()
        if t.kind == "IDENT":
            name = self.advance().text
            params = self.params()
            self.expect(":")
            ty = self.wrap_pi(params, self.term())
            if self.tok.kind == ":=":
                # a typed body without `def` is checked but never unfolded
                self.advance()
                body = self.wrap_lam(params, self.term())
                self.expect(".", "'.' ending the definition")
                return Definition(name, ty, body, t.loc, opaque=True)
            self.expect(".", "'.' ending the declaration")
            return StaticDecl(name, ty, t.loc)
        raise ParseError(f"unexpected {t.text or 'end of file'!r} at start of declaration", t.loc)

    def params(self) -> list[tuple[str, Raw, SourceLocation]]:
        out = []
        while self.tok.kind == "(" and self.peek().kind == "IDENT" and self.peek(2).kind == ":":
            lp = self.advance()
            name = self.advance().text
            self.advance()
            ty = self.term()
            self.expect(")")
            out.append((name, ty, lp.loc))
        return out

    @staticmethod
    def wrap_pi(params, body: Raw) -> Raw:
        for name, ty, loc in reversed(params):
            body = RPi(name, ty, body, loc)
        return body

    @staticmethod
    def wrap_lam(params, body: Raw) -> Raw:
        for name, ty, loc in reversed(params):
            body = RLam(name, ty, body, loc)
        return body

    def definable(self) -> Declaration:
        start = self.advance()
        name = self.expect("IDENT", "symbol name").text
        params = self.params()
        ty = None
        if self.tok.kind == ":":
            self.advance()
            ty = self.term()
        if self.tok.kind == ":=":
            self.advance()
            body = self.term()
            self.expect(".", "'.' ending the definition")
            full_ty = None if ty is None else self.wrap_pi(params, ty)
            return Definition(name, full_ty, self.wrap_lam(params, body), start.loc)
        if ty is None:
            raise ParseError(f"definable symbol {name!r} needs a type or a body", self.tok.loc)
        self.expect(".", "'.' ending the declaration")
        return DefinableDecl(name, self.wrap_pi(params, ty), start.loc)

    def rule_block(self) -> RuleBlock:
        start = self.tok
        rules = []
        while self.tok.kind == "[":
            rules.append(self.rule())
        self.expect(".", "'.' ending the rule block")
        return RuleBlock(tuple(rules), start.loc)

    def rule(self) -> RawRule:
        start = self.expect("[")
        names: list[str] = []
        if self.tok.kind != "]":
            names.append(self.expect("IDENT", "rule variable").text)
            while self.tok.kind == ",":
                self.advance()
                names.append(self.expect("IDENT", "rule variable").text)
        self.expect("]")
        lhs = self.term()
        head, _ = raw_spine(lhs)
        if not isinstance(head, RVar):
            raise ParseError("rule left-hand side must be headed by an identifier", start.loc)
        if self.tok.kind != "-->":
            raise ParseError("rule without '-->'", self.tok.loc)
        self.advance()
        rhs = self.term()
        seen = set()
        for n in names:
            if n in seen:
                raise ParseError(f"rule variable {n!r} listed twice", start.loc)
            seen.add(n)
        return RawRule(tuple(names), lhs, rhs, start.loc)

    def directive(self) -> Directive:
        t = self.advance()
        kind = t.text[1:]
        if kind == "CONV":
            a = self.term()
            self.expect(",")
            b = self.term()
            self.expect(".")
            return Directive("CONV", (a, b), t.loc)
        if kind in ("WHNF", "SNF"):
            a = self.term()
            self.expect(".")
            return Directive(kind, (a,), t.loc)
        if kind == "REQUIRE":
            mod = self.expect("IDENT", "module name").text
            self.expect(".")
            return Directive("REQUIRE", (), t.loc, module=mod)
        raise ParseError(f"unknown directive {t.text}", t.loc)

    # terms ------------------------------------------------------------
    def term(self) -> Raw:
        t = self.tok
        if t.kind == "IDENT" and self.peek().kind == ":":
            self.advance()
            self.advance()
            ann = self.application()
            if self.tok.kind == "->":
                self.advance()
                return RPi(t.text, ann, self.term(), t.loc)
            if self.tok.kind == "=>":
                self.advance()
                return RLam(t.text, ann, self.term(), t.loc)
            raise ParseError("expected '->' or '=>' after a typed binder", self.tok.loc)
        if t.kind == "IDENT" and self.peek().kind == "=>":
            self.advance()
            self.advance()
            return RLam(t.text, None, self.term(), t.loc)
        left = self.application()
        if self.tok.kind == "->":
            self.advance()
            return RPi(None, left, self.term(), t.loc)
        return left

    def application(self) -> Raw:
        head = self.simple()
        while self.tok.kind in ("IDENT", "TYPE", "WILD", "(", "{"):
            arg = self.simple()
            head = RApp(head, arg, head_loc(head))
        return head

    def simple(self) -> Raw:
        t = self.tok
        match t.kind:
            case "IDENT":
                self.advance()
                return RVar(t.text, t.loc)
            case "TYPE":
                self.advance()
                return RType(t.loc)
            case "WILD":
                self.advance()
                return RWild(t.loc)
            case "(":
                self.advance()
                inner = self.term()
                self.expect(")", "')'")
                return inner
            case "{":
                self.advance()
                inner = self.term()
                self.expect("}", "'}'")
                return RGuard(inner, t.loc)
        raise ParseError(f"unexpected {t.text or 'end of file'!r} in term", t.loc)


def head_loc(r: Raw) -> SourceLocation:
    return r.loc


def parse_file(tokens: Union[Sequence[Token], str], filename: str = "<string>") -> list[Declaration]:
    if isinstance(tokens, str):
        tokens = tokenize(tokens, filename)
    return _Parser(tokens).file()


def parse_term(text: str, filename: str = "<string>") -> Raw:
    p = _Parser(tokenize(text, filename))
    r = p.term()
    if p.tok.kind != "EOF":
        raise ParseError(f"trailing input {p.tok.text!r}", p.tok.loc)
    return r


# ---------------------------------------------------------------------------
# resolution

NameTest = Callable[[str], bool]


class _Resolver:
    def __init__(self, known: NameTest, delta: Optional[list[str]] = None,
                 in_lhs: bool = False, locals_: Iterable[str] = ()):
        self.known = known
        self.delta = delta if delta is not None else []
        self.in_lhs = in_lhs
        self.locals = set(locals_)
        self.wild = 0

    def fresh_wild(self) -> str:
        while True:
            self.wild += 1
            name = f"_{self.wild}"
            if name not in self.delta and not self.known(name):
                self.delta.append(name)
                return name

    def go(self, r: Raw, scope: list[str]) -> Term:
        match r:
            case RVar(name, loc):
                for depth, bound in enumerate(reversed(scope)):
                    if bound == name:
                        return Bound(depth, name)
                if name in self.delta or name in self.locals:
                    return Local(name)
                if self.known(name):
                    return Const(name)
                raise ScopeError(f"unknown identifier {name!r}", loc)
            case RType():
                return TYPE
            case RWild(loc):
                if not self.in_lhs:
                    raise ScopeError("wildcard '_' outside a rule left-hand side", loc)
                w = self.fresh_wild()
                k = len(scope)
                return app(Local(w), *(Bound(k - 1 - i, scope[i]) for i in range(k)))
            case RGuard(inner, loc):
                if not self.in_lhs:
                    raise ScopeError("guard '{...}' outside a rule left-hand side", loc)
                return Guard(self.go(inner, scope))
            case RApp(f, a, _):
                return App(self.go(f, scope), self.go(a, scope))
            case RLam(name, ann, body, loc):
                self.check_binder(name, loc)
                ann_t = None if ann is None else self.go(ann, scope)
                return Lam(name, ann_t, self.go(body, scope + [name]))
            case RPi(name, dom, cod, loc):
                if name is not None:
                    self.check_binder(name, loc)
                dom_t = self.go(dom, scope)
                return Pi(name or "_", dom_t, self.go(cod, scope + [name or ""]))
        raise TypeError(f"not raw syntax: {r!r}")

    def check_binder(self, name: str, loc: SourceLocation) -> None:
        if name in self.delta:
            raise ScopeError(f"binder {name!r} shadows a rule variable", loc)


def resolve_term(r: Syntax, known: NameTest, locals_: Iterable[str] = ()) -> Term:
    if isinstance(r, Term):
        return r
    return _Resolver(known, locals_=locals_).go(r, [])


@dataclass(frozen=True)
class ResolvedRule:
    """A rule whose identifiers are scoped: rule variables are ``Local``s,
    wildcards are fresh rule variables and guards are ``Guard`` nodes."""

    context: tuple[str, ...]
    lhs: Term
    rhs: Term
    loc: SourceLocation

    @property
    def head(self) -> str:
        from lampi.term import spine

        h = spine(self.lhs)[0]
        return getattr(h, "name", "?")


def resolve_rule(rule: RawRule, known: NameTest) -> ResolvedRule:
    delta = list(rule.context)
    res = _Resolver(known, delta, in_lhs=True)
    lhs = res.go(rule.lhs, [])
    used = free_locals(lhs)
    for n in rule.context:
        if n not in used:
            raise ScopeError(f"rule variable {n!r} does not occur in the left-hand side", rule.loc)
    res.in_lhs = False
    rhs = res.go(rule.rhs, [])
    return ResolvedRule(tuple(delta), lhs, rhs, rule.loc)


def resolve(decl: Declaration, known: NameTest) -> Declaration:
    """Scope every term of ``decl`` against the signature names ``known``."""
    match decl:
        case StaticDecl() | DefinableDecl():
            return replace(decl, type=resolve_term(decl.type, known))
        case Definition():
            ty = None if decl.type is None else resolve_term(decl.type, known)
            return replace(decl, type=ty, body=resolve_term(decl.body, known))
        case RuleBlock():
            return replace(decl, rules=tuple(resolve_rule(r, known) for r in decl.rules))
        case Directive():
            return replace(decl, terms=tuple(resolve_term(t, known) for t in decl.terms))
    raise TypeError(f"not a declaration: {decl!r}")


def parse_closed_term(text: str, known: NameTest) -> Term:
    """Parse and resolve a standalone term (convenience for tests and demos)."""
    return resolve_term(parse_term(text), known)
